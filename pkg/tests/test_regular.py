"""Regular pipeline tests: the strongly-regular transform, cancellation,
automaton-level simplify/canonicalize, and completing automata."""

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from fslice.automata import EPS, Nfa, from_strings
from fslice.demand import ALPHABET, BAR0, BAR1, SEL0, SEL1, TWO
from fslice.grammar import (
    DemandGrammar, bounded_languages, generate_equations, instantiate, nt_d,
    nt_fn, nt_sum,
)
from fslice.regular import (
    CompiledGrammar, NotCanonical, NotStronglyRegular, cancel_pairs,
    canonicalize_nfa, create_completing_automaton, enumerate_upto,
    intersect_nonempty, is_canonical_nfa, mn_transform, mohri_nederhof,
    scc_partition, simplify_nfa, tail_states,
)

from helpers import FINITE_CRITERIA, criterion_nfa
from test_demand import WORKED, WORKED_CANONICAL

A, B, C, X = nt_fn("A"), nt_fn("B"), nt_fn("C"), nt_fn("X")

demand_sets = st.frozensets(
    st.lists(st.sampled_from(ALPHABET), max_size=5).map(tuple), max_size=5)


def lang(m: Nfa, k: int = 8) -> set[tuple]:
    return m.enumerate_upto(k)


# -- SCC analysis and the transform ------------------------------------------

def test_scc_partition_orders_dependencies_first():
    g = DemandGrammar()
    g.add(A, (SEL0, B))
    g.add(B, (A,))
    g.add(C, (SEL1, A))
    sccs, scc_of = scc_partition(g)
    assert {frozenset(c) for c in sccs} == {frozenset({A, B}), frozenset({C})}
    assert scc_of[A] == scc_of[B] != scc_of[C]
    ab = next(i for i, c in enumerate(sccs) if A in c)
    assert ab < scc_of[C]


def test_mn_transform_keeps_one_sided_components():
    g = DemandGrammar()
    g.add(A, (SEL0, B))
    g.add(B, (SEL1, A))
    g.add(A, ())
    assert mn_transform(g).productions == g.productions


def test_right_linear_compiles_exactly():
    g = DemandGrammar()
    g.add(A, (SEL0, B))
    g.add(A, ())
    g.add(B, (SEL1, A))
    cg = CompiledGrammar(g)
    assert lang(cg.nfa(A), 6) == {(SEL0, SEL1) * k for k in range(4)}
    assert lang(cg.nfa(B), 6) == {(SEL1,) + (SEL0, SEL1) * k for k in range(3)}


def test_left_linear_compiles_exactly():
    g = DemandGrammar()
    g.add(A, (B, SEL0))
    g.add(A, ())
    g.add(B, (A, SEL1))
    cg = CompiledGrammar(g)
    assert lang(cg.nfa(A), 6) == {(SEL1, SEL0) * k for k in range(4)}


def test_self_embedding_needs_the_transform():
    g = DemandGrammar()
    g.add(X, (SEL0, X, SEL1))
    g.add(X, ())
    with pytest.raises(NotStronglyRegular):
        CompiledGrammar(g)
    t = mn_transform(g)
    got = lang(CompiledGrammar(t).nfa(X), 4)
    assert got == {(SEL0,) * m + (SEL1,) * n for m in range(5) for n in range(5)
                   if m + n <= 4}
    assert {(SEL0, SEL1), (SEL0, SEL0, SEL1, SEL1)} <= got


def test_mixed_component_language_only_grows():
    g = DemandGrammar()
    g.add(X, (SEL0, X, SEL1))
    g.add(X, ())
    exact = bounded_languages(g, 6)[X]
    approx = lang(CompiledGrammar(mn_transform(g)).nfa(X), 6)
    assert exact <= approx


def test_mohri_nederhof_on_lcc_summary(corpus):
    g = generate_equations(corpus["lcc"])
    m = mohri_nederhof(g, nt_sum("linecharcount", 2))
    assert lang(m, 5) == {(TWO,) * k + (BAR0,) for k in range(5)}


@pytest.mark.parametrize("name", ["lcc", "mapsq", "append", "deriv"])
def test_compiled_nfa_covers_grammar_language(corpus, name):
    """Dual route: automaton enumeration vs direct grammar enumeration.

    The compiled automaton is exact for one-sided grammars and an
    over-approximation once the transform rewrote a mixed component.
    """
    from fslice.lang import all_labels
    p = corpus[name]
    g = generate_equations(p)
    gi = instantiate(g, min(all_labels(p)), criterion_nfa(frozenset({()})))
    exact = bounded_languages(gi, 5)
    t = mn_transform(gi)
    cg = CompiledGrammar(t)
    is_identity = t.productions == gi.productions
    for lab in all_labels(p):
        got = lang(cg.nfa(nt_d(lab)), 5)
        want = exact[nt_d(lab)]
        assert want <= got, lab
        if is_identity:
            assert want == got, lab


# -- cancellation ------------------------------------------------------------

def test_cancel_pairs_direct_and_nested():
    m = Nfa(3, 0)
    m.add(0, BAR0, 1)
    m.add(1, SEL0, 2)
    assert cancel_pairs(m) == {(0, 2)}

    n = Nfa(5, 0)
    n.add(0, BAR0, 1)
    n.add(1, BAR1, 2)
    n.add(2, SEL1, 3)
    n.add(3, SEL0, 4)
    assert cancel_pairs(n) == {(1, 3), (0, 4)}


def test_cancel_pairs_cross_epsilon():
    m = Nfa(4, 0)
    m.add(0, BAR0, 1)
    m.add(1, EPS, 2)
    m.add(2, SEL0, 3)
    assert cancel_pairs(m) == {(0, 3)}


def test_tail_states():
    m = Nfa(3, 0)
    m.add(0, SEL0, 1)
    m.add(1, TWO, 2)
    m.finals = {2}
    assert tail_states(m) == {0, 1, 2}

    n = Nfa(3, 0)
    n.add(0, BAR0, 1)
    n.add(1, SEL0, 2)
    n.finals = {2}
    assert tail_states(n) == {1, 2}


# -- simplify / canonicalize on automata --------------------------------------

SIMPLIFY_CASES = [
    {(TWO,)},
    {(SEL0, TWO)},
    {(BAR0, TWO)},
    {(SEL0, BAR0)},
    {(BAR0, SEL0)},
    {(SEL0, TWO, BAR0, SEL0)},
    {(TWO, SEL0), (TWO, SEL1), (TWO,)},
    {(SEL1, BAR0, SEL0, SEL0)},
    {WORKED},
    {WORKED, (SEL0,), (BAR1, SEL1, SEL1)},
]


@pytest.mark.parametrize("strings", SIMPLIFY_CASES, ids=repr)
def test_simplify_nfa_matches_string_oracle(strings):
    got = lang(simplify_nfa(from_strings(strings)))
    assert got == oracles.simplify_language(strings)


@pytest.mark.parametrize("strings", SIMPLIFY_CASES, ids=repr)
def test_canonicalize_nfa_matches_string_oracle(strings):
    m = canonicalize_nfa(from_strings(strings))
    assert lang(m) == oracles.canonicalize_language(strings)
    assert is_canonical_nfa(m)


def test_worked_string_through_the_automaton_pipeline():
    m = from_strings({WORKED})
    assert lang(canonicalize_nfa(m), 11) == {WORKED_CANONICAL}
    assert lang(simplify_nfa(m), 11) == set()


@settings(max_examples=150)
@given(demand_sets)
def test_simplify_nfa_matches_oracle_on_random_sets(strings):
    got = lang(simplify_nfa(from_strings(strings)), 5)
    assert got == oracles.simplify_language(strings)


@settings(max_examples=150)
@given(demand_sets)
def test_canonicalize_nfa_matches_oracle_on_random_sets(strings):
    m = canonicalize_nfa(from_strings(strings))
    assert lang(m, 5) == oracles.canonicalize_language(strings)
    assert is_canonical_nfa(m)


def test_is_canonical_nfa_rejects_selector_after_bar():
    assert is_canonical_nfa(from_strings({(SEL0, BAR0)}))
    assert is_canonical_nfa(from_strings({(TWO, BAR1, BAR0)}))
    assert not is_canonical_nfa(from_strings({(BAR0, SEL0)}))
    assert not is_canonical_nfa(from_strings({(BAR0, TWO)}))
    assert is_canonical_nfa(from_strings(set()))


# -- completing automata -------------------------------------------------------

@pytest.mark.parametrize("strings,want", [
    ({()}, {()}),
    ({(SEL0,)}, {()}),
    ({(TWO,) * k + (BAR0,) for k in range(4)}, {(SEL0,)}),
    ({(BAR1, BAR0)}, {(SEL0, SEL1)}),
    ({(TWO,), (BAR0,)}, {(), (SEL0,)}),
    (set(), set()),
])
def test_completing_automaton_hand_cases(strings, want):
    comp = create_completing_automaton(from_strings(strings))
    assert enumerate_upto(comp, 5) == want


def test_completing_automaton_requires_canonical_input():
    with pytest.raises(NotCanonical):
        create_completing_automaton(from_strings({(BAR0, SEL0)}))


@settings(max_examples=150)
@given(demand_sets)
def test_completing_decisions_match_the_oracle(strings):
    """Over any prefix-closed criterion, intersecting the completing
    automaton decides exactly "some demand string simplifies live"."""
    canon = oracles.canonicalize_language(strings)
    comp = create_completing_automaton(from_strings(canon))
    for sigma in FINITE_CRITERIA:
        want = any(oracles.simplify_string(d + s) is not None
                   for d in canon for s in sigma)
        assert intersect_nonempty(comp, criterion_nfa(sigma)) == want


def test_completion_cores_are_bar_suffixes_reversed():
    strings = {(SEL0, TWO, BAR1, BAR0), (SEL1,), (TWO, BAR1)}
    comp = create_completing_automaton(from_strings(strings))
    assert enumerate_upto(comp, 5) == {(SEL0, SEL1), (), (SEL1,)}


def test_enumerate_upto_guards_its_bound():
    with pytest.raises(ValueError):
        enumerate_upto(from_strings({()}), 13)
