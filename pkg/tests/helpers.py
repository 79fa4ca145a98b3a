"""Shared criterion pools and the residual soundness check."""

from __future__ import annotations

import os
from random import Random

from fslice.automata import Nfa, from_strings
from fslice.criteria import parse_criterion
from fslice.demand import SEL0, SEL1, format_dset, prefix_close, to_path
from fslice.interp import InterpError, observe, run

SEED = int(os.environ.get("FSLICE_SEED", "20260814"))

# Finite prefix-closed criteria as explicit string sets.
FINITE_CRITERIA: list[frozenset] = [
    frozenset({()}),
    frozenset({(), (SEL0,)}),
    frozenset({(), (SEL1,)}),
    frozenset({(), (SEL0,), (SEL1,)}),
    frozenset({(), (SEL1,), (SEL1, SEL1), (SEL1, SEL1, SEL0)}),
    frozenset({(), (SEL0,), (SEL0, SEL0)}),
    frozenset({(), (SEL0,), (SEL1,), (SEL0, SEL1), (SEL1, SEL0)}),
]

# Infinite or regex-shaped criteria for the NFA pipelines.
REGEX_CRITERIA: list[str] = [
    "eps",
    "eps + 0",
    "eps + 1",
    "eps + 0 + 1",
    "eps + 1 + 11 + 110",
    "eps + 0 + 00",
    "0*",
    "1*",
    "(0+1)*",
    "0*1*",
]


def criterion_nfa(strings) -> Nfa:
    return from_strings(sorted(strings))


def criteria_pool() -> list[tuple[str, Nfa]]:
    pool = [(format_dset(s), criterion_nfa(s)) for s in FINITE_CRITERIA]
    pool += [(text, parse_criterion(text)) for text in REGEX_CRITERIA]
    return pool


def random_finite_criteria(count: int, maxlen: int = 5,
                           seed: int = SEED) -> list[frozenset]:
    """Random prefix-closed string sets, deterministic per seed."""
    rng = Random(seed)
    out = []
    for _ in range(count):
        strings = set()
        for _ in range(rng.randint(1, 4)):
            n = rng.randint(0, maxlen)
            strings.add(tuple(rng.choice((SEL0, SEL1)) for _ in range(n)))
        out.append(frozenset(prefix_close(strings)))
    return out


def criterion_strings(crit: Nfa, maxlen: int = 6) -> set[tuple]:
    return crit.enumerate_upto(maxlen)


def check_soundness(original, residual, crit: Nfa, maxlen: int = 6) -> list:
    """Original and residual must agree on every demanded projection.

    Returns a list of failure descriptions; empty means sound. The residual
    must run to completion (in particular, never inspect a hole) and then
    observe identically at every path the criterion demands.
    """
    ro = run(original)
    try:
        rr = run(residual)
    except InterpError as exc:
        return [f"residual failed to run: {exc}"]
    failures = []
    for s in sorted(criterion_strings(crit, maxlen)):
        path = to_path(s)
        want = observe(ro.value, ro.heap, path)
        got = observe(rr.value, rr.heap, path)
        if want != got:
            failures.append(f"path {path}: {want!r} != {got!r}")
    return failures
