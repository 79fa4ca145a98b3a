"""End-to-end slicing pipelines and residual extraction.

Two routes to the same keep-decisions:

* ``slice_noninc`` solves the demand grammar for one criterion: generate
  equations, plug the criterion in, make the grammar strongly regular,
  compile it to the shared automaton, and decide per-point emptiness of the
  simplified demand language. The per-point decision reduces to one global
  backward reachability pass, because every point is an entry state of the
  same automaton.

* ``precompute`` + ``slice_inc`` split the work: with the fixed criterion
  {ε} the per-point demand automata are canonicalized and turned into
  completing automata once; afterwards any criterion is a per-point regular
  intersection against the stored automata (``in_slice``). The two routes
  agree everywhere; the differential tests pin that down.

Residual extraction replaces erased applications and argument occurrences
with holes but never removes control skeleton: lets keep their binding with
a hole right-hand side, ifs keep both branches, and a parameter whose every
use was erased is shown as a hole in the function header.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field

from . import __version__
from .automata import EPS, Nfa, from_strings, intersect, intersect_nonempty
from .demand import SEL0, SEL1, TWO
from .grammar import generate_equations, instantiate, nt_d
from .lang import (
    Call, Car, Cdr, Cons, Const, FsliceError, FunDef, Hole, If, Let, Nil,
    NullQ, Occ, Prim, Program, Return, all_labels, iter_exprs, label_name,
    occurrences_of, parse_label_name, print_program,
)
from .regular import (
    CompiledGrammar, CompletingAutomaton, _shape_nfa, _with_cancel,
    create_completing_automaton, mn_transform, tail_states,
)

ARTIFACT_VERSION = __version__


class ArtifactMismatch(FsliceError):
    pass


@dataclass
class SliceResult:
    keep: dict[int, bool]
    residual: Program
    criterion: Nfa

    @property
    def kept_count(self) -> int:
        return sum(1 for v in self.keep.values() if v)


@dataclass
class PrecomputeArtifact:
    version: str
    fingerprint: str
    automata: dict[int, CompletingAutomaton] = field(default_factory=dict)


def fingerprint(p: Program) -> str:
    text = print_program(p, annotate=True)
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def epsilon_criterion() -> Nfa:
    return from_strings([()])


# ---------------------------------------------------------------------------
# Shared analysis plumbing
# ---------------------------------------------------------------------------

def _compiled_for(p: Program, crit: Nfa) -> CompiledGrammar:
    g = generate_equations(p)
    gi = instantiate(g, min(all_labels(p)), crit)
    return CompiledGrammar(mn_transform(gi))


def _keep_map(p: Program, cg: CompiledGrammar) -> dict[int, bool]:
    """One backward pass decides every point.

    A point stays when its simplified demand language is nonempty, i.e.
    when its entry state reaches an accepting boundary over selector,
    epsilon, and cancellation edges; 2-edges into tailing states are such
    boundaries too.
    """
    aut = _with_cancel(cg.aut)
    tails = tail_states(aut)
    accepting = set(aut.finals)
    back: dict[int, set[int]] = {}
    for src, sym, dst in aut.edges():
        if sym in (SEL0, SEL1, EPS):
            back.setdefault(dst, set()).add(src)
        elif sym == TWO and dst in tails:
            accepting.add(src)
    live = set(accepting)
    todo = list(accepting)
    while todo:
        q = todo.pop()
        for r in back.get(q, ()):
            if r not in live:
                live.add(r)
                todo.append(r)
    return {lab: cg.entry[nt_d(lab)] in live for lab in all_labels(p)}


# ---------------------------------------------------------------------------
# Non-incremental pipeline
# ---------------------------------------------------------------------------

def slice_noninc(p: Program, crit: Nfa) -> SliceResult:
    """Slice under one criterion by solving the demand grammar for it."""
    cg = _compiled_for(p, crit)
    keep = _keep_map(p, cg)
    return SliceResult(keep, extract_residual(p, keep), crit)


# ---------------------------------------------------------------------------
# Incremental pipeline
# ---------------------------------------------------------------------------

def precompute(p: Program) -> PrecomputeArtifact:
    """Per-point completing automata under the fixed criterion {ε}.

    Everything criterion-independent happens here: demand grammar, the
    strongly-regular pass, cancellation saturation, canonicalization, and
    the bar-reversal. What remains per query is one intersection per point.
    """
    cg = _compiled_for(p, epsilon_criterion())
    aut = _with_cancel(cg.aut)
    shape = _shape_nfa()
    art = PrecomputeArtifact(ARTIFACT_VERSION, fingerprint(p))
    for lab in sorted(all_labels(p)):
        view = Nfa(aut.n, cg.entry[nt_d(lab)])
        view.finals = {cg.final}
        view.trans = aut.trans
        canon = intersect(view, shape).trim()
        comp = create_completing_automaton(canon)
        t = comp.renumbered()
        stable = CompletingAutomaton(t.n, t.start)
        stable.finals = t.finals
        stable.trans = t.trans
        art.automata[lab] = stable
    return art


def in_slice(art: PrecomputeArtifact, pt: int, crit: Nfa) -> bool:
    """Membership of one point in the slice for one criterion."""
    if pt not in art.automata:
        raise FsliceError(f"label {label_name(pt)} not in artifact")
    return intersect_nonempty(art.automata[pt], crit)


def slice_inc(p: Program, art: PrecomputeArtifact, crit: Nfa) -> SliceResult:
    """Slice from the precomputed artifact; agrees with slice_noninc."""
    if art.fingerprint != fingerprint(p):
        raise ArtifactMismatch("artifact was computed for a different program")
    keep = {lab: in_slice(art, lab, crit) for lab in all_labels(p)}
    return SliceResult(keep, extract_residual(p, keep), crit)


# ---------------------------------------------------------------------------
# Residuals
# ---------------------------------------------------------------------------

def _apps_of(e):
    for sub in iter_exprs(e):
        if isinstance(sub, Let):
            yield sub.rhs


def extract_residual(p: Program, keep: dict[int, bool]) -> Program:
    def occ(o: Occ) -> Occ:
        return Occ(o.name if keep.get(o.label, False) else None, o.label)

    def app(a):
        if not keep.get(a.label, False):
            return Hole(a.label)
        if isinstance(a, Const):
            return Const(a.value, a.label)
        if isinstance(a, Nil):
            return Nil(a.label)
        if isinstance(a, Hole):
            return Hole(a.label)
        if isinstance(a, Cons):
            return Cons(occ(a.head), occ(a.tail), a.label)
        if isinstance(a, Car):
            return Car(occ(a.arg), a.label)
        if isinstance(a, Cdr):
            return Cdr(occ(a.arg), a.label)
        if isinstance(a, NullQ):
            return NullQ(occ(a.arg), a.label)
        if isinstance(a, Prim):
            return Prim(a.op, occ(a.left), occ(a.right), a.label)
        if isinstance(a, Call):
            return Call(a.fn, [occ(x) for x in a.args], a.label)
        raise TypeError(f"not an application: {a!r}")

    def expr(e):
        if isinstance(e, Return):
            return Return(occ(e.value), e.label)
        if isinstance(e, If):
            return If(occ(e.guard), expr(e.then), expr(e.orelse), e.label)
        if isinstance(e, Let):
            return Let(e.var, app(e.rhs), expr(e.body), e.label)
        raise TypeError(f"not an expression: {e!r}")

    defs = []
    for d in p.defs:
        params: list[str | None] = []
        for prm in d.params:
            if prm is None:
                params.append(None)
                continue
            uses = occurrences_of(prm, d.body)
            alive = any(keep.get(u.label, False) for u in uses)
            # A name can also be consumed in callee position (relevant for
            # programs produced by mapping a slice back through firstify).
            alive = alive or any(
                isinstance(a, Call) and a.fn == prm and keep.get(a.label, False)
                for a in _apps_of(d.body))
            params.append(prm if alive else None)
        defs.append(FunDef(d.name, params, expr(d.body)))
    return Program(defs)


# ---------------------------------------------------------------------------
# Artifact persistence
# ---------------------------------------------------------------------------

def _nfa_to_json(m: Nfa) -> dict:
    trans = sorted((src, sym if sym != EPS else "eps", dst)
                   for src, sym, dst in m.edges())
    return {
        "states": list(range(m.n)),
        "start": m.start,
        "finals": sorted(m.finals),
        "trans": [list(t) for t in trans],
    }


def _nfa_from_json(d: dict) -> CompletingAutomaton:
    m = CompletingAutomaton(len(d["states"]), d["start"])
    m.finals = set(d["finals"])
    for src, sym, dst in d["trans"]:
        m.add(src, EPS if sym == "eps" else sym, dst)
    return m


def artifact_to_json(art: PrecomputeArtifact) -> str:
    doc = {
        "version": art.version,
        "fingerprint": art.fingerprint,
        "automata": {label_name(lab): _nfa_to_json(m)
                     for lab, m in art.automata.items()},
    }
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def artifact_from_json(text: str) -> PrecomputeArtifact:
    try:
        doc = json.loads(text)
        version = doc["version"]
        fp = doc["fingerprint"]
        automata = {parse_label_name(k): _nfa_from_json(v)
                    for k, v in doc["automata"].items()}
    except (KeyError, TypeError, ValueError) as exc:
        raise ArtifactMismatch(f"malformed artifact: {exc}") from exc
    if version != ARTIFACT_VERSION:
        raise ArtifactMismatch(
            f"artifact version {version} does not match tool {ARTIFACT_VERSION}")
    return PrecomputeArtifact(version, fp, automata)


def save_artifact(art: PrecomputeArtifact, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(artifact_to_json(art))


def load_artifact(path: str) -> PrecomputeArtifact:
    with open(path, encoding="utf-8") as fh:
        return artifact_from_json(fh.read())
