"""Deterministic synthesis of large straight-line benchmark programs.

The generated program has a handful of small recursive list helpers and one
long ``main`` whose bindings are drawn from a seeded RNG. ``main`` is
branch-free, so list lengths are known during generation and every ``car``
and ``cdr`` is applied to a provably nonempty list; the program always runs
to a value.
"""

from __future__ import annotations

from random import Random

from .lang import Program, all_labels, parse_program, validate

_HELPERS = """\
(define (listlen l)
  (let t ← (null? l) in
  (if t
    (let z ← 0 in
    (return z))
    (let r ← (cdr l) in
    (let m ← (listlen r) in
    (let one ← 1 in
    (let s ← (+ m one) in
    (return s))))))))

(define (total l)
  (let t ← (null? l) in
  (if t
    (let z ← 0 in
    (return z))
    (let h ← (car l) in
    (let r ← (cdr l) in
    (let m ← (total r) in
    (let s ← (+ m h) in
    (return s))))))))

(define (squares l)
  (let t ← (null? l) in
  (if t
    (let n ← nil in
    (return n))
    (let h ← (car l) in
    (let hh ← (* h h) in
    (let r ← (cdr l) in
    (let m ← (squares r) in
    (let c ← (cons hh m) in
    (return c)))))))))

(define (weave a b)
  (let t ← (null? a) in
  (if t
    (return b)
    (let h ← (car a) in
    (let r ← (cdr a) in
    (let m ← (weave b r) in
    (let c ← (cons h m) in
    (return c))))))))
"""


def generate_source(n_bindings: int = 170, seed: int = 0) -> str:
    """Emit program text with roughly ``3 * n_bindings`` labeled points."""
    rng = Random(seed)
    ints: list[str] = []
    lists: dict[str, int] = {}
    steps: list[str] = []

    def fresh(kind: str) -> str:
        return f"{kind}{len(steps)}"

    def nonempty() -> list[str]:
        return [v for v, n in lists.items() if n > 0]

    for _ in range(n_bindings):
        ops = ["const"]
        if len(lists) < 4:
            ops.append("nil")
        if len(ints) >= 2:
            ops += ["prim", "prim"]
        if ints and lists:
            ops += ["cons", "cons"]
        if nonempty():
            ops += ["car", "cdr", "call", "call"]
        if len(lists) >= 2:
            ops.append("weave")
        op = rng.choice(ops)
        if op == "const":
            v = fresh("k")
            steps.append(f"(let {v} ← {rng.randrange(100)} in")
            ints.append(v)
        elif op == "nil":
            v = fresh("e")
            steps.append(f"(let {v} ← nil in")
            lists[v] = 0
        elif op == "prim":
            v = fresh("p")
            a, b = rng.choice(ints), rng.choice(ints)
            steps.append(f"(let {v} ← ({rng.choice(['+', '-', '*'])} {a} {b}) in")
            ints.append(v)
        elif op == "cons":
            v = fresh("c")
            h, t = rng.choice(ints), rng.choice(sorted(lists))
            steps.append(f"(let {v} ← (cons {h} {t}) in")
            lists[v] = lists[t] + 1
        elif op == "car":
            v = fresh("h")
            t = rng.choice(nonempty())
            steps.append(f"(let {v} ← (car {t}) in")
            ints.append(v)
        elif op == "cdr":
            v = fresh("r")
            t = rng.choice(nonempty())
            steps.append(f"(let {v} ← (cdr {t}) in")
            lists[v] = lists[t] - 1
        elif op == "weave":
            v = fresh("w")
            a, b = rng.sample(sorted(lists), 2)
            steps.append(f"(let {v} ← (weave {a} {b}) in")
            lists[v] = lists[a] + lists[b]
        else:
            f = rng.choice(["listlen", "total", "squares"])
            t = rng.choice(nonempty())
            v = fresh("x")
            steps.append(f"(let {v} ← ({f} {t}) in")
            if f == "squares":
                lists[v] = lists[t]
            else:
                ints.append(v)

    v = fresh("n")
    steps.append(f"(let {v} ← nil in")
    lists[v] = 0
    out = fresh("res")
    steps.append(f"(let {out} ← (cons {ints[-1]} {rng.choice(sorted(lists))}) in")
    body = "\n  ".join(steps) + f"\n  (return {out})" + ")" * (len(steps) + 1)
    return _HELPERS + f"\n(define (main)\n  {body}\n"


def generate_program(n_bindings: int = 170, seed: int = 0,
                     min_points: int = 500) -> Program:
    p = parse_program(generate_source(n_bindings, seed))
    validate(p)
    if len(all_labels(p)) < min_points:
        raise ValueError(
            f"generated only {len(all_labels(p))} points, need {min_points}")
    return p
