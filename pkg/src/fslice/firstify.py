"""Lower higher-order programs to the first-order analysis language.

Functions here may be named as arguments, partially applied, and called
through variables. Firstification clones each function once per distinct
assignment of function values to its parameters, drops those parameters,
and rewrites the calls inside the clone into direct calls (or into the
selector or primitive the value names). Data captured by a partial
application is threaded through the clone as extra trailing parameters,
and the vestigial binding keeps its spot with a hole right-hand side.

Not every program can be lowered: a function value that is returned,
stored in a cons cell, tested, or passed to a primitive has no first-order
counterpart, and those programs are rejected with ``FirstifyUnsupported``.

Every clone gets fresh labels. ``firstify`` returns the mapping from fresh
labels back to the source labels they were copied from, and ``map_back``
uses it to pull keep-decisions computed on the lowered program back onto
the original, so the original can be shown sliced without rerunning
anything on it.
"""

from __future__ import annotations

from dataclasses import dataclass

from .lang import (
    BUILTIN_ARITY, Call, Car, Cdr, Cons, Const, FsliceError, FunDef, Hole,
    If, Let, Nil, NullQ, Occ, Prim, Program, Return, all_labels, iter_exprs,
    validate,
)

_BUILTIN_DESC = {"car": "car", "cdr": "cdr", "null?": "nullp",
                 "+": "add", "-": "sub", "*": "mul", "eq?": "eq"}


class FirstifyUnsupported(FsliceError):
    """The program uses function values beyond what lowering covers."""


# A function value is a named function, a named builtin, or a partial
# application of one of those: ("fn", name) | ("builtin", op) |
# ("partial", base, args) with each arg either ("data", var) or a nested
# function value. Tuples double as hashable specialization keys.
FnVal = tuple


def _arity(v: FnVal, fn_arity: dict[str, int]) -> int:
    kind = v[0]
    if kind == "fn":
        return fn_arity[v[1]]
    if kind == "builtin":
        return BUILTIN_ARITY[v[1]]
    return _arity(v[1], fn_arity) - len(v[2])


def _desc(v: FnVal) -> str:
    kind = v[0]
    if kind == "fn":
        return v[1]
    if kind == "builtin":
        return _BUILTIN_DESC[v[1]]
    parts = [_desc(v[1])]
    parts += [_desc(a) for a in v[2] if a[0] != "data"]
    return "_".join(parts)


def _caps(v: FnVal) -> list[str]:
    """Data variables captured inside ``v``, in traversal order."""
    if v[0] != "partial":
        return []
    out: list[str] = []
    for a in v[2]:
        if a[0] == "data":
            out.append(a[1])
        else:
            out.extend(_caps(a))
    return out


def _rebind(v: FnVal, names: list[str]) -> FnVal:
    """Replace captured data variables positionally; consumes ``names``."""
    if v[0] != "partial":
        return v
    args = []
    for a in v[2]:
        if a[0] == "data":
            args.append(("data", names.pop(0)))
        else:
            args.append(_rebind(a, names))
    return ("partial", v[1], tuple(args))


def _unwrap(v: FnVal) -> tuple[FnVal, tuple]:
    """Strip partial layers: the base value and all pre-supplied args."""
    if v[0] == "partial":
        base, pre = _unwrap(v[1])
        return base, pre + v[2]
    return v, ()


def _canon(v: FnVal, _counter: list[int] | None = None) -> FnVal:
    """Number captured data variables positionally.

    Two partial applications of the same function differing only in which
    variables they captured must share one clone; the capture arrives as a
    parameter either way.
    """
    if v[0] != "partial":
        return v
    counter = _counter if _counter is not None else [0]
    args = []
    for a in v[2]:
        if a[0] == "data":
            args.append(("data", counter[0]))
            counter[0] += 1
        else:
            args.append(_canon(a, counter))
    return ("partial", v[1], tuple(args))


@dataclass
class _Spec:
    """One clone: a source function under one assignment of its params."""
    source: str
    assignment: dict[str, FnVal]
    name: str
    cap_names: dict[str, list[str]]


class _Firstifier:
    def __init__(self, p: Program, budget: int):
        self.p = p
        self.budget = budget
        self.defs = {d.name: d for d in p.defs}
        self.fn_arity = {d.name: len(d.params) for d in p.defs}
        self.next_label = max(all_labels(p)) + 1
        self.label_map: dict[int, tuple[int, ...]] = {}
        self.specs: dict[tuple, _Spec] = {}
        self.by_source: dict[str, list[_Spec]] = {d.name: [] for d in p.defs}
        self.names = set(self.defs)
        self.done: dict[str, FunDef] = {}

    def run(self) -> tuple[Program, dict[int, tuple[int, ...]]]:
        self.spec_for("main", {})
        while True:
            pending = [s for s in self.specs.values()
                       if s.name not in self.done]
            if not pending:
                break
            for spec in pending:
                self.done[spec.name] = self.build(spec)
        defs = [self.done[s.name]
                for d in self.p.defs for s in self.by_source[d.name]]
        return Program(defs), self.label_map

    def fresh_label(self, source: int) -> int:
        lab = self.next_label
        self.next_label += 1
        self.label_map[lab] = (source,)
        return lab

    def spec_for(self, fname: str, assignment: dict[str, FnVal]) -> _Spec:
        assignment = {p: _canon(v) for p, v in assignment.items()}
        key = (fname, tuple(sorted(assignment.items())))
        if key in self.specs:
            return self.specs[key]
        if len(self.specs) >= self.budget:
            raise FirstifyUnsupported(
                f"more than {self.budget} specializations; "
                "the program is likely unboundedly polymorphic")
        d = self.defs[fname]
        if assignment:
            base = fname + "_" + "_".join(
                _desc(assignment[p]) for p in d.params if p in assignment)
            name, k = base, 2
            while name in self.names:
                name, k = f"{base}_{k}", k + 1
        else:
            name = fname
        self.names.add(name)

        used = {prm for prm in d.params if prm}
        used |= {e.var for e in iter_exprs(d.body) if isinstance(e, Let)}
        cap_names: dict[str, list[str]] = {}
        counter = 0
        for prm in d.params:
            if prm in assignment:
                fresh = []
                for _ in _caps(assignment[prm]):
                    while f"cap{counter}" in used:
                        counter += 1
                    fresh.append(f"cap{counter}")
                    used.add(f"cap{counter}")
                cap_names[prm] = fresh

        spec = _Spec(fname, dict(assignment), name, cap_names)
        self.specs[key] = spec
        self.by_source[fname].append(spec)
        return spec

    def build(self, spec: _Spec) -> FunDef:
        d = self.defs[spec.source]
        relabel = bool(spec.assignment)
        env: dict[str, FnVal] = {}
        # Provenance of each bound function value: the source labels that
        # built it and, aligned with _caps, the occurrence each capture was
        # taken from (None when the value arrived through a clone's
        # assignment and the capture sites are out of view).
        prov: dict[str, tuple[tuple[int, ...], tuple[int, ...] | None]] = {}
        shadowed: set[str] = set()
        for prm in d.params:
            if prm is None:
                continue
            if prm in spec.assignment:
                env[prm] = _rebind(spec.assignment[prm],
                                   list(spec.cap_names[prm]))
            else:
                shadowed.add(prm)
        for names in spec.cap_names.values():
            shadowed.update(names)

        def lab(source: int) -> int:
            return self.fresh_label(source) if relabel else source

        def value_of(name: str | None) -> FnVal | None:
            if name is None or name in shadowed:
                return None
            if name in env:
                return env[name]
            if name in self.defs:
                return ("fn", name)
            if name in BUILTIN_ARITY:
                return ("builtin", name)
            return None

        def occ(o: Occ, where: str) -> Occ:
            if value_of(o.name) is not None:
                raise FirstifyUnsupported(
                    f"{spec.source}: function value {o.name} used in "
                    f"{where}; only call and argument positions are "
                    "supported")
            return Occ(o.name, lab(o.label))

        # Flat argument elements: ("data", var, src) for a capture already
        # threaded into scope (src is the occurrence it was captured by,
        # None when unknown), ("occ", Occ) for a plain data occurrence,
        # ("fnval", v, occ_or_None, srcs, cap_srcs) for a function value
        # with the occurrence it was named by, the source labels that
        # built it, and the capture sources aligned with _caps(v).
        def flatten(callee: FnVal, callee_prov, args: list[Occ]):
            base, pre = _unwrap(callee)
            csrcs = iter(callee_prov[1]) if callee_prov[1] is not None \
                else None

            def take(n: int):
                if n == 0:
                    return ()
                if csrcs is None:
                    return None
                return tuple(next(csrcs) for _ in range(n))

            flat = []
            for a in pre:
                if a[0] == "data":
                    got = take(1)
                    flat.append(("data", a[1], got[0] if got else None))
                else:
                    flat.append(("fnval", a, None, (), take(len(_caps(a)))))
            for o in args:
                v = value_of(o.name)
                if v is None:
                    flat.append(("occ", o))
                else:
                    srcs, caps = prov.get(o.name, ((), None))
                    flat.append(("fnval", v, o, srcs, caps))
            return base, flat

        def as_capture(x) -> tuple:
            if x[0] == "occ":
                if x[1].name is None:
                    raise FirstifyUnsupported(
                        f"{spec.source}: a hole cannot be captured by a "
                        "partial application")
                return ("data", x[1].name)
            if x[0] == "fnval":
                return x[1]
            return ("data", x[1])

        def element_sources(x) -> list[int]:
            """Labels that built a function-value element."""
            out = [] if x[2] is None else [x[2].label]
            out += list(x[3])
            return out

        def element_cap_srcs(x, fallback: int) -> list[int]:
            n = len(_caps(x[1]))
            if x[4] is None:
                return [fallback] * n
            return list(x[4])

        def data_occ(x, src_label: int) -> Occ:
            if x[0] == "data":
                src = x[2] if x[2] is not None else src_label
                return Occ(x[1], self.fresh_label(src))
            return Occ(x[1].name, lab(x[1].label))

        def rewrite_call(a: Call, callee: FnVal, callee_prov, label: int):
            base, flat = flatten(callee, callee_prov, a.args)
            want = _arity(base, self.fn_arity)
            if len(flat) > want:
                raise FirstifyUnsupported(
                    f"{spec.source}: {_desc(callee)} applied to "
                    f"{len(flat)} arguments, takes {want}")
            if len(flat) < want:
                val = ("partial", base,
                       tuple(as_capture(x) for x in flat))
                srcs = [a.label] + list(callee_prov[0])
                cap_srcs: list[int] = []
                for x in flat:
                    if x[0] == "occ":
                        cap_srcs.append(x[1].label)
                    elif x[0] == "data":
                        cap_srcs.append(x[2] if x[2] is not None
                                        else a.label)
                    else:
                        srcs += element_sources(x)
                        cap_srcs += element_cap_srcs(x, a.label)
                return val, tuple(dict.fromkeys(srcs)), tuple(cap_srcs)
            if base[0] == "builtin":
                op = base[1]
                occs = []
                for x in flat:
                    if x[0] == "fnval":
                        raise FirstifyUnsupported(
                            f"{spec.source}: function value passed to "
                            f"builtin {op}")
                    occs.append(data_occ(x, a.label))
                if op == "car":
                    return Car(occs[0], label)
                if op == "cdr":
                    return Cdr(occs[0], label)
                if op == "null?":
                    return NullQ(occs[0], label)
                return Prim(op, occs[0], occs[1], label)
            target = self.defs[base[1]]
            assignment: dict[str, FnVal] = {}
            data_occs: list[Occ] = []
            cap_occs: list[Occ] = []
            sources = [a.label] + list(callee_prov[0])
            for prm, x in zip(target.params, flat):
                if x[0] == "fnval":
                    assignment[prm] = x[1]
                    cap_occs += [Occ(n, self.fresh_label(s))
                                 for n, s in zip(_caps(x[1]),
                                                 element_cap_srcs(x, a.label))]
                    sources += element_sources(x)
                else:
                    data_occs.append(data_occ(x, a.label))
            callee_spec = self.spec_for(target.name, assignment)
            # Keeping the rewritten call must keep everything that built
            # the function values it consumed: the occurrences that named
            # them and the partial applications they came through. Without
            # those marks the slice shown on the original would call
            # through a binding it had erased.
            self.label_map[label] = tuple(dict.fromkeys(sources))
            return Call(callee_spec.name, data_occs + cap_occs, label)

        def app(a, let_var: str):
            label = lab(a.label)
            if isinstance(a, Call):
                callee = value_of(a.fn)
                if callee is None:
                    raise FirstifyUnsupported(
                        f"{spec.source}: call through {a.fn}, which holds "
                        "no known function value")
                result = rewrite_call(a, callee,
                                      prov.get(a.fn, ((), None)), label)
                if isinstance(result, tuple):
                    val, srcs, cap_srcs = result
                    env[let_var] = val
                    prov[let_var] = (srcs, cap_srcs)
                    return Hole(label)
                return result
            if isinstance(a, Const):
                return Const(a.value, label)
            if isinstance(a, Nil):
                return Nil(label)
            if isinstance(a, Hole):
                return Hole(label)
            if isinstance(a, Cons):
                return Cons(occ(a.head, "cons"), occ(a.tail, "cons"), label)
            if isinstance(a, Car):
                return Car(occ(a.arg, "car"), label)
            if isinstance(a, Cdr):
                return Cdr(occ(a.arg, "cdr"), label)
            if isinstance(a, NullQ):
                return NullQ(occ(a.arg, "null?"), label)
            if isinstance(a, Prim):
                return Prim(a.op, occ(a.left, a.op), occ(a.right, a.op),
                            label)
            raise TypeError(f"not an application: {a!r}")

        def expr(e):
            if isinstance(e, Return):
                return Return(occ(e.value, "return"), lab(e.label))
            if isinstance(e, If):
                return If(occ(e.guard, "if guard"), expr(e.then),
                          expr(e.orelse), lab(e.label))
            rhs = app(e.rhs, e.var)
            if e.var not in env:
                shadowed.add(e.var)
            return Let(e.var, rhs, expr(e.body), lab(e.label))

        body = expr(d.body)
        params = [p for p in d.params if p not in spec.assignment]
        for prm in d.params:
            params += spec.cap_names.get(prm, [])
        return FunDef(spec.name, params, body)


def firstify(p: Program,
             budget: int = 512) -> tuple[Program, dict[int, tuple[int, ...]]]:
    """Lower ``p`` to first-order form.

    Returns the lowered program and a map from labels of the lowered
    program to the source labels they stand for: each fresh label in a
    clone maps to the label it was copied from; a rewritten call maps to
    the original call plus everything that built the function values it
    consumed (the occurrences naming them and the partial applications
    they passed through); a threaded capture maps to the occurrence it was
    captured from. Labels absent from the map stand for themselves.
    Functions never reached from ``main`` are dropped.
    """
    validate(p, higher_order=True)
    fo, label_map = _Firstifier(p, budget).run()
    validate(fo)
    return fo, label_map


def map_back(keep_fo: dict[int, bool], label_map: dict[int, tuple[int, ...]],
             p: Program) -> dict[int, bool]:
    """Pull keep-decisions on the lowered program back to the original.

    A source point is kept when any of its copies is kept. Points of
    functions never reached from ``main`` have no copies and are not kept.
    """
    out = {labl: False for labl in all_labels(p)}
    for labl, kept in keep_fo.items():
        for src in label_map.get(labl, (labl,)):
            if src in out:
                out[src] = out[src] or kept
    return out
