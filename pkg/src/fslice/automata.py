"""A small nondeterministic finite automaton library.

States are dense integers; transitions are an adjacency map from state and
symbol to a set of successor states. Symbols are the demand-symbol strings
("0", "1", "0b", "1b", "2"); the empty string is the epsilon label. Nothing
here is specific to demands except the choice of symbol type, so the
operations read like any other NFA toolkit: closure, product, trimming,
determinization, bounded enumeration.

Construction is mutable (add_state / add); analyses treat built automata as
immutable and return fresh ones.
"""

from __future__ import annotations

from collections import deque
from itertools import product as iproduct

EPS = ""


class Nfa:
    def __init__(self, n_states: int = 0, start: int = 0):
        self.n = n_states
        self.start = start
        self.finals: set[int] = set()
        self.trans: dict[int, dict[str, set[int]]] = {}

    # -- construction -------------------------------------------------------

    def add_state(self) -> int:
        self.n += 1
        return self.n - 1

    def add(self, src: int, sym: str, dst: int):
        self.trans.setdefault(src, {}).setdefault(sym, set()).add(dst)

    def edges(self):
        for src, by_sym in self.trans.items():
            for sym, dsts in by_sym.items():
                for dst in dsts:
                    yield src, sym, dst

    def symbols(self) -> set[str]:
        return {sym for _, by_sym in self.trans.items() for sym in by_sym
                if sym != EPS}

    def copy(self) -> "Nfa":
        m = Nfa(self.n, self.start)
        m.finals = set(self.finals)
        m.trans = {s: {sym: set(d) for sym, d in by.items()}
                   for s, by in self.trans.items()}
        return m

    # -- basic queries ------------------------------------------------------

    def succ(self, state: int, sym: str) -> set[int]:
        return self.trans.get(state, {}).get(sym, set())

    def eps_closure(self, states) -> frozenset[int]:
        seen = set(states)
        todo = list(states)
        while todo:
            q = todo.pop()
            for r in self.succ(q, EPS):
                if r not in seen:
                    seen.add(r)
                    todo.append(r)
        return frozenset(seen)

    def step(self, states: frozenset[int], sym: str) -> frozenset[int]:
        nxt = set()
        for q in states:
            nxt |= self.succ(q, sym)
        return self.eps_closure(nxt)

    def accepts(self, s) -> bool:
        cur = self.eps_closure({self.start})
        for sym in s:
            cur = self.step(cur, sym)
            if not cur:
                return False
        return any(q in self.finals for q in cur)

    def reachable(self) -> set[int]:
        seen = {self.start}
        todo = [self.start]
        while todo:
            q = todo.pop()
            for sym, dsts in self.trans.get(q, {}).items():
                for r in dsts:
                    if r not in seen:
                        seen.add(r)
                        todo.append(r)
        return seen

    def coreachable(self) -> set[int]:
        back: dict[int, set[int]] = {}
        for src, _, dst in self.edges():
            back.setdefault(dst, set()).add(src)
        seen = set(self.finals)
        todo = list(self.finals)
        while todo:
            q = todo.pop()
            for r in back.get(q, ()):
                if r not in seen:
                    seen.add(r)
                    todo.append(r)
        return seen

    def is_empty(self) -> bool:
        return not (self.reachable() & self.finals)

    def enumerate_upto(self, k: int, cap: int = 1_000_000) -> set[tuple]:
        """All accepted strings of length at most k (fails above ``cap``)."""
        out: set[tuple] = set()
        start = self.eps_closure({self.start})

        def go(cur: frozenset[int], prefix: tuple):
            if any(q in self.finals for q in cur):
                out.add(prefix)
                if len(out) > cap:
                    raise ValueError("enumeration exceeds cap")
            if len(prefix) == k:
                return
            syms = set()
            for q in cur:
                syms.update(sym for sym in self.trans.get(q, {}) if sym != EPS)
            for sym in sorted(syms):
                go(self.step(cur, sym), prefix + (sym,))

        go(start, ())
        return out

    # -- transformations ----------------------------------------------------

    def trim(self) -> "Nfa":
        """Keep only states on a path from the start to a final state."""
        live = self.reachable() & self.coreachable()
        if self.start not in live:
            return Nfa(1, 0)
        order = sorted(live)
        remap = {old: i for i, old in enumerate(order)}
        m = Nfa(len(order), remap[self.start])
        m.finals = {remap[q] for q in self.finals if q in live}
        for src, sym, dst in self.edges():
            if src in live and dst in live:
                m.add(remap[src], sym, remap[dst])
        return m

    def renumbered(self) -> "Nfa":
        """Breadth-first canonical renumbering, for stable serialization."""
        order = [self.start]
        seen = {self.start}
        queue = deque([self.start])
        while queue:
            q = queue.popleft()
            for sym in sorted(self.trans.get(q, {})):
                for r in sorted(self.trans[q][sym]):
                    if r not in seen:
                        seen.add(r)
                        order.append(r)
                        queue.append(r)
        for q in range(self.n):
            if q not in seen:
                seen.add(q)
                order.append(q)
        remap = {old: i for i, old in enumerate(order)}
        m = Nfa(self.n, remap[self.start])
        m.finals = {remap[q] for q in self.finals}
        for src, sym, dst in self.edges():
            m.add(remap[src], sym, remap[dst])
        return m

    def reversed_lang(self) -> "Nfa":
        m = Nfa(self.n + 1, self.n)
        m.finals = {self.start}
        for src, sym, dst in self.edges():
            m.add(dst, sym, src)
        for q in self.finals:
            m.add(self.n, EPS, q)
        return m

    def prefix_closed(self) -> "Nfa":
        """Automaton for all prefixes of accepted strings."""
        m = self.trim()
        m.finals = set(range(m.n)) if not m.is_empty() else set()
        return m

    def determinize(self, alphabet) -> "Nfa":
        """Complete DFA over ``alphabet`` (as an Nfa with singleton moves)."""
        alphabet = sorted(alphabet)
        start = self.eps_closure({self.start})
        ids: dict[frozenset[int], int] = {start: 0}
        m = Nfa(1, 0)
        queue = deque([start])
        while queue:
            cur = queue.popleft()
            cid = ids[cur]
            if any(q in self.finals for q in cur):
                m.finals.add(cid)
            for sym in alphabet:
                nxt = self.step(cur, sym)
                if nxt not in ids:
                    ids[nxt] = m.add_state()
                    queue.append(nxt)
                m.add(cid, sym, ids[nxt])
        return m

    def complement(self, alphabet) -> "Nfa":
        d = self.determinize(alphabet)
        d.finals = set(range(d.n)) - d.finals
        return d


# ---------------------------------------------------------------------------
# Combinators
# ---------------------------------------------------------------------------

def from_strings(strings) -> Nfa:
    """Trie automaton accepting exactly the given strings."""
    m = Nfa(1, 0)
    for s in strings:
        cur = m.start
        for sym in s:
            nxts = m.succ(cur, sym)
            if nxts:
                cur = next(iter(nxts))
            else:
                new = m.add_state()
                m.add(cur, sym, new)
                cur = new
        m.finals.add(cur)
    return m


def union(a: Nfa, b: Nfa) -> Nfa:
    m = Nfa(a.n + b.n + 1, a.n + b.n)
    off = a.n
    for src, sym, dst in a.edges():
        m.add(src, sym, dst)
    for src, sym, dst in b.edges():
        m.add(src + off, sym, dst + off)
    m.add(m.start, EPS, a.start)
    m.add(m.start, EPS, b.start + off)
    m.finals = set(a.finals) | {q + off for q in b.finals}
    return m


def concat(a: Nfa, b: Nfa) -> Nfa:
    m = Nfa(a.n + b.n, a.start)
    off = a.n
    for src, sym, dst in a.edges():
        m.add(src, sym, dst)
    for src, sym, dst in b.edges():
        m.add(src + off, sym, dst + off)
    for q in a.finals:
        m.add(q, EPS, b.start + off)
    m.finals = {q + off for q in b.finals}
    return m


def star(a: Nfa) -> Nfa:
    m = Nfa(a.n + 1, a.n)
    for src, sym, dst in a.edges():
        m.add(src, sym, dst)
    m.add(m.start, EPS, a.start)
    for q in a.finals:
        m.add(q, EPS, m.start)
    m.finals = {m.start}
    return m


def intersect(a: Nfa, b: Nfa) -> Nfa:
    """Product automaton for the intersection."""
    ids: dict[tuple[int, int], int] = {}
    m = Nfa(0, 0)

    def state(p: int, q: int) -> int:
        key = (p, q)
        if key not in ids:
            ids[key] = m.add_state()
        return ids[key]

    m.start = state(a.start, b.start)
    queue = deque([(a.start, b.start)])
    seen = {(a.start, b.start)}
    while queue:
        p, q = queue.popleft()
        src = state(p, q)
        if p in a.finals and q in b.finals:
            m.finals.add(src)
        moves = []
        for r in a.succ(p, EPS):
            moves.append(((r, q), EPS))
        for r in b.succ(q, EPS):
            moves.append(((p, r), EPS))
        for sym in a.trans.get(p, {}):
            if sym == EPS:
                continue
            for r1 in a.succ(p, sym):
                for r2 in b.succ(q, sym):
                    moves.append(((r1, r2), sym))
        for key, sym in moves:
            m.add(src, sym, state(*key))
            if key not in seen:
                seen.add(key)
                queue.append(key)
    return m


def intersect_nonempty(a: Nfa, b: Nfa) -> bool:
    """Whether the intersection accepts anything, without building it."""
    start = (a.eps_closure({a.start}), b.eps_closure({b.start}))
    seen = {start}
    queue = deque([start])
    while queue:
        pa, pb = queue.popleft()
        if (pa & a.finals) and (pb & b.finals):
            return True
        syms = set()
        for q in pa:
            syms.update(sym for sym in a.trans.get(q, {}) if sym != EPS)
        for sym in syms:
            nxt = (a.step(pa, sym), b.step(pb, sym))
            if nxt[0] and nxt[1] and nxt not in seen:
                seen.add(nxt)
                queue.append(nxt)
    return False


def equivalent(a: Nfa, b: Nfa, alphabet) -> bool:
    alphabet = sorted(set(alphabet) | a.symbols() | b.symbols())
    only_a = intersect(a, b.complement(alphabet))
    only_b = intersect(b, a.complement(alphabet))
    return only_a.is_empty() and only_b.is_empty()
