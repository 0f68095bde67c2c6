"""Minimum spanning forest, maximal matching and (delta+1)-colouring under batches.

Each maintainer splices the result of an unrestricted computation on a small
substructure (the changed edges and their neighbourhood) into its state; the
meter records those computations as block events.
"""

from __future__ import annotations

from bisect import bisect_left

from .core import BatchChange, RoundMeter
from .errors import (
    AlreadyPresentOnInsert,
    DegreeBoundViolated,
    DuplicateEdge,
    NotAProperColoring,
    NotPresentOnDelete,
    UnknownEdgeOnDelete,
)


def _key(e):
    u, v, w = e
    return (w, u, v)


class _DSU:
    def __init__(self, n):
        self.p = list(range(n))

    def find(self, x):
        p = self.p
        while p[x] != x:
            p[x] = p[p[x]]
            x = p[x]
        return x

    def union(self, a, b):
        a, b = self.find(a), self.find(b)
        if a == b:
            return False
        self.p[a] = b
        return True


# ---------------------------------------------------------------- MSF


class MsfMaintainer:
    """Sorted edge list L (positions 1..|E|) and the MSF read off a sweep over it."""

    def __init__(self, n):
        self.n = n
        self.L: list = []  # position i+1 -> (u, v, w), sorted by (w, u, v)
        self.msf: set = set()
        self._pairs: dict = {}  # (u, v) -> w

    def update(self, inserted=(), deleted=(), meter: RoundMeter | None = None):
        meter = meter if meter is not None else RoundMeter()
        ins = sorted({(min(u, v), max(u, v), w) for u, v, w in inserted}, key=_key)
        dele = {(min(u, v), max(u, v), w) for u, v, w in deleted}
        seen = set()
        for u, v, w in ins:
            if (u, v) in self._pairs or (u, v) in seen:
                raise DuplicateEdge((u, v))
            seen.add((u, v))
        for u, v, w in dele:
            if self._pairs.get((u, v)) != w:
                raise UnknownEdgeOnDelete((u, v, w))
        old_keys = [_key(e) for e in self.L]
        # positions (1-based) of deleted edges, found by one list probe each
        del_pos = sorted(bisect_left(old_keys, _key(e)) + 1 for e in dele)
        ins_keys = [_key(e) for e in ins]
        touched = 0
        new_len = len(self.L) - len(dele) + len(ins)
        newL = [None] * new_len
        del_set = set(del_pos)
        for i, e in enumerate(self.L, start=1):
            if i in del_set:
                continue
            k = old_keys[i - 1]
            # offset counted over the changed set only
            shift = -sum(1 for d in del_pos if d < i) + sum(1 for x in ins_keys if x < k)
            touched += len(del_pos) + len(ins_keys)
            newL[i + shift - 1] = e
        for j, e in enumerate(ins):
            k = ins_keys[j]
            # j1: old position of the largest surviving old edge below e
            j1 = bisect_left(old_keys, k)
            j1 -= sum(1 for d in del_pos if d <= j1)
            touched += len(del_pos) + 1
            newL[j1 + j] = e
        meter.block("small:msf-offsets", 1)
        self._probes = touched
        self.L = newL
        for u, v, w in dele:
            del self._pairs[(u, v)]
        for u, v, w in ins:
            self._pairs[(u, v)] = w
        dsu = _DSU(self.n)
        self.msf = {e for e in self.L if dsu.union(e[0], e[1])}
        meter.block("small:msf-sweep", 1)
        return self.msf

    def apply(self, change: BatchChange, meter: RoundMeter):
        if change.op == "insert":
            self.update(inserted=change.tuples, meter=meter)
        else:
            self.update(deleted=change.tuples, meter=meter)

    @property
    def edges(self):
        return set(self.L)


# ---------------------------------------------------------------- matching


def greedy_matching(edges):
    """Maximal matching by scanning edges in sorted order."""
    used = set()
    out = set()
    for u, v in sorted(edges):
        if u not in used and v not in used:
            out.add((u, v))
            used.update((u, v))
    return out


class MatchingMaintainer:
    def __init__(self, n):
        self.n = n
        self.edges: set = set()
        self.adj = [set() for _ in range(n)]
        self.M: set = set()
        self.mate: dict = {}

    def _add_match(self, u, v):
        self.M.add((u, v))
        self.mate[u] = v
        self.mate[v] = u

    def insert(self, edges, meter: RoundMeter):
        delta = {(min(u, v), max(u, v)) for u, v in edges}
        for e in delta:
            if e in self.edges:
                raise AlreadyPresentOnInsert(e)
        for u, v in delta:
            self.edges.add((u, v))
            self.adj[u].add(v)
            self.adj[v].add(u)
        free = {x for e in delta for x in e if x not in self.mate}
        g_i = [(u, v) for u, v in delta if u in free and v in free]
        for u, v in greedy_matching(g_i):
            self._add_match(u, v)
        meter.block("small:matching-insert", 1)

    def delete(self, edges, meter: RoundMeter):
        delta = {(min(u, v), max(u, v)) for u, v in edges}
        for e in delta:
            if e not in self.edges:
                raise NotPresentOnDelete(e)
        for u, v in delta:
            self.edges.discard((u, v))
            self.adj[u].discard(v)
            self.adj[v].discard(u)
        lost = [e for e in delta if e in self.M]
        v1 = set()
        for u, v in lost:
            self.M.discard((u, v))
            del self.mate[u]
            del self.mate[v]
            v1.update((u, v))
        cap = len(v1) + 1
        v2 = set()
        for v in sorted(v1):
            cands = [w for w in sorted(self.adj[v]) if w not in self.mate]
            v2.update(cands[:cap])
        vd = v1 | v2
        g_d = [(u, v) for u, v in self.edges if u in vd and v in vd and u not in self.mate and v not in self.mate]
        for u, v in greedy_matching(g_d):
            self._add_match(u, v)
        meter.block("small:matching-delete", 1)

    def apply(self, change: BatchChange, meter: RoundMeter):
        if change.op == "insert":
            self.insert(change.tuples, meter)
        else:
            self.delete(change.tuples, meter)

    def is_maximal(self):
        return all(u in self.mate or v in self.mate for u, v in self.edges)


# ---------------------------------------------------------------- colouring


def mis_from_coloring(adj, nodes, classes, stats=None):
    """Maximal independent set of the graph induced on `nodes`.

    `classes` is an ordered list of colour classes partitioning `nodes`.
    Repeatedly adds the lowest-index nonempty class and removes its closed
    neighbourhood; the loop runs at most len(classes) times.
    """
    nodes = set(nodes)
    classes = [set(c) & nodes for c in classes]
    for c in classes:
        for u in c:
            if adj[u] & c:
                raise NotAProperColoring(f"class contains adjacent nodes around {u}")
    k = len(classes)
    X = set(nodes)
    indep: set = set()
    iters = 0
    while X:
        iters += 1
        if iters > k:
            raise AssertionError("MIS loop exceeded the number of classes")
        chosen = next(c for c in classes if c)
        indep |= chosen
        closed = set(chosen)
        for u in chosen:
            closed |= adj[u]
        X -= closed
        classes = [c - closed for c in classes]
    if stats is not None:
        stats.append(("alg1", iters, k))
    return indep


def greedy_coloring(adj, nodes):
    """First-fit colouring of the induced subgraph in node order (colours from 0)."""
    col = {}
    for u in sorted(nodes):
        taken = {col[v] for v in adj[u] if v in col}
        c = 0
        while c in taken:
            c += 1
        col[u] = c
    return col


class ColoringMaintainer:
    def __init__(self, n, delta):
        self.n = n
        self.delta = delta
        self.edges: set = set()
        self.adj = [set() for _ in range(n)]
        self.col = {v: 1 for v in range(n)}
        self.stats: list = []

    def update(self, inserted=(), deleted=(), meter: RoundMeter | None = None):
        meter = meter if meter is not None else RoundMeter()
        ins = {(min(u, v), max(u, v)) for u, v in inserted}
        dele = {(min(u, v), max(u, v)) for u, v in deleted}
        for e in ins:
            if e in self.edges:
                raise AlreadyPresentOnInsert(e)
        for e in dele:
            if e not in self.edges:
                raise NotPresentOnDelete(e)
        deg = [len(a) for a in self.adj]
        for u, v in ins:
            deg[u] += 1
            deg[v] += 1
        for u, v in dele:
            deg[u] -= 1
            deg[v] -= 1
        if max(deg, default=0) > self.delta:
            raise DegreeBoundViolated(f"degree {max(deg)} exceeds {self.delta}")
        for u, v in dele:
            self.edges.discard((u, v))
            self.adj[u].discard(v)
            self.adj[v].discard(u)
        for u, v in ins:
            self.edges.add((u, v))
            self.adj[u].add(v)
            self.adj[v].add(u)
        if not ins and not dele:
            return self.col
        self.recolor({x for e in ins | dele for x in e}, meter)
        return self.col

    def recolor(self, affected, meter: RoundMeter):
        d = self.delta
        # fresh palette on the affected subgraph, offset past the old colours
        local = greedy_coloring(self.adj, affected)
        meter.block("small:fresh-coloring", 1)
        composed = {}
        for v in range(self.n):
            composed[v] = d + 2 + local[v] if v in local else self.col[v]
        ncls = max(composed.values()) if composed else 0
        classes = [set() for _ in range(ncls)]
        for v, c in composed.items():
            classes[c - 1].add(v)
        X = set(range(self.n))
        new = {}
        i = 0
        while X:
            i += 1
            if i > d + 1:
                raise AssertionError("colour extraction exceeded delta+1 iterations")
            indep = mis_from_coloring(self.adj, X, classes, self.stats)
            for v in indep:
                new[v] = i
            X -= indep
        self.stats.append(("alg2", i, d + 1))
        self.col = new

    def apply(self, change: BatchChange, meter: RoundMeter):
        if change.op == "insert":
            self.update(inserted=change.tuples, meter=meter)
        else:
            self.update(deleted=change.tuples, meter=meter)

    def is_proper(self):
        return all(self.col[u] != self.col[v] for u, v in self.edges)
