"""Distances in undirected graphs and DAGs under batch edge changes.

The table holds one shortest distance per ordered pair (INF if unreachable).
Insertions relax through the inserted edges only; deletions first discard
every entry that some old shortest path could have routed through a deleted
edge, then relax through all remaining edges. Both phases converge within
ceil(log2(m+1)) synchronous rounds.
"""

from __future__ import annotations

from collections import deque

import numpy as np

from . import kernels
from .core import BatchChange, RoundMeter, log2_bound, run_rounds
from .errors import AlreadyPresentOnInsert, NotPresentOnDelete, OutOfDomain, StructureViolation

INF = kernels.INF


def _pairs(edges, directed):
    src, dst = [], []
    for u, v in sorted(edges):
        src.append(u)
        dst.append(v)
        if not directed:
            src.append(v)
            dst.append(u)
    return np.asarray(src, dtype=np.int64), np.asarray(dst, dtype=np.int64)


def _relax_round(src, dst):
    def step(D):
        out = D.copy()
        return out if kernels.minplus_relax(D, src, dst, out) else D

    return step


def _identical(a, b):
    return a is b


def empty_table(n):
    t = np.full((n, n), INF, dtype=np.int32)
    np.fill_diagonal(t, 0)
    return t


def insert_rounds(dist, delta, meter: RoundMeter, directed=False):
    """Relax through the inserted edges until fixpoint."""
    src, dst = _pairs(delta, directed)
    bound = log2_bound(len(delta))
    return run_rounds(dist, _relax_round(src, dst), bound, meter, same=_identical)


def safe_init(dist, delta, directed=False):
    """Keep only entries that no old shortest path through a deleted edge explains."""
    src, dst = _pairs(delta, directed)
    out = dist.copy()
    kernels.drop_through(dist, src, dst, out)
    return out


def delete_rounds(dist0, edges, m, meter: RoundMeter, directed=False):
    """Relax through every current edge; m is the size of the deletion batch."""
    src, dst = _pairs(edges, directed)
    return run_rounds(dist0, _relax_round(src, dst), log2_bound(m), meter, same=_identical)


def reach_view(dist, u, v):
    return bool(dist[u, v] < INF)


def _acyclic(n, edges):
    out = [[] for _ in range(n)]
    indeg = [0] * n
    for u, v in edges:
        out[u].append(v)
        indeg[v] += 1
    q = deque(i for i in range(n) if indeg[i] == 0)
    seen = 0
    while q:
        u = q.popleft()
        seen += 1
        for v in out[u]:
            indeg[v] -= 1
            if indeg[v] == 0:
                q.append(v)
    return seen == n


class DistanceMaintainer:
    """Owns the edge set and distance table of one undirected graph or DAG."""

    def __init__(self, n, kind="undirected"):
        if kind not in ("undirected", "dag"):
            raise ValueError(kind)
        self.n = n
        self.directed = kind == "dag"
        self.edges: set = set()
        self.table = empty_table(n)

    def _norm(self, e):
        u, v = int(e[0]), int(e[1])
        if not (0 <= u < self.n and 0 <= v < self.n):
            raise OutOfDomain(e)
        if not self.directed and u > v:
            u, v = v, u
        return (u, v)

    def insert(self, edges, meter: RoundMeter):
        delta = {self._norm(e) for e in edges}
        for e in delta:
            if e in self.edges:
                raise AlreadyPresentOnInsert(e)
        new_edges = self.edges | delta
        if self.directed and not _acyclic(self.n, new_edges):
            raise StructureViolation("batch creates a directed cycle")
        self.edges = new_edges
        self.table = insert_rounds(self.table, delta, meter, self.directed)

    def delete(self, edges, meter: RoundMeter):
        delta = {self._norm(e) for e in edges}
        for e in delta:
            if e not in self.edges:
                raise NotPresentOnDelete(e)
        self.edges = self.edges - delta
        d0 = safe_init(self.table, delta, self.directed)
        self.table = delete_rounds(d0, self.edges, len(delta), meter, self.directed)

    def apply_mixed(self, inserts, deletes, meter: RoundMeter):
        """Deletions first, then insertions, each phase with its own bound."""
        if deletes:
            self.delete(deletes, meter)
        self.insert(inserts, meter)

    def apply(self, change: BatchChange, meter: RoundMeter):
        if change.op == "insert":
            self.insert(change.tuples, meter)
        elif change.op == "delete":
            self.delete(change.tuples, meter)
        else:
            raise ValueError(f"unsupported op {change.op}")

    def dist(self, u, v):
        d = int(self.table[u, v])
        return None if d >= INF else d

    def reach(self, u, v):
        return reach_view(self.table, u, v)
