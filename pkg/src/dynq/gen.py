"""Deterministic pseudo-random change scripts respecting each kind's constraints."""

from __future__ import annotations

import random

from .core import BatchChange, ChangeScript, Query, default_batch_bound, format_script
from .errors import InfeasibleConstraint
from .grammar import load_grammar

DEFAULT_QUERIES = {
    "digraph": ("reach",),
    "ugraph": ("dist",),
    "dag": ("dist",),
    "forest": ("tiso",),
    "word": ("member",),
    "wgraph": ("msf",),
}


class _Gen:
    def __init__(self, kind, n, batch, rng, delta=None, grammar=None, p_delete=0.3):
        self.kind, self.n, self.batch, self.rng = kind, n, batch, rng
        self.delta = delta
        self.p_delete = p_delete
        self.edges: set = set()
        self.order = list(range(n))
        rng.shuffle(self.order)
        self.rank = {v: i for i, v in enumerate(self.order)}
        self.parent: dict = {}
        if kind == "word":
            self.grammar = load_grammar(grammar)
            self.alphabet = sorted({a for _, a in self.grammar.unary}) or ["a"]

    def size(self):
        return self.rng.randint(1, self.batch)

    # -- candidate edges
    def _pair(self):
        rng, n = self.rng, self.n
        u, v = rng.randrange(n), rng.randrange(n)
        if self.kind == "digraph":
            return (u, v)
        if u == v:
            return None
        if self.kind == "dag":
            return (u, v) if self.rank[u] < self.rank[v] else (v, u)
        return (min(u, v), max(u, v))

    def insertion(self, k):
        rng = self.rng
        if self.kind == "forest":
            return self._forest_insertion(k)
        present = {e[:2] for e in self.edges}
        deg = {}
        if self.delta is not None:
            for e in present:
                for x in e:
                    deg[x] = deg.get(x, 0) + 1
        if self.n <= 256:
            # small domains: draw from the explicit list of absent pairs
            cands = [e for e in self._all_pairs() if e not in present]
            order = rng.sample(cands, len(cands) if self.delta is not None else min(k, len(cands)))
        else:
            order = (self._pair() for _ in range(20 * k + 20))
        out = set()
        for e in order:
            if len(out) >= k:
                break
            if e is None or e in present or e in out:
                continue
            if self.delta is not None:
                if any(deg.get(x, 0) >= self.delta for x in e):
                    continue
                for x in e:
                    deg[x] = deg.get(x, 0) + 1
            out.add(e)
        if self.kind == "wgraph":
            out = {(u, v, rng.choice((rng.randint(0, 9), rng.randint(0, 2**62)))) for u, v in sorted(out)}
        return out

    def _all_pairs(self):
        n = self.n
        if self.kind == "digraph":
            return [(u, v) for u in range(n) for v in range(n)]
        if self.kind == "dag":
            return [(u, v) for u in range(n) for v in range(n) if self.rank[u] < self.rank[v]]
        return [(u, v) for u in range(n) for v in range(u + 1, n)]

    def _forest_insertion(self, k):
        comp = {}

        def find(x):
            while comp.get(x, x) != x:
                x = comp[x]
            return x

        for p, c in self.edges:
            comp[find(c)] = find(p)
        out = set()
        has_parent = set(self.parent)
        for _ in range(20 * k + 20):
            if len(out) >= k:
                break
            p, c = self.rng.randrange(self.n), self.rng.randrange(self.n)
            if c in has_parent or find(p) == find(c):
                continue
            comp[find(c)] = find(p)
            has_parent.add(c)
            out.add((p, c))
        return out

    def change(self):
        rng = self.rng
        k = self.size()
        if self.edges and rng.random() < self.p_delete:
            dele = set(rng.sample(sorted(self.edges), min(k, len(self.edges))))
            self.edges -= dele
            for e in dele:
                if self.kind == "forest":
                    del self.parent[e[1]]
            return BatchChange("delete", "E", tuple(sorted(dele)), self.batch)
        ins = self.insertion(k)
        if not ins:
            if not self.edges:
                raise InfeasibleConstraint(f"no edge can be inserted into an empty {self.kind}")
            return None
        self.edges |= ins
        if self.kind == "forest":
            for p, c in ins:
                self.parent[c] = p
        return BatchChange("insert", "E", tuple(sorted(ins)), self.batch)

    def word_change(self):
        k = min(self.size(), self.n)
        pos = self.rng.sample(range(self.n), k)
        return BatchChange("set", "W", tuple(sorted((p, self.rng.choice(self.alphabet)) for p in pos)), self.batch)

    # -- queries
    def query(self, q):
        rng, n = self.rng, self.n
        if q in ("reach", "dist"):
            return Query(q, (rng.randrange(n), rng.randrange(n)))
        if q == "tiso":
            return self._tiso_query()
        return Query(q, ())

    def _tiso_query(self):
        adj = {v: set() for v in range(self.n)}
        for p, c in self.edges:
            adj[p].add(c)
            adj[c].add(p)

        def pick():
            r = self.rng.randrange(self.n)
            nb = sorted(adj[r])
            x = self.rng.choice(nb + [r])
            seen, stack = {r}, [r]
            while stack:
                u = stack.pop()
                for w in adj[u]:
                    if w not in seen and w != x:
                        seen.add(w)
                        stack.append(w)
            return x, r, seen

        for _ in range(50):
            x1, r1, s1 = pick()
            x2, r2, s2 = pick()
            if not s1 & s2:
                return Query("tiso", (x1, r1, x2, r2))
        return None


def generate(kind, n, steps, batch=None, seed=0, delta=None, grammar=None, queries=None,
             query_every=1, p_delete=0.3) -> ChangeScript:
    if n < 1 or steps < 0:
        raise InfeasibleConstraint("n must be positive and steps nonnegative")
    if kind == "word" and grammar is None:
        grammar = "dyck"
    batch = batch or default_batch_bound(n)
    rng = random.Random(seed)
    g = _Gen(kind, n, batch, rng, delta, grammar, p_delete)
    if not queries:
        queries = ("coloring",) if kind == "ugraph" and delta is not None else DEFAULT_QUERIES[kind]
    params = {"batch": batch}
    if delta is not None:
        params["delta"] = delta
    if kind == "word":
        params["grammar"] = grammar
    out = []
    for i in range(steps):
        ch = g.word_change() if kind == "word" else g.change()
        if ch is not None:
            out.append(ch)
        if query_every and (i + 1) % query_every == 0:
            for q in queries:
                qq = g.query(q)
                if qq is not None:
                    out.append(qq)
    return ChangeScript(n=n, kind=kind, params=params, steps=out, batch_bound=batch)


def doubling_profile(n=4096, steps=10) -> ChangeScript:
    """Insert-only ugraph script: step k inserts a fresh path of 2**k edges."""
    need = sum((1 << k) + 1 for k in range(steps))
    if need > n:
        raise InfeasibleConstraint(f"{steps} doubling steps need n >= {need}")
    bound = 1 << max(steps - 1, 0)
    out = []
    base = 0
    for k in range(steps):
        m = 1 << k
        out.append(BatchChange("insert", "E", tuple((base + i, base + i + 1) for i in range(m)), bound))
        base += m + 1
    return ChangeScript(n=n, kind="ugraph", params={"batch": bound}, steps=out, batch_bound=bound)


def generate_text(*args, **kwargs) -> str:
    return format_script(generate(*args, **kwargs))
