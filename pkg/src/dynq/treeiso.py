"""Forest isomorphism under batch edge changes via context isomorphism.

A context C(x, r, h) is the subtree of r (in the tree rooted at the anchor x)
with the children of the hole h removed; isomorphisms must map root to root
and hole to hole. Internally a context is keyed by (a, r, h) where a is the
neighbour of r towards x (-1 when x = r); single-node contexts are keyed
(-1, r, r).

The maintained relation is a partition of contexts into classes: two
node-disjoint contexts are isomorphic iff they share a class. After a batch,
contexts without affected nodes (endpoints of changed edges, holes excluded)
keep their classes; every other context starts alone and is merged by
splitting it into smaller pieces whose isomorphism is already known.
"""

from __future__ import annotations

import sys
from collections import defaultdict
from dataclasses import dataclass

from .core import BatchChange, RoundMeter, log15_bound, run_rounds
from .distances import DistanceMaintainer
from .errors import (
    AlreadyPresentOnInsert,
    InvalidContext,
    NotDisjoint,
    NotPresentOnDelete,
    OutOfDomain,
    StructureViolation,
)


def norm_key(a, r, h):
    return (-1, r, r) if r == h else (a, r, h)


@dataclass
class _Sub:
    """Subtree of v oriented away from neighbour p."""

    children: tuple
    size: int
    mask: int
    aff: int
    leaves: tuple
    sdep: int  # sum of depths below v


class _Ctx:
    __slots__ = ("key", "a", "r", "h", "par", "depth", "mask", "aff", "spine", "nodes",
                 "size_at", "aff_at", "kids", "buckets", "sig")


@dataclass
class Snapshot:
    cls: dict  # context key -> class root
    tlabel: dict  # (p, v) -> subtree isomorphism label
    iso_sib: dict  # (q, p, y) -> number of other isomorphic siblings


class _UF:
    def __init__(self):
        self.p = {}

    def add(self, x):
        self.p.setdefault(x, x)

    def find(self, x):
        p = self.p
        root = x
        while p[root] != root:
            root = p[root]
        while p[x] != root:
            p[x], x = root, p[x]
        return root

    def union(self, a, b):
        a, b = self.find(a), self.find(b)
        if a == b:
            return False
        if b < a:
            a, b = b, a
        self.p[b] = a
        return True


class TreeIsoMaintainer:
    def __init__(self, n):
        self.n = n
        sys.setrecursionlimit(max(sys.getrecursionlimit(), 4 * n + 1000))
        self.adj = [set() for _ in range(n)]
        self.pc_edges: set = set()
        self.dist = DistanceMaintainer(n, "undirected")
        self.affected: set = set()
        self.last_rounds = (0, 1)
        self._next_label = 0
        self._sig_cache: dict = {}
        self._rebuild_structure()
        cls = {}
        for key in self.keys:
            cls[key] = self._single_label()
        self.snap = self._finish_snapshot(cls, prev=None)
        self.base_snapshot = self.snap

    # ------------------------------------------------------------ structure

    def _single_label(self):
        return 0  # every single-node context shares class 0

    def _fresh(self):
        self._next_label += 1
        return self._next_label

    def _rebuild_structure(self):
        self._subs: dict = {}
        for v in range(self.n):
            self._sub(-1, v)
            for p in self.adj[v]:
                self._sub(p, v)
        self._orients: dict = {}
        keys = []
        for r in range(self.n):
            keys.append((-1, r, r))
            for a in [-1] + sorted(self.adj[r]):
                par, depth, order = self._orient(a, r)
                for h in order[1:]:
                    keys.append((a, r, h))
        self.keys = keys
        self._ctx: dict = {}

    def _sub(self, p, v):
        key = (p, v)
        got = self._subs.get(key)
        if got is not None:
            return got
        kids = tuple(sorted(c for c in self.adj[v] if c != p))
        recs = [self._sub(v, c) for c in kids]
        size = 1 + sum(r.size for r in recs)
        mask = 1 << v
        for r in recs:
            mask |= r.mask
        aff = (v in self.affected) + sum(r.aff for r in recs)
        leaves = (v,) if not kids else tuple(x for r in recs for x in r.leaves)
        sdep = sum(r.sdep + r.size for r in recs)
        got = _Sub(kids, size, mask, aff, leaves, sdep)
        self._subs[key] = got
        return got

    def _orient(self, a, r):
        key = (a, r)
        got = self._orients.get(key)
        if got is None:
            par, depth, order = {r: a}, {r: 0}, [r]
            for u in order:
                for c in self._subs[(par[u], u)].children:
                    par[c] = u
                    depth[c] = depth[u] + 1
                    order.append(c)
            got = (par, depth, order)
            self._orients[key] = got
        return got

    def ctx(self, key):
        got = self._ctx.get(key)
        if got is not None:
            return got
        a, r, h = key
        par, depth, order = self._orient(a, r)
        if h not in par:
            raise InvalidContext(key)
        c = _Ctx()
        c.key, c.a, c.r, c.h, c.par, c.depth = key, a, r, h, par, depth
        root_sub = self._subs[(a, r)]
        hole_sub = self._subs[(par[h], h)] if h != r else None
        if hole_sub is None:
            c.mask, c.aff = 1 << r, 0
        else:
            c.mask = (root_sub.mask & ~hole_sub.mask) | (1 << h)
            c.aff = root_sub.aff - hole_sub.aff
        spine = []
        y = h
        while True:
            spine.append(y)
            if y == r:
                break
            y = par[y]
        c.spine = set(spine)
        c.nodes = [u for u in order if (c.mask >> u) & 1]
        hs = hole_sub.size if hole_sub else 1
        ha = hole_sub.aff if hole_sub else 0
        c.size_at, c.aff_at, c.kids = {}, {}, {}
        for u in c.nodes:
            s = self._subs[(par[u], u)]
            on = u in c.spine
            c.size_at[u] = s.size - (hs - 1 if on else 0)
            c.aff_at[u] = s.aff - (ha if on else 0)
            c.kids[u] = () if u == h else s.children
        c.buckets = None
        c.sig = None
        self._ctx[key] = c
        return c

    def signature(self, key):
        """Isomorphism invariant of a context used to prune candidate pairs."""
        sig = self._sig_cache.get(key)
        if sig is None:
            c = self.ctx(key)
            sig = (len(c.nodes), c.depth[c.h],
                   tuple(sorted((c.depth[u], c.size_at[u], u in c.spine) for u in c.nodes)))
            self._sig_cache[key] = sig
        return sig

    def _buckets(self, c):
        if c.buckets is None:
            b = defaultdict(list)
            for u in c.nodes:
                if u != c.h:
                    b[(c.depth[u], c.size_at[u], u in c.spine)].append(u)
            c.buckets = b
        return c.buckets

    # ------------------------------------------------------------ snapshots

    def _tlabels(self, cls):
        """Subtree labels: two subtrees share a label iff linked by leaf-context classes."""
        uf = _UF()
        for (p, v), s in self._subs.items():
            node = ("s", p, v)
            uf.add(node)
            if s.size == 1:
                k = ("k", cls[(-1, v, v)])
                uf.add(k)
                uf.union(node, k)
                continue
            for h in s.leaves:
                k = ("k", cls[norm_key(p, v, h)])
                uf.add(k)
                uf.union(node, k)
        return {(p, v): uf.find(("s", p, v)) for (p, v) in self._subs}

    def _changed_sub(self, p, y):
        return self._subs[(p, y)].aff > 0

    def _iso_siblings(self, tlabel, prev):
        """Sibling isomorphism counts from unchanged counts plus affected recounts."""
        unch = self._unchanged_counts(prev)
        out = {}
        for p in range(self.n):
            nb = sorted(self.adj[p])
            for q in [-1] + nb:
                sibs = [y for y in nb if y != q]
                changed = {y for y in sibs if self._changed_sub(p, y)}
                for y in sibs:
                    ty = tlabel[(p, y)]
                    if y in changed:
                        m1 = 0
                        for ys in sibs:
                            if ys != y and ys not in changed and tlabel[(p, ys)] == ty:
                                m1 = unch[(q, p, ys)] + 1
                                break
                    else:
                        m1 = unch[(q, p, y)]
                    m2 = sum(1 for ys in changed if ys != y and tlabel[(p, ys)] == ty)
                    out[(q, p, y)] = m1 + m2
        return out

    def _unchanged_counts(self, prev):
        """For unchanged y: number of unchanged siblings isomorphic to y (self excluded)."""
        unch = {}
        if prev is None:
            return unch
        old_adj, old_sib, old_tl, old_changed = prev
        for p in range(self.n):
            nb = sorted(self.adj[p])
            for q in [-1] + nb:
                for y in nb:
                    if y == q or self._changed_sub(p, y):
                        continue
                    if q == -1 or q in old_adj[p]:
                        okey, olds = (q, p, y), old_adj[p] - {q, y}
                    else:
                        okey, olds = (-1, p, y), old_adj[p] - {y}
                    ty = old_tl[(p, y)]
                    gone = sum(1 for ys in olds
                               if (ys not in self.adj[p] or self._changed_sub(p, ys)) and old_tl[(p, ys)] == ty)
                    unch[(q, p, y)] = old_sib[okey] - gone
        return unch

    def _finish_snapshot(self, cls, prev):
        tl = self._tlabels(cls)
        return Snapshot(cls, tl, self._iso_siblings(tl, prev))

    # ------------------------------------------------------------ pair tests

    def _same(self, snap, k1, k2):
        return snap.cls[k1] == snap.cls[k2]

    def forests_iso(self, snap, q, z, Z, Y, qs, zs, Zs, Ys):
        """Compare child forests {subtree_z(u) : u in Z} and the starred side.

        Each u needs a partner u* with the same subtree label and the same
        multiplicity, where multiplicity = (isomorphic siblings of u) + 1 minus
        the isomorphic members of the excluded set Y.
        """
        if len(Z) != len(Zs):
            return False
        if not Z:
            return True
        tl = snap.tlabel

        def counts(q, z, Z, Y):
            out = {}
            for u in Z:
                t = tl[(z, u)]
                out[u] = (t, snap.iso_sib[(q, z, u)] + 1 - sum(1 for y in Y if tl[(z, y)] == t))
            return out

        c1 = counts(q, z, Z, Y)
        c2 = counts(qs, zs, Zs, Ys)
        s1, s2 = set(c1.values()), set(c2.values())
        return s1 == s2

    def _parent(self, c, z):
        return c.a if z == c.r else c.par[z]

    def _toward(self, c, v, target):
        """Child of v (in c) whose subtree contains target."""
        y = target
        while c.par[y] != v:
            y = c.par[y]
        return y

    def _spine_anc(self, c, z):
        while z not in c.spine:
            z = c.par[z]
        return z

    def _shape(self, snap, c, z, cs, zs, case):
        same = self._same
        d1 = norm_key(c.a, c.r, z)
        d1s = norm_key(cs.a, cs.r, zs)
        if not same(snap, d1, d1s) and z in c.spine:
            return False
        if z in c.spine:
            if case == 1:
                return same(snap, norm_key(self._parent(c, z), z, c.h), norm_key(self._parent(cs, zs), zs, cs.h))
            y = self._toward(c, z, c.h)
            ys = self._toward(cs, zs, cs.h)
            if not same(snap, norm_key(z, y, c.h), norm_key(zs, ys, cs.h)):
                return False
            Z = [u for u in c.kids[z] if u != y]
            Zs = [u for u in cs.kids[zs] if u != ys]
            return self.forests_iso(snap, self._parent(c, z), z, Z, [y], self._parent(cs, zs), zs, Zs, [ys])
        v = self._spine_anc(c, z)
        vs = self._spine_anc(cs, zs)
        if c.depth[v] != cs.depth[vs]:
            return False
        y1, y1s = self._toward(c, v, c.h), self._toward(cs, vs, cs.h)
        y2, y2s = self._toward(c, v, z), self._toward(cs, vs, zs)
        if not (same(snap, norm_key(c.a, c.r, v), norm_key(cs.a, cs.r, vs))
                and same(snap, norm_key(v, y1, c.h), norm_key(vs, y1s, cs.h))
                and same(snap, norm_key(v, y2, z), norm_key(vs, y2s, zs))):
            return False
        Z = [u for u in c.kids[v] if u not in (y1, y2)]
        Zs = [u for u in cs.kids[vs] if u not in (y1s, y2s)]
        if not self.forests_iso(snap, self._parent(c, v), v, Z, [y1, y2], self._parent(cs, vs), vs, Zs, [y1s, y2s]):
            return False
        if case == 1:
            return snap.tlabel[(c.par[z], z)] == snap.tlabel[(cs.par[zs], zs)]
        return self.forests_iso(snap, c.par[z], z, list(c.kids[z]), [], cs.par[zs], zs, list(cs.kids[zs]), [])

    def pair_test(self, snap, c, cs, stage, zs_only=None):
        """Decide isomorphism of disjoint contexts c, cs from smaller pieces.

        stage "base": split at the given nodes of c with the child-forest
        shapes; stage "round": any split node satisfying a size condition.
        """
        t = c.aff + cs.aff
        buckets = self._buckets(cs)
        cands = zs_only if zs_only is not None else [u for u in c.nodes if u != c.h]
        for z in cands:
            for zs in buckets.get((c.depth[z], c.size_at[z], z in c.spine), ()):
                if stage == "base":
                    cases = (2,)
                else:
                    az, azs = c.aff_at[z], cs.aff_at[zs]
                    out = t - az - azs
                    cases = []
                    if 3 * out <= 2 * t and 3 * (az + azs) <= 2 * t:
                        cases.append(1)
                    if (3 * out <= t and all(3 * c.aff_at[u] <= t for u in c.kids[z])
                            and all(3 * cs.aff_at[u] <= t for u in cs.kids[zs])):
                        cases.append(2)
                for case in cases:
                    if self._shape(snap, c, z, cs, zs, case):
                        return True
        return False

    # ------------------------------------------------------------ rounds

    def _groups(self, cls):
        groups = defaultdict(lambda: defaultdict(list))
        for key in self.keys:
            groups[self.signature(key)][cls[key]].append(key)
        return groups

    def _merge(self, snap, pairs, prev):
        uf = _UF()
        for root in set(snap.cls.values()):
            uf.add(root)
        changed = False
        for k1, k2 in pairs:
            changed |= uf.union(snap.cls[k1], snap.cls[k2])
        if not changed:
            return snap
        cls = {k: uf.find(v) for k, v in snap.cls.items()}
        return self._finish_snapshot(cls, prev)

    def _affected_node(self, c):
        return next(u for u in c.nodes if u != c.h and u in self.affected)

    def _base_stage(self, snap, prev, want):
        """One base pass: contexts with one affected node against partners with `want` affected."""
        pairs = []
        groups = self._groups(snap.cls)
        for classes in groups.values():
            members = [k for ks in classes.values() for k in ks]
            for k in members:
                c = self.ctx(k)
                if c.aff != 1:
                    continue
                z = self._affected_node(c)
                for root, ks in classes.items():
                    if root == snap.cls[k]:
                        continue
                    for ks_ in ks:
                        cs = self.ctx(ks_)
                        if cs.aff != want or cs.mask & c.mask:
                            continue
                        if self.pair_test(snap, c, cs, "base", [z]):
                            pairs.append((k, ks_))
                        break
        return self._merge(snap, pairs, prev)

    def base_case(self, snap, prev, meter: RoundMeter):
        snap = self._base_stage(snap, prev, 0)
        meter.block("base:one-affected", 1)
        snap = self._base_stage(snap, prev, 1)
        meter.block("base:two-affected", 1)
        return snap

    def combine_round(self, snap, prev):
        pairs = []
        groups = self._groups(snap.cls)
        for classes in groups.values():
            if len(classes) < 2:
                continue
            info = []
            for root, ks in classes.items():
                cs = sorted((self.ctx(k) for k in ks), key=lambda c: (c.aff, c.key))
                info.append((root, cs, any(c.aff for c in cs)))
            info.sort(key=lambda x: x[0])
            for i in range(len(info)):
                for j in range(i + 1, len(info)):
                    r1, m1, a1 = info[i]
                    r2, m2, a2 = info[j]
                    if not (a1 or a2):
                        continue
                    best = None
                    for c in m1:
                        for cs in m2:
                            if best is not None and c.aff + cs.aff >= best[0]:
                                break
                            if not c.mask & cs.mask:
                                best = (c.aff + cs.aff, c, cs)
                                break
                    if best is not None and self.pair_test(snap, best[1], best[2], "round"):
                        pairs.append((best[1].key, best[2].key))
        return self._merge(snap, pairs, prev)

    # ------------------------------------------------------------ updates

    def _validate(self, ins, dele):
        for e in ins:
            if e in self.pc_edges:
                raise AlreadyPresentOnInsert(e)
        for e in dele:
            if e not in self.pc_edges:
                raise NotPresentOnDelete(e)
        new = (self.pc_edges - dele) | ins
        parents = {}
        comp = list(range(self.n))

        def find(x):
            while comp[x] != x:
                comp[x] = comp[comp[x]]
                x = comp[x]
            return x

        for p, c in sorted(new):
            if c in parents:
                raise StructureViolation(f"node {c} would have two parents")
            parents[c] = p
            a, b = find(p), find(c)
            if a == b:
                raise StructureViolation("batch creates a cycle")
            comp[a] = b
        return new

    def update(self, inserted=(), deleted=(), meter: RoundMeter | None = None):
        meter = meter if meter is not None else RoundMeter()
        ins = {(int(p), int(c)) for p, c in inserted}
        dele = {(int(p), int(c)) for p, c in deleted}
        for p, c in ins | dele:
            if not (0 <= p < self.n and 0 <= c < self.n) or p == c:
                raise OutOfDomain((p, c))
        new_pc = self._validate(ins, dele)
        und = lambda es: {(min(e), max(e)) for e in es}  # noqa: E731
        if dele:
            self.dist.delete(und(dele), meter)
        if ins:
            self.dist.insert(und(ins), meter)
        prev = (
            [set(a) for a in self.adj],
            self.snap.iso_sib,
            self.snap.tlabel,
            None,
        )
        old_cls = self.snap.cls
        self.pc_edges = new_pc
        for p, c in dele:
            self.adj[p].discard(c)
            self.adj[c].discard(p)
        for p, c in ins:
            self.adj[p].add(c)
            self.adj[c].add(p)
        self.affected = {x for e in ins | dele for x in e}
        self._rebuild_structure()
        cls = {}
        for key in self.keys:
            c = self.ctx(key)
            if c.aff == 0:
                cls[key] = old_cls[key]
            else:
                self._sig_cache.pop(key, None)
                cls[key] = self._fresh()
        for key in list(self._sig_cache):
            if key not in cls:
                del self._sig_cache[key]
        snap = self._finish_snapshot(cls, prev)
        snap = self.base_case(snap, prev, meter)
        self.base_snapshot = snap
        bound = log15_bound(len(self.affected))
        before = meter.rounds_used
        snap = run_rounds(snap, lambda s: self.combine_round(s, prev), bound, meter,
                          same=lambda a, b: a is b)
        # combine rounds of this step alone, without the distance phase
        self.last_rounds = (meter.rounds_used - before, bound)
        self.snap = snap
        return meter

    def apply(self, change: BatchChange, meter: RoundMeter):
        if change.op == "insert":
            self.update(inserted=change.tuples, meter=meter)
        else:
            self.update(deleted=change.tuples, meter=meter)

    # ------------------------------------------------------------ queries

    def on_path(self, x, y, z):
        """y lies on the path between x and z (derived from distances)."""
        d = self.dist
        dxz, dxy, dyz = d.dist(x, z), d.dist(x, y), d.dist(y, z)
        return None not in (dxz, dxy, dyz) and dxy + dyz == dxz

    def context_key(self, x, r, h):
        for v in (x, r, h):
            if not 0 <= v < self.n:
                raise InvalidContext((x, r, h))
        if not self.on_path(x, r, h):
            raise InvalidContext((x, r, h))
        if r == h:
            return (-1, r, r)
        if x == r:
            return (-1, r, h)
        dxr = self.dist.dist(x, r)
        a = next(w for w in self.adj[r] if self.dist.dist(x, w) == dxr - 1)
        return (a, r, h)

    def subtree_key(self, x, r):
        if not (0 <= x < self.n and 0 <= r < self.n) or self.dist.dist(x, r) is None:
            raise InvalidContext((x, r))
        if x == r:
            return (-1, r)
        dxr = self.dist.dist(x, r)
        return (next(w for w in self.adj[r] if self.dist.dist(x, w) == dxr - 1), r)

    def count_affected(self, C, Cs):
        """Affected non-hole nodes of two contexts given as (x, r, h) triples."""
        return self.ctx(self.context_key(*C)).aff + self.ctx(self.context_key(*Cs)).aff

    def c_iso(self, x, r, h, xs, rs, hs):
        k1, k2 = self.context_key(x, r, h), self.context_key(xs, rs, hs)
        if self.ctx(k1).mask & self.ctx(k2).mask:
            return False
        return self.snap.cls[k1] == self.snap.cls[k2]

    def t_iso(self, x, r, xs, rs):
        """Rooted subtree isomorphism: singletons, or matching leaf contexts."""
        k1, k2 = self.subtree_key(x, r), self.subtree_key(xs, rs)
        s1, s2 = self._subs[k1], self._subs[k2]
        if s1.mask & s2.mask:
            raise NotDisjoint((x, r, xs, rs))
        if s1.size == 1 and s2.size == 1:
            return True
        if s1.size == 1 or s2.size == 1:
            return False
        cls = self.snap.cls
        c1 = {cls[norm_key(k1[0], k1[1], h)] for h in s1.leaves}
        c2 = {cls[norm_key(k2[0], k2[1], h)] for h in s2.leaves}
        return bool(c1 & c2)

    def iso_siblings(self):
        return dict(self.snap.iso_sib)

    def classes(self):
        """Context key -> (class id, node mask)."""
        return {k: (self.snap.cls[k], self.ctx(k).mask) for k in self.keys}
