"""Script execution: maintainers per query kind, oracle verification, reports."""

from __future__ import annotations

import csv
import io
import statistics
import time
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from . import oracles
from .cfl import CflMaintainer
from .core import BatchChange, ChangeScript, Query, RelationStore, RoundMeter, apply_change
from .distances import DistanceMaintainer
from .errors import ScriptSyntaxError, VerificationError
from .grammar import load_grammar
from .reach import ReachMaintainer
from .smallstruct import ColoringMaintainer, MatchingMaintainer, MsfMaintainer
from .treeiso import TreeIsoMaintainer

# query kind -> maintainer name, per script kind
ALLOWED = {
    "digraph": {"reach": "reach"},
    "ugraph": {"dist": "dist", "reach": "dist", "matching": "matching", "coloring": "coloring"},
    "dag": {"dist": "dist", "reach": "dist"},
    "forest": {"tiso": "tiso"},
    "word": {"member": "cfl"},
    "wgraph": {"msf": "msf"},
}
DEFAULT = {"digraph": "reach", "ugraph": "dist", "dag": "dist", "forest": "tiso", "word": "cfl", "wgraph": "msf"}

# desk-scale caps on n per script kind
MAX_N = {"digraph": 256, "ugraph": 4096, "dag": 4096, "forest": 64, "word": 48, "wgraph": 4096}

COLUMNS = ("step", "line", "op", "m", "rounds", "bound", "checks", "blocks", "answer", "wall_ms")


@dataclass
class StepRow:
    step: int
    line: int
    op: str
    m: int = 0
    rounds: int = 0
    bound: int = 0
    checks: int = 0
    blocks: str = ""
    answer: str = ""
    wall_ms: float = 0.0

    def values(self, wall=True):
        vals = [self.step, self.line, self.op, self.m, self.rounds, self.bound, self.checks, self.blocks, self.answer]
        return vals + ([f"{self.wall_ms:.3f}"] if wall else [])


@dataclass
class RunReport:
    rows: list = field(default_factory=list)

    @property
    def answers(self):
        return [r.answer for r in self.rows if r.op == "query"]

    def within_bounds(self):
        return all(r.rounds <= r.bound for r in self.rows if r.op != "query")

    def to_csv(self, wall=True):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(COLUMNS if wall else COLUMNS[:-1])
        for r in self.rows:
            w.writerow(r.values(wall))
        return buf.getvalue()

    def to_rounds(self):
        lines = []
        for r in self.rows:
            if r.op == "query":
                lines.append(f"{r.step:>5} query   {r.answer}")
            else:
                lines.append(f"{r.step:>5} {r.op:<7} m={r.m:<5} rounds={r.rounds}/{r.bound}")
        return "\n".join(lines) + "\n"


def maintainers_for(script: ChangeScript):
    allowed = ALLOWED[script.kind]
    names = set()
    for q in script.queries:
        if q.kind not in allowed:
            raise ScriptSyntaxError(f"query {q.kind} is not available for kind {script.kind}", q.line, 1)
        names.add(allowed[q.kind])
    if not names:
        names.add(DEFAULT[script.kind])
    return sorted(names)


class Session:
    def __init__(self, script: ChangeScript, verify=False):
        self.script = script
        self.n = n = script.n
        self.kind = script.kind
        self.verify_each = verify
        self.store = RelationStore(n)
        if self.kind == "word":
            self.store.declare("W", 2, domain_cols=(0,))
        else:
            self.store.declare("E", 3 if self.kind == "wgraph" else 2, domain_cols=(0, 1))
        self.m = {}
        for name in maintainers_for(script):
            self.m[name] = self._make(name)
        if self.kind == "word":
            for p, a in enumerate(self.m["cfl"].word):
                self.store.get("W").add((p, a))

    def _make(self, name):
        n, params = self.n, self.script.params
        if name == "reach":
            return ReachMaintainer(n)
        if name == "dist":
            return DistanceMaintainer(n, "dag" if self.kind == "dag" else "undirected")
        if name == "tiso":
            return TreeIsoMaintainer(n)
        if name == "cfl":
            if "grammar" not in params:
                raise ScriptSyntaxError("word scripts need grammar=", 1, 1)
            self.grammar = load_grammar(params["grammar"])
            return CflMaintainer(self.grammar, n, default_symbol=params.get("default"))
        if name == "msf":
            return MsfMaintainer(n)
        if name == "matching":
            return MatchingMaintainer(n)
        if name == "coloring":
            if "delta" not in params:
                raise ScriptSyntaxError("coloring needs delta= in the header", 1, 1)
            return ColoringMaintainer(n, params["delta"])
        raise ValueError(name)

    # -- execution
    def apply(self, change: BatchChange) -> RoundMeter:
        apply_change(self.store, change)
        meter = RoundMeter()
        for name in sorted(self.m):
            self.m[name].apply(change, meter)
        return meter

    def answer(self, q: Query) -> str:
        a = q.args
        if q.kind == "reach":
            return _bool(self.m["reach" if "reach" in self.m else "dist"].reach(*a))
        if q.kind == "dist":
            d = self.m["dist"].dist(*a)
            return "inf" if d is None else str(d)
        if q.kind == "member":
            return _bool(self.m["cfl"].member())
        if q.kind == "tiso":
            return _bool(self.m["tiso"].t_iso(*a))
        if q.kind == "msf":
            return " ".join(f"{u}-{v}-{w}" for u, v, w in sorted(self.m["msf"].msf))
        if q.kind == "matching":
            return " ".join(f"{u}-{v}" for u, v in sorted(self.m["matching"].M))
        if q.kind == "coloring":
            col = self.m["coloring"].col
            return " ".join(f"{v}:{col[v]}" for v in sorted(col))
        raise ValueError(q.kind)

    def run(self) -> RunReport:
        report = RunReport()
        for i, st in enumerate(self.script.steps):
            t0 = time.perf_counter()
            if isinstance(st, Query):
                row = StepRow(i, st.line, "query", answer=self.answer(st))
            else:
                meter = self.apply(st)
                row = StepRow(i, st.line, st.op, st.m, meter.rounds_used, meter.bound, meter.checks,
                              meter.blocks_summary())
                if self.verify_each:
                    self.verify(st.line)
            row.wall_ms = (time.perf_counter() - t0) * 1e3
            report.rows.append(row)
        return report

    # -- verification against oracles
    def edges(self):
        return sorted(self.store.get("E"))

    def verify(self, line=0):
        for name in sorted(self.m):
            problem = getattr(self, f"_verify_{name}")(self.m[name])
            if problem:
                raise VerificationError(f"line {line}: {name}: {problem}")

    def _verify_reach(self, m):
        want = oracles.warshall_closure(self.n, self.edges())
        if not np.array_equal(m.reach_matrix(), want):
            return "reachability differs from the closure oracle"
        if not m.inverses_consistent():
            return "maintained inverse is not the inverse of the current matrix"
        return None

    def _verify_dist(self, m):
        want = oracles.bfs_all_pairs(self.n, self.edges(), directed=self.kind == "dag")
        if not np.array_equal(m.table.astype(np.int64), want):
            return "distance table differs from BFS"
        return None

    def _verify_cfl(self, m):
        word = [a for _, a in sorted(self.store.get("W"))]
        if m.word != word:
            return "word out of sync"
        if not np.array_equal(m.relation_array(), oracles.brute_gapped(self.grammar, word)):
            return "gapped-interval relation differs from the oracle"
        if m.member() != oracles.cyk(self.grammar, word):
            return "membership differs from CYK"
        return None

    def _verify_tiso(self, m):
        return verify_tiso(m, self.edges())

    def _verify_msf(self, m):
        if m.msf != oracles.kruskal(self.n, self.edges()):
            return "spanning forest differs from Kruskal"
        if m.L != sorted(m.L, key=lambda e: (e[2], e[0], e[1])) or set(m.L) != set(self.edges()):
            return "sorted edge list is wrong"
        return None

    def _verify_matching(self, m):
        if not oracles.check_matching_maximal(self.edges(), m.M):
            return "matching is not a maximal matching"
        return None

    def _verify_coloring(self, m):
        if not oracles.check_coloring(self.edges(), m.col, set(range(1, m.delta + 2))):
            return "colouring is not proper within the palette"
        return None


def verify_tiso(m: TreeIsoMaintainer, edges):
    """Compare classes, subtree isomorphism and sibling counts with canonical codes."""
    fc = oracles.ForestCodes(m.n, edges)
    codes = {}
    for a, r, h, nodes, code in fc.contexts():
        codes[(a, r, h)] = (code, sum(1 << u for u in nodes))
    cls = m.snap.cls
    if set(codes) != set(cls):
        return "context sets differ"
    groups = {}
    for k, c in cls.items():
        if m.ctx(k).mask != codes[k][1]:
            return f"node set of context {k} differs"
        groups.setdefault(c, set()).add(codes[k][0])
    if any(len(g) > 1 for g in groups.values()):
        return "a class mixes non-isomorphic contexts"
    by_code = {}
    for k, (code, mask) in codes.items():
        by_code.setdefault(code, []).append((k, mask))
    for group in by_code.values():
        for (k1, m1), (k2, m2) in combinations(group, 2):
            if not m1 & m2 and cls[k1] != cls[k2]:
                return f"isomorphic disjoint contexts {k1} {k2} in different classes"
    subs = sorted(m._subs)
    for (p1, v1), (p2, v2) in combinations(subs, 2):
        if m._subs[(p1, v1)].mask & m._subs[(p2, v2)].mask:
            continue
        x1 = v1 if p1 == -1 else p1
        x2 = v2 if p2 == -1 else p2
        if m.t_iso(x1, v1, x2, v2) != (fc.subtree(p1, v1) == fc.subtree(p2, v2)):
            return f"subtree isomorphism wrong for {(p1, v1)} {(p2, v2)}"
    for (q, p, y), cnt in m.snap.iso_sib.items():
        want = sum(1 for ys in m.adj[p] if ys not in (q, y) and fc.subtree(p, ys) == fc.subtree(p, y))
        if cnt != want:
            return f"sibling count wrong for {(q, p, y)}"
    return None


def _bool(b):
    return "true" if b else "false"


def bench(script: ChangeScript, repetitions=3):
    """Median wall time per step over fresh replays; rounds must not vary."""
    reports = [Session(script).run() for _ in range(max(1, repetitions))]
    first = reports[0]
    for rep in reports[1:]:
        if rep.to_csv(wall=False) != first.to_csv(wall=False):
            raise VerificationError("replays disagree outside the wall-time column")
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(("step", "op", "m", "rounds", "bound", "median_ms"))
    for i, row in enumerate(first.rows):
        if row.op == "query":
            continue
        med = statistics.median(rep.rows[i].wall_ms for rep in reports)
        w.writerow((row.step, row.op, row.m, row.rounds, row.bound, f"{med:.3f}"))
    return buf.getvalue()
