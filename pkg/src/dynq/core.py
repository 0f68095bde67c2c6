"""Structures, batch changes, change scripts and synchronous round accounting."""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from typing import Any, Callable, Iterable

import numpy as np

from .errors import (
    AlreadyPresentOnInsert,
    ArityMismatch,
    BoundExceededWithoutFixpoint,
    MissingHeader,
    NotPresentOnDelete,
    OutOfDomain,
    ScriptSyntaxError,
    UnknownRelation,
)

KINDS = ("digraph", "ugraph", "dag", "forest", "word", "wgraph")
QUERY_KINDS = ("reach", "dist", "member", "tiso", "msf", "matching", "coloring")
MAX_WEIGHT = 2**62


@dataclass(frozen=True)
class Domain:
    n: int

    def __post_init__(self):
        if self.n < 1:
            raise OutOfDomain(f"domain size must be positive, got {self.n}")

    def __contains__(self, x):
        return isinstance(x, (int, np.integer)) and 0 <= x < self.n


# ---------------------------------------------------------------- relations


class SparseRelation:
    """Hash set of fixed-arity tuples."""

    dense = False

    def __init__(self, arity: int, tuples: Iterable[tuple] = ()):
        self.arity = arity
        self._tuples = set(tuples)

    def __contains__(self, t):
        return t in self._tuples

    def __iter__(self):
        return iter(sorted(self._tuples))

    def __len__(self):
        return len(self._tuples)

    def add(self, t):
        self._tuples.add(t)

    def discard(self, t):
        self._tuples.discard(t)

    def copy(self):
        return SparseRelation(self.arity, self._tuples)

    def frozen(self):
        return frozenset(self._tuples)


class DenseRelation:
    """Relation over an index box stored as a packed bitset."""

    dense = True

    def __init__(self, shape: tuple[int, ...], bits: np.ndarray | None = None):
        self.shape = tuple(int(s) for s in shape)
        self.arity = len(self.shape)
        self.size = int(np.prod(self.shape)) if self.shape else 1
        if bits is None:
            bits = np.zeros((self.size + 7) // 8, dtype=np.uint8)
        self._bits = bits

    @classmethod
    def from_array(cls, arr: np.ndarray) -> "DenseRelation":
        arr = np.asarray(arr, dtype=bool)
        return cls(arr.shape, np.packbits(arr.ravel()))

    def to_array(self) -> np.ndarray:
        flat = np.unpackbits(self._bits, count=self.size).astype(bool)
        return flat.reshape(self.shape)

    def _index(self, t):
        if len(t) != self.arity:
            raise ArityMismatch(f"expected arity {self.arity}, got {len(t)}")
        for x, s in zip(t, self.shape):
            if not 0 <= x < s:
                raise OutOfDomain(f"{t} outside {self.shape}")
        return int(np.ravel_multi_index(t, self.shape))

    def __contains__(self, t):
        i = self._index(t)
        return bool((self._bits[i >> 3] >> (7 - (i & 7))) & 1)

    def add(self, t):
        i = self._index(t)
        self._bits[i >> 3] |= np.uint8(1 << (7 - (i & 7)))

    def discard(self, t):
        i = self._index(t)
        self._bits[i >> 3] &= np.uint8(0xFF ^ (1 << (7 - (i & 7))))

    def __iter__(self):
        for idx in np.flatnonzero(self.to_array().ravel()):
            yield tuple(int(v) for v in np.unravel_index(idx, self.shape))

    def __len__(self):
        return int(np.unpackbits(self._bits, count=self.size).sum())

    def copy(self):
        return DenseRelation(self.shape, self._bits.copy())

    def frozen(self):
        return (self.shape, self._bits.tobytes())


class RelationStore:
    """Named relations over the domain [0, n)."""

    def __init__(self, n: int):
        self.domain = Domain(n)
        self.n = n
        self.relations: dict[str, Any] = {}
        self._domain_cols: dict[str, tuple[int, ...]] = {}

    def declare(self, name, arity, domain_cols=None, dense_shape=None):
        if dense_shape is not None:
            self.relations[name] = DenseRelation(dense_shape)
        else:
            self.relations[name] = SparseRelation(arity)
        self._domain_cols[name] = tuple(range(arity)) if domain_cols is None else tuple(domain_cols)
        return self.relations[name]

    def arity(self, name):
        return self.get(name).arity

    def get(self, name):
        try:
            return self.relations[name]
        except KeyError:
            raise UnknownRelation(name) from None

    def check_tuple(self, name, t):
        rel = self.get(name)
        if len(t) != rel.arity:
            raise ArityMismatch(f"{name} has arity {rel.arity}, got {t}")
        if not rel.dense:
            for c in self._domain_cols[name]:
                if t[c] not in self.domain:
                    raise OutOfDomain(f"{t} has component outside [0,{self.n})")

    def snapshot(self):
        return {k: v.frozen() for k, v in sorted(self.relations.items())}


# ---------------------------------------------------------------- changes


@dataclass(frozen=True)
class BatchChange:
    op: str  # insert | delete | set
    relation: str
    tuples: tuple
    declared_bound: int
    line: int = 0

    def __post_init__(self):
        if self.op not in ("insert", "delete", "set"):
            raise ValueError(f"unknown op {self.op}")
        if len(self.tuples) > self.declared_bound:
            raise ValueError(f"batch of {len(self.tuples)} exceeds bound {self.declared_bound}")

    @property
    def m(self):
        return len(self.tuples)


@dataclass(frozen=True)
class Query:
    kind: str
    args: tuple
    line: int = 0


def apply_change(store: RelationStore, change: BatchChange) -> RelationStore:
    """Apply one batch to `store` in place (atomically) and return it.

    `set` treats column 0 as a key: each (k, v) replaces the tuple keyed by k.
    """
    rel = store.get(change.relation)
    for t in change.tuples:
        store.check_tuple(change.relation, t)
    if change.op == "insert":
        for t in change.tuples:
            if t in rel:
                raise AlreadyPresentOnInsert(f"{change.relation}{t}")
        for t in change.tuples:
            rel.add(t)
    elif change.op == "delete":
        for t in change.tuples:
            if t not in rel:
                raise NotPresentOnDelete(f"{change.relation}{t}")
        for t in change.tuples:
            rel.discard(t)
    else:
        keys = {t[0] for t in change.tuples}
        old = [t for t in rel if t[0] in keys]
        for t in old:
            rel.discard(t)
        for t in change.tuples:
            rel.add(t)
    return store


# ---------------------------------------------------------------- rounds


@dataclass
class RoundMeter:
    rounds_used: int = 0
    bound: int = 0
    block_events: list = field(default_factory=list)
    checks: int = 0

    def declare(self, bound: int):
        self.bound += bound

    def tick(self):
        self.rounds_used += 1

    def block(self, label: str, count: int = 1):
        self.block_events.append((label, count))

    def within_bound(self):
        return self.rounds_used <= self.bound

    def blocks_summary(self):
        agg: dict[str, int] = {}
        for label, c in self.block_events:
            agg[label] = agg.get(label, 0) + c
        return ";".join(f"{k}={v}" for k, v in sorted(agg.items()))


def _same(a, b):
    if isinstance(a, np.ndarray) or isinstance(b, np.ndarray):
        return isinstance(a, np.ndarray) and isinstance(b, np.ndarray) and np.array_equal(a, b)
    if isinstance(a, tuple) and isinstance(b, tuple):
        return len(a) == len(b) and all(_same(x, y) for x, y in zip(a, b))
    return a == b


def run_rounds(state, round_fn: Callable, bound: int, meter: RoundMeter, same: Callable | None = None):
    """Iterate `round_fn` synchronously until a fixpoint or `bound` applications.

    Each counted application reads only the previous state. If all `bound`
    applications changed the state, one extra application (recorded as a
    fixpoint check, not a round) decides whether a fixpoint was reached.
    """
    same = same or _same
    meter.declare(bound)
    for _ in range(bound):
        new = round_fn(state)
        meter.tick()
        if same(new, state):
            return new
        state = new
    new = round_fn(state)
    meter.checks += 1
    meter.block("fixpoint-check", 1)
    if not same(new, state):
        raise BoundExceededWithoutFixpoint(f"no fixpoint after {bound} rounds")
    return new


def log2_bound(m: int) -> int:
    """max(1, ceil(log2(m+1)))."""
    return max(1, int(m).bit_length())


def log15_bound(m: int) -> int:
    """max(1, floor(log_1.5 m) + 1): the least k with 1.5**k > m."""
    k = 0
    while 3**k <= m * 2**k:
        k += 1
    return max(1, k)


def default_batch_bound(n: int) -> int:
    return max(2, math.ceil(math.log2(n)) if n > 1 else 0) ** 3


# ---------------------------------------------------------------- scripts


@dataclass
class ChangeScript:
    n: int
    kind: str
    params: dict
    steps: list
    batch_bound: int

    @property
    def changes(self):
        return [s for s in self.steps if isinstance(s, BatchChange)]

    @property
    def queries(self):
        return [s for s in self.steps if isinstance(s, Query)]


UNDIRECTED_KINDS = ("ugraph", "wgraph", "forest")
_TOKEN = re.compile(r"\S+")
_TUPLE = re.compile(r"\(([^()]*)\)")
_INT = re.compile(r"-?\d+$")


def _parse_header(tokens, line):
    params = {}
    for tok, col in tokens[1:]:
        if "=" not in tok:
            raise ScriptSyntaxError(f"expected key=value, got {tok!r}", line, col)
        k, v = tok.split("=", 1)
        params[k] = (v, col)
    if "n" not in params or "kind" not in params:
        raise ScriptSyntaxError("init needs n= and kind=", line, 1)
    try:
        n = int(params["n"][0])
    except ValueError:
        raise ScriptSyntaxError("n must be an integer", line, params["n"][1]) from None
    if n < 1:
        raise ScriptSyntaxError("n must be positive", line, params["n"][1])
    kind = params["kind"][0]
    if kind not in KINDS:
        raise ScriptSyntaxError(f"unknown kind {kind!r}", line, params["kind"][1])
    out = {k: v for k, (v, _) in params.items() if k not in ("n", "kind")}
    for key in ("delta", "batch"):
        if key in out:
            if not _INT.match(out[key]) or int(out[key]) < 0:
                raise ScriptSyntaxError(f"{key} must be a nonnegative integer", line, params[key][1])
            out[key] = int(out[key])
    known = {"grammar", "delta", "default", "batch"}
    for k in out:
        if k not in known:
            raise ScriptSyntaxError(f"unknown header key {k!r}", line, params[k][1])
    return n, kind, out


def _edge_tuple(kind, n, comps, line, col):
    want = 3 if kind == "wgraph" else 2
    if len(comps) != want:
        raise ScriptSyntaxError(f"expected {want}-tuple", line, col)
    try:
        vals = [int(c) for c in comps]
    except ValueError:
        raise ScriptSyntaxError("tuple components must be integers", line, col) from None
    u, v = vals[0], vals[1]
    if not (0 <= u < n and 0 <= v < n):
        raise OutOfDomainSyntax(f"node outside [0,{n})", line, col)
    if kind != "digraph" and u == v:
        raise ScriptSyntaxError("self-loops are not allowed for this kind", line, col)
    if kind == "wgraph":
        if not 0 <= vals[2] <= MAX_WEIGHT:
            raise ScriptSyntaxError("weight outside [0, 2^62]", line, col)
    if kind in ("ugraph", "wgraph") and u > v:
        u, v = v, u
    return (u, v) if want == 2 else (u, v, vals[2])


class OutOfDomainSyntax(ScriptSyntaxError, OutOfDomain):
    """Script references an element outside the declared domain."""


def parse_script(text) -> ChangeScript:
    """Parse the line-oriented change-script format."""
    if isinstance(text, bytes):
        text = text.decode("utf-8")
    header = None
    steps = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("#", 1)[0]
        tokens = [(m.group(0), m.start() + 1) for m in _TOKEN.finditer(body)]
        if not tokens:
            continue
        word, col = tokens[0]
        if header is None:
            if word != "init":
                raise MissingHeader("script must start with an init line", lineno, col)
            header = _parse_header(tokens, lineno)
            n, kind, params = header
            bound = params.get("batch", default_batch_bound(n))
            continue
        if word == "init":
            raise ScriptSyntaxError("duplicate init line", lineno, col)
        if word in ("ins", "del", "set"):
            steps.append(_parse_change(word, body, tokens, lineno, n, kind, bound))
        elif word == "query":
            steps.append(_parse_query(tokens, lineno, n, kind))
        else:
            raise ScriptSyntaxError(f"unknown directive {word!r}", lineno, col)
    if header is None:
        raise MissingHeader("empty script", 1, 1)
    n, kind, params = header
    return ChangeScript(n=n, kind=kind, params=params, steps=steps, batch_bound=bound)


def _parse_change(word, body, tokens, line, n, kind, bound):
    if word == "set":
        if kind != "word":
            raise ScriptSyntaxError("set is only valid for word scripts", line, 1)
        rel = "W"
        start = tokens[0][1] + len(word) - 1
    else:
        if kind == "word":
            raise ScriptSyntaxError("word scripts use set", line, 1)
        if len(tokens) < 2:
            raise ScriptSyntaxError("missing relation name", line, len(body) + 1)
        rel, rcol = tokens[1]
        if rel != "E":
            raise ScriptSyntaxError(f"unknown relation {rel!r} for kind {kind}", line, rcol)
        start = rcol + len(rel) - 1
    rest = body[start:]
    pos = 0
    tuples = []
    for m in _TUPLE.finditer(rest):
        gap = rest[pos:m.start()]
        if gap.strip():
            raise ScriptSyntaxError(f"unexpected text {gap.strip()!r}", line, start + pos + 1)
        pos = m.end()
        col = start + m.start() + 1
        comps = [c.strip() for c in m.group(1).split(",")]
        if word == "set":
            if len(comps) != 2 or not _INT.match(comps[0]) or not comps[1]:
                raise ScriptSyntaxError("expected (pos,symbol)", line, col)
            p = int(comps[0])
            if not 1 <= p <= n:
                raise OutOfDomainSyntax(f"position outside [1,{n}]", line, col)
            tuples.append((p - 1, comps[1]))
        else:
            tuples.append(_edge_tuple(kind, n, comps, line, col))
    if rest[pos:].strip():
        raise ScriptSyntaxError(f"unexpected text {rest[pos:].strip()!r}", line, start + pos + 1)
    if word == "set":
        keys = [t[0] for t in tuples]
        if len(set(keys)) != len(keys):
            raise ScriptSyntaxError("position set twice in one batch", line, 1)
    elif len(set(tuples)) != len(tuples):
        raise ScriptSyntaxError("duplicate tuple in one batch", line, 1)
    if len(tuples) > bound:
        raise ScriptSyntaxError(f"batch of {len(tuples)} exceeds declared bound {bound}", line, 1)
    op = {"ins": "insert", "del": "delete", "set": "set"}[word]
    return BatchChange(op, rel, tuple(sorted(tuples)), bound, line)


_QUERY_ARITY = {"reach": 2, "dist": 2, "tiso": 4, "member": 0, "msf": 0, "matching": 0, "coloring": 0}


def _parse_query(tokens, line, n, kind):
    if len(tokens) < 2:
        raise ScriptSyntaxError("missing query kind", line, tokens[0][1] + 5)
    q, qcol = tokens[1]
    if q not in QUERY_KINDS:
        raise ScriptSyntaxError(f"unknown query {q!r}", line, qcol)
    args = tokens[2:]
    if len(args) != _QUERY_ARITY[q]:
        raise ScriptSyntaxError(f"query {q} takes {_QUERY_ARITY[q]} arguments", line, qcol)
    vals = []
    for a, acol in args:
        if not _INT.match(a):
            raise ScriptSyntaxError(f"expected integer, got {a!r}", line, acol)
        v = int(a)
        if not 0 <= v < n:
            raise OutOfDomainSyntax(f"node outside [0,{n})", line, acol)
        vals.append(v)
    return Query(q, tuple(vals), line)


def format_script(script: ChangeScript) -> str:
    """Inverse of parse_script (up to whitespace and comments)."""
    head = [f"init n={script.n} kind={script.kind}"]
    for k in ("grammar", "delta", "default", "batch"):
        if k in script.params:
            head.append(f"{k}={script.params[k]}")
    lines = [" ".join(head)]
    for s in script.steps:
        if isinstance(s, Query):
            lines.append(" ".join(["query", s.kind, *map(str, s.args)]))
        elif s.op == "set":
            lines.append("set " + " ".join(f"({p + 1},{a})" for p, a in s.tuples))
        else:
            word = "ins" if s.op == "insert" else "del"
            lines.append(f"{word} {s.relation} " + " ".join("(" + ",".join(map(str, t)) + ")" for t in s.tuples))
    return "\n".join(lines) + "\n"
