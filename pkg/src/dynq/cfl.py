"""Context-free membership under batches of symbol changes.

For every pair of nonterminals (X, Y) the maintainer keeps the set of gapped
intervals (i1, j1, j2, i2) such that X derives w[i1..j1-1] Y w[j2+1..i2].
Positions are 0-based internally and 1-based in scripts and the public API.

All relations live in one boolean block matrix: the row index is
(X, pair(i1, i2)) and the column index is (Y, pair(j1, j2)), with
pair(a, b) enumerating a <= b. Composing two contexts is then a boolean
matrix product.
"""

from __future__ import annotations

import numpy as np

from .core import BatchChange, DenseRelation, RoundMeter, log15_bound, run_rounds
from .errors import EmptyWord, OutOfDomain


def _bool_matmul(A, B):
    """Boolean product of two bool matrices via float32 BLAS on the nonzero core."""
    rows = np.flatnonzero(A.any(axis=1))
    inner = np.flatnonzero(A.any(axis=0) & B.any(axis=1))
    cols = np.flatnonzero(B.any(axis=0))
    out = np.zeros((A.shape[0], B.shape[1]), dtype=bool)
    if rows.size == 0 or inner.size == 0 or cols.size == 0:
        return out
    a = A[np.ix_(rows, inner)].astype(np.float32)
    b = B[np.ix_(inner, cols)].astype(np.float32)
    out[np.ix_(rows, cols)] = (a @ b) > 0
    return out


def _bool_matvec(A, x):
    return (A.astype(np.float32) @ x.astype(np.float32)) > 0


class CflMaintainer:
    def __init__(self, grammar, n, default_symbol=None, word=None):
        if n < 1:
            raise EmptyWord("words must be nonempty")
        self.grammar = grammar
        self.n = n
        self.V = len(grammar.nonterminals)
        self.nt = grammar.index
        self.rules = [(self.nt[x], self.nt[y], self.nt[z]) for x, y, z in grammar.binary]
        self.term_rules = [(self.nt[x], a) for x, a in grammar.unary]
        pa, pb = np.triu_indices(n)
        self.pa, self.pb = pa, pb
        self.Np = len(pa)
        self.pidx = np.full((n, n), -1, dtype=np.int64)
        self.pidx[pa, pb] = np.arange(self.Np)
        self.D = self.V * self.Np
        if word is None:
            if default_symbol is None:
                default_symbol = grammar.terminals[0] if grammar.terminals else "a"
            word = [default_symbol] * n
        if len(word) != n:
            raise ValueError("word length must equal n")
        self.word = list(word)
        self._R = DenseRelation((self.D, self.D))
        R = np.eye(self.D, dtype=bool)  # empty contexts R_{X->X}(j1, j1, j2, j2)
        meter = RoundMeter()
        R = run_rounds(R, self._round_fn(), self.n * self.D + 1, meter)
        self.init_rounds = meter.rounds_used
        self.R = R

    # -- storage
    @property
    def R(self):
        return self._R.to_array()

    @R.setter
    def R(self, arr):
        self._R = DenseRelation.from_array(arr)

    # -- helpers
    def _leaf_vector(self, positions=None):
        x = np.zeros(self.D, dtype=bool)
        pos = range(self.n) if positions is None else positions
        for v in pos:
            d = self.pidx[v, v]
            for w, a in self.term_rules:
                if self.word[v] == a:
                    x[w * self.Np + d] = True
        return x

    def _grid(self, R, Z):
        """Rows of nonterminal Z as an (n, n, D) array indexed by (a, b)."""
        g = np.zeros((self.n, self.n, R.shape[1]), dtype=np.float32)
        g[self.pa, self.pb] = R[Z * self.Np:(Z + 1) * self.Np]
        return g

    def _pair_matrix(self, vec, Z):
        m = np.zeros((self.n, self.n), dtype=np.float32)
        m[self.pa, self.pb] = vec[Z * self.Np:(Z + 1) * self.Np]
        return m

    def spine_extensions(self, R, full):
        """Contexts Z -> Y extended by one branching rule with a complete side tree.

        `full` is the (D,) vector of complete derivations Z'(u1, u2). Left: the
        complete tree is the left child Z1 over [v1, v2], and Z2 -> Y covers the
        rest starting at v2 + 1. Right: the mirror image.
        """
        n, D, Np = self.n, R.shape[1], self.Np
        ext = np.zeros((self.D, D), dtype=bool)
        if not self.rules:
            return ext
        grids = {}
        fm = {}

        def grid(Z):
            if Z not in grids:
                grids[Z] = self._grid(R, Z)
            return grids[Z]

        def fmat(Z):
            if Z not in fm:
                fm[Z] = self._pair_matrix(full, Z)
            return fm[Z]

        for Z, Z1, Z2 in self.rules:
            F1 = fmat(Z1)
            if F1.any():
                G2 = grid(Z2)
                Fs = np.zeros((n, n), dtype=np.float32)
                Fs[:, 1:] = F1[:, :-1]  # Fs[v1, a] = F1[v1, a - 1]
                L = (Fs @ G2.reshape(n, n * D)).reshape(n, n, D)
                ext[Z * Np:(Z + 1) * Np] |= L[self.pa, self.pb] > 0
            F2 = fmat(Z2)
            if F2.any():
                G1 = grid(Z1)
                F2s = np.zeros((n, n), dtype=np.float32)
                F2s[:-1, :] = F2[1:, :]  # F2s[v2, v3] = F2[v2 + 1, v3]
                T = np.ascontiguousarray(G1.transpose(0, 2, 1)).reshape(n * D, n) @ F2s
                Rt = T.reshape(n, D, n).transpose(0, 2, 1)
                ext[Z * Np:(Z + 1) * Np] |= Rt[self.pa, self.pb] > 0
        return ext

    def _round_fn(self):
        leaf = self._leaf_vector()

        def step(R):
            T = _bool_matvec(R, leaf)  # complete derivations T_Z'(u1, u2)
            ext = R | self.spine_extensions(R, T)
            return R | _bool_matmul(R, ext)

        return step

    def _change_counts(self, positions):
        """cnt[row, col] = number of changed positions inside the gapped interval."""
        c = np.zeros(self.n + 2, dtype=np.int32)
        for p in positions:
            c[p + 1] += 1
        c = np.cumsum(c)  # c[x] = changed positions < x
        pa, pb = self.pa, self.pb
        outer = c[pb + 1] - c[pa]  # changes in [i1, i2]
        inner = c[pb + 1] - c[pa]  # changes in [j1, j2]
        cnt = outer[:, None] - inner[None, :]
        return np.tile(cnt, (self.V, self.V))

    # -- dynamic steps
    def base_case(self, R_old, positions):
        """Relation valid for every interval with at most one changed position."""
        if not positions:
            return R_old.copy()
        cnt = self._change_counts(positions)
        full = _bool_matvec(R_old, self._leaf_vector(positions))
        ext = self.spine_extensions(R_old, full)
        derived = _bool_matmul(R_old, ext)
        return (R_old & (cnt == 0)) | (derived & (cnt == 1))

    def set_symbols(self, changes, meter: RoundMeter | None = None):
        """Apply {position (0-based): symbol} and restore the relation."""
        meter = meter if meter is not None else RoundMeter()
        for p in changes:
            if not 0 <= p < self.n:
                raise OutOfDomain(f"position {p + 1} outside [1, {self.n}]")
        R_old = self.R
        for p, a in changes.items():
            self.word[p] = a
        positions = sorted(changes)
        R0 = self.base_case(R_old, positions)
        meter.block("base-case", 1)
        self.R = run_rounds(R0, self._round_fn(), log15_bound(len(positions)), meter)
        return meter

    def apply(self, change: BatchChange, meter: RoundMeter):
        if change.op != "set":
            raise ValueError("word maintainers take set changes")
        self.set_symbols({p: a for p, a in change.tuples}, meter)

    # -- queries
    def derives(self, X, u1, u2, R=None):
        """X derives w[u1..u2] (0-based, inclusive)."""
        R = self.R if R is None else R
        T = _bool_matvec(R, self._leaf_vector())
        return bool(T[self.nt[X] * self.Np + self.pidx[u1, u2]])

    def member(self):
        return self.derives(self.grammar.start, 0, self.n - 1)

    def relation_array(self):
        """R as a bool array [X, Y, i1, j1, j2, i2] (0-based positions)."""
        n, V, Np = self.n, self.V, self.Np
        out = np.zeros((V, V, n, n, n, n), dtype=bool)
        r, c = np.nonzero(self.R)
        X, ro = divmod(r, Np)
        Y, co = divmod(c, Np)
        out[X, Y, self.pa[ro], self.pa[co], self.pb[co], self.pb[ro]] = True
        return out

    def contains(self, X, Y, i1, j1, j2, i2):
        """Membership of a 1-based gapped interval in R_{X->Y}."""
        if not (1 <= i1 <= j1 <= j2 <= i2 <= self.n):
            return False
        row = self.nt[X] * self.Np + self.pidx[i1 - 1, i2 - 1]
        col = self.nt[Y] * self.Np + self.pidx[j1 - 1, j2 - 1]
        return (int(row), int(col)) in self._R
