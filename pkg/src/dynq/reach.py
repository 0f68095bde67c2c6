"""Directed reachability through inverses of (n+1)I - A kept modulo many primes.

M = (n+1)I - A is strictly diagonally dominant, so it is invertible over the
rationals and its inverse is a power series in A with positive coefficients:
entry (s, t) is nonzero exactly when t is reachable from s. Each prime keeps
M^{-1} mod p and det(M) mod p; a batch of edge changes touching k distinct
source rows is a rank-k update handled with the Woodbury identity, which only
needs a k x k inverse per prime.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .core import BatchChange, RoundMeter
from .errors import AlreadyPresentOnInsert, NotPresentOnDelete, OutOfDomain, TooFewActivePrimes

PRIME_FLOOR = 1 << 20
_CHUNK = 1024  # inner dimension per exact float64 product block


@functools.lru_cache(maxsize=None)
def _primes_above(start, count):
    out = []
    c = start + 1
    while len(out) < count:
        if c > 1 and all(c % d for d in range(2, math.isqrt(c) + 1)):
            out.append(c)
        c += 1
    return tuple(out)


def primes_above(start, count):
    """The `count` smallest primes greater than `start`."""
    return list(_primes_above(start, count))


def cofactor_bits(n):
    return math.ceil(n * (math.log2(2 * n + 1) + 0.5 * math.log2(n)))


class PrimeBasis:
    def __init__(self, primes, bits):
        self.primes = np.asarray(primes, dtype=np.int64)
        self.active = np.ones(len(primes), dtype=bool)
        self.cofactor_bit_bound = bits
        self._logs = np.log2(self.primes.astype(np.float64))

    @classmethod
    def for_domain(cls, n):
        bits = cofactor_bits(n)
        count = 2 * math.ceil(bits / math.log2(PRIME_FLOOR + 1))
        return cls(primes_above(PRIME_FLOOR, max(count, 2)), bits)

    def active_bits(self):
        return float(self._logs[self.active].sum())

    def satisfied(self):
        return self.active_bits() > self.cofactor_bit_bound


def modmatmul(a, b, p):
    """Batched (P, x, y) @ (P, y, z) mod p[:, None, None].

    Operands hold integers in [0, p) as float64; products are exact because
    each block sums at most 1024 terms below 2**42.
    """
    y = a.shape[-1]
    if y <= _CHUNK:
        return kernels.reduce_mod(a @ b, p)
    out = np.zeros(a.shape[:-1] + b.shape[-1:], dtype=np.float64)
    for s in range(0, y, _CHUNK):
        out += kernels.reduce_mod(a[..., s:s + _CHUNK] @ b[..., s:s + _CHUNK, :], p)
    return kernels.reduce_mod(out, p)


def det_small(C, p, meter: RoundMeter | None = None):
    """Determinant of a small square matrix over Z_p (one small-structure block)."""
    C = np.asarray(C, dtype=np.int64) % p
    if meter is not None:
        meter.block("small-det", 1)
    if C.shape[0] == 0:
        return 1 % p
    _, det = kernels.gauss_jordan_mod(C[None], np.array([p]))
    return int(det[0])


@dataclass
class LowRankFactor:
    """Change of M written as U Bk Vk with U selecting `rows` and Bk = I."""

    rows: np.ndarray  # (k,)
    Vk: np.ndarray  # (k, n) entries in {-1, 0, 1}

    @property
    def k(self):
        return len(self.rows)

    @property
    def Bk(self):
        return np.eye(self.k, dtype=np.int64)

    @classmethod
    def from_edges(cls, n, inserted=(), deleted=()):
        rows = sorted({u for u, _ in inserted} | {u for u, _ in deleted})
        pos = {r: i for i, r in enumerate(rows)}
        Vk = np.zeros((len(rows), n), dtype=np.int64)
        for u, v in inserted:
            Vk[pos[u], v] -= 1
        for u, v in deleted:
            Vk[pos[u], v] += 1
        return cls(np.asarray(rows, dtype=np.int64), Vk)

    def U(self, n):
        U = np.zeros((n, self.k), dtype=np.int64)
        U[self.rows, np.arange(self.k)] = 1
        return U

    def dense(self, n):
        return self.U(n) @ self.Bk @ self.Vk


class ReachMaintainer:
    def __init__(self, n, basis: PrimeBasis | None = None):
        self.n = n
        self.basis = basis or PrimeBasis.for_domain(n)
        self.edges: set = set()
        p = self.basis.primes
        # a prime dividing n+1 makes the initial matrix singular: start it inactive
        usable = np.array([(n + 1) % int(q) != 0 for q in p])
        self.basis.active &= usable
        inv_diag = np.array([pow(n + 1, -1, int(q)) if ok else 0 for q, ok in zip(p, usable)], dtype=np.int64)
        # exact integers in [0, p) stored as float64 for BLAS products
        self.minv = (inv_diag[:, None, None] * np.eye(n, dtype=np.int64)[None]).astype(np.float64)
        self.det = np.array([pow(n + 1, n, int(q)) for q in p], dtype=np.int64)

    # -- structure
    def matrix(self):
        M = (self.n + 1) * np.eye(self.n, dtype=np.int64)
        for u, v in self.edges:
            M[u, v] -= 1
        return M

    # -- updates
    def smw_update(self, factor: LowRankFactor, meter: RoundMeter):
        if factor.k == 0:
            return
        act = np.flatnonzero(self.basis.active)
        if act.size == 0:
            return
        p = self.basis.primes[act]
        full = act.size == len(self.basis.primes)
        Mi = self.minv if full else self.minv[act]
        rows = factor.rows
        Y = kernels.reduce_mod(np.matmul(factor.Vk.astype(np.float64), Mi), p)  # Vk Minv
        S = kernels.reduce_mod(Y[:, :, rows] + np.eye(factor.k)[None], p)
        Sinv, detS = kernels.gauss_jordan_mod(S, p)
        meter.block("small-det", 1)
        ok = detS != 0
        if not ok.all():
            meter.block("penalty:deactivate", int((~ok).sum()))
            self.basis.active[act[~ok]] = False
        if not ok.any():
            return
        if not ok.all():
            sel = np.flatnonzero(ok)
            act, p, Mi, Y, Sinv, detS = act[sel], p[sel], Mi[sel], Y[sel], Sinv[sel], detS[sel]
            full = False
        W = Mi[:, :, rows]  # Minv U
        Z = modmatmul(Sinv.astype(np.float64), Y, p)
        if factor.k <= _CHUNK:
            # unreduced W Z stays below k p**2 < 2**52, so one reduction after the subtraction is exact
            new = kernels.reduce_mod(Mi - W @ Z, p)
        else:
            new = kernels.reduce_mod(Mi - modmatmul(W, Z, p), p)
        if full:
            self.minv = new
        else:
            self.minv[act] = new
        self.det[act] = (self.det[act] * detS) % p

    def reactivate_prime(self, i, meter: RoundMeter | None = None):
        """Rebuild the inverse for prime index i by dense elimination."""
        self._reinvert(np.array([i]), meter)

    def _reinvert(self, idx, meter):
        if idx.size == 0:
            return
        p = self.basis.primes[idx]
        M = np.mod(self.matrix()[None], p[:, None, None])
        inv, det = kernels.gauss_jordan_mod(M, p)
        if meter is not None:
            meter.block("penalty:reinvert", int(idx.size))
        good = det != 0
        self.minv[idx[good]] = inv[good].astype(np.float64)
        self.det[idx[good]] = det[good]
        self.basis.active[idx[good]] = True

    def ensure_basis(self, meter: RoundMeter | None = None):
        if self.basis.satisfied():
            return
        self._reinvert(np.flatnonzero(~self.basis.active), meter)
        if not self.basis.satisfied():
            raise TooFewActivePrimes(f"{self.basis.active_bits():.1f} bits <= {self.basis.cofactor_bit_bound}")

    def _check(self, e):
        u, v = int(e[0]), int(e[1])
        if not (0 <= u < self.n and 0 <= v < self.n):
            raise OutOfDomain(e)
        return (u, v)

    def update(self, inserted=(), deleted=(), meter: RoundMeter | None = None):
        meter = meter if meter is not None else RoundMeter()
        ins = {self._check(e) for e in inserted}
        dele = {self._check(e) for e in deleted}
        for e in ins:
            if e in self.edges:
                raise AlreadyPresentOnInsert(e)
        for e in dele:
            if e not in self.edges:
                raise NotPresentOnDelete(e)
        self.edges = (self.edges | ins) - dele
        self.smw_update(LowRankFactor.from_edges(self.n, sorted(ins), sorted(dele)), meter)
        return meter

    def apply(self, change: BatchChange, meter: RoundMeter):
        if change.op == "insert":
            self.update(inserted=change.tuples, meter=meter)
        elif change.op == "delete":
            self.update(deleted=change.tuples, meter=meter)
        else:
            raise ValueError(f"unsupported op {change.op}")

    # -- queries
    def reach(self, s, t):
        self.ensure_basis()
        act = self.basis.active
        p = self.basis.primes[act]
        vals = (self.det[act] * self.minv[act, s, t].astype(np.int64)) % p
        return bool((vals != 0).any())

    def reach_matrix(self):
        self.ensure_basis()
        act = np.flatnonzero(self.basis.active)
        # same test as reach(): det * Minv[s, t] is the (t, s) cofactor mod p
        p = self.basis.primes[act]
        vals = kernels.reduce_mod(self.minv[act] * self.det[act].astype(np.float64)[:, None, None], p)
        return (vals != 0).any(axis=0)

    def inverses_consistent(self):
        """M Minv == I (mod p) for every active prime, via one stacked product."""
        act = np.flatnonzero(self.basis.active)
        if act.size == 0:
            return True
        p = self.basis.primes[act]
        n = self.n
        stacked = self.minv[act].transpose(1, 0, 2).reshape(n, -1)
        prod = (self.matrix().astype(np.float64) @ stacked).reshape(n, act.size, n).transpose(1, 0, 2)
        prod = kernels.reduce_mod(prod, p)
        return bool((prod == np.eye(n)[None]).all())
