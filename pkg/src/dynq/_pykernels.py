"""Numpy implementations of the hot kernels (fallback when the extension is absent)."""

import numpy as np

INF = 1 << 29


def minplus_relax(D, src, dst, out):
    """out[u,v] = min(out[u,v], D[u,z1] + 1 + D[z2,v]) over edges (z1,z2).

    Reads only D, writes only out. Returns True if any entry decreased.
    """
    changed = False
    for z1, z2 in zip(src, dst):
        col = D[:, z1]
        row = D[z2, :]
        rows = np.flatnonzero(col < INF)
        cols = np.flatnonzero(row < INF)
        if rows.size == 0 or cols.size == 0:
            continue
        cand = col[rows, None] + 1 + row[None, cols]
        idx = np.ix_(rows, cols)
        block = out[idx]
        better = cand < block
        if better.any():
            out[idx] = np.where(better, cand, block)
            changed = True
    return changed


def drop_through(D, src, dst, out):
    """Set out[u,v] = INF whenever D[u,v] = D[u,z1] + 1 + D[z2,v] for some edge."""
    for z1, z2 in zip(src, dst):
        col = D[:, z1]
        row = D[z2, :]
        rows = np.flatnonzero(col < INF)
        cols = np.flatnonzero(row < INF)
        if rows.size == 0 or cols.size == 0:
            continue
        idx = np.ix_(rows, cols)
        hit = (col[rows, None] + 1 + row[None, cols]) == D[idx]
        if hit.any():
            block = out[idx]
            block[hit] = INF
            out[idx] = block


def gauss_jordan_mod(A, primes):
    """Batched inverse and determinant over Z_p.

    A has shape (P, k, k) with entries in [0, p); primes has shape (P,).
    Returns (inv, det); for singular slices det is 0 and inv is all zeros.
    """
    A = np.array(A, dtype=np.int64, copy=True)
    P, k, _ = A.shape
    p = np.asarray(primes, dtype=np.int64)
    pc = p[:, None, None]
    inv = np.broadcast_to(np.eye(k, dtype=np.int64), (P, k, k)).copy()
    det = np.ones(P, dtype=np.int64)
    alive = np.ones(P, dtype=bool)
    ar = np.arange(P)
    for c in range(k):
        nz = A[:, c:, c] != 0
        has = nz.any(axis=1)
        alive &= has
        piv = c + np.argmax(nz, axis=1)
        swap = (piv != c) & alive
        if swap.any():
            for M in (A, inv):
                rc = M[ar, c].copy()
                M[ar[swap], c] = M[ar[swap], piv[swap]]
                M[ar[swap], piv[swap]] = rc[swap]
            det[swap] = (-det[swap]) % p[swap]
        pv = np.where(alive, A[:, c, c], 1)
        det = (det * pv) % p
        pinv = np.array([pow(int(a), -1, int(q)) for a, q in zip(pv, p)], dtype=np.int64)
        A[:, c, :] = (A[:, c, :] * pinv[:, None]) % p[:, None]
        inv[:, c, :] = (inv[:, c, :] * pinv[:, None]) % p[:, None]
        f = A[:, :, c].copy()
        f[:, c] = 0
        A -= (f[:, :, None] * A[:, c, None, :]) % pc
        A %= pc
        inv -= (f[:, :, None] * inv[:, c, None, :]) % pc
        inv %= pc
    det = np.where(alive, det, 0)
    inv[~alive] = 0
    return inv, det


def reduce_mod(x, primes):
    """x mod primes[i] for every slice x[i]; float64 integers below 2**52 in magnitude.

    Floor division with one correction step, exact for these inputs.
    """
    x = np.asarray(x, dtype=np.float64)
    pf = np.asarray(primes, dtype=np.float64).reshape((-1,) + (1,) * (x.ndim - 1))
    r = x - np.floor(x / pf) * pf
    pb = np.broadcast_to(pf, r.shape)
    np.add(r, pb, out=r, where=r < 0)
    np.subtract(r, pb, out=r, where=r >= pb)
    return r
