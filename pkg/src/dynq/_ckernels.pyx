# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled versions of the hot kernels; same contracts as _pykernels."""

import numpy as np
cimport numpy as cnp

cnp.import_array()

cdef enum:
    CINF = 536870912  # 1 << 29
INF = CINF


def minplus_relax(cnp.int32_t[:, ::1] D, src, dst, cnp.int32_t[:, ::1] out):
    cdef Py_ssize_t n = D.shape[0]
    cdef cnp.int64_t[::1] s = np.ascontiguousarray(src, dtype=np.int64)
    cdef cnp.int64_t[::1] t = np.ascontiguousarray(dst, dtype=np.int64)
    cdef cnp.int64_t[::1] cols = np.empty(n, dtype=np.int64)
    cdef Py_ssize_t e, u, v, i, ncols, z1, z2
    cdef int du, c
    cdef bint changed = False
    for e in range(s.shape[0]):
        z1 = s[e]
        z2 = t[e]
        ncols = 0
        for v in range(n):
            if D[z2, v] < CINF:
                cols[ncols] = v
                ncols += 1
        if ncols == 0:
            continue
        for u in range(n):
            du = D[u, z1]
            if du >= CINF:
                continue
            du += 1
            for i in range(ncols):
                v = cols[i]
                c = du + D[z2, v]
                if c < out[u, v]:
                    out[u, v] = c
                    changed = True
    return changed


def drop_through(cnp.int32_t[:, ::1] D, src, dst, cnp.int32_t[:, ::1] out):
    cdef Py_ssize_t n = D.shape[0]
    cdef cnp.int64_t[::1] s = np.ascontiguousarray(src, dtype=np.int64)
    cdef cnp.int64_t[::1] t = np.ascontiguousarray(dst, dtype=np.int64)
    cdef cnp.int64_t[::1] cols = np.empty(n, dtype=np.int64)
    cdef Py_ssize_t e, u, v, i, ncols, z1, z2
    cdef int du
    for e in range(s.shape[0]):
        z1 = s[e]
        z2 = t[e]
        ncols = 0
        for v in range(n):
            if D[z2, v] < CINF:
                cols[ncols] = v
                ncols += 1
        if ncols == 0:
            continue
        for u in range(n):
            du = D[u, z1]
            if du >= CINF:
                continue
            du += 1
            for i in range(ncols):
                v = cols[i]
                if du + D[z2, v] == D[u, v]:
                    out[u, v] = CINF


cdef long long _inv_mod(long long a, long long p) nogil:
    cdef long long t = 0, nt = 1, r = p, nr = a, q, tmp
    while nr != 0:
        q = r // nr
        tmp = t - q * nt
        t = nt
        nt = tmp
        tmp = r - q * nr
        r = nr
        nr = tmp
    if t < 0:
        t += p
    return t


cdef inline long long _mulmod(long long a, long long b, long long p, double invp) nogil:
    # operands below 2**21, so the product is exact in a double
    cdef long long t = a * b
    cdef long long q = <long long>(<double>t * invp)
    t -= q * p
    if t < 0:
        t += p
    elif t >= p:
        t -= p
    return t


cdef extern from "_modarith.h" nogil:
    void dynq_axpy_mod(double* dst, const double* src, const double* f, const double* pd,
                       const double* invp, long P)
    void dynq_scale_mod(double* row, const double* f, const double* pd, const double* invp, long P)
    void dynq_reduce_mod(double* x, double p, double invp, long m)


def reduce_mod(x, primes):
    """x mod primes[i] for every slice x[i]; float64 integers below 2**52 in magnitude."""
    out_arr = np.array(x, dtype=np.float64, order="C", copy=True)
    cdef Py_ssize_t P = out_arr.shape[0]
    if P == 0 or out_arr.size == 0:
        return out_arr
    cdef double[:, ::1] out = out_arr.reshape(P, -1)
    cdef double[::1] pd = np.ascontiguousarray(primes, dtype=np.float64).reshape(-1)
    cdef Py_ssize_t i, m = out.shape[1]
    with nogil:
        for i in range(P):
            dynq_reduce_mod(&out[i, 0], pd[i], 1.0 / pd[i], m)
    return out_arr


def gauss_jordan_mod(A, primes):
    """Batched inverse and determinant over Z_p for primes below 2**21.

    In-place Gauss-Jordan on a (k, k, P) array of doubles, so the innermost
    loops run over primes and vectorize. Pivots are chosen per prime; a row
    swap at step c is undone as a column swap at the end.
    """
    A3 = np.asarray(A)
    cdef Py_ssize_t P = A3.shape[0], k = A3.shape[1]
    p_arr = np.ascontiguousarray(primes, dtype=np.int64)
    det_arr = np.ones(P, dtype=np.int64)
    if k == 0:
        return np.zeros((P, 0, 0), dtype=np.int64), det_arr
    # entries are already reduced into [0, p)
    work = np.ascontiguousarray(A3.transpose(1, 2, 0), dtype=np.float64)
    pd_arr = p_arr.astype(np.float64)
    invp_arr = 1.0 / pd_arr
    pinv_arr = np.zeros(P, dtype=np.float64)
    f_arr = np.zeros(P, dtype=np.float64)
    alive_arr = np.ones(P, dtype=np.uint8)
    swaps_arr = np.full((k, P), -1, dtype=np.int64)
    cdef double[:, :, ::1] a = work
    cdef double[::1] pd = pd_arr, invp = invp_arr, pinv = pinv_arr, f = f_arr
    cdef cnp.int64_t[::1] det = det_arr, ps = p_arr
    cdef cnp.int64_t[:, ::1] swaps = swaps_arr
    cdef cnp.uint8_t[::1] alive = alive_arr
    cdef Py_ssize_t b, c, r, j, piv
    cdef long long p
    cdef double tmp
    cdef bint any_swap = False
    with nogil:
        for c in range(k):
            for b in range(P):
                pinv[b] = 0.0
                if not alive[b]:
                    continue
                p = ps[b]
                if a[c, c, b] == 0:
                    piv = -1
                    for r in range(c + 1, k):
                        if a[r, c, b] != 0:
                            piv = r
                            break
                    if piv < 0:
                        alive[b] = 0
                        continue
                    for j in range(k):
                        tmp = a[c, j, b]; a[c, j, b] = a[piv, j, b]; a[piv, j, b] = tmp
                    swaps[c, b] = piv
                    any_swap = True
                    det[b] = (p - det[b]) % p
                det[b] = _mulmod(det[b], <long long>a[c, c, b], p, invp[b])
                pinv[b] = <double>_inv_mod(<long long>a[c, c, b], p)
                a[c, c, b] = 1.0
            for j in range(k):
                dynq_scale_mod(&a[c, j, 0], &pinv[0], &pd[0], &invp[0], P)
            for r in range(k):
                if r == c:
                    continue
                for b in range(P):
                    f[b] = a[r, c, b]
                    a[r, c, b] = 0.0
                for j in range(k):
                    dynq_axpy_mod(&a[r, j, 0], &a[c, j, 0], &f[0], &pd[0], &invp[0], P)
        if any_swap:
            for c in range(k - 1, -1, -1):
                for b in range(P):
                    piv = swaps[c, b]
                    if piv >= 0:
                        for r in range(k):
                            tmp = a[r, c, b]; a[r, c, b] = a[r, piv, b]; a[r, piv, b] = tmp
    inv_arr = np.ascontiguousarray(work.transpose(2, 0, 1)).astype(np.int64)
    dead = alive_arr == 0
    det_arr[dead] = 0
    inv_arr[dead] = 0
    return inv_arr, det_arr
