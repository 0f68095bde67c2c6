import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from dynq import kernels
from dynq.oracles import det_cofactor, inverse_mod

BACKENDS = kernels.backends()
INF = kernels.INF


def test_selected_backend_is_known():
    assert kernels.BACKEND in BACKENDS


@pytest.mark.parametrize("name", sorted(BACKENDS))
def test_det_two_by_two(name):
    _, det = BACKENDS[name].gauss_jordan_mod(np.array([[[1, 2], [3, 4]]]), np.array([5]))
    assert int(det[0]) == 3


@pytest.mark.parametrize("name", sorted(BACKENDS))
def test_identity_inverse_and_singular(name):
    gj = BACKENDS[name].gauss_jordan_mod
    inv, det = gj(np.eye(3, dtype=np.int64)[None], np.array([97]))
    assert int(det[0]) == 1 and np.array_equal(inv[0], np.eye(3))
    inv, det = gj(np.array([[[1, 2], [2, 4]]]), np.array([7]))
    assert int(det[0]) == 0 and not inv.any()


@pytest.mark.parametrize("name", sorted(BACKENDS))
@given(st.integers(1, 6), st.sampled_from([2, 5, 97, 1048583]), st.randoms(use_true_random=False))
def test_gauss_jordan_matches_cofactor_oracle(name, k, p, rnd):
    M = [[rnd.randrange(p) for _ in range(k)] for _ in range(k)]
    inv, det = BACKENDS[name].gauss_jordan_mod(np.array([M]), np.array([p]))
    assert int(det[0]) == det_cofactor(M, p)
    want = inverse_mod(M, p)
    if want is None:
        assert not inv.any()
    else:
        assert inv[0].tolist() == want


def _random_table(rnd, n):
    D = np.full((n, n), INF, dtype=np.int32)
    for i in range(n):
        for j in range(n):
            if rnd.random() < 0.5:
                D[i, j] = rnd.randrange(0, 2 * n)
    np.fill_diagonal(D, 0)
    return D


@given(st.integers(1, 9), st.randoms(use_true_random=False))
def test_backends_agree_on_table_kernels(n, rnd):
    if len(BACKENDS) < 2:
        pytest.skip("compiled backend not built")
    D = _random_table(rnd, n)
    k = rnd.randrange(0, 2 * n)
    src = np.array([rnd.randrange(n) for _ in range(k)], dtype=np.int64)
    dst = np.array([rnd.randrange(n) for _ in range(k)], dtype=np.int64)
    outs = {}
    for name, mod in BACKENDS.items():
        out = D.copy()
        ch = mod.minplus_relax(D, src, dst, out)
        dropped = D.copy()
        mod.drop_through(D, src, dst, dropped)
        outs[name] = (bool(ch), out, dropped)
    a, b = outs["python"], outs["cython"]
    assert a[0] == b[0] and np.array_equal(a[1], b[1]) and np.array_equal(a[2], b[2])


@pytest.mark.parametrize("name", sorted(BACKENDS))
@given(st.integers(1, 4), st.integers(0, 40), st.randoms(use_true_random=False))
def test_reduce_mod_matches_integer_mod(name, P, size, rnd):
    primes = np.array([rnd.choice([2, 3, 97, 1048583, 2097143]) for _ in range(P)], dtype=np.int64)
    x = np.array([[rnd.randrange(-(1 << 51), 1 << 51) for _ in range(size)] for _ in range(P)], dtype=np.int64)
    got = BACKENDS[name].reduce_mod(x.astype(np.float64), primes)
    assert got.dtype == np.float64
    assert np.array_equal(got.astype(np.int64), x % primes[:, None])


@given(st.integers(1, 8), st.integers(1, 5), st.randoms(use_true_random=False))
def test_backends_agree_on_batched_elimination(k, P, rnd):
    if len(BACKENDS) < 2:
        pytest.skip("compiled backend not built")
    primes = np.array([rnd.choice([3, 5, 7, 1048583, 1048589]) for _ in range(P)], dtype=np.int64)
    A = np.array([[[rnd.randrange(p) for _ in range(k)] for _ in range(k)] for p in primes], dtype=np.int64)
    ia, da = BACKENDS["python"].gauss_jordan_mod(A, primes)
    ib, db = BACKENDS["cython"].gauss_jordan_mod(A, primes)
    assert np.array_equal(da, db) and np.array_equal(ia, ib)


def test_minplus_relax_reads_only_the_input_table():
    # path 0-1-2 with only (1,2) new: one relaxation cannot chain through out
    n = 3
    D = np.full((n, n), INF, dtype=np.int32)
    np.fill_diagonal(D, 0)
    for name, mod in BACKENDS.items():
        out = D.copy()
        mod.minplus_relax(D, np.array([0, 1]), np.array([1, 2]), out)
        assert out[0, 1] == 1 and out[1, 2] == 1 and out[0, 2] == INF, name
