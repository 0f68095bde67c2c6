import random

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from dynq.core import RoundMeter
from dynq.errors import AlreadyPresentOnInsert, NotPresentOnDelete, TooFewActivePrimes
from dynq.oracles import det_cofactor, dfs_reach_all, inverse_mod, warshall_closure
from dynq.reach import LowRankFactor, PrimeBasis, ReachMaintainer, det_small, primes_above


def test_det_small_examples():
    assert det_small([[1, 2], [3, 4]], 5) == 3
    assert det_small(np.eye(3, dtype=int), 11) == 1
    assert det_small(np.zeros((0, 0)), 7) == 1
    m = RoundMeter()
    det_small([[2]], 5, m)
    assert m.block_events == [("small-det", 1)]


def test_det_small_random_against_cofactor():
    rnd = random.Random(1)
    for _ in range(50):
        M = [[rnd.randrange(97) for _ in range(6)] for _ in range(6)]
        assert det_small(M, 97) == det_cofactor(M, 97)


def test_two_node_insert_mod_5():
    rm = ReachMaintainer(2, PrimeBasis([5], 0))
    rm.update(inserted=[(0, 1)])
    assert rm.minv[0].astype(int).tolist() == [[2, 4], [0, 2]]
    assert int(rm.det[0]) == 9 % 5
    assert rm.minv[0].astype(int).tolist() == inverse_mod([[3, -1], [0, 3]], 5)


def test_empty_batch_leaves_inverses_unchanged():
    rm = ReachMaintainer(5)
    rm.update(inserted=[(0, 1), (1, 2)])
    before = rm.minv.copy()
    rm.update()
    assert np.array_equal(before, rm.minv)


def test_rank_one_update_formula():
    # (I + e_i e_j^T)^{-1} = I - e_i e_j^T for i != j, checked through the factor
    f = LowRankFactor.from_edges(4, inserted=[(1, 3)])
    assert f.k == 1 and np.array_equal(f.dense(4), -np.eye(4, dtype=int)[:, [1]] @ np.eye(4, dtype=int)[[3]])
    E = np.eye(4, dtype=int)
    A = E + E[:, [1]] @ E[[3]]
    assert np.array_equal(A @ (E - E[:, [1]] @ E[[3]]), E)


def test_factor_matches_change_and_rows_are_sources():
    f = LowRankFactor.from_edges(5, inserted=[(0, 1), (0, 2), (3, 4)], deleted=[(3, 0)])
    delta = np.zeros((5, 5), dtype=int)
    for u, v in [(0, 1), (0, 2), (3, 4)]:
        delta[u, v] -= 1
    delta[3, 0] += 1
    assert np.array_equal(f.dense(5), delta) and f.k == 2


def test_self_reach_and_empty_graph():
    rm = ReachMaintainer(4)
    assert all(rm.reach(s, s) for s in range(4))
    assert not any(rm.reach(s, t) for s in range(4) for t in range(4) if s != t)


def test_errors():
    rm = ReachMaintainer(3)
    rm.update(inserted=[(0, 1)])
    with pytest.raises(AlreadyPresentOnInsert):
        rm.update(inserted=[(0, 1)])
    with pytest.raises(NotPresentOnDelete):
        rm.update(deleted=[(1, 2)])


def test_basis_sized_above_cofactor_bound():
    b = PrimeBasis.for_domain(64)
    assert len(set(b.primes.tolist())) == len(b.primes)
    assert all(p > 2**20 for p in b.primes)
    assert b.satisfied()
    assert primes_above(10, 3) == [11, 13, 17]


def test_prime_dividing_the_matrix_stays_inactive():
    # det(3I) = 9 vanishes mod 3, so that prime is never usable for n = 2
    rm = ReachMaintainer(2, PrimeBasis([3, 5, 7], 0))
    assert not rm.basis.active[0] and rm.basis.active[1:].all()
    rm.update(inserted=[(0, 1)])
    rm.reactivate_prime(0)
    assert not rm.basis.active[0]
    assert rm.inverses_consistent() and rm.reach(0, 1) and not rm.reach(1, 0)


def test_singular_woodbury_step_deactivates_prime():
    # n = 2, both edges 0<->1: det(M) goes from 9 to 8, so S is singular mod 2
    rm = ReachMaintainer(2, PrimeBasis([2, 5], 0))
    assert rm.basis.active.all()
    m = RoundMeter()
    rm.update(inserted=[(0, 1), (1, 0)], meter=m)
    assert not rm.basis.active[0] and rm.basis.active[1]
    assert ("penalty:deactivate", 1) in m.block_events
    rm.reactivate_prime(0)
    assert not rm.basis.active[0]  # det 8 is still 0 mod 2
    rm.update(deleted=[(1, 0)], meter=m)
    rm.reactivate_prime(0)  # det 9 is 1 mod 2
    assert rm.basis.active.all() and rm.inverses_consistent()
    assert rm.reach(0, 1) and not rm.reach(1, 0)


def test_forced_deactivation_then_full_reactivation():
    rnd = random.Random(3)
    n = 10
    rm = ReachMaintainer(n)
    edges = set()
    for _ in range(50):
        ins = {(rnd.randrange(n), rnd.randrange(n)) for _ in range(3)} - edges
        rm.update(inserted=ins)
        edges |= ins
        rm.basis.active[rnd.randrange(len(rm.basis.primes))] = False
    rm.basis.active[:] = False
    with pytest.raises(TooFewActivePrimes):
        rm.basis.cofactor_bit_bound = 10**9
        rm.ensure_basis()
    rm.basis.cofactor_bit_bound = PrimeBasis.for_domain(n).cofactor_bit_bound
    rm.basis.active[:] = False
    rm.ensure_basis()
    M = rm.matrix()
    for i, p in enumerate(rm.basis.primes[:4]):
        assert rm.minv[i].astype(int).tolist() == inverse_mod(M.tolist(), int(p))
    assert np.array_equal(rm.reach_matrix(), warshall_closure(n, sorted(edges)))


@st.composite
def digraph_script(draw):
    n = draw(st.integers(1, 12))
    rnd = draw(st.randoms(use_true_random=False))
    return n, rnd, draw(st.integers(1, 12))


@given(digraph_script())
def test_reach_matches_dfs_and_inverse_is_exact(s):
    n, rnd, steps = s
    rm = ReachMaintainer(n)
    edges = set()
    for _ in range(steps):
        all_pairs = [(u, v) for u in range(n) for v in range(n)]
        k = rnd.randint(1, 8)
        if edges and rnd.random() < 0.4:
            dele = set(rnd.sample(sorted(edges), min(k, len(edges))))
            ins = set()
        else:
            dele = set()
            ins = set(rnd.sample(all_pairs, min(k, len(all_pairs)))) - edges
        rm.update(inserted=ins, deleted=dele)
        edges = (edges | ins) - dele
        rm.ensure_basis()
        assert np.array_equal(rm.reach_matrix(), dfs_reach_all(n, sorted(edges)))
        assert all(rm.reach(s, t) == bool(dfs_reach_all(n, sorted(edges))[s, t]) for s in range(n) for t in range(n))
        assert rm.inverses_consistent()
        # det multiplicativity: maintained det equals det of the rebuilt matrix
        if n <= 6:
            M = rm.matrix().tolist()
            for i in np.flatnonzero(rm.basis.active)[:2]:
                p = int(rm.basis.primes[i])
                assert int(rm.det[i]) == det_cofactor(M, p)
