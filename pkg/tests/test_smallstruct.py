import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dynq.core import RoundMeter
from dynq.errors import DegreeBoundViolated, DuplicateEdge, NotAProperColoring, UnknownEdgeOnDelete
from dynq.oracles import check_coloring, check_matching_maximal, is_maximal_independent, kruskal
from dynq.smallstruct import (
    ColoringMaintainer,
    MatchingMaintainer,
    MsfMaintainer,
    greedy_coloring,
    mis_from_coloring,
)


def _adj(n, edges):
    adj = [set() for _ in range(n)]
    for u, v in edges:
        adj[u].add(v)
        adj[v].add(u)
    return adj


# ---------------------------------------------------------------- MSF


def test_msf_triangle_and_delete():
    m = MsfMaintainer(3)
    m.update(inserted=[(0, 1, 1), (1, 2, 2), (0, 2, 3)])
    assert m.msf == {(0, 1, 1), (1, 2, 2)}
    m.update(deleted=[(0, 1, 1)])
    assert m.msf == {(1, 2, 2), (0, 2, 3)}
    assert [e[2] for e in m.L] == [2, 3]


def test_msf_errors():
    m = MsfMaintainer(3)
    m.update(inserted=[(0, 1, 1)])
    with pytest.raises(DuplicateEdge):
        m.update(inserted=[(1, 0, 5)])
    with pytest.raises(UnknownEdgeOnDelete):
        m.update(deleted=[(0, 1, 2)])


def test_msf_forest_input_keeps_all_edges():
    m = MsfMaintainer(5)
    m.update(inserted=[(0, 1, 7), (1, 2, 7), (3, 4, 0)])
    assert m.msf == m.edges


def test_msf_random_64_nodes():
    rnd = random.Random(5)
    m = MsfMaintainer(64)
    present = {}
    for _ in range(100):
        if present and rnd.random() < 0.4:
            dele = rnd.sample(sorted(present.items()), min(len(present), rnd.randint(1, 9)))
            m.update(deleted=[(u, v, w) for (u, v), w in dele])
            for (u, v), _ in dele:
                del present[(u, v)]
        else:
            ins = {}
            while len(ins) < rnd.randint(1, 9):
                u, v = sorted(rnd.sample(range(64), 2))
                if (u, v) not in present:
                    ins[(u, v)] = rnd.randint(0, 20)
            m.update(inserted=[(u, v, w) for (u, v), w in ins.items()])
            present.update(ins)
        edges = [(u, v, w) for (u, v), w in present.items()]
        assert m.msf == kruskal(64, edges)
        assert m.L == sorted(edges, key=lambda e: (e[2], e[0], e[1]))
        # offset computation looks only at the changed set for each edge
        assert m._probes <= (len(present) + 9) * 9 + 9 * 10


# ---------------------------------------------------------------- matching


def test_matching_path_greedy():
    m = MatchingMaintainer(3)
    m.insert([(0, 1), (1, 2)], RoundMeter())
    assert m.M == {(0, 1)} and m.is_maximal()


def test_matching_edge_between_matched_nodes():
    m = MatchingMaintainer(4)
    m.insert([(0, 1), (2, 3)], RoundMeter())
    m.insert([(1, 2)], RoundMeter())
    assert m.M == {(0, 1), (2, 3)}


def test_matching_triangle_repair():
    m = MatchingMaintainer(3)
    m.insert([(0, 1), (1, 2), (0, 2)], RoundMeter())
    (e,) = m.M
    m.delete([e], RoundMeter())
    assert len(m.M) == 1 and m.is_maximal()


def test_matching_delete_unmatched_keeps_m():
    m = MatchingMaintainer(3)
    m.insert([(0, 1), (1, 2)], RoundMeter())
    m.delete([(1, 2)], RoundMeter())
    assert m.M == {(0, 1)}


def test_matching_star_of_paths():
    # centre 0 with k spokes 0-a-b; repeatedly delete the matched spokes
    k = 20
    n = 1 + 2 * k
    m = MatchingMaintainer(n)
    spokes = [(0, 1 + 2 * i) for i in range(k)]
    tails = [(1 + 2 * i, 2 + 2 * i) for i in range(k)]
    m.insert(spokes, RoundMeter())
    m.insert(tails, RoundMeter())
    for _ in range(k):
        hit = [e for e in m.M if 0 in e]
        if not hit:
            break
        m.delete(hit, RoundMeter())
        assert check_matching_maximal(sorted(m.edges), m.M)
    m.delete(sorted(m.M), RoundMeter())
    assert check_matching_maximal(sorted(m.edges), m.M)


@settings(max_examples=30)
@given(st.randoms(use_true_random=False), st.integers(2, 24))
def test_matching_random_scripts(rnd, n):
    m = MatchingMaintainer(n)
    for _ in range(12):
        if m.edges and rnd.random() < 0.5:
            m.delete(rnd.sample(sorted(m.edges), rnd.randint(1, len(m.edges))), RoundMeter())
        else:
            cand = {tuple(sorted(rnd.sample(range(n), 2))) for _ in range(rnd.randint(1, 6))} - m.edges
            m.insert(cand, RoundMeter())
        assert check_matching_maximal(sorted(m.edges), m.M)


# ---------------------------------------------------------------- colouring


def test_mis_triangle_single_iteration():
    stats = []
    indep = mis_from_coloring(_adj(3, [(0, 1), (1, 2), (0, 2)]), {0, 1, 2}, [{0}, {1}, {2}], stats)
    assert indep == {0}
    assert stats == [("alg1", 1, 3)]


def test_mis_edgeless():
    assert mis_from_coloring(_adj(4, []), range(4), [{0, 2}, {1}, {3}]) == {0, 1, 2, 3}


def test_mis_rejects_improper_classes():
    with pytest.raises(NotAProperColoring):
        mis_from_coloring(_adj(2, [(0, 1)]), {0, 1}, [{0, 1}])


@settings(max_examples=40)
@given(st.randoms(use_true_random=False), st.integers(1, 30))
def test_mis_random_delta4(rnd, n):
    edges = set()
    deg = [0] * n
    for _ in range(3 * n):
        u, v = rnd.randrange(n), rnd.randrange(n)
        if u != v and deg[u] < 4 and deg[v] < 4 and (min(u, v), max(u, v)) not in edges:
            edges.add((min(u, v), max(u, v)))
            deg[u] += 1
            deg[v] += 1
    adj = _adj(n, edges)
    col = greedy_coloring(adj, range(n))
    classes = [{v for v in col if col[v] == c} for c in range(max(col.values()) + 1)]
    stats = []
    indep = mis_from_coloring(adj, range(n), classes, stats)
    assert is_maximal_independent(n, sorted(edges), indep)
    assert stats[0][1] <= len(classes)


def test_coloring_triangle_delta2():
    c = ColoringMaintainer(3, 2)
    c.update(inserted=[(0, 1), (1, 2), (0, 2)])
    assert sorted(c.col.values()) == [1, 2, 3]


def test_coloring_empty_change():
    c = ColoringMaintainer(3, 2)
    c.update(inserted=[(0, 1)])
    before = dict(c.col)
    c.update()
    assert c.col == before


def test_coloring_degree_bound():
    c = ColoringMaintainer(4, 2)
    with pytest.raises(DegreeBoundViolated):
        c.update(inserted=[(0, 1), (0, 2), (0, 3)])


def test_coloring_random_delta4():
    rnd = random.Random(3)
    n = 128
    c = ColoringMaintainer(n, 4)
    for _ in range(60):
        if c.edges and rnd.random() < 0.3:
            c.update(deleted=rnd.sample(sorted(c.edges), min(len(c.edges), rnd.randint(1, 10))))
        else:
            deg = [len(a) for a in c.adj]
            ins = set()
            for _ in range(10):
                u, v = sorted(rnd.sample(range(n), 2))
                if (u, v) not in c.edges and (u, v) not in ins and deg[u] < 4 and deg[v] < 4:
                    ins.add((u, v))
                    deg[u] += 1
                    deg[v] += 1
            c.update(inserted=ins)
        assert check_coloring(sorted(c.edges), c.col, set(range(1, 6)))
    for tag, iters, cap in c.stats:
        assert iters <= cap
        if tag == "alg2":
            assert cap == 5
