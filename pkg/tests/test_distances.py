import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from dynq.core import RoundMeter, log2_bound
from dynq.distances import INF, DistanceMaintainer, _pairs, _relax_round, empty_table, insert_rounds, safe_init
from dynq.errors import AlreadyPresentOnInsert, NotPresentOnDelete, StructureViolation
from dynq.oracles import bfs_all_pairs, dfs_reach_all
from helpers import random_graph


def _dm(n, edges, kind="undirected"):
    dm = DistanceMaintainer(n, kind)
    if edges:
        dm.insert(edges, RoundMeter())
    return dm


def test_fresh_path_distance_appears_in_round_two():
    m = RoundMeter()
    table = insert_rounds(empty_table(3), {(0, 1), (1, 2)}, m)
    assert table[0, 2] == 2 and m.rounds_used == 2 and m.bound == 2
    # after a single round only the inserted edges themselves are known
    src, dst = _pairs({(0, 1), (1, 2)}, False)
    first = _relax_round(src, dst)(empty_table(3))
    assert first[0, 1] == 1 and first[0, 2] == INF


def test_empty_insert_is_one_round_and_no_change():
    dm = _dm(4, [(0, 1)])
    before = dm.table.copy()
    m = RoundMeter()
    dm.insert([], m)
    assert m.rounds_used == 1 and np.array_equal(dm.table, before)


def test_safe_init_triangle():
    dm = _dm(3, [(0, 1), (1, 2), (0, 2)])
    kept = safe_init(dm.table, {(1, 2)})
    assert kept[0, 1] == 1 and kept[0, 2] == 1
    assert kept[1, 2] == INF and kept[2, 1] == INF


def test_safe_init_empty_delta_keeps_everything():
    dm = _dm(4, [(0, 1), (1, 2)])
    assert np.array_equal(safe_init(dm.table, set()), dm.table)


def test_safe_init_dag_path_keeps_pairs_on_one_side():
    dm = _dm(4, [(0, 1), (1, 2), (2, 3)], "dag")
    kept = safe_init(dm.table, {(1, 2)}, directed=True)
    finite = {(u, v) for u, v in itertools.product(range(4), repeat=2) if kept[u, v] < INF}
    assert finite == {(u, v) for u, v in itertools.product(range(4), repeat=2)
                      if u == v or (u < v and (v <= 1 or u >= 2))}


def test_four_cycle_delete():
    dm = _dm(4, [(0, 1), (1, 2), (2, 3), (0, 3)])
    assert dm.dist(0, 2) == 2
    m = RoundMeter()
    dm.delete([(0, 1)], m)
    assert dm.dist(0, 2) == 2 and dm.dist(0, 1) == 3 and dm.dist(1, 3) == 2
    assert m.rounds_used <= log2_bound(1)


def test_disconnecting_delete_gives_infinity():
    dm = _dm(3, [(0, 1), (1, 2)])
    dm.delete([(1, 2)], RoundMeter())
    assert dm.dist(0, 2) is None and not dm.reach(0, 2) and dm.reach(2, 2)


def test_errors():
    dm = _dm(3, [(0, 1)], "dag")
    with pytest.raises(AlreadyPresentOnInsert):
        dm.insert([(0, 1)], RoundMeter())
    with pytest.raises(NotPresentOnDelete):
        dm.delete([(1, 2)], RoundMeter())
    with pytest.raises(StructureViolation):
        dm.insert([(1, 2), (2, 0)], RoundMeter())


def test_random_64_node_examples():
    import random

    rnd = random.Random(5)
    dm = _dm(64, random_graph(rnd, 64, 0.03))
    new = [e for e in random_graph(rnd, 64, 0.01) if e not in dm.edges][:9]
    dm.insert(new, RoundMeter())
    assert np.array_equal(dm.table, bfs_all_pairs(64, sorted(dm.edges)))

    dag = _dm(64, random_graph(rnd, 64, 0.06, directed=True, acyclic=True), "dag")
    m = RoundMeter()
    dag.delete(rnd.sample(sorted(dag.edges), 9), m)
    assert np.array_equal(dag.table, bfs_all_pairs(64, sorted(dag.edges), directed=True))
    assert m.rounds_used <= 4


@st.composite
def scripts(draw):
    n = draw(st.integers(2, 20))
    directed = draw(st.booleans())
    rnd = draw(st.randoms(use_true_random=False))
    steps = []
    edges = set()
    for _ in range(draw(st.integers(1, 8))):
        if edges and rnd.random() < 0.4:
            d = set(rnd.sample(sorted(edges), rnd.randint(1, len(edges))))
            edges -= d
            steps.append(("delete", d))
        else:
            pool = [e for e in random_graph(rnd, n, 0.2, directed=directed, acyclic=directed) if e not in edges]
            ins = set(pool[: rnd.randint(1, 12)])
            edges |= ins
            steps.append(("insert", ins))
    return n, directed, steps


@given(scripts())
def test_table_equals_bfs_and_rounds_within_bound(s):
    n, directed, steps = s
    dm = DistanceMaintainer(n, "dag" if directed else "undirected")
    for op, es in steps:
        before = dm.table.copy()
        m = RoundMeter()
        getattr(dm, op)(es, m)
        assert m.rounds_used <= log2_bound(len(es))
        assert np.array_equal(dm.table, bfs_all_pairs(n, sorted(dm.edges), directed))
        both = list(dm.edges) if directed else list(dm.edges) + [(v, u) for u, v in dm.edges]
        reach = dfs_reach_all(n, both)
        assert np.array_equal(dm.table < INF, reach)
        if op == "insert":
            assert (dm.table <= before).all()  # monotone
        # invariants of the relation
        assert (np.diag(dm.table) == 0).all()
        if not directed:
            assert np.array_equal(dm.table, dm.table.T)


@given(scripts())
def test_rounds_only_lower_entries(s):
    n, directed, steps = s
    dm = DistanceMaintainer(n, "dag" if directed else "undirected")
    for op, es in steps:
        getattr(dm, op)(es, RoundMeter())
    src, dst = _pairs(dm.edges, directed)
    step = _relax_round(src, dst)
    t = dm.table.copy()
    t[t < INF] += 1  # perturb upward; one round must not raise anything
    np.fill_diagonal(t, 0)
    assert (step(t) <= t).all()
