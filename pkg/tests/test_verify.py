import itertools

import numpy as np
import pytest

from navgraph import dataset, instances, navbuild, perm_index, verify
from navgraph.dataset import SearchGraph
from navgraph.verify import (
    Violation,
    check_cover,
    exact_min_neighborhood,
    greedy_route,
    verify_alpha,
    verify_navigable,
    verify_tau,
)

from conftest import brute_closer, random_matrix_oracle


def complete_graph(n):
    return SearchGraph.from_neighbor_lists(n, [[j for j in range(n) if j != i] for i in range(n)])


def empty_graph(n):
    return SearchGraph.from_neighbor_lists(n, [[] for _ in range(n)])


def test_complete_graph_is_navigable(line4):
    ps, oracle = line4
    assert verify_navigable(ps, oracle, complete_graph(4)) == []


def test_empty_graph_all_pairs_violated(line4):
    ps, oracle = line4
    violations = verify_navigable(ps, oracle, empty_graph(4))
    assert len(violations) == 12
    assert set(violations) == {
        Violation(i, j) for i in range(4) for j in range(4) if i != j
    }


def test_forward_line_violations(line4):
    ps, oracle = line4
    g = SearchGraph.from_neighbor_lists(4, [[1], [2], [3], []])
    violations = verify_navigable(ps, oracle, g)
    assert Violation(1, 0) in violations


def test_max_violations_cap(line4):
    ps, oracle = line4
    violations = verify_navigable(ps, oracle, empty_graph(4), max_violations=3)
    assert len(violations) == 3


def test_size_mismatch_rejected(line4):
    ps, oracle = line4
    with pytest.raises(ValueError):
        verify_navigable(ps, oracle, empty_graph(5))


def test_reported_violations_are_genuine():
    _, oracle = random_matrix_oracle(10, 3)
    rng = np.random.default_rng(4)
    g = SearchGraph.from_neighbor_lists(
        10, [rng.choice(10, size=2, replace=False).tolist() for _ in range(10)]
    )
    violations = verify_navigable(oracle.points, oracle, g)
    for v in violations:
        assert all(
            not brute_closer(oracle, v.target, int(k), v.source) for k in g.out[v.source]
        )


def test_alpha_one_equals_plain_verifier():
    for seed in range(4):
        _, oracle = random_matrix_oracle(12, seed)
        rng = np.random.default_rng(seed)
        g = SearchGraph.from_neighbor_lists(
            12, [rng.choice(12, size=4, replace=False).tolist() for _ in range(12)]
        )
        nav = verify_navigable(oracle.points, oracle, g)
        alp = verify_alpha(oracle.points, oracle, g, 1.0)
        tau = verify_tau(oracle.points, oracle, g, 0.0)
        assert set(nav) == set(alp) == set(tau)


def test_alpha_two_implies_navigable():
    ps = instances.gen_points("uniform", 32, dim=2, seed=5)
    oracle = dataset.DistanceOracle("euclidean", ps)
    g, _ = navbuild.build_alpha(ps, oracle, 2.0, seed=2)
    assert verify_alpha(ps, oracle, g, 2.0) == []
    assert verify_navigable(ps, oracle, g) == []


def test_complete_graph_passes_tau_any_margin(line4):
    ps, oracle = line4
    for tau in (0.0, 1.0, 100.0):
        assert verify_tau(ps, oracle, complete_graph(4), tau) == []


def test_verifier_rejects_bad_params(line4):
    ps, oracle = line4
    with pytest.raises(ValueError):
        verify_alpha(ps, oracle, complete_graph(4), 0.5)
    with pytest.raises(ValueError):
        verify_tau(ps, oracle, complete_graph(4), -0.5)


def test_route_trivial_cases(line4):
    ps, oracle = line4
    g = complete_graph(4)
    assert greedy_route(ps, oracle, g, 2, 2) == [2]
    assert greedy_route(ps, oracle, empty_graph(4), 1, 3) == [1]


def test_route_on_navigable_graph_reaches_query(line4):
    ps, oracle = line4
    g = navbuild.build_clique_baseline(ps, oracle)
    for start in range(4):
        for query in range(4):
            path = greedy_route(ps, oracle, g, start, query)
            assert path[0] == start and path[-1] == query
            assert len(path) <= 4


def test_route_distances_strictly_decrease():
    ps = instances.gen_points("uniform", 40, dim=2, seed=8)
    oracle = dataset.DistanceOracle("euclidean", ps)
    g, _ = navbuild.build_simple(ps, oracle, seed=3)
    rng = np.random.default_rng(0)
    for _ in range(40):
        start, query = rng.integers(40, size=2)
        path = greedy_route(ps, oracle, g, int(start), int(query))
        keys = [(oracle.distance(p, int(query)), p) for p in path]
        assert keys == sorted(keys, reverse=True)
        assert path[-1] == int(query)


def test_navigable_iff_routing_complete():
    # Cross-check the two definitions on small random graphs.
    for seed in range(12):
        _, oracle = random_matrix_oracle(8, seed + 50)
        rng = np.random.default_rng(seed)
        deg = int(rng.integers(1, 4))
        g = SearchGraph.from_neighbor_lists(
            8, [rng.choice(8, size=deg, replace=False).tolist() for _ in range(8)]
        )
        navigable = not verify_navigable(oracle.points, oracle, g)
        complete = all(
            greedy_route(oracle.points, oracle, g, s, q)[-1] == q
            for s in range(8)
            for q in range(8)
        )
        assert navigable == complete


def brute_min_neighborhood(oracle, i, n):
    """Exhaustive minimum over subsets, straight from distance comparisons."""
    others = [k for k in range(n) if k != i]
    for size in range(1, n):
        for combo in itertools.combinations(others, size):
            if all(
                any(brute_closer(oracle, j, k, i) for k in combo)
                for j in others
            ):
                return size
    raise AssertionError("uncoverable")


def test_exact_min_neighborhood_line():
    ps = instances.gen_points("line", 8)
    oracle = dataset.DistanceOracle("euclidean", ps)
    idx = perm_index.build_index(ps, oracle)
    opt0, wit0 = exact_min_neighborhood(idx, 0)
    assert opt0 == 1
    opt_mid, _ = exact_min_neighborhood(idx, 4)
    assert opt_mid == 2
    # the witness must itself be a navigable neighborhood
    view_ok = all(
        any(idx.rank[j, k] < idx.rank[j, 0] for k in wit0) for j in range(1, 8)
    )
    assert view_ok


def test_exact_min_neighborhood_matches_brute_force():
    for seed in range(6):
        _, oracle = random_matrix_oracle(7, seed + 9)
        idx = perm_index.build_index(oracle.points, oracle)
        for i in range(7):
            opt, _ = exact_min_neighborhood(idx, i)
            assert opt == brute_min_neighborhood(oracle, i, 7)


def test_exact_min_neighborhood_two_points():
    ps = dataset.PointSet(n=2, coords=np.array([[0.0], [1.0]]))
    oracle = dataset.DistanceOracle("euclidean", ps)
    idx = perm_index.build_index(ps, oracle)
    assert exact_min_neighborhood(idx, 0)[0] == 1


def test_exact_min_neighborhood_cap():
    ps = instances.gen_points("uniform", 20, dim=2, seed=1)
    oracle = dataset.DistanceOracle("euclidean", ps)
    idx = perm_index.build_index(ps, oracle)
    with pytest.raises(ValueError):
        exact_min_neighborhood(idx, 0)
    assert exact_min_neighborhood(idx, 0, cap=20)[0] >= 1


def test_check_cover():
    from navgraph.setcover import SetSystem, greedy_set_cover

    system = SetSystem(4, [[0, 1], [2], [3], [1, 2, 3]])
    assert check_cover(system, [0, 1, 2])
    assert check_cover(system, range(4))
    assert not check_cover(system, [])
    assert not check_cover(system, [3])
    assert check_cover(system, greedy_set_cover(system).chosen)
