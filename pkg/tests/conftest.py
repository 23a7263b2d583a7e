import numpy as np
import pytest

from navgraph import dataset, instances, perm_index


@pytest.fixture
def line4():
    """The 4-point line at positions 0, 1, 3, 7 with euclidean distances."""
    ps = instances.gen_points("line", 4)
    oracle = dataset.DistanceOracle("euclidean", ps)
    return ps, oracle


@pytest.fixture
def line4_index(line4):
    ps, oracle = line4
    return ps, oracle, perm_index.build_index(ps, oracle)


def brute_closer(oracle, q, a, b):
    """Tie-broken comparison straight from the definition."""
    return (oracle.distance(q, a), a) < (oracle.distance(q, b), b)


def brute_member(oracle, i, j, k):
    """p_j in S_{i->k}: stepping to k strictly improves on target j."""
    return brute_closer(oracle, j, k, i)


def brute_navigable(oracle, g):
    """Triple-loop navigability check, no index involved."""
    n = g.n
    for i in range(n):
        out = set(int(x) for x in g.out[i])
        for j in range(n):
            if j == i:
                continue
            if not any(brute_closer(oracle, j, k, i) for k in out):
                return False
    return True


def random_matrix_oracle(n, seed):
    """Random symmetric explicit-matrix oracle."""
    rng = np.random.default_rng(seed)
    m = rng.uniform(1.0, 10.0, size=(n, n))
    m = (m + m.T) / 2.0
    np.fill_diagonal(m, 0.0)
    ps = dataset.PointSet(n=n)
    return ps, dataset.DistanceOracle("explicit-matrix", ps, matrix=m)
