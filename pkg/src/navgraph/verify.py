"""Exact verifiers, routing simulation, and the exhaustive neighborhood oracle.

Everything here is ground truth: the verifiers check every ordered pair
directly, the router replays greedy search step by step, and the oracle
enumerates neighbor subsets.  Builders are validated against these, never the
other way around.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import numpy as np

from navgraph.dataset import DistanceOracle, PointSet, SearchGraph
from navgraph.perm_index import PermutationIndex, build_index


@dataclass(frozen=True)
class Violation:
    """An ordered pair (source, target) with no improving out-neighbor."""

    source: int
    target: int


def _require_match(ps: PointSet, g: SearchGraph) -> None:
    if g.n != ps.n:
        raise ValueError(f"graph has {g.n} nodes but point set has {ps.n}")


def verify_navigable(
    ps: PointSet,
    oracle: DistanceOracle,
    g: SearchGraph,
    idx: PermutationIndex | None = None,
    max_violations: int | None = None,
) -> list[Violation]:
    """All pairs (i, j) where no out-neighbor of i is strictly closer to j.

    Empty result means the graph is navigable.  O(n^2 * avg_degree),
    exhaustive and deterministic.
    """
    _require_match(ps, g)
    if idx is None:
        idx = build_index(ps, oracle)
    rank = idx.rank
    n = ps.n
    violations: list[Violation] = []
    for i in range(n):
        out_i = g.out[i]
        if out_i.size:
            sat = (rank[:, out_i] < rank[:, [i]]).any(axis=1)
        else:
            sat = np.zeros(n, dtype=bool)
        sat[i] = True
        if sat.all():
            continue
        for j in np.flatnonzero(~sat):
            violations.append(Violation(i, int(j)))
            if max_violations is not None and len(violations) >= max_violations:
                return violations
    return violations


def _verify_scaled(
    ps: PointSet,
    oracle: DistanceOracle,
    g: SearchGraph,
    mode: str,
    value: float,
    idx: PermutationIndex | None,
    max_violations: int | None,
) -> list[Violation]:
    _require_match(ps, g)
    if idx is None:
        idx = build_index(ps, oracle)
    n = ps.n
    rows = np.arange(n)
    violations: list[Violation] = []
    for i in range(n):
        out_i = g.out[i]
        d_i = idx.dsorted[rows, idx.rank[:, i]]
        thr = d_i / value if mode == "alpha" else d_i - value
        sat = np.zeros(n, dtype=bool)
        for k in out_i:
            k = int(k)
            d_k = idx.dsorted[rows, idx.rank[:, k]]
            sat |= (d_k < thr) | ((d_k == thr) & (k < i))
        if mode == "tau" and out_i.size:
            sat[out_i] = True  # direct edges are exempt from the margin
        sat[i] = True
        for j in np.flatnonzero(~sat):
            violations.append(Violation(i, int(j)))
            if max_violations is not None and len(violations) >= max_violations:
                return violations
    return violations


def verify_alpha(
    ps: PointSet,
    oracle: DistanceOracle,
    g: SearchGraph,
    alpha: float,
    idx: PermutationIndex | None = None,
    max_violations: int | None = None,
) -> list[Violation]:
    """Check the multiplicative strengthening: some out-neighbor of i must be
    within a 1/alpha factor of i's distance, for every target."""
    if alpha < 1.0:
        raise ValueError(f"alpha must be >= 1, got {alpha}")
    return _verify_scaled(ps, oracle, g, "alpha", alpha, idx, max_violations)


def verify_tau(
    ps: PointSet,
    oracle: DistanceOracle,
    g: SearchGraph,
    tau: float,
    idx: PermutationIndex | None = None,
    max_violations: int | None = None,
) -> list[Violation]:
    """Check the additive strengthening: improvement by at least tau, with
    directly connected targets exempt."""
    if tau < 0.0:
        raise ValueError(f"tau must be >= 0, got {tau}")
    return _verify_scaled(ps, oracle, g, "tau", tau, idx, max_violations)


def _dists_to(oracle: DistanceOracle, ids: np.ndarray, q: int) -> np.ndarray:
    if oracle.kind == "explicit-matrix":
        return oracle.matrix[ids, q].astype(np.float64)
    coords = oracle.points.coords
    diff = coords[ids] - coords[q]
    if oracle.kind == "manhattan":
        return np.abs(diff).sum(axis=1)
    if coords.shape[1] == 1:
        d = np.abs(diff[:, 0])
        return d * d if oracle.kind == "squared-euclidean" else d
    sq = (diff * diff).sum(axis=1)
    return sq if oracle.kind == "squared-euclidean" else np.sqrt(sq)


def greedy_route(
    ps: PointSet, oracle: DistanceOracle, g: SearchGraph, start: int, query: int
) -> list[int]:
    """Walk the graph greedily toward ``query``; the returned path ends at the
    local minimum.  Each hop strictly decreases the tie-broken distance, so at
    most n steps happen."""
    _require_match(ps, g)
    n = ps.n
    if not (0 <= start < n and 0 <= query < n):
        raise IndexError("start/query out of range")
    path = [start]
    cur = start
    d_cur = oracle.distance(cur, query)
    while cur != query:
        out = g.out[cur]
        if out.size == 0:
            break
        d_out = _dists_to(oracle, out, query)
        best_pos = int(np.lexsort((out, d_out))[0])
        k = int(out[best_pos])
        d_k = float(d_out[best_pos])
        if (d_k, k) >= (d_cur, cur):
            break
        path.append(k)
        cur, d_cur = k, d_k
    return path


def exact_min_neighborhood(
    idx: PermutationIndex, i: int, cap: int = 16
) -> tuple[int, list[int]]:
    """Minimum out-neighborhood size for node ``i`` plus one witness.

    Exhaustive subset search in increasing size order over coverage bitmasks;
    guarded by ``cap`` because the cost is exponential.  Test oracle only.
    """
    n = idx.n
    if n > cap:
        raise ValueError(f"exact oracle refuses n={n} > cap={cap}")
    if n == 1:
        return 0, []
    elements = [j for j in range(n) if j != i]
    bit = {j: 1 << t for t, j in enumerate(elements)}
    full = (1 << len(elements)) - 1
    masks = {}
    for k in elements:
        m = 0
        for j in elements:
            if idx.rank[j, k] < idx.rank[j, i]:
                m |= bit[j]
        masks[k] = m
    candidates = [k for k in elements if masks[k]]
    for size in range(1, len(candidates) + 1):
        for combo in combinations(candidates, size):
            acc = 0
            for k in combo:
                acc |= masks[k]
            if acc == full:
                return size, list(combo)
    raise AssertionError("instance is uncoverable; self-sets make this impossible")


def check_cover(access, chosen) -> bool:
    """True iff the chosen sets cover every element of the instance."""
    covered = np.zeros(access.n_elements, dtype=bool)
    for s in chosen:
        covered[access.elements_of(int(s))] = True
    return bool(covered.all())
