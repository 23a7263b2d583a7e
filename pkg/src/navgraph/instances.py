"""Synthetic point sets, planted set-cover instances, and covering point sets.

The covering point sets translate a set-cover instance into geometry: element
points, set points, a centroid, and ``s`` solution points, arranged so that a
solution point's minimum navigable neighborhood has size exactly OPT + 1.
They come in a general-metric flavor (explicit distance table with values in
{1, 1.5, 2}) and a Euclidean flavor (coordinates over standard basis vectors).

Solution points occupy the lowest ids on purpose: index tie-breaking then
resolves every tied comparison against them, which preserves the raw-distance
semantics their neighborhood-size property depends on.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from navgraph.dataset import DistanceOracle, PointSet
from navgraph.setcover import SetSystem

POINT_KINDS = ("line", "grid", "uniform", "gaussian-clusters")

# 2^i - 1 positions stay finite in float64 only this far.
LINE_MAX_N = 1024


def gen_points(kind: str, n: int, dim: int = 2, seed: int = 0, clusters: int = 4) -> PointSet:
    """Deterministic synthetic point sets.

    ``line`` ignores ``dim`` and places points at 0, 1, 3, 7, ...: the gaps
    double, so no two pairwise distances from a fixed point collide.
    """
    if n < 1:
        raise ValueError(f"need n >= 1, got {n}")
    if dim < 1:
        raise ValueError(f"need dim >= 1, got {dim}")
    if kind == "line":
        if n > LINE_MAX_N:
            raise ValueError(f"line supports n <= {LINE_MAX_N} (float64 range)")
        pos = np.power(2.0, np.arange(n, dtype=np.float64)) - 1.0
        return PointSet(n=n, coords=pos.reshape(n, 1))
    if kind == "grid":
        side = math.isqrt(n)
        if side * side < n:
            side += 1
        xs, ys = np.divmod(np.arange(n), side)
        coords = np.stack([xs, ys], axis=1).astype(np.float64)
        if dim > 2:
            coords = np.hstack([coords, np.zeros((n, dim - 2))])
        return PointSet(n=n, coords=coords)
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    if kind == "uniform":
        return PointSet(n=n, coords=rng.uniform(0.0, 1.0, size=(n, dim)))
    if kind == "gaussian-clusters":
        centers = rng.uniform(0.0, 10.0, size=(clusters, dim))
        assign = rng.integers(clusters, size=n)
        coords = centers[assign] + rng.normal(0.0, 0.25, size=(n, dim))
        return PointSet(n=n, coords=coords)
    raise ValueError(f"unknown point kind {kind!r}")


def gen_planted_cover(n_elements: int, k_opt: int, m_sets: int, seed: int = 0) -> SetSystem:
    """Set-cover instance with known optimum ``k_opt``.

    ``k_opt`` disjoint sets partition the universe; the remaining sets are
    proper subsets of single planted sets, so every cover needs one set per
    planted block and the planted sets themselves achieve it.
    """
    if k_opt < 1 or m_sets < k_opt:
        raise ValueError("need 1 <= k_opt <= m_sets")
    if n_elements % k_opt != 0:
        raise ValueError(f"k_opt={k_opt} must divide n_elements={n_elements}")
    block = n_elements // k_opt
    if m_sets > k_opt and block < 2:
        raise ValueError("decoy sets need planted blocks of size >= 2")
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    perm = rng.permutation(n_elements)
    planted = [perm[b * block : (b + 1) * block] for b in range(k_opt)]
    sets = [p.tolist() for p in planted]
    for _ in range(m_sets - k_opt):
        host = planted[int(rng.integers(k_opt))]
        size = int(rng.integers(1, block))
        sets.append(rng.choice(host, size=size, replace=False).tolist())
    return SetSystem(n_elements, sets)


@dataclass(frozen=True)
class CoveringLayout:
    """Point-id ranges of a covering point set (solutions first, centroid last)."""

    solution_ids: np.ndarray
    element_ids: np.ndarray
    set_ids: np.ndarray
    centroid_id: int

    @property
    def n_points(self) -> int:
        return self.centroid_id + 1


def _layout(system: SetSystem, s: int) -> CoveringLayout:
    if s < 1:
        raise ValueError(f"need at least one solution point, got {s}")
    n, m = system.n_elements, system.m_sets
    return CoveringLayout(
        solution_ids=np.arange(0, s),
        element_ids=np.arange(s, s + n),
        set_ids=np.arange(s + n, s + n + m),
        centroid_id=s + n + m,
    )


def gen_covering_general(
    system: SetSystem, s: int, seed: int = 0
) -> tuple[PointSet, DistanceOracle, CoveringLayout]:
    """General-metric covering point set as an explicit distance table.

    Distances: element-set 1 when the element belongs to the set; set-set 1;
    solution-solution 1.5; solution-centroid 1; everything else 2.
    """
    lay = _layout(system, s)
    total = lay.n_points
    M = np.full((total, total), 2.0)
    sol, elem, sets, c = lay.solution_ids, lay.element_ids, lay.set_ids, lay.centroid_id
    M[np.ix_(sets, sets)] = 1.0
    M[np.ix_(sol, sol)] = 1.5
    M[sol, c] = 1.0
    M[c, sol] = 1.0
    for j in range(system.m_sets):
        members = elem[system.elements_of(j)]
        M[members, sets[j]] = 1.0
        M[sets[j], members] = 1.0
    np.fill_diagonal(M, 0.0)
    ps = PointSet(n=total)
    oracle = DistanceOracle("explicit-matrix", ps, matrix=M)
    return ps, oracle, lay


EUCLIDEAN_COORD_LIMIT = 1 << 26  # refuse dense layouts beyond this many floats


def gen_covering_euclidean(
    system: SetSystem, s: int, seed: int = 0
) -> tuple[PointSet, DistanceOracle, CoveringLayout]:
    """Euclidean covering point set in dimension m + n + 2 + s.

    Set point j sits at e_j + e_{n+m+1}; element point i at n*e_{m+i} plus one
    basis vector per containing set; solution point k at e_{n+m+2}/2 +
    sqrt(3/4)*e_{n+m+2+k}; the centroid at e_{n+m+2}.
    """
    lay = _layout(system, s)
    n, m = system.n_elements, system.m_sets
    total = lay.n_points
    dim = n + m + 2 + s
    if total * dim > EUCLIDEAN_COORD_LIMIT:
        raise ValueError(f"dense coordinates would need {total * dim} floats; reduce s")
    coords = np.zeros((total, dim))
    ax_shared = n + m  # axis of e_{n+m+1}
    ax_c = n + m + 1  # axis of e_{n+m+2}
    for j in range(m):
        coords[lay.set_ids[j], j] = 1.0
        coords[lay.set_ids[j], ax_shared] = 1.0
    for i in range(n):
        coords[lay.element_ids[i], m + i] = float(n)
        coords[lay.element_ids[i], system.sets_of(i)] = 1.0
    for k in range(s):
        coords[lay.solution_ids[k], ax_c] = 0.5
        coords[lay.solution_ids[k], ax_c + 1 + k] = math.sqrt(0.75)
    coords[lay.centroid_id, ax_c] = 1.0
    ps = PointSet(n=total, coords=coords)
    oracle = DistanceOracle("euclidean", ps)
    return ps, oracle, lay


def check_covering_properties(
    oracle: DistanceOracle, lay: CoveringLayout, system: SetSystem
) -> list[str]:
    """Verify the four defining properties on raw distances; empty list = pass.

    1. the centroid is every solution point's unique nearest neighbor;
    2. set points are closer to each other than to any solution point;
    3. from a solution point, exactly the element itself and the sets
       containing it improve on an element point;
    4. solution points are closer to each other than to element or set points.
    """
    D = oracle.pairwise()
    sol = lay.solution_ids
    elem = lay.element_ids
    sets = lay.set_ids
    c = lay.centroid_id
    bad: list[str] = []
    for p in sol:
        others = np.setdiff1d(np.arange(lay.n_points), [p, c])
        if not np.all(D[p, c] < D[p, others]):
            bad.append(f"P1: centroid not unique nearest neighbor of solution {p}")
    if sets.size and sol.size:
        worst_ss = D[np.ix_(sets, sets)].max()
        best_sp = D[np.ix_(sets, sol)].min()
        if not worst_ss < best_sp:
            bad.append("P2: some set point is closer to a solution point than to a set point")
    for i in range(system.n_elements):
        e = elem[i]
        allowed = set(int(sets[j]) for j in system.sets_of(i))
        allowed.add(int(e))
        for p in sol:
            closer = set(int(x) for x in np.flatnonzero(D[:, e] < D[p, e]))
            if closer != allowed:
                bad.append(
                    f"P3: improving points for element {i} from solution {p} are {sorted(closer)},"
                    f" expected {sorted(allowed)}"
                )
    if sol.size > 1:
        ss = D[np.ix_(sol, sol)]
        worst = ss[~np.eye(sol.size, dtype=bool)].max()
        rest = np.concatenate([elem, sets])
        if rest.size and not worst < D[np.ix_(sol, rest)].min():
            bad.append("P4: some solution point is closer to an element/set point than to a peer")
    return bad
