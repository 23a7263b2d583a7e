"""Distance-based permutation matrix and constant-time set-cover queries.

Row ``j`` of the matrix lists every point id sorted by the tie-broken order
around point ``j`` (so position 0 is always ``j`` itself).  From it, the three
query primitives used by all the cover solvers follow in O(1):

* membership:  is element ``j`` inside the set induced by stepping to ``k``?
* frequency:   how many sets of instance ``i`` contain element ``j``?
* enumeration: the l-th set containing ``j``, nearest-first.

Per-pair prefix tables extend the same primitives to the multiplicative and
additive strengthenings of navigability.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from navgraph.dataset import DistanceOracle, PointSet


@dataclass
class PermutationIndex:
    """Sorted-order matrix ``pi``, its inverse ``rank``, and sorted distances.

    ``pi[j]`` is a permutation of ``0..n-1`` ordered by ``(d(p_j, .), id)``;
    ``rank[j][i]`` is the position of ``i`` in ``pi[j]``; ``dsorted[j]`` holds
    the distances in that same order.
    """

    n: int
    pi: np.ndarray
    rank: np.ndarray
    dsorted: np.ndarray

    def dist(self, j: int, i: int) -> float:
        """d(p_j, p_i) recovered from the sorted row."""
        return float(self.dsorted[j, self.rank[j, i]])


def build_index(ps: PointSet, oracle: DistanceOracle) -> PermutationIndex:
    """Sort all n rows; O(n^2 log n) comparisons, int32 tables."""
    n = ps.n
    pi = np.empty((n, n), dtype=np.int32)
    rank = np.empty((n, n), dtype=np.int32)
    dsorted = np.empty((n, n), dtype=np.float64)
    ids = np.arange(n, dtype=np.int32)
    positions = np.arange(n, dtype=np.int32)
    for j in range(n):
        drow = oracle.column(j)
        order = np.lexsort((ids, drow))
        pi[j] = order
        rank[j, order] = positions
        dsorted[j] = drow[order]
        if n > 1 and dsorted[j, 1] <= 0.0:
            dup = int(pi[j, 1])
            raise ValueError(f"points {j} and {dup} coincide under the distance oracle")
    return PermutationIndex(n=n, pi=pi, rank=rank, dsorted=dsorted)


def member_of(idx: PermutationIndex, i: int, j: int, k: int) -> bool:
    """True iff stepping from ``i`` to ``k`` strictly improves on target ``j``."""
    return bool(idx.rank[j, k] < idx.rank[j, i])


def freq_of(idx: PermutationIndex, i: int, j: int) -> int:
    """Number of sets of instance ``i`` containing element ``j`` (self-set included)."""
    if i == j:
        raise ValueError("freq_of needs j != i")
    return int(idx.rank[j, i])


def set_of(idx: PermutationIndex, i: int, j: int, l: int) -> int | None:
    """The l-th (1-based, nearest-first) set containing ``j``, or None past the end."""
    if i == j:
        raise ValueError("set_of needs j != i")
    if l < 1:
        raise ValueError("set index l must be >= 1")
    if l > idx.rank[j, i]:
        return None
    return int(idx.pi[j, l - 1])


@dataclass
class PrefixTable:
    """Per-pair prefix lengths for the strengthened cover instances.

    ``mode`` is ``"alpha"`` (improvement by a 1/alpha factor) or ``"tau"``
    (improvement by an additive margin, with the element's own set always
    counting as containing it).  ``len_[i][j]`` is the number of sets of
    instance ``i`` that contain element ``j``; the qualifying sets are exactly
    the first ``len_[i][j]`` entries of row ``j`` of the permutation matrix.
    """

    mode: str
    value: float
    n: int
    len_: np.ndarray


def build_prefix_table(
    idx: PermutationIndex, mode: str, value: float
) -> PrefixTable:
    """Binary-search every (i, j) pair's threshold against row j; O(n^2 log n).

    The comparison is the tie-broken one: a set ``k`` qualifies when
    ``(d(p_j, p_k), k)`` precedes ``(threshold_ij, i)`` lexicographically, so
    alpha=1 and tau=0 reproduce the plain navigability frequencies exactly.
    For tau mode the element's own set is force-counted when the additive
    margin makes it otherwise empty.
    """
    if mode == "alpha":
        if value < 1.0:
            raise ValueError(f"alpha must be >= 1, got {value}")
    elif mode == "tau":
        if value < 0.0:
            raise ValueError(f"tau must be >= 0, got {value}")
    else:
        raise ValueError(f"mode must be 'alpha' or 'tau', got {mode!r}")

    n = idx.n
    len_ = np.zeros((n, n), dtype=np.int32)
    for j in range(n):
        row_d = idx.dsorted[j]
        row_ids = idx.pi[j]
        d_to_all = row_d[idx.rank[j]]
        if mode == "alpha":
            thresholds = d_to_all / value
        else:
            thresholds = d_to_all - value
        lo = np.searchsorted(row_d, thresholds, side="left")
        hi = np.searchsorted(row_d, thresholds, side="right")
        counts = lo.astype(np.int64)
        tied = np.flatnonzero(hi > lo)
        if tied.size:
            # Within a tie run the row is ordered by id, so the id cutoff is
            # another binary search.  Width-1 runs (the typical float case,
            # e.g. the threshold hitting the pair's own distance) vectorize.
            width = hi[tied] - lo[tied]
            ones = tied[width == 1]
            counts[ones] += row_ids[lo[ones]] < ones
            rest = tied[width > 1]
            if rest.size:
                key = lo[rest].astype(np.int64) * (n + 1) + hi[rest]
                order = np.argsort(key, kind="stable")
                rest = rest[order]
                key = key[order]
                starts = np.flatnonzero(np.r_[True, key[1:] != key[:-1]])
                bounds = np.r_[starts, rest.size]
                for g in range(starts.size):
                    grp = rest[bounds[g] : bounds[g + 1]]
                    a, b = int(lo[grp[0]]), int(hi[grp[0]])
                    counts[grp] += np.searchsorted(row_ids[a:b], grp)
        if mode == "tau":
            # j's own set always contains j; it is entry 0 of the row whenever
            # anything qualifies, so forcing it keeps the prefix structure.
            counts = np.maximum(counts, 1)
        counts[j] = 0
        len_[:, j] = counts.astype(np.int32)
    return PrefixTable(mode=mode, value=value, n=n, len_=len_)


def prefix_sets_of(idx: PermutationIndex, table: PrefixTable, i: int, j: int) -> np.ndarray:
    """All sets of strengthened instance ``i`` containing ``j``, nearest-first."""
    return idx.pi[j, : table.len_[i, j]]
