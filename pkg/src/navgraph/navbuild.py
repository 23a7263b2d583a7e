"""Navigable-graph builders.

Five construction routes share one voting subroutine:

* ``build_simple``    one voting cover per node, output-sensitive runtime;
* ``build_full``      double exponential search with random-edge and clique
                      preprocessing, near-quadratic runtime;
* ``build_clique_baseline``  deterministic sqrt(n)-clique construction with
                      at most 2 n^{3/2} - n edges;
* ``build_classic_greedy``   exact greedy set cover per node, cubic but
                      deterministically (ln n + 1)-competitive per node;
* ``build_alpha`` / ``build_tau``  the strengthened variants, solved per node
                      over prefix tables.

All randomness flows from one seed through named substreams, so results are
reproducible and independent of evaluation order.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from navgraph.dataset import DistanceOracle, PointSet, SearchGraph
from navgraph.perm_index import PermutationIndex, PrefixTable, build_index, build_prefix_table
from navgraph.setcover import greedy_set_cover

PRESETS = ("paper", "practical")


def vote_threshold_for(n: int, preset: str = "paper") -> int:
    """Votes required to commit a set: 15 ln n by default, 3 ln n practical."""
    scale = 15.0 if preset == "paper" else 3.0
    return max(1, math.ceil(scale * math.log(max(n, 2))))


@dataclass
class NGCoverParams:
    """Knobs for one voting-cover call."""

    size_limit: int
    vote_threshold: int | None = None
    seed: int = 0

    def __post_init__(self) -> None:
        if self.size_limit < 1:
            raise ValueError("size_limit must be >= 1")
        if self.vote_threshold is not None and self.vote_threshold < 1:
            raise ValueError("vote_threshold must be >= 1")


@dataclass
class BuildReport:
    """Per-run statistics; everything except wall_ms is seed-deterministic."""

    algorithm: str
    n: int
    seed: int | None
    edges: int
    avg_degree: float
    max_degree: int
    degree_histogram: dict[int, int]
    ell_star_trajectory: list[int] = field(default_factory=list)
    restarts: int = 0
    wall_ms: float = 0.0

    def to_dict(self) -> dict:
        return {
            "algorithm": self.algorithm,
            "n": self.n,
            "seed": self.seed,
            "edges": self.edges,
            "avg_degree": self.avg_degree,
            "max_degree": self.max_degree,
            "degree_histogram": {str(k): v for k, v in self.degree_histogram.items()},
            "ell_star_trajectory": self.ell_star_trajectory,
            "restarts": self.restarts,
            "wall_ms": self.wall_ms,
        }


def _substream(seed: int, *key: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=tuple(key)))


# Stream ids for the named substreams.
_STREAM_NODE = 1
_STREAM_RANDOM_EDGES = 2
_STREAM_PARTITION = 3


class _PlainView:
    """Per-node cover instances of plain navigability, via the index."""

    def __init__(self, idx: PermutationIndex):
        self.idx = idx
        self.n = idx.n

    def sets_containing(self, i: int, e: int) -> np.ndarray:
        return self.idx.pi[e, : self.idx.rank[e, i]]

    def member_mask(self, i: int, k: int, elems: np.ndarray) -> np.ndarray:
        r = self.idx.rank
        return r[elems, k] < r[elems, i]


class _ScaledView:
    """Strengthened instances: qualifying sets are prefix slices from the
    table, membership is the tie-broken threshold comparison."""

    def __init__(self, idx: PermutationIndex, table: PrefixTable):
        self.idx = idx
        self.table = table
        self.n = idx.n

    def sets_containing(self, i: int, e: int) -> np.ndarray:
        return self.idx.pi[e, : self.table.len_[i, e]]

    def member_mask(self, i: int, k: int, elems: np.ndarray) -> np.ndarray:
        idx = self.idx
        d_k = idx.dsorted[elems, idx.rank[elems, k]]
        d_i = idx.dsorted[elems, idx.rank[elems, i]]
        if self.table.mode == "alpha":
            thr = d_i / self.table.value
            return (d_k < thr) | ((d_k == thr) & (k < i))
        thr = d_i - self.table.value
        return (d_k < thr) | ((d_k == thr) & (k < i)) | (elems == k)


def _ng_cover(view, i: int, U: np.ndarray, ell: int, threshold: int,
              rng: np.random.Generator, checked: bool = False) -> np.ndarray | None:
    """Voting cover of ``U`` for node ``i``; None signals a budget failure.

    Nominees are promoted to voters uniformly at random; each voter votes for
    every set containing it, nearest-first; a set reaching ``threshold`` votes
    is committed, its covered voters retire with their votes undone, and the
    covered nominees are dropped.  Fails as soon as the voter pool or the
    committed-set count would exceed ``ell``.  Leftover voters join the cover
    directly (their own sets contain them).
    """
    n = view.n
    pool = np.asarray(U, dtype=np.int64).copy()
    size = int(pool.size)
    counts = np.zeros(n, dtype=np.int64)
    in_c = np.zeros(n, dtype=bool)
    voters: list[int] = []
    chosen: list[int] = []

    def add_set(j: int, trigger: int, trigger_sets: np.ndarray) -> bool:
        """Commit set j; False when |C| blows the budget."""
        nonlocal size
        chosen.append(j)
        in_c[j] = True
        if len(chosen) > ell:
            return False
        varr = np.asarray(voters, dtype=np.int64)
        gone_mask = view.member_mask(i, j, varr)
        undo = [view.sets_containing(i, int(v)) for v in varr[gone_mask] if v != trigger]
        undo.append(trigger_sets)
        counts[:] -= np.bincount(np.concatenate(undo), minlength=n)
        voters[:] = varr[~gone_mask].tolist()
        live = pool[:size]
        keep = ~view.member_mask(i, j, live)
        nsize = int(keep.sum())
        pool[:nsize] = live[keep]
        size = nsize
        return True

    while size > 0:
        allowed = ell - len(voters)
        if allowed <= 0:
            return None  # the next promotion would overflow the voter pool
        # A batch of B voters raises any vote count by at most B, so sizing
        # batches against the current maximum makes threshold crossings only
        # possible in (cheap to rewind) small batches.
        maxv = int(counts[~in_c].max()) if chosen else int(counts.max())
        take = min(size, allowed, max(1, min(512, threshold - maxv)))
        unit = rng.random(take)  # one stream draw per promotion, batched
        batch = []
        slices = []
        for t in range(take):
            pos = int(unit[t] * size)
            e = int(pool[pos])
            batch.append(e)
            slices.append(view.sets_containing(i, e))
            size -= 1
            pool[pos] = pool[size]
        concat = np.concatenate(slices) if slices else np.empty(0, dtype=np.int64)
        counts[:] += np.bincount(concat, minlength=n)
        hot = np.flatnonzero((counts >= threshold) & ~in_c)
        if hot.size == 0:
            voters.extend(batch)
        else:
            best_pos = None
            best_set = -1
            for s in hot:
                occ = np.flatnonzero(concat == s)
                need = threshold - (int(counts[s]) - occ.size)
                pos = int(occ[need - 1])
                if best_pos is None or pos < best_pos:
                    best_pos, best_set = pos, int(s)
            counts[:] -= np.bincount(concat[best_pos + 1 :], minlength=n)
            ends = np.cumsum([a.size for a in slices])
            t = int(np.searchsorted(ends, best_pos, side="right"))
            voters.extend(batch[:t])
            trigger = batch[t]
            local = best_pos - (int(ends[t - 1]) if t > 0 else 0)
            for e in reversed(batch[t + 1 :]):  # un-promote the tail of the batch
                pool[size] = e
                size += 1
            voters.append(trigger)
            if not add_set(best_set, trigger, slices[t][: local + 1]):
                return None
        if checked:
            _assert_ng_invariants(view, i, U, pool[:size], voters, counts, chosen)
    return np.unique(np.asarray(chosen + voters, dtype=np.int64))


def _assert_ng_invariants(view, i, U, nominees, voters, counts, chosen) -> None:
    """Debug: nominees/voters partition the uncovered part of U and every
    vote counter matches the voter membership of its set."""
    arr = np.asarray(U, dtype=np.int64)
    covered = np.zeros(arr.size, dtype=bool)
    for j in chosen:
        covered |= view.member_mask(i, int(j), arr)
    uncovered = set(int(x) for x in arr[~covered])
    nom = set(int(x) for x in nominees)
    vot = set(int(x) for x in voters)
    assert not (nom & vot), "nominees and voters overlap"
    assert nom | vot == uncovered, "N u V is not the uncovered set"
    expect = np.zeros(view.n, dtype=np.int64)
    for v in vot:
        expect[view.sets_containing(i, int(v))] += 1
    assert np.array_equal(expect, counts), "vote counts drifted"


def ng_cover(idx: PermutationIndex, i: int, U, params: NGCoverParams,
             checked: bool = False) -> np.ndarray | None:
    """Cover all of ``U`` in node ``i``'s instance, or fail on the size budget."""
    U = np.asarray(U, dtype=np.int64)
    if U.size and bool((U == i).any()):
        raise ValueError("U must not contain the node itself")
    threshold = params.vote_threshold or vote_threshold_for(idx.n)
    rng = np.random.default_rng(np.random.SeedSequence(params.seed))
    return _ng_cover(_PlainView(idx), i, U, params.size_limit, threshold, rng, checked)


def _report(algorithm: str, g: SearchGraph, seed: int | None, t0: float,
            trajectory: list[int] | None = None, restarts: int = 0) -> BuildReport:
    return BuildReport(
        algorithm=algorithm,
        n=g.n,
        seed=seed,
        edges=g.edge_count,
        avg_degree=g.avg_degree,
        max_degree=g.max_degree,
        degree_histogram=g.degree_histogram(),
        ell_star_trajectory=trajectory or [],
        restarts=restarts,
        wall_ms=(time.perf_counter() - t0) * 1000.0,
    )


def _per_node_build(view, n: int, seed: int, threshold: int) -> list[np.ndarray]:
    """One unbudgeted voting cover per node; cannot fail at ell = n."""
    ids = np.arange(n, dtype=np.int64)
    out = []
    for i in range(n):
        rng = _substream(seed, _STREAM_NODE, i)
        U = ids[ids != i]
        res = _ng_cover(view, i, U, n, threshold, rng)
        assert res is not None, "cover with budget n cannot fail"
        out.append(res)
    return out


def build_simple(ps: PointSet, oracle: DistanceOracle, seed: int,
                 preset: str = "paper", vote_threshold: int | None = None,
                 idx: PermutationIndex | None = None) -> tuple[SearchGraph, BuildReport]:
    """Output-sensitive builder: one voting cover per node with budget n."""
    t0 = time.perf_counter()
    if idx is None:
        idx = build_index(ps, oracle)
    n = ps.n
    threshold = vote_threshold or vote_threshold_for(n, preset)
    if n == 1:
        g = SearchGraph.from_neighbor_lists(1, [[]])
    else:
        g = SearchGraph.from_neighbor_lists(n, _per_node_build(_PlainView(idx), n, seed, threshold))
    return g, _report("simple", g, seed, t0)


def build_alpha(ps: PointSet, oracle: DistanceOracle, alpha: float, seed: int,
                preset: str = "paper", vote_threshold: int | None = None,
                idx: PermutationIndex | None = None) -> tuple[SearchGraph, BuildReport]:
    """Builder for the multiplicative strengthening: every hop must shrink the
    target distance by a factor 1/alpha."""
    if alpha < 1.0:
        raise ValueError(f"alpha must be >= 1, got {alpha}")
    t0 = time.perf_counter()
    if idx is None:
        idx = build_index(ps, oracle)
    n = ps.n
    threshold = vote_threshold or vote_threshold_for(n, preset)
    if n == 1:
        g = SearchGraph.from_neighbor_lists(1, [[]])
    else:
        table = build_prefix_table(idx, "alpha", alpha)
        g = SearchGraph.from_neighbor_lists(
            n, _per_node_build(_ScaledView(idx, table), n, seed, threshold)
        )
    return g, _report(f"alpha[{alpha:g}]", g, seed, t0)


def build_tau(ps: PointSet, oracle: DistanceOracle, tau: float, seed: int,
              preset: str = "paper", vote_threshold: int | None = None,
              idx: PermutationIndex | None = None) -> tuple[SearchGraph, BuildReport]:
    """Builder for the additive strengthening: every hop must improve the
    target distance by at least tau, with direct edges exempt."""
    if tau < 0.0:
        raise ValueError(f"tau must be >= 0, got {tau}")
    t0 = time.perf_counter()
    if idx is None:
        idx = build_index(ps, oracle)
    n = ps.n
    threshold = vote_threshold or vote_threshold_for(n, preset)
    if n == 1:
        g = SearchGraph.from_neighbor_lists(1, [[]])
    else:
        table = build_prefix_table(idx, "tau", tau)
        g = SearchGraph.from_neighbor_lists(
            n, _per_node_build(_ScaledView(idx, table), n, seed, threshold)
        )
    return g, _report(f"tau[{tau:g}]", g, seed, t0)


def build_full(ps: PointSet, oracle: DistanceOracle, seed: int,
               preset: str = "paper", vote_threshold: int | None = None,
               idx: PermutationIndex | None = None,
               checked: bool = False) -> tuple[SearchGraph, BuildReport]:
    """Near-quadratic builder: exponential search on the total edge budget,
    random edges plus same-difficulty cliques, then voting covers.

    Outer guesses double the total budget; per guess, every node draws random
    out-edges, and an inner search doubles a per-node budget while the still
    unfinished nodes are grouped into cliques.  Any point outside a clique is
    already covered for every member except its nearest, so the residual
    cover instances stay small.  A guess is abandoned as soon as the committed
    cover sizes could exceed budget * ln n.
    """
    t0 = time.perf_counter()
    n = ps.n
    if idx is None:
        idx = build_index(ps, oracle)
    threshold = vote_threshold or vote_threshold_for(n, preset)
    if n == 1:
        g = SearchGraph.from_neighbor_lists(1, [[]])
        return g, _report("full", g, seed, t0)

    view = _PlainView(idx)
    rank = idx.rank
    dsorted = idx.dsorted
    ids = np.arange(n, dtype=np.int64)
    lnn = math.log(n)
    trajectory: list[int] = []
    restarts = 0
    ell_star = 2 * n
    while True:
        trajectory.append(ell_star)
        budget = ell_star * lnn
        r_size = int(2.0 * (ell_star / n) * lnn)
        clique_size = max(1, int((ell_star / n) * lnn))
        freq_cap = (n * n) / ell_star
        lam = 0.0
        neighbors: list[np.ndarray | None] = [None] * n
        r_samples: list[np.ndarray] = []
        rng_r = _substream(seed, _STREAM_RANDOM_EDGES, restarts)
        queue: list[int] = []
        for i in range(n):
            others = ids[ids != i]
            if r_size >= n - 1:
                # The random sample is the whole point set; the node is done.
                neighbors[i] = others
                r_samples.append(others)
            else:
                r_samples.append(np.sort(rng_r.choice(others, size=r_size, replace=False)))
                queue.append(i)

        ell = 2
        level = 0
        restart = False
        while queue:
            if lam + len(queue) * ell > budget:
                restart = True
                break
            rng_p = _substream(seed, _STREAM_PARTITION, restarts, level)
            perm = rng_p.permutation(np.asarray(queue, dtype=np.int64))
            for start in range(0, perm.size, clique_size):
                clique = np.sort(perm[start : start + clique_size])
                outside_mask = np.ones(n, dtype=bool)
                outside_mask[clique] = False
                outside = ids[outside_mask]
                # Nearest clique member per outside point, ties to lowest id.
                dists = np.stack([dsorted[outside, rank[outside, int(m)]] for m in clique])
                assign = np.argmin(dists, axis=0)
                if checked:
                    assert outside.size <= n - clique.size, "clique coverage bound"
                uncovered_sets: dict[int, np.ndarray] = {}
                for mi, m in enumerate(clique):
                    m = int(m)
                    mine = outside[assign == mi]
                    mine = mine[rank[mine, m] <= freq_cap]
                    if mine.size:
                        r_m = r_samples[m]
                        hit = (rank[mine[:, None], r_m] < rank[mine, m][:, None]).any(axis=1)
                        mine = mine[~hit]
                    uncovered_sets[m] = mine
                if checked:
                    total = sum(arr.size for arr in uncovered_sets.values())
                    assert total <= n - clique.size, "clique coverage bound"
                for m in clique:
                    m = int(m)
                    rng_n = _substream(seed, _STREAM_NODE, restarts, level, m)
                    res = _ng_cover(view, m, uncovered_sets[m], ell, threshold, rng_n)
                    if res is None:
                        continue
                    queue.remove(m)
                    lam += res.size
                    merged = np.unique(np.concatenate([r_samples[m], clique, res]))
                    neighbors[m] = merged[merged != m]
                    if lam + len(queue) * ell > budget:
                        restart = True
                        break
                if restart:
                    break
            if restart:
                break
            ell = min(ell * 2, n)
            level += 1
        if restart:
            restarts += 1
            ell_star *= 2
            continue
        g = SearchGraph(n=n, out=[np.asarray(a, dtype=np.int64) for a in neighbors])
        return g, _report("full", g, seed, t0, trajectory, restarts)


def build_clique_baseline(ps: PointSet, oracle: DistanceOracle) -> SearchGraph:
    """Deterministic baseline: ceil(sqrt n) id-contiguous groups, each fully
    connected, plus one edge from each group's nearest member to every outside
    point.  Always navigable, at most 2 n^{3/2} - n edges."""
    n = ps.n
    out: list[list[int]] = [[] for _ in range(n)]
    if n == 1:
        return SearchGraph.from_neighbor_lists(1, out)
    group_size = math.isqrt(n)
    if group_size * group_size < n:
        group_size += 1
    for start in range(0, n, group_size):
        group = list(range(start, min(start + group_size, n)))
        for i in group:
            out[i].extend(j for j in group if j != i)
        cols = np.stack([oracle.column(m) for m in group])
        nearest = np.argmin(cols, axis=0)  # ties resolve to the lowest id
        for j in range(n):
            if start <= j < start + group_size:
                continue
            out[group[int(nearest[j])]].append(j)
    return SearchGraph.from_neighbor_lists(n, out)


class _NavGreedyAccess:
    """Set-cover query adapter for one node's instance, elements re-indexed to
    skip the node itself; set ids stay raw point ids."""

    def __init__(self, idx: PermutationIndex, i: int):
        self.idx = idx
        self.i = i
        self.n_elements = idx.n - 1
        self.m_sets = idx.n

    def _raw(self, e: int) -> int:
        return e if e < self.i else e + 1

    def sets_of(self, e: int) -> np.ndarray:
        raw = self._raw(int(e))
        return self.idx.pi[raw, : self.idx.rank[raw, self.i]]

    def elements_of(self, s: int) -> np.ndarray:
        raw = np.flatnonzero(self.idx.rank[:, s] < self.idx.rank[:, self.i])
        raw = raw[raw != self.i]
        return np.where(raw > self.i, raw - 1, raw)

    def freq_of(self, e: int) -> int:
        raw = self._raw(int(e))
        return int(self.idx.rank[raw, self.i])

    def set_sizes(self) -> np.ndarray:
        r = self.idx.rank
        return (r < r[:, [self.i]]).sum(axis=0, dtype=np.int64)


def build_classic_greedy(ps: PointSet, oracle: DistanceOracle,
                         idx: PermutationIndex | None = None) -> SearchGraph:
    """Exact greedy set cover per node; deterministic, per-node degree within
    (ln n + 1) of that node's optimum."""
    n = ps.n
    if idx is None:
        idx = build_index(ps, oracle)
    out = []
    for i in range(n):
        if n == 1:
            out.append([])
            continue
        sol = greedy_set_cover(_NavGreedyAccess(idx, i))
        out.append(sol.chosen)
    return SearchGraph.from_neighbor_lists(n, out)
