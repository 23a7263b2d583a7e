"""Set cover through query access: exact greedy, voting, and lazy variants.

All solvers talk to an instance through a small query surface (sets containing
an element, elements of a set, membership, frequency) instead of explicit set
lists, so the same code drives both standalone instances and the per-node
covering problems behind graph construction.

The randomized solvers simulate the classic greedy choice by sampling
uncovered elements ("voters") uniformly and letting each vote for every set
containing it; a set that accumulates a logarithmic number of votes covers
close to the maximum number of uncovered elements with high probability, so
committing it preserves the greedy approximation guarantee.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field

import numpy as np


class UncoverableError(Exception):
    """Some element is contained in no set."""


@dataclass
class CoverSolution:
    """Chosen set ids plus bookkeeping. ``ok`` is False for budgeted failures."""

    chosen: list[int]
    ok: bool = True
    stats: dict = field(default_factory=dict)


class SetSystem:
    """Explicit unweighted set system with CSR adjacency in both directions."""

    def __init__(self, n_elements: int, sets: list[list[int]] | list[np.ndarray]):
        self.n_elements = int(n_elements)
        self.m_sets = len(sets)
        set_arrays = []
        for s, elems in enumerate(sets):
            arr = np.unique(np.asarray(elems, dtype=np.int64))
            if arr.size and (arr[0] < 0 or arr[-1] >= n_elements):
                raise ValueError(f"set {s} references an element out of range")
            set_arrays.append(arr)
        self._set_indptr = np.zeros(self.m_sets + 1, dtype=np.int64)
        for s, arr in enumerate(set_arrays):
            self._set_indptr[s + 1] = self._set_indptr[s] + arr.size
        self._set_elems = (
            np.concatenate(set_arrays) if set_arrays else np.empty(0, dtype=np.int64)
        )
        # Invert to element -> sets, keeping each element's set list sorted.
        owners = np.repeat(np.arange(self.m_sets, dtype=np.int64), np.diff(self._set_indptr))
        order = np.lexsort((owners, self._set_elems))
        sorted_elems = self._set_elems[order]
        self._elem_sets = owners[order]
        self._elem_indptr = np.zeros(self.n_elements + 1, dtype=np.int64)
        np.add.at(self._elem_indptr, sorted_elems + 1, 1)
        np.cumsum(self._elem_indptr, out=self._elem_indptr)

    def sets_of(self, e: int) -> np.ndarray:
        """Ids of sets containing element ``e``, ascending."""
        return self._elem_sets[self._elem_indptr[e] : self._elem_indptr[e + 1]]

    def elements_of(self, s: int) -> np.ndarray:
        """Elements of set ``s``, ascending."""
        return self._set_elems[self._set_indptr[s] : self._set_indptr[s + 1]]

    def freq_of(self, e: int) -> int:
        return int(self._elem_indptr[e + 1] - self._elem_indptr[e])

    def freqs(self) -> np.ndarray:
        return np.diff(self._elem_indptr)

    def member_of(self, s: int, e: int) -> bool:
        sets = self.sets_of(e)
        pos = np.searchsorted(sets, s)
        return bool(pos < sets.size and sets[pos] == s)

    def set_sizes(self) -> np.ndarray:
        return np.diff(self._set_indptr)

    def save(self, path: str) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(f"{self.n_elements} {self.m_sets}\n")
            for s in range(self.m_sets):
                fh.write(" ".join(str(int(e)) for e in self.elements_of(s)) + "\n")

    @staticmethod
    def load(path: str) -> "SetSystem":
        with open(path, "r", encoding="utf-8") as fh:
            header = fh.readline().split()
            if len(header) != 2:
                raise ValueError(f"{path}:1: expected header 'n m'")
            n, m = int(header[0]), int(header[1])
            sets = []
            for _ in range(m):
                line = fh.readline()
                if line == "":
                    raise ValueError(f"{path}: expected {m} set lines")
                sets.append([int(x) for x in line.split()])
        return SetSystem(n, sets)


def default_vote_threshold(n_elements: int, m_sets: int) -> int:
    """Vote count at which a set is committed: 100 (ln m + ln n), at least 1."""
    n = max(n_elements, 1)
    m = max(m_sets, 1)
    return max(1, math.ceil(100.0 * (math.log(m) + math.log(n))))


def _set_sizes(access) -> np.ndarray:
    fn = getattr(access, "set_sizes", None)
    if fn is not None:
        return np.asarray(fn(), dtype=np.int64)
    return np.array(
        [len(access.elements_of(s)) for s in range(access.m_sets)], dtype=np.int64
    )


def _greedy(access, universe: np.ndarray | None = None, max_sets: int | None = None):
    """Exact greedy via a max-heap with lazily refreshed keys.

    Returns (chosen, complete).  ``complete`` is False only when ``max_sets``
    stopped the loop early.  Keys live in a counts array; heap entries with a
    stale key are refreshed on pop, which realizes decrease-key at
    O(log m) amortized per decrement.
    """
    n = access.n_elements
    m = access.m_sets
    if universe is None:
        uncovered = np.ones(n, dtype=bool)
        remaining = n
    else:
        uncovered = np.zeros(n, dtype=bool)
        uncovered[universe] = True
        remaining = int(uncovered.sum())
    if universe is None:
        sizes = _set_sizes(access).copy()
    else:
        sizes = np.zeros(m, dtype=np.int64)
        touched = []
        for e in np.flatnonzero(uncovered):
            touched.append(access.sets_of(e))
        if touched:
            np.add.at(sizes, np.concatenate(touched), 1)
    heap = [(-int(sizes[s]), s) for s in range(m) if sizes[s] > 0]
    heapq.heapify(heap)
    chosen: list[int] = []
    while remaining > 0:
        if max_sets is not None and len(chosen) >= max_sets:
            return chosen, False
        s = -1
        while heap:
            negkey, s = heapq.heappop(heap)
            cur = int(sizes[s])
            if cur <= 0:
                s = -1
                continue
            if -negkey == cur:
                break
            # Stale key: keys only decrease, so if the refreshed value still
            # beats the next key it is the exact maximum.
            if heap and -heap[0][0] > cur:
                heapq.heappush(heap, (-cur, s))
                s = -1
                continue
            break
        if s < 0:
            raise UncoverableError(f"{remaining} elements cannot be covered")
        chosen.append(s)
        elems = access.elements_of(s)
        newly = elems[uncovered[elems]]
        uncovered[newly] = False
        remaining -= newly.size
        sizes[s] = 0
        if newly.size:
            decs = np.concatenate([access.sets_of(e) for e in newly])
            sizes -= np.bincount(decs, minlength=m)
            sizes[s] = 0
    return chosen, True


def greedy_set_cover(access) -> CoverSolution:
    """Classic greedy; deterministic, |chosen| <= (ln n + 1) * OPT."""
    chosen, _ = _greedy(access)
    return CoverSolution(chosen=chosen, stats={"added_by_greedy": len(chosen)})


class _VoteFail(Exception):
    """Internal: a stop-early budget was exceeded."""


def _vote_cover_core(
    access,
    rng: np.random.Generator,
    threshold: int,
    universe: np.ndarray | None,
    vote_limit: int | None,
    total_limit: int | None,
    lazy: bool,
    checked: bool = False,
) -> CoverSolution:
    """Shared engine for the voting solvers.

    Nominees are drawn uniformly without replacement (swap-remove); each new
    voter votes for every set containing it; a set reaching ``threshold``
    votes is committed, its voters retire with their votes undone, and (in
    eager mode) covered nominees are dropped immediately.  Lazy mode defers
    covered-nominee detection to the sampling step.  The leftover voters are
    finished off with exact greedy on the projected residual instance.
    """
    n = access.n_elements
    m = access.m_sets
    if universe is None:
        pool = np.arange(n, dtype=np.int64)
    else:
        pool = np.asarray(universe, dtype=np.int64).copy()
    size = pool.size

    counts = np.zeros(m, dtype=np.int64)
    in_c = np.zeros(m, dtype=bool)
    covered = np.zeros(n, dtype=bool)
    voters: list[int] = []
    chosen: list[int] = []
    stats = {
        "votes_cast": 0,
        "voters_promoted": 0,
        "added_by_voting": 0,
        "added_by_greedy": 0,
        "added_random": 0,
    }

    def undo_votes(gone: np.ndarray, trigger: int | None, trigger_sets: np.ndarray) -> None:
        slices = [access.sets_of(int(v)) for v in gone if trigger is None or v != trigger]
        if trigger is not None:
            slices.append(trigger_sets)
        if slices:
            allsets = np.concatenate(slices)
            counts[:] -= np.bincount(allsets, minlength=m)

    def add_set(s: int, trigger: int | None, trigger_sets: np.ndarray) -> None:
        nonlocal size
        chosen.append(s)
        in_c[s] = True
        stats["added_by_voting"] += 1
        if vote_limit is not None and len(chosen) > vote_limit:
            raise _VoteFail
        varr = np.asarray(voters, dtype=np.int64)
        if lazy:
            gone_mask = np.zeros(varr.size, dtype=bool)
            for t, v in enumerate(varr):
                sets_v = access.sets_of(int(v))
                pos = np.searchsorted(sets_v, s)
                gone_mask[t] = pos < sets_v.size and sets_v[pos] == s
        else:
            elems = access.elements_of(s)
            covered[elems] = True
            gone_mask = covered[varr]
        gone = varr[gone_mask]
        undo_votes(gone, trigger, trigger_sets)
        voters[:] = varr[~gone_mask].tolist()
        if not lazy:
            kept = ~covered[pool[:size]]
            nsize = int(kept.sum())
            pool[:nsize] = pool[:size][kept]
            size = nsize

    def cast_and_check(batch: list[int]) -> None:
        """Cast all of the batch's votes; on a threshold crossing, rewind to
        the exact sequential point, return the un-promoted tail to the pool,
        and commit the crossing set."""
        nonlocal size
        while batch:
            slices = [access.sets_of(e) for e in batch]
            lens = np.array([a.size for a in slices], dtype=np.int64)
            concat = (
                np.concatenate(slices) if slices else np.empty(0, dtype=np.int64)
            )
            counts[:] += np.bincount(concat, minlength=m)
            stats["votes_cast"] += int(concat.size)
            hot = np.flatnonzero((counts >= threshold) & ~in_c)
            if hot.size == 0:
                voters.extend(batch)
                return
            # Locate the earliest crossing in cast order.
            best_pos = None
            best_set = -1
            for s in hot:
                occ = np.flatnonzero(concat == s)
                pre = int(counts[s]) - occ.size
                need = threshold - pre
                pos = int(occ[need - 1])
                if best_pos is None or pos < best_pos:
                    best_pos = pos
                    best_set = int(s)
            tail = concat[best_pos + 1 :]
            counts[:] -= np.bincount(tail, minlength=m)
            stats["votes_cast"] -= int(tail.size)
            ends = np.cumsum(lens)
            t = int(np.searchsorted(ends, best_pos, side="right"))
            voters.extend(batch[:t])
            trigger = batch[t]
            local = best_pos - (int(ends[t - 1]) if t > 0 else 0)
            trigger_sets = slices[t][: local + 1]
            # Voters drawn after the trigger go back to the nominee pool.
            for e in reversed(batch[t + 1 :]):
                pool[size] = e
                size += 1
            voters.append(trigger)
            add_set(best_set, trigger, trigger_sets)
            if checked:
                _assert_vote_invariants(access, universe, chosen, pool[:size], voters, counts)
            batch = []

    while size > 0:
        want = min(size, 64)
        batch: list[int] = []
        while want > 0 and size > 0:
            idx = int(rng.integers(size))
            e = int(pool[idx])
            size -= 1
            pool[idx] = pool[size]
            pool[size] = e  # keep drawn ids parked past the live region
            if lazy:
                sets_e = access.sets_of(e)
                if sets_e.size and bool(in_c[sets_e].any()):
                    continue  # covered nominee discovered at sampling time
            batch.append(e)
            want -= 1
        stats["voters_promoted"] += len(batch)
        try:
            cast_and_check(batch)
        except _VoteFail:
            return CoverSolution(chosen=chosen, ok=False, stats=stats)
        if checked:
            _assert_vote_invariants(access, universe, chosen, pool[:size], voters, counts)

    # Tail: cover the surviving voters with exact greedy on the projection.
    if voters:
        varr = np.asarray(sorted(voters), dtype=np.int64)
        local_of = {int(e): t for t, e in enumerate(varr)}
        local_sets: dict[int, list[int]] = {}
        for e in varr:
            for s in access.sets_of(int(e)):
                if not in_c[s]:
                    local_sets.setdefault(int(s), []).append(local_of[int(e)])
        set_ids = sorted(local_sets)
        residual = SetSystem(varr.size, [local_sets[s] for s in set_ids])
        cap = None if total_limit is None else total_limit - len(chosen)
        if cap is not None and cap < 0:
            return CoverSolution(chosen=chosen, ok=False, stats=stats)
        tail_chosen, complete = _greedy(residual, max_sets=cap)
        stats["added_by_greedy"] = len(tail_chosen)
        chosen.extend(set_ids[s] for s in tail_chosen)
        if not complete:
            return CoverSolution(chosen=chosen, ok=False, stats=stats)
    return CoverSolution(chosen=chosen, ok=True, stats=stats)


def _assert_vote_invariants(access, universe, chosen, nominees, voters, counts) -> None:
    """Debug: nominees and voters partition the uncovered universe, and every
    vote count equals the chosen-set-free voter membership count."""
    n = access.n_elements
    in_univ = np.zeros(n, dtype=bool)
    if universe is None:
        in_univ[:] = True
    else:
        in_univ[universe] = True
    cov = np.zeros(n, dtype=bool)
    for s in chosen:
        elems = access.elements_of(s)
        cov[elems] = True
    expect = set(np.flatnonzero(in_univ & ~cov).tolist())
    nom = set(int(x) for x in nominees)
    vot = set(int(x) for x in voters)
    assert not (nom & vot), "nominees and voters overlap"
    assert nom | vot == expect, "N u V does not equal the uncovered universe"
    vote_check = np.zeros(access.m_sets, dtype=np.int64)
    for v in vot:
        vote_check[access.sets_of(v)] += 1
    assert np.array_equal(vote_check, counts), "vote counts drifted"


def construct_vote_cover(
    access,
    seed: int,
    vote_threshold: int | None = None,
    universe: np.ndarray | None = None,
    checked: bool = False,
) -> CoverSolution:
    """Voting greedy simulation; 9 ln(n)-approximate with high probability."""
    threshold = vote_threshold or default_vote_threshold(access.n_elements, access.m_sets)
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    return _vote_cover_core(
        access, rng, threshold, universe, vote_limit=None, total_limit=None, lazy=False,
        checked=checked,
    )


def cvc_stop_early(
    access,
    budget: int,
    seed: int,
    vote_threshold: int | None = None,
    universe: np.ndarray | None = None,
    lazy: bool = False,
) -> CoverSolution:
    """Vote cover that gives up early instead of blowing its budget.

    The voting phase fails upon committing its (budget+1)-th set; the greedy
    tail fails if the total would exceed 2*budget, so any success has at most
    2*budget sets.  A budget below OPT/2 therefore always fails.
    """
    if budget < 1:
        raise ValueError(f"budget must be >= 1, got {budget}")
    threshold = vote_threshold or default_vote_threshold(access.n_elements, access.m_sets)
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    return _vote_cover_core(
        access,
        rng,
        threshold,
        universe,
        vote_limit=budget,
        total_limit=2 * budget,
        lazy=lazy,
    )


def construct_limited_vote_cover(
    access,
    seed: int,
    vote_threshold: int | None = None,
    lazy: bool = False,
) -> CoverSolution:
    """Exponential search over the budget with per-level frequency filtering.

    Each level removes the elements frequent enough that random sets would
    cover them anyway, runs the budgeted solver on the rest, and halves the
    budget.  On the first failure the last successful cover is topped up with
    that many random sets, which covers the filtered-out elements with high
    probability.  O(log n)-approximate overall.
    """
    n = access.n_elements
    m = access.m_sets
    threshold = vote_threshold or default_vote_threshold(n, m)
    freqs_fn = getattr(access, "freqs", None)
    if freqs_fn is not None:
        freqs = np.asarray(freqs_fn(), dtype=np.int64)
    else:
        freqs = np.array([access.freq_of(e) for e in range(n)], dtype=np.int64)
    if np.any(freqs == 0):
        raise UncoverableError("an element is contained in no set")

    budget = max(1, math.ceil(16.0 * n * math.log(max(n, 2))))
    ss = np.random.SeedSequence(seed)
    level_seeds = ss.spawn(budget.bit_length() + 2)
    best: CoverSolution | None = None
    random_add = 0
    level = 0
    filter_scale = 100.0 * (math.log(max(m, 1)) + math.log(max(n, 1))) * m
    while budget >= 1:
        cutoff = filter_scale / budget
        keep = np.flatnonzero(freqs < cutoff)
        sol = cvc_stop_early(
            access,
            budget,
            int(level_seeds[level].generate_state(1)[0]),
            vote_threshold=threshold,
            universe=keep,
            lazy=lazy,
        )
        level += 1
        if not sol.ok:
            random_add = budget
            break
        best = sol
        budget //= 2
    if best is None:
        # Even the largest budget failed; cover everything the direct way.
        best = greedy_set_cover(access)
        return best
    if random_add > 0:
        rng = np.random.default_rng(level_seeds[-1])
        extra = rng.choice(m, size=min(random_add, m), replace=False)
        chosen_set = set(best.chosen)
        added = [int(s) for s in extra if int(s) not in chosen_set]
        best.chosen.extend(added)
        best.stats["added_random"] = len(added)
    return best
