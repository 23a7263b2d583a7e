import itertools
import math

import numpy as np
import pytest

from navgraph import setcover
from navgraph.setcover import (
    CoverSolution,
    SetSystem,
    UncoverableError,
    construct_limited_vote_cover,
    construct_vote_cover,
    cvc_stop_early,
    default_vote_threshold,
    greedy_set_cover,
)
from navgraph.verify import check_cover
from navgraph.instances import gen_planted_cover


def exhaustive_opt(system):
    """Smallest cover by brute force; only for tiny instances."""
    m = system.m_sets
    for size in range(1, m + 1):
        for combo in itertools.combinations(range(m), size):
            if check_cover(system, combo):
                return size
    raise AssertionError("uncoverable instance")


def test_greedy_hand_example():
    system = SetSystem(3, [[0, 1], [1, 2], [2]])
    sol = greedy_set_cover(system)
    assert sol.chosen == [0, 1]
    assert check_cover(system, sol.chosen)


def test_greedy_single_set():
    system = SetSystem(4, [[0, 1, 2, 3]])
    assert greedy_set_cover(system).chosen == [0]


def test_greedy_uncoverable():
    with pytest.raises(UncoverableError):
        greedy_set_cover(SetSystem(1, [[]]))


def test_greedy_ln_bound_against_exhaustive():
    rng = np.random.default_rng(0)
    for trial in range(25):
        n = int(rng.integers(4, 10))
        m = int(rng.integers(3, 9))
        sets = [rng.choice(n, size=int(rng.integers(1, n + 1)), replace=False).tolist()
                for _ in range(m)]
        sets[0] = list(range(n))  # keep it coverable
        system = SetSystem(n, sets)
        sol = greedy_set_cover(system)
        assert check_cover(system, sol.chosen)
        assert len(sol.chosen) <= (math.log(n) + 1) * exhaustive_opt(system)


def test_setsystem_queries_consistent():
    system = SetSystem(5, [[0, 2, 4], [1, 2], [3]])
    assert list(system.sets_of(2)) == [0, 1]
    assert list(system.elements_of(0)) == [0, 2, 4]
    assert system.freq_of(2) == 2
    assert system.member_of(0, 4) and not system.member_of(1, 4)
    assert list(system.set_sizes()) == [3, 2, 1]
    assert list(system.freqs()) == [1, 1, 2, 1, 1]


def test_setsystem_file_roundtrip(tmp_path):
    system = SetSystem(5, [[0, 2, 4], [1, 2], [3], []])
    path = tmp_path / "inst.txt"
    system.save(str(path))
    back = SetSystem.load(str(path))
    assert back.n_elements == 5 and back.m_sets == 4
    for s in range(4):
        assert np.array_equal(back.elements_of(s), system.elements_of(s))


def test_vote_cover_single_element():
    system = SetSystem(1, [[0]])
    sol = construct_vote_cover(system, seed=0)
    assert sol.chosen == [0]


def test_vote_cover_below_threshold_equals_greedy_tail():
    # Too few elements for any set to reach the vote threshold: the voting
    # phase only drains nominees and the greedy tail decides everything.
    system = SetSystem(6, [[0, 1, 2], [2, 3], [3, 4, 5], [5]])
    assert system.n_elements < default_vote_threshold(6, 4)
    sol = construct_vote_cover(system, seed=3, checked=True)
    greedy = greedy_set_cover(system)
    assert sorted(sol.chosen) == sorted(greedy.chosen)
    assert sol.stats["added_by_voting"] == 0


def test_vote_cover_planted_bound():
    n = 256
    k = 4
    system = gen_planted_cover(n, k, 24, seed=1)
    bound = 9 * math.log(n) * k
    for seed in range(20):
        sol = construct_vote_cover(system, seed=seed)
        assert check_cover(system, sol.chosen)
        assert len(sol.chosen) <= bound


def test_vote_cover_low_threshold_exercises_voting():
    system = gen_planted_cover(240, 6, 30, seed=7)
    sol = construct_vote_cover(system, seed=5, vote_threshold=4, checked=True)
    assert check_cover(system, sol.chosen)
    assert sol.stats["added_by_voting"] > 0


def test_cvc_stop_early_budget_geq_elements_never_fails():
    system = gen_planted_cover(60, 6, 20, seed=2)
    for seed in range(10):
        sol = cvc_stop_early(system, 60, seed=seed)
        assert sol.ok
        assert check_cover(system, sol.chosen)


def test_cvc_stop_early_small_budget_always_fails():
    # opt = 6, budget below opt/2: success would need a cover of size
    # <= 2 * budget < opt, which cannot exist.
    system = gen_planted_cover(60, 6, 20, seed=2)
    for seed in range(25):
        sol = cvc_stop_early(system, 2, seed=seed)
        assert not sol.ok


def test_cvc_stop_early_generous_budget_success_rate():
    n, k = 128, 4
    system = gen_planted_cover(n, k, 16, seed=3)
    budget = math.ceil(9 * k * math.log(n)) + 1
    wins = sum(cvc_stop_early(system, budget, seed=s).ok for s in range(50))
    assert wins >= 49


def test_cvc_stop_early_success_within_twice_budget():
    system = gen_planted_cover(64, 8, 24, seed=4)
    for seed in range(20):
        for budget in (5, 9, 30):
            sol = cvc_stop_early(system, budget, seed=seed)
            if sol.ok:
                assert len(sol.chosen) <= 2 * budget
                assert check_cover(system, sol.chosen)


@pytest.mark.parametrize("lazy", [False, True])
def test_limited_vote_cover_valid(lazy):
    system = gen_planted_cover(96, 4, 24, seed=5)
    for seed in range(10):
        sol = construct_limited_vote_cover(system, seed=seed, lazy=lazy)
        assert check_cover(system, sol.chosen)


@pytest.mark.parametrize("lazy", [False, True])
def test_limited_vote_cover_single_set(lazy):
    system = SetSystem(5, [[0, 1, 2, 3, 4]])
    sol = construct_limited_vote_cover(system, seed=0, lazy=lazy)
    assert check_cover(system, sol.chosen)
    assert 0 in sol.chosen


@pytest.mark.parametrize("lazy", [False, True])
def test_limited_vote_cover_all_sets_equal_universe(lazy):
    # Every element has frequency m: the first levels filter everything out,
    # yet the final cover must still be valid.
    system = SetSystem(6, [[0, 1, 2, 3, 4, 5]] * 5)
    sol = construct_limited_vote_cover(system, seed=1, lazy=lazy)
    assert check_cover(system, sol.chosen)


def test_limited_vote_cover_uncoverable():
    with pytest.raises(UncoverableError):
        construct_limited_vote_cover(SetSystem(2, [[0]]), seed=0)


@pytest.mark.parametrize("algo", ["vote", "stop", "limited", "lazy"])
def test_solver_determinism(algo):
    system = gen_planted_cover(120, 6, 30, seed=9)

    def run():
        if algo == "vote":
            return construct_vote_cover(system, seed=42)
        if algo == "stop":
            return cvc_stop_early(system, 40, seed=42)
        return construct_limited_vote_cover(system, seed=42, lazy=(algo == "lazy"))

    a, b = run(), run()
    assert a.chosen == b.chosen
    assert a.ok == b.ok


def test_lazy_and_eager_agree_on_validity_not_equality():
    system = gen_planted_cover(200, 8, 40, seed=11)
    for seed in range(5):
        eager = construct_limited_vote_cover(system, seed=seed, lazy=False)
        lazy = construct_limited_vote_cover(system, seed=seed, lazy=True)
        assert check_cover(system, eager.chosen)
        assert check_cover(system, lazy.chosen)


def test_checked_mode_invariants_hold_under_voting():
    system = gen_planted_cover(80, 4, 16, seed=13)
    sol = construct_vote_cover(system, seed=2, vote_threshold=3, checked=True)
    assert check_cover(system, sol.chosen)
