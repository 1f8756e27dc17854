"""Weighted set-cover greedy and its harmonic-free cost bound.

Second opinion on the optimal cover size: a DP over covered bitmasks,
independent of the library's subset enumeration.
"""

import math
import random
from fractions import Fraction

import pytest

from splitwise import (
    BudgetExceededError,
    ParameterError,
    greedy_cover_bound,
    max_set_weight,
    optimal_cover_size,
    weighted_greedy_cover,
)

TOL = 1e-9


def dp_cover_size(universe, sets) -> int:
    """Min number of sets covering the universe, by bitmask DP."""
    elems = sorted(universe)
    pos = {e: i for i, e in enumerate(elems)}
    full = (1 << len(elems)) - 1
    masks = []
    for s in sets:
        m = 0
        for e in s:
            if e in pos:
                m |= 1 << pos[e]
        masks.append(m)
    best = {0: 0}
    frontier = [0]
    while frontier:
        nxt = []
        for state in frontier:
            for m in masks:
                t = state | m
                if t != state and (t not in best or best[t] > best[state] + 1):
                    best[t] = best[state] + 1
                    nxt.append(t)
        frontier = nxt
    return best[full]


def random_cover_family(rng: random.Random, max_u: int = 7, max_sets: int = 9):
    u = rng.randrange(2, max_u + 1)
    universe = list(range(1, u + 1))
    m = rng.randrange(2, max_sets + 1)
    sets = []
    for _ in range(m - 1):
        size = rng.randrange(1, u + 1)
        sets.append(sorted(rng.sample(universe, size)))
    covered = set().union(*map(set, sets))
    leftover = sorted(set(universe) - covered)
    sets.append(leftover if leftover else sorted(rng.sample(universe, rng.randrange(1, u + 1))))
    weights = {}
    for e in universe:
        weights[e] = Fraction(rng.randrange(1, 40), 100)
    return weights, sets


# ---------------------------------------------------------------------------
# greedy cover
# ---------------------------------------------------------------------------

def test_greedy_collects_weight_first():
    weights = {1: Fraction(7, 10), 2: Fraction(2, 10), 3: Fraction(1, 10)}
    sets = [[2, 3], [1]]
    order = weighted_greedy_cover(weights, sets)
    assert order == (2, 1)


def test_greedy_tie_smallest_index():
    weights = {1: Fraction(1, 2), 2: Fraction(1, 2)}
    order = weighted_greedy_cover(weights, [[2], [1]])
    assert order == (1, 2)


def test_greedy_covers_everything_without_repeats():
    rng = random.Random(71)
    for idx in range(60):
        weights, sets = random_cover_family(rng)
        order = weighted_greedy_cover(weights, sets)
        assert len(set(order)) == len(order), f"case {idx}: repeated pick"
        covered = set()
        for j in order:
            covered |= set(sets[j - 1])
        assert covered == set(weights), f"case {idx}: incomplete cover"
        # every picked set contributed something new
        covered = set()
        for j in order:
            gain = set(sets[j - 1]) - covered
            assert gain, f"case {idx}: set {j} picked with zero gain"
            covered |= set(sets[j - 1])


def test_greedy_rejects_non_covering_family():
    with pytest.raises(ParameterError):
        weighted_greedy_cover({1: Fraction(1, 2), 2: Fraction(1, 2)}, [[1]])


# ---------------------------------------------------------------------------
# optimal cover size
# ---------------------------------------------------------------------------

def test_optimal_size_matches_dp():
    rng = random.Random(72)
    for idx in range(60):
        weights, sets = random_cover_family(rng)
        got = optimal_cover_size(list(weights), sets)
        want = dp_cover_size(list(weights), sets)
        assert got == want, f"case {idx}: {got} != DP {want}"


def test_optimal_size_budget_guard():
    universe = list(range(1, 30))
    sets = [[e] for e in universe]
    with pytest.raises(BudgetExceededError):
        optimal_cover_size(universe, sets)


def test_max_set_weight():
    weights = {1: Fraction(1, 4), 2: Fraction(1, 4), 3: Fraction(1, 2)}
    assert max_set_weight(weights, [[1, 2], [3]]) == Fraction(1, 2)
    assert max_set_weight(weights, [[1], [2]]) == Fraction(1, 4)


# ---------------------------------------------------------------------------
# the cover-cost bound
# ---------------------------------------------------------------------------

def test_bound_formula_values():
    # p* = p_min: bound collapses to ell_opt
    assert greedy_cover_bound(Fraction(1, 8), Fraction(1, 8), 3) == pytest.approx(3.0)
    # doubling the ratio adds ln(2) per cover set
    b1 = greedy_cover_bound(Fraction(1, 4), Fraction(1, 8), 5)
    assert b1 == pytest.approx((1 + math.log(2)) * 5)


def test_greedy_length_within_log_ratio_bound():
    """|greedy order| <= (1 + ln(p*/p_min)) * ell_opt on weighted families."""
    rng = random.Random(73)
    for idx in range(120):
        weights, sets = random_cover_family(rng)
        order = weighted_greedy_cover(weights, sets)
        ell = optimal_cover_size(list(weights), sets)
        p_star = max_set_weight(weights, sets)
        p_min = min(weights.values())
        bound = greedy_cover_bound(p_star, p_min, ell)
        assert len(order) <= bound + TOL, (
            f"case {idx}: greedy used {len(order)} sets, bound {bound:.4f} "
            f"(ell_opt={ell})"
        )
        assert ell <= len(order), f"case {idx}: optimal above greedy?"
