"""Exhaustive solver: oracle equivalence, budget monotonicity, tie rules.

The oracle is a deliberately naive re-implementation — plain recursion over
frozensets, no memo table, no mask arithmetic — so the two searches share no
code paths beyond the instance container.
"""

import random
from fractions import Fraction

import pytest

from splitwise import (
    BudgetExceededError,
    DTInstance,
    ExactSolver,
    build_greedy_tree,
    cost,
    is_complete,
    optimal_cost,
    optimal_tree,
    partial_tree,
    structural_problems,
)
from conftest import random_valid_instance


def oracle_partial_cost(inst: DTInstance, hs: frozenset, b: int) -> Fraction:
    """Raw min cost of a tree complete w.r.t. hs up to depth b (no memo)."""
    if len(hs) <= 1 or b == 0:
        return Fraction(0)
    best = None
    for j in range(1, inst.m + 1):
        parts = {}
        for h in hs:
            parts.setdefault(inst.answer_of(j, h), set()).add(h)
        if len(parts) < 2:
            continue        # useless here
        total = sum((inst.weight_of(h) for h in hs), start=Fraction(0))
        for part in parts.values():
            total += oracle_partial_cost(inst, frozenset(part), b - 1)
        if best is None or total < best:
            best = total
    assert best is not None, "valid instance ran out of splitting tests"
    return best


# ---------------------------------------------------------------------------
# frozen small cases
# ---------------------------------------------------------------------------

def test_single_hypothesis_is_a_bare_leaf():
    inst = DTInstance([Fraction(1, 2), Fraction(1, 2)], [(1, 2)], 2)
    tree = partial_tree(inst, [2], 5)
    assert tree.root.is_leaf
    assert cost(tree, inst, [2]).total == 0


def test_two_hypotheses_cost_one():
    inst = DTInstance([Fraction(1, 2), Fraction(1, 2)], [(1, 2)], 2)
    assert optimal_cost(inst) == 1


def test_perfect_split_reaches_information_bound():
    inst = DTInstance([Fraction(1, 4)] * 4, [(1, 1, 2, 2), (1, 2, 1, 2)], 2)
    tree = optimal_tree(inst)
    assert cost(tree, inst).total == 2      # = log2(4)
    assert max(cost(tree, inst).depths.values()) == 2


def test_three_singletons_depth_two_suffices():
    inst = DTInstance([Fraction(1, 3)] * 3,
                      [(1, 2, 2), (2, 1, 2), (2, 2, 1)], 2)
    tree = partial_tree(inst, None, 2)
    assert cost(tree, inst).total == Fraction(5, 3)
    assert is_complete(tree, inst)


def test_truncated_symmetric_trio_picks_first_test():
    """Three isolating tests over n=4, budget 1: all symmetric, cost 1."""
    inst = DTInstance(
        [Fraction(1, 4)] * 4,
        [(1, 2, 2, 2), (2, 1, 2, 2), (2, 2, 1, 2)],
        2,
    )
    tree = partial_tree(inst, None, 1)
    assert tree.root.test == 1, "tie should break to the smallest test index"
    br = cost(tree, inst)
    assert br.total == 1
    assert not is_complete(tree, inst)       # the 3-way leaf is unresolved
    assert is_complete(tree, inst, b=1)


def test_budget_zero_returns_truncated_leaf():
    inst = DTInstance([Fraction(1, 2), Fraction(1, 2)], [(1, 2)], 2)
    tree = partial_tree(inst, None, 0)
    assert tree.root.is_leaf
    assert cost(tree, inst).total == 0


# ---------------------------------------------------------------------------
# oracle equivalence
# ---------------------------------------------------------------------------

def test_matches_plain_recursion_oracle():
    """100 instances, n <= 7, m <= 6, b <= 4: memoized == memo-free search."""
    rng = random.Random(41)
    checked = 0
    while checked < 100:
        n = rng.randrange(2, 8)
        m = rng.randrange(2, 7)
        K = rng.choice([2, 3])
        inst = random_valid_instance(rng, n, m, K,
                                     uniform=rng.random() < 0.4)
        b = rng.randrange(0, 5)
        solver = ExactSolver(inst)
        got = solver.partial_cost(None, b)
        want_raw = oracle_partial_cost(inst, frozenset(range(1, n + 1)), b)
        assert got == want_raw, (
            f"case {checked}: solver {got} != oracle {want_raw} "
            f"(n={n} m={m} K={K} b={b})"
        )
        checked += 1


def test_optimal_equals_oracle_at_full_depth():
    rng = random.Random(42)
    for idx in range(30):
        inst = random_valid_instance(rng, rng.randrange(2, 7),
                                     rng.randrange(2, 6), 2)
        want = oracle_partial_cost(inst, frozenset(range(1, inst.n + 1)),
                                   inst.n - 1)
        assert optimal_cost(inst) == want, f"case {idx}"


def test_partial_cost_on_subsets_is_conditional():
    """partial_cost divides by the subset's own mass, not the global mass."""
    rng = random.Random(43)
    for idx in range(25):
        inst = random_valid_instance(rng, rng.randrange(3, 8), 5, 2)
        solver = ExactSolver(inst)
        mask = rng.randrange(1, inst.full_mask + 1)
        hs = frozenset(h for h in range(1, inst.n + 1) if mask >> (h - 1) & 1)
        if len(hs) < 2:
            continue
        b = rng.randrange(1, len(hs))
        raw = oracle_partial_cost(inst, hs, b)
        assert solver.partial_cost(mask, b) == raw / inst.mask_weight(mask), (
            f"case {idx}: conditional normalization broken"
        )


# ---------------------------------------------------------------------------
# structure of returned trees
# ---------------------------------------------------------------------------

def test_returned_trees_realize_their_cost():
    rng = random.Random(44)
    for idx in range(40):
        inst = random_valid_instance(rng, rng.randrange(2, 8),
                                     rng.randrange(2, 6), rng.choice([2, 3]))
        b = rng.randrange(0, inst.n)
        solver = ExactSolver(inst)
        tree = solver.partial_tree(None, b)
        assert structural_problems(tree, inst) == [], f"case {idx}"
        assert is_complete(tree, inst, b=b), f"case {idx}: not complete up to b"
        assert cost(tree, inst).total == solver.partial_cost(None, b), (
            f"case {idx}: tree does not realize the reported cost"
        )
        assert max(cost(tree, inst).depths.values(), default=0) <= b


def test_truncated_cost_grows_into_the_optimum():
    """Each extra budget level forces unresolved leaves to keep splitting, so
    C_OPT(H,b) is non-decreasing in b and tops out at C_OPT(H) by b=|H|-1."""
    rng = random.Random(45)
    for idx in range(25):
        inst = random_valid_instance(rng, rng.randrange(3, 8),
                                     rng.randrange(2, 6), 2)
        solver = ExactSolver(inst)
        costs = [solver.partial_cost(None, b) for b in range(inst.n)]
        full = optimal_cost(inst)
        for b in range(1, len(costs)):
            assert costs[b - 1] <= costs[b], (
                f"case {idx}: truncated cost dropped from b={b-1} to b={b}"
            )
        assert all(c <= full for c in costs), f"case {idx}: truncation inequality"
        assert costs[-1] == full, f"case {idx}: b=n-1 did not reach the optimum"


def test_optimal_never_above_greedy():
    rng = random.Random(46)
    for idx in range(30):
        inst = random_valid_instance(rng, rng.randrange(2, 9),
                                     rng.randrange(2, 7), rng.choice([2, 3]))
        assert optimal_cost(inst) <= cost(build_greedy_tree(inst), inst).total


# ---------------------------------------------------------------------------
# budgets and counters
# ---------------------------------------------------------------------------

def test_expansion_counter_within_envelope():
    """Distinct subproblems expanded <= (mK)^(b+1) (loose counting bound)."""
    rng = random.Random(47)
    for _ in range(15):
        inst = random_valid_instance(rng, rng.randrange(3, 8),
                                     rng.randrange(2, 5), 2)
        b = rng.randrange(1, 4)
        solver = ExactSolver(inst)
        solver.partial_cost(None, b)
        envelope = (inst.m * inst.k) ** (b + 1)
        assert solver.stats.expansions <= envelope, (
            f"{solver.stats.expansions} expansions > envelope {envelope}"
        )


def test_max_expansions_budget_trips():
    rng = random.Random(48)
    inst = random_valid_instance(rng, 10, 8, 2)
    solver = ExactSolver(inst, max_expansions=5)
    with pytest.raises(BudgetExceededError) as ei:
        solver.optimal_cost()
    assert ei.value.expansions is not None and ei.value.expansions > 5


def test_memo_reuse_across_calls():
    rng = random.Random(49)
    inst = random_valid_instance(rng, 7, 5, 2)
    solver = ExactSolver(inst)
    solver.optimal_cost()
    before = solver.stats.expansions
    solver.optimal_cost()           # second call must be all memo hits
    assert solver.stats.expansions == before
    assert solver.stats.memo_hits > 0


def test_results_deterministic_across_solvers():
    rng = random.Random(50)
    for _ in range(10):
        inst = random_valid_instance(rng, rng.randrange(3, 8), 5, 2)
        from splitwise import tree_to_text
        a = tree_to_text(ExactSolver(inst).optimal_tree())
        b = tree_to_text(ExactSolver(inst).optimal_tree())
        assert a == b
