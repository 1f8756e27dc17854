"""Greedy decision-tree construction.

At each node the greedy rule picks the test whose worst (heaviest) answer
part is lightest; ties go to the smallest test index.  The majority answer
k+ of a split is the heaviest nonempty part, ties toward the LARGEST answer
index; the minority mass p^-(v) = p(v) - p(v+) is the quantity the chain
analysis tracks down the tree.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import InvalidInstanceError, StructureError, UnsplittableSetError
from .instance import DTInstance, Number, SetLike, iter_bits
from .tree import DecisionTree, TreeNode, interior, leaf


@dataclass(frozen=True)
class SplitProfile:
    test: int
    part_weights: tuple[Number, ...]  # indexed by answer-1, weights over S only
    part_masks: tuple[int, ...]
    max_weight: Number
    majority_answer: int
    minority_mass: Number
    useless: bool                      # a single answer holds all of S


def _majority_index(part_nums, part_masks) -> int:
    """0-based index of the heaviest nonempty part; ties -> largest index."""
    best = -1
    best_num = None
    for idx, (num, pmask) in enumerate(zip(part_nums, part_masks)):
        if pmask and (best_num is None or num >= best_num):
            best = idx
            best_num = num
    return best


def split_profile(inst: DTInstance, S: SetLike, j: int) -> SplitProfile:
    smask = inst.as_mask(S)
    if smask == 0:
        raise UnsplittableSetError("split profile of an empty set")
    masks = tuple(smask & am for am in inst.answer_masks(j))
    nums = tuple(inst.mask_num(pm) for pm in masks)
    maj = _majority_index(nums, masks)
    return SplitProfile(
        test=j,
        part_weights=tuple(inst.num_to_weight(x) for x in nums),
        part_masks=masks,
        max_weight=inst.num_to_weight(nums[maj]),
        majority_answer=maj + 1,
        # summed directly over the minority elements, not p(S)-majority: the
        # subtraction form drifts by an ulp in float mode, which is enough to
        # flip strict comparisons against element weights
        minority_mass=inst.mask_weight(smask & ~masks[maj]),
        useless=any(pm == smask for pm in masks),
    )


def _greedy_choice_mask(inst: DTInstance, smask: int) -> int:
    """Core argmin loop on raw numerator units; returns a 1-based test index."""
    best_j = 0
    best_num = None
    mask_num = inst.mask_num
    for j in range(1, inst.m + 1):
        worst = None
        useless = False
        for am in inst._answer_masks[j - 1]:
            pm = smask & am
            if pm == smask:
                useless = True
                break
            if pm:
                num = mask_num(pm)
                if worst is None or num > worst:
                    worst = num
        if useless or worst is None:
            continue
        if best_num is None or worst < best_num:
            best_num = worst
            best_j = j
    if best_j == 0:
        raise UnsplittableSetError(
            f"instance invalid at set of size {smask.bit_count()}: no test splits it"
        )
    return best_j


def greedy_choice(inst: DTInstance, S: SetLike) -> int:
    """The greedy test at S: argmin over splitting tests of the max part
    weight, smallest index on ties."""
    smask = inst.as_mask(S)
    if smask.bit_count() < 2:
        raise UnsplittableSetError("greedy choice needs at least two hypotheses")
    return _greedy_choice_mask(inst, smask)


def _check_restriction_valid(inst: DTInstance, smask: int) -> None:
    seen: dict[tuple[int, ...], int] = {}
    for i in iter_bits(smask):
        sig = tuple(row[i] for row in inst.tests)
        if sig in seen:
            raise InvalidInstanceError(
                f"hypotheses {seen[sig]} and {i + 1} are undistinguished",
                undistinguished=(seen[sig], i + 1),
            )
        seen[sig] = i + 1


def build_greedy_node(inst: DTInstance, smask: int) -> TreeNode:
    """Greedy subtree over a raw bitmask (no validity pre-check).

    Iterative post-order build: chain-shaped greedy trees (singleton splits)
    can be as deep as n, which recursion would not survive at large n.
    """
    order: list[int] = []
    plan: dict[int, tuple[int, list[tuple[int, int]]] | None] = {}
    stack = [smask]
    while stack:
        s = stack.pop()
        order.append(s)
        if s.bit_count() == 1:
            plan[s] = None
            continue
        j = _greedy_choice_mask(inst, s)
        kids = [
            (a, s & am)
            for a, am in enumerate(inst._answer_masks[j - 1], start=1)
            if s & am
        ]
        plan[s] = (j, kids)
        stack.extend(part for _, part in kids)
    built: dict[int, TreeNode] = {}
    for s in reversed(order):
        entry = plan[s]
        if entry is None:
            built[s] = leaf(s)
        else:
            j, kids = entry
            built[s] = interior(j, [(a, built[p]) for a, p in kids], s)
    return built[smask]


def build_greedy_tree(inst: DTInstance, H: SetLike = None) -> DecisionTree:
    """T_G over H: complete, greedy at every interior node, deterministic."""
    smask = inst.as_mask(H)
    if smask == 0:
        raise UnsplittableSetError("cannot build a tree over the empty set")
    _check_restriction_valid(inst, smask)
    return DecisionTree(build_greedy_node(inst, smask))


# ----------------------------------------------------------------------------
# majority / minority machinery used by the chain analysis
# ----------------------------------------------------------------------------

def majority_split(inst: DTInstance, smask: int, j: int) -> tuple[int, int]:
    """(majority answer k+, its part mask) for test j at the set `smask`."""
    masks = tuple(smask & am for am in inst.answer_masks(j))
    nums = tuple(inst.mask_num(pm) for pm in masks)
    maj = _majority_index(nums, masks)
    return maj + 1, masks[maj]


def minority_mass_num(inst: DTInstance, smask: int, j: int):
    """p^-(v) in raw numerator units for the node (set smask, test j).

    Summed directly over the minority elements so that float-mode comparisons
    against element weights stay self-consistent (p(S) minus the majority part
    can land an ulp low, making an element look heavier than its own class).
    """
    _, maj_mask = majority_split(inst, smask, j)
    return inst.mask_num(smask & ~maj_mask)


def max_part_num(inst: DTInstance, smask: int, j: int):
    """Heaviest part weight (raw units) of test j over smask, or None when
    the test does not split smask (useless or trivial there)."""
    worst = None
    nonempty = 0
    for am in inst._answer_masks[j - 1]:
        pm = smask & am
        if pm == smask:
            return None
        if pm:
            nonempty += 1
            num = inst.mask_num(pm)
            if worst is None or num > worst:
                worst = num
    return worst if nonempty >= 2 else None


def heavy_hypothesis(inst: DTInstance, smask: int, j: int) -> int | None:
    """The unique h in the set with p_h > p^-(v) for the node (smask, test j),
    or None.

    At a greedy split two such hypotheses are impossible (some test separates
    them, so the lighter one bounds the minority mass from below), hence a
    second find raises in exact mode instead of guessing.  Float rounding can
    manufacture a near-tie duplicate, so float mode resolves to the heaviest
    candidate.
    """
    pminus = minority_mass_num(inst, smask, j)
    found = None
    for i in iter_bits(smask):
        if inst._wnum[i] > pminus:
            if found is not None:
                if inst.exact:
                    raise StructureError(
                        f"two heavy hypotheses ({found}, {i + 1}) at one vertex"
                    )
                if inst._wnum[i] <= inst._wnum[found - 1]:
                    continue
            found = i + 1
    return found
