"""Decision trees: nodes, consistency sets, cost formulas, serialization.

A tree node stores its test (or None for a leaf), its children as
(answer, child) pairs in ascending answer order, and a cached bitmask of the
hypotheses consistent with the root-to-node path.  Absent children are legal
for answers no consistent hypothesis takes.  Depth of the root is 0.

Two cost routes are kept deliberately separate so they can cross-check each
other: `cost` walks each hypothesis down the tree by its answers (the
deepest-consistent-vertex definition, independent of the cached masks), while
`interior_weight_sum` adds up cached interior set weights.  On a complete tree
the two must agree exactly in rational mode.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Union

from .errors import FormatError, IncompleteTreeError, ParameterError, StructureError
from .instance import DTInstance, HypothesisSet, Number, SetLike, iter_bits, members_of


class TreeNode:
    """Immutable tree node; build leaves/interiors bottom-up."""

    __slots__ = ("test", "children", "mask")

    def __init__(self, test: int | None, children: tuple[tuple[int, "TreeNode"], ...], mask: int):
        self.test = test
        self.children = children
        self.mask = mask

    @property
    def is_leaf(self) -> bool:
        return self.test is None

    def child(self, answer: int) -> "TreeNode | None":
        for a, node in self.children:
            if a == answer:
                return node
        return None

    def __repr__(self) -> str:
        kind = "leaf" if self.is_leaf else f"test {self.test}"
        return f"TreeNode({kind}, |L|={self.mask.bit_count()})"


def leaf(mask: int) -> TreeNode:
    return TreeNode(None, (), mask)


def interior(test: int, children: Iterable[tuple[int, TreeNode]], mask: int) -> TreeNode:
    kids = tuple(sorted(children, key=lambda pair: pair[0]))
    if not kids:
        raise ParameterError("interior node needs at least one child")
    return TreeNode(test, kids, mask)


@dataclass(frozen=True)
class NodeRecord:
    id: int
    node: TreeNode
    depth: int
    parent_id: int | None
    parent_answer: int | None


class DecisionTree:
    """A finalized tree: preorder-indexed, immutable."""

    __slots__ = ("root", "records")

    def __init__(self, root: TreeNode):
        self.root = root
        recs: list[NodeRecord] = []
        stack: list[tuple[TreeNode, int, int | None, int | None]] = [(root, 0, None, None)]
        while stack:
            node, depth, pid, pans = stack.pop()
            rid = len(recs)
            recs.append(NodeRecord(rid, node, depth, pid, pans))
            for answer, child in reversed(node.children):
                stack.append((child, depth + 1, rid, answer))
        self.records = tuple(recs)

    def __len__(self) -> int:
        return len(self.records)

    def node(self, node_id: int) -> NodeRecord:
        if not 0 <= node_id < len(self.records):
            raise ParameterError(f"no node with id {node_id}")
        return self.records[node_id]

    def record_of(self, node: TreeNode) -> NodeRecord:
        for rec in self.records:
            if rec.node is node:
                return rec
        raise ParameterError("node does not belong to this tree")

    def depth(self) -> int:
        return max(rec.depth for rec in self.records)

    def leaves(self) -> Iterator[NodeRecord]:
        return (rec for rec in self.records if rec.node.is_leaf)

    def interior_records(self) -> Iterator[NodeRecord]:
        return (rec for rec in self.records if not rec.node.is_leaf)

    def __repr__(self) -> str:
        return f"DecisionTree({len(self.records)} nodes, depth {self.depth()})"


NodeLike = Union[int, TreeNode, NodeRecord]


def _resolve(tree: DecisionTree, v: NodeLike) -> NodeRecord:
    if isinstance(v, NodeRecord):
        v = v.node
    if isinstance(v, TreeNode):
        return tree.record_of(v)
    return tree.node(v)


# ----------------------------------------------------------------------------
# consistency sets
# ----------------------------------------------------------------------------

def consistent_set(tree: DecisionTree, v: NodeLike, inst: DTInstance) -> HypothesisSet:
    """L(v): hypotheses whose answers match every edge label on the root path.

    Returns the cached mask wrapped with its weight; `verify_caches` is the
    falsifier that recomputes these from scratch.
    """
    rec = _resolve(tree, v)
    return inst.hset(rec.node.mask)


def recompute_masks(tree: DecisionTree, inst: DTInstance, H: SetLike = None) -> dict[int, int]:
    """Path-replay oracle: rebuild every L(v) from the instance alone."""
    masks: dict[int, int] = {}
    root_mask = inst.as_mask(H) if H is not None else tree.root.mask
    for rec in tree.records:
        if rec.parent_id is None:
            masks[rec.id] = root_mask
        else:
            parent_mask = masks[rec.parent_id]
            pre = inst.answer_masks(tree.records[rec.parent_id].node.test)[rec.parent_answer - 1]
            masks[rec.id] = parent_mask & pre
    return masks


def verify_caches(tree: DecisionTree, inst: DTInstance) -> None:
    """Recompute all consistency sets and compare against the cached masks."""
    fresh = recompute_masks(tree, inst)
    for rec in tree.records:
        if rec.node.mask != fresh[rec.id]:
            raise StructureError(
                f"node {rec.id}: cached set {members_of(rec.node.mask)} "
                f"!= replayed set {members_of(fresh[rec.id])}"
            )


def structural_problems(tree: DecisionTree, inst: DTInstance) -> list[str]:
    """Invariant scan: partition property, nonempty sets, no useless tests."""
    problems = []
    for rec in tree.records:
        node = rec.node
        if node.mask == 0:
            problems.append(f"node {rec.id}: empty consistent set")
        if node.is_leaf:
            continue
        seen = set()
        union = 0
        for answer, child in node.children:
            if not 1 <= answer <= inst.k:
                problems.append(f"node {rec.id}: child answer {answer} outside 1..{inst.k}")
            if answer in seen:
                problems.append(f"node {rec.id}: duplicate child answer {answer}")
            seen.add(answer)
            expected = node.mask & inst.answer_masks(node.test)[answer - 1]
            if child.mask != expected:
                problems.append(f"node {rec.id}: child mask mismatch on answer {answer}")
            if union & child.mask:
                problems.append(f"node {rec.id}: children overlap")
            union |= child.mask
        if union != node.mask:
            problems.append(f"node {rec.id}: children do not partition the node set")
        if len(node.children) == 1 and node.children[0][1].mask == node.mask:
            problems.append(f"node {rec.id}: useless test {node.test}")
    return problems


# ----------------------------------------------------------------------------
# cost
# ----------------------------------------------------------------------------

@dataclass(frozen=True)
class CostBreakdown:
    total: Number          # (1/p(H)) * sum_h p_h * d_T(h)
    raw: Number            # sum_h p_h * d_T(h), unnormalized
    depths: dict[int, int]  # 1-based hypothesis -> d_T(h)
    normalizer: Number     # p(H)


def depth_of(tree: DecisionTree, inst: DTInstance, h: int) -> int:
    """d_T(h): depth of the deepest vertex consistent with h (answer descent)."""
    if not 1 <= h <= inst.n:
        raise ParameterError(f"hypothesis {h} outside 1..{inst.n}")
    node = tree.root
    depth = 0
    while node.test is not None:
        nxt = node.child(inst.answer_of(node.test, h))
        if nxt is None:
            break
        node = nxt
        depth += 1
    return depth


def cost(tree: DecisionTree, inst: DTInstance, H: SetLike = None) -> CostBreakdown:
    """Weighted average depth of H under the tree.

    Depths come from answer descent, never from cached masks, so this side of
    the Lemma-style cost identity cannot be fooled by corrupted caches.
    """
    hmask = inst.as_mask(H)
    if hmask == 0:
        raise ParameterError("cost undefined for an empty hypothesis set")
    depths: dict[int, int] = {}
    if inst.exact:
        raw_num = 0
        for i in iter_bits(hmask):
            d = depth_of(tree, inst, i + 1)
            depths[i + 1] = d
            raw_num += inst._wnum[i] * d
        norm_num = inst.mask_num(hmask)
        if norm_num == 0:
            raise ParameterError("cost undefined for a weight-zero hypothesis set")
        total = Fraction(raw_num, norm_num)
        return CostBreakdown(total, Fraction(raw_num, inst._wden), depths,
                             Fraction(norm_num, inst._wden))
    raw = 0.0
    for i in iter_bits(hmask):
        d = depth_of(tree, inst, i + 1)
        depths[i + 1] = d
        raw += inst.weights[i] * d
    norm = inst.mask_num(hmask)
    if norm == 0:
        raise ParameterError("cost undefined for a weight-zero hypothesis set")
    return CostBreakdown(raw / norm, raw, depths, norm)


def is_complete(tree: DecisionTree, inst: DTInstance, H: SetLike = None,
                b: int | None = None) -> bool:
    """True iff every h in H is isolated at some leaf (L(v) ∩ H = {h}) or
    already reaches depth >= b.  b=None means no depth escape (infinity)."""
    hmask = inst.as_mask(H) if H is not None else tree.root.mask
    separated = 0
    for rec in tree.leaves():
        inter = rec.node.mask & hmask
        if inter and inter & (inter - 1) == 0:
            separated |= inter
    pending = hmask & ~separated
    if pending == 0:
        return True
    if b is None:
        return False
    return all(depth_of(tree, inst, i + 1) >= b for i in iter_bits(pending))


def interior_weight_sum(tree: DecisionTree, inst: DTInstance) -> Number:
    """Sum of p(v) over interior vertices; equals the cost exactly on complete
    trees (both computed against the tree's own root set)."""
    if not is_complete(tree, inst, H=tree.root.mask, b=None):
        raise IncompleteTreeError("identity requires completeness")
    if inst.exact:
        total = sum(inst.mask_num(rec.node.mask) for rec in tree.interior_records())
        return Fraction(total, inst._wden)
    return float(sum(inst.mask_num(rec.node.mask) for rec in tree.interior_records()))


# ----------------------------------------------------------------------------
# serialization
# ----------------------------------------------------------------------------

def tree_to_text(tree: DecisionTree) -> str:
    """Preorder lines: `node_id depth kind parent_answer` with kind either
    `test <j>` or `leaf`; the root's parent answer prints as `-`."""
    lines = []
    for rec in tree.records:
        pans = "-" if rec.parent_answer is None else str(rec.parent_answer)
        if rec.node.is_leaf:
            lines.append(f"{rec.id} {rec.depth} leaf {pans}")
        else:
            lines.append(f"{rec.id} {rec.depth} test {rec.node.test} {pans}")
    return "\n".join(lines) + "\n"


def tree_to_json_obj(tree: DecisionTree) -> dict:
    def conv(node: TreeNode) -> dict:
        if node.is_leaf:
            return {"leaf": True}
        return {"test": node.test,
                "children": [[a, conv(c)] for a, c in node.children]}
    return conv(tree.root)


def _attach_masks(shape, inst: DTInstance, root_mask: int) -> TreeNode:
    """shape: (test_or_None, [(answer, shape), ...]); recompute every mask."""
    test, kids = shape
    if test is None:
        if kids:
            raise FormatError("leaf node with children")
        return leaf(root_mask)
    if not 1 <= test <= inst.m:
        raise FormatError(f"test {test} outside 1..{inst.m}")
    built = []
    for answer, sub in kids:
        if not 1 <= answer <= inst.k:
            raise FormatError(f"answer {answer} outside 1..{inst.k}")
        child_mask = root_mask & inst.answer_masks(test)[answer - 1]
        if child_mask == 0:
            raise StructureError(
                f"serialized tree inconsistent with instance: empty set under "
                f"test {test} answer {answer}"
            )
        built.append((answer, _attach_masks(sub, inst, child_mask)))
    if not built:
        raise FormatError(f"interior node (test {test}) with no children")
    return interior(test, built, root_mask)


def tree_from_text(text: str, inst: DTInstance, H: SetLike = None) -> DecisionTree:
    """Parse the preorder text form; consistency sets are recomputed against
    `inst` (and `H` as the root set, default full)."""
    entries: list[tuple[int, int | None, int | None]] = []  # (depth, test, parent_answer)
    for lineno, rawline in enumerate(text.splitlines(), start=1):
        line = rawline.strip()
        if not line or line.startswith("#"):
            continue
        toks = line.split()
        try:
            depth = int(toks[1])
            if toks[2] == "leaf":
                test, ptok = None, toks[3]
            elif toks[2] == "test":
                test, ptok = int(toks[3]), toks[4]
            else:
                raise ValueError(f"unknown kind {toks[2]!r}")
            pans = None if ptok == "-" else int(ptok)
        except (IndexError, ValueError) as exc:
            raise FormatError(f"tree line {lineno}: {exc}") from exc
        entries.append((depth, test, pans))
    if not entries:
        raise FormatError("empty tree document")
    if entries[0][0] != 0 or entries[0][2] is not None:
        raise FormatError("first line must be the root (depth 0, parent answer '-')")

    pos = 0

    def parse(depth: int):
        nonlocal pos
        my_depth, test, _ = entries[pos]
        if my_depth != depth:
            raise FormatError(f"preorder depth mismatch at entry {pos}")
        pos += 1
        kids = []
        while pos < len(entries) and entries[pos][0] == depth + 1:
            answer = entries[pos][2]
            if answer is None:
                raise FormatError(f"non-root entry {pos} lacks a parent answer")
            kids.append((answer, parse(depth + 1)))
        return (test, kids)

    shape = parse(0)
    if pos != len(entries):
        raise FormatError(f"dangling entries after preorder walk (at {pos})")
    root_mask = inst.as_mask(H)
    return DecisionTree(_attach_masks(shape, inst, root_mask))


def tree_from_json_obj(obj: dict, inst: DTInstance, H: SetLike = None) -> DecisionTree:
    def conv(o) -> tuple:
        if not isinstance(o, dict):
            raise FormatError("tree nodes must be objects")
        if o.get("leaf"):
            return (None, [])
        if "test" not in o:
            raise FormatError("interior node missing 'test'")
        kids = [(int(a), conv(sub)) for a, sub in o.get("children", [])]
        return (int(o["test"]), kids)

    return DecisionTree(_attach_masks(conv(obj), inst, inst.as_mask(H)))
