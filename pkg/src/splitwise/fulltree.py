"""Subexponential-time approximation solver.

The driver computes a greedy tree for the current hypothesis set H and keeps
it when either H is already light (p(H) < 1/n^2) or the greedy tree is cheap
(its cost clears a threshold that certifies near-optimality).  Otherwise it
spends a depth budget b on an exact bounded-depth expansion and recurses on
the depth-b leaves that still hold more than one hypothesis.

Two parameter profiles share the engine:

    general:  b = ceil((12*log2 n + log2 R) * n^alpha), keep-greedy threshold
              n^(-alpha/4) * b, plain greedy subcalls
    uniform:  b = ceil((4 + 2*eps/3) * log2 n * n^alpha), threshold
              n^(-alpha/3) * b, and greedy subcalls switch to brute force
              below n0 hypotheses

n, b and both thresholds always refer to the ROOT instance size, not the
current subset, at every recursion level.  Every call is recorded in a
RecursionTrace so the accounting that justifies the cost guarantee (level
families, their disjointness, the exact cost decomposition, per-level weight
contraction) can be audited after the fact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import NonUniformError, ParameterError, StructureError
from .exact import ExactSolver
from .greedy import build_greedy_node
from .instance import DTInstance, Number, require_valid
from .report import AuditLine, make_line
from .tree import DecisionTree, TreeNode, cost, interior

REL_TOL = 1e-9

GENERAL = "general"
UNIFORM = "uniform"


def _log2(x: Number) -> float:
    if isinstance(x, Fraction):
        return math.log2(x.numerator) - math.log2(x.denominator)
    return math.log2(x)


@dataclass(frozen=True)
class FullTreeConfig:
    alpha: float
    mode: str = GENERAL
    ratio_bound: Number = 1      # R: promised p_max/p_min ceiling (general mode)
    eps: float = 0.03            # uniform-mode slack
    n0: int = 12                 # uniform mode: brute-force below this size

    def __post_init__(self):
        if not 0 < self.alpha < 1:
            raise ParameterError(f"alpha must lie in (0,1), got {self.alpha}")
        if self.mode not in (GENERAL, UNIFORM):
            raise ParameterError(f"mode must be '{GENERAL}' or '{UNIFORM}'")
        if self.ratio_bound < 1:
            raise ParameterError("ratio bound must be >= 1")
        if self.eps <= 0:
            raise ParameterError("eps must be > 0")
        if self.n0 < 2:
            raise ParameterError("n0 must be >= 2")


def raw_depth_budget(n: int, cfg: FullTreeConfig) -> int:
    """The uncapped budget formula value."""
    if n < 1:
        raise ParameterError("need n >= 1")
    if cfg.mode == UNIFORM:
        return math.ceil((4.0 + 2.0 * cfg.eps / 3.0) * math.log2(n) * n ** cfg.alpha)
    return math.ceil((12.0 * math.log2(n) + _log2(cfg.ratio_bound)) * n ** cfg.alpha)


def depth_budget(n: int, cfg: FullTreeConfig) -> int:
    """The budget the solver actually uses: the formula value capped at n-1
    (a complete tree never needs more, and the bounded-depth search cost is
    exponential in the budget)."""
    return max(0, min(raw_depth_budget(n, cfg), n - 1))


def keep_greedy_threshold(n: int, cfg: FullTreeConfig, b: int) -> float:
    """Cost level above which the greedy tree is returned as-is."""
    exponent = -cfg.alpha / 3.0 if cfg.mode == UNIFORM else -cfg.alpha / 4.0
    return n ** exponent * b


# decision tags recorded per call
GREEDY_SMALL_WEIGHT = "greedy_small_weight"   # p(H) < 1/n^2
GREEDY_CHEAP = "greedy_cheap"                 # greedy cost >= threshold
EXPANDED = "expanded"                         # bounded-depth search + recursion


@dataclass(frozen=True)
class CallRecord:
    level: int
    mask: int
    weight: Number              # p(H)
    decision: str
    greedy_cost: Number         # C(T_G(H); H), normalized by p(H)
    partial_cost: Number | None  # C_OPT(H, b) normalized, when expanded

    @property
    def size(self) -> int:
        return self.mask.bit_count()


@dataclass
class RecursionTrace:
    mode: str
    alpha: float
    eps: float
    ratio_bound: Number
    n: int
    b: int
    threshold: float
    records: list[CallRecord] = field(default_factory=list)
    total_cost: Number | None = None     # C(T_out), normalized
    total_raw: Number | None = None      # sum_h p_h * d(h), raw units

    def depth(self) -> int:
        return max(r.level for r in self.records)

    def families(self) -> tuple[dict[int, list[CallRecord]], list[CallRecord]]:
        """(expanded records grouped by level, greedy-returning records)."""
        by_level: dict[int, list[CallRecord]] = {}
        greedy: list[CallRecord] = []
        for r in self.records:
            if r.decision == EXPANDED:
                by_level.setdefault(r.level, []).append(r)
            else:
                greedy.append(r)
        return by_level, greedy

    def lines(self) -> list[str]:
        out = []
        for r in self.records:
            extra = "" if r.partial_cost is None else f" partial_cost={r.partial_cost}"
            out.append(
                f"level={r.level} size={r.size} weight={r.weight} "
                f"decision={r.decision} greedy_cost={r.greedy_cost}"
                f" threshold={self.threshold:.6g}{extra}")
        return out


class _Driver:
    # b_override / threshold_override shrink the budget below the formula
    # value so the recursion machinery can be exercised at small n, where the
    # formula otherwise hands back a complete optimal tree in one expansion.
    def __init__(self, inst: DTInstance, cfg: FullTreeConfig,
                 max_expansions: int | None = None,
                 budget_ms: float | None = None, *,
                 b_override: int | None = None,
                 threshold_override: float | None = None):
        self.inst = inst
        self.cfg = cfg
        self.n = inst.n
        self.b = depth_budget(inst.n, cfg) if b_override is None else b_override
        self.threshold = (keep_greedy_threshold(inst.n, cfg, self.b)
                          if threshold_override is None else threshold_override)
        self.total_num = inst.mask_num(inst.full_mask)
        self.solver = ExactSolver(inst, max_expansions=max_expansions,
                                  budget_ms=budget_ms)
        self.trace = RecursionTrace(cfg.mode, cfg.alpha, cfg.eps,
                                    cfg.ratio_bound, inst.n, self.b,
                                    self.threshold)

    def _is_small(self, mask: int) -> bool:
        # normalized mass test: p(H)/p([n]) < 1/n^2, exact by cross-multiplying
        return self.inst.mask_num(mask) * (self.n * self.n) < self.total_num

    def greedy_tree(self, mask: int) -> DecisionTree:
        if (self.cfg.mode == UNIFORM and mask.bit_count() < self.cfg.n0):
            return self.solver.partial_tree(mask, max(mask.bit_count() - 1, 0))
        return DecisionTree(build_greedy_node(self.inst, mask))

    def solve(self, mask: int, level: int) -> TreeNode:
        g = self.greedy_tree(mask)
        gcost = cost(g, self.inst, mask).total
        weight = self.inst.mask_weight(mask)

        if self._is_small(mask):
            self.trace.records.append(CallRecord(
                level, mask, weight, GREEDY_SMALL_WEIGHT, gcost, None))
            return g.root
        if gcost >= self.threshold:
            self.trace.records.append(CallRecord(
                level, mask, weight, GREEDY_CHEAP, gcost, None))
            return g.root

        partial = self.solver.partial_tree(mask, self.b)
        pcost = self.solver.partial_cost(mask, self.b)
        self.trace.records.append(CallRecord(
            level, mask, weight, EXPANDED, gcost, pcost))
        return self._graft(partial.root, 0, level)

    def _graft(self, node: TreeNode, depth: int, level: int) -> TreeNode:
        if node.is_leaf:
            if node.mask.bit_count() <= 1:
                return node
            if depth != self.b:
                raise StructureError(
                    "multi-hypothesis leaf above the depth budget: "
                    "set has no splitting test")
            return self.solve(node.mask, level + 1)
        kids = [(a, self._graft(c, depth + 1, level)) for a, c in node.children]
        return interior(node.test, kids, node.mask)


def _run(inst: DTInstance, cfg: FullTreeConfig, max_expansions, budget_ms):
    require_valid(inst)
    driver = _Driver(inst, cfg, max_expansions, budget_ms)
    tree = DecisionTree(driver.solve(inst.full_mask, 0))
    breakdown = cost(tree, inst)
    driver.trace.total_cost = breakdown.total
    driver.trace.total_raw = breakdown.raw
    return tree, driver.trace


def full_tree(inst: DTInstance, cfg: FullTreeConfig, *,
              max_expansions: int | None = None,
              budget_ms: float | None = None):
    """Run the general-profile solver; returns (tree, trace).

    Errors out before solving if the instance's actual weight ratio exceeds
    the promised ratio_bound — the guarantee would be void.
    """
    if cfg.mode != GENERAL:
        raise ParameterError("config mode must be 'general' here")
    if inst.weight_ratio() > cfg.ratio_bound:
        raise ParameterError(
            f"weight ratio {inst.weight_ratio()} exceeds the promised bound "
            f"{cfg.ratio_bound}")
    return _run(inst, cfg, max_expansions, budget_ms)


def full_tree_uniform(inst: DTInstance, cfg: FullTreeConfig, *,
                      max_expansions: int | None = None,
                      budget_ms: float | None = None):
    """Run the uniform-profile solver; returns (tree, trace)."""
    if cfg.mode != UNIFORM:
        raise ParameterError("config mode must be 'uniform' here")
    if not inst.uniform:
        raise NonUniformError("uniform solver needs uniform weights")
    return _run(inst, cfg, max_expansions, budget_ms)


# ----------------------------------------------------------------------------
# trace audit
# ----------------------------------------------------------------------------

def _close(a, b) -> bool:
    if isinstance(a, Fraction) and isinstance(b, Fraction):
        return a == b
    x, y = float(a), float(b)
    return abs(x - y) <= REL_TOL * max(1.0, abs(x), abs(y))


def approximation_factor(cfg: FullTreeConfig) -> float:
    """The guaranteed multiple of the optimal cost for this configuration."""
    if cfg.mode == UNIFORM:
        return (9.0 + cfg.eps) / cfg.alpha
    return 25.0 / cfg.alpha + _log2(cfg.ratio_bound)


def audit_trace(trace: RecursionTrace, inst: DTInstance,
                exact_c_opt: Number | None = None) -> list[AuditLine]:
    """Check the recursion accounting:

    - recursion_depth: max level within the mode's ceiling
    - family_disjoint: sets within each level family (and within the greedy
      family) are pairwise disjoint
    - cost_decomposition: sum of p(H) * per-call costs reproduces the output
      tree's cost exactly
    - weight_contraction: per level, expanded weight shrinks by the threshold
      factor
    - with an exact optimum: per-level expanded contributions are each at most
      C_opt, and the output cost is within the guaranteed factor
    """
    lines: list[AuditLine] = []
    cap = 3.0 if trace.mode == UNIFORM else 8.0
    lines.append(make_line("recursion_depth", trace.depth(),
                           math.ceil(cap / trace.alpha)))

    by_level, greedy = trace.families()
    overlaps = 0
    for fam in list(by_level.values()) + [greedy]:
        seen = 0
        for r in fam:
            if seen & r.mask:
                overlaps += 1
            seen |= r.mask
    lines.append(make_line("family_disjoint", overlaps, 0))

    zero = Fraction(0) if inst.exact else 0.0
    decomposition = zero
    for r in trace.records:
        part = r.partial_cost if r.decision == EXPANDED else r.greedy_cost
        decomposition += r.weight * part
    lines.append(make_line("cost_decomposition", decomposition,
                           trace.total_raw,
                           passed=_close(decomposition, trace.total_raw)))

    factor = trace.n ** (-trace.alpha / 3.0 if trace.mode == UNIFORM
                         else -trace.alpha / 4.0)
    levels = sorted(by_level)
    top = max(levels, default=-1)
    for i in range(top + 1):
        cur = sum((r.weight for r in by_level.get(i, [])), start=zero)
        nxt = sum((r.weight for r in by_level.get(i + 1, [])), start=zero)
        lines.append(make_line("weight_contraction", nxt,
                               factor * float(cur), level=str(i + 1)))

    if exact_c_opt is not None:
        # per-level contributions are raw, so scale C_opt back to raw units
        total_mass = inst.mask_weight(inst.full_mask)
        for i in levels:
            contrib = sum((r.weight * r.partial_cost for r in by_level[i]),
                          start=zero)
            lines.append(make_line("level_contribution", contrib,
                                   exact_c_opt * total_mass, level=str(i)))
        lines.append(make_line("fulltree_bound", trace.total_cost,
                               _bound_rhs(trace, exact_c_opt)))
    return lines


def _bound_rhs(trace: RecursionTrace, c_opt: Number) -> float:
    if trace.mode == UNIFORM:
        return (9.0 + trace.eps) / trace.alpha * float(c_opt)
    return (25.0 / trace.alpha + _log2(trace.ratio_bound)) * float(c_opt)
