"""Instance generators.

Three families:

- gen_random: seeded fixture supply for the audit batteries.  Tests are
  sampled as independent uniform answer vectors and resampled wholesale until
  the instance is valid.
- gen_grid_adversarial: a uniform-weight grid family on which greedy provably
  overpays.  Hypotheses sit in a c_star-column grid; alongside cheap
  column/row-bit tests there is a recursive family of row-membership tests
  whose splits look attractive to greedy but reveal almost nothing.  The
  companion grid_certificate_tree builds the explicit strategy showing
  C_OPT <= 4 * c_star.
- gen_setcover_reduction: a weighted family built from a set-cover instance.
  Each of ell blocks hides one heavy sentinel hypothesis that can only be
  isolated by solving the cover q times over, so the optimal tree cost
  brackets q * B_OPT.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction

from .errors import GenerationError, ParameterError
from .instance import DTInstance, Number, validate_instance
from .tree import DecisionTree, TreeNode, interior, leaf

MAX_ATTEMPTS = 100

PROFILES = ("uniform", "skew", "two-tier")


# ----------------------------------------------------------------------------
# seeded random instances
# ----------------------------------------------------------------------------

def _random_weights(rng: random.Random, n: int, profile: str,
                    ratio: Number, exact: bool) -> list[Number]:
    if profile == "uniform":
        return [Fraction(1, n)] * n if exact else [1.0 / n] * n
    if profile == "skew":
        if exact:
            raws = [Fraction(rng.randrange(1, 101)) for _ in range(n)]
        else:
            raws = [rng.expovariate(1.0) for _ in range(n)]
        total = sum(raws)
        return [w / total for w in raws]
    # two-tier: one heavy hypothesis at ratio * the common light weight
    if ratio < 1:
        raise ParameterError("two-tier ratio must be >= 1")
    if n == 1:
        return [Fraction(1)] if exact else [1.0]
    heavy = Fraction(ratio) if exact else float(ratio)
    total = heavy + (n - 1)
    return [heavy / total] + [1 / total if exact else 1.0 / total] * (n - 1)


def gen_random(n: int, m: int, K: int, seed: int, profile: str = "uniform",
               ratio: Number = 8, exact: bool = True) -> DTInstance:
    """Seeded random instance; same arguments always give the same instance.

    Weights follow the chosen profile; the m test answer vectors are uniform
    over [K]^n, resampled as a whole set until every hypothesis pair is
    distinguished (at most MAX_ATTEMPTS tries, then GenerationError).
    """
    if n < 1 or m < 1 or K < 2:
        raise ParameterError(f"need n >= 1, m >= 1, K >= 2; got {n},{m},{K}")
    if profile not in PROFILES:
        raise ParameterError(f"unknown weight profile {profile!r}")
    rng = random.Random(seed)
    weights = _random_weights(rng, n, profile, ratio, exact)
    if exact:
        total = sum(weights)
        weights = [w / total for w in weights]
    for _ in range(MAX_ATTEMPTS):
        tests = [[rng.randrange(1, K + 1) for _ in range(n)] for _ in range(m)]
        inst = DTInstance(weights, tests, K)
        if validate_instance(inst).ok:
            return inst
    raise GenerationError(
        f"no valid instance in {MAX_ATTEMPTS} attempts for n={n} m={m} K={K} "
        f"seed={seed}; m is likely too small to separate n hypotheses")


# ----------------------------------------------------------------------------
# adversarial grid family
# ----------------------------------------------------------------------------

@dataclass(frozen=True)
class GridLayout:
    """Row-major placement of hypotheses 1..n_star on an r x c_star grid,
    with hypotheses n_star+1..n isolated off-grid, plus the recursive family
    of good row sets and the test numbering of the generated instance."""
    n: int
    c_star: int
    n_star: int
    r: int
    row_bits: int                       # type-3 bit positions are 0..row_bits
    good_sets: tuple[tuple[int, ...], ...]

    def row_of(self, h: int) -> int:
        return (h - 1) // self.c_star + 1

    def col_of(self, h: int) -> int:
        return (h - 1) % self.c_star + 1

    def on_grid(self, h: int) -> bool:
        return 1 <= h <= self.n_star

    # test indices, 1-based, in emission order
    def type1_index(self, h: int) -> int:
        if not self.n_star < h <= self.n:
            raise ParameterError(f"hypothesis {h} is not isolated")
        return h - self.n_star

    def type2_index(self, c: int) -> int:
        return (self.n - self.n_star) + c

    def type3_index(self, c: int, t: int) -> int:
        if not 0 <= t <= self.row_bits:
            raise ParameterError(f"bit {t} outside 0..{self.row_bits}")
        return ((self.n - self.n_star) + self.c_star
                + (c - 1) * (self.row_bits + 1) + t + 1)

    def type4_index(self, k: int) -> int:
        return ((self.n - self.n_star) + self.c_star
                + self.c_star * (self.row_bits + 1) + k)

    @property
    def m(self) -> int:
        return self.type4_index(len(self.good_sets))


def _good_sets(r: int, c_star: int) -> tuple[tuple[int, ...], ...]:
    """Recursive partition family over rows 1..r: the whole set is good, and
    each good set with r' > 1 rows splits into its 1 + floor(r'/c_star)
    lowest-numbered rows and the rest, both good.  Preorder emission."""
    out: list[tuple[int, ...]] = []

    def split(rows: tuple[int, ...]):
        out.append(rows)
        if len(rows) <= 1:
            return
        head = 1 + len(rows) // c_star
        split(rows[:head])
        split(rows[head:])

    split(tuple(range(1, r + 1)))
    return tuple(out)


def grid_layout(n: int, c_star: int) -> GridLayout:
    # The cheap-strategy bound C_OPT <= 4*c_star needs log2(n) <= 2*c_star
    # (row search costs up to log2(n) tests); anything above that is allowed.
    if n < 16:
        raise ParameterError(f"grid family needs n >= 16, got {n}")
    if c_star != int(c_star) or not math.log2(n) <= 2 * c_star or c_star > n:
        raise ParameterError(
            f"need integer c_star with log2(n)/2 <= c_star <= n; "
            f"got c_star={c_star} for n={n}")
    c_star = int(c_star)
    n_star = (n // c_star) * c_star
    r = n_star // c_star
    return GridLayout(n, c_star, n_star, r, math.floor(math.log2(r)),
                      _good_sets(r, c_star))


def gen_grid_adversarial(n: int, c_star: int) -> DTInstance:
    """Uniform-weight grid instance.  Test order: one singleton test per
    off-grid hypothesis, then column membership per column, then per-column
    row-bit tests, then good-set row membership."""
    lay = grid_layout(n, c_star)
    rows = [lay.row_of(h) if lay.on_grid(h) else 0 for h in range(1, n + 1)]
    cols = [lay.col_of(h) if lay.on_grid(h) else 0 for h in range(1, n + 1)]
    tests: list[list[int]] = []
    for h in range(lay.n_star + 1, n + 1):
        tests.append([1 if i == h else 2 for i in range(1, n + 1)])
    for c in range(1, lay.c_star + 1):
        tests.append([1 if cols[i] == c else 2 for i in range(n)])
    for c in range(1, lay.c_star + 1):
        for t in range(lay.row_bits + 1):
            tests.append([1 if cols[i] == c and (rows[i] >> t) & 1 else 2
                          for i in range(n)])
    for good in lay.good_sets:
        members = set(good)
        tests.append([1 if rows[i] in members else 2 for i in range(n)])
    return DTInstance([Fraction(1, n)] * n, tests, 2)


def _column_subtree(lay: GridLayout, c: int, row_set: tuple[int, ...],
                    mask: int) -> TreeNode:
    if len(row_set) == 1:
        return leaf(mask)
    for t in range(lay.row_bits + 1):
        ones = tuple(x for x in row_set if (x >> t) & 1)
        if 0 < len(ones) < len(row_set):
            zeros = tuple(x for x in row_set if not (x >> t) & 1)
            m1 = 0
            for x in ones:
                m1 |= 1 << ((x - 1) * lay.c_star + c - 1)
            return interior(lay.type3_index(c, t),
                            [(1, _column_subtree(lay, c, ones, m1)),
                             (2, _column_subtree(lay, c, zeros, mask & ~m1))],
                            mask)
    raise ParameterError("row numbers not separated by their bits")


def grid_certificate_tree(lay: GridLayout) -> DecisionTree:
    """The cheap strategy the grid construction guarantees: peel off-grid
    hypotheses one by one, walk the columns, then binary-search the row
    within the column.  Its cost certifies C_OPT <= 4 * c_star."""
    def column_mask(c: int) -> int:
        m = 0
        for row in range(1, lay.r + 1):
            m |= 1 << ((row - 1) * lay.c_star + c - 1)
        return m

    rows_all = tuple(range(1, lay.r + 1))
    # innermost: the column chain over c = 1..c_star-1 (the last column is
    # what remains after every other column answered "no")
    def column_chain(c: int, mask: int) -> TreeNode:
        cmask = mask & column_mask(c)
        if c == lay.c_star or mask == cmask:
            return _column_subtree(lay, c, rows_all, cmask) \
                if lay.r > 1 else leaf(cmask)
        sub = _column_subtree(lay, c, rows_all, cmask) if lay.r > 1 \
            else leaf(cmask)
        return interior(lay.type2_index(c),
                        [(1, sub), (2, column_chain(c + 1, mask & ~cmask))],
                        mask)

    node = column_chain(1, (1 << lay.n_star) - 1)
    for h in range(lay.n, lay.n_star, -1):
        hbit = 1 << (h - 1)
        below = node.mask | hbit
        node = interior(lay.type1_index(h), [(1, leaf(hbit)), (2, node)],
                        below)
    return DecisionTree(node)


# ----------------------------------------------------------------------------
# set-cover reduction family
# ----------------------------------------------------------------------------

@dataclass(frozen=True)
class ReductionMeta:
    q: int          # cover repetitions guarding each sentinel
    ell: int        # number of blocks / sentinel hypotheses
    n: int          # hypothesis count of the emitted instance
    ratio: Fraction  # p_max / p_min = 1 + n/ell


def gen_setcover_reduction(n0: int, sets, r: float):
    """Weighted instance from a set-cover instance on elements 1..n0.

    Hypotheses are ell blocks of (q * n0 reals + 1 heavy sentinel); a
    sentinel can only be isolated by queries that, per block-slot, replay a
    full cover of [n0].  Returns (instance, ReductionMeta).  The block
    ordering puts all real hypotheses first and the ell sentinels last.
    """
    if not 0 < r < 1:
        raise ParameterError(f"ratio exponent r must lie in (0,1), got {r}")
    if n0 < 2:
        raise ParameterError("need at least two elements")
    sets = [frozenset(s) for s in sets]
    if not sets:
        raise ParameterError("need at least one set")
    for s in sets:
        if not s or not all(1 <= x <= n0 for x in s):
            raise ParameterError("sets must be nonempty subsets of 1..n0")
    covered = frozenset().union(*sets)
    if len(covered) != n0:
        missing = sorted(set(range(1, n0 + 1)) - covered)
        raise ParameterError(
            f"sets do not cover the elements; missing {missing} "
            "(uncovered elements make hypotheses indistinguishable)")

    q = math.floor(math.log2(n0) / r)
    ell = math.floor(n0 ** (1.0 / r) / (n0 * q + 1))
    if ell < 1:
        raise ParameterError(f"n0 too small for r: block count would be {ell}")
    n = ell * (q * n0 + 1)
    M = len(sets)

    def real_index(h1: int, h2: int, h3: int) -> int:
        return ((h1 - 1) * q + (h2 - 1)) * n0 + h3

    def sentinel_index(h1: int) -> int:
        return ell * q * n0 + h1

    light = Fraction(1, 2 * n)
    weights: list[Fraction] = [light] * (ell * q * n0)
    weights += [light + Fraction(1, 2 * ell)] * ell

    # precompute each hypothesis's (h1, h2, h3); sentinels get h3 = 0
    h1s = [0] * n
    h2s = [0] * n
    h3s = [0] * n
    for h1 in range(1, ell + 1):
        for h2 in range(1, q + 1):
            for h3 in range(1, n0 + 1):
                i = real_index(h1, h2, h3) - 1
                h1s[i], h2s[i], h3s[i] = h1, h2, h3
        i = sentinel_index(h1) - 1
        h1s[i] = h1

    tests: list[list[int]] = []
    for h1 in range(1, ell + 1):
        for h2 in range(1, q + 1):
            for s in sets:
                tests.append([1 if h1s[i] == h1 and h2s[i] == h2
                              and h3s[i] in s else 2 for i in range(n)])
    n0_bits = math.floor(math.log2(n0))
    for h1 in range(1, ell + 1):
        for h2 in range(1, q + 1):
            for s in sets:
                for t in range(n0_bits + 1):
                    tests.append([1 if h1s[i] == h1 and h2s[i] == h2
                                  and h3s[i] in s and (h3s[i] >> t) & 1 else 2
                                  for i in range(n)])
    for t in range(math.floor(math.log2(ell)) + 1):
        tests.append([1 if (h1s[i] >> t) & 1 else 2 for i in range(n)])

    inst = DTInstance(weights, tests, 2)
    return inst, ReductionMeta(q, ell, n, 1 + Fraction(n, ell))
