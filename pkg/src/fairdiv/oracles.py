"""Brute-force oracles for fairness notions.

Everything here is ground truth computed by exhaustive search (with
safe pruning), deliberately independent of the constructive algorithms
in the rest of the package.  Oracles are what the test suite trusts.

Size caps are explicit configuration with typed `CapacityError` —
never silent approximation.  Internally valuations are cleared to
integers (instance-wide denominator LCM), which preserves all
comparisons exactly and keeps the hot loops in plain int arithmetic.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from fairdiv.core import (
    Allocation,
    CapacityError,
    InputError,
    Instance,
    Lottery,
    Partition,
    Values,
    bundle_value,
    canonical_partition,
    clear_denominators,
    iter_items,
    mask_size,
    prop_share,
)

__all__ = [
    "DEFAULT_STATE_CAP",
    "DEFAULT_EEFX_EXPONENT",
    "FairnessReport",
    "LotteryAudit",
    "AllocationAudit",
    "exact_mms",
    "efx_dominates",
    "is_efx_satisfied",
    "is_eefx_satisfied",
    "mxs",
    "rmms",
    "fairness_report",
    "check_lottery",
]

# Default brute-force budgets.  k^m assignment states for enumeration
# oracles; 2^r sub-bundle masks for the EEFX certificate search.
DEFAULT_STATE_CAP = 50_000_000
DEFAULT_EEFX_EXPONENT = 22


# ---------------------------------------------------------------------------
# Integer table layer (internal)


def _cleared_row(values: Values) -> tuple[int, ...]:
    rows, _ = clear_denominators([values])
    return rows[0]


def _restrict(values_int: Sequence[int], ground: int) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Remap `ground`'s items to local indices 0..r-1 (bit order preserved).

    Returns (local values, original index per local bit).  Numeric order of
    local masks agrees with numeric order of the original masks, so
    "lexicographically smallest mask" statements survive the remap.
    """
    idx = tuple(iter_items(ground))
    return tuple(values_int[j] for j in idx), idx


def _subset_sums(vals: Sequence[int]) -> list[int]:
    r = len(vals)
    ss = [0] * (1 << r)
    for mask in range(1, 1 << r):
        low = mask & -mask
        ss[mask] = ss[mask ^ low] + vals[low.bit_length() - 1]
    return ss


def _dropmin_table(vals: Sequence[int], ss: Sequence[int]) -> list[int]:
    """dropmin[Y] = v(Y) - min_{g in Y} v(g); dropmin[0] = 0 (vacuous).

    X EFX-dominates Y  iff  v(X) >= dropmin[Y] (values non-negative, so the
    empty-Y convention 0 keeps the equivalence: v(X) >= 0 always).
    """
    r = len(vals)
    minv = [0] * (1 << r)
    out = [0] * (1 << r)
    for mask in range(1, 1 << r):
        low = mask & -mask
        rest = mask ^ low
        lowval = vals[low.bit_length() - 1]
        minv[mask] = lowval if rest == 0 else min(lowval, minv[rest])
        out[mask] = ss[mask] - minv[mask]
    return out


def _best2_tables(ss: Sequence[int], size: int) -> tuple[list[int], list[int]]:
    """For every mask: best 2-split min (maximized) and max (minimized).

    One 3^r submask pass; the split (E, mask\\E) is symmetric so E only
    runs over half the space.
    """
    bestmin = [0] * size
    bestmax = [0] * size
    for mask in range(1, size):
        total = ss[mask]
        bmin = 0          # split (0, mask)
        bmax = total
        e = (0 - mask) & mask  # first non-zero submask in increasing order
        while e:
            rest = mask ^ e
            if e > rest:
                break  # symmetric half done
            a, b = ss[e], ss[rest]
            lo, hi = (a, b) if a <= b else (b, a)
            if lo > bmin:
                bmin = lo
            if hi < bmax:
                bmax = hi
            e = (e - mask) & mask
        bestmin[mask] = bmin
        bestmax[mask] = bmax
    return bestmin, bestmax


class _Tables:
    """Shared integer tables for one valuation restricted to a ground set."""

    def __init__(self, values: Values, ground: int):
        values_int = _cleared_row(values)
        self.vals, self.index = _restrict(values_int, ground)
        self.r = len(self.vals)
        self.full = (1 << self.r) - 1
        self.ss = _subset_sums(self.vals)
        self._dropmin: Optional[list[int]] = None
        self._best2: Optional[tuple[list[int], list[int]]] = None
        self._minmax_memo: dict[tuple[int, int, bool], int] = {}

    @property
    def dropmin(self) -> list[int]:
        if self._dropmin is None:
            self._dropmin = _dropmin_table(self.vals, self.ss)
        return self._dropmin

    @property
    def best2(self) -> tuple[list[int], list[int]]:
        if self._best2 is None:
            self._best2 = _best2_tables(self.ss, 1 << self.r)
        return self._best2

    def to_local(self, mask: int) -> int:
        local = 0
        for bit, j in enumerate(self.index):
            if mask >> j & 1:
                local |= 1 << bit
        return local

    def to_global(self, local: int) -> int:
        out = 0
        for bit, j in enumerate(self.index):
            if local >> bit & 1:
                out |= 1 << j
        return out

    # best k-way split values, memoized; k=1/2 hit the tables.
    def bestmin_k(self, mask: int, k: int) -> int:
        if k == 1:
            return self.ss[mask]
        if k == 2:
            return self.best2[0][mask]
        key = (mask, k, True)
        got = self._minmax_memo.get(key)
        if got is not None:
            return got
        best = 0
        e = 0
        while True:
            cand = min(self.ss[e], self.bestmin_k(mask ^ e, k - 1))
            if cand > best:
                best = cand
            if e == mask:
                break
            e = (e - mask) & mask
        self._minmax_memo[key] = best
        return best

    def bestmax_k(self, mask: int, k: int) -> int:
        if k == 1:
            return self.ss[mask]
        if k == 2:
            return self.best2[1][mask]
        key = (mask, k, False)
        got = self._minmax_memo.get(key)
        if got is not None:
            return got
        best = self.ss[mask]
        e = 0
        while True:
            cand = max(self.ss[e], self.bestmax_k(mask ^ e, k - 1))
            if cand < best:
                best = cand
            if e == mask:
                break
            e = (e - mask) & mask
        self._minmax_memo[key] = best
        return best


# ---------------------------------------------------------------------------
# Maximin share (exhaustive, with pruning)


def exact_mms(values: Values, items: int, k: int,
              state_cap: int = DEFAULT_STATE_CAP) -> tuple[Fraction, Partition]:
    """Exact maximin share over k-partitions of `items`, with witness.

    The witness is deterministic: the lexicographically smallest assignment
    vector (items of `items` in index order, bundles in first-touch order)
    among all optima.  Beyond the k^m state cap, integral instances are
    delegated to the pseudo-polynomial exact solver; non-integral ones get
    a CapacityError.
    """
    if k < 1:
        raise InputError(f"k must be >= 1, got {k}")
    m = mask_size(items)
    if k ** m > state_cap:
        integral = all(values[j].denominator == 1 for j in iter_items(items))
        if integral and k in (2, 3):
            from fairdiv import mms_solvers

            part = mms_solvers.mms_partition(
                values, items, k, mms_solvers.MmsSolverConfig(mode="exact"))
            val = min(bundle_value(values, b) for b in part)
            return val, part
        raise CapacityError(
            f"exact_mms: {k}^{m} assignment states exceed cap {state_cap} "
            "and the pseudo-polynomial fallback needs integral values with "
            "k in {2,3}")

    if m == 0:
        return Fraction(0), (0,) * k
    if k > m:
        # some bundle is necessarily empty, so the MMS is 0; all items in
        # one bundle is the lex-smallest witness (assignment 0,0,...,0)
        return Fraction(0), canonical_partition([items] + [0] * (k - 1))

    values_int = _cleared_row(values)
    idx = tuple(iter_items(items))
    vals = [values_int[j] for j in idx]

    # greedy LPT seed for the branch-and-bound lower bound
    order = sorted(range(m), key=lambda t: (-vals[t], t))
    seed_sums = [0] * k
    for t in order:
        seed_sums[seed_sums.index(min(seed_sums))] += vals[t]
    best = min(seed_sums)

    # pass 1: optimal value.  Assignments restricted to first-touch bundle
    # order (lex-smallest optimum lives there), pruned by the additive
    # upper bound min(sums) + remaining.
    sums = [0] * k
    remaining = [0] * (m + 1)
    for t in range(m - 1, -1, -1):
        remaining[t] = remaining[t + 1] + vals[t]

    def search(t: int, used: int, best: int) -> int:
        if t == m:
            lo = min(sums) if used == k else 0
            return max(best, lo)
        cur = min(sums[:used]) if used == k else 0
        if cur + remaining[t] <= best:
            return best
        top = min(used + 1, k)
        for b in range(top):
            sums[b] += vals[t]
            best = search(t + 1, max(used, b + 1), best)
            sums[b] -= vals[t]
        return best

    opt = search(0, 0, best)

    # pass 2: lexicographically smallest witness achieving opt.
    assign = [0] * m
    found: list[int] | None = None

    def witness(t: int, used: int) -> bool:
        if t == m:
            lo = min(sums) if used == k else 0
            return lo == opt
        cur = min(sums[:used]) if used == k else 0
        if cur + remaining[t] < opt:
            return False
        top = min(used + 1, k)
        for b in range(top):
            sums[b] += vals[t]
            assign[t] = b
            if witness(t + 1, max(used, b + 1)):
                return True
            sums[b] -= vals[t]
        return False

    if not witness(0, 0):  # pragma: no cover - opt is achievable by definition
        raise AssertionError("exact_mms: witness search failed")
    bundles = [0] * k
    for t, b in enumerate(assign):
        bundles[b] |= 1 << idx[t]
    return Fraction(opt) / _scale(values), canonical_partition(bundles)


def _scale(values: Values) -> int:
    """Multiplier between Fraction values and their cleared integers (the LCM)."""
    _, mult = clear_denominators([values])
    return mult


# ---------------------------------------------------------------------------
# EFX domination and satisfaction (polynomial, exact Fractions)


def efx_dominates(values: Values, x: int, y: int) -> bool:
    """True iff v(X) >= v(Y \\ {g}) for every g in Y (strong form).

    Vacuously true for empty Y; zero-valued items in Y count, which is
    what gives the strong form its bite.
    """
    if y == 0:
        return True
    vx = bundle_value(values, x)
    vy = bundle_value(values, y)
    min_item = min(values[j] for j in iter_items(y))
    return vx >= vy - min_item


def is_efx_satisfied(values: Values, alloc: Allocation, agent: int) -> bool:
    """True iff the agent's bundle EFX-dominates every other bundle."""
    if not 0 <= agent < len(alloc):
        raise InputError(f"agent index {agent} out of range")
    own = alloc[agent]
    return all(
        efx_dominates(values, own, other)
        for i, other in enumerate(alloc)
        if i != agent
    )


# ---------------------------------------------------------------------------
# EEFX (exhaustive certificate search)


def is_eefx_satisfied(values: Values, x: int, ground: int, n: int,
                      eefx_exponent: int = DEFAULT_EEFX_EXPONENT,
                      ) -> tuple[bool, Optional[Partition]]:
    """Does some (n-1)-partition of ground \\ X consist of bundles X dominates?

    Returns (flag, certificate); the certificate is the full n-bundle
    partition (X plus the n-1 dominated bundles), canonicalized, and is
    the lexicographically smallest qualifying split by sub-bundle mask
    order.  Exhaustive: 2^r sub-bundles for n = 3, recursion for larger n.
    """
    if x & ~ground:
        raise InputError("bundle is not contained in the ground set")
    if n < 1:
        raise InputError(f"n must be >= 1, got {n}")
    rest = ground & ~x
    r = mask_size(rest)
    if n == 1:
        return (rest == 0, (x,) if rest == 0 else None)
    if (n - 1) ** r > (1 << eefx_exponent):
        raise CapacityError(
            f"is_eefx_satisfied: {n - 1}^{r} splits exceed 2^{eefx_exponent}")

    tab = _Tables(values, ground)
    lx = tab.to_local(x)
    lrest = tab.full ^ lx
    vx = tab.ss[lx]
    dropmin = tab.dropmin

    if n == 2:
        if dropmin[lrest] <= vx:
            return True, canonical_partition([x, ground & ~x])
        return False, None

    if n == 3:
        # sub-bundles in increasing numeric order -> lex-smallest certificate
        e = 0
        while True:
            if dropmin[e] <= vx and dropmin[lrest ^ e] <= vx:
                part = canonical_partition(
                    [x, tab.to_global(e), tab.to_global(lrest ^ e)])
                return True, part
            if e == lrest:
                return False, None
            e = (e - lrest) & lrest

    # general n: peel off the first dominated bundle, recurse
    def split(mask: int, parts: int) -> Optional[list[int]]:
        if parts == 1:
            return [mask] if dropmin[mask] <= vx else None
        e = 0
        while True:
            if dropmin[e] <= vx:
                tail = split(mask ^ e, parts - 1)
                if tail is not None:
                    return [e] + tail
            if e == mask:
                return None
            e = (e - mask) & mask

    got = split(lrest, n - 1)
    if got is None:
        return False, None
    return True, canonical_partition([x] + [tab.to_global(e) for e in got])


# ---------------------------------------------------------------------------
# MXS and RMMS (exhaustive share values)


def mxs(values: Values, ground: int, n: int,
        state_cap: int = DEFAULT_STATE_CAP) -> Fraction:
    """Minimum value the agent can hold while being EFX-satisfied.

    Equivalently the minimum v(X) over EEFX-satisfactory bundles X: the
    other n-1 bundles of a witnessing allocation are exactly a partition
    of the remainder that X dominates.
    """
    if n < 1:
        raise InputError(f"n must be >= 1, got {n}")
    m = mask_size(ground)
    if n ** m > state_cap:
        raise CapacityError(f"mxs: {n}^{m} states exceed cap {state_cap}")
    tab = _Tables(values, ground)
    dropmin = tab.dropmin
    full = tab.full

    def coverable(mask: int, parts: int, vx: int) -> bool:
        if parts == 1:
            return dropmin[mask] <= vx
        if parts == 2:
            e = 0
            while True:
                if dropmin[e] <= vx and dropmin[mask ^ e] <= vx:
                    return True
                if e == mask:
                    return False
                e = (e - mask) & mask
        e = 0
        while True:
            if dropmin[e] <= vx and coverable(mask ^ e, parts - 1, vx):
                return True
            if e == mask:
                return False
            e = (e - mask) & mask

    # ascending by value: the first EEFX-satisfactory bundle is the MXS
    for vx, lx in sorted((tab.ss[q], q) for q in range(full + 1)):
        if n == 1:
            if lx == full:
                return Fraction(vx) / _scale(values)
            continue
        if coverable(full ^ lx, n - 1, vx):
            return Fraction(vx) / _scale(values)
    raise AssertionError("mxs: X = ground is always satisfactory")  # pragma: no cover


def rmms(values: Values, ground: int, n: int,
         state_cap: int = DEFAULT_STATE_CAP) -> Fraction:
    """Largest residual self-feasible threshold t.

    t qualifies iff for every 0 <= k < n and every removal of k disjoint
    bundles each of value strictly below t, the remaining items admit an
    (n-k)-partition with all parts >= t.  Feasibility is downward closed
    and the optimum is an achievable subset-sum value (or 0), so we binary
    search the descending candidate list.
    """
    if n < 1:
        raise InputError(f"n must be >= 1, got {n}")
    m = mask_size(ground)
    if n ** m > state_cap:
        raise CapacityError(f"rmms: {n}^{m} states exceed cap {state_cap}")
    tab = _Tables(values, ground)
    full = tab.full
    ss = tab.ss
    mms_n = tab.bestmin_k(full, n)

    def feasible(t: int) -> bool:
        if t <= 0:
            return True
        if mms_n < t:
            return False
        for k in range(1, n):
            need = n - k
            for d in range(full + 1):
                if tab.bestmax_k(d, k) < t and tab.bestmin_k(full ^ d, need) < t:
                    return False
        return True

    candidates = sorted(set(ss), reverse=True)  # descending; includes 0
    if candidates[-1] != 0:
        candidates.append(0)
    lo, hi = 0, len(candidates) - 1  # feasible index window: hi always feasible
    if feasible(candidates[0]):
        return Fraction(candidates[0]) / _scale(values)
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if feasible(candidates[mid]):
            hi = mid
        else:
            lo = mid
    return Fraction(candidates[hi]) / _scale(values)


# ---------------------------------------------------------------------------
# Reports


@dataclass(frozen=True)
class FairnessReport:
    """Per-agent audit of one allocation.  Optional shares are None unless
    requested; when mms, rmms and mxs are all present the chain
    mxs <= rmms <= mms <= prop is asserted."""

    agent: int
    value: Fraction
    prop: Fraction
    mms: Fraction
    efx_satisfied: bool
    eefx_satisfied: Optional[bool] = None
    eefx_certificate: Optional[Partition] = None
    mxs: Optional[Fraction] = None
    rmms: Optional[Fraction] = None

    def __post_init__(self) -> None:
        assert self.mms <= self.prop, "oracle chain violated: MMS > PROP"
        if self.rmms is not None:
            assert self.rmms <= self.mms, "oracle chain violated: RMMS > MMS"
            if self.mxs is not None:
                assert self.mxs <= self.rmms, "oracle chain violated: MXS > RMMS"


def fairness_report(inst: Instance, alloc: Allocation, agent: int,
                    with_eefx: bool = True, with_mxs: bool = False,
                    with_rmms: bool = False) -> FairnessReport:
    values = inst.values_of(agent)
    flag, cert = (None, None)
    if with_eefx:
        flag, cert = is_eefx_satisfied(values, alloc[agent], inst.ground, inst.n)
    return FairnessReport(
        agent=agent,
        value=bundle_value(values, alloc[agent]),
        prop=prop_share(values, inst.n),
        mms=exact_mms(values, inst.ground, inst.n)[0],
        efx_satisfied=is_efx_satisfied(values, alloc, agent),
        eefx_satisfied=flag,
        eefx_certificate=cert,
        mxs=mxs(values, inst.ground, inst.n) if with_mxs else None,
        rmms=rmms(values, inst.ground, inst.n) if with_rmms else None,
    )


@dataclass(frozen=True)
class AllocationAudit:
    label: str
    efx: tuple[bool, ...]
    eefx: tuple[bool, ...]
    meets_mms_eps: tuple[bool, ...]        # value >= (1-eps) * MMS
    meets_mms_nine_tenths: tuple[bool, ...]  # value >= (9/10-eps) * MMS
    meets_rmms: tuple[bool, ...]
    immx: bool                              # every agent EFX or >= MMS
    immx_eps: bool                          # every agent EFX or >= (1-eps)*MMS


@dataclass(frozen=True)
class LotteryAudit:
    expected: tuple[Fraction, ...]
    prop: tuple[Fraction, ...]
    mms: tuple[Fraction, ...]
    rmms: tuple[Fraction, ...]
    ex_ante_prop: tuple[bool, ...]
    ex_ante_ef: tuple[bool, ...]
    allocations: tuple[AllocationAudit, ...]

    @property
    def all_efx(self) -> bool:
        return all(all(a.efx) for a in self.allocations)

    @property
    def all_eefx(self) -> bool:
        return all(all(a.eefx) for a in self.allocations)

    @property
    def all_immx(self) -> bool:
        return all(a.immx for a in self.allocations)


def check_lottery(lottery: Lottery, inst: Instance, eps: Fraction = Fraction(0),
                  with_eefx: bool = True, with_rmms: bool = True) -> LotteryAudit:
    """Audit a lottery against the oracles.

    Exact expected values vs PROP, pairwise ex-ante envy, and per
    allocation: EFX / EEFX per agent, MMS floors at (1-eps) and
    (9/10-eps), RMMS floor, IMMX.  EEFX and RMMS are brute force and can
    be switched off for speed.
    """
    lottery.validate_against(inst)
    n = inst.n
    expected = tuple(lottery.expected_value(inst.values_of(i), i) for i in range(n))
    props = tuple(prop_share(inst.values_of(i), n) for i in range(n))
    mms_vals = tuple(exact_mms(inst.values_of(i), inst.ground, n)[0] for i in range(n))
    rmms_vals = tuple(
        rmms(inst.values_of(i), inst.ground, n) if with_rmms else Fraction(0)
        for i in range(n))
    ex_ante_ef = tuple(
        all(
            expected[i] >= sum(
                (e.prob * bundle_value(inst.values_of(i), e.allocation[j])
                 for e in lottery.entries), Fraction(0))
            for j in range(n) if j != i
        )
        for i in range(n)
    )

    audits = []
    for e in lottery.entries:
        efx_flags = tuple(
            is_efx_satisfied(inst.values_of(i), e.allocation, i) for i in range(n))
        eefx_flags = tuple(
            is_eefx_satisfied(inst.values_of(i), e.allocation[i], inst.ground, n)[0]
            if with_eefx else False
            for i in range(n))
        vals = tuple(
            bundle_value(inst.values_of(i), e.allocation[i]) for i in range(n))
        meets_eps = tuple(vals[i] >= (1 - eps) * mms_vals[i] for i in range(n))
        meets_910 = tuple(
            vals[i] >= (Fraction(9, 10) - eps) * mms_vals[i] for i in range(n))
        meets_rmms = tuple(
            vals[i] >= rmms_vals[i] if with_rmms else False for i in range(n))
        audits.append(AllocationAudit(
            label=e.label,
            efx=efx_flags,
            eefx=eefx_flags,
            meets_mms_eps=meets_eps,
            meets_mms_nine_tenths=meets_910,
            meets_rmms=meets_rmms,
            immx=all(efx_flags[i] or vals[i] >= mms_vals[i] for i in range(n)),
            immx_eps=all(efx_flags[i] or meets_eps[i] for i in range(n)),
        ))

    return LotteryAudit(
        expected=expected,
        prop=props,
        mms=mms_vals,
        rmms=rmms_vals,
        ex_ante_prop=tuple(expected[i] >= props[i] for i in range(n)),
        ex_ante_ef=ex_ante_ef,
        allocations=tuple(audits),
    )
