"""Constructive maximin-share partitioners for two and three bundles.

Three modes behind one interface:

* ``exact`` — pseudo-polynomial DP over achievable bundle-sum vectors
  (bitset layers, witness by backtracking).
* ``fptas`` — returns a partition whose minimum bundle value is at
  least (1-eps) times the true maximin share.  Runs the exact DP
  directly whenever the denominator-cleared state space is affordable;
  otherwise bisects a certified decision procedure over a geometric
  threshold grid.  Each decision D(T) scales values at granularity
  ``delta = eps*T/(2m)``, caps single items at ``c = ceil(2m/eps)``,
  and runs the same exact DP on the scaled integers: success (scaled
  maximin >= c - m) certifies a true minimum >= T*(1-eps/2), and any T
  below the true maximin is guaranteed to succeed.  The boundary of the
  grid then pins the output within the (1-eps) factor.
* ``ptas_f_m2`` — two-bundle share approximation by enumerating the
  family of partitions whose second-block tail is a suffix of the
  sorted small items; falls back to the exact DP when m < 3/eps, where
  that is already polynomial for fixed eps.

Everything is deterministic for a fixed config: item order in DPs is
input index order, backtracking prefers lower bundle indices, final
states and enumeration maximizers are tie-broken lexicographically.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional

from fairdiv.core import (
    CapacityError,
    InputError,
    Partition,
    Values,
    bundle_value,
    canonical_partition,
    clear_denominators,
    iter_items,
    mask_size,
)

__all__ = [
    "MmsSolverConfig",
    "mms_partition",
    "ptas_f_m2",
    "make_provider",
    "PartitionProvider",
]

# A provider hands out a k-partition of a ground-set mask under one
# valuation; both allocation pipelines consume this interface.
PartitionProvider = Callable[[Values, int, int], Partition]

_MODES = ("exact", "fptas", "ptas_f_m2")


@dataclass(frozen=True)
class MmsSolverConfig:
    """Solver mode and budget.  `state_cap` bounds DP cells: (V+1) cells
    for two bundles, (V+1)^2 for three, with V the relevant integer total."""

    mode: str = "exact"
    eps: Optional[Fraction] = None
    state_cap: int = 20_000_000

    def __post_init__(self) -> None:
        if self.mode not in _MODES:
            raise InputError(f"unknown solver mode {self.mode!r}")
        if self.mode != "exact":
            if self.eps is None or not (0 < self.eps < 1):
                raise InputError(
                    f"mode {self.mode!r} needs eps in (0,1), got {self.eps}")


# ---------------------------------------------------------------------------
# Shared exact DP on integer values (the workhorse)


def _dp_two(vals: list[int]) -> tuple[int, list[int]]:
    """Max-min 2-split of integer values; returns (opt, bundle index per item)."""
    total = sum(vals)
    layers = [1]  # bitset over achievable first-bundle sums
    reach = 1
    for w in vals:
        reach |= reach << w
        layers.append(reach)
    # complements of reachable sums are reachable, so the optimum is the
    # largest reachable s <= total // 2 (one mask, no per-bit scan)
    below = reach & ((1 << (total // 2 + 1)) - 1)
    best_s = below.bit_length() - 1
    best = best_s
    assign = [1] * len(vals)
    s = best_s
    for i in range(len(vals) - 1, -1, -1):
        w = vals[i]
        if s >= w and layers[i] >> (s - w) & 1:
            assign[i] = 0
            s -= w
    # remaining items stayed in bundle 1; s must now be 0
    assert s == 0, "two-bundle DP backtrack lost its sum"
    return best, assign


def _forward_three(vals: list[int]) -> list[list[int]]:
    """Layer t: rows[s1] = bitset over achievable s2 after the first t items."""
    total = sum(vals)
    width = total + 1
    rows = [0] * width
    rows[0] = 1
    layers = [rows[:]]
    for w in vals:
        nxt = [0] * width
        for s1 in range(width):
            cur = rows[s1]
            acc = 0
            if cur:
                acc = cur | (cur << w)       # item -> bundle 3 / bundle 2
            if s1 >= w and rows[s1 - w]:
                acc |= rows[s1 - w]          # item -> bundle 1
            nxt[s1] = acc
        rows = nxt
        layers.append(rows[:])
    return layers


def _backtrack_three(vals: list[int], layers: list[list[int]],
                     state: tuple[int, int]) -> list[int]:
    assign = [2] * len(vals)
    s1, s2 = state
    for i in range(len(vals) - 1, -1, -1):
        w = vals[i]
        prev = layers[i]
        if s1 >= w and prev[s1 - w] >> s2 & 1:
            assign[i] = 0
            s1 -= w
        elif s2 >= w and prev[s1] >> (s2 - w) & 1:
            assign[i] = 1
            s2 -= w
        else:
            assert prev[s1] >> s2 & 1, "three-bundle DP backtrack lost its state"
    assert s1 == 0 and s2 == 0, "three-bundle DP backtrack lost its sums"
    return assign


def _dp_three(vals: list[int]) -> tuple[int, list[int]]:
    """Max-min 3-split; lexicographically smallest optimal (s1, s2)."""
    total = sum(vals)
    layers = _forward_three(vals)
    rows = layers[-1]
    best = -1
    best_state = (0, 0)
    for s1 in range(total + 1):
        row = rows[s1]
        if not row:
            continue
        rest = total - s1
        # for fixed s1, min(s2, rest - s2) is unimodal in s2 with peak at
        # rest/2: probe the nearest achievable s2 on each side of the peak
        half = rest // 2
        cands = []
        below = row & ((1 << (half + 1)) - 1)
        if below:
            cands.append(below.bit_length() - 1)
        above = row >> (half + 1)
        if above:
            cands.append(half + 1 + (above & -above).bit_length() - 1)
        for s2 in cands:
            cand = min(s1, s2, rest - s2)
            if cand > best:
                best, best_state = cand, (s1, s2)
    return best, _backtrack_three(vals, layers, best_state)


def _dp_three_decision(vals: list[int], r0: int) -> Optional[list[int]]:
    """Assignment with all three bundle sums >= r0, or None; smallest
    qualifying (s1, s2) lexicographically."""
    total = sum(vals)
    if total < 3 * r0:
        return None
    layers = _forward_three(vals)
    rows = layers[-1]
    for s1 in range(r0, total - 2 * r0 + 1):
        row = rows[s1]
        if not row:
            continue
        upper = total - r0 - s1  # s3 >= r0
        window = (row >> r0) & ((1 << (upper - r0 + 1)) - 1)
        if window:
            s2 = r0 + (window & -window).bit_length() - 1
            return _backtrack_three(vals, layers, (s1, s2))
    return None


def _dp_two_decision(vals: list[int], r0: int) -> Optional[list[int]]:
    """Assignment with both bundle sums >= r0, or None."""
    total = sum(vals)
    if total < 2 * r0:
        return None
    layers = [1]
    reach = 1
    for w in vals:
        reach |= reach << w
        layers.append(reach)
    window = (reach >> r0) & ((1 << (total - 2 * r0 + 1)) - 1)
    if not window:
        return None
    s = r0 + (window & -window).bit_length() - 1
    assign = [1] * len(vals)
    for i in range(len(vals) - 1, -1, -1):
        w = vals[i]
        if s >= w and layers[i] >> (s - w) & 1:
            assign[i] = 0
            s -= w
    assert s == 0, "two-bundle decision backtrack lost its sum"
    return assign


def _dp_partition(vals: list[int], idx: tuple[int, ...], k: int) -> tuple[int, Partition]:
    opt, assign = _dp_two(vals) if k == 2 else _dp_three(vals)
    bundles = [0] * k
    for pos, b in enumerate(assign):
        bundles[b] |= 1 << idx[pos]
    return opt, canonical_partition(bundles)


def _check_cells(total: int, k: int, cap: int, what: str) -> None:
    cells = (total + 1) if k == 2 else (total + 1) ** 2
    if cells > cap:
        raise CapacityError(f"{what}: {cells} DP cells exceed cap {cap}")


# ---------------------------------------------------------------------------
# LPT greedy (certified lower bound + degenerate-case partition)


def _lpt(values: Values, idx: tuple[int, ...], k: int) -> tuple[Fraction, list[int]]:
    order = sorted(range(len(idx)), key=lambda p: (-values[idx[p]], p))
    sums = [Fraction(0)] * k
    bundles = [0] * k
    for p in order:
        b = min(range(k), key=lambda t: (sums[t], t))
        sums[b] += values[idx[p]]
        bundles[b] |= 1 << idx[p]
    return min(sums), bundles


# ---------------------------------------------------------------------------
# Public solver


def mms_partition(values: Values, items: int, k: int,
                  cfg: MmsSolverConfig = MmsSolverConfig()) -> Partition:
    """A k-partition of `items` per the configured mode (canonical order).

    exact: minimum bundle value equals the true maximin share.
    fptas: minimum bundle value >= (1-eps) * maximin share.
    ptas_f_m2 (k=2 only): minimum >= min(MMS, (1-1/(kf+1)) * PROP) with
    kf = ceil(3/(2 eps)).
    """
    if k not in (2, 3):
        raise InputError(f"mms_partition supports k in {{2,3}}, got {k}")
    if items == 0:
        return (0,) * k
    if cfg.mode == "ptas_f_m2":
        if k != 2:
            raise InputError("ptas_f_m2 is a two-bundle construction")
        assert cfg.eps is not None
        return _ptas_on_mask(values, items, cfg.eps, cfg)

    idx = tuple(iter_items(items))
    cleared, _ = clear_denominators([values])
    vals = [cleared[0][j] for j in idx]
    total = sum(vals)

    if cfg.mode == "exact":
        _check_cells(total, k, cfg.state_cap, "exact mms_partition")
        return _dp_partition(vals, idx, k)[1]

    # fptas: exact DP when affordable (it trivially meets the contract and
    # realizes the tiny-eps equality for integral values for free)
    assert cfg.eps is not None
    cells = (total + 1) if k == 2 else (total + 1) ** 2
    if cells <= cfg.state_cap:
        return _dp_partition(vals, idx, k)[1]
    return _fptas_scaled(values, idx, k, cfg)


def _fptas_scaled(values: Values, idx: tuple[int, ...], k: int,
                  cfg: MmsSolverConfig) -> Partition:
    """Certified bisection over scaled decisions (see module docstring)."""
    eps = cfg.eps
    assert eps is not None
    m = len(idx)
    lpt_min, lpt_bundles = _lpt(values, idx, k)
    if lpt_min == 0:
        # fewer than k items of positive value: the maximin share is 0 and
        # any partition meets the contract
        return canonical_partition(lpt_bundles)

    c = math.ceil(Fraction(2 * m) / eps)
    r0 = c - m
    total_frac = sum((values[j] for j in idx), Fraction(0))
    t_hi = total_frac / k
    step = 1 + eps / 2

    def decide(t: Fraction) -> Optional[Partition]:
        delta = eps * t / (2 * m)
        scaled = [min(math.floor(values[j] / delta), c) for j in idx]
        stot = sum(scaled)
        _check_cells(stot, k, cfg.state_cap, "fptas decision DP")
        assign = (_dp_two_decision(scaled, r0) if k == 2
                  else _dp_three_decision(scaled, r0))
        if assign is None:
            return None
        bundles = [0] * k
        for pos, b in enumerate(assign):
            bundles[b] |= 1 << idx[pos]
        return canonical_partition(bundles)

    # geometric grid L*(1+eps/2)^j, j = 0..top; D(L) must succeed
    grid = [lpt_min]
    while grid[-1] < t_hi:
        grid.append(grid[-1] * step)
    witness = decide(grid[0])
    assert witness is not None, "decision failed at its certified lower bound"
    lo, hi = 0, len(grid)  # hi: virtual fail just past the top
    while hi - lo > 1:
        mid = (lo + hi) // 2
        got = decide(grid[mid])
        if got is not None:
            lo, witness = mid, got
        else:
            hi = mid
    return witness


# ---------------------------------------------------------------------------
# PTAS over the suffix family (two bundles)


def ptas_f_m2(values: Values, eps: Fraction,
              cfg: MmsSolverConfig | None = None) -> Partition:
    """Two-bundle share approximation over the sorted suffix family.

    Sort items non-increasingly; Z = top kf items (kf = ceil(3/(2 eps))),
    S = the rest.  Enumerate every partition whose first bundle is (any
    subset of Z) union (a suffix of S) and return the max-min partition.
    When m < 3/eps the exact DP is used instead (polynomial for fixed
    eps), so the result is exactly the maximin share there.
    """
    if not 0 < eps < 1:
        raise InputError(f"ptas_f_m2 needs eps in (0,1), got {eps}")
    ground = (1 << len(values)) - 1
    return _ptas_on_mask(values, ground, eps,
                         cfg or MmsSolverConfig(mode="ptas_f_m2", eps=eps))


def _ptas_on_mask(values: Values, items: int, eps: Fraction,
                  cfg: MmsSolverConfig) -> Partition:
    idx = tuple(iter_items(items))
    m = len(idx)
    if m == 0:
        return (0, 0)
    if m < 3 / eps:
        cleared, _ = clear_denominators([values])
        vals = [cleared[0][j] for j in idx]
        _check_cells(sum(vals), 2, cfg.state_cap, "ptas exact fallback")
        return _dp_partition(vals, idx, 2)[1]

    kf = math.ceil(Fraction(3) / (2 * eps))  # kf <= m here
    order = sorted(idx, key=lambda j: (-values[j], j))
    z, s = order[:kf], order[kf:]
    total = bundle_value(values, items)
    suffix_masks = [0]
    for j in reversed(s):  # suffixes of S end at the smallest item
        suffix_masks.append(suffix_masks[-1] | (1 << j))

    best: Fraction | None = None
    best_b1 = 0
    for zpick in range(1 << kf):
        zmask = 0
        zval = Fraction(0)
        for pos in range(kf):
            if zpick >> pos & 1:
                zmask |= 1 << z[pos]
                zval += values[z[pos]]
        run = zval
        for t, smask in enumerate(suffix_masks):
            if t > 0:
                run += values[s[len(s) - t]]
            cand = min(run, total - run)
            if best is None or cand > best:
                best = cand
                best_b1 = zmask | smask
    return canonical_partition([best_b1, items ^ best_b1])


# ---------------------------------------------------------------------------
# Provider factory


def make_provider(cfg: MmsSolverConfig) -> PartitionProvider:
    """Close a config over mms_partition; the pipelines take this callable."""

    def provider(values: Values, items: int, k: int) -> Partition:
        return mms_partition(values, items, k, cfg)

    return provider
