"""Partition-transformation subroutines shared by both allocation pipelines.

Four pure constructions:

* ``realloc`` — sweeps the items in non-increasing value order, pulling
  each out of its bundle and dropping it into the currently
  lowest-valued bundle.  The output is EFX for the given valuation and
  the minimum bundle value never decreases, not just end to end but at
  every single step (hook a callback on ``on_step`` to watch).
* ``local_search`` — two-bundle greedy rebalancer: while some item of
  the richer bundle still fits under its value when added to the poorer
  one, move the most valuable such item and re-orient.  Returns the
  pair ordered poor-to-rich; the value gap never grows, so the minimum
  never shrinks, and the result is EFX.
* ``mms_efx_improved_repartition`` — repartitions the union of two
  bundles via a maximin-share provider followed by ``realloc``; if that
  detour ever lands below the input minimum (possible with approximate
  providers), it falls back to ``realloc`` on the original pair, so the
  output minimum is guaranteed not to drop either way and the two
  output bundles EFX-dominate each other.
* ``eefx_certificate_for_prop_bundle`` — for a bundle worth at least a
  proportional (1/3) share of its ground set, constructively splits the
  remainder into two bundles that the given bundle EFX-dominates,
  yielding a three-bundle certificate that passes the verifier.

All tie-breaks are deterministic: item-value ties resolve to the lower
item index, minimum-bundle ties to the lower bundle position.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional

from fairdiv.core import (
    InputError,
    Partition,
    Values,
    bundle_value,
    iter_items,
    sorted_items_by_value,
)
from fairdiv.mms_solvers import PartitionProvider

__all__ = [
    "MmsEfxPartition",
    "realloc",
    "local_search",
    "mms_efx_improved_repartition",
    "build_mms_efx_partition",
    "eefx_certificate_for_prop_bundle",
]


@dataclass(frozen=True)
class MmsEfxPartition:
    """A partition tagged with the agent it was built for and the share
    slack of the provider that built it: every bundle is worth at least
    (1-eps) times that agent's maximin share and the partition is EFX
    under her valuation (enforced by construction, checked in tests)."""

    partition: Partition
    owner: int
    eps: Fraction = Fraction(0)


def realloc(values: Values, partition: Partition,
            on_step: Optional[Callable[[Partition], None]] = None,
            ) -> Partition:
    """Reshuffle ``partition`` into one that is EFX for ``values``.

    Items are processed in non-increasing value order (ties by index).
    Each item is removed from the bundle holding it and re-inserted
    into the bundle of minimal value *after* the removal (ties by
    bundle position, so an item may return to where it came from).  The
    minimum bundle value is non-decreasing across iterations; in
    particular the output minimum is at least the input minimum.

    ``on_step``, when given, is called with the intermediate partition
    after every item placement.

    >>> from fractions import Fraction as F
    >>> v = [F(16), F(12), F(8), F(5)]
    >>> realloc(v, (0b1001, 0b0110))   # {g1,g4},{g2,g3} -> min stays 20
    (9, 6)
    """
    bundles = list(partition)
    ground = 0
    for b in bundles:
        ground |= b
    for item in sorted_items_by_value(values, ground):
        bit = 1 << item
        for k, b in enumerate(bundles):
            if b & bit:
                bundles[k] = b & ~bit
                break
        j = min(range(len(bundles)),
                key=lambda t: bundle_value(values, bundles[t]))
        bundles[j] |= bit
        if on_step is not None:
            on_step(tuple(bundles))
    return tuple(bundles)


def local_search(values: Values, a: int, b: int) -> tuple[int, int]:
    """Rebalance two disjoint bundles into an EFX pair.

    Maintains the orientation value(a) <= value(b).  While the richer
    bundle holds an item that keeps the poorer bundle strictly below it
    even after the move, the most valuable such item migrates (value
    ties by item index) and the pair re-orients.  Returns ``(a', b')``
    with value(a') <= value(b'); the absolute value gap never exceeds
    the input gap, hence min(value) never drops and the pair is EFX.

    >>> from fractions import Fraction as F
    >>> v = [F(16), F(12), F(8), F(5)]
    >>> local_search(v, 0, 0b1111)   # -> ({g2,g4},{g1,g3}) = (17,24)
    (10, 5)
    """
    if a & b:
        raise InputError("local_search needs disjoint bundles")
    va, vb = bundle_value(values, a), bundle_value(values, b)
    if va > vb:
        a, b, va, vb = b, a, vb, va
    while True:
        best = -1
        best_v = Fraction(0)
        for g in iter_items(b):
            vg = values[g]
            if va + vg < vb and (best < 0 or vg > best_v):
                best, best_v = g, vg
        if best < 0:
            return a, b
        bit = 1 << best
        a, b = a | bit, b & ~bit
        va, vb = va + best_v, vb - best_v
        if va > vb:
            a, b, va, vb = b, a, vb, va


def mms_efx_improved_repartition(values: Values, a: int, b: int,
                                 provider: PartitionProvider,
                                 ) -> tuple[int, int]:
    """Repartition the union of two disjoint bundles, never for the worse.

    Asks ``provider`` for a two-way share partition of ``a | b`` under
    ``values`` and runs ``realloc`` over it.  If the result's minimum
    falls below min(value(a), value(b)) — which an approximate provider
    can cause — the fallback reruns ``realloc`` on the original pair
    instead.  Either way the output minimum is at least the input
    minimum and the two bundles EFX-dominate each other.  Provider
    errors propagate.
    """
    if a & b:
        raise InputError("mms_efx_improved_repartition needs disjoint bundles")
    floor = min(bundle_value(values, a), bundle_value(values, b))
    fresh = realloc(values, provider(values, a | b, 2))
    if min(bundle_value(values, s) for s in fresh) < floor:
        fresh = realloc(values, (a, b))
    p0, p1 = fresh
    return p0, p1


def build_mms_efx_partition(values: Values, items: int, k: int,
                            provider: PartitionProvider, owner: int,
                            eps: Fraction = Fraction(0)) -> MmsEfxPartition:
    """Provider partition of ``items`` into ``k`` bundles, made EFX by
    ``realloc`` (which keeps every bundle at the provider's share floor),
    tagged with the owning agent and the provider's share slack."""
    return MmsEfxPartition(partition=realloc(values, provider(values, items, k)),
                           owner=owner, eps=eps)


def eefx_certificate_for_prop_bundle(values: Values, x: int, ground: int,
                                     ) -> Partition:
    """Three-bundle certificate ``(Y, W, X)`` showing a proportional
    bundle is acceptable after enough removals elsewhere.

    Requires value(x) >= value(ground)/3 and x a subset of ground
    (three-agent proportionality).  Splits ``ground \\ x`` in two:

    * if the whole remainder is worth at most ``x``, it rides along as
      ``Y`` with ``W`` empty;
    * otherwise ``Y`` is the shortest non-increasing-value prefix of
      the remainder that strictly exceeds value(x) — dropping its last
      (least) item lands at or below value(x), which is exactly
      EFX-domination — and ``W`` is the rest, worth at most a
      proportional share and hence at most value(x).

    ``X`` is returned verbatim as the last bundle and EFX-dominates the
    other two.
    """
    if x & ~ground:
        raise InputError("certificate bundle must be inside the ground set")
    vx = bundle_value(values, x)
    if 3 * vx < bundle_value(values, ground):
        raise InputError(
            "certificate construction needs a bundle worth at least a "
            "third of the ground set")
    rest = ground & ~x
    if bundle_value(values, rest) <= vx:
        return rest, 0, x
    y = 0
    vy = Fraction(0)
    for item in sorted_items_by_value(values, rest):
        y |= 1 << item
        vy += values[item]
        if vy > vx:
            break
    return y, rest & ~y, x


if __name__ == "__main__":
    import doctest

    doctest.testmod()
