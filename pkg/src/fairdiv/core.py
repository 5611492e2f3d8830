"""Core types for exact fair division of indivisible items.

Values are `fractions.Fraction` end to end: instances parse integers or
"p/q" strings, never floats, so every downstream comparison is exact.

Bundles are plain int bitmasks over item indices (bit j = item j).  That
keeps subset enumeration cheap and makes disjointness/coverage checks one
bitwise op.  Item ids ("g1", ...) exist only at the JSON boundary.

A partition is a tuple of disjoint covering masks in *canonical order*:
non-empty bundles sorted by their lowest item index, empty bundles last.
An allocation is a tuple of masks indexed by agent (not canonicalized —
position is ownership).
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from math import lcm
from typing import Iterable, Iterator, Sequence

__all__ = [
    "FairDivError",
    "InputError",
    "CapacityError",
    "Values",
    "Partition",
    "Allocation",
    "Instance",
    "LotteryEntry",
    "Lottery",
    "parse_value",
    "format_value",
    "mask_from_items",
    "items_of_mask",
    "mask_size",
    "iter_items",
    "iter_submasks",
    "bundle_value",
    "total_value",
    "prop_share",
    "canonical_partition",
    "is_partition_of",
    "argmax_bundles",
    "argmin_bundle",
    "sorted_items_by_value",
    "clear_denominators",
]


class FairDivError(Exception):
    """Base class for errors raised by this package."""


class InputError(FairDivError, ValueError):
    """Malformed or inconsistent input (bad JSON, mismatched ground sets...)."""


class CapacityError(FairDivError, RuntimeError):
    """Instance exceeds a documented size cap for the requested computation."""


# Type aliases used throughout.  `Values` is one agent's valuation row.
Values = tuple[Fraction, ...]
Partition = tuple[int, ...]
Allocation = tuple[int, ...]


def parse_value(raw: object) -> Fraction:
    """Parse an exact value from JSON-land: int, or a "p/q"/"p" string.

    Floats are rejected on purpose — exactness is a package-wide invariant
    and silently rationalizing 0.1 would hide precision bugs.

    >>> parse_value(7)
    Fraction(7, 1)
    >>> parse_value("17/2")
    Fraction(17, 2)
    """
    if isinstance(raw, bool):
        raise InputError(f"value must be an int or 'p/q' string, got {raw!r}")
    if isinstance(raw, int):
        return Fraction(raw)
    if isinstance(raw, str):
        try:
            return Fraction(raw.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise InputError(f"cannot parse value {raw!r}: {exc}") from None
    if isinstance(raw, Fraction):
        return raw
    raise InputError(f"value must be an int or 'p/q' string, got {type(raw).__name__}")


def format_value(v: Fraction) -> object:
    """Render a Fraction for JSON: int when integral, else "p/q"."""
    if v.denominator == 1:
        return int(v)
    return f"{v.numerator}/{v.denominator}"


# ---------------------------------------------------------------------------
# Bitmask bundle helpers


def mask_from_items(items: Iterable[int]) -> int:
    """Bitmask for a collection of item indices.

    >>> mask_from_items([0, 2])
    5
    """
    mask = 0
    for j in items:
        mask |= 1 << j
    return mask


def items_of_mask(mask: int) -> tuple[int, ...]:
    """Sorted item indices of a bitmask.

    >>> items_of_mask(5)
    (0, 2)
    """
    return tuple(iter_items(mask))


def iter_items(mask: int) -> Iterator[int]:
    """Yield item indices of `mask` in increasing order."""
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def mask_size(mask: int) -> int:
    return mask.bit_count()


def iter_submasks(mask: int) -> Iterator[int]:
    """All submasks of `mask`, increasing numeric order, including 0 and mask."""
    sub = 0
    while True:
        yield sub
        if sub == mask:
            return
        # standard trick: next submask in increasing order
        sub = (sub - mask) & mask


def bundle_value(values: Values, mask: int) -> Fraction:
    """Additive value of a bundle."""
    total = Fraction(0)
    for j in iter_items(mask):
        total += values[j]
    return total


def total_value(values: Values) -> Fraction:
    return sum(values, Fraction(0))


def prop_share(values: Values, n: int) -> Fraction:
    """Proportional share v(M)/n."""
    return total_value(values) / n


def sorted_items_by_value(values: Values, mask: int) -> tuple[int, ...]:
    """Item indices of `mask`, non-increasing by value, ties by index."""
    return tuple(sorted(iter_items(mask), key=lambda j: (-values[j], j)))


# ---------------------------------------------------------------------------
# Partitions and allocations


def canonical_partition(bundles: Iterable[int]) -> Partition:
    """Canonicalize bundle order: by lowest item index, empty bundles last.

    >>> canonical_partition([0b100, 0b011, 0])
    (3, 4, 0)
    """
    def key(mask: int) -> tuple[int, int]:
        if mask == 0:
            return (1, 0)
        return (0, (mask & -mask).bit_length())

    return tuple(sorted(bundles, key=key))


def is_partition_of(bundles: Sequence[int], ground: int) -> bool:
    """True iff `bundles` are pairwise disjoint and cover exactly `ground`."""
    seen = 0
    for mask in bundles:
        if mask & seen:
            return False
        seen |= mask
    return seen == ground


def argmax_bundles(values: Values, bundles: Sequence[int]) -> tuple[int, ...]:
    """Indices of all maximum-value bundles (ties kept, positional order)."""
    best: Fraction | None = None
    out: list[int] = []
    for idx, mask in enumerate(bundles):
        v = bundle_value(values, mask)
        if best is None or v > best:
            best = v
            out = [idx]
        elif v == best:
            out.append(idx)
    return tuple(out)


def argmin_bundle(values: Values, bundles: Sequence[int]) -> int:
    """Index of the minimum-value bundle, ties to the lowest index."""
    best_idx = 0
    best = bundle_value(values, bundles[0])
    for idx in range(1, len(bundles)):
        v = bundle_value(values, bundles[idx])
        if v < best:
            best = v
            best_idx = idx
    return best_idx


def clear_denominators(rows: Sequence[Values]) -> tuple[tuple[tuple[int, ...], ...], int]:
    """Scale all rows by the instance-wide LCM of denominators.

    Returns (integer rows, multiplier).  Comparisons and min/max structure
    are preserved exactly; integer arithmetic is what the DP/oracle layers
    want.
    """
    mult = 1
    for row in rows:
        for v in row:
            mult = lcm(mult, v.denominator)
    out = tuple(
        tuple(int(v * mult) for v in row)
        for row in rows
    )
    return out, mult


# ---------------------------------------------------------------------------
# Instance


def validate_instance(inst: "Instance") -> None:
    """Assert that an instance is well formed; each violation is
    reported with the offending agent/item index.

    Checks: unique item ids, at least one agent, one value per item in
    every row, no negative values.
    """
    seen: dict[str, int] = {}
    for j, name in enumerate(inst.items):
        if name in seen:
            raise InputError(
                f"item id {name!r} appears at positions {seen[name]} and {j}")
        seen[name] = j
    if not inst.valuations:
        raise InputError("instance needs at least one agent")
    for i, row in enumerate(inst.valuations):
        if len(row) != len(inst.items):
            raise InputError(
                f"agent {i}: valuation row has {len(row)} entries "
                f"for {len(inst.items)} items")
        for j, v in enumerate(row):
            if v < 0:
                raise InputError(f"agent {i}, item {j}: negative value {v}")


@dataclass(frozen=True)
class Instance:
    """A fair-division instance: named items, one additive valuation per agent.

    `valuations[i][j]` is agent i's value for item j; all values are
    non-negative Fractions.
    """

    items: tuple[str, ...]
    valuations: tuple[Values, ...]

    def __post_init__(self) -> None:
        validate_instance(self)

    @property
    def n(self) -> int:
        return len(self.valuations)

    @property
    def m(self) -> int:
        return len(self.items)

    @property
    def ground(self) -> int:
        return (1 << self.m) - 1

    def values_of(self, agent: int) -> Values:
        return self.valuations[agent]

    # -- construction helpers ------------------------------------------------

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[object]],
                  items: Sequence[str] | None = None) -> "Instance":
        """Build from raw rows of ints/strings/Fractions; default ids g1..gm."""
        if not rows:
            raise InputError("instance needs at least one agent")
        m = len(rows[0])
        if items is None:
            items = tuple(f"g{j + 1}" for j in range(m))
        vals = tuple(tuple(parse_value(v) for v in row) for row in rows)
        return cls(items=tuple(items), valuations=vals)

    @classmethod
    def from_json_dict(cls, data: dict) -> "Instance":
        try:
            agents = data["agents"]
            items = data["items"]
            rows = data["valuations"]
        except (KeyError, TypeError) as exc:
            raise InputError(f"instance JSON missing field: {exc}") from None
        if not isinstance(items, list) or not all(isinstance(s, str) for s in items):
            raise InputError("'items' must be a list of strings")
        if not isinstance(rows, list) or len(rows) != agents:
            raise InputError("'valuations' must be a list with one row per agent")
        return cls.from_rows(rows, items=items)

    @classmethod
    def from_json(cls, text: str) -> "Instance":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise InputError(f"bad instance JSON: {exc}") from None
        return cls.from_json_dict(data)

    def to_json_dict(self) -> dict:
        return {
            "agents": self.n,
            "items": list(self.items),
            "valuations": [[format_value(v) for v in row] for row in self.valuations],
        }

    # -- mask <-> item-id boundary -------------------------------------------

    def bundle_ids(self, mask: int) -> list[str]:
        return [self.items[j] for j in iter_items(mask)]

    def mask_of_ids(self, ids: Iterable[str]) -> int:
        index = {name: j for j, name in enumerate(self.items)}
        mask = 0
        for name in ids:
            try:
                j = index[name]
            except KeyError:
                raise InputError(f"unknown item id {name!r}") from None
            if mask >> j & 1:
                raise InputError(f"duplicate item id {name!r}")
            mask |= 1 << j
        return mask


# ---------------------------------------------------------------------------
# Lotteries (randomized allocations with small support)


@dataclass(frozen=True)
class LotteryEntry:
    prob: Fraction
    allocation: Allocation
    label: str = ""


@dataclass(frozen=True)
class Lottery:
    """A finite-support distribution over allocations for a fixed instance."""

    entries: tuple[LotteryEntry, ...]

    def __post_init__(self) -> None:
        if not self.entries:
            raise InputError("lottery needs at least one entry")
        total = Fraction(0)
        for e in self.entries:
            if e.prob <= 0:
                raise InputError(f"lottery probability must be positive, got {e.prob}")
            total += e.prob
        if total != 1:
            raise InputError(f"lottery probabilities sum to {total}, not 1")

    @property
    def support_size(self) -> int:
        return len(self.entries)

    def expected_value(self, values: Values, agent: int) -> Fraction:
        """Exact expected value of `agent`'s bundle under `values`."""
        acc = Fraction(0)
        for e in self.entries:
            acc += e.prob * bundle_value(values, e.allocation[agent])
        return acc

    def validate_against(self, inst: Instance) -> None:
        """Check every entry is a complete allocation of the instance."""
        for e in self.entries:
            if len(e.allocation) != inst.n:
                raise InputError(
                    f"entry {e.label!r} allocates to {len(e.allocation)} agents, "
                    f"instance has {inst.n}"
                )
            if not is_partition_of(e.allocation, inst.ground):
                raise InputError(f"entry {e.label!r} is not a partition of the items")


if __name__ == "__main__":
    import doctest

    doctest.testmod(verbose=True)
