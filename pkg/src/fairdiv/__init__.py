"""Exact best-of-both-worlds fair division for two and three agents.

The package computes small-support lotteries over allocations of
indivisible items that are fair in expectation (proportionality /
envy-freeness) while every realized allocation keeps strong per-outcome
guarantees (EFX or certified relaxations, maximin-share floors).  All
arithmetic is exact (`fractions.Fraction`); independent brute-force
oracles back every guarantee in the test suite.
"""

from fairdiv.core import (
    Allocation,
    CapacityError,
    FairDivError,
    InputError,
    Instance,
    Lottery,
    LotteryEntry,
    Partition,
    Values,
)

__version__ = "0.1.0"

__all__ = [
    "Allocation",
    "CapacityError",
    "FairDivError",
    "InputError",
    "Instance",
    "Lottery",
    "LotteryEntry",
    "Partition",
    "Values",
    "__version__",
]
