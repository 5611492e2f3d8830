"""Randomized two-agent allocation: ex-ante envy-free, ex-post EFX,
with a per-agent floor at the minimum seed-bundle value.

The engine (``two_agent_pairs``) maintains one candidate bipartition
per agent, each EFX under its owner's valuation:

1. Seed each candidate by running ``local_search`` on that agent's
   input partition, so the owner's minimum starts at her seed floor
   and can only rise from there.
2. If some candidate has owner-equal bundle values, or its other agent
   weakly prefers the bundle its owner values less, that single
   partition is already envy-free once the other agent picks first —
   return it alone.
3. Otherwise iterate: whenever one candidate's poorer bundle looks
   strictly better to the *other* agent than her own poorer bundle
   (equivalently: a strictly smaller value gap through her eyes — both
   phrasings are asserted to agree), she reruns ``local_search`` on it
   under her own valuation.  If her refreshed candidate happens to be
   EFX for the first agent too, he adopts it — but only when it
   strictly raises his own minimum-bundle value (the adoption guard) —
   and the loop ends.

The result is a uniform lottery over the final candidates where the
non-owner always picks her preferred bundle first.  Every update
strictly raises the updated owner's minimum, and an integer potential
(the sum of both value gaps after clearing denominators) strictly
drops each iteration, which bounds the loop; a defensive cap turns a
bound violation into ``CapacityError`` instead of a hang.

Two baselines reproduce the failure modes this design repairs:
``baseline_bu_alg3_original`` (fixed ``(M, ∅)`` seeding, unconditional
adoption) can strand an agent at 85% of her maximin share, and
``baseline_naive_cut_and_choose`` (no repair pass at all) can lose
both ex-ante proportionality and ex-post EFX.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Callable, Optional, Sequence

from fairdiv.core import (
    CapacityError,
    InputError,
    Lottery,
    LotteryEntry,
    Values,
    bundle_value,
    canonical_partition,
    clear_denominators,
    iter_items,
)
from fairdiv.efx_tools import local_search
from fairdiv.mms_solvers import MmsSolverConfig, mms_partition
from fairdiv.oracles import is_efx_satisfied

__all__ = [
    "two_agent_pairs",
    "choose_from_pair",
    "bobw_two_agents",
    "bobw_two_agents_fptas",
    "baseline_bu_alg3_original",
    "baseline_naive_cut_and_choose",
]

# (owner agent, oriented pair) — the engine's working state and result.
OwnedPair = tuple[int, tuple[int, int]]
EventHook = Optional[Callable[[str, int, tuple[int, int]], None]]


def _check_common_ground(v1: Values, v2: Values,
                         seeds: Sequence[tuple[int, int]]) -> int:
    if len(v1) != len(v2):
        raise InputError("valuations must cover the same items")
    limit = 1 << len(v1)
    grounds = set()
    for a, b in seeds:
        if a & b:
            raise InputError("seed bundles must be disjoint")
        if (a | b) >= limit:
            raise InputError("seed bundles mention unknown items")
        grounds.add(a | b)
    if len(grounds) != 1:
        raise InputError("seed partitions must cover the same ground set")
    return grounds.pop()


def _pair_efx(values: Values, pair: tuple[int, int]) -> bool:
    return is_efx_satisfied(values, pair, 0) and is_efx_satisfied(values, pair, 1)


def _pair_min(values: Values, pair: tuple[int, int]) -> Fraction:
    return min(bundle_value(values, pair[0]), bundle_value(values, pair[1]))


def _loop_cap(v1: Values, v2: Values, ground: int) -> int:
    rows, _ = clear_denominators((v1, v2))
    return sum(rows[0][g] + rows[1][g] for g in iter_items(ground)) + 8


def _early_return(vs: tuple[Values, Values],
                  pairs: list[tuple[int, int]]) -> Optional[OwnedPair]:
    """The single-partition exit: some candidate either leaves its owner
    indifferent, or the other agent weakly prefers its poorer bundle —
    letting the other agent pick first is then envy-free outright."""
    for i in (0, 1):
        lo, hi = pairs[i]
        if bundle_value(vs[i], lo) == bundle_value(vs[i], hi):
            return i, pairs[i]
        if bundle_value(vs[1 - i], lo) >= bundle_value(vs[1 - i], hi):
            return i, pairs[i]
    return None


def two_agent_pairs(v1: Values, v2: Values,
                    seed1: tuple[int, int], seed2: tuple[int, int],
                    guarded_adoption: bool = True,
                    on_event: EventHook = None) -> list[OwnedPair]:
    """Run the candidate-refinement loop; return the final owned pairs.

    The result has one entry (single-partition exit) or two (one pair
    per owner, in owner order).  ``guarded_adoption=False`` switches to
    the historical unconditional adoption, used only by the baseline.
    ``on_event(kind, owner, pair)`` observes every state change with
    kind one of ``"seed"``, ``"refine"``, ``"adopt"``.
    """
    vs = (tuple(v1), tuple(v2))
    ground = _check_common_ground(v1, v2, (seed1, seed2))
    pairs = [local_search(vs[0], *seed1), local_search(vs[1], *seed2)]
    if on_event is not None:
        on_event("seed", 0, pairs[0])
        on_event("seed", 1, pairs[1])
    early = _early_return(vs, pairs)
    if early is not None:
        return [early]

    cap = _loop_cap(v1, v2, ground)
    for _ in range(cap):
        fired = -1
        for i in (0, 1):
            w = vs[1 - i]
            mine, theirs = pairs[i], pairs[1 - i]
            value_form = bundle_value(w, mine[0]) > bundle_value(w, theirs[0])
            gap_form = (bundle_value(w, mine[1]) - bundle_value(w, mine[0])
                        < bundle_value(w, theirs[1]) - bundle_value(w, theirs[0]))
            # both published phrasings of the loop condition must agree
            assert value_form == gap_form
            if gap_form:
                fired = i
                break
        if fired < 0:
            return [(0, pairs[0]), (1, pairs[1])]

        i, other = fired, 1 - fired
        before = _pair_min(vs[other], pairs[other])
        pairs[other] = local_search(vs[other], *pairs[i])
        assert _pair_min(vs[other], pairs[other]) > before
        if on_event is not None:
            on_event("refine", other, pairs[other])
        early = _early_return(vs, pairs)
        if early is not None:
            return [early]
        if _pair_efx(vs[i], pairs[other]):
            own_min = _pair_min(vs[i], pairs[i])
            new_min = _pair_min(vs[i], pairs[other])
            adopt = new_min > own_min if guarded_adoption else True
            # positional phrasing of the guard must match the min phrasing
            assert (new_min > own_min) == (
                bundle_value(vs[i], pairs[i][0])
                < bundle_value(vs[i], pairs[other][0]))
            if adopt:
                pairs[i] = pairs[other]
                if on_event is not None:
                    on_event("adopt", i, pairs[i])
            return [(0, pairs[0]), (1, pairs[1])]

    raise CapacityError("two-agent refinement loop exceeded its "
                        "termination bound; this should be unreachable")


def choose_from_pair(chooser_values: Values, owner_values: Values,
                     pair: tuple[int, int]) -> int:
    """The chooser's pick from a pair.  Her strict preference decides;
    if she is indifferent she takes the bundle the owner values less
    (so an indifferent pick never pushes the owner below her larger
    bundle — picking the other way can leave the owner envious); if the
    owner is indifferent too, the canonically first bundle."""
    lo, hi = bundle_value(chooser_values, pair[0]), bundle_value(chooser_values, pair[1])
    if lo > hi:
        return pair[0]
    if hi > lo:
        return pair[1]
    olo, ohi = bundle_value(owner_values, pair[0]), bundle_value(owner_values, pair[1])
    if olo < ohi:
        return pair[0]
    if ohi < olo:
        return pair[1]
    return canonical_partition(pair)[0]


def _materialize(vs: tuple[Values, Values], owned: list[OwnedPair]) -> Lottery:
    prob = Fraction(1, len(owned))
    entries = []
    for owner, pair in owned:
        chooser = 1 - owner
        picked = choose_from_pair(vs[chooser], vs[owner], pair)
        rest = pair[0] if picked == pair[1] else pair[1]
        alloc = (picked, rest) if chooser == 0 else (rest, picked)
        entries.append(LotteryEntry(prob, alloc, label=f"A^{owner + 1}"))
    return Lottery(tuple(entries))


def bobw_two_agents(v1: Values, v2: Values,
                    seed1: tuple[int, int], seed2: tuple[int, int]) -> Lottery:
    """Uniform lottery (support ≤ 2) that is ex-ante envy-free, ex-post
    EFX for both agents, and pays each agent at least the smaller of
    her own seed bundles in every realized allocation.

    Seeds may cover any common ground mask; mismatched grounds raise
    ``InputError``.

    >>> from fractions import Fraction as F
    >>> v = (F(16), F(12), F(8), F(5))
    >>> lot = bobw_two_agents(v, v, (0b1001, 0b0110), (0b1001, 0b0110))
    >>> [(e.prob, e.allocation) for e in lot.entries]
    [(Fraction(1, 2), (6, 9)), (Fraction(1, 2), (9, 6))]
    """
    vs = (tuple(v1), tuple(v2))
    return _materialize(vs, two_agent_pairs(v1, v2, seed1, seed2))


def bobw_two_agents_fptas(v1: Values, v2: Values, eps: Fraction,
                          state_cap: int = 20_000_000) -> Lottery:
    """`bobw_two_agents` seeded by each agent's (1-eps)-approximate
    two-way share partition, so every realized value is at least
    (1-eps) times that agent's maximin share.  Solver errors propagate.
    """
    if len(v1) != len(v2):
        raise InputError("valuations must cover the same items")
    cfg = MmsSolverConfig(mode="fptas", eps=eps, state_cap=state_cap)
    ground = (1 << len(v1)) - 1
    seed1 = mms_partition(v1, ground, 2, cfg)
    seed2 = mms_partition(v2, ground, 2, cfg)
    return bobw_two_agents(v1, v2, (seed1[0], seed1[1]), (seed2[0], seed2[1]))


def baseline_bu_alg3_original(v1: Values, v2: Values) -> Lottery:
    """The historical two-agent routine: candidates seeded from
    ``(M, ∅)`` and adoption taken unconditionally.  Still ex-ante EF
    and ex-post EFX, but its worst realized value can fall to 85% of
    an agent's maximin share; kept as a regression baseline.
    """
    if len(v1) != len(v2):
        raise InputError("valuations must cover the same items")
    vs = (tuple(v1), tuple(v2))
    ground = (1 << len(v1)) - 1
    seed = (ground, 0)
    return _materialize(
        vs, two_agent_pairs(v1, v2, seed, seed, guarded_adoption=False))


def baseline_naive_cut_and_choose(v1: Values, v2: Values,
                                  cutter_partition1: tuple[int, int],
                                  cutter_partition2: tuple[int, int],
                                  ) -> Lottery:
    """Coin-flip cut-and-choose with no repair: with probability 1/2
    agent 1 cuts via her partition and agent 2 picks first, else the
    roles swap.  Neither ex-ante proportionality nor ex-post EFX is
    guaranteed; kept to reproduce the counterexamples.
    """
    vs = (tuple(v1), tuple(v2))
    _check_common_ground(v1, v2, (cutter_partition1, cutter_partition2))
    half = Fraction(1, 2)
    entries = []
    for cutter, pair in ((0, cutter_partition1), (1, cutter_partition2)):
        chooser = 1 - cutter
        picked = choose_from_pair(vs[chooser], vs[cutter], pair)
        rest = pair[0] if picked == pair[1] else pair[1]
        alloc = (picked, rest) if chooser == 0 else (rest, picked)
        entries.append(LotteryEntry(half, alloc, label=f"cut^{cutter + 1}"))
    return Lottery(tuple(entries))


if __name__ == "__main__":
    import doctest

    doctest.testmod()
