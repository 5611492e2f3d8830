"""Three-agent randomized allocation: a uniform lottery over six
allocations — two per "divider" agent — that is ex-ante proportional
and whose every allocation gives one agent EFX-satisfaction plus her
proportional share, one agent EFX-satisfaction plus 9/10 of her maximin
share, and one agent an explicit 3-partition certificate plus her full
maximin share.  Approximate pipelines scale the share floors by
``1 - eps``.

``construct_pair`` builds one divider's two allocations:

* The divider's 3-bundle base partition is passed through ``realloc``
  so it is EFX-satisfying for her; she always ends up with one of the
  resulting slots, so her floor is the base partition's minimum.
* If the two non-dividers can take distinct favourite slots, both do
  and the two allocations coincide (``case1``).
* Otherwise both favour the same slot.  Each non-divider repartitions
  that slot together with the companion slot whose repartition has the
  larger minimum (``mms_efx_improved_repartition``); the untouched slot
  is her leftover.  If some agent's repartition leaves the *other*
  agent strictly preferring the leftover, slots stay whole: that agent
  takes the favourite slot, the other takes the leftover, the divider
  keeps the companion (``case2a``).  Otherwise the repartition is
  played as cut-and-choose — the other agent picks her favourite half,
  the subdivider keeps the remaining half, the divider takes the
  leftover — once with each non-divider subdividing (``case2b``).

``bobw3_exact`` / ``bobw3_fptas`` run this per divider on exact /
(1-eps)-approximate base partitions.  ``bobw3_poly`` restores *exact*
ex-ante proportionality at fptas cost with five stages: each agent
first adopts whichever of the three computed base partitions has the
best worst case for her (Stage 1), pairs are built per divider
(Stage 2), cut-and-choose rounds that shortchange one chooser are
replayed through the two-agent engine (Stage 3), and agents may twice
adopt a permutation of a better certificate partition (Stages 4-5,
which trade the certificate guarantee for strictly better floors).
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Optional, Sequence

from fairdiv.bobw2 import choose_from_pair, two_agent_pairs
from fairdiv.core import (
    Allocation,
    InputError,
    Instance,
    Lottery,
    LotteryEntry,
    Partition,
    Values,
    argmax_bundles,
    bundle_value,
    canonical_partition,
    is_partition_of,
)
from fairdiv.efx_tools import mms_efx_improved_repartition, realloc
from fairdiv.mms_solvers import MmsSolverConfig, PartitionProvider, make_provider
from fairdiv.oracles import efx_dominates

__all__ = [
    "CaseTrace",
    "PairResult",
    "AdoptionRecord",
    "StageState",
    "construct_pair",
    "exact_pairs",
    "fptas_pairs",
    "lottery_from_pairs",
    "bobw3_exact",
    "bobw3_fptas",
    "bobw3_poly",
    "bobw3_poly_state",
]

# Per-agent certificate partitions attached to one lottery entry.
CertTriple = tuple[Partition, Partition, Partition]


@dataclass(frozen=True)
class CaseTrace:
    """How one divider's two allocations were formed, for audit.

    Slot indexes refer to positions in the divider's realloc'd base
    partition; non-divider data is ordered by agent index.
    """

    case: str                              # "case1" | "case2a" | "case2b"
    tops: tuple[tuple[int, ...], ...]      # per non-divider: her favourite slots
    picks: tuple[int, ...] = ()            # case1: slot taken per non-divider
    companions: tuple[int, ...] = ()       # case2*: slot repartitioned with the favourite
    qualifiers: tuple[int, ...] = ()       # case2a: agents whose repartition exposes the leftover
    stage3_rebuilt: bool = False           # poly: pair replayed by the two-agent engine
    stage3_trigger: int = -1               # poly: agent whose complaint triggered the replay
    stage3_single: bool = False            # poly: engine returned one partition, reused for both roles


@dataclass(frozen=True)
class PairResult:
    """Two allocations for one divider plus one certificate per agent.

    Each certificate is a 3-partition of all items that contains the
    owning agent's bundle in (at least) the allocation it was assigned
    to; the divider's certificate contains her bundle in both.
    """

    divider: int
    x: Allocation
    y: Allocation
    certificates: CertTriple
    case_trace: CaseTrace


@dataclass(frozen=True)
class AdoptionRecord:
    """One Stage 4/5 adoption: `adopter` rebuilt her pair as two
    permutations of `partition` (a certificate of pair
    `source_divider`); `chooser_order` is the pick order used for the
    first allocation, reversed for the second."""

    stage: int
    adopter: int
    source_divider: int
    partition: Partition
    chooser_order: tuple[int, int, int]


@dataclass(frozen=True)
class StageState:
    """Final state of the five-stage pipeline: the base partition each
    agent settled on in Stage 1, the current pair per divider, and the
    Stage 4/5 adoption log."""

    chosen: tuple[Partition, Partition, Partition]
    pairs: tuple[PairResult, PairResult, PairResult]
    adoptions: tuple[AdoptionRecord, ...] = ()


# ---------------------------------------------------------------------------
# Small helpers


def _check_three(inst: Instance) -> None:
    if inst.n != 3:
        raise InputError(f"this construction needs exactly 3 agents, got {inst.n}")


def _check_eps(eps: Fraction) -> Fraction:
    eps = Fraction(eps)
    if not 0 < eps < 1:
        raise InputError(f"eps must be in (0,1), got {eps}")
    return eps


def _check_bases(inst: Instance, bases: Sequence[Partition]) -> tuple[Partition, ...]:
    if len(bases) != 3:
        raise InputError(f"need one base partition per agent, got {len(bases)}")
    out = []
    for base in bases:
        base = tuple(base)
        if len(base) != 3 or not is_partition_of(base, inst.ground):
            raise InputError("each base must partition the items into 3 bundles")
        out.append(base)
    return tuple(out)


def _min_part(values: Values, parts: Sequence[int]) -> Fraction:
    return min(bundle_value(values, p) for p in parts)


def _pick_top(values: Values, bundles: Sequence[int]) -> int:
    """The agent's favourite bundle; ties go to the canonically first."""
    return max(canonical_partition(bundles), key=lambda m: bundle_value(values, m))


def _other(pair: tuple[int, int], picked: int) -> int:
    return pair[0] if picked == pair[1] else pair[1]


def _assert_pair(ground: int, vs: Sequence[Values], pr: PairResult) -> PairResult:
    for alloc in (pr.x, pr.y):
        assert is_partition_of(alloc, ground)
    for t in range(3):
        cert = pr.certificates[t]
        assert is_partition_of(cert, ground)
        assert pr.x[t] in cert or pr.y[t] in cert
    d = pr.divider
    assert pr.x[d] in pr.certificates[d] and pr.y[d] in pr.certificates[d]
    return pr


# ---------------------------------------------------------------------------
# Per-divider pair construction


def construct_pair(divider: int, inst: Instance, base: Partition,
                   provider2: PartitionProvider) -> PairResult:
    """The divider's two allocations plus per-agent certificates.

    `base` must be a 3-bundle partition of the instance's items; it is
    realloc'd under the divider's valuation before anything else, so
    the divider's bundle in both allocations is one of the resulting
    slots and is worth at least the base partition's minimum to her.
    `provider2` supplies 2-bundle partitions for the repartition path.
    """
    _check_three(inst)
    if divider not in (0, 1, 2):
        raise InputError(f"divider must be 0, 1 or 2, got {divider}")
    base = tuple(base)
    if len(base) != 3 or not is_partition_of(base, inst.ground):
        raise InputError("base must partition the items into 3 bundles")

    vs = inst.valuations
    others = tuple(t for t in range(3) if t != divider)
    slots = realloc(vs[divider], base)
    tops = tuple(argmax_bundles(vs[l], slots) for l in others)

    if tops[0] != tops[1] or len(tops[0]) > 1:
        pr = _case1(divider, others, slots, tops)
    else:
        pr = _case2(divider, others, vs, slots, tops, provider2)
    for alloc in (pr.x, pr.y):
        assert alloc[divider] in slots
    return _assert_pair(inst.ground, vs, pr)


def _alloc3(assign: dict[int, int]) -> Allocation:
    out = [0, 0, 0]
    for agent, mask in assign.items():
        out[agent] = mask
    return tuple(out)


def _case1(divider: int, others: tuple[int, int], slots: Partition,
           tops: tuple[tuple[int, ...], ...]) -> PairResult:
    # Both non-dividers can take favourite slots that are distinct:
    # smallest such (pick_a, pick_b) by slot position.
    a, b = others
    picks = next((pa, pb) for pa in tops[0] for pb in tops[1] if pa != pb)
    rest = ({0, 1, 2} - set(picks)).pop()
    alloc = _alloc3({a: slots[picks[0]], b: slots[picks[1]], divider: slots[rest]})
    certs = [alloc] * 3
    certs[divider] = slots
    trace = CaseTrace(case="case1", tops=tops, picks=picks)
    return PairResult(divider, alloc, alloc, tuple(certs), trace)


def _case2(divider: int, others: tuple[int, int], vs: Sequence[Values],
           slots: Partition, tops: tuple[tuple[int, ...], ...],
           provider2: PartitionProvider) -> PairResult:
    a, b = others
    common = tops[0][0]
    top_bundle = slots[common]
    rest_slots = tuple(s for s in (0, 1, 2) if s != common)

    # Each non-divider repartitions the favourite slot with the
    # companion slot whose repartition minimum is larger (ties to the
    # positionally first); the untouched slot is her leftover.
    halves: dict[int, tuple[int, int]] = {}
    leftover: dict[int, int] = {}
    companion: dict[int, int] = {}
    for l in others:
        cands = [(s, mms_efx_improved_repartition(vs[l], top_bundle, slots[s],
                                                  provider2))
                 for s in rest_slots]
        (s1, p1), (s2, p2) = cands
        if _min_part(vs[l], p2) > _min_part(vs[l], p1):
            companion[l], halves[l] = s2, p2
            leftover[l] = slots[s1]
        else:
            companion[l], halves[l] = s1, p1
            leftover[l] = slots[s2]
        # the chosen repartition's minimum weakly beats the leftover:
        # the favourite slot alone is already worth at least the
        # leftover, and repartitioning never lowers the minimum
        assert _min_part(vs[l], halves[l]) >= bundle_value(vs[l], leftover[l])

    def exposes_leftover(r: int) -> bool:
        # does the *other* agent strictly prefer r's untouched slot to
        # both halves of r's repartition?
        l = b if r == a else a
        return max(bundle_value(vs[l], halves[r][0]),
                   bundle_value(vs[l], halves[r][1])) \
            < bundle_value(vs[l], leftover[r])

    quals = tuple(r for r in others if exposes_leftover(r))
    certs: list[Partition] = [()] * 3
    certs[divider] = slots

    if quals:
        # case2a: slots stay whole.  The first qualifying agent takes
        # the favourite slot, the other takes her leftover (which she
        # strictly prefers to both halves — that preference is her
        # certificate), the divider keeps the companion slot.
        r = quals[0]
        l = b if r == a else a
        x = _alloc3({r: top_bundle, l: leftover[r], divider: slots[companion[r]]})
        certs[l] = (halves[r][0], halves[r][1], leftover[r])
        if l in quals:
            y = _alloc3({l: top_bundle, r: leftover[l], divider: slots[companion[l]]})
            certs[r] = (halves[l][0], halves[l][1], leftover[l])
        else:
            y = x
            certs[r] = x
        trace = CaseTrace(case="case2a", tops=tops,
                          companions=(companion[a], companion[b]),
                          qualifiers=quals)
        return PairResult(divider, x, y, tuple(certs), trace)

    # case2b: play each repartition as cut-and-choose.  In the first
    # allocation the lower-indexed non-divider subdivides and the other
    # chooses; in the second the roles are swapped.
    allocs: dict[int, Allocation] = {}
    for j in others:
        k = b if j == a else a
        picked = _pick_top(vs[k], halves[j])
        allocs[j] = _alloc3({k: picked, j: _other(halves[j], picked),
                             divider: leftover[j]})
    certs[b] = (halves[a][0], halves[a][1], leftover[a])
    certs[a] = (halves[b][0], halves[b][1], leftover[b])
    trace = CaseTrace(case="case2b", tops=tops,
                      companions=(companion[a], companion[b]))
    return PairResult(divider, allocs[a], allocs[b], tuple(certs), trace)


# ---------------------------------------------------------------------------
# Exact and fptas pipelines: one pair per divider, uniform over six


def _solver_cfg(state_cap: Optional[int], mode: str = "exact",
                eps: Optional[Fraction] = None) -> MmsSolverConfig:
    extra = {} if state_cap is None else {"state_cap": state_cap}
    return MmsSolverConfig(mode=mode, eps=eps, **extra)


def exact_pairs(inst: Instance,
                bases: Optional[Sequence[Partition]] = None,
                *, state_cap: Optional[int] = None,
                ) -> tuple[PairResult, PairResult, PairResult]:
    """One pair per divider from exact maximin base partitions."""
    _check_three(inst)
    provider = make_provider(_solver_cfg(state_cap))
    if bases is None:
        bases = tuple(provider(inst.valuations[i], inst.ground, 3)
                      for i in range(3))
    else:
        bases = _check_bases(inst, bases)
    return tuple(construct_pair(i, inst, bases[i], provider) for i in range(3))


def fptas_pairs(inst: Instance, eps: Fraction,
                bases: Optional[Sequence[Partition]] = None,
                *, state_cap: Optional[int] = None,
                ) -> tuple[PairResult, PairResult, PairResult]:
    """One pair per divider from (1-eps)-approximate base partitions."""
    _check_three(inst)
    eps = _check_eps(eps)
    provider = make_provider(_solver_cfg(state_cap, "fptas", eps))
    if bases is None:
        bases = tuple(provider(inst.valuations[i], inst.ground, 3)
                      for i in range(3))
    else:
        bases = _check_bases(inst, bases)
    return tuple(construct_pair(i, inst, bases[i], provider) for i in range(3))


def _certifies(values: Values, bundle: int, partition: Partition) -> bool:
    """Does `partition` witness EEFX for an agent holding `bundle`?"""
    return bundle in partition and all(
        efx_dominates(values, bundle, part)
        for part in partition if part != bundle)


def lottery_from_pairs(inst: Instance, pairs: Sequence[PairResult],
                       ) -> tuple[Lottery, tuple[CertTriple, ...]]:
    """Uniform lottery over the pairs' allocations plus per-entry
    certificates.

    Entry labels are ``X^i``/``Y^i`` with i the 1-based divider index;
    duplicate allocations stay separate entries so each divider's pair
    keeps probability 1/3.  ``certificates[e][t]`` is a 3-partition
    containing agent t's bundle in entry e: the pair's certificate when
    it certifies that bundle (containment alone can hold by mask
    coincidence in the entry the certificate was not built for),
    otherwise the entry's own bundles — in the allocation her
    repartition certificate was not assigned to, the agent is
    EFX-satisfied outright, so her own allocation is the witness.
    """
    entries: list[LotteryEntry] = []
    certs: list[CertTriple] = []
    prob = Fraction(1, 2 * len(pairs))
    for pr in pairs:
        for alloc, tag in ((pr.x, "X"), (pr.y, "Y")):
            entries.append(LotteryEntry(prob, alloc,
                                        label=f"{tag}^{pr.divider + 1}"))
            certs.append(tuple(
                pr.certificates[t]
                if _certifies(inst.values_of(t), alloc[t],
                              pr.certificates[t])
                else tuple(alloc)
                for t in range(3)))
    lottery = Lottery(tuple(entries))
    lottery.validate_against(inst)
    return lottery, tuple(certs)


def bobw3_exact(inst: Instance,
                bases: Optional[Sequence[Partition]] = None,
                *, state_cap: Optional[int] = None,
                ) -> tuple[Lottery, tuple[CertTriple, ...]]:
    """Uniform lottery over six allocations from exact maximin bases.

    Ex-ante: every agent's exact expected value is at least a third of
    her total.  Ex-post, in every allocation: the divider's value is at
    least her maximin share (certificate attached), one non-divider is
    EFX-satisfied with at least her proportional share, and the other
    is EFX-satisfied with at least 9/10 of her maximin share.

    >>> from fairdiv.core import Instance
    >>> inst = Instance.from_rows([[1, 1, 1]] * 3)
    >>> lottery, certs = bobw3_exact(inst)
    >>> lottery.support_size
    6
    >>> lottery.expected_value(inst.valuations[0], 0)
    Fraction(1, 1)
    """
    return lottery_from_pairs(inst, exact_pairs(inst, bases, state_cap=state_cap))


def bobw3_fptas(inst: Instance, eps: Fraction,
                bases: Optional[Sequence[Partition]] = None,
                *, state_cap: Optional[int] = None,
                ) -> tuple[Lottery, tuple[CertTriple, ...]]:
    """Like ``bobw3_exact`` with (1-eps)-approximate base partitions:
    all share floors (ex-ante and ex-post) scale by 1-eps; envy-based
    guarantees are unchanged."""
    return lottery_from_pairs(inst, fptas_pairs(inst, eps, bases,
                                                 state_cap=state_cap))


# ---------------------------------------------------------------------------
# Five-stage pipeline: exact ex-ante proportionality at fptas cost


def bobw3_poly_state(inst: Instance, eps: Fraction,
                     bases: Optional[Sequence[Partition]] = None,
                     *, state_cap: Optional[int] = None,
                     ) -> StageState:
    """Run the five stages and return the final state (see module
    docstring); ``bobw3_poly`` turns it into a lottery."""
    _check_three(inst)
    eps = _check_eps(eps)
    vs = inst.valuations
    provider = make_provider(_solver_cfg(state_cap, "fptas", eps))
    if bases is None:
        bases = tuple(provider(vs[t], inst.ground, 3) for t in range(3))
    else:
        bases = _check_bases(inst, bases)

    # Stage 1: every agent adopts the candidate base partition with the
    # best worst-case bundle for her (ties to the lower owner index).
    chosen = tuple(max(bases, key=lambda p: _min_part(vs[k], p))
                   for k in range(3))
    for t in range(3):
        assert all(_min_part(vs[t], chosen[t]) >= _min_part(vs[t], s)
                   for s in chosen)

    # Stage 2: one pair per divider from her adopted base.
    pairs = [construct_pair(i, inst, chosen[i], provider) for i in range(3)]

    # Stage 3: replay shortchanging cut-and-choose rounds.  In a
    # cut-and-choose pair, each non-divider subdivides once and chooses
    # once; if she values the minimum of the divided bundles in the
    # allocation where *she* subdivided strictly below the one where
    # the other agent subdivided, the approximate split cost her.  The
    # two-agent engine re-splits the two bundles she prefers; the
    # divider keeps her bundle from that allocation.  First complaint
    # per pair wins, lower agent index checked first.
    for i in range(3):
        pr = pairs[i]
        if pr.case_trace.case != "case2b":
            continue
        nd = tuple(t for t in range(3) if t != i)
        for r in nd:
            l = nd[1] if r == nd[0] else nd[0]
            mine, other = (pr.x, pr.y) if r == nd[0] else (pr.y, pr.x)
            mine_min = min(bundle_value(vs[r], mine[r]),
                           bundle_value(vs[r], mine[l]))
            other_min = min(bundle_value(vs[r], other[r]),
                            bundle_value(vs[r], other[l]))
            if mine_min < other_min:
                pairs[i] = _stage3_rebuild(inst, pr, r, l, other)
                break

    # Stages 4 and 5: agents adopt a permuted better partition, twice.
    adoptions: list[AdoptionRecord] = []
    for stage in (4, 5):
        adoptions.extend(_adoption_round(inst, pairs, stage))

    return StageState(chosen=chosen, pairs=tuple(pairs),
                      adoptions=tuple(adoptions))


def _stage3_rebuild(inst: Instance, pr: PairResult, r: int, l: int,
                    better: Allocation) -> PairResult:
    vs = inst.valuations
    i = pr.divider
    t_i = better[i]
    seed = (better[r], better[l])
    # the subdivider of the kept allocation values both split bundles
    # at least as much as the divider's bundle
    assert _min_part(vs[l], seed) >= bundle_value(vs[l], t_i)

    owned = two_agent_pairs(vs[r], vs[l], seed, seed)
    by_owner = dict(owned)
    single = len(owned) == 1
    fallback = owned[0][1]
    pair_r = by_owner.get(0, fallback)
    pair_l = by_owner.get(1, fallback)

    # first allocation: l chooses from r's partition; second: reversed
    x_pick = choose_from_pair(vs[l], vs[r], pair_r)
    y_pick = choose_from_pair(vs[r], vs[l], pair_l)
    x = _alloc3({l: x_pick, r: _other(pair_r, x_pick), i: t_i})
    y = _alloc3({r: y_pick, l: _other(pair_l, y_pick), i: t_i})

    certs = list(pr.certificates)
    certs[l] = x
    certs[r] = y
    trace = replace(pr.case_trace, stage3_rebuilt=True, stage3_trigger=r,
                    stage3_single=single)
    out = PairResult(i, x, y, tuple(certs), trace)
    for alloc in (x, y):
        assert alloc[i] in pr.certificates[i]
    return _assert_pair(inst.ground, vs, out)


def _adoption_round(inst: Instance, pairs: list[PairResult],
                    stage: int) -> list[AdoptionRecord]:
    """One simultaneous adoption round (Stage 4 or 5), in place.

    Every agent reads the same start-of-round certificates; an agent
    adopts the better of her two certificates from other dividers' pairs
    iff its minimum strictly beats the worst of her own two bundles.
    She then replaces her own pair by two permutations of the adopted
    partition: the other two agents pick in index order (reversed in the
    second allocation) and she takes the remainder.

    The comparison must be against her own bundles, not the whole
    pair's minimum: her own floor already carries the certified share
    approximation, so any partition that beats it is safe to hold in
    full, whereas a partition merely beating the pair-wide minimum
    (some other agent's bundle) can leave her with less than she
    started with.
    """
    vs = inst.valuations
    snapshot = tuple(pairs)
    records: list[AdoptionRecord] = []
    updates: dict[int, PairResult] = {}
    for k in range(3):
        cands = [(r, snapshot[r].certificates[k])
                 for r in range(3) if r != k]
        best_r, best_cert = max(cands, key=lambda rc: _min_part(vs[k], rc[1]))
        best_min = _min_part(vs[k], best_cert)
        own = snapshot[k]
        cur = min(bundle_value(vs[k], own.x[k]), bundle_value(vs[k], own.y[k]))
        if best_min <= cur:
            continue
        nd = tuple(t for t in range(3) if t != k)
        new_pr = _adopt(inst, own, best_cert, nd)
        new_min = min(bundle_value(vs[k], new_pr.x[k]),
                      bundle_value(vs[k], new_pr.y[k]))
        assert new_min > cur  # adoption strictly raises the adopter's floor
        updates[k] = new_pr
        records.append(AdoptionRecord(stage=stage, adopter=k,
                                      source_divider=best_r,
                                      partition=best_cert,
                                      chooser_order=(nd[0], nd[1], k)))
    for k, pr in updates.items():
        pairs[k] = pr
    return records


def _adopt(inst: Instance, old: PairResult, cert: Partition,
           choosers: tuple[int, int]) -> PairResult:
    vs = inst.valuations
    k = old.divider
    j, i = choosers

    def permuted(first: int, second: int) -> Allocation:
        pool = list(cert)
        f = _pick_top(vs[first], pool)
        pool.remove(f)
        s = _pick_top(vs[second], pool)
        pool.remove(s)
        return _alloc3({first: f, second: s, k: pool[0]})

    x = permuted(j, i)
    y = permuted(i, j)
    certs = list(old.certificates)
    certs[j] = x
    certs[i] = y
    certs[k] = tuple(cert)
    out = PairResult(k, x, y, tuple(certs), old.case_trace)
    return _assert_pair(inst.ground, vs, out)


def bobw3_poly(inst: Instance, eps: Fraction,
               bases: Optional[Sequence[Partition]] = None,
               *, state_cap: Optional[int] = None,
               ) -> tuple[Lottery, tuple[CertTriple, ...]]:
    """Uniform lottery over the six allocations of the five-stage
    pipeline.  Ex-ante, every agent's exact expected value is at least
    a third of her total.  Ex-post, in every allocation: one agent is
    EFX-satisfied with at least her proportional share; a second is
    either EFX-satisfied with at least (9/10-eps) of her maximin share
    or receives (1-eps) of it; the third receives at least (1-eps) of
    her maximin share.

    >>> from fairdiv.core import Instance
    >>> inst = Instance.from_rows([[4, 3, 2], [4, 3, 2], [4, 3, 2]])
    >>> lottery, _ = bobw3_poly(inst, Fraction(1, 10))
    >>> [lottery.expected_value(inst.valuations[t], t) for t in range(3)]
    [Fraction(3, 1), Fraction(3, 1), Fraction(3, 1)]
    """
    state = bobw3_poly_state(inst, eps, bases, state_cap=state_cap)
    return lottery_from_pairs(inst, state.pairs)


if __name__ == "__main__":
    import doctest

    doctest.testmod(verbose=True)
