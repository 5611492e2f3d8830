"""Tests for the two-agent randomized allocator and its baselines.

The two counterexample fixtures (the 4-item share-loss instance and the
7-item cut-and-choose instance) are traced by hand; property tests lean
on the oracle suite for envy, EFX, and share floors.
"""

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fairdiv.core import Instance, InputError, bundle_value
from fairdiv.bobw2 import (
    baseline_bu_alg3_original,
    baseline_naive_cut_and_choose,
    bobw_two_agents,
    bobw_two_agents_fptas,
    two_agent_pairs,
)
from fairdiv.mms_solvers import ptas_f_m2
from fairdiv.oracles import check_lottery, exact_mms, is_efx_satisfied


def F(x):
    return Fraction(x)


def vals(*xs):
    return tuple(map(F, xs))


def full(m):
    return (1 << m) - 1


def worst_realized(lottery, values, agent):
    return min(bundle_value(values, e.allocation[agent]) for e in lottery.entries)


V4 = vals(16, 12, 8, 5)  # identical-agents regression instance, MMS 20

# 7-item instance where naive cut-and-choose fails both guarantees
D1_V1 = vals(5, 3, 2, 4, 2) + (F(1) / 2, F(1) / 2)
D1_V2 = vals(2, 1, 1) + (F(1) / 2,) * 4
D1_SEED1 = (0b0000111, 0b1111000)  # {g1,g2,g3} / {g4..g7}: 10 vs 7
D1_SEED2 = (0b0000011, 0b1111100)  # {g1,g2} / {g3..g7}: 3 vs 3


# ---------------------------------------------------------------------------
# the 4-item regression pair: baseline stalls at 17, guarded run keeps 20


def test_baseline_worst_value_is_seventeen():
    lot = baseline_bu_alg3_original(V4, V4)
    assert lot.support_size == 2
    assert worst_realized(lot, V4, 0) == 17
    assert worst_realized(lot, V4, 1) == 17


def test_guarded_run_with_share_optimal_seeds_keeps_twenty():
    seed = (0b1001, 0b0110)  # min bundle value 20 = MMS
    lot = bobw_two_agents(V4, V4, seed, seed)
    assert worst_realized(lot, V4, 0) == 20
    assert worst_realized(lot, V4, 1) == 20


def test_baseline_still_ef_and_efx():
    inst = Instance.from_rows([V4, V4])
    audit = check_lottery(baseline_bu_alg3_original(V4, V4), inst,
                          with_eefx=False, with_rmms=False)
    assert audit.ex_ante_ef == (True, True)
    assert audit.all_efx


def test_baseline_single_good_is_coin_flip():
    lot = baseline_bu_alg3_original(vals(4), vals(3))
    assert sorted(e.allocation for e in lot.entries) == [(0, 1), (1, 0)]
    assert all(e.prob == Fraction(1, 2) for e in lot.entries)


# ---------------------------------------------------------------------------
# the 7-item cut-and-choose counterexample


def test_naive_cut_and_choose_loses_both_guarantees():
    lot = baseline_naive_cut_and_choose(D1_V1, D1_V2, D1_SEED1, D1_SEED2)
    assert lot.expected_value(D1_V1, 0) == 8  # < 17/2 proportional share
    assert bundle_value(D1_V1, full(7)) / 2 == F(17) / 2
    flags = [is_efx_satisfied(D1_V1, e.allocation, 0) for e in lot.entries]
    assert False in flags  # agent 1 is not EFX in one realization


def test_guarded_run_repairs_the_cut_and_choose_instance():
    lot = bobw_two_agents(D1_V1, D1_V2, D1_SEED1, D1_SEED2)
    inst = Instance.from_rows([D1_V1, D1_V2])
    audit = check_lottery(lot, inst, with_eefx=False, with_rmms=False)
    assert audit.ex_ante_ef == (True, True)
    assert audit.all_efx
    # the run exits on the equal-split early return: agent 2 picks her
    # preferred bundle {g1,g2,g6}, agent 1 keeps 8.5 either way
    assert [e.allocation for e in lot.entries] == [(0b1011100, 0b0100011)]


def test_naive_with_share_optimal_cuts_is_proportional():
    part = exact_mms(V4, full(4), 2)[1]
    lot = baseline_naive_cut_and_choose(V4, V4, part, part)
    half = bundle_value(V4, full(4)) / 2
    assert lot.expected_value(V4, 0) == half
    assert lot.expected_value(V4, 1) == half


# ---------------------------------------------------------------------------
# engine mechanics


def test_single_good_lottery_is_uniform():
    lot = bobw_two_agents(vals(4), vals(3), (0, 1), (0, 1))
    assert sorted(e.allocation for e in lot.entries) == [(0, 1), (1, 0)]
    assert {e.prob for e in lot.entries} == {Fraction(1, 2)}


def test_labels_name_the_owning_pair():
    lot = bobw_two_agents(V4, V4, (0b1001, 0b0110), (0b1001, 0b0110))
    assert [e.label for e in lot.entries] == ["A^1", "A^2"]


def test_seed_ground_mismatch_rejected():
    with pytest.raises(InputError):
        bobw_two_agents(vals(1, 2), vals(2, 1), (0b01, 0b10), (0b01, 0))


def test_overlapping_seed_rejected():
    with pytest.raises(InputError):
        bobw_two_agents(vals(1, 2), vals(2, 1), (0b11, 0b10), (0b01, 0b10))


def test_unknown_items_rejected():
    with pytest.raises(InputError):
        bobw_two_agents(vals(1, 2), vals(2, 1), (0b101, 0b10), (0b101, 0b10))


def test_valuation_length_mismatch_rejected():
    with pytest.raises(InputError):
        bobw_two_agents(vals(1, 2), vals(2, 1, 3), (0b01, 0b10), (0b01, 0b10))


def test_sub_ground_seeds_allowed():
    # both seeds over {g1,g2} only; g3 is simply not allocated
    lot = bobw_two_agents(vals(3, 1, 9), vals(1, 3, 9), (0b01, 0b10), (0b01, 0b10))
    for e in lot.entries:
        assert (e.allocation[0] | e.allocation[1]) == 0b011


def test_adoption_fires_and_strictly_improves_the_adopter():
    # hand-picked: the refresh of agent 2's pair is EFX for agent 1 and
    # raises agent 1's minimum from 16 to 17, so the guard lets it copy
    v1 = vals(3, 7, 9, 1, 12, 3)
    v2 = vals(4, 9, 9, 0, 13, 2)
    events = []
    owned = two_agent_pairs(v1, v2, (25, 38), (45, 18),
                            on_event=lambda k, o, p: events.append((k, o, p)))
    assert [(k, o) for k, o, _ in events] == [
        ("seed", 0), ("seed", 1), ("refine", 1), ("adopt", 0)]
    assert events[2][2] == (14, 49) and events[3][2] == (14, 49)
    assert owned == [(0, (14, 49)), (1, (14, 49))]
    assert min(bundle_value(v1, b) for b in (14, 49)) == 17  # was 16


def test_refine_strictly_improves_the_refreshed_owner():
    v1 = vals(14, 2, 15, 2)
    v2 = vals(6, 4, 13, 9)
    mins = []

    def watch(kind, owner, pair):
        if kind == "refine":
            mins.append(min(bundle_value(v2, b) for b in pair))

    owned = two_agent_pairs(v1, v2, (11, 4), (1, 14), on_event=watch)
    assert mins  # the refine path actually ran
    assert len(owned) in (1, 2)


def test_unguarded_adoption_differs_from_guarded():
    # same instance as the adoption test: both exits agree here, but the
    # baseline flag must at least keep all guarantees intact
    v1 = vals(3, 7, 9, 1, 12, 3)
    v2 = vals(4, 9, 9, 0, 13, 2)
    owned = two_agent_pairs(v1, v2, (25, 38), (45, 18), guarded_adoption=False)
    assert len(owned) == 2


# ---------------------------------------------------------------------------
# approximate seeding wrappers


def test_fptas_wrapper_identical_valuations_expected_prop():
    v = vals(7, 5, 4, 4, 2)
    lot = bobw_two_agents_fptas(v, v, Fraction(1, 10))
    prop = bundle_value(v, full(5)) / 2
    assert lot.expected_value(v, 0) == prop
    assert lot.expected_value(v, 1) == prop


def test_fptas_wrapper_share_floor_small_sweep():
    rows = [
        (vals(16, 12, 8, 5), vals(1, 2, 3, 4)),
        (vals(9, 9, 9), vals(1, 1, 16)),
        (vals(10, 1, 1, 1, 1, 1), vals(3, 3, 3, 1, 1, 4)),
    ]
    eps = Fraction(1, 10)
    for v1, v2 in rows:
        lot = bobw_two_agents_fptas(v1, v2, eps)
        inst = Instance.from_rows([v1, v2])
        audit = check_lottery(lot, inst, with_eefx=False, with_rmms=False)
        assert audit.ex_ante_ef == (True, True)
        assert audit.all_efx
        for agent, v in enumerate((v1, v2)):
            share, _ = exact_mms(v, full(len(v)), 2)
            assert worst_realized(lot, v, agent) >= (1 - eps) * share


def test_ptas_seeds_meet_the_published_floor():
    eps = Fraction(1, 4)
    rows = [
        (vals(8, 7, 6, 5, 4, 3, 2, 1), vals(1, 2, 3, 4, 5, 6, 7, 8)),
        (vals(5, 5, 5, 5), vals(20, 1, 1, 1)),
    ]
    for v1, v2 in rows:
        seed1 = ptas_f_m2(v1, eps)
        seed2 = ptas_f_m2(v2, eps)
        lot = bobw_two_agents(v1, v2, (seed1[0], seed1[1]), (seed2[0], seed2[1]))
        for agent, v in enumerate((v1, v2)):
            share, _ = exact_mms(v, full(len(v)), 2)
            prop = bundle_value(v, full(len(v))) / 2
            floor = min(share, (1 - eps) * prop)
            assert worst_realized(lot, v, agent) >= floor


# ---------------------------------------------------------------------------
# properties

small_vals = st.lists(st.integers(min_value=0, max_value=15), min_size=2, max_size=7)


@settings(max_examples=60, deadline=None)
@given(small_vals, st.data())
def test_guarantees_on_random_instances(raw1, data):
    m = len(raw1)
    raw2 = data.draw(st.lists(st.integers(min_value=0, max_value=15),
                              min_size=m, max_size=m))
    s1 = data.draw(st.integers(min_value=0, max_value=full(m)))
    s2 = data.draw(st.integers(min_value=0, max_value=full(m)))
    v1, v2 = vals(*raw1), vals(*raw2)
    seeds = ((s1, full(m) ^ s1), (s2, full(m) ^ s2))
    lot = bobw_two_agents(v1, v2, *seeds)
    assert lot.support_size <= 2
    inst = Instance.from_rows([v1, v2])
    audit = check_lottery(lot, inst, with_eefx=False, with_rmms=False)
    assert audit.ex_ante_ef == (True, True)
    assert audit.all_efx
    for agent, v in enumerate((v1, v2)):
        floor = min(bundle_value(v, seeds[agent][0]),
                    bundle_value(v, seeds[agent][1]))
        assert worst_realized(lot, v, agent) >= floor


@settings(max_examples=40, deadline=None)
@given(small_vals)
def test_identical_valuations_expected_exactly_prop(raw):
    v = vals(*raw)
    m = len(raw)
    lot = bobw_two_agents(v, v, (0, full(m)), (0, full(m)))
    prop = bundle_value(v, full(m)) / 2
    assert lot.expected_value(v, 0) == prop
    assert lot.expected_value(v, 1) == prop
