"""Acceptance gate: the eleven headline guarantees, one test each.

Every test re-derives its expectations through the independent oracles
(exact shares by enumeration or pseudo-polynomial DP, EFX/EEFX by
definition) rather than trusting pipeline output, runs on pinned
deterministic streams, and enforces its stated wall-clock budget.

Criteria 4 and 8 stash every certificate their runs emit in a shared
pool; criterion 9 round-trips that pool (regenerating a smaller stream
if run in isolation).
"""

from __future__ import annotations

import math
import random
import time
from fractions import Fraction

from fairdiv.bobw2 import (
    baseline_bu_alg3_original,
    baseline_naive_cut_and_choose,
    bobw_two_agents,
    bobw_two_agents_fptas,
)
from fairdiv.bobw3 import (
    bobw3_exact,
    bobw3_poly_state,
    exact_pairs,
    fptas_pairs,
    lottery_from_pairs,
)
from fairdiv.core import Instance, bundle_value, iter_items
from fairdiv.efx_tools import local_search, realloc
from fairdiv.harness import GeneratorConfig, classify_violations, generate
from fairdiv.mms_solvers import MmsSolverConfig, mms_partition, ptas_f_m2
from fairdiv.oracles import (
    efx_dominates,
    exact_mms,
    is_efx_satisfied,
    prop_share,
    rmms,
)
from fairdiv.verify import EEFXCertificate, verify_certificate

F = Fraction


def row(*xs) -> tuple[Fraction, ...]:
    return tuple(F(x) for x in xs)


def worst_realized(lottery, valuations) -> Fraction:
    return min(bundle_value(valuations[i], e.allocation[i])
               for e in lottery.entries for i in range(len(valuations)))


class Budget:
    """Wall-clock guard: `check()` at the end enforces the stated cap."""

    def __init__(self, seconds: float):
        self.cap = seconds
        self.start = time.monotonic()

    def check(self) -> None:
        elapsed = time.monotonic() - self.start
        assert elapsed < self.cap, (
            f"ran {elapsed:.1f}s, budget {self.cap:.0f}s")


# Certificates emitted by the criterion-4 and criterion-8 runs, as
# (valuation row, certified bundle, certificate partition) triples.
CERT_POOL: list[tuple[tuple[Fraction, ...], int, tuple[int, ...]]] = []


def pool_certificates(inst: Instance, lottery, certs) -> None:
    for e_idx, entry in enumerate(lottery.entries):
        for t in range(inst.n):
            CERT_POOL.append((inst.values_of(t), entry.allocation[t],
                              certs[e_idx][t]))


def run_exact_stream(count: int, seed: int) -> list:
    violations = []
    cfg = GeneratorConfig(seed=seed, n=3, m_min=3, m_max=9, value_max=20)
    for idx, inst in enumerate(generate(cfg, count)):
        pairs = exact_pairs(inst)
        lottery, certs = lottery_from_pairs(inst, pairs)
        violations += classify_violations(
            "bobw3_exact", lottery, inst, F(0), index=idx, pairs=pairs)
        pool_certificates(inst, lottery, certs)
    return violations


def run_poly_streams(counts: dict[str, int], seed: int) -> list:
    violations = []
    eps = F(1, 10)
    for offset, (dist, count) in enumerate(sorted(counts.items())):
        cfg = GeneratorConfig(seed=seed + offset, n=3, m_min=3, m_max=9,
                              value_max=20, distribution=dist)
        for idx, inst in enumerate(generate(cfg, count)):
            state = bobw3_poly_state(inst, eps)
            lottery, certs = lottery_from_pairs(inst, state.pairs)
            violations += classify_violations(
                "bobw3_poly", lottery, inst, eps, index=idx,
                pairs=state.pairs)
            pool_certificates(inst, lottery, certs)
    return violations


# ---------------------------------------------------------------------------
# 1. Unguarded two-copy adoption bottoms out at 17/20 of the share;
#    exact seeding holds the full share.


def test_criterion_01_unguarded_adoption_regression():
    budget = Budget(1)
    v = row(16, 12, 8, 5)
    ground = 0b1111

    exact, _ = exact_mms(v, ground, 2)
    assert exact == 20

    worst = worst_realized(baseline_bu_alg3_original(v, v), (v, v))
    assert worst == 17
    assert worst / exact == F(17, 20)

    seed = tuple(mms_partition(v, ground, 2))
    lottery = bobw_two_agents(v, v, seed, seed)
    assert worst_realized(lottery, (v, v)) == 20
    budget.check()


# ---------------------------------------------------------------------------
# 2. Coin-flip cut-and-choose over approximate cuts fails ex ante and
#    ex post; the guarded two-agent pipeline passes on the same seeds.


def test_criterion_02_naive_cut_and_choose_regression():
    budget = Budget(1)
    v1 = row(5, 3, 2, 4, 2, F(1, 2), F(1, 2))
    v2 = row(2, 1, 1, F(1, 2), F(1, 2), F(1, 2), F(1, 2))
    # recorded approximate threshold cuts: {g1,g2,g3} and {g1,g2} versus
    # the rest — each within 1 - 1/5 of its cutter's true share
    cut1 = (0b0000111, 0b1111000)
    cut2 = (0b0000011, 0b1111100)

    naive = baseline_naive_cut_and_choose(v1, v2, cut1, cut2)
    expected_1 = naive.expected_value(v1, 0)
    assert expected_1 == 8
    assert expected_1 < F(17, 2) == exact_mms(v1, 0b1111111, 2)[0]
    assert any(not is_efx_satisfied(vals, e.allocation, i)
               for e in naive.entries
               for i, vals in enumerate((v1, v2)))

    guarded = bobw_two_agents(v1, v2, cut1, cut2)
    for i, vals in enumerate((v1, v2)):
        own = guarded.expected_value(vals, i)
        other = sum(e.prob * bundle_value(vals, e.allocation[1 - i])
                    for e in guarded.entries)
        assert own >= other
        assert all(is_efx_satisfied(vals, e.allocation, i)
                   for e in guarded.entries)
    budget.check()


# ---------------------------------------------------------------------------
# 3. Two-agent pipeline, 1000 random instances: exact ex-ante envy-
#    freeness, EFX in every realization, every bundle at (1-eps) of the
#    exact share.


def test_criterion_03_two_agent_property_suite():
    budget = Budget(120)
    eps = F(1, 10)
    cfg = GeneratorConfig(seed=301, n=2, m_min=1, m_max=12, value_max=50)
    for inst in generate(cfg, 1000):
        lottery = bobw_two_agents_fptas(inst.values_of(0), inst.values_of(1),
                                        eps)
        for i in range(2):
            v = inst.values_of(i)
            own = lottery.expected_value(v, i)
            other = sum(e.prob * bundle_value(v, e.allocation[1 - i])
                        for e in lottery.entries)
            assert own >= other, (inst, i)
            share, _ = exact_mms(v, inst.ground, 2)
            for e in lottery.entries:
                assert is_efx_satisfied(v, e.allocation, i), (inst, i)
                assert bundle_value(v, e.allocation[i]) >= (1 - eps) * share
    budget.check()


# ---------------------------------------------------------------------------
# 4. Three-agent exact pipeline, 500 random instances: ex-ante
#    proportional, and per realization EEFX, the 9/10 share floor, IMMX,
#    the residual share, and the divider's full share.  Zero violations.


def test_criterion_04_three_agent_exact_suite():
    budget = Budget(600)
    violations = run_exact_stream(500, seed=401)
    assert violations == []
    budget.check()


# ---------------------------------------------------------------------------
# 5. Approximation-scheme contract: minimum within (1-eps) of the exact
#    share for both bundle counts, equality under the tiny-eps bound.


def test_criterion_05_fptas_solver_contract():
    budget = Budget(120)
    eps_grid = (F(1, 4), F(1, 10), F(1, 100))

    cfg = GeneratorConfig(seed=501, n=1, m_min=1, m_max=10, value_max=50)
    for inst in generate(cfg, 200):
        v = inst.values_of(0)
        if inst.ground == 0:
            continue
        total = bundle_value(v, inst.ground)
        for k in (2, 3):
            exact_min = min(
                bundle_value(v, b) for b in mms_partition(v, inst.ground, k))
            for eps in eps_grid:
                part = mms_partition(v, inst.ground, k,
                                     MmsSolverConfig(mode="fptas", eps=eps))
                got = min(bundle_value(v, b) for b in part)
                assert got >= (1 - eps) * exact_min, (inst, k, eps)
            if total > 0:
                tiny = F(1, 10 * total + 1)
                part = mms_partition(v, inst.ground, k,
                                     MmsSolverConfig(mode="fptas", eps=tiny))
                assert min(bundle_value(v, b) for b in part) == exact_min

    # large totals force the scaled decision DP (the small-total runs
    # above resolve exactly); its geometric grid for three bundles at
    # epsticking 1/100 needs more state than the default cap admits, so
    # the three-bundle pass uses the two coarser tolerances
    big2 = GeneratorConfig(seed=503, n=1, m_min=5, m_max=8,
                           value_max=5_000_000)
    for inst in generate(big2, 40):
        v = inst.values_of(0)
        exact_min = exact_mms(v, inst.ground, 2)[0]
        for eps in eps_grid:
            part = mms_partition(v, inst.ground, 2,
                                 MmsSolverConfig(mode="fptas", eps=eps))
            assert min(bundle_value(v, b) for b in part) \
                >= (1 - eps) * exact_min

    big3 = GeneratorConfig(seed=502, n=1, m_min=5, m_max=9, value_max=20_000)
    for inst in generate(big3, 40):
        v = inst.values_of(0)
        exact_min = exact_mms(v, inst.ground, 3)[0]
        for eps in (F(1, 4), F(1, 10)):
            part = mms_partition(v, inst.ground, 3,
                                 MmsSolverConfig(mode="fptas", eps=eps))
            assert min(bundle_value(v, b) for b in part) \
                >= (1 - eps) * exact_min
    budget.check()


# ---------------------------------------------------------------------------
# 6. Suffix-family search contract: minimum at least the smaller of the
#    exact share and (1 - 1/(kf+1)) of the proportional half.


def test_criterion_06_ptas_contract():
    budget = Budget(60)
    cfg = GeneratorConfig(seed=601, n=1, m_min=1, m_max=12, value_max=50)
    for inst in generate(cfg, 200):
        v = inst.values_of(0)
        if inst.ground == 0:
            continue
        total = bundle_value(v, inst.ground)
        exact = exact_mms(v, inst.ground, 2)[0]
        for eps in (F(2, 3), F(1, 3), F(1, 10)):
            part = ptas_f_m2(v, eps)
            kf = math.ceil(F(3, 1) / (2 * eps))
            floor = min(exact, (1 - F(1, kf + 1)) * total / 2)
            assert min(bundle_value(v, b) for b in part) >= floor, (inst, eps)
    budget.check()


# ---------------------------------------------------------------------------
# 7. Mismatched identical-agent seeds sink one agent below the
#    proportional floor; the staged-repair pipeline restores it along
#    with every per-realization guarantee.


def test_criterion_07_staged_repair_regression():
    budget = Budget(1)
    inst = Instance.from_rows([(4, 2, 6, 5, 1)] * 3)
    bases = ((0b00011, 0b00100, 0b11000),) * 2 + ((0b01010, 0b00100, 0b10001),)
    eps = F(1, 4)

    lottery, _ = lottery_from_pairs(inst, fptas_pairs(inst, eps, bases=bases))
    assert any(
        lottery.expected_value(inst.values_of(i), i)
        < prop_share(inst.values_of(i), 3)
        for i in range(3))

    state = bobw3_poly_state(inst, eps, bases=bases)
    repaired, _ = lottery_from_pairs(inst, state.pairs)
    for i in range(3):
        assert repaired.expected_value(inst.values_of(i), i) \
            >= prop_share(inst.values_of(i), 3)
    assert classify_violations("bobw3_poly", repaired, inst, eps,
                               pairs=state.pairs) == ()
    budget.check()


# ---------------------------------------------------------------------------
# 8. Staged-repair pipeline, 300 random instances across uniform,
#    near-identical, and heavy-item streams: exact ex-ante
#    proportionality and all per-realization role guarantees.


def test_criterion_08_three_agent_poly_suite():
    budget = Budget(600)
    violations = run_poly_streams(
        {"uniform": 150, "near-identical": 75, "heavy-item": 75}, seed=801)
    assert violations == []
    budget.check()


# ---------------------------------------------------------------------------
# 9. Certificate round-trip: everything emitted above verifies; a
#    thousand domination-breaking single-item mutations all fail.


def _dominates_plain(values, mine: int, other: int) -> bool:
    # restated from the definition, independent of the verify module
    if other == 0:
        return True
    other_items = list(iter_items(other))
    worth = sum(values[j] for j in other_items)
    cheapest = min(values[j] for j in other_items)
    return sum(values[j] for j in iter_items(mine)) >= worth - cheapest


def test_criterion_09_certificate_round_trip():
    budget = Budget(60)
    if not CERT_POOL:
        # criteria 4 and 8 did not run in this session: regenerate a
        # reduced slice of the same streams
        run_exact_stream(60, seed=401)
        run_poly_streams(
            {"uniform": 30, "near-identical": 15, "heavy-item": 15},
            seed=801)

    for values, bundle, partition in CERT_POOL:
        assert verify_certificate(
            values, EEFXCertificate(0, bundle, partition))

    # single-item mutations: move one item out of the certified bundle
    # into another part and re-point the certificate at the shrunken
    # bundle; keep those that break domination per the plain definition
    breaking = 0
    intact_checked = 0
    for values, bundle, partition in CERT_POOL:
        if breaking >= 1000:
            break
        for g in iter_items(bundle):
            bit = 1 << g
            shrunk = bundle & ~bit
            for pos, part in enumerate(partition):
                if part == bundle:
                    continue
                mutated = tuple(
                    shrunk if p == bundle else (p | bit if t == pos else p)
                    for t, p in enumerate(partition))
                cert = EEFXCertificate(0, shrunk, mutated)
                if any(not _dominates_plain(values, shrunk, p)
                       for p in mutated if p != shrunk):
                    breaking += 1
                    assert not verify_certificate(values, cert)
                elif intact_checked < 200:
                    intact_checked += 1
                    assert verify_certificate(values, cert)
    assert breaking >= 1000, f"only {breaking} breaking mutations found"
    budget.check()


# ---------------------------------------------------------------------------
# 10. Residual-share fixture: three agents, values (7,7,8) plus eight
#     units; the share is 10 but the residual share is only 8, and the
#     exact pipeline grants that 8 in every realization.


def test_criterion_10_residual_share_fixture():
    budget = Budget(5)
    v = row(7, 7, 8, *([1] * 8))
    inst = Instance.from_rows([v] * 3)

    assert exact_mms(v, inst.ground, 3)[0] == 10
    residual = rmms(v, inst.ground, 3)
    assert residual == 8
    assert residual < 9

    lottery, _ = bobw3_exact(inst)
    for e in lottery.entries:
        for i in range(3):
            assert bundle_value(v, e.allocation[i]) >= residual
    budget.check()


# ---------------------------------------------------------------------------
# 11. Technical lemmas behind the pipelines, on random inputs.


def test_criterion_11_technical_lemmas():
    budget = Budget(120)

    # (a) any 3-partition: twice the top bundle covers what the exact
    # share leaves of the total
    rng = random.Random(1101)
    for _ in range(2000):
        m = rng.randint(3, 9)
        v = row(*(rng.randint(0, 20) for _ in range(m)))
        ground = (1 << m) - 1
        bundles = [0, 0, 0]
        for j in range(m):
            bundles[rng.randrange(3)] |= 1 << j
        top = max(bundle_value(v, b) for b in bundles)
        total = bundle_value(v, ground)
        assert 2 * top >= total - exact_mms(v, ground, 3)[0], (v, bundles)

    # (b) reallocation: output is EFX and its minimum never drops
    rng = random.Random(1102)
    for _ in range(1000):
        m = rng.randint(2, 9)
        k = rng.choice((2, 3))
        v = row(*(rng.randint(0, 30) for _ in range(m)))
        bundles = [0] * k
        for j in range(m):
            bundles[rng.randrange(k)] |= 1 << j
        before = min(bundle_value(v, b) for b in bundles)
        out = realloc(v, tuple(bundles))
        assert min(bundle_value(v, b) for b in out) >= before, (v, bundles)
        assert all(efx_dominates(v, a, b)
                   for a in out for b in out if a != b), (v, bundles)

    # (c) pair rebalancing: the value gap never widens and the pair's
    # contents are conserved
    rng = random.Random(1103)
    for _ in range(1000):
        m = rng.randint(2, 10)
        v = row(*(rng.randint(0, 30) for _ in range(m)))
        a = b = 0
        for j in range(m):
            if rng.random() < 0.5:
                a |= 1 << j
            else:
                b |= 1 << j
        gap_in = abs(bundle_value(v, a) - bundle_value(v, b))
        a2, b2 = local_search(v, a, b)
        assert a2 | b2 == a | b and a2 & b2 == 0, (v, a, b)
        assert bundle_value(v, a2) <= bundle_value(v, b2)
        assert bundle_value(v, b2) - bundle_value(v, a2) <= gap_in, (v, a, b)
    budget.check()
