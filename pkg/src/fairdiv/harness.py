"""Instance generation, executable fixtures, and suite orchestration.

Three layers of test infrastructure for the allocation pipelines:

* `GeneratorConfig` / `generate` — deterministic random-instance
  streams (same seed and config give the same instances, byte for
  byte) over four value distributions, including the near-identical
  and heavy-item shapes that exercise the pipelines' rare branches.
* `Fixture` / `builtin_fixtures` — hand-picked instances whose
  interesting facts (share values, known failure modes of the
  baselines, repair behaviour) are stored as executable checks and
  re-verified on load, so the registry can never drift from reality.
* `check_instance` / `run_suite` — run one pipeline over a stream and
  aggregate oracle verdicts into `Violation` records.  Violations are
  data, not errors: the summary collects them, and when a directory is
  supplied each run dumps a self-contained JSON reproducer
  (instance + config seed + case traces) that `replay_reproducer`
  re-checks to the identical verdict.

Per-instance checks are pure and independent, so they could run in
parallel; the suite runs them sequentially in stream order to keep
summaries and reproducer files deterministic.
"""

from __future__ import annotations

import dataclasses
import json
import random
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import permutations
from pathlib import Path
from typing import Callable, Iterator, Optional, Sequence

from .bobw2 import (
    baseline_bu_alg3_original,
    baseline_naive_cut_and_choose,
    bobw_two_agents,
)
from .bobw3 import (
    AdoptionRecord,
    PairResult,
    bobw3_poly_state,
    exact_pairs,
    fptas_pairs,
    lottery_from_pairs,
)
from .core import (
    Allocation,
    InputError,
    Instance,
    Lottery,
    Partition,
    Values,
    bundle_value,
    validate_instance,
)
from .mms_solvers import MmsSolverConfig, make_provider
from .oracles import check_lottery, exact_mms, prop_share, rmms

__all__ = [
    "DISTRIBUTIONS",
    "PIPELINES",
    "Fact",
    "Fixture",
    "GeneratorConfig",
    "InstanceCheck",
    "SuiteSummary",
    "Violation",
    "builtin_fixtures",
    "check_instance",
    "classify_violations",
    "fixture",
    "generate",
    "replay_reproducer",
    "run_suite",
]


# ---------------------------------------------------------------------------
# Instance generation

DISTRIBUTIONS = ("uniform", "identical", "near-identical", "heavy-item")


@dataclass(frozen=True)
class GeneratorConfig:
    """Deterministic instance-stream parameters.

    `distribution` picks the value shape:

    * ``uniform`` — independent integers in [0, value_max];
    * ``identical`` — one uniform row shared by every agent;
    * ``near-identical`` — one uniform row, each agent's copy perturbed
      by at most `perturbation` per item (clipped at 0);
    * ``heavy-item`` — uniform rows, then one agent's value for one
      item is raised to at least her proportional share.
    """

    seed: int
    n: int = 3
    m_min: int = 4
    m_max: int = 8
    distribution: str = "uniform"
    value_max: int = 20
    perturbation: int = 2

    def __post_init__(self) -> None:
        if not 0 <= self.seed < 2 ** 64:
            raise InputError(f"seed must be a 64-bit integer, got {self.seed}")
        if self.n < 1:
            raise InputError(f"need at least one agent, got n={self.n}")
        if not 1 <= self.m_min <= self.m_max:
            raise InputError(
                f"item range must satisfy 1 <= m_min <= m_max, "
                f"got [{self.m_min}, {self.m_max}]")
        if self.distribution not in DISTRIBUTIONS:
            raise InputError(
                f"unknown distribution {self.distribution!r}; "
                f"choose from {', '.join(DISTRIBUTIONS)}")
        if self.value_max < 1:
            raise InputError(f"value_max must be >= 1, got {self.value_max}")
        if self.perturbation < 0:
            raise InputError(
                f"perturbation must be >= 0, got {self.perturbation}")
        if self.distribution == "heavy-item" and self.n < 2:
            raise InputError("heavy-item distribution needs n >= 2")


def _draw_instance(rng: random.Random, cfg: GeneratorConfig) -> Instance:
    m = rng.randint(cfg.m_min, cfg.m_max)
    if cfg.distribution == "uniform":
        rows = [[rng.randint(0, cfg.value_max) for _ in range(m)]
                for _ in range(cfg.n)]
    elif cfg.distribution == "identical":
        row = [rng.randint(0, cfg.value_max) for _ in range(m)]
        rows = [list(row) for _ in range(cfg.n)]
    elif cfg.distribution == "near-identical":
        base = [rng.randint(0, cfg.value_max) for _ in range(m)]
        rows = [[max(0, v + rng.randint(-cfg.perturbation, cfg.perturbation))
                 for v in base]
                for _ in range(cfg.n)]
    else:  # heavy-item
        rows = [[rng.randint(0, cfg.value_max) for _ in range(m)]
                for _ in range(cfg.n)]
        a = rng.randrange(cfg.n)
        j = rng.randrange(m)
        rest = sum(rows[a]) - rows[a][j]
        # v >= rest/(n-1) makes the item worth at least a proportional share
        rows[a][j] = max(rows[a][j], -(-rest // (cfg.n - 1)))
    return Instance.from_rows(rows)


def generate(cfg: GeneratorConfig, count: int) -> Iterator[Instance]:
    """Yield `count` instances; the stream is a pure function of `cfg`.

    >>> cfg = GeneratorConfig(seed=0, n=3, m_min=5, m_max=5)
    >>> a = [inst.valuations for inst in generate(cfg, 3)]
    >>> b = [inst.valuations for inst in generate(cfg, 3)]
    >>> a == b
    True
    """
    if count < 0:
        raise InputError(f"count must be >= 0, got {count}")
    rng = random.Random(cfg.seed)
    for _ in range(count):
        yield _draw_instance(rng, cfg)


# ---------------------------------------------------------------------------
# Executable fixtures


@dataclass(frozen=True)
class Fact:
    """One expected property of a fixture, as a runnable check."""

    label: str
    check: Callable[[Instance], bool]


@dataclass(frozen=True)
class Fixture:
    """A named instance whose recorded facts re-verify on load."""

    name: str
    description: str
    instance: Instance
    facts: tuple[Fact, ...] = ()

    def verify(self) -> None:
        """Re-run every recorded fact; raise on the first failure."""
        validate_instance(self.instance)
        for fact in self.facts:
            if not fact.check(self.instance):
                raise AssertionError(
                    f"fixture {self.name!r}: fact failed: {fact.label}")


def _mms_values_are(*expected: Fraction) -> Callable[[Instance], bool]:
    def check(inst: Instance) -> bool:
        got = tuple(exact_mms(inst.values_of(i), inst.ground, inst.n)[0]
                    for i in range(inst.n))
        return got == tuple(expected)
    return check


def _exact_lottery_prop_and_efx(inst: Instance) -> bool:
    lottery, _ = lottery_from_pairs(inst, exact_pairs(inst))
    audit = check_lottery(lottery, inst, with_eefx=False, with_rmms=False)
    return all(audit.ex_ante_prop) and audit.all_efx


# Identical three-agent valuation with one even and one tilted
# three-way split: the even split is maximin-optimal (6/6/6), the
# tilted one (7/6/5) is only (1-eps)-approximate, and handing the
# tilted base to the third divider drags her expected value below the
# proportional floor until the staged repair equalizes the bases.
_TILTED_ROW = (4, 2, 6, 5, 1)
_EVEN_SPLIT_BASE: Partition = (0b00011, 0b00100, 0b11000)
_TILTED_BASE: Partition = (0b01010, 0b00100, 0b10001)
_TILTED_BASES = (_EVEN_SPLIT_BASE, _EVEN_SPLIT_BASE, _TILTED_BASE)
_TILTED_EPS = Fraction(1, 4)


def _tilted_base_underpays_last_agent(inst: Instance) -> bool:
    lottery, _ = lottery_from_pairs(
        inst, fptas_pairs(inst, _TILTED_EPS, bases=_TILTED_BASES))
    expected = lottery.expected_value(inst.values_of(2), 2)
    return expected == Fraction(17, 3) and expected < prop_share(
        inst.values_of(2), 3)


def _staged_repair_restores_proportionality(inst: Instance) -> bool:
    state = bobw3_poly_state(inst, _TILTED_EPS, bases=_TILTED_BASES)
    lottery, _ = lottery_from_pairs(inst, state.pairs)
    return all(
        lottery.expected_value(inst.values_of(i), i)
        == prop_share(inst.values_of(i), 3)
        for i in range(3))


# Two-agent instance with four half-unit items: the recorded threshold
# cuts are (1-1/5)-approximate for each cutter, and coin-flip
# cut-and-choose over them shorts the first agent in expectation and
# leaves one realization non-EFX.
_HALVED_CUT_1: tuple[int, int] = (0b0000111, 0b1111000)
_HALVED_CUT_2: tuple[int, int] = (0b0000011, 0b1111100)


def _naive_cut_and_choose_fails_twice(inst: Instance) -> bool:
    lottery = baseline_naive_cut_and_choose(
        inst.values_of(0), inst.values_of(1), _HALVED_CUT_1, _HALVED_CUT_2)
    if lottery.expected_value(inst.values_of(0), 0) != 8:
        return False
    found = sorted(
        v.category
        for v in classify_violations("baselines", lottery, inst,
                                     source="cut-and-choose"))
    return found == ["efx", "ex-ante-prop"]


def _unguarded_adoption_bottoms_at_17_20(inst: Instance) -> bool:
    lottery = baseline_bu_alg3_original(inst.values_of(0), inst.values_of(1))
    share = exact_mms(inst.values_of(0), inst.ground, 2)[0]
    worst = min(
        bundle_value(inst.values_of(i), e.allocation[i])
        for e in lottery.entries for i in range(2))
    return worst / share == Fraction(17, 20)


def _first_agent_two_way_share_is_42(inst: Instance) -> bool:
    return exact_mms(inst.values_of(0), inst.ground, 2)[0] == 42


def _residual_share_is_8(inst: Instance) -> bool:
    return rmms(inst.values_of(0), inst.ground, 3) == 8


@lru_cache(maxsize=1)
def builtin_fixtures() -> tuple[Fixture, ...]:
    """The named fixture registry, re-verified on first load."""
    rows_half = Fraction(1, 2)
    fixtures = (
        Fixture(
            name="two-prized-goods",
            description=("One agent values two big items far above the "
                         "rest; the other two agents agree with each "
                         "other.  A shape where deterministic division "
                         "cannot be proportional for everyone."),
            instance=Instance.from_rows([
                (100, 101, 2, 0, 0),
                (10, 4, 4, 2, 2),
                (10, 4, 4, 2, 2),
            ]),
            facts=(
                Fact("three-way maximin shares are 2, 6, 6",
                     _mms_values_are(Fraction(2), Fraction(6), Fraction(6))),
                Fact("exact-base lottery is proportional ex ante and EFX "
                     "ex post", _exact_lottery_prop_and_efx),
            ),
        ),
        Fixture(
            name="tilted-bases",
            description=("Three identical agents; one divider seeds the "
                         "pipeline with a tilted approximate base while "
                         "the others use the even split, which underpays "
                         "the last chooser until the staged repair."),
            instance=Instance.from_rows([_TILTED_ROW] * 3),
            facts=(
                Fact("three-way maximin share 6 equals the proportional "
                     "floor",
                     _mms_values_are(Fraction(6), Fraction(6), Fraction(6))),
                Fact("tilted approximate bases leave the third agent at "
                     "expected 17/3, below the proportional floor",
                     _tilted_base_underpays_last_agent),
                Fact("the staged repair on the same bases restores exact "
                     "expected proportionality",
                     _staged_repair_restores_proportionality),
            ),
        ),
        Fixture(
            name="halved-sevens",
            description=("Two agents over seven items, four of them "
                         "worth half a unit; approximate threshold cuts "
                         "make naive coin-flip cut-and-choose fail both "
                         "ex ante and ex post."),
            instance=Instance.from_rows([
                (5, 3, 2, 4, 2, rows_half, rows_half),
                (2, 1, 1, rows_half, rows_half, rows_half, rows_half),
            ]),
            facts=(
                Fact("two-way maximin shares are 17/2 and 3",
                     _mms_values_are(Fraction(17, 2), Fraction(3))),
                Fact("coin-flip cut-and-choose over the recorded cuts "
                     "records exactly one expected-value violation and "
                     "one EFX violation",
                     _naive_cut_and_choose_fails_twice),
            ),
        ),
        Fixture(
            name="local-search-trap",
            description=("Two identical agents where the historical "
                         "unguarded-adoption routine settles on a "
                         "balanced-looking split whose worst bundle is "
                         "only 85% of the maximin share."),
            instance=Instance.from_rows([(16, 12, 8, 5)] * 2),
            facts=(
                Fact("two-way maximin share is 20",
                     _mms_values_are(Fraction(20), Fraction(20))),
                Fact("the unguarded-adoption baseline bottoms out at "
                     "exactly 17/20 of the share",
                     _unguarded_adoption_bottoms_at_17_20),
            ),
        ),
        Fixture(
            name="envy-cycle-squeeze",
            description=("Two agents with interleaved mid-size values; "
                         "kept for the first agent's share value, which "
                         "pins down the worst case of envy-cycle-style "
                         "round-robin arguments."),
            instance=Instance.from_rows([
                (15, 14, 13, 12, 10, 10, 10),
                (13, 12, 9, 6, 5, 3, 3),
            ]),
            facts=(
                Fact("first agent's two-way maximin share is 42",
                     _first_agent_two_way_share_is_42),
            ),
        ),
        Fixture(
            name="lumpy-eleven",
            description=("Three identical agents over three lumpy items "
                         "and eight filler units: the maximin share "
                         "needs the fillers spread out, and the residual "
                         "share drops once a lump is set aside."),
            instance=Instance.from_rows([(7, 7, 8) + (1,) * 8] * 3),
            facts=(
                Fact("three-way maximin share is 10",
                     _mms_values_are(*([Fraction(10)] * 3))),
                Fact("residual maximin share is 8", _residual_share_is_8),
            ),
        ),
    )
    for fx in fixtures:
        fx.verify()
    return fixtures


def fixture(name: str) -> Fixture:
    """Look up a builtin fixture by name."""
    for fx in builtin_fixtures():
        if fx.name == name:
            return fx
    known = ", ".join(fx.name for fx in builtin_fixtures())
    raise InputError(f"unknown fixture {name!r}; known fixtures: {known}")


# ---------------------------------------------------------------------------
# Per-instance pipeline checks

PIPELINES = ("bobw2", "bobw3_exact", "bobw3_fptas", "bobw3_poly", "baselines")

_NEEDS_AGENTS = {"bobw2": 2, "baselines": 2,
                 "bobw3_exact": 3, "bobw3_fptas": 3, "bobw3_poly": 3}


@dataclass(frozen=True)
class Violation:
    """One failed guarantee, self-contained enough to reproduce."""

    index: int                      # position in the generated stream
    source: str                     # which run produced the lottery
    category: str                   # e.g. "efx", "ex-ante-prop", "mms-floor"
    message: str
    instance: Instance
    traces: tuple[str, ...] = ()


@dataclass(frozen=True)
class InstanceCheck:
    """All verdicts for one instance under one pipeline."""

    index: int
    violations: tuple[Violation, ...]
    share_ratio: Optional[Fraction]  # worst value/MMS over entries and agents
    traces: tuple[str, ...]

    @property
    def ok(self) -> bool:
        return not self.violations


def _trace_str(pr: PairResult) -> str:
    t = pr.case_trace
    bits = [f"divider {pr.divider + 1}: {t.case}"]
    if t.picks:
        bits.append(f"picks={t.picks}")
    if t.companions:
        bits.append(f"companions={t.companions}")
    if t.qualifiers:
        bits.append(f"qualifiers={t.qualifiers}")
    if t.stage3_rebuilt:
        bits.append(f"rebuilt for agent {t.stage3_trigger + 1}"
                    + (" (single partition)" if t.stage3_single else ""))
    return ", ".join(bits)


def _adoption_str(rec: AdoptionRecord) -> str:
    return (f"round {rec.stage}: agent {rec.adopter + 1} adopted a "
            f"certificate of divider {rec.source_divider + 1}, "
            f"pick order {tuple(t + 1 for t in rec.chooser_order)}")


def _role_trio_ok(inst: Instance, alloc: Allocation, efx: Sequence[bool],
                  eps: Fraction, props: Sequence[Fraction],
                  mms_vals: Sequence[Fraction]) -> bool:
    vals = tuple(bundle_value(inst.values_of(i), alloc[i]) for i in range(3))
    nine = Fraction(9, 10) - eps
    one = 1 - eps
    for a, b, c in permutations(range(3)):
        if (efx[a] and vals[a] >= props[a]
                and ((efx[b] and vals[b] >= nine * mms_vals[b])
                     or vals[b] >= one * mms_vals[b])
                and vals[c] >= one * mms_vals[c]):
            return True
    return False


def _classify(kind: str, lottery: Lottery, inst: Instance, eps: Fraction,
              index: int, source: str, traces: tuple[str, ...],
              pairs: Optional[Sequence[PairResult]],
              ) -> tuple[tuple[Violation, ...], Optional[Fraction]]:
    audit = check_lottery(
        lottery, inst, eps=eps,
        with_eefx=kind in ("bobw3_exact", "bobw3_fptas"),
        with_rmms=kind == "bobw3_exact")
    n = inst.n
    out: list[Violation] = []

    def report(category: str, message: str) -> None:
        out.append(Violation(index=index, source=source, category=category,
                             message=message, instance=inst, traces=traces))

    # Ex-ante floor: exact proportionality everywhere except the
    # approximate-base three-agent pipeline, whose floor scales by 1-eps.
    for i in range(n):
        floor = audit.prop[i]
        if kind == "bobw3_fptas":
            floor = (1 - eps) * floor
            short = f"(1-{eps}) of the proportional floor, {floor}"
        else:
            short = f"the proportional floor {floor}"
        if audit.expected[i] < floor:
            report("ex-ante-prop",
                   f"agent {i + 1}: expected value {audit.expected[i]} "
                   f"is below {short}")

    by_label = {pr.divider: pr for pr in pairs} if pairs else {}
    for e, entry_audit in zip(lottery.entries, audit.allocations):
        vals = tuple(bundle_value(inst.values_of(i), e.allocation[i])
                     for i in range(n))
        label = e.label or "an unlabeled allocation"
        if kind in ("bobw2", "baselines"):
            for i in range(n):
                if not entry_audit.efx[i]:
                    report("efx",
                           f"agent {i + 1} is not EFX-satisfied in {label}")
                # The baselines promise no share floor; their shortfall
                # is reported through the worst share ratio instead.
                floor = (1 - eps) * audit.mms[i]
                if kind == "bobw2" and vals[i] < floor:
                    report("mms-floor",
                           f"agent {i + 1}: {vals[i]} in {label} is below "
                           f"the maximin floor {floor}")
            continue

        # three-agent pipelines
        if kind in ("bobw3_exact", "bobw3_fptas"):
            for i in range(3):
                if not entry_audit.eefx[i]:
                    report("eefx",
                           f"agent {i + 1} is not EEFX-satisfied in {label}")
        nine = Fraction(9, 10) - eps
        for i in range(3):
            if vals[i] < nine * audit.mms[i]:
                report("mms-floor",
                       f"agent {i + 1}: {vals[i]} in {label} is below "
                       f"{nine} of her maximin share {audit.mms[i]}")
            efx_or_floor = (entry_audit.efx[i]
                            or vals[i] >= (1 - eps) * audit.mms[i])
            if not efx_or_floor:
                report("immx",
                       f"{label}: agent {i + 1} is neither EFX-satisfied "
                       f"nor at her (1-{eps}) maximin floor")
            if kind == "bobw3_exact" and vals[i] < audit.rmms[i]:
                report("rmms",
                       f"agent {i + 1}: {vals[i]} in {label} is below her "
                       f"residual maximin share {audit.rmms[i]}")
        if kind == "bobw3_poly" and not _role_trio_ok(
                inst, e.allocation, entry_audit.efx, eps, audit.prop,
                audit.mms):
            report("role",
                   f"{label}: no assignment of the chooser/middle/divider "
                   f"guarantees fits the realized values")
        if by_label:
            d = int(label.split("^")[1]) - 1
            dv = bundle_value(inst.values_of(d), e.allocation[d])
            floor = (1 - eps) * audit.mms[d]
            if dv < floor:
                report("divider-mms",
                       f"divider {d + 1}: {dv} in {label} is below her "
                       f"maximin floor {floor}")

    ratios = [
        bundle_value(inst.values_of(i), e.allocation[i]) / audit.mms[i]
        for e in lottery.entries for i in range(n) if audit.mms[i] > 0]
    return tuple(out), (min(ratios) if ratios else None)


def classify_violations(kind: str, lottery: Lottery, inst: Instance,
                        eps: Fraction = Fraction(0), *, index: int = 0,
                        source: str = "", traces: tuple[str, ...] = (),
                        pairs: Optional[Sequence[PairResult]] = None,
                        ) -> tuple[Violation, ...]:
    """Audit one lottery against the guarantee set of `kind`.

    The divider floor is only checked when the producing `pairs` are
    supplied (entry labels alone identify the divider, but the check is
    skipped for lotteries of unknown provenance).
    """
    if kind not in PIPELINES:
        raise InputError(
            f"unknown pipeline {kind!r}; choose from {', '.join(PIPELINES)}")
    return _classify(kind, lottery, inst, eps, index, source, traces,
                     pairs)[0]


def _exact_seed(values: Values, ground: int, eps: Fraction,
                ) -> tuple[int, int]:
    cfg = (MmsSolverConfig() if eps == 0
           else MmsSolverConfig(mode="fptas", eps=eps))
    part = make_provider(cfg)(values, ground, 2)
    return part[0], part[1]


def check_instance(kind: str, inst: Instance, eps: Fraction = Fraction(0),
                   index: int = 0) -> InstanceCheck:
    """Run pipeline `kind` on one instance and audit the result.

    `eps` is the approximation tolerance: the exact pipelines
    (``bobw3_exact``; ``bobw2`` and ``baselines`` at eps = 0) are
    checked at their exact floors, the approximate ones at floors
    scaled by 1-eps.  ``bobw3_exact`` ignores eps entirely.
    """
    if kind not in PIPELINES:
        raise InputError(
            f"unknown pipeline {kind!r}; choose from {', '.join(PIPELINES)}")
    if not 0 <= eps < 1:
        raise InputError(f"eps must be in [0, 1), got {eps}")
    if kind in ("bobw3_fptas", "bobw3_poly") and eps == 0:
        raise InputError(f"{kind} needs eps > 0")
    need = _NEEDS_AGENTS[kind]
    if inst.n != need:
        raise InputError(f"{kind} needs exactly {need} agents, got {inst.n}")

    vs = inst.valuations
    if kind == "bobw2":
        seeds = tuple(_exact_seed(vs[i], inst.ground, eps) for i in range(2))
        lottery = bobw_two_agents(vs[0], vs[1], seeds[0], seeds[1])
        violations, ratio = _classify(kind, lottery, inst, eps, index, "",
                                      (), None)
        return InstanceCheck(index, violations, ratio, ())

    if kind == "baselines":
        seeds = tuple(_exact_seed(vs[i], inst.ground, eps) for i in range(2))
        runs = (
            ("alg3-unguarded", baseline_bu_alg3_original(vs[0], vs[1])),
            ("cut-and-choose",
             baseline_naive_cut_and_choose(vs[0], vs[1], *seeds)),
        )
        all_violations: list[Violation] = []
        ratios: list[Fraction] = []
        for name, lottery in runs:
            violations, ratio = _classify(kind, lottery, inst, eps, index,
                                          name, (), None)
            all_violations.extend(violations)
            if ratio is not None:
                ratios.append(ratio)
        return InstanceCheck(index, tuple(all_violations),
                             min(ratios) if ratios else None, ())

    if kind == "bobw3_exact":
        pairs = exact_pairs(inst)
        adoptions: tuple[AdoptionRecord, ...] = ()
        eps = Fraction(0)
    elif kind == "bobw3_fptas":
        pairs = fptas_pairs(inst, eps)
        adoptions = ()
    else:  # bobw3_poly
        state = bobw3_poly_state(inst, eps)
        pairs = state.pairs
        adoptions = state.adoptions
    traces = tuple(_trace_str(pr) for pr in pairs) + tuple(
        _adoption_str(rec) for rec in adoptions)
    lottery, _ = lottery_from_pairs(inst, pairs)
    violations, ratio = _classify(kind, lottery, inst, eps, index, "",
                                  traces, pairs)
    return InstanceCheck(index, violations, ratio, traces)


# ---------------------------------------------------------------------------
# Suite runs


@dataclass(frozen=True)
class SuiteSummary:
    """Aggregated verdicts of one `run_suite` call."""

    pipeline: str
    config: GeneratorConfig
    count: int
    eps: Fraction
    checked: int
    violations: tuple[Violation, ...]
    worst_share_ratio: Optional[Fraction]
    report_path: Optional[str] = None

    @property
    def ok(self) -> bool:
        return not self.violations

    @property
    def counts(self) -> dict[str, int]:
        out: dict[str, int] = {}
        for v in self.violations:
            out[v.category] = out.get(v.category, 0) + 1
        return out


def _violation_json(v: Violation) -> dict:
    return {
        "index": v.index,
        "source": v.source,
        "category": v.category,
        "message": v.message,
        "instance": v.instance.to_json_dict(),
        "traces": list(v.traces),
    }


def run_suite(pipeline: str, cfg: GeneratorConfig, count: int,
              eps: Fraction = Fraction(1, 10),
              reproducer_dir: Optional[str | Path] = None) -> SuiteSummary:
    """Run `pipeline` over `count` generated instances and audit each.

    Violations are collected, never raised.  When `reproducer_dir` is
    given and violations occur, a JSON file with one self-contained
    reproducer per violation is written there;
    `replay_reproducer` re-derives the identical verdicts from it.
    ``bobw3_exact`` always audits at exact floors (eps is ignored);
    ``bobw2`` and ``baselines`` seed their cuts exactly at eps = 0 and
    from the approximate solver at eps > 0.
    """
    if pipeline not in PIPELINES:
        raise InputError(
            f"unknown pipeline {pipeline!r}; "
            f"choose from {', '.join(PIPELINES)}")
    need = _NEEDS_AGENTS[pipeline]
    if cfg.n != need:
        raise InputError(
            f"{pipeline} needs exactly {need} agents, got n={cfg.n}")
    if pipeline == "bobw3_exact":
        eps = Fraction(0)

    violations: list[Violation] = []
    worst: Optional[Fraction] = None
    checked = 0
    for index, inst in enumerate(generate(cfg, count)):
        chk = check_instance(pipeline, inst, eps=eps, index=index)
        violations.extend(chk.violations)
        if chk.share_ratio is not None:
            worst = chk.share_ratio if worst is None else min(
                worst, chk.share_ratio)
        checked += 1

    report_path: Optional[str] = None
    if reproducer_dir is not None and violations:
        directory = Path(reproducer_dir)
        directory.mkdir(parents=True, exist_ok=True)
        path = directory / f"violations-{pipeline}-seed{cfg.seed}.json"
        payload = {
            "pipeline": pipeline,
            "eps": str(eps),
            "count": count,
            "config": dataclasses.asdict(cfg),
            "violations": [_violation_json(v) for v in violations],
        }
        path.write_text(json.dumps(payload, indent=2, sort_keys=True))
        report_path = str(path)

    return SuiteSummary(pipeline=pipeline, config=cfg, count=count, eps=eps,
                        checked=checked, violations=tuple(violations),
                        worst_share_ratio=worst, report_path=report_path)


def replay_reproducer(path: str | Path) -> tuple[Violation, ...]:
    """Re-run the checks recorded in a reproducer file.

    Each violating instance is rebuilt from its JSON snapshot and
    re-audited with the recorded pipeline and eps; the returned
    violations match the file's contents when the code is unchanged.
    """
    try:
        data = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read reproducer {path}: {exc}") from None
    try:
        kind = data["pipeline"]
        eps = Fraction(data["eps"])
        recorded = data["violations"]
    except (KeyError, ValueError, TypeError) as exc:
        raise InputError(f"malformed reproducer {path}: {exc}") from None
    out: list[Violation] = []
    seen: set[int] = set()
    for item in recorded:
        index = item["index"]
        if index in seen:
            continue
        seen.add(index)
        inst = Instance.from_json_dict(item["instance"])
        out.extend(check_instance(kind, inst, eps=eps, index=index).violations)
    return tuple(out)


if __name__ == "__main__":
    import doctest

    doctest.testmod(verbose=True)
