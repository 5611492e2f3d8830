"""Command-line front door: solve, verify, and explore instances.

Subcommands
-----------
* ``solve2`` — randomized two-agent allocation from a chosen seeding
  mode, emitting the report JSON.
* ``solve3`` — randomized three-agent allocation (exact, approximate,
  or staged-repair mode) with case traces and per-entry certificates.
* ``verify`` — agent-side re-check of a previously emitted report.
* ``oracle`` — per-agent share values and witness partitions.
* ``gen`` — deterministic instance streams, one JSON object per line.
* ``suite`` — run a pipeline over a generated stream and summarize
  oracle verdicts; violations can be dumped as replayable reproducers.

Exit codes: 0 ok; 1 verification failure; 2 capacity exceeded;
3 bad input (including command-line usage errors).

Report JSON schema (solve2/solve3, consumed by ``verify``)::

    {"lottery": [{"p": "1/6", "allocation": [["g1"], ...], "label": "X^1"},
                 ...],
     "certificates": {"<entry index>": [[["g1"], ...], ...] per agent},
     "traces": ["divider 1: case1, ...", ...],
     "verdicts": {"agents": [...], "violations": [...], "ok": true}}

Instances are JSON objects with integer or exact-rational string
values (floats are rejected)::

    {"agents": 2, "items": ["g1", "g2"], "valuations": [[3, "1/2"], ...]}
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path
from typing import Optional, Sequence

from .bobw2 import bobw_two_agents
from .bobw3 import bobw3_poly_state, exact_pairs, fptas_pairs, lottery_from_pairs
from .core import (
    CapacityError,
    InputError,
    Instance,
    Lottery,
    LotteryEntry,
    Partition,
    bundle_value,
)
from .harness import (
    _NEEDS_AGENTS,
    DISTRIBUTIONS,
    PIPELINES,
    GeneratorConfig,
    _adoption_str,
    _trace_str,
    classify_violations,
    generate,
    run_suite,
)
from .mms_solvers import MmsSolverConfig, make_provider
from .oracles import check_lottery, prop_share
from .verify import VerificationReport, verify_lottery_report

EXIT_OK = 0
EXIT_VERIFICATION = 1
EXIT_CAPACITY = 2
EXIT_INPUT = 3


class _Parser(argparse.ArgumentParser):
    """argparse's default usage-error exit code collides with the
    capacity code; usage errors are input errors here."""

    def error(self, message: str) -> None:  # type: ignore[override]
        raise InputError(message)


# ---------------------------------------------------------------------------
# Shared plumbing


def _read_text(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from None


def _load_instance(path: str) -> Instance:
    return Instance.from_json(_read_text(path))


def _parse_eps(text: str) -> Fraction:
    try:
        eps = Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise InputError(f"bad eps {text!r}: {exc}") from None
    if not 0 <= eps < 1:
        raise InputError(f"eps must be in [0, 1), got {eps}")
    return eps


def _frac(x: Fraction) -> str:
    return str(x)


def _solver_mode(name: str) -> str:
    # the flag says "ptas"; the solver names its family construction
    return "ptas_f_m2" if name == "ptas" else name


def _alloc_json(inst: Instance, alloc: Sequence[int]) -> list[list[str]]:
    return [inst.bundle_ids(mask) for mask in alloc]


def _lottery_json(inst: Instance, lottery: Lottery) -> list[dict]:
    return [
        {"p": _frac(e.prob), "allocation": _alloc_json(inst, e.allocation),
         "label": e.label}
        for e in lottery.entries
    ]


def _certs_json(inst: Instance, certs: Sequence[Sequence[Partition]]) -> dict:
    return {
        str(e): [_alloc_json(inst, cert) for cert in row]
        for e, row in enumerate(certs)
    }


def _lottery_from_json(inst: Instance, data: object) -> Lottery:
    if not isinstance(data, list) or not data:
        raise InputError("report 'lottery' must be a non-empty list")
    entries = []
    for pos, raw in enumerate(data):
        try:
            prob = Fraction(raw["p"])
            alloc = tuple(inst.mask_of_ids(b) for b in raw["allocation"])
            label = raw.get("label", "")
        except (KeyError, TypeError, ValueError) as exc:
            raise InputError(f"bad lottery entry {pos}: {exc}") from None
        entries.append(LotteryEntry(prob, alloc, label=label))
    return Lottery(tuple(entries))


def _certs_from_json(inst: Instance, data: object, entries: int,
                     ) -> Optional[list[list[Optional[Partition]]]]:
    if data is None or data == {}:
        return None
    if not isinstance(data, dict):
        raise InputError("report 'certificates' must be an object")
    rows: list[list[Optional[Partition]]] = []
    for e in range(entries):
        raw = data.get(str(e))
        if raw is None:
            rows.append([None] * inst.n)
            continue
        if not isinstance(raw, list) or len(raw) != inst.n:
            raise InputError(
                f"certificates[{e!r}] must list one entry per agent")
        row: list[Optional[Partition]] = []
        for t, cert in enumerate(raw):
            if cert is None:
                row.append(None)
                continue
            try:
                row.append(tuple(inst.mask_of_ids(b) for b in cert))
            except (TypeError, InputError) as exc:
                raise InputError(
                    f"certificates[{e}][{t}] is malformed: {exc}") from None
        rows.append(row)
    unknown = set(data) - {str(e) for e in range(entries)}
    if unknown:
        raise InputError(
            f"certificates key {sorted(unknown)[0]!r} matches no entry")
    return rows


def _oracle_verdicts(kind: str, lottery: Lottery, inst: Instance,
                     eps: Fraction, pairs=None) -> dict:
    violations = classify_violations(kind, lottery, inst, eps, pairs=pairs)
    with_eefx = kind in ("bobw3_exact", "bobw3_fptas")
    audit = check_lottery(lottery, inst, eps=eps, with_eefx=with_eefx,
                          with_rmms=False)
    agents = []
    for i in range(inst.n):
        entry = {
            "agent": i + 1,
            "expected": _frac(audit.expected[i]),
            "proportional_share": _frac(audit.prop[i]),
            "maximin_share": _frac(audit.mms[i]),
            "ex_ante_proportional": audit.ex_ante_prop[i],
            "efx_per_allocation": [a.efx[i] for a in audit.allocations],
        }
        if with_eefx:
            entry["eefx_per_allocation"] = [
                a.eefx[i] for a in audit.allocations]
        agents.append(entry)
    return {
        "agents": agents,
        "violations": [{"category": v.category, "message": v.message}
                       for v in violations],
        "ok": not violations,
    }


def _verify_verdicts(report: VerificationReport) -> dict:
    agents = []
    for a in report.agents:
        agents.append({
            "agent": a.agent + 1,
            "expected": _frac(a.expected),
            "proportional_share": _frac(a.prop),
            "ex_ante_proportional": a.ex_ante_prop,
            "values_per_allocation": [_frac(v) for v in a.values],
            "efx_per_allocation": list(a.efx),
            "certificate_ok_per_allocation": list(a.certificate_ok),
            "envy_ok_per_allocation": list(a.envy_ok),
            "share_estimate": _frac(a.share_estimate),
            "share_ok_per_allocation": list(a.share_ok),
            "failures": list(a.failures),
            "ok": a.ok,
        })
    return {
        "eps": _frac(report.eps),
        "agents": agents,
        "failures": list(report.failures),
        "ok": report.ok,
    }


def _emit(payload: dict) -> None:
    json.dump(payload, sys.stdout, indent=2)
    sys.stdout.write("\n")


# ---------------------------------------------------------------------------
# solve2


def _explicit_seeds(inst: Instance, path: str) -> tuple[tuple[int, int], ...]:
    try:
        raw = json.loads(_read_text(path))
    except json.JSONDecodeError as exc:
        raise InputError(f"bad seeds JSON: {exc}") from None
    if not isinstance(raw, list) or len(raw) != 2:
        raise InputError("seeds file must list one 2-part split per agent")
    seeds = []
    for t, split in enumerate(raw):
        if not isinstance(split, list) or len(split) != 2:
            raise InputError(f"seed {t}: expected two bundles of item ids")
        seeds.append(tuple(inst.mask_of_ids(b) for b in split))
    return tuple(seeds)


def _cmd_solve2(args: argparse.Namespace) -> int:
    inst = _load_instance(args.instance)
    if inst.n != 2:
        raise InputError(f"solve2 needs a 2-agent instance, got {inst.n}")
    eps = _parse_eps(args.eps)
    mode = args.seed_mode
    if mode in ("fptas", "ptas") and eps == 0:
        raise InputError(f"--seed-mode {mode} needs --eps > 0")
    if mode == "explicit":
        if args.seeds is None:
            raise InputError("--seed-mode explicit needs --seeds FILE")
        seeds = _explicit_seeds(inst, args.seeds)
    else:
        cfg = (MmsSolverConfig(state_cap=args.caps) if mode == "exact"
               else MmsSolverConfig(mode=_solver_mode(mode), eps=eps,
                                    state_cap=args.caps))
        provider = make_provider(cfg)
        seeds = tuple(
            provider(inst.values_of(i), inst.ground, 2)[:2] for i in range(2))
    lottery = bobw_two_agents(inst.values_of(0), inst.values_of(1),
                              seeds[0], seeds[1])
    verdicts = _oracle_verdicts("bobw2", lottery, inst, eps)
    _emit({
        "command": "solve2",
        "seed_mode": mode,
        "eps": _frac(eps),
        "lottery": _lottery_json(inst, lottery),
        "certificates": {},
        "traces": [],
        "verdicts": verdicts,
    })
    return EXIT_OK if verdicts["ok"] else EXIT_VERIFICATION


# ---------------------------------------------------------------------------
# solve3


def _cmd_solve3(args: argparse.Namespace) -> int:
    inst = _load_instance(args.instance)
    if inst.n != 3:
        raise InputError(f"solve3 needs a 3-agent instance, got {inst.n}")
    eps = _parse_eps(args.eps)
    if args.mode in ("fptas", "poly") and eps == 0:
        raise InputError(f"--mode {args.mode} needs --eps > 0")
    if args.mode == "exact":
        kind = "bobw3_exact"
        eps = Fraction(0)
        pairs = exact_pairs(inst, state_cap=args.caps)
        adoptions = ()
    elif args.mode == "fptas":
        kind = "bobw3_fptas"
        pairs = fptas_pairs(inst, eps, state_cap=args.caps)
        adoptions = ()
    else:
        kind = "bobw3_poly"
        state = bobw3_poly_state(inst, eps, state_cap=args.caps)
        pairs = state.pairs
        adoptions = state.adoptions
    lottery, certs = lottery_from_pairs(inst, pairs)
    traces = [_trace_str(pr) for pr in pairs]
    traces += [_adoption_str(rec) for rec in adoptions]
    verdicts = _oracle_verdicts(kind, lottery, inst, eps, pairs=pairs)
    _emit({
        "command": "solve3",
        "mode": args.mode,
        "eps": _frac(eps),
        "lottery": _lottery_json(inst, lottery),
        "certificates": _certs_json(inst, certs),
        "traces": traces,
        "verdicts": verdicts,
    })
    return EXIT_OK if verdicts["ok"] else EXIT_VERIFICATION


# ---------------------------------------------------------------------------
# verify


def _cmd_verify(args: argparse.Namespace) -> int:
    inst = _load_instance(args.instance)
    try:
        report_data = json.loads(_read_text(args.report))
    except json.JSONDecodeError as exc:
        raise InputError(f"bad report JSON: {exc}") from None
    if not isinstance(report_data, dict) or "lottery" not in report_data:
        raise InputError("report must be an object with a 'lottery' field")
    lottery = _lottery_from_json(inst, report_data["lottery"])
    certs = _certs_from_json(inst, report_data.get("certificates"),
                             len(lottery.entries))
    if args.eps is not None:
        eps = _parse_eps(args.eps)
    else:
        eps = _parse_eps(str(report_data.get("eps", "0")))
    report = verify_lottery_report(lottery, inst, certs, eps)
    _emit(_verify_verdicts(report))
    return EXIT_OK if report.ok else EXIT_VERIFICATION


# ---------------------------------------------------------------------------
# oracle


def _cmd_oracle(args: argparse.Namespace) -> int:
    inst = _load_instance(args.instance)
    eps = _parse_eps(args.eps)
    if args.mode != "exact" and eps == 0:
        raise InputError(f"--mode {args.mode} needs --eps > 0")
    cfg = (MmsSolverConfig(state_cap=args.caps) if args.mode == "exact"
           else MmsSolverConfig(mode=_solver_mode(args.mode), eps=eps,
                                state_cap=args.caps))
    provider = make_provider(cfg)
    agents = []
    for i in range(inst.n):
        values = inst.values_of(i)
        part = provider(values, inst.ground, inst.n)
        agents.append({
            "agent": i + 1,
            "proportional_share": _frac(prop_share(values, inst.n)),
            "partition_minimum": _frac(
                min(bundle_value(values, mask) for mask in part)),
            "partition": _alloc_json(inst, part),
        })
    _emit({
        "command": "oracle",
        "mode": args.mode,
        "eps": _frac(eps),
        "parts": inst.n,
        "agents": agents,
    })
    return EXIT_OK


# ---------------------------------------------------------------------------
# gen and suite


def _generator_config(args: argparse.Namespace, n: int) -> GeneratorConfig:
    return GeneratorConfig(
        seed=args.seed, n=n, m_min=args.m_min, m_max=args.m_max,
        distribution=args.distribution, value_max=args.value_max,
        perturbation=args.perturbation)


def _cmd_gen(args: argparse.Namespace) -> int:
    cfg = _generator_config(args, args.agents)
    for inst in generate(cfg, args.count):
        sys.stdout.write(json.dumps(inst.to_json_dict()) + "\n")
    return EXIT_OK


def _cmd_suite(args: argparse.Namespace) -> int:
    n = args.agents if args.agents is not None else _NEEDS_AGENTS[args.pipeline]
    cfg = _generator_config(args, n)
    eps = _parse_eps(args.eps)
    summary = run_suite(args.pipeline, cfg, args.count, eps=eps,
                        reproducer_dir=args.out)
    _emit({
        "command": "suite",
        "pipeline": summary.pipeline,
        "eps": _frac(summary.eps),
        "checked": summary.checked,
        "ok": summary.ok,
        "counts": summary.counts,
        "worst_share_ratio": (None if summary.worst_share_ratio is None
                              else _frac(summary.worst_share_ratio)),
        "report_path": summary.report_path,
        "violations": [
            {"index": v.index, "source": v.source, "category": v.category,
             "message": v.message}
            for v in summary.violations
        ],
    })
    # The baselines make no guarantees: their violations are data, so
    # the run itself still succeeds.
    if summary.ok or args.pipeline == "baselines":
        return EXIT_OK
    return EXIT_VERIFICATION


# ---------------------------------------------------------------------------
# Parser


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="fairdiv",
        description=("Randomized fair division of indivisible goods for "
                     "two and three agents, with independent verification."))
    sub = parser.add_subparsers(dest="command", required=True)

    def add_instance(p: _Parser) -> None:
        p.add_argument("--instance", required=True, metavar="FILE",
                       help="instance JSON file ('-' for stdin)")

    def add_eps(p: _Parser, default: str = "0") -> None:
        p.add_argument("--eps", default=default, metavar="P/Q",
                       help="approximation tolerance as an exact rational "
                            f"(default {default})")

    def add_caps(p: _Parser) -> None:
        p.add_argument("--caps", type=int, default=20_000_000, metavar="N",
                       help="solver state budget in DP cells "
                            "(default 20000000)")

    p2 = sub.add_parser("solve2", parents=[], description=(
        "Randomized allocation for two agents: envy-free in expectation, "
        "envy-free up to any good in every realization, with a worst-case "
        "value floor set by the seed partitions."))
    add_instance(p2)
    add_eps(p2)
    p2.add_argument("--seed-mode", default="exact",
                    choices=("exact", "fptas", "ptas", "explicit"),
                    help="where each agent's 2-part seed split comes from")
    p2.add_argument("--seeds", metavar="FILE",
                    help="explicit seeds JSON: one [bundle, bundle] pair of "
                         "item-id lists per agent")
    add_caps(p2)
    p2.set_defaults(func=_cmd_solve2)

    p3 = sub.add_parser("solve3", description=(
        "Randomized allocation for three agents over six support "
        "allocations, proportional in expectation with per-realization "
        "share and envy guarantees."))
    add_instance(p3)
    p3.add_argument("--mode", default="exact",
                    choices=("exact", "fptas", "poly"),
                    help="base-partition quality: exact shares, "
                         "(1-eps)-approximate, or approximate plus the "
                         "staged repair that restores exact expectations")
    add_eps(p3)
    add_caps(p3)
    p3.set_defaults(func=_cmd_solve3)

    pv = sub.add_parser("verify", description=(
        "Re-check a report using only per-agent arithmetic: expected "
        "value vs the proportional floor, envy via the attached "
        "certificates, and the share floor vs a locally computed "
        "estimate."))
    add_instance(pv)
    pv.add_argument("--report", required=True, metavar="FILE",
                    help="report JSON emitted by solve2/solve3 "
                         "('-' for stdin)")
    pv.add_argument("--eps", default=None, metavar="P/Q",
                    help="tolerance override (default: the report's eps)")
    pv.set_defaults(func=_cmd_verify)

    po = sub.add_parser("oracle", description=(
        "Per-agent share values and witness partitions from the "
        "configured solver."))
    add_instance(po)
    po.add_argument("--mode", default="exact",
                    choices=("exact", "fptas", "ptas"),
                    help="solver mode (ptas: two-part splits only)")
    add_eps(po)
    add_caps(po)
    po.set_defaults(func=_cmd_oracle)

    def add_generator(p: _Parser, default_agents: Optional[int]) -> None:
        p.add_argument("--seed", type=int, default=0, metavar="N",
                       help="stream seed (default 0)")
        p.add_argument("--count", type=int, default=10, metavar="N",
                       help="number of instances (default 10)")
        if default_agents is None:
            p.add_argument("--agents", type=int, default=None, metavar="N",
                           help="agents per instance (default: what the "
                                "pipeline needs)")
        else:
            p.add_argument("--agents", type=int, default=default_agents,
                           metavar="N",
                           help=f"agents per instance "
                                f"(default {default_agents})")
        p.add_argument("--m-min", type=int, default=4, metavar="N",
                       help="minimum items (default 4)")
        p.add_argument("--m-max", type=int, default=8, metavar="N",
                       help="maximum items (default 8)")
        p.add_argument("--distribution", default="uniform",
                       choices=DISTRIBUTIONS,
                       help="value distribution (default uniform)")
        p.add_argument("--value-max", type=int, default=20, metavar="V",
                       help="largest drawn value (default 20)")
        p.add_argument("--perturbation", type=int, default=2, metavar="N",
                       help="near-identical distortion budget (default 2)")

    pg = sub.add_parser("gen", description=(
        "Emit a deterministic instance stream, one JSON object per line."))
    add_generator(pg, default_agents=3)
    pg.set_defaults(func=_cmd_gen)

    ps = sub.add_parser("suite", description=(
        "Run one pipeline over a generated stream and aggregate oracle "
        "verdicts.  Violations are reported as data; guarantee-bearing "
        "pipelines exit nonzero when any occur."))
    ps.add_argument("--pipeline", required=True, choices=PIPELINES)
    add_generator(ps, default_agents=None)
    add_eps(ps, default="1/10")
    ps.add_argument("--out", default=None, metavar="DIR",
                    help="directory for violation reproducer files")
    ps.set_defaults(func=_cmd_suite)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except InputError as exc:
        print(f"fairdiv: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except CapacityError as exc:
        print(f"fairdiv: capacity exceeded: {exc}", file=sys.stderr)
        return EXIT_CAPACITY


if __name__ == "__main__":
    sys.exit(main())
