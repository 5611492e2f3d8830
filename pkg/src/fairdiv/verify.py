"""Agent-side verification of randomized-allocation guarantees.

Everything here is computable by one agent from what she is handed:
her own valuation, the instance's item set, the lottery's support with
its probabilities, a certificate partition per allocation, and the
approximation parameter.  No pipeline internals are consulted.

Three independent checks per agent:

1. *Ex-ante share*: her exact expected value across the support is at
   least a 1/n fraction of her total value.
2. *Envy audit*: in every allocation she is EFX-satisfied outright, or
   the certificate supplied for that allocation proves her bundle
   EFX-dominates a full repartition of the other items (the
   polynomial-time stand-in for the exponential EEFX check).
3. *Share floor*: in every allocation she receives at least ``1 - eps``
   of a share estimate she can compute herself, or is EFX-satisfied
   and receives at least ``9/10 - eps`` of that estimate.

The share estimate in item 3 is the minimum bundle of a partition from
:mod:`fairdiv.mms_solvers`, built with the same configuration the
allocator used — exact when ``eps`` is zero, the certified
approximation scheme otherwise.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from fairdiv.core import (
    Allocation,
    InputError,
    Instance,
    Lottery,
    Partition,
    Values,
    bundle_value,
    is_partition_of,
    iter_items,
)
from fairdiv.mms_solvers import MmsSolverConfig, make_provider

__all__ = [
    "EEFXCertificate",
    "AgentVerification",
    "VerificationReport",
    "verify_certificate",
    "verify_lottery_report",
]


# ---------------------------------------------------------------------------
# Certificates


@dataclass(frozen=True)
class EEFXCertificate:
    """A partition presented to `agent` that contains `bundle` verbatim;
    it certifies the bundle as EFX-satisfying when the bundle
    EFX-dominates every other part."""

    agent: int
    bundle: int
    partition: Partition


def _dominates(values: Values, mine: int, other: int) -> bool:
    """EFX domination: `mine` is worth at least `other` less any single
    item (the binding removal is the other bundle's cheapest item)."""
    if other == 0:
        return True
    worth = bundle_value(values, other)
    cheapest = min(values[j] for j in iter_items(other))
    return bundle_value(values, mine) >= worth - cheapest


def _alloc_efx(values: Values, alloc: Allocation, agent: int) -> bool:
    mine = alloc[agent]
    return all(_dominates(values, mine, b)
               for t, b in enumerate(alloc) if t != agent)


def verify_certificate(values: Values, cert: EEFXCertificate) -> bool:
    """True iff the certified bundle EFX-dominates every other part of
    the certificate partition.  Pure arithmetic, no search.

    Raises InputError if the certified bundle is not one of the
    partition's parts.

    >>> from fractions import Fraction as F
    >>> v = (F(4), F(2), F(6), F(5), F(1))
    >>> verify_certificate(v, EEFXCertificate(0, 0b00100, (0b00011, 0b00100, 0b11000)))
    True
    >>> verify_certificate(v, EEFXCertificate(0, 0b00011, (0b00011, 0b00100, 0b11000)))
    True
    >>> verify_certificate(v, EEFXCertificate(0, 0b00001, (0b00001, 0b00110, 0b11000)))
    False
    """
    if cert.bundle not in cert.partition:
        raise InputError(
            f"certificate for agent {cert.agent + 1} does not contain its "
            "own bundle as a part")
    return all(_dominates(values, cert.bundle, part)
               for part in cert.partition if part != cert.bundle)


# ---------------------------------------------------------------------------
# Full reports


@dataclass(frozen=True)
class AgentVerification:
    """One agent's verdicts.  Tuples are aligned with the lottery's
    entries.  `certificate_ok` holds None where no certificate was
    consulted (the agent was EFX-satisfied outright, or none was
    supplied), True/False for a consulted certificate."""

    agent: int
    expected: Fraction
    prop: Fraction
    ex_ante_prop: bool
    values: tuple[Fraction, ...]
    efx: tuple[bool, ...]
    certificate_ok: tuple[Optional[bool], ...]
    envy_ok: tuple[bool, ...]
    share_estimate: Fraction
    share_ok: tuple[bool, ...]
    failures: tuple[str, ...]

    @property
    def ok(self) -> bool:
        return (self.ex_ante_prop and all(self.envy_ok)
                and all(self.share_ok))


@dataclass(frozen=True)
class VerificationReport:
    """Per-agent verification verdicts for one lottery."""

    eps: Fraction
    agents: tuple[AgentVerification, ...]

    @property
    def ex_ante_ok(self) -> bool:
        return all(a.ex_ante_prop for a in self.agents)

    @property
    def envy_ok(self) -> bool:
        return all(all(a.envy_ok) for a in self.agents)

    @property
    def share_ok(self) -> bool:
        return all(all(a.share_ok) for a in self.agents)

    @property
    def ok(self) -> bool:
        return all(a.ok for a in self.agents)

    @property
    def failures(self) -> tuple[str, ...]:
        return tuple(msg for a in self.agents for msg in a.failures)


Certificates = Sequence[Sequence[Optional[Partition]]]


def _check_eps(eps: Fraction) -> Fraction:
    eps = Fraction(eps)
    if not 0 <= eps < 1:
        raise InputError(f"eps must be in [0, 1), got {eps}")
    return eps


def verify_lottery_report(lottery: Lottery, inst: Instance,
                          certs: Optional[Certificates],
                          eps: Fraction) -> VerificationReport:
    """Run all three per-agent checks over a lottery.

    `certs`, when given, is one row per lottery entry and one optional
    partition per agent, in entry order.  A certificate is consulted
    only where the agent is not EFX-satisfied; a missing or structurally
    broken one there fails the envy audit for that allocation, with a
    failure message naming the agent and the allocation.

    >>> from fractions import Fraction as F
    >>> from fairdiv.bobw3 import bobw3_exact
    >>> inst = Instance.from_rows([(F(1), F(1), F(1))] * 3)
    >>> lottery, certs = bobw3_exact(inst)
    >>> verify_lottery_report(lottery, inst, certs, F(0)).ok
    True
    """
    eps = _check_eps(eps)
    lottery.validate_against(inst)
    if certs is not None:
        if len(certs) != len(lottery.entries):
            raise InputError(
                f"{len(certs)} certificate rows for "
                f"{len(lottery.entries)} lottery entries")
        for row in certs:
            if len(row) != inst.n:
                raise InputError(
                    f"certificate row has {len(row)} slots, instance has "
                    f"{inst.n} agents")

    mode = MmsSolverConfig() if eps == 0 else MmsSolverConfig(
        mode="fptas", eps=eps)
    provider = make_provider(mode)

    agents = []
    for t in range(inst.n):
        v = inst.valuations[t]
        prop = bundle_value(v, inst.ground) / inst.n
        expected = lottery.expected_value(v, t)
        estimate = min(bundle_value(v, b)
                       for b in provider(v, inst.ground, inst.n))

        failures = []
        if expected < prop:
            failures.append(
                f"agent {t + 1}: expected value {expected} is below the "
                f"proportional share {prop}")

        values = []
        efx_flags = []
        cert_flags: list[Optional[bool]] = []
        envy_flags = []
        share_flags = []
        for e_idx, entry in enumerate(lottery.entries):
            name = entry.label or f"allocation {e_idx + 1}"
            mine = entry.allocation[t]
            worth = bundle_value(v, mine)
            values.append(worth)
            efx = _alloc_efx(v, entry.allocation, t)
            efx_flags.append(efx)

            cert: Optional[bool] = None
            envy = efx
            if not efx:
                part = certs[e_idx][t] if certs is not None else None
                if part is None:
                    failures.append(
                        f"agent {t + 1}: not EFX-satisfied in {name} and "
                        "no certificate was supplied")
                elif not is_partition_of(part, inst.ground):
                    cert = False
                    failures.append(
                        f"agent {t + 1}: certificate for {name} is not a "
                        "partition of the items")
                else:
                    try:
                        cert = verify_certificate(
                            v, EEFXCertificate(t, mine, part))
                    except InputError as exc:
                        cert = False
                        failures.append(f"{name}: {exc}")
                    else:
                        if not cert:
                            failures.append(
                                f"agent {t + 1}: certificate for {name} "
                                "does not prove domination")
                envy = bool(cert)
            cert_flags.append(cert)
            envy_flags.append(envy)

            share = (worth >= (1 - eps) * estimate
                     or (efx and worth >= (Fraction(9, 10) - eps) * estimate))
            share_flags.append(share)
            if not share:
                failures.append(
                    f"agent {t + 1}: value {worth} in {name} is below the "
                    f"share floor (estimate {estimate}, eps {eps})")

        agents.append(AgentVerification(
            agent=t, expected=expected, prop=prop,
            ex_ante_prop=expected >= prop,
            values=tuple(values), efx=tuple(efx_flags),
            certificate_ok=tuple(cert_flags), envy_ok=tuple(envy_flags),
            share_estimate=estimate, share_ok=tuple(share_flags),
            failures=tuple(failures)))

    return VerificationReport(eps=eps, agents=tuple(agents))
