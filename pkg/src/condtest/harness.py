"""Simulation study: scenario sweeps, error statistics, traces, timings.

For Poisson data the exact conditional cdf has a binomial closed form, so
every replicate's three estimates (fiber chain, orbit chain, permutation)
can be scored against an exact reference.  Results are serialized as CSV
and JSON; convergence traces and error histograms can be rendered to PNG
next to the delimited files.
"""

from __future__ import annotations

import csv
import dataclasses
import json
import platform
import statistics
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .exact import binomial_closed_form_cdf
from .families import FamilySpec, Scenario, builtin_family, sample_iid
from .fiber import SampleVector
from .orbits import to_frequency
from .samplers import (
    ChainConfig,
    mc_replications_rule,
    mcmc_fiber_accelerated,
    mcmc_orbit,
    permutation_test,
)

DEFAULT_FIBER_CFG = ChainConfig(steps=4000, burn_in=1000)
DEFAULT_ORBIT_CFG = ChainConfig(steps=850, burn_in=250)
DEFAULT_PERM_REPLICATIONS = 10_000

BIAS_CSV_HEADER = [
    "scenario",
    "replicate",
    "seed",
    "t",
    "u_obs",
    "exact_reference",
    "estimate_fiber",
    "estimate_orbit",
    "estimate_perm",
    "bias_fiber",
    "bias_orbit",
    "bias_perm",
    "flagged",
]

TRACE_CSV_HEADER = ["method", "step", "estimate", "exact", "perm_reference"]


def table3_scenarios(family: FamilySpec | None = None) -> list[Scenario]:
    """The nine study scenarios: three size pairs crossed with three means."""
    fam = family or builtin_family("poisson")
    sizes = [(6, 4), (10, 15), (30, 20)]
    means = [(1.0, 1.0), (1.0, 1.5), (1.0, 2.0)]
    return [
        Scenario(n1=n1, n2=n2, mu1=m1, mu2=m2, family=fam)
        for (n1, n2) in sizes
        for (m1, m2) in means
    ]


def derive_seed(master: int, *key: int) -> int:
    """A reproducible 63-bit child seed from a master seed and an index path."""
    ss = np.random.SeedSequence([int(master), *[int(k) for k in key]])
    return int(ss.generate_state(2, np.uint32).view(np.uint64)[0] >> 1)


@dataclass(frozen=True)
class BiasRecord:
    """Per-replicate errors of the three estimates against the exact value."""

    scenario: Scenario
    replicate: int
    seed: int
    t: int
    u_obs: int
    exact_reference: float
    estimate_fiber: float
    estimate_orbit: float
    estimate_perm: float
    bias_fiber: float
    bias_orbit: float
    bias_perm: float
    flagged: bool = False


def run_scenario(
    scenario: Scenario,
    replicates: int,
    fiber_cfg: ChainConfig = DEFAULT_FIBER_CFG,
    orbit_cfg: ChainConfig = DEFAULT_ORBIT_CFG,
    perm_replications: int | None = None,
    master_seed: int = 0,
) -> list[BiasRecord]:
    """Draw data, run the three samplers, score each against the reference.

    Per replicate, each group is drawn i.i.d. from the scenario family at
    its own mean; the reference is the exact null conditional cdf at the
    replicate's (t, u_obs).  All child seeds derive from ``master_seed``
    and the replicate index, so replicates can run in any order.

    ``perm_replications=None`` sizes each replicate's permutation test by
    the observed orbit's share of the space (the same rule the orbit chain
    uses, with ``orbit_cfg.mc_total_budget``); for large spaces that is
    deliberately few draws, matching the permutation test's role as the
    one-orbit limit of the orbit chain.
    """
    if replicates < 1:
        raise ValueError("replicates must be at least 1")
    family = scenario.family
    records = []
    for rep in range(replicates):
        data_rng = np.random.Generator(
            np.random.PCG64(derive_seed(master_seed, rep, 0))
        )
        y1 = sample_iid(family, scenario.mu1, scenario.n1, data_rng)
        y2 = sample_iid(family, scenario.mu2, scenario.n2, data_rng)
        y_obs = SampleVector(tuple(y1 + y2), scenario.n1)
        t = y_obs.t
        u_obs = y_obs.u
        if t == 0:
            records.append(
                BiasRecord(
                    scenario=scenario,
                    replicate=rep,
                    seed=master_seed,
                    t=0,
                    u_obs=0,
                    exact_reference=1.0,
                    estimate_fiber=1.0,
                    estimate_orbit=1.0,
                    estimate_perm=1.0,
                    bias_fiber=0.0,
                    bias_orbit=0.0,
                    bias_perm=0.0,
                    flagged=True,
                )
            )
            continue
        reference = float(binomial_closed_form_cdf(t, scenario.n1, scenario.n2).values[u_obs])
        est_fiber, _ = mcmc_fiber_accelerated(
            y_obs, family, dataclasses.replace(fiber_cfg, seed=derive_seed(master_seed, rep, 1))
        )
        est_orbit, _ = mcmc_orbit(
            y_obs, family, dataclasses.replace(orbit_cfg, seed=derive_seed(master_seed, rep, 2))
        )
        n_perm = perm_replications
        if n_perm is None:
            n_perm = mc_replications_rule(to_frequency(y_obs), orbit_cfg.mc_total_budget)
        est_perm = permutation_test(y_obs, n_perm, seed=derive_seed(master_seed, rep, 3))
        records.append(
            BiasRecord(
                scenario=scenario,
                replicate=rep,
                seed=master_seed,
                t=t,
                u_obs=u_obs,
                exact_reference=reference,
                estimate_fiber=float(est_fiber.point),
                estimate_orbit=float(est_orbit.point),
                estimate_perm=float(est_perm.point),
                bias_fiber=reference - float(est_fiber.point),
                bias_orbit=reference - float(est_orbit.point),
                bias_perm=reference - float(est_perm.point),
            )
        )
    return records


@dataclass(frozen=True)
class SummaryRow:
    """Error statistics for one (scenario, method) cell.

    ``mad`` is the mean absolute deviation about the sample mean; ``mad0``
    the mean absolute error about zero, the theoretical mean.  Both are
    reported because either convention can be meant by "MAD".
    """

    scenario: str
    method: str
    mean: float
    range: float
    sd: float
    mad: float
    mad0: float


@dataclass(frozen=True)
class SummaryTable:
    rows: tuple[SummaryRow, ...]

    def row(self, scenario_label: str, method: str) -> SummaryRow:
        for r in self.rows:
            if r.scenario == scenario_label and r.method == method:
                return r
        raise KeyError((scenario_label, method))

    def to_json_obj(self) -> list[dict]:
        return [dataclasses.asdict(r) for r in self.rows]


def summarize(records: Sequence[BiasRecord]) -> SummaryTable:
    """Mean, range, standard deviation and both MADs, per scenario and method."""
    if not records:
        raise ValueError("no records to summarize")
    by_scenario: dict[str, list[BiasRecord]] = {}
    for rec in records:
        by_scenario.setdefault(rec.scenario.label, []).append(rec)
    rows = []
    for label, recs in by_scenario.items():
        for method, attr in (
            ("fiber", "bias_fiber"),
            ("orbit", "bias_orbit"),
            ("perm", "bias_perm"),
        ):
            biases = [getattr(r, attr) for r in recs]
            mean = statistics.fmean(biases)
            spread = max(biases) - min(biases)
            sd = statistics.stdev(biases) if len(biases) > 1 else 0.0
            mad = statistics.fmean(abs(b - mean) for b in biases)
            mad0 = statistics.fmean(abs(b) for b in biases)
            rows.append(
                SummaryRow(
                    scenario=label, method=method, mean=mean, range=spread, sd=sd,
                    mad=mad, mad0=mad0,
                )
            )
    return SummaryTable(rows=tuple(rows))


@dataclass(frozen=True)
class ConvergenceResult:
    """Running estimates of both chains plus the two reference levels."""

    t: int
    u_obs: int
    exact: float
    perm_reference: float
    fiber_running: tuple[float, ...]
    orbit_running: tuple[float, ...]

    def rows(self) -> Iterable[tuple[str, int, float, float, float]]:
        for name, series in (("fiber", self.fiber_running), ("orbit", self.orbit_running)):
            for step, est in enumerate(series, start=1):
                yield (name, step, est, self.exact, self.perm_reference)


def convergence_trace(
    y_obs: SampleVector,
    family: FamilySpec,
    steps: int,
    seed: int,
    *,
    perm_replications: int = DEFAULT_PERM_REPLICATIONS,
    mc_total_budget: int = 100_000,
) -> ConvergenceResult:
    """Per-step estimates of both chains from a common start, no burn-in.

    Two horizontal references come along: the exact closed-form value and
    a permutation estimate over the observed orbit.
    """
    t = y_obs.t
    u_obs = y_obs.u
    exact = float(binomial_closed_form_cdf(t, y_obs.n1, y_obs.n2).values[u_obs])
    fiber_cfg = ChainConfig(steps=steps, burn_in=0, seed=derive_seed(seed, 1))
    orbit_cfg = ChainConfig(
        steps=steps, burn_in=0, seed=derive_seed(seed, 2), mc_total_budget=mc_total_budget
    )
    _, fiber_trace = mcmc_fiber_accelerated(y_obs, family, fiber_cfg)
    _, orbit_trace = mcmc_orbit(y_obs, family, orbit_cfg)
    perm = permutation_test(y_obs, perm_replications, seed=derive_seed(seed, 3))
    return ConvergenceResult(
        t=t,
        u_obs=u_obs,
        exact=exact,
        perm_reference=float(perm.point),
        fiber_running=tuple(fiber_trace.estimates),
        orbit_running=tuple(orbit_trace.estimates),
    )


@dataclass(frozen=True)
class TimingRow:
    scenario: str
    seconds_perm: float
    seconds_fiber: float
    seconds_orbit: float


@dataclass(frozen=True)
class TimingReport:
    machine: str
    rows: tuple[TimingRow, ...]

    def to_json_obj(self) -> dict:
        return {
            "machine": self.machine,
            "rows": [dataclasses.asdict(r) for r in self.rows],
        }

    def ordering_holds(self) -> bool:
        """Permutation fastest, orbit chain slowest, for every scenario."""
        return all(
            r.seconds_perm < r.seconds_fiber < r.seconds_orbit for r in self.rows
        )


def timing_report(
    scenarios: Sequence[Scenario],
    fiber_cfg: ChainConfig = DEFAULT_FIBER_CFG,
    orbit_cfg: ChainConfig = DEFAULT_ORBIT_CFG,
    perm_replications: int = DEFAULT_PERM_REPLICATIONS,
    master_seed: int = 0,
    repeats: int = 1,
) -> TimingReport:
    """Wall-clock seconds per method per scenario (averages over repeats).

    Only the relative ordering is meaningful; absolute numbers are
    hardware-bound, hence the machine descriptor in the report.
    """
    rows = []
    for idx, scenario in enumerate(scenarios):
        data_rng = np.random.Generator(
            np.random.PCG64(derive_seed(master_seed, idx, 0))
        )
        y1 = sample_iid(scenario.family, scenario.mu1, scenario.n1, data_rng)
        y2 = sample_iid(scenario.family, scenario.mu2, scenario.n2, data_rng)
        y_obs = SampleVector(tuple(y1 + y2), scenario.n1)
        times = {"perm": 0.0, "fiber": 0.0, "orbit": 0.0}
        for rep in range(max(1, repeats)):
            t0 = time.perf_counter()
            permutation_test(y_obs, perm_replications, seed=derive_seed(master_seed, idx, rep, 1))
            times["perm"] += time.perf_counter() - t0
            t0 = time.perf_counter()
            mcmc_fiber_accelerated(
                y_obs,
                scenario.family,
                dataclasses.replace(fiber_cfg, seed=derive_seed(master_seed, idx, rep, 2)),
            )
            times["fiber"] += time.perf_counter() - t0
            t0 = time.perf_counter()
            mcmc_orbit(
                y_obs,
                scenario.family,
                dataclasses.replace(orbit_cfg, seed=derive_seed(master_seed, idx, rep, 3)),
            )
            times["orbit"] += time.perf_counter() - t0
        denom = max(1, repeats)
        rows.append(
            TimingRow(
                scenario=scenario.label,
                seconds_perm=times["perm"] / denom,
                seconds_fiber=times["fiber"] / denom,
                seconds_orbit=times["orbit"] / denom,
            )
        )
    return TimingReport(machine=platform.platform(), rows=tuple(rows))


def write_bias_records(records: Sequence[BiasRecord], path: Path | str) -> None:
    path = Path(path)
    with path.open("w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(BIAS_CSV_HEADER)
        for r in records:
            writer.writerow(
                [
                    r.scenario.label,
                    r.replicate,
                    r.seed,
                    r.t,
                    r.u_obs,
                    f"{r.exact_reference:.12g}",
                    f"{r.estimate_fiber:.12g}",
                    f"{r.estimate_orbit:.12g}",
                    f"{r.estimate_perm:.12g}",
                    f"{r.bias_fiber:.12g}",
                    f"{r.bias_orbit:.12g}",
                    f"{r.bias_perm:.12g}",
                    int(r.flagged),
                ]
            )


def write_summary(table: SummaryTable, path: Path | str) -> None:
    Path(path).write_text(json.dumps(table.to_json_obj(), indent=2) + "\n")


def write_trace(result: ConvergenceResult, path: Path | str) -> None:
    path = Path(path)
    with path.open("w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(TRACE_CSV_HEADER)
        for row in result.rows():
            writer.writerow([row[0], row[1], f"{row[2]:.12g}", f"{row[3]:.12g}", f"{row[4]:.12g}"])


def write_timing(report: TimingReport, path: Path | str) -> None:
    Path(path).write_text(json.dumps(report.to_json_obj(), indent=2) + "\n")
