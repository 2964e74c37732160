"""Command-line front end.

Every subcommand wraps one library entry point; the ``simulate`` report
path writes CSV/JSON plus, unless disabled, PNG figures alongside them.
"""

from __future__ import annotations

import csv
from fractions import Fraction
from pathlib import Path

import click
import numpy as np

from . import exact as exact_mod
from . import fiber as fiber_mod
from .basis import fiber_basis, orbit_basis, verify_connectivity, verify_kernel
from .families import Scenario, parse_family, sample_iid
from .fiber import SampleVector, build_fiber_graph, enumerate_fiber
from .harness import (
    convergence_trace,
    derive_seed,
    run_scenario,
    summarize,
    table3_scenarios,
    timing_report,
    write_bias_records,
    write_summary,
    write_timing,
    write_trace,
)
from .orbits import enumerate_orbits, orbit_table
from .samplers import (
    ChainConfig,
    mcmc_fiber_accelerated,
    mcmc_fiber_standard,
    mcmc_orbit,
    permutation_test,
)


def _load_data(text: str) -> list[int]:
    """Counts from a file path, or inline comma/whitespace-separated ints."""
    path = Path(text)
    if path.exists():
        raw = path.read_text()
    else:
        raw = text
    tokens = raw.replace(",", " ").split()
    try:
        return [int(tok) for tok in tokens]
    except ValueError as err:
        raise click.BadParameter(f"could not parse counts from {text!r}") from err


def _write_trace_csv(trace, path: str) -> None:
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["step", "U_or_orbit_id", "estimate_so_far"])
        for step, sid, est in trace.rows():
            writer.writerow([step, sid, f"{est:.12g}"])


def _print_estimate(estimate, trace=None) -> None:
    click.echo(f"method: {estimate.method}")
    if estimate.u_obs is not None:
        click.echo(f"u_obs: {estimate.u_obs}")
    if estimate.point is not None:
        click.echo(f"F(u_obs) estimate: {float(estimate.point):.6f}")
    if estimate.values is not None:
        vals = " ".join(f"{float(v):.4f}" for v in estimate.values)
        click.echo(f"cdf: {vals}")
    if estimate.degenerate:
        click.echo("note: degenerate case (chain cannot move)")
    if trace is not None:
        click.echo(
            f"accepted/rejected/inadmissible: "
            f"{trace.accepted}/{trace.rejected}/{trace.inadmissible}"
        )
        if trace.initial_orbit_estimate is not None:
            click.echo(f"observed-orbit estimate: {trace.initial_orbit_estimate:.6f}")


@click.group()
def main() -> None:
    """Conditional two-sample tests for non-negative discrete families."""


@main.command("fiber-graph")
@click.option("--n", "n", type=int, required=True, help="Vector length N.")
@click.option("--t", "t", type=int, required=True, help="Entry sum t.")
@click.option("--emit-dot", is_flag=True, help="Print a DOT-style edge listing.")
def fiber_graph_cmd(n: int, t: int, emit_dot: bool) -> None:
    """Build the move graph over the fiber and report its properties."""
    graph = build_fiber_graph(n, t)
    closed_form = (
        fiber_mod.fiber_edge_count(n, t) if n >= 2 and t >= 1 else len(graph.edges)
    )
    click.echo(f"vertices: {len(graph.vertices)}")
    click.echo(f"edges: {len(graph.edges)}")
    click.echo(f"edge count (closed form): {closed_form}")
    click.echo(f"connected: {fiber_mod.is_connected(graph)}")
    click.echo(f"bipartite: {fiber_mod.is_bipartite(graph)}")
    if emit_dot:
        click.echo("graph fiber {")
        for a, b in graph.edges:
            left = "".join(map(str, graph.vertices[a].entries))
            right = "".join(map(str, graph.vertices[b].entries))
            click.echo(f'  "{left}" -- "{right}";')
        click.echo("}")


@main.command("basis")
@click.option("--kind", type=click.Choice(["fiber", "orbit"]), required=True)
@click.option("--n", "n", type=int, default=None, help="Vector length (fiber basis).")
@click.option("--t", "t", type=int, default=None, help="Entry sum (orbit basis).")
@click.option("--verify", is_flag=True, help="Check the kernel condition and, on small instances, connectivity.")
def basis_cmd(kind: str, n: int | None, t: int | None, verify: bool) -> None:
    """Print the Markov basis moves as integer rows."""
    if kind == "fiber":
        if n is None:
            raise click.UsageError("--kind fiber requires --n")
        basis = fiber_basis(n)
    else:
        if t is None:
            raise click.UsageError("--kind orbit requires --t")
        basis = orbit_basis(t)
    click.echo(f"moves: {len(basis.moves)}  (target {basis.target})")
    for move in basis.moves:
        click.echo(" ".join(f"{d:+d}" for d in move.deltas))
    if verify:
        click.echo(f"kernel condition: {verify_kernel(basis)}")
        if kind == "fiber" and n is not None and n >= 1:
            points = [v.entries for v in enumerate_fiber(n, min(6, 3 * n))]
            click.echo(f"connectivity (t={min(6, 3 * n)}): {verify_connectivity(basis, points)}")
        if kind == "orbit" and t is not None:
            points = [f.freqs for f in enumerate_orbits(max(2, t // 2 + 1), t)]
            click.echo(f"connectivity (N={max(2, t // 2 + 1)}): {verify_connectivity(basis, points)}")


@main.command("orbits")
@click.option("--n", "n", type=int, required=True)
@click.option("--t", "t", type=int, required=True)
@click.option("--family", "family_text", default="poisson", show_default=True)
def orbits_cmd(n: int, t: int, family_text: str) -> None:
    """List every orbit: representative, cardinality, exact probability."""
    family = parse_family(family_text)
    records = orbit_table(n, t, family)
    click.echo("representative\tcardinality\tprobability")
    for rec in records:
        rep = ",".join(map(str, rec.freq.representative()))
        prob = rec.exact_probability
        click.echo(f"({rep})\t{rec.cardinality}\t{prob} = {float(prob):.6f}")


@main.command("exact")
@click.option("--n1", type=int, required=True)
@click.option("--n2", type=int, required=True)
@click.option("--t", "t", type=int, required=True)
@click.option("--family", "family_text", default="poisson", show_default=True)
@click.option("--u-obs", "u_obs", type=int, default=None)
def exact_cmd(n1: int, n2: int, t: int, family_text: str, u_obs: int | None) -> None:
    """Exact conditional cdf row and, given an observed value, p-values."""
    family = parse_family(family_text)
    cdf = exact_mod.exact_conditional_cdf(n1, n2, t, family)
    row = "  ".join(f"{float(v):.3f}" for v in cdf.values)
    click.echo(f"u:    {'  '.join(f'{u:5d}' for u in range(t + 1))}")
    click.echo(f"cdf: {row}")
    if u_obs is not None:
        pv = exact_mod.p_values(cdf, u_obs)
        for name, val in (("left", pv.left), ("right", pv.right), ("two-sided", pv.two_sided)):
            as_fraction = Fraction(val)
            click.echo(f"{name}: {as_fraction} = {float(val):.6f}")


def _sample_vector_from_options(data: str, n1: int, n2: int | None) -> SampleVector:
    entries = _load_data(data)
    if n2 is not None and n1 + n2 != len(entries):
        raise click.BadParameter(
            f"n1+n2={n1 + n2} does not match the {len(entries)} observed counts"
        )
    return SampleVector(tuple(entries), n1)


_common_chain_options = [
    click.option("--data", required=True, help="Counts file or inline list, e.g. '3,0,2,1'."),
    click.option("--n1", type=int, required=True, help="Size of group 1 (first entries)."),
    click.option("--n2", type=int, default=None, help="Size of group 2 (for validation)."),
    click.option("--family", "family_text", default="poisson", show_default=True),
    click.option("--steps", type=int, default=4000, show_default=True),
    click.option("--burnin", type=int, default=None, help="Burn-in steps (method default if omitted)."),
    click.option("--seed", type=int, default=0, show_default=True),
    click.option("--full-cdf", is_flag=True, help="Estimate the whole cdf, not only F(u_obs)."),
    click.option("--trace", "trace_path", default=None, help="Write per-step trace CSV here."),
]


def _apply_options(options):
    def wrap(func):
        for option in reversed(options):
            func = option(func)
        return func

    return wrap


@main.command("mcmc-fiber")
@_apply_options(_common_chain_options)
@click.option("--accelerated/--standard", default=True, show_default=True)
def mcmc_fiber_cmd(data, n1, n2, family_text, steps, burnin, seed, full_cdf, trace_path, accelerated) -> None:
    """Metropolis walk over the data vectors with the fixed entry sum."""
    y_obs = _sample_vector_from_options(data, n1, n2)
    family = parse_family(family_text)
    cfg = ChainConfig(steps=steps, burn_in=burnin, seed=seed, estimate_full_cdf=full_cdf)
    runner = mcmc_fiber_accelerated if accelerated else mcmc_fiber_standard
    estimate, trace = runner(y_obs, family, cfg)
    _print_estimate(estimate, trace)
    if trace_path:
        _write_trace_csv(trace, trace_path)
        click.echo(f"trace written to {trace_path}")


@main.command("mcmc-orbit")
@_apply_options(_common_chain_options)
@click.option("--budget", type=int, default=100_000, show_default=True,
              help="Total Monte Carlo budget steering per-orbit replications.")
@click.option("--replications", type=int, default=None,
              help="Fixed per-orbit replications (overrides the budget rule).")
def mcmc_orbit_cmd(data, n1, n2, family_text, steps, burnin, seed, full_cdf, trace_path, budget, replications) -> None:
    """Two-step chain over permutation orbits with within-orbit sampling."""
    y_obs = _sample_vector_from_options(data, n1, n2)
    family = parse_family(family_text)
    cfg = ChainConfig(
        steps=steps,
        burn_in=burnin,
        seed=seed,
        estimate_full_cdf=full_cdf,
        mc_total_budget=budget,
        replications_override=replications,
    )
    estimate, trace = mcmc_orbit(y_obs, family, cfg)
    _print_estimate(estimate, trace)
    if trace_path:
        _write_trace_csv(trace, trace_path)
        click.echo(f"trace written to {trace_path}")


@main.command("permtest")
@click.option("--data", required=True)
@click.option("--n1", type=int, required=True)
@click.option("--n2", type=int, default=None)
@click.option("--steps", "replications", type=int, default=10_000, show_default=True,
              help="Number of Monte Carlo permutations.")
@click.option("--seed", type=int, default=0, show_default=True)
def permtest_cmd(data, n1, n2, replications, seed) -> None:
    """Monte Carlo permutation test over the observed orbit (no family needed)."""
    y_obs = _sample_vector_from_options(data, n1, n2)
    estimate = permutation_test(y_obs, replications, seed)
    _print_estimate(estimate)


@main.command("simulate")
@click.option("--scenarios", "scenario_set", type=click.Choice(["table3"]), default=None,
              help="Use the built-in nine-scenario study grid.")
@click.option("--n1", type=int, default=None)
@click.option("--n2", type=int, default=None)
@click.option("--mu1", type=float, default=None)
@click.option("--mu2", type=float, default=None)
@click.option("--family", "family_text", default="poisson", show_default=True)
@click.option("--replicates", type=int, default=1000, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--trace-steps", type=int, default=5000, show_default=True)
@click.option("--perm-replications", type=int, default=None,
              help="Permutation draws per replicate (default: the orbit-share rule).")
@click.option("--out", "out_dir", required=True, type=click.Path(file_okay=False))
@click.option("--figures/--no-figures", default=True, show_default=True,
              help="Render PNG figures next to the CSV/JSON output.")
def simulate_cmd(scenario_set, n1, n2, mu1, mu2, family_text, replicates, seed,
                 trace_steps, perm_replications, out_dir, figures) -> None:
    """Run the error study and write bias records, summaries, traces, timings."""
    family = parse_family(family_text)
    if scenario_set == "table3":
        scenarios = table3_scenarios(family)
    else:
        if None in (n1, n2, mu1, mu2):
            raise click.UsageError("provide --scenarios table3 or all of --n1 --n2 --mu1 --mu2")
        scenarios = [Scenario(n1=n1, n2=n2, mu1=mu1, mu2=mu2, family=family)]

    out = Path(out_dir)
    traces_dir = out / "traces"
    traces_dir.mkdir(parents=True, exist_ok=True)

    all_records = []
    for idx, scenario in enumerate(scenarios):
        click.echo(f"scenario {scenario.label}: {replicates} replicates ...")
        records = run_scenario(
            scenario,
            replicates,
            perm_replications=perm_replications,
            master_seed=derive_seed(seed, idx),
        )
        all_records.extend(records)

        data_rng = np.random.Generator(np.random.PCG64(derive_seed(seed, idx, 7)))
        y1 = sample_iid(scenario.family, scenario.mu1, scenario.n1, data_rng)
        y2 = sample_iid(scenario.family, scenario.mu2, scenario.n2, data_rng)
        y_obs = SampleVector(tuple(y1 + y2), scenario.n1)
        trace = convergence_trace(
            y_obs, scenario.family, trace_steps, derive_seed(seed, idx, 8)
        )
        trace_csv = traces_dir / f"{scenario.label}.csv"
        write_trace(trace, trace_csv)
        if figures:
            from .figures import plot_bias_histograms, plot_convergence

            plot_convergence(trace, traces_dir / f"{scenario.label}.png", title=scenario.label)
            plot_bias_histograms(records, out / f"bias_hist_{scenario.label}.png",
                                 title=scenario.label)

    write_bias_records(all_records, out / "bias_records.csv")
    write_summary(summarize(all_records), out / "summary.json")
    report = timing_report(scenarios, master_seed=derive_seed(seed, 99))
    write_timing(report, out / "timing.json")
    click.echo(f"results written to {out}")


if __name__ == "__main__":
    main()
