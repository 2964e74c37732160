"""The three stochastic routes to the conditional cdf.

Two Metropolis walks on the space of data vectors (single-move proposals,
and an accelerated variant that resamples the full conditional along the
chosen direction), a two-step chain that walks the much smaller space of
permutation orbits and runs a plain Monte Carlo inside each visited orbit,
and the standard Monte Carlo permutation test, which is the one-orbit
limit of the latter.

Determinism contract: a run is a pure function of (inputs, config).  The
orbit chain derives one counter-based stream per step from its master
seed, so the per-step Monte Carlo draws are reproducible independently of
how the steps might be scheduled.
"""

from __future__ import annotations

import math
import time
import warnings
from dataclasses import dataclass, field
from typing import Iterator

import numpy as np

from .basis import orbit_basis
from .exact import CdfEstimate
from .families import FamilySpec
from .fiber import SampleVector, fiber_cardinality
from .orbits import FrequencyVector, group_sum_counts, to_frequency

DEFAULT_FIBER_BURN_IN = 1000
DEFAULT_ORBIT_BURN_IN = 250

# Below this work estimate the per-step Monte Carlo draws arrangements
# directly; above it, the draw count at each statistic level is sampled
# from its exact distribution instead (same law, far fewer random numbers).
_DP_WORK_FACTOR = 512


@dataclass(frozen=True)
class ChainConfig:
    """Run-length, seeding and estimation options for one chain."""

    steps: int
    burn_in: int | None = None
    seed: int = 0
    estimate_full_cdf: bool = False
    mc_total_budget: int = 100_000
    replications_override: int | None = None
    record_states: bool = False

    def __post_init__(self) -> None:
        if self.steps < 1:
            raise ValueError("steps must be at least 1")
        if self.burn_in is not None and self.burn_in < 0:
            raise ValueError("burn_in must be non-negative")
        if self.seed < 0:
            raise ValueError("seed must be non-negative")
        if self.replications_override is not None and self.replications_override < 1:
            raise ValueError("replications_override must be at least 1")

    def resolved_burn_in(self, default: int) -> int:
        return default if self.burn_in is None else self.burn_in


@dataclass
class ChainTrace:
    """Per-step record of one chain run (post-burn-in steps only).

    ``state_ids`` holds the statistic value per step for the vector
    chains, and a first-visit orbit index for the orbit chain;
    ``estimates`` is the running estimate of F(u_obs) after each step.
    """

    kind: str
    state_ids: list[int] = field(default_factory=list)
    estimates: list[float] = field(default_factory=list)
    accepted: int = 0
    rejected: int = 0
    inadmissible: int = 0
    states: list[tuple[int, ...]] | None = None
    initial_orbit_estimate: float | None = None
    elapsed_seconds: float | None = None

    def rows(self) -> Iterator[tuple[int, int, float]]:
        """(step, state id, estimate so far) rows for CSV emission."""
        for i, (sid, est) in enumerate(zip(self.state_ids, self.estimates), start=1):
            yield i, sid, est


def _validate_observed(y_obs: SampleVector, family: FamilySpec) -> None:
    for x in y_obs.entries:
        if family.log_base_measure(x) == float("-inf"):
            raise ValueError(
                f"observed entry {x} lies outside the support of {family.name}"
            )


def mcmc_fiber_standard(
    y_obs: SampleVector, family: FamilySpec, cfg: ChainConfig
) -> tuple[CdfEstimate, ChainTrace]:
    """Metropolis walk with unit exchange moves on the data vectors.

    Each step draws a move index and a sign uniformly; proposals leaving
    the non-negative orthant, or rejected by the base-measure ratio, spend
    the step on the current state.
    """
    return _run_fiber_chain(y_obs, family, cfg, accelerated=False)


def mcmc_fiber_accelerated(
    y_obs: SampleVector, family: FamilySpec, cfg: ChainConfig
) -> tuple[CdfEstimate, ChainTrace]:
    """Directional Gibbs variant of the fiber walk.

    Each step draws a move index, then resamples the step multiplier from
    its full conditional over every multiplier keeping the state
    non-negative, weighted by the base measure.
    """
    return _run_fiber_chain(y_obs, family, cfg, accelerated=True)


def _run_fiber_chain(y_obs, family, cfg, accelerated):
    started = time.perf_counter()
    entries = list(y_obs.entries)
    N = len(entries)
    t = sum(entries)
    n1 = y_obs.n1
    u_obs = y_obs.u
    _validate_observed(y_obs, family)
    burn = cfg.resolved_burn_in(DEFAULT_FIBER_BURN_IN)
    trace = ChainTrace(kind="fiber", states=[] if cfg.record_states else None)

    if N == 1:
        warnings.warn("single-entry vector: the fiber chain cannot move")
        return _degenerate_fiber_result(y_obs, cfg, trace, started)

    log_h = [family.log_base_measure(j) for j in range(t + 1)]
    rng = np.random.Generator(np.random.PCG64(cfg.seed))
    total_steps = burn + cfg.steps
    move_at = rng.integers(1, N, size=total_steps)
    unif = rng.random(total_steps)
    signs = None
    if not accelerated:
        signs = rng.integers(0, 2, size=total_steps) * 2 - 1

    u_stat = u_obs
    count_leq = 0
    hist = [0] * (t + 1) if cfg.estimate_full_cdf else None

    for step in range(total_steps):
        k = int(move_at[step])
        y0 = entries[0]
        yk = entries[k]
        if accelerated:
            idx = _directional_draw(y0, yk, log_h, unif[step])
            lam = idx - y0
            if lam != 0:
                entries[0] = idx
                entries[k] = y0 + yk - idx
                if k >= n1:
                    u_stat += lam
                trace.accepted += 1
        else:
            eps = int(signs[step])
            new0 = y0 + eps
            newk = yk - eps
            if new0 < 0 or newk < 0:
                trace.inadmissible += 1
            else:
                log_ratio = log_h[new0] + log_h[newk] - log_h[y0] - log_h[yk]
                if log_ratio >= 0 or unif[step] < math.exp(log_ratio):
                    entries[0] = new0
                    entries[k] = newk
                    if k >= n1:
                        u_stat += eps
                    trace.accepted += 1
                else:
                    trace.rejected += 1
        assert sum(entries) == t, "chain left the fiber"
        if step >= burn:
            done = step - burn + 1
            if u_stat <= u_obs:
                count_leq += 1
            trace.state_ids.append(u_stat)
            trace.estimates.append(count_leq / done)
            if hist is not None:
                hist[u_stat] += 1
            if trace.states is not None:
                trace.states.append(tuple(entries))

    values = None
    if hist is not None:
        acc = 0
        cum = []
        for h in hist:
            acc += h
            cum.append(acc / cfg.steps)
        values = tuple(cum)
    trace.elapsed_seconds = time.perf_counter() - started
    estimate = CdfEstimate(
        values=values,
        u_obs=u_obs,
        method="mcmc_fiber",
        steps=cfg.steps,
        seed=cfg.seed,
        point=trace.estimates[-1],
    )
    return estimate, trace


def _directional_draw(y0: int, yk: int, log_h, u: float) -> int:
    """New first-entry value from the conditional along one move direction.

    The pair (y0, yk) may become (idx, s - idx) for any idx in 0..s with
    s = y0 + yk; idx is drawn with probability proportional to
    H(idx) * H(s - idx), by inverting the cumulative weights at u.  Log
    weights are max-shifted before exponentiation so long directions
    cannot underflow; ties resolve to the smallest admissible value.
    """
    s = y0 + yk
    log_w = [log_h[i] + log_h[s - i] for i in range(s + 1)]
    shift = max(log_w)  # finite: the current state has positive weight
    weights = [math.exp(lw - shift) for lw in log_w]
    target = u * math.fsum(weights)
    acc = 0.0
    idx = -1
    for i, w in enumerate(weights):
        if w == 0.0:
            continue
        acc += w
        idx = i
        if acc > target:
            break
    return idx


def _degenerate_fiber_result(y_obs, cfg, trace, started):
    t = y_obs.t
    u_obs = y_obs.u
    for step in range(1, cfg.steps + 1):
        trace.state_ids.append(u_obs)
        trace.estimates.append(1.0)
        if trace.states is not None:
            trace.states.append(y_obs.entries)
    values = None
    if cfg.estimate_full_cdf:
        values = tuple(0.0 if u < u_obs else 1.0 for u in range(t + 1))
    trace.elapsed_seconds = time.perf_counter() - started
    estimate = CdfEstimate(
        values=values,
        u_obs=u_obs,
        method="mcmc_fiber",
        steps=cfg.steps,
        seed=cfg.seed,
        point=1.0,
        degenerate=True,
    )
    return estimate, trace


def mc_replications_rule(f: FrequencyVector, budget: int) -> int:
    """Monte Carlo size for one orbit: its share of the space times budget.

    ceil(budget * cardinality / C(t+N-1, N-1)), with a floor of one draw.
    """
    if budget < 1:
        raise ValueError("budget must be at least 1")
    card = _multiset_permutations(f.freqs)
    total = fiber_cardinality(f.N, f.t)
    return max(1, -(-budget * card // total))


def _multiset_permutations(freqs) -> int:
    out = math.factorial(sum(freqs))
    for c in freqs:
        if c > 1:
            out //= math.factorial(c)
    return out


def _orbit_mc_estimate(freqs, n1, u_obs, r, rng, want_full):
    """Monte Carlo cdf over one orbit from r uniform arrangement draws.

    An arrangement determines the statistic through the multiset of values
    landing in group 1, whose law is multivariate hypergeometric in the
    value frequencies; for large r the per-level draw counts are sampled
    from their exact joint law instead of drawing arrangements one by one.
    """
    t = len(freqs) - 1
    occupied = sum(1 for c in freqs if c)
    if r * len(freqs) > _DP_WORK_FACTOR * occupied * max(n1, 1):
        pmf = _group_sum_pmf(freqs, n1)
        if want_full:
            counts = rng.multinomial(r, pmf)
            cdf = np.cumsum(counts) / r
            return float(cdf[u_obs]), cdf
        hit = int(rng.binomial(r, float(min(1.0, pmf[: u_obs + 1].sum()))))
        return hit / r, None
    colors = np.asarray(freqs, dtype=np.int64)
    picks = rng.multivariate_hypergeometric(colors, n1, size=r, method="count")
    u_draws = picks @ np.arange(t + 1, dtype=np.int64)
    if want_full:
        cdf = np.cumsum(np.bincount(u_draws, minlength=t + 1)) / r
        return float(cdf[u_obs]), cdf
    return float(np.count_nonzero(u_draws <= u_obs)) / r, None


def _group_sum_pmf(freqs, n1) -> np.ndarray:
    """Exact pmf of the group-1 sum under uniform arrangements (floats)."""
    N = sum(freqs)
    t = len(freqs) - 1
    if math.comb(N, n1) < 2**53:
        # All intermediate counts are bounded by C(N, n1), so the float64
        # dynamic program is exact.
        dp = np.zeros((n1 + 1, t + 1))
        dp[0, 0] = 1.0
        for j, fj in enumerate(freqs):
            if fj == 0:
                continue
            new = np.zeros_like(dp)
            for c in range(min(fj, n1) + 1):
                w = math.comb(fj, c)
                if c == 0:
                    new += w * dp
                else:
                    new[c:, j * c :] += w * dp[:-c, : t + 1 - j * c]
            dp = new
        ways = dp[n1]
        total = ways.sum()
    else:
        exact = group_sum_counts(FrequencyVector(tuple(freqs)), n1)
        total_i = sum(exact)
        ways = np.array([w / total_i for w in exact], dtype=float)
        total = 1.0
    return ways / total


def _orbit_log_ratio(freqs, nz, sign, log_h, log_fact) -> float:
    """Log acceptance ratio for one signed orbit-space move.

    Only the frequency factorials and the base-measure powers at the
    move's support enter; proposals putting mass on an off-support value
    get ratio zero.
    """
    log_ratio = 0.0
    for i, d in nz:
        change = sign * d
        log_ratio += log_fact[freqs[i]] - log_fact[freqs[i] + change]
        lh = log_h[i]
        if lh == float("-inf"):
            if change > 0:
                return float("-inf")
            # change < 0 would mean mass already sits off-support, which
            # validated starting states never reach.
        else:
            log_ratio += change * lh
    return log_ratio


def mcmc_orbit(
    y_obs: SampleVector, family: FamilySpec, cfg: ChainConfig
) -> tuple[CdfEstimate, ChainTrace]:
    """Two-step chain: walk the orbits, then Monte Carlo inside each one.

    Proposals add or subtract one orbit-space move chosen uniformly; the
    acceptance ratio involves only the frequency factorials and the base
    measure.  Each post-burn-in step contributes a within-orbit Monte
    Carlo estimate (its size set by ``mc_replications_rule`` unless
    overridden); the final estimate is the plain average over the
    post-burn-in steps, burn-in visits excluded.
    """
    started = time.perf_counter()
    _validate_observed(y_obs, family)
    N = y_obs.size
    t = y_obs.t
    n1 = y_obs.n1
    u_obs = y_obs.u
    burn = cfg.resolved_burn_in(DEFAULT_ORBIT_BURN_IN)
    trace = ChainTrace(kind="orbit", states=[] if cfg.record_states else None)

    if t == 0:
        # Single orbit, single vector: the estimate is exact.
        for _ in range(cfg.steps):
            trace.state_ids.append(0)
            trace.estimates.append(1.0)
            if trace.states is not None:
                trace.states.append((N,))
        trace.initial_orbit_estimate = 1.0
        trace.elapsed_seconds = time.perf_counter() - started
        estimate = CdfEstimate(
            values=(1.0,) if cfg.estimate_full_cdf else None,
            u_obs=0,
            method="mcmc_orbit",
            steps=cfg.steps,
            seed=cfg.seed,
            point=1.0,
            degenerate=True,
        )
        return estimate, trace

    basis = orbit_basis(t)
    move_nz = [
        tuple((i, d) for i, d in enumerate(m.deltas) if d) for m in basis.moves
    ]
    log_h = [family.log_base_measure(j) for j in range(t + 1)]
    log_fact = [math.lgamma(i + 1) for i in range(N + 1)]
    fiber_size = fiber_cardinality(N, t)

    # Chain proposals consume a PCG64 stream seeded by the config; the
    # within-orbit Monte Carlo runs use counter-based Philox streams keyed
    # by the same seed and indexed by step, so each step's draws are
    # reproducible regardless of scheduling (index 0 is the observed
    # orbit's own estimate, index k the k-th post-burn-in step).
    chain_rng = np.random.Generator(np.random.PCG64(cfg.seed))
    total_steps = burn + cfg.steps
    # t = 1 has an empty basis (and a single orbit): the chain never moves
    # but the per-step Monte Carlo still estimates correctly.
    n_moves = len(basis.moves)
    move_at = chain_rng.integers(0, max(1, n_moves), size=total_steps)
    signs = chain_rng.integers(0, 2, size=total_steps) * 2 - 1
    unif = chain_rng.random(total_steps)

    def mc_stream(index: int) -> np.random.Generator:
        return np.random.Generator(
            np.random.Philox(key=cfg.seed, counter=[0, 0, 0, index])
        )

    freqs = list(to_frequency(y_obs).freqs)

    def replications(fr) -> int:
        if cfg.replications_override is not None:
            return cfg.replications_override
        card = _multiset_permutations(fr)
        return max(1, -(-cfg.mc_total_budget * card // fiber_size))

    # The observed orbit's own Monte Carlo estimate (stream index 0); it
    # seeds nothing downstream and is excluded from the final average.
    init_est, _ = _orbit_mc_estimate(
        freqs, n1, u_obs, replications(freqs), mc_stream(0), want_full=False
    )
    trace.initial_orbit_estimate = init_est

    orbit_ids: dict[tuple[int, ...], int] = {}
    running_sum = 0.0
    cdf_sum = np.zeros(t + 1) if cfg.estimate_full_cdf else None

    for step in range(total_steps):
        nz = move_nz[int(move_at[step])] if n_moves else ()
        sign = int(signs[step])
        admissible = bool(nz) and all(freqs[i] + sign * d >= 0 for i, d in nz)
        if not admissible:
            trace.inadmissible += 1
        else:
            log_ratio = _orbit_log_ratio(freqs, nz, sign, log_h, log_fact)
            if log_ratio >= 0 or unif[step] < math.exp(log_ratio):
                for i, d in nz:
                    freqs[i] += sign * d
                trace.accepted += 1
            else:
                trace.rejected += 1
        assert sum(freqs) == N, "orbit chain changed the vector length"
        assert sum(j * c for j, c in enumerate(freqs)) == t, "orbit chain left the fiber"

        if step >= burn:
            done = step - burn + 1
            key = tuple(freqs)
            oid = orbit_ids.setdefault(key, len(orbit_ids))
            step_rng = mc_stream(done)
            est, cdf = _orbit_mc_estimate(
                freqs,
                n1,
                u_obs,
                replications(freqs),
                step_rng,
                want_full=cfg.estimate_full_cdf,
            )
            running_sum += est
            trace.state_ids.append(oid)
            trace.estimates.append(running_sum / done)
            if cdf_sum is not None:
                cdf_sum += cdf
            if trace.states is not None:
                trace.states.append(key)

    values = None
    if cdf_sum is not None:
        values = tuple(float(v) for v in cdf_sum / cfg.steps)
    trace.elapsed_seconds = time.perf_counter() - started
    estimate = CdfEstimate(
        values=values,
        u_obs=u_obs,
        method="mcmc_orbit",
        steps=cfg.steps,
        seed=cfg.seed,
        point=trace.estimates[-1],
    )
    return estimate, trace


def permutation_test(
    y_obs: SampleVector, replications: int, seed: int
) -> CdfEstimate:
    """Monte Carlo permutation cdf over the observed vector's own orbit.

    Needs no family at all: arrangements within an orbit are equally
    likely under the null whatever the base measure.
    """
    if replications < 1:
        raise ValueError("replications must be at least 1")
    t = y_obs.t
    u_obs = y_obs.u
    freqs = to_frequency(y_obs).freqs
    rng = np.random.Generator(np.random.PCG64(seed))
    colors = np.asarray(freqs, dtype=np.int64)
    picks = rng.multivariate_hypergeometric(
        colors, y_obs.n1, size=replications, method="count"
    )
    u_draws = picks @ np.arange(t + 1, dtype=np.int64)
    cdf = np.cumsum(np.bincount(u_draws, minlength=t + 1)) / replications
    return CdfEstimate(
        values=tuple(float(v) for v in cdf),
        u_obs=u_obs,
        method="permutation",
        replications=replications,
        seed=seed,
        point=float(cdf[u_obs]),
    )
