import math
from fractions import Fraction

import numpy as np
import pytest
from scipy import stats

from condtest.exact import exact_conditional_cdf, orbit_cdf_exact
from condtest.families import builtin_family
from condtest.fiber import SampleVector
from condtest.orbits import (
    enumerate_orbits,
    group_sum_counts,
    normalizing_constant,
    orbit_cardinality,
    orbit_probability,
    to_frequency,
)
from condtest.samplers import (
    ChainConfig,
    _directional_draw,
    _group_sum_pmf,
    _orbit_log_ratio,
    mc_replications_rule,
    mcmc_fiber_accelerated,
    mcmc_fiber_standard,
    mcmc_orbit,
    permutation_test,
)


def test_chain_config_validation():
    with pytest.raises(ValueError):
        ChainConfig(steps=0)
    with pytest.raises(ValueError):
        ChainConfig(steps=10, burn_in=-1)
    with pytest.raises(ValueError):
        ChainConfig(steps=10, replications_override=0)
    assert ChainConfig(steps=10).resolved_burn_in(77) == 77
    assert ChainConfig(steps=10, burn_in=3).resolved_burn_in(77) == 3


@pytest.mark.parametrize("runner", [mcmc_fiber_standard, mcmc_fiber_accelerated])
def test_fiber_chain_determinism(poisson, runner):
    y = SampleVector((3, 2, 1), 2)
    cfg = ChainConfig(steps=1500, burn_in=200, seed=11, estimate_full_cdf=True,
                      record_states=True)
    est_a, tr_a = runner(y, poisson, cfg)
    est_b, tr_b = runner(y, poisson, cfg)
    assert est_a.values == est_b.values
    assert tr_a.estimates == tr_b.estimates
    assert tr_a.states == tr_b.states
    assert tr_a.accepted == tr_b.accepted


def test_orbit_chain_determinism(poisson):
    y = SampleVector((3, 2, 1), 2)
    cfg = ChainConfig(steps=600, burn_in=50, seed=13, estimate_full_cdf=True,
                      record_states=True)
    est_a, tr_a = mcmc_orbit(y, poisson, cfg)
    est_b, tr_b = mcmc_orbit(y, poisson, cfg)
    assert est_a.values == est_b.values
    assert tr_a.estimates == tr_b.estimates
    assert tr_a.states == tr_b.states


def test_fiber_chain_single_step_reachability(poisson):
    # one step away from (6,0,0) only two states are reachable
    y = SampleVector((6, 0, 0), 2)
    seen = set()
    for seed in range(60):
        cfg = ChainConfig(steps=1, burn_in=0, seed=seed, record_states=True)
        _, trace = mcmc_fiber_standard(y, poisson, cfg)
        seen.add(trace.states[0])
    assert seen <= {(6, 0, 0), (5, 1, 0), (5, 0, 1)}
    assert {(5, 1, 0), (5, 0, 1)} <= seen


def test_geometric_never_rejects(geometric):
    # constant base measure: every admissible proposal is accepted
    y = SampleVector((2, 3, 1, 0), 2)
    cfg = ChainConfig(steps=4000, burn_in=0, seed=3)
    _, trace = mcmc_fiber_standard(y, geometric, cfg)
    assert trace.rejected == 0
    assert trace.accepted + trace.inadmissible == 4000


def test_out_of_support_start_rejected():
    fam = builtin_family("binomial", k=2)
    y = SampleVector((3, 1, 0), 2)  # 3 exceeds the binomial support
    with pytest.raises(ValueError):
        mcmc_fiber_standard(y, fam, ChainConfig(steps=10))
    with pytest.raises(ValueError):
        mcmc_orbit(y, fam, ChainConfig(steps=10))


def test_directional_draw_binomial_law(poisson):
    # moving mass between a pair summing to 6 under Poisson weights puts
    # the new first entry at Binomial(6, 1/2)
    log_h = [poisson.log_base_measure(j) for j in range(7)]
    rng = np.random.Generator(np.random.PCG64(21))
    draws = [_directional_draw(6, 0, log_h, rng.random()) for _ in range(40_000)]
    counts = np.bincount(draws, minlength=7)
    expected = np.array([math.comb(6, i) for i in range(7)]) / 64 * 40_000
    assert stats.chisquare(counts, expected).pvalue > 1e-3


def test_directional_draw_forced_stay(poisson):
    log_h = [poisson.log_base_measure(j) for j in range(5)]
    for u in (0.0, 0.3, 0.999):
        assert _directional_draw(0, 0, log_h, u) == 0


def test_directional_draw_respects_support():
    fam = builtin_family("log_series")
    log_h = [fam.log_base_measure(j) for j in range(7)]
    rng = np.random.Generator(np.random.PCG64(4))
    # entries 0 carry no weight: a (2, 4) pair can never place 0 anywhere
    draws = {_directional_draw(2, 4, log_h, rng.random()) for _ in range(500)}
    assert draws <= {1, 2, 3, 4, 5}


def test_fiber_chains_conserve_total(poisson):
    y = SampleVector((1, 0, 4, 2), 2)
    for runner in (mcmc_fiber_standard, mcmc_fiber_accelerated):
        cfg = ChainConfig(steps=800, burn_in=100, seed=5, record_states=True)
        _, trace = runner(y, poisson, cfg)
        assert all(sum(s) == 7 for s in trace.states)
        assert [sum(s[:2]) for s in trace.states] == trace.state_ids


def test_orbit_chain_state_constraints(poisson):
    y = SampleVector((1, 0, 4, 2), 2)
    cfg = ChainConfig(steps=600, burn_in=50, seed=5, record_states=True,
                      replications_override=2)
    _, trace = mcmc_orbit(y, poisson, cfg)
    for freqs in trace.states:
        assert sum(freqs) == 4
        assert sum(j * c for j, c in enumerate(freqs)) == 7


def test_orbit_log_ratio_matches_probability_ratio(poisson):
    # transition between two specific orbits equals their probability ratio
    C = normalizing_constant(3, 6, poisson)
    orbits = {f.representative(): f for f in enumerate_orbits(3, 6)}
    src = orbits[(3, 2, 1)]
    dst = orbits[(4, 2, 0)]  # contains (0, 2, 4)
    log_h = [poisson.log_base_measure(j) for j in range(7)]
    log_fact = [math.lgamma(i + 1) for i in range(4)]
    deltas = tuple(b - a for a, b in zip(src.freqs, dst.freqs))
    nz = tuple((i, -d) for i, d in enumerate(deltas) if d)  # sign -1 below
    ratio = math.exp(_orbit_log_ratio(list(src.freqs), nz, -1, log_h, log_fact))
    expected = orbit_probability(dst, poisson, C) / orbit_probability(src, poisson, C)
    assert expected == Fraction(1, 4)
    assert ratio == pytest.approx(float(expected), rel=1e-12)


def test_orbit_log_ratio_geometric_is_cardinality_ratio(geometric):
    # constant base measure: the acceptance ratio collapses to the ratio
    # of orbit cardinalities
    orbits = {f.representative(): f for f in enumerate_orbits(3, 6)}
    src = orbits[(3, 2, 1)]
    dst = orbits[(4, 2, 0)]
    log_h = [geometric.log_base_measure(j) for j in range(7)]
    log_fact = [math.lgamma(i + 1) for i in range(4)]
    deltas = tuple(b - a for a, b in zip(src.freqs, dst.freqs))
    nz = tuple((i, -d) for i, d in enumerate(deltas) if d)
    ratio = math.exp(_orbit_log_ratio(list(src.freqs), nz, -1, log_h, log_fact))
    expected = orbit_cardinality(dst) / orbit_cardinality(src)
    assert ratio == pytest.approx(expected, rel=1e-12)


def test_mc_replications_rule():
    assert mc_replications_rule(to_frequency((3, 2, 1)), 100_000) == 21429
    assert mc_replications_rule(to_frequency((2, 2, 2)), 28) == 1
    assert mc_replications_rule(to_frequency((1, 2, 3)), 2) == 1  # floor guard
    with pytest.raises(ValueError):
        mc_replications_rule(to_frequency((1, 2)), 0)


def test_group_sum_pmf_matches_exact_counts():
    for base, n1 in [((3, 2, 1), 2), ((0, 0, 1, 2), 3), ((2, 2, 5, 5, 0), 2)]:
        f = to_frequency(base)
        pmf = _group_sum_pmf(f.freqs, n1)
        ways = group_sum_counts(f, n1)
        total = sum(ways)
        for u in range(f.t + 1):
            assert pmf[u] == pytest.approx(ways[u] / total, abs=1e-15)
        assert pmf.sum() == pytest.approx(1.0)


def test_orbit_estimates_unbiased_for_fixed_orbit(poisson):
    # replications at the orbit cardinality: the per-step Monte Carlo
    # estimate averages to the exact within-orbit cdf value
    y = SampleVector((1, 2, 3), 2)
    f = to_frequency(y)
    exact_value = float(orbit_cdf_exact(f, 2).values[y.u])
    cfg = ChainConfig(steps=4000, burn_in=0, seed=17,
                      replications_override=orbit_cardinality(f))
    est, trace = mcmc_orbit(y, poisson, cfg)
    # consistency of the running average with its parts
    assert trace.estimates[-1] == pytest.approx(est.point)
    assert len(trace.estimates) == 4000


def test_permutation_test_exact_on_singleton():
    estimate = permutation_test(SampleVector((2, 2, 2), 2), 5000, seed=0)
    assert estimate.values == (0.0, 0.0, 0.0, 0.0, 1.0, 1.0, 1.0)


def test_permutation_test_one_third(poisson):
    estimate = permutation_test(SampleVector((1, 2, 3), 2), 100_000, seed=1)
    assert abs(estimate.values[3] - 1 / 3) < 0.01


def test_permutation_test_orbit_invariant():
    # the estimate depends on the observed vector only through its orbit
    a = permutation_test(SampleVector((1, 2, 3), 2), 2000, seed=9)
    b = permutation_test(SampleVector((3, 1, 2), 2), 2000, seed=9)
    assert a.values == b.values


def test_full_cdf_estimates_are_valid_cdfs(poisson):
    y = SampleVector((3, 2, 1), 2)
    cfg = ChainConfig(steps=500, burn_in=50, seed=2, estimate_full_cdf=True)
    for runner in (mcmc_fiber_standard, mcmc_fiber_accelerated):
        est, _ = runner(y, poisson, cfg)
        assert est.values[-1] == pytest.approx(1.0)
        assert all(b >= a for a, b in zip(est.values, est.values[1:]))
    est, _ = mcmc_orbit(y, poisson, cfg)
    assert est.values[-1] == pytest.approx(1.0)
    assert all(b >= a for a, b in zip(est.values, est.values[1:]))
    assert est.values[est.u_obs] == pytest.approx(est.point)


def test_trace_lengths_and_rows(poisson):
    y = SampleVector((3, 2, 1), 2)
    cfg = ChainConfig(steps=120, burn_in=30, seed=1)
    _, trace = mcmc_fiber_standard(y, poisson, cfg)
    rows = list(trace.rows())
    assert len(rows) == 120
    assert rows[0][0] == 1 and rows[-1][0] == 120
    _, otrace = mcmc_orbit(y, poisson, ChainConfig(steps=80, burn_in=10, seed=1,
                                                   replications_override=1))
    assert len(otrace.estimates) == 80
    assert otrace.initial_orbit_estimate is not None


def test_single_entry_vector_degenerates(poisson):
    y = SampleVector((4,), 1)
    with pytest.warns(UserWarning):
        est, trace = mcmc_fiber_standard(y, poisson, ChainConfig(steps=25, seed=0))
    assert est.degenerate
    assert est.point == 1.0
    assert len(trace.estimates) == 25


def test_zero_total_is_degenerate_for_orbit_chain(poisson):
    est, _ = mcmc_orbit(SampleVector((0, 0), 1), poisson, ChainConfig(steps=5, seed=0))
    assert est.degenerate
    assert est.point == 1.0


def test_single_orbit_space_runs(poisson):
    # total of one: a single orbit, empty move set; estimates stay exact
    y = SampleVector((0, 1, 0), 2)
    est, trace = mcmc_orbit(y, poisson, ChainConfig(steps=300, burn_in=20, seed=0))
    expected = float(exact_conditional_cdf(2, 1, 1, poisson).values[y.u])
    assert est.point == pytest.approx(expected, abs=0.1)
    assert trace.accepted == 0
