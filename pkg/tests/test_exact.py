import itertools
import math
from fractions import Fraction

import pytest

from condtest.exact import (
    CdfEstimate,
    binomial_closed_form_cdf,
    dispersion_report,
    exact_conditional_cdf,
    orbit_cdf_exact,
    p_values,
    umpu_cdf,
    umpu_pmf,
)
from condtest.families import builtin_family
from condtest.orbits import to_frequency

from reference import EXACT_CDF_2_1_6_ROUNDED, ORBIT_CDF_123, ORBIT_CDF_222


def test_exact_cdf_matches_reference_row(poisson):
    cdf = exact_conditional_cdf(2, 1, 6, poisson)
    for value, expected in zip(cdf.values, EXACT_CDF_2_1_6_ROUNDED):
        assert abs(float(value) - expected) < 5e-4
    assert cdf.values[-1] == 1


def test_exact_cdf_degenerate_total(poisson):
    cdf = exact_conditional_cdf(2, 2, 0, poisson)
    assert cdf.values == (Fraction(1),)


def test_exact_cdf_geometric_uniform(geometric):
    cdf = exact_conditional_cdf(2, 1, 6, geometric)
    # uniform weights: F(u) counts vectors with first two entries summing
    # to at most u, i.e. (u+1)(u+2)/2 of the 28
    for u in range(7):
        assert cdf.values[u] == Fraction((u + 1) * (u + 2), 2 * 28)


def test_exact_cdf_log_series_hand_computed():
    fam = builtin_family("log_series")
    cdf = exact_conditional_cdf(1, 1, 4, fam)
    # support starts at 1: only (1,3), (2,2), (3,1) carry weight
    assert cdf.values == (
        Fraction(0),
        Fraction(4, 11),
        Fraction(7, 11),
        Fraction(1),
        Fraction(1),
    )


def test_umpu_pmf_known_value(poisson):
    assert umpu_pmf(3, 2, 1, 6, poisson) == Fraction(160, 729)
    assert umpu_pmf(3, 2, 1, 6, poisson) == (
        math.comb(6, 3) * Fraction(2, 3) ** 3 * Fraction(1, 3) ** 3
    )


def test_umpu_pmf_normalizes(poisson):
    assert sum(umpu_pmf(u, 2, 2, 5, poisson) for u in range(6)) == 1


def test_umpu_route_equals_enumeration_route(poisson, geometric):
    for family in (poisson, geometric):
        for n1, n2, t in [(2, 1, 6), (1, 2, 4), (2, 2, 5), (3, 1, 3)]:
            enum = exact_conditional_cdf(n1, n2, t, family)
            conv = umpu_cdf(n1, n2, t, family)
            assert conv.values == enum.values, (family.name, n1, n2, t)
            acc = Fraction(0)
            for u in range(t + 1):
                acc += umpu_pmf(u, n1, n2, t, family)
                assert acc == enum.values[u]


def test_closed_form_known_values():
    cdf = binomial_closed_form_cdf(6, 2, 1)
    assert cdf.values[4] == Fraction(473, 729)
    assert cdf.values[0] == Fraction(1, 729)
    assert cdf.values[6] == 1
    assert binomial_closed_form_cdf(9, 3, 2).values[9] == 1


def test_closed_form_equals_enumeration_for_poisson(poisson):
    for n1, n2 in [(2, 1), (1, 1), (2, 2)]:
        for t in range(0, 8):
            assert (
                exact_conditional_cdf(n1, n2, t, poisson).values
                == binomial_closed_form_cdf(t, n1, n2).values
            )


def test_orbit_cdf_reference_rows():
    assert orbit_cdf_exact(to_frequency((1, 2, 3)), 2).values == ORBIT_CDF_123
    assert orbit_cdf_exact(to_frequency((2, 2, 2)), 2).values == ORBIT_CDF_222
    single = orbit_cdf_exact(to_frequency((4, 4)), 1)
    # the only distinct arrangement is (4, 4) itself: a step at u = 4
    assert single.values == tuple(
        Fraction(0) if u < 4 else Fraction(1) for u in range(9)
    )


def test_orbit_cdf_against_arrangement_enumeration():
    for base, n1 in [((0, 2, 5), 2), ((1, 1, 3, 3), 2), ((0, 0, 1, 2), 3)]:
        f = to_frequency(base)
        cdf = orbit_cdf_exact(f, n1)
        members = set(itertools.permutations(base))
        for u in range(f.t + 1):
            hits = sum(1 for m in members if sum(m[:n1]) <= u)
            assert cdf.values[u] == Fraction(hits, len(members))


def test_p_values_reference(poisson):
    cdf = exact_conditional_cdf(2, 1, 6, poisson)
    pv = p_values(cdf, 2)
    assert pv.left == Fraction(73, 729)
    assert pv.right == Fraction(716, 729)
    assert pv.two_sided == Fraction(146, 729)
    assert float(pv.left) == pytest.approx(0.100, abs=5e-4)


def test_p_values_edges(poisson):
    cdf = exact_conditional_cdf(2, 1, 6, poisson)
    pv0 = p_values(cdf, 0)
    assert pv0.right == 1  # F(-1) = 0
    pvt = p_values(cdf, 6)
    assert pvt.left == 1
    assert pvt.two_sided <= 1
    with pytest.raises(ValueError):
        p_values(cdf, 7)
    with pytest.raises(ValueError):
        p_values(cdf, -1)


def test_p_values_two_sided_caps_at_one():
    flat = CdfEstimate(
        values=(Fraction(1, 2), Fraction(1)), u_obs=None, method="exact_enum"
    )
    pv = p_values(flat, 0)
    assert pv.two_sided == 1


def test_cdf_estimate_validation():
    with pytest.raises(ValueError):
        CdfEstimate(values=(0.5, 0.4, 1.0), u_obs=None, method="exact_enum")
    with pytest.raises(ValueError):
        CdfEstimate(values=(Fraction(1, 2),), u_obs=None, method="exact_enum")


def test_dispersion_reference_case(poisson):
    rep = dispersion_report(2, 1, 6, poisson, 2)
    assert rep.f_exact == Fraction(73, 729)
    assert rep.var_indicator == Fraction(73, 729) * Fraction(656, 729)
    assert rep.var_indicator >= rep.var_orbit
    assert rep.mad_indicator >= rep.mad_orbit
    # the indicator's absolute deviation doubles its variance numerator
    assert rep.mad_indicator == 2 * rep.f_exact * (1 - rep.f_exact)


def test_dispersion_degenerate_level(poisson):
    rep = dispersion_report(2, 1, 6, poisson, 6)
    assert rep.f_exact == 1
    assert rep.var_indicator == rep.var_orbit == 0
    assert rep.mad_indicator == rep.mad_orbit == 0


def test_dispersion_inequalities_small_grid(poisson, geometric):
    for family in (poisson, geometric):
        for n1, n2 in [(1, 1), (2, 1)]:
            for t in range(0, 6):
                for u in range(t + 1):
                    rep = dispersion_report(n1, n2, t, family, u)
                    assert rep.var_indicator == rep.f_exact * (1 - rep.f_exact)
                    assert rep.var_indicator >= rep.var_orbit
                    assert rep.mad_indicator >= rep.mad_orbit
