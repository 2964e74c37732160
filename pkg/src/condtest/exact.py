"""Exact conditional distributions and dispersion diagnostics.

Everything here runs in arbitrary-precision rationals.  The conditional cdf
of the group-1 sum given the total is computed along two independent routes
(full-space enumeration, and a product of split enumerations) that must
agree exactly; for Poisson weights both collapse to a binomial closed form,
which the simulation harness uses as its reference value.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple, Sequence

from .families import FamilySpec
from .fiber import DEFAULT_ENUMERATION_CAP, enumerate_fiber
from .orbits import (
    FrequencyVector,
    enumerate_orbits,
    group_sum_counts,
    normalizing_constant,
    orbit_probability,
)

_FLOAT_TOP_TOL = 1e-12


@dataclass(frozen=True)
class CdfEstimate:
    """A conditional cdf of the group-1 sum, exact or estimated.

    ``values`` holds F(0..t) (rationals for exact methods, floats for
    Monte Carlo ones); samplers asked only for the observed level leave it
    None and fill ``point`` instead.  ``method`` tags the producing route.
    """

    values: tuple | None
    u_obs: int | None
    method: str
    steps: int | None = None
    replications: int | None = None
    seed: int | None = None
    point: float | Fraction | None = None
    degenerate: bool = False

    def __post_init__(self) -> None:
        if self.values is not None:
            vals = self.values
            if any(b < a for a, b in zip(vals, vals[1:])):
                raise ValueError("cdf values must be non-decreasing")
            top = vals[-1]
            if isinstance(top, Fraction):
                if top != 1:
                    raise ValueError("exact cdf must end at exactly 1")
            elif abs(top - 1.0) > _FLOAT_TOP_TOL:
                raise ValueError("cdf must end at 1 within 1e-12")

    @property
    def t(self) -> int:
        if self.values is None:
            raise ValueError("no full cdf available")
        return len(self.values) - 1

    def at(self, u: int):
        """F(u) with the convention F(-1) = 0."""
        if self.values is None:
            raise ValueError("no full cdf available")
        if u < -1 or u > self.t:
            raise ValueError(f"u={u} outside [-1, {self.t}]")
        zero = Fraction(0) if isinstance(self.values[-1], Fraction) else 0.0
        return zero if u == -1 else self.values[u]

    def as_floats(self) -> tuple[float, ...]:
        if self.values is None:
            raise ValueError("no full cdf available")
        return tuple(float(v) for v in self.values)


class PValues(NamedTuple):
    left: Fraction | float
    right: Fraction | float
    two_sided: Fraction | float


def exact_conditional_cdf(
    n1: int,
    n2: int,
    t: int,
    family: FamilySpec,
    *,
    cap: int = DEFAULT_ENUMERATION_CAP,
) -> CdfEstimate:
    """Exact cdf of the group-1 sum by enumerating the whole space.

    F(u) is the weight of vectors whose first n1 entries sum to at most u,
    normalized by the total weight; weights are products of exact family
    base measures.
    """
    if n1 < 1 or n2 < 1 or t < 0:
        raise ValueError("need n1 >= 1, n2 >= 1, t >= 0")
    N = n1 + n2
    mass = [Fraction(0)] * (t + 1)
    for y in enumerate_fiber(N, t, n1=n1, cap=cap):
        w = _vector_weight(y.entries, family)
        if w:
            mass[y.u] += w
    total = sum(mass)
    if total == 0:
        raise ValueError("no point of the fiber lies in the family support")
    values = _cumulative(mass, total)
    return CdfEstimate(values=tuple(values), u_obs=None, method="exact_enum")


def _vector_weight(entries: Sequence[int], family: FamilySpec) -> Fraction:
    w = Fraction(1)
    for x in entries:
        hx = family.exact_weight(x)
        if hx == 0:
            return Fraction(0)
        w *= hx
    return w


def _cumulative(mass: Sequence[Fraction], total: Fraction) -> list[Fraction]:
    values = []
    acc = Fraction(0)
    for m in mass:
        acc += m
        values.append(acc / total)
    return values


def _split_sum(n: int, x: int, family: FamilySpec, cap: int) -> Fraction:
    """Total exact weight of length-n vectors summing to x."""
    total = Fraction(0)
    for y in enumerate_fiber(n, x, cap=cap):
        total += _vector_weight(y.entries, family)
    return total


def umpu_pmf(
    u: int,
    n1: int,
    n2: int,
    t: int,
    family: FamilySpec,
    *,
    cap: int = DEFAULT_ENUMERATION_CAP,
) -> Fraction:
    """Exact conditional pmf of the group-1 sum via split enumeration.

    The numerator multiplies the total weights of the two groups' own
    spaces at (u, t-u); the denominator sums that product over all u.
    Independent of ``exact_conditional_cdf``'s full-space route.
    """
    if not 0 <= u <= t:
        raise ValueError("u must lie in [0, t]")
    denom = Fraction(0)
    num = Fraction(0)
    for v in range(t + 1):
        term = _split_sum(n1, v, family, cap) * _split_sum(n2, t - v, family, cap)
        denom += term
        if v == u:
            num = term
    if denom == 0:
        raise ValueError("no point of the fiber lies in the family support")
    return num / denom


def umpu_cdf(
    n1: int,
    n2: int,
    t: int,
    family: FamilySpec,
    *,
    cap: int = DEFAULT_ENUMERATION_CAP,
) -> CdfEstimate:
    """Exact cdf assembled by cumulating the split-enumeration pmf."""
    terms = [
        _split_sum(n1, v, family, cap) * _split_sum(n2, t - v, family, cap)
        for v in range(t + 1)
    ]
    total = sum(terms)
    if total == 0:
        raise ValueError("no point of the fiber lies in the family support")
    values = _cumulative(terms, total)
    return CdfEstimate(values=tuple(values), u_obs=None, method="umpu_convolution")


def binomial_closed_form_cdf(t: int, n1: int, n2: int) -> CdfEstimate:
    """Exact Binomial(t, n1/(n1+n2)) cdf, the Poisson-data reference."""
    if t < 0 or n1 < 1 or n2 < 1:
        raise ValueError("need t >= 0, n1 >= 1, n2 >= 1")
    theta = Fraction(n1, n1 + n2)
    mass = [
        math.comb(t, k) * theta**k * (1 - theta) ** (t - k) for k in range(t + 1)
    ]
    values = _cumulative(mass, Fraction(1))
    return CdfEstimate(values=tuple(values), u_obs=None, method="closed_form_binomial")


def orbit_cdf_exact(
    f: FrequencyVector, n1: int, *, cap: int = DEFAULT_ENUMERATION_CAP
) -> CdfEstimate:
    """Exact cdf of the statistic over one orbit's distinct rearrangements.

    Counts arrangements through the group-1 sub-multiset decomposition, so
    it stays polynomial even when the orbit itself is astronomically large
    (the cap therefore never applies here).
    """
    ways = group_sum_counts(f, n1)
    total = math.comb(f.N, n1)
    values = _cumulative([Fraction(w) for w in ways], Fraction(total))
    return CdfEstimate(values=tuple(values), u_obs=None, method="exact_enum")


def p_values(cdf: CdfEstimate, u_obs: int) -> PValues:
    """Left, right and two-sided p-values from a full conditional cdf.

    left = F(u_obs); right = 1 - F(u_obs - 1) with F(-1) = 0;
    two-sided = min(2 * min(left, right), 1).
    """
    if cdf.values is None:
        raise ValueError("p-values require a full cdf")
    if not 0 <= u_obs <= cdf.t:
        raise ValueError(f"u_obs={u_obs} outside [0, {cdf.t}]")
    left = cdf.at(u_obs)
    right = 1 - cdf.at(u_obs - 1)
    two = min(2 * min(left, right), 1)
    if isinstance(left, Fraction):
        two = Fraction(two)
    return PValues(left=left, right=right, two_sided=two)


@dataclass(frozen=True)
class DispersionReport:
    """Exact dispersion comparison of the two unbiased cdf estimators.

    The step indicator of a single vector and the per-orbit cdf both have
    expectation F(u); the report carries their exact variances and mean
    absolute deviations, which are ordered (indicator >= orbit) for every
    family and every level.
    """

    u: int
    f_exact: Fraction
    var_indicator: Fraction
    var_orbit: Fraction
    mad_indicator: Fraction
    mad_orbit: Fraction


def dispersion_report(
    n1: int,
    n2: int,
    t: int,
    family: FamilySpec,
    u: int,
    *,
    cap: int = DEFAULT_ENUMERATION_CAP,
) -> DispersionReport:
    """Exact enumeration of both estimators' dispersion at level u."""
    if not 0 <= u <= t:
        raise ValueError("u must lie in [0, t]")
    N = n1 + n2
    cdf = exact_conditional_cdf(n1, n2, t, family, cap=cap)
    f_exact = cdf.values[u]

    # Indicator route: scan the whole space.
    mean_ind = Fraction(0)
    mad_ind = Fraction(0)
    total = Fraction(0)
    for y in enumerate_fiber(N, t, n1=n1, cap=cap):
        w = _vector_weight(y.entries, family)
        if not w:
            continue
        total += w
        ind = Fraction(1) if y.u <= u else Fraction(0)
        mean_ind += w * ind
        mad_ind += w * abs(ind - f_exact)
    mean_ind /= total
    mad_ind /= total
    var_ind = f_exact * (1 - f_exact)

    # Orbit route: per-orbit cdfs weighted by exact orbit probabilities.
    C = normalizing_constant(N, t, family, cap=cap)
    mean_orb = Fraction(0)
    second_orb = Fraction(0)
    mad_orb = Fraction(0)
    for f in enumerate_orbits(N, t, cap=cap):
        p = orbit_probability(f, family, C)
        if p == 0:
            continue
        f_orb = orbit_cdf_exact(f, n1).values[u]
        mean_orb += p * f_orb
        second_orb += p * f_orb * f_orb
        mad_orb += p * abs(f_orb - f_exact)
    var_orb = second_orb - mean_orb * mean_orb

    if mean_ind != f_exact or mean_orb != f_exact:
        raise ArithmeticError("estimator expectations disagree with the exact cdf")
    return DispersionReport(
        u=u,
        f_exact=f_exact,
        var_indicator=var_ind,
        var_orbit=var_orb,
        mad_indicator=mad_ind,
        mad_orbit=mad_orb,
    )
