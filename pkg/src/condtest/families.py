"""Non-negative discrete exponential families, identified by their base measure.

A family enters the conditional machinery only through the weights H(j) on
non-negative integers.  The natural parameter and the normalizer are carried
as documentation strings; they never appear in any conditional computation.

Two representations of H coexist on purpose: ``log_base_measure`` (fast
floats for the samplers, -inf outside the support) and
``exact_base_measure`` (arbitrary-precision rationals for the enumeration
oracles).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional

import numpy as np

NEG_INF = float("-inf")


@dataclass(frozen=True)
class FamilySpec:
    """A discrete exponential family on the non-negative integers.

    ``log_base_measure(j)`` must be finite exactly for ``support_min <= j``
    (and ``j <= support_max`` when that bound is set) and ``-inf`` outside.
    ``exact_base_measure`` is the exact-rational twin used by the oracles;
    families without it cannot be used for exact probabilities.
    ``variate_generator(mu, rng) -> int`` is optional and only needed for
    synthetic data generation in the simulation harness.
    """

    name: str
    log_base_measure: Callable[[int], float]
    support_min: int = 0
    support_max: int | None = None
    exact_base_measure: Optional[Callable[[int], Fraction]] = None
    variate_generator: Optional[Callable[[float, np.random.Generator], int]] = None
    doc_natural_param: str | None = None
    doc_normalizer: str | None = None

    def in_support(self, j: int) -> bool:
        if j < self.support_min:
            return False
        if self.support_max is not None and j > self.support_max:
            return False
        return True

    def exact_weight(self, j: int) -> Fraction:
        """Exact H(j) as a rational; zero outside the support."""
        if self.exact_base_measure is None:
            raise ValueError(
                f"family {self.name!r} has no exact base measure; "
                "exact computations are unavailable"
            )
        if not self.in_support(j):
            return Fraction(0)
        return self.exact_base_measure(j)


@dataclass(frozen=True)
class Scenario:
    """A simulation scenario: two group sizes and two mean parameters."""

    n1: int
    n2: int
    mu1: float
    mu2: float
    family: FamilySpec

    def __post_init__(self) -> None:
        if self.n1 < 1 or self.n2 < 1:
            raise ValueError("group sizes must be at least 1")

    @property
    def label(self) -> str:
        return f"n1={self.n1}_n2={self.n2}_mu1={self.mu1:g}_mu2={self.mu2:g}"


def _poisson_variate(mu: float, rng: np.random.Generator) -> int:
    # Exact cdf inversion from a single uniform: reproducible across
    # platforms, unlike library Poisson samplers with rejection steps.
    u = rng.random()
    k = 0
    p = math.exp(-mu)
    cum = p
    # Tail guard: past mu + 60*sqrt(mu) + 60 the residual mass is below
    # float resolution, so u > cum can only be floating-point drift.
    cap = int(mu + 60.0 * math.sqrt(mu) + 60.0)
    while u > cum and k < cap:
        k += 1
        p *= mu / k
        cum += p
    return k


def builtin_family(name: str, **params) -> FamilySpec:
    """Construct one of the built-in families.

    Supported: ``poisson``, ``geometric``, ``binomial`` (requires ``k``),
    ``log_series``, ``lost_games`` (requires ``j`` and ``a``).
    """
    if name == "poisson":
        _reject_extra(name, params)
        return FamilySpec(
            name="poisson",
            log_base_measure=lambda y: -math.lgamma(y + 1) if y >= 0 else NEG_INF,
            exact_base_measure=lambda y: Fraction(1, math.factorial(y)),
            variate_generator=_poisson_variate,
            doc_natural_param="log(mu)",
            doc_normalizer="exp(-mu)",
        )
    if name == "geometric":
        _reject_extra(name, params)
        return FamilySpec(
            name="geometric",
            log_base_measure=lambda y: 0.0 if y >= 0 else NEG_INF,
            exact_base_measure=lambda y: Fraction(1),
            doc_natural_param="log(1-mu)",
            doc_normalizer="mu",
        )
    if name == "binomial":
        k = params.pop("k", None)
        _reject_extra(name, params)
        if k is None or int(k) != k or k < 1:
            raise ValueError("binomial family requires an integer k >= 1")
        k = int(k)
        return FamilySpec(
            name=f"binomial(k={k})",
            log_base_measure=lambda y, k=k: (
                math.log(math.comb(k, y)) if 0 <= y <= k else NEG_INF
            ),
            support_max=k,
            exact_base_measure=lambda y, k=k: Fraction(math.comb(k, y)),
            doc_natural_param="log(mu/(1-mu))",
            doc_normalizer="k*log(1-mu)",
        )
    if name == "log_series":
        _reject_extra(name, params)
        return FamilySpec(
            name="log_series",
            log_base_measure=lambda y: -math.log(y) if y >= 1 else NEG_INF,
            support_min=1,
            exact_base_measure=lambda y: Fraction(1, y),
            doc_natural_param="log(mu)",
            doc_normalizer="-1/log(1-mu)",
        )
    if name == "lost_games":
        j = params.pop("j", None)
        a = params.pop("a", None)
        _reject_extra(name, params)
        if j is None or a is None or int(j) != j or int(a) != a or a <= 0 or j < 0:
            raise ValueError("lost_games family requires integers j >= 0 and a > 0")
        j, a = int(j), int(a)

        def _lg_log(y: int, j: int = j, a: int = a) -> float:
            if y < j:
                return NEG_INF
            m = 2 * y + a - 2 * j
            return math.log(math.comb(m, y - j)) + math.log(a) - math.log(m)

        def _lg_exact(y: int, j: int = j, a: int = a) -> Fraction:
            m = 2 * y + a - 2 * j
            return Fraction(math.comb(m, y - j) * a, m)

        return FamilySpec(
            name=f"lost_games(j={j},a={a})",
            log_base_measure=_lg_log,
            support_min=j,
            exact_base_measure=_lg_exact,
            doc_natural_param="log(mu*(1-mu))",
            doc_normalizer="mu**(a-j) type factor depending on mu only",
        )
    raise ValueError(f"unknown family {name!r}")


def _reject_extra(name: str, params: dict) -> None:
    if params:
        raise ValueError(f"unexpected parameters for {name!r}: {sorted(params)}")


def parse_family(text: str) -> FamilySpec:
    """Parse a CLI family string such as ``poisson`` or ``binomial:k=5``.

    Parameters follow the family name after a colon, comma-separated, as in
    ``lost_games:j=1,a=3``.
    """
    name, _, tail = text.partition(":")
    name = name.strip()
    params: dict[str, int] = {}
    if tail:
        for item in tail.split(","):
            key, eq, value = item.partition("=")
            if not eq:
                raise ValueError(f"malformed family parameter {item!r}")
            params[key.strip()] = int(value)
    return builtin_family(name, **params)


def sample_iid(
    family: FamilySpec, mu: float, n: int, rng: np.random.Generator
) -> list[int]:
    """Draw ``n`` independent variates from the family at parameter ``mu``."""
    if n < 1:
        raise ValueError("n must be at least 1")
    if mu <= 0:
        raise ValueError("mu must be positive")
    if family.variate_generator is None:
        raise ValueError(f"family {family.name!r} does not support data generation")
    gen = family.variate_generator
    return [gen(mu, rng) for _ in range(n)]
