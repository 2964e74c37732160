"""Partition of the conditional sample space into orbits of permutations.

An orbit (all distinct rearrangements of one vector) is identified with its
frequency vector (f_0, ..., f_t), f_j counting entries equal to j.  Orbits
are as numerous as integer partitions of t into at most N parts, which is
far fewer than the vectors themselves; exact probabilities of orbits are
rationals built from the family weights and a normalizing constant that
never involves the unknown parameter.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterator, Sequence

import numpy as np

from .families import FamilySpec
from .fiber import (
    DEFAULT_ENUMERATION_CAP,
    EnumerationCapError,
    SampleVector,
    fiber_cardinality,
)


@dataclass(frozen=True)
class FrequencyVector:
    """Dense frequency representation (f_0, ..., f_t) of an orbit."""

    freqs: tuple[int, ...]

    def __post_init__(self) -> None:
        if not self.freqs:
            raise ValueError("frequency vector cannot be empty")
        if any(int(f) != f or f < 0 for f in self.freqs):
            raise ValueError("frequencies must be non-negative integers")
        if len(self.freqs) != self.t + 1:
            raise ValueError(
                f"frequency vector of length {len(self.freqs)} does not match "
                f"its weighted sum {self.t}"
            )

    @property
    def N(self) -> int:
        return sum(self.freqs)

    @property
    def t(self) -> int:
        return sum(j * f for j, f in enumerate(self.freqs))

    def representative(self) -> tuple[int, ...]:
        """The descending-order member of the orbit."""
        out: list[int] = []
        for j in range(len(self.freqs) - 1, -1, -1):
            out.extend([j] * self.freqs[j])
        return tuple(out)


@dataclass(frozen=True)
class OrbitRecord:
    """One orbit with its cardinality, log weight and exact probability."""

    freq: FrequencyVector
    cardinality: int
    log_weight: float
    exact_probability: Fraction | None = None


@lru_cache(maxsize=None)
def partition_count(t: int, N: int) -> int:
    """Number of partitions of t into at most N parts.

    Recurrence p(t, N) = p(t, N-1) + p(t-N, N) with p(0, N) = 1 and
    p(t, 0) = 0 for t > 0.
    """
    if t < 0 or N < 0:
        raise ValueError("need t >= 0 and N >= 0")
    if t == 0:
        return 1
    if N == 0:
        return 0
    total = partition_count(t, N - 1)
    if t >= N:
        total += partition_count(t - N, N)
    return total


def to_frequency(y: SampleVector | Sequence[int]) -> FrequencyVector:
    """Frequency vector of a data vector: f_j = #{i : y_i = j}."""
    entries = y.entries if isinstance(y, SampleVector) else tuple(y)
    if any(int(x) != x or x < 0 for x in entries):
        raise ValueError("entries must be non-negative integers")
    t = sum(entries)
    freqs = [0] * (t + 1)
    for x in entries:
        freqs[x] += 1
    return FrequencyVector(tuple(freqs))


def orbit_cardinality(f: FrequencyVector) -> int:
    """Number of distinct rearrangements: N! / prod_j f_j!."""
    out = math.factorial(f.N)
    for count in f.freqs:
        if count > 1:
            out //= math.factorial(count)
    return out


def enumerate_orbits(
    N: int, t: int, *, cap: int = DEFAULT_ENUMERATION_CAP
) -> Iterator[FrequencyVector]:
    """One frequency vector per partition of t into at most N parts."""
    if N < 1 or t < 0:
        raise ValueError("need N >= 1 and t >= 0")
    n_orbits = partition_count(t, N)
    if n_orbits > cap:
        raise EnumerationCapError(f"{n_orbits} orbits exceed cap {cap}")
    for parts in _partitions(t, t, N):
        freqs = [0] * (t + 1)
        freqs[0] = N - len(parts)
        for p in parts:
            freqs[p] += 1
        yield FrequencyVector(tuple(freqs))


def _partitions(total: int, max_part: int, max_parts: int) -> Iterator[tuple[int, ...]]:
    if total == 0:
        yield ()
        return
    if max_parts == 0 or max_part == 0:
        return
    for first in range(min(total, max_part), 0, -1):
        for rest in _partitions(total - first, first, max_parts - 1):
            yield (first,) + rest


def _orbit_weight(f: FrequencyVector, family: FamilySpec) -> Fraction:
    """Exact prod_j H(j)^f_j; zero when any occupied slot is off-support."""
    out = Fraction(1)
    for j, count in enumerate(f.freqs):
        if count:
            w = family.exact_weight(j)
            if w == 0:
                return Fraction(0)
            out *= w**count
    return out


def normalizing_constant(
    N: int, t: int, family: FamilySpec, *, cap: int = DEFAULT_ENUMERATION_CAP
) -> Fraction:
    """The constant C making the orbit probabilities sum to exactly one."""
    total = Fraction(0)
    for f in enumerate_orbits(N, t, cap=cap):
        total += orbit_cardinality(f) * _orbit_weight(f, family)
    if total == 0:
        raise ValueError("no point of the fiber lies in the family support")
    return 1 / total


def orbit_probability(f: FrequencyVector, family: FamilySpec, C: Fraction) -> Fraction:
    """Exact orbit probability: cardinality * C * prod_j H(j)^f_j.

    ``C`` must come from ``normalizing_constant`` with the same (N, t,
    family); probabilities computed with a mismatched constant will not
    sum to one.
    """
    return orbit_cardinality(f) * C * _orbit_weight(f, family)


def orbit_table(
    N: int, t: int, family: FamilySpec, *, cap: int = DEFAULT_ENUMERATION_CAP
) -> list[OrbitRecord]:
    """All orbits with cardinalities and exact probabilities."""
    C = normalizing_constant(N, t, family, cap=cap)
    records = []
    for f in enumerate_orbits(N, t, cap=cap):
        card = orbit_cardinality(f)
        prob = orbit_probability(f, family, C)
        logw = math.log(card) + sum(
            count * family.log_base_measure(j) for j, count in enumerate(f.freqs) if count
        )
        records.append(
            OrbitRecord(freq=f, cardinality=card, log_weight=logw, exact_probability=prob)
        )
    return records


def sample_within_orbit(
    f: FrequencyVector, rng: np.random.Generator, split: tuple[int, int]
) -> SampleVector:
    """A uniformly random member of the orbit.

    Shuffling the multiset representative is uniform over the distinct
    rearrangements because coinciding arrangements of repeated values
    collapse with equal multiplicity.
    """
    n1, n2 = split
    if n1 + n2 != f.N:
        raise ValueError("split does not match the orbit's vector length")
    values = np.repeat(np.arange(len(f.freqs)), f.freqs)
    shuffled = rng.permutation(values)
    return SampleVector(tuple(int(v) for v in shuffled), n1)


def group_sum_counts(f: FrequencyVector, n1: int) -> list[int]:
    """Arrangement counts of the statistic within an orbit.

    Returns ways[u] = number of size-n1 sub-multisets of the orbit's values
    with sum u, weighted by binomial choice counts, so that
    ways[u] / C(N, n1) is the probability that a uniformly random
    arrangement puts statistic u in the first group.  Sums to C(N, n1).
    """
    if not 0 <= n1 <= f.N:
        raise ValueError("n1 must lie between 0 and N")
    t = f.t
    dp = [[0] * (t + 1) for _ in range(n1 + 1)]
    dp[0][0] = 1
    for j, fj in enumerate(f.freqs):
        if fj == 0:
            continue
        new = [[0] * (t + 1) for _ in range(n1 + 1)]
        for c in range(min(fj, n1) + 1):
            w = math.comb(fj, c)
            shift = j * c
            for chosen in range(n1 + 1 - c):
                row = dp[chosen]
                dst = new[chosen + c]
                for s in range(t + 1 - shift):
                    v = row[s]
                    if v:
                        dst[s + shift] += w * v
        dp = new
    ways = dp[n1]
    assert sum(ways) == math.comb(f.N, n1)
    return ways


def weight_fraction(f: FrequencyVector, N: int, t: int) -> Fraction:
    """Orbit share of the whole space: cardinality / C(t+N-1, N-1)."""
    return Fraction(orbit_cardinality(f), fiber_cardinality(N, t))
