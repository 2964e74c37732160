"""Markov bases for the two conditional sample spaces.

``fiber_basis(N)`` connects the set of length-N non-negative integer vectors
with a fixed entry sum; ``orbit_basis(t)`` connects its quotient by
permutations, written in frequency coordinates of length t+1.  Moves are
stored without a sign; the sign is chosen at proposal time.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Iterable, Sequence


@dataclass(frozen=True)
class Move:
    """One signed-at-use integer move."""

    deltas: tuple[int, ...]

    def __post_init__(self) -> None:
        if not any(self.deltas):
            raise ValueError("a move cannot be the zero vector")


@dataclass(frozen=True)
class MarkovBasis:
    """A set of moves plus the constraint matrix they annihilate.

    ``target`` records, symbolically, which right-hand side the basis
    serves: the bare entry-sum "(t)" for a fiber basis, "(t, N)" for an
    orbit basis.
    """

    moves: tuple[Move, ...]
    constraint_matrix: tuple[tuple[int, ...], ...]
    target: str

    @property
    def dimension(self) -> int:
        return len(self.constraint_matrix[0])


def fiber_basis(N: int) -> MarkovBasis:
    """The N-1 unit exchange moves on length-N vectors.

    Move K has +1 in the first position and -1 in position K+1 (1-based),
    for K = 1..N-1.
    """
    if N < 1:
        raise ValueError("N must be at least 1")
    moves = []
    for k in range(1, N):
        delta = [0] * N
        delta[0] = 1
        delta[k] = -1
        moves.append(Move(tuple(delta)))
    ones = tuple([1] * N)
    return MarkovBasis(moves=tuple(moves), constraint_matrix=(ones,), target="(t)")


def orbit_basis(t: int) -> MarkovBasis:
    """Moves on frequency vectors of length t+1.

    For every 2 <= k <= t and 1 <= i <= floor(k/2) the move takes one unit
    of frequency off slots 0 and k and puts one unit on each of slots i and
    k-i (so slot k/2 receives +2 when i = k-i).  Emission order is (k
    ascending, i ascending).
    """
    if t < 1:
        raise ValueError("t must be at least 1")
    moves = []
    for k in range(2, t + 1):
        for i in range(1, k // 2 + 1):
            delta = [0] * (t + 1)
            delta[0] -= 1
            delta[k] -= 1
            delta[i] += 1
            delta[k - i] += 1
            moves.append(Move(tuple(delta)))
    weights = tuple(range(t + 1))
    ones = tuple([1] * (t + 1))
    return MarkovBasis(
        moves=tuple(moves), constraint_matrix=(weights, ones), target="(t, N)"
    )


def orbit_basis_size(t: int) -> int:
    """Number of moves in ``orbit_basis(t)``: t^2/4 rounded down."""
    if t < 1:
        raise ValueError("t must be at least 1")
    return t * t // 4 if t % 2 == 0 else (t * t - 1) // 4


def verify_kernel(basis: MarkovBasis) -> bool:
    """True iff every move lies in the integer kernel of the constraints."""
    for move in basis.moves:
        for row in basis.constraint_matrix:
            if sum(r * d for r, d in zip(row, move.deltas)) != 0:
                return False
    return True


def admissible_moves(
    point: Sequence[int], basis: MarkovBasis
) -> list[tuple[Move, int]]:
    """All (move, sign) pairs keeping ``point`` componentwise non-negative."""
    if any(x < 0 for x in point):
        raise ValueError("point must be non-negative")
    out: list[tuple[Move, int]] = []
    for move in basis.moves:
        for sign in (1, -1):
            if all(x + sign * d >= 0 for x, d in zip(point, move.deltas)):
                out.append((move, sign))
    return out


def verify_connectivity(
    basis: MarkovBasis, fiber_points: Iterable[Sequence[int]]
) -> bool:
    """True iff signed admissible moves connect all the given points.

    The points must all satisfy the basis constraints with the same
    right-hand side; mixing fibers is an error, not a False.
    """
    points = [tuple(p) for p in fiber_points]
    if not points:
        raise ValueError("fiber_points must be non-empty")
    rhs = _constraint_value(basis, points[0])
    for p in points[1:]:
        if _constraint_value(basis, p) != rhs:
            raise ValueError("fiber_points lie on different fibers")
    index = {p: i for i, p in enumerate(points)}
    seen = {points[0]}
    queue = deque([points[0]])
    while queue:
        current = queue.popleft()
        for move in basis.moves:
            for sign in (1, -1):
                nxt = tuple(x + sign * d for x, d in zip(current, move.deltas))
                if any(v < 0 for v in nxt):
                    continue
                if nxt in index and nxt not in seen:
                    seen.add(nxt)
                    queue.append(nxt)
    return len(seen) == len(points)


def _constraint_value(basis: MarkovBasis, point: Sequence[int]) -> tuple[int, ...]:
    if len(point) != basis.dimension:
        raise ValueError("point dimension does not match the basis")
    return tuple(
        sum(r * x for r, x in zip(row, point)) for row in basis.constraint_matrix
    )
