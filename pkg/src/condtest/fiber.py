"""The conditional sample space: vectors with a fixed entry sum.

Enumeration is lexicographic and guarded by a configurable cap, since the
space grows as C(t+N-1, N-1).  The move-induced graph over the space is
built explicitly for small instances so its combinatorics (vertex count,
edge count, connectivity, bipartiteness) can be checked exactly.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass
from typing import Iterator

from .basis import MarkovBasis, fiber_basis

DEFAULT_ENUMERATION_CAP = 10**7


class EnumerationCapError(RuntimeError):
    """The requested enumeration exceeds the configured size cap."""


@dataclass(frozen=True)
class SampleVector:
    """A non-negative integer data vector with a two-group split."""

    entries: tuple[int, ...]
    n1: int

    def __post_init__(self) -> None:
        if any(int(x) != x or x < 0 for x in self.entries):
            raise ValueError("entries must be non-negative integers")
        if not 0 <= self.n1 <= len(self.entries):
            raise ValueError("n1 must lie between 0 and the vector length")

    @property
    def size(self) -> int:
        return len(self.entries)

    @property
    def n2(self) -> int:
        return len(self.entries) - self.n1

    @property
    def split(self) -> tuple[int, int]:
        return (self.n1, self.n2)

    @property
    def t(self) -> int:
        return sum(self.entries)

    @property
    def u(self) -> int:
        return sum(self.entries[: self.n1])


@dataclass(frozen=True)
class FiberGraph:
    """Graph whose vertices are the fiber points and whose edges are moves."""

    vertices: tuple[SampleVector, ...]
    edges: tuple[tuple[int, int], ...]
    basis_used: MarkovBasis

    def adjacency(self) -> list[list[int]]:
        adj: list[list[int]] = [[] for _ in self.vertices]
        for a, b in self.edges:
            adj[a].append(b)
            adj[b].append(a)
        return adj


def fiber_cardinality(N: int, t: int) -> int:
    """Number of length-N non-negative integer vectors summing to t."""
    if N < 1 or t < 0:
        raise ValueError("need N >= 1 and t >= 0")
    return math.comb(t + N - 1, N - 1)


def enumerate_fiber(
    N: int,
    t: int,
    *,
    n1: int | None = None,
    cap: int = DEFAULT_ENUMERATION_CAP,
) -> Iterator[SampleVector]:
    """Yield every composition of t into N parts once, lexicographically.

    ``n1`` sets the group split of the yielded vectors (defaults to N,
    making u == t; pass the real split when the statistic matters).
    """
    if fiber_cardinality(N, t) > cap:
        raise EnumerationCapError(
            f"fiber of size {fiber_cardinality(N, t)} exceeds cap {cap}"
        )
    split = N if n1 is None else n1
    for entries in _compositions(N, t):
        yield SampleVector(entries, split)


def _compositions(n: int, total: int) -> Iterator[tuple[int, ...]]:
    if n == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in _compositions(n - 1, total - first):
            yield (first,) + rest


def fiber_edge_count(N: int, t: int) -> int:
    """Closed-form edge count of the move graph on the fiber.

    Counts, for each vertex class (no zero entries; some zeros but a
    positive first entry; zero first entry), how many signed moves stay
    non-negative, and halves the total degree.
    """
    if N < 2 or t < 1:
        raise ValueError("need N >= 2 and t >= 1")
    first = (N - 1) * math.comb(t - 1, N - 1)
    second = 0
    third = 0
    for z in range(1, N):
        second += (2 * N - 2 - z) * math.comb(t - 1, N - 1 - z) * math.comb(N - 1, z)
        third += (N - z) * math.comb(t - 1, N - 1 - z) * math.comb(N - 1, z - 1)
    if (second + third) % 2:
        raise ArithmeticError("degree sum is odd; edge-count formula misapplied")
    return first + (second + third) // 2


def build_fiber_graph(
    N: int, t: int, *, cap: int = DEFAULT_ENUMERATION_CAP
) -> FiberGraph:
    """Materialize the move graph over the fiber.

    Two vertices are adjacent when they differ by exactly one basis move
    with sign +-1; edges found through different moves are deduplicated.
    """
    basis = fiber_basis(N)
    vertices = tuple(enumerate_fiber(N, t, cap=cap))
    index = {v.entries: i for i, v in enumerate(vertices)}
    edges: set[tuple[int, int]] = set()
    for i, v in enumerate(vertices):
        for move in basis.moves:
            neighbor = tuple(x + d for x, d in zip(v.entries, move.deltas))
            if any(x < 0 for x in neighbor):
                continue
            j = index.get(neighbor)
            if j is not None and j != i:
                edges.add((min(i, j), max(i, j)))
    return FiberGraph(vertices=vertices, edges=tuple(sorted(edges)), basis_used=basis)


def is_connected(graph: FiberGraph) -> bool:
    if not graph.vertices:
        raise ValueError("graph has no vertices")
    adj = graph.adjacency()
    seen = {0}
    queue = deque([0])
    while queue:
        node = queue.popleft()
        for other in adj[node]:
            if other not in seen:
                seen.add(other)
                queue.append(other)
    return len(seen) == len(graph.vertices)


def is_bipartite(graph: FiberGraph) -> bool:
    adj = graph.adjacency()
    color: dict[int, int] = {}
    for start in range(len(graph.vertices)):
        if start in color:
            continue
        color[start] = 0
        queue = deque([start])
        while queue:
            node = queue.popleft()
            for other in adj[node]:
                if other not in color:
                    color[other] = 1 - color[node]
                    queue.append(other)
                elif color[other] == color[node]:
                    return False
    return True


def two_coloring(graph: FiberGraph) -> list[int] | None:
    """A valid 2-coloring by breadth-first search, or None if impossible."""
    adj = graph.adjacency()
    color: dict[int, int] = {}
    for start in range(len(graph.vertices)):
        if start in color:
            continue
        color[start] = 0
        queue = deque([start])
        while queue:
            node = queue.popleft()
            for other in adj[node]:
                if other not in color:
                    color[other] = 1 - color[node]
                    queue.append(other)
                elif color[other] == color[node]:
                    return None
    return [color[i] for i in range(len(graph.vertices))]
