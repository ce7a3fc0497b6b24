"""Sensor-network graph: nodes, undirected weighted links and visibility."""

from __future__ import annotations

from collections import deque
from typing import Iterable, Sequence

import numpy as np

Edge = tuple[int, int]


class GraphError(ValueError):
    """Raised when a sensor graph violates a structural invariant."""


def edge_key(i: int, j: int) -> Edge:
    """Canonical (low, high) key for an undirected edge."""
    return (i, j) if i < j else (j, i)


class SensorGraph:
    """Validated, immutable undirected graph of sensor nodes.

    Node ids are dense in ``[0, n)``. ``distance`` and ``visibility`` are keyed
    by canonical edges (see :func:`edge_key`); visibility is ``1 / distance``.
    """

    def __init__(self, n: int, edge_list: Iterable[Sequence[float]]):
        if int(n) != n or n < 2:
            raise GraphError(f"node count must be an integer >= 2, got {n!r}")
        n = int(n)
        distance: dict[Edge, float] = {}
        adjacency: list[set[int]] = [set() for _ in range(n)]
        for entry in edge_list:
            if len(entry) != 3:
                raise GraphError(f"edge entry must be (i, j, distance), got {entry!r}")
            i, j, d = entry
            if int(i) != i or int(j) != j:
                raise GraphError(f"edge endpoints must be integers, got ({i!r}, {j!r})")
            i, j = int(i), int(j)
            for node in (i, j):
                if not 0 <= node < n:
                    raise GraphError(f"edge ({i}, {j}) references node {node} outside [0, {n})")
            if i == j:
                raise GraphError(f"self-loop on node {i}")
            d = float(d)
            if not d > 0 or not np.isfinite(d):
                raise GraphError(f"edge ({i}, {j}) has non-positive distance {d!r}")
            key = edge_key(i, j)
            if key in distance:
                raise GraphError(f"duplicate edge {key}")
            distance[key] = d
            adjacency[i].add(j)
            adjacency[j].add(i)

        self._n = n
        self._edges = tuple(sorted(distance))
        self._edge_index = {e: k for k, e in enumerate(self._edges)}
        self._distance = distance
        self._visibility = {e: 1.0 / d for e, d in distance.items()}
        self._adjacency = tuple(tuple(sorted(a)) for a in adjacency)

        unreachable = self._unreachable_from(0)
        if unreachable:
            raise GraphError(f"graph is disconnected: node {unreachable[0]} unreachable from node 0")

    def _unreachable_from(self, start: int) -> list[int]:
        seen = {start}
        queue = deque([start])
        while queue:
            u = queue.popleft()
            for v in self._adjacency[u]:
                if v not in seen:
                    seen.add(v)
                    queue.append(v)
        return [v for v in range(self._n) if v not in seen]

    @property
    def n(self) -> int:
        return self._n

    @property
    def edges(self) -> tuple[Edge, ...]:
        return self._edges

    def edge_index(self, i: int, j: int) -> int:
        return self._edge_index[edge_key(i, j)]

    def has_edge(self, i: int, j: int) -> bool:
        return edge_key(i, j) in self._distance

    def distance(self, i: int, j: int) -> float:
        return self._distance[self._checked_edge(i, j)]

    def visibility(self, i: int, j: int) -> float:
        return self._visibility[self._checked_edge(i, j)]

    def neighbors(self, i: int) -> tuple[int, ...]:
        """Adjacent nodes in ascending id order."""
        self._check_node(i)
        return self._adjacency[i]

    def degree(self, i: int) -> int:
        return len(self.neighbors(i))

    def is_walk(self, path: Sequence[int]) -> bool:
        """True if every node is valid and consecutive nodes are adjacent."""
        if any(not (isinstance(v, (int, np.integer)) and 0 <= v < self._n) for v in path):
            return False
        return all(self.has_edge(a, b) for a, b in zip(path, path[1:]))

    def edge_list(self) -> list[tuple[int, int, float]]:
        return [(i, j, self._distance[(i, j)]) for i, j in self._edges]

    def _check_node(self, i: int) -> None:
        if not (isinstance(i, (int, np.integer)) and 0 <= i < self._n):
            raise GraphError(f"invalid node id {i!r} for graph with {self._n} nodes")

    def _checked_edge(self, i: int, j: int) -> Edge:
        key = edge_key(i, j)
        if key not in self._distance:
            raise GraphError(f"no edge {key}")
        return key

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SensorGraph):
            return NotImplemented
        return self._n == other._n and self._distance == other._distance

    def __hash__(self) -> int:
        return hash((self._n, self._edges))

    def __repr__(self) -> str:
        return f"SensorGraph(n={self._n}, edges={len(self._edges)})"


def build_graph(n: int, edge_list: Iterable[Sequence[float]]) -> SensorGraph:
    return SensorGraph(n, edge_list)


def neighbors(g: SensorGraph, i: int) -> list[int]:
    return list(g.neighbors(i))


def grid_graph(rows: int, cols: int, distance: float = 1.0) -> SensorGraph:
    """4-connected ``rows x cols`` lattice; node id is ``r * cols + c``."""
    edges = []
    for r in range(rows):
        for c in range(cols):
            u = r * cols + c
            if c + 1 < cols:
                edges.append((u, u + 1, distance))
            if r + 1 < rows:
                edges.append((u, u + cols, distance))
    return SensorGraph(rows * cols, edges)


def complete_graph(n: int, distance: float = 1.0) -> SensorGraph:
    return SensorGraph(n, [(i, j, distance) for i in range(n) for j in range(i + 1, n)])


def random_graph(n: int, density: float, seed: int, max_distance: float = 1.0) -> SensorGraph:
    """Random connected graph: a random spanning tree plus extra edges.

    Each remaining pair is added with probability ``density``; distances are
    uniform on ``(0, max_distance]``.
    """
    if not 0.0 <= density <= 1.0:
        raise GraphError(f"density must lie in [0, 1], got {density!r}")
    rng = np.random.default_rng(seed)
    order = rng.permutation(n)
    chosen: set[Edge] = set()
    for k in range(1, n):
        parent = order[rng.integers(0, k)]
        chosen.add(edge_key(int(order[k]), int(parent)))
    for i in range(n):
        for j in range(i + 1, n):
            if (i, j) not in chosen and rng.random() < density:
                chosen.add((i, j))
    edges = [(i, j, float(max_distance * (1.0 - rng.random()))) for i, j in sorted(chosen)]
    return SensorGraph(n, edges)
