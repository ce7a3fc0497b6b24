"""Per-edge stigmergic intensity and its local/global update rules."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .network import Edge, GraphError, SensorGraph, edge_key


@dataclass(frozen=True)
class Contribution:
    """A validated solution walk and its quality ``f(s)`` (>= 0)."""

    solution_path: tuple[int, ...]
    quality: float

    def __post_init__(self):
        object.__setattr__(self, "solution_path", tuple(int(v) for v in self.solution_path))
        if not self.quality >= 0:
            raise ValueError(f"contribution quality must be >= 0, got {self.quality!r}")

    def edges(self) -> list[Edge]:
        p = self.solution_path
        return [edge_key(a, b) for a, b in zip(p, p[1:])]


def decay_fixed_point(q0: float, tau0: float) -> float:
    """Limit of repeated local updates: ``(1 - q0) * tau0 / (1 + q0)``."""
    return (1.0 - q0) * tau0 / (1.0 + q0)


class PheromoneField:
    """Symmetric edge trail intensities over a fixed graph.

    Both update rules mix the old value with weight ``q0**2`` and the fresh
    term with weight ``(1 - q0)**2``.
    """

    def __init__(self, g: SensorGraph, tau0: float, q0: float):
        if not tau0 > 0:
            raise ValueError(f"tau0 must be > 0, got {tau0!r}")
        if not 0.0 <= q0 <= 1.0:
            raise ValueError(f"q0 must lie in [0, 1], got {q0!r}")
        self.graph = g
        self.tau0 = float(tau0)
        self.q0 = float(q0)
        self.tau: dict[Edge, float] = {e: self.tau0 for e in g.edges}

    @property
    def keep(self) -> float:
        return self.q0 * self.q0

    @property
    def inject(self) -> float:
        return (1.0 - self.q0) ** 2

    @property
    def fixed_point(self) -> float:
        return decay_fixed_point(self.q0, self.tau0)

    def __getitem__(self, edge: tuple[int, int]) -> float:
        return self.tau[self._key(*edge)]

    def get(self, i: int, j: int) -> float:
        return self.tau[edge_key(i, j)]

    def _key(self, i: int, j: int) -> Edge:
        key = edge_key(i, j)
        if key not in self.tau:
            raise GraphError(f"no edge {key} in pheromone field")
        return key

    def local_update(self, edge: tuple[int, int]) -> "PheromoneField":
        key = self._key(*edge)
        self.tau[key] = self.keep * self.tau[key] + self.inject * self.tau0
        return self

    def global_update(self, contributions: Iterable[Contribution]) -> "PheromoneField":
        deposit: dict[Edge, float] = {}
        for c in contributions:
            if not self.graph.is_walk(c.solution_path):
                raise GraphError(f"contribution path {c.solution_path} leaves the graph")
            for e in set(c.edges()):
                deposit[e] = deposit.get(e, 0.0) + c.quality
        keep, inject = self.keep, self.inject
        # snapshot: every edge reads tau(t) and writes tau(t+1)
        self.tau = {e: keep * v + inject * deposit.get(e, 0.0) for e, v in self.tau.items()}
        return self

    def values(self) -> list[float]:
        return [self.tau[e] for e in self.graph.edges]

    def max(self) -> float:
        return max(self.tau.values())

    def mean(self) -> float:
        return sum(self.tau.values()) / len(self.tau)

    def copy(self) -> "PheromoneField":
        new = PheromoneField.__new__(PheromoneField)
        new.graph, new.tau0, new.q0 = self.graph, self.tau0, self.q0
        new.tau = dict(self.tau)
        return new


def init_field(g: SensorGraph, tau0: float, q0: float) -> PheromoneField:
    return PheromoneField(g, tau0, q0)


def local_update(f: PheromoneField, edge: tuple[int, int]) -> PheromoneField:
    return f.local_update(edge)


def global_update(f: PheromoneField, contributions: Sequence[Contribution]) -> PheromoneField:
    return f.global_update(contributions)
