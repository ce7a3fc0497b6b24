"""Ground-truth intruder activity and the observable attack-intensity field."""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Mapping, Sequence

import numpy as np

from .network import Edge, SensorGraph, edge_key


class ScenarioError(ValueError):
    pass


@dataclass(frozen=True)
class Intruder:
    """An intruder patrolling a planted walk.

    At time ``t`` the intruder sits on ``trajectory[t % len(trajectory)]``.
    ``tendency`` maps nodes to the assignment tendency in [0, 1]; nodes not in
    the map have tendency 0. When omitted it is 1 on every trajectory node.
    """

    id: int
    trajectory: tuple[int, ...]
    base_intensity: float
    threshold: float = 1.0
    tendency: Mapping[int, float] | None = None

    def __post_init__(self):
        object.__setattr__(self, "trajectory", tuple(int(v) for v in self.trajectory))
        if not self.trajectory:
            raise ScenarioError(f"intruder {self.id}: empty trajectory")
        if not self.base_intensity > 0:
            raise ScenarioError(f"intruder {self.id}: base_intensity must be > 0")
        if self.threshold < 0:
            raise ScenarioError(f"intruder {self.id}: threshold must be >= 0")
        if self.tendency is None:
            object.__setattr__(self, "tendency", {v: 1.0 for v in self.trajectory})
        else:
            tend = {int(k): float(v) for k, v in self.tendency.items()}
            bad = {k: v for k, v in tend.items() if not 0.0 <= v <= 1.0}
            if bad:
                raise ScenarioError(f"intruder {self.id}: tendency outside [0, 1]: {bad}")
            object.__setattr__(self, "tendency", tend)

    def position(self, t: int) -> int:
        return self.trajectory[t % len(self.trajectory)]

    def threshold_at(self, t: int) -> float:
        # constant in time
        return self.threshold

    def edges(self) -> set[Edge]:
        return {edge_key(a, b) for a, b in zip(self.trajectory, self.trajectory[1:])}


@dataclass(frozen=True, eq=False)
class AttackScenario:
    graph: SensorGraph
    intruders: tuple[Intruder, ...]
    horizon: int
    noise_level: float = 0.0
    rng_seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "intruders", tuple(self.intruders))
        if self.horizon < 1:
            raise ScenarioError("horizon must be >= 1")
        if self.noise_level < 0:
            raise ScenarioError("noise_level must be >= 0")
        for intr in self.intruders:
            if not self.graph.is_walk(intr.trajectory):
                raise ScenarioError(f"intruder {intr.id}: trajectory is not a walk on the graph")
            stray = [v for v in intr.tendency if not 0 <= v < self.graph.n]
            if stray:
                raise ScenarioError(f"intruder {intr.id}: tendency on unknown nodes {stray}")

    @cached_property
    def field(self) -> np.ndarray:
        """Observed intensity for every (t, node), shape ``(horizon, n)``."""
        n = self.graph.n
        signal = np.zeros((self.horizon, n))
        for intr in self.intruders:
            for t in range(self.horizon):
                s = intr.position(t)
                signal[t, s] += intr.base_intensity * intr.tendency.get(s, 0.0)
        if self.noise_level > 0:
            rng = np.random.default_rng(self.rng_seed)
            signal += rng.normal(0.0, self.noise_level, size=signal.shape)
        np.maximum(signal, 0.0, out=signal)
        signal.flags.writeable = False
        return signal

    def intensity_at(self, s: int, t: int) -> float:
        if not 0 <= t < self.horizon:
            raise ScenarioError(f"time {t} outside horizon [0, {self.horizon})")
        if not 0 <= s < self.graph.n:
            raise ScenarioError(f"invalid node {s}")
        return float(self.field[t, s])

    def trajectory_nodes(self) -> set[int]:
        return {v for intr in self.intruders for v in intr.trajectory}

    def max_base_intensity(self) -> float:
        return max((i.base_intensity for i in self.intruders), default=0.0)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, AttackScenario):
            return NotImplemented
        return (self.graph == other.graph and self.intruders == other.intruders
                and self.horizon == other.horizon and self.noise_level == other.noise_level
                and self.rng_seed == other.rng_seed)

    __hash__ = None


def random_walk(g: SensorGraph, length: int, rng: np.random.Generator) -> list[int]:
    """Seeded random walk of ``length`` nodes that prefers unvisited neighbours."""
    walk = [int(rng.integers(0, g.n))]
    seen = {walk[0]}
    while len(walk) < length:
        nbrs = g.neighbors(walk[-1])
        fresh = [v for v in nbrs if v not in seen]
        pool = fresh or nbrs
        nxt = int(pool[rng.integers(0, len(pool))])
        walk.append(nxt)
        seen.add(nxt)
    return walk


def generate_scenario(g: SensorGraph, k_intruders: int, walk_len: int,
                      base_intensity: float, noise_level: float, seed: int,
                      horizon: int = 100, threshold: float = 1.0) -> AttackScenario:
    if k_intruders < 0:
        raise ScenarioError("k_intruders must be >= 0")
    if walk_len < 1:
        raise ScenarioError("walk_len must be >= 1")
    if not base_intensity > 0:
        raise ScenarioError("base_intensity must be > 0")
    if noise_level < 0:
        raise ScenarioError("noise_level must be >= 0")
    rng = np.random.default_rng(seed)
    intruders = tuple(
        Intruder(id=k, trajectory=tuple(random_walk(g, walk_len, rng)),
                 base_intensity=base_intensity, threshold=threshold)
        for k in range(k_intruders)
    )
    return AttackScenario(g, intruders, horizon, noise_level, seed)


def intensity_at(sc: AttackScenario, s: int, t: int) -> float:
    return sc.intensity_at(s, t)


def ground_truth_paths(sc: AttackScenario) -> list[set[Edge]]:
    return [intr.edges() for intr in sc.intruders]


def ground_truth_edges(sc: AttackScenario) -> set[Edge]:
    out: set[Edge] = set()
    for edges in ground_truth_paths(sc):
        out |= edges
    return out


def planted_scenario(g: SensorGraph, trajectories: Sequence[Sequence[int]], base_intensity: float,
                     noise_level: float, seed: int, horizon: int, threshold: float = 1.0) -> AttackScenario:
    """Scenario with explicit, fixed intruder walks."""
    intruders = tuple(Intruder(id=k, trajectory=tuple(tr), base_intensity=base_intensity,
                               threshold=threshold)
                      for k, tr in enumerate(trajectories))
    return AttackScenario(g, intruders, horizon, noise_level, seed)
