"""Sensitive robots: sensitivity split, tour stepping, tabu lists, notifications."""

from __future__ import annotations

import enum
from bisect import bisect_right
from dataclasses import dataclass, field
from itertools import accumulate

import numpy as np

from .network import SensorGraph
from .stigmergy import PheromoneField


class DeadEnd(Exception):
    """Every neighbour of the robot's current node is already tabu."""


class ContractError(RuntimeError):
    pass


class RobotClass(str, enum.Enum):
    EXPLORER = "sSSL"
    EXPLOITER = "hSSL"


def classify(ssl: float, q0: float) -> RobotClass:
    return RobotClass.EXPLORER if ssl > q0 else RobotClass.EXPLOITER


@dataclass
class Robot:
    id: int
    ssl: float
    klass: RobotClass
    path: list[int] = field(default_factory=list)
    tabu: set[int] = field(default_factory=set)

    @property
    def current(self) -> int:
        return self.path[-1]

    def place(self, node: int) -> None:
        self.path = [node]
        self.tabu = {node}

    def move(self, node: int) -> None:
        self.path.append(node)
        self.tabu.add(node)

    def tour_edges(self) -> set[tuple[int, int]]:
        return {(a, b) if a < b else (b, a) for a, b in zip(self.path, self.path[1:])}


@dataclass
class Colony:
    robots: list[Robot]
    beta: float = 2.0
    suspicion_queue: list[tuple[int, int]] = field(default_factory=list)

    def __post_init__(self):
        if not self.robots:
            raise ValueError("colony needs at least one robot")
        if not self.beta > 0:
            raise ValueError(f"beta must be > 0, got {self.beta!r}")

    @property
    def m(self) -> int:
        return len(self.robots)

    def explorers(self) -> list[Robot]:
        return [r for r in self.robots if r.klass is RobotClass.EXPLORER]

    def exploiters(self) -> list[Robot]:
        return [r for r in self.robots if r.klass is RobotClass.EXPLOITER]

    def notify(self, reporter: Robot, node: int) -> "Colony":
        if reporter.klass is not RobotClass.EXPLORER:
            raise ContractError(f"robot {reporter.id} is {reporter.klass.value}; only sSSL robots notify")
        self.suspicion_queue = [(v, r) for v, r in self.suspicion_queue if v != node]
        self.suspicion_queue.append((node, reporter.id))
        return self

    def drain_queue(self) -> list[int]:
        nodes = [v for v, _ in self.suspicion_queue]
        self.suspicion_queue = []
        return nodes


def split_colony(m: int, q0: float, seed, beta: float = 2.0) -> Colony:
    """Draw each robot's sensitivity ``q ~ U[0, 1]``; ``q > q0`` makes it an explorer."""
    if m < 1:
        raise ValueError(f"m must be >= 1, got {m!r}")
    if not 0.0 <= q0 <= 1.0:
        raise ValueError(f"q0 must lie in [0, 1], got {q0!r}")
    draws = np.random.default_rng(seed).random(m)
    robots = [Robot(id=k, ssl=float(q), klass=classify(float(q), q0)) for k, q in enumerate(draws)]
    return Colony(robots, beta=beta)


def candidates(g: SensorGraph, r: Robot) -> list[int]:
    return [u for u in g.neighbors(r.current) if u not in r.tabu]


def _scores(g: SensorGraph, f: PheromoneField, i: int, cands: list[int], beta: float) -> list[float]:
    return [f.get(i, u) * g.visibility(i, u) ** beta for u in cands]


def transition_probabilities(g: SensorGraph, f: PheromoneField, r: Robot, beta: float) -> dict[int, float]:
    """Random-proportional choice over non-tabu neighbours (ascending id order)."""
    cands = candidates(g, r)
    if not cands:
        raise DeadEnd(r.current)
    scores = _scores(g, f, r.current, cands, beta)
    total = sum(scores)
    if total <= 0:
        # every trail evaporated to zero; fall back to uniform
        return {u: 1.0 / len(cands) for u in cands}
    return {u: s / total for u, s in zip(cands, scores)}


def sample_inverse_cdf(probs: dict[int, float], rng: np.random.Generator) -> int:
    nodes = sorted(probs)
    cum = list(accumulate(probs[u] for u in nodes))
    k = bisect_right(cum, rng.random() * cum[-1])
    return nodes[min(k, len(nodes) - 1)]


def step_sssl(r: Robot, probs: dict[int, float], rng: np.random.Generator) -> int:
    nxt = sample_inverse_cdf(probs, rng)
    r.move(nxt)
    return nxt


def greedy_choice(g: SensorGraph, f: PheromoneField, r: Robot, beta: float) -> int:
    cands = candidates(g, r)
    if not cands:
        raise DeadEnd(r.current)
    scores = _scores(g, f, r.current, cands, beta)
    best = max(scores)
    # cands ascend, so the first maximiser has the lowest id
    return cands[scores.index(best)]


def step_hssl(g: SensorGraph, f: PheromoneField, r: Robot, beta: float) -> int:
    nxt = greedy_choice(g, f, r, beta)
    r.move(nxt)
    return nxt


def adapt_ssl(r: Robot, success: bool, delta: float, q0: float) -> Robot:
    if delta < 0:
        raise ValueError(f"delta must be >= 0, got {delta!r}")
    step = delta if success else -delta
    r.ssl = min(1.0, max(0.0, r.ssl + step))
    r.klass = classify(r.ssl, q0)
    return r


def notify(c: Colony, reporter: Robot, node: int) -> Colony:
    return c.notify(reporter, node)
