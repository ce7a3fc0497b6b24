"""The hybrid sensitive-robot detection loop and its building blocks."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field, replace
from typing import Iterable, Sequence

import numpy as np

from . import colony as col
from .colony import Colony, DeadEnd, Robot, RobotClass
from .network import Edge, SensorGraph, edge_key
from .scenario import AttackScenario
from .stigmergy import Contribution, PheromoneField

MODES = ("hsrm", "plain_acs", "random_patrol")


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class DetectorConfig:
    """Tunables of one detection run.

    ``q0`` splits the colony; ``evaporation`` is the trail mixing constant of
    both update rules. ``None`` for ``tour_len``, ``report_threshold``,
    ``kappa`` and ``evaporation`` means "derive": ``min(n, 4*ceil(sqrt(n)))``,
    ``t_c``, the scenario's largest base intensity and ``q0`` respectively.
    """

    m: int = 20
    n_iter: int = 100
    beta: float = 2.0
    q0: float = 0.9
    tau0: float = 1e-4
    t_c: float = 1.0
    seed: int = 0
    tour_len: int | None = None
    delta: float = 0.05
    report_threshold: float | None = None
    rho: float = 0.5
    mu: float = 0.1
    kappa: float | None = None
    evaporation: float | None = 0.97

    def __post_init__(self):
        checks = {
            "m": self.m >= 1,
            "n_iter": self.n_iter >= 1,
            "beta": self.beta > 0,
            "q0": 0.0 <= self.q0 <= 1.0,
            "tau0": self.tau0 > 0,
            "t_c": self.t_c >= 0,
            "tour_len": self.tour_len is None or self.tour_len >= 1,
            "delta": self.delta >= 0,
            "report_threshold": self.report_threshold is None or self.report_threshold >= 0,
            "rho": 0.0 <= self.rho <= 1.0,
            "mu": self.mu >= 0,
            "kappa": self.kappa is None or self.kappa > 0,
            "evaporation": self.evaporation is None or 0.0 <= self.evaporation <= 1.0,
        }
        for name, ok in checks.items():
            if not ok:
                raise ConfigError(f"{name}: invalid value {getattr(self, name)!r}")

    def resolved_tour_len(self, n: int) -> int:
        if self.tour_len is not None:
            return self.tour_len
        return min(n, 4 * math.ceil(math.sqrt(n)))

    @property
    def resolved_report_threshold(self) -> float:
        return self.t_c if self.report_threshold is None else self.report_threshold

    @property
    def resolved_evaporation(self) -> float:
        return self.q0 if self.evaporation is None else self.evaporation


@dataclass(frozen=True)
class Alert:
    node: int
    time: int
    residual: float


@dataclass(frozen=True)
class IterationSummary:
    iteration: int
    alerts: int
    validated: int
    explorers: int
    tau_max: float
    tau_mean: float


@dataclass(frozen=True)
class TraceRow:
    iteration: int
    robot: int
    node: int
    alerts: int
    tau_max: float
    tau_mean: float


@dataclass
class DetectionReport:
    affected_path: list[int]
    alerts: list[Alert]
    final_tau: dict[Edge, float]
    summary: list[IterationSummary]
    trace: list[TraceRow] = field(default_factory=list)
    candidate_evaluations: int = 0
    mode: str = "hsrm"
    metrics: dict | None = None

    def to_dict(self) -> dict:
        return {
            "mode": self.mode,
            "affected_path": list(self.affected_path),
            "alerts": [asdict(a) for a in self.alerts],
            "final_tau": [[i, j, v] for (i, j), v in sorted(self.final_tau.items())],
            "candidate_evaluations": self.candidate_evaluations,
            "summary": [asdict(s) for s in self.summary],
            "metrics": self.metrics,
        }


def intruder_choice_rule(intensity: float, threshold: float) -> tuple[bool, float]:
    """Subtract the threshold; a positive residual asserts the choice state."""
    residual = intensity - threshold
    if residual > 0:
        return True, residual
    return False, 0.0


def solution_quality(sc: AttackScenario, path: Sequence[int], t: int, kappa: float) -> float:
    """Mean observed intensity along ``path`` at time ``t``, normalised by ``kappa``."""
    if not path:
        raise ValueError("empty path")
    mean = sum(sc.intensity_at(v, t) for v in path) / len(path)
    return max(0.0, mean / kappa)


def validate_path(path: Sequence[int], fired: Iterable[int], rho: float = 0.5) -> bool:
    """True if at least a ``rho`` fraction of the path's nodes fired this iteration."""
    if not path:
        raise ValueError("empty path")
    fired = set(fired)
    hits = sum(1 for v in path if v in fired)
    return hits >= rho * len(path)


def suspect_segment(tour: Sequence[int], fired: Iterable[int]) -> list[int]:
    """The stretch of ``tour`` between its first and last fired node (may be empty)."""
    fired = set(fired)
    idx = [k for k, v in enumerate(tour) if v in fired]
    if not idx:
        return []
    return list(tour[idx[0]: idx[-1] + 1])


def extract_affected_path(f: PheromoneField, g: SensorGraph, len_cap: int, mu: float = 0.1) -> list[int]:
    """Greedy maximal-trail chain grown from the strongest edge.

    Only edges strictly above ``max(tau0, fixed_point) * (1 + mu)`` take part,
    so untouched and purely decayed trails are both ignored. At every
    step the chain takes the strongest unvisited edge leaving either end
    (tail first, then lowest node id on ties) and stops at ``len_cap`` nodes.
    """
    floor = max(f.tau0, f.fixed_point) * (1.0 + mu)
    if len_cap < 2:
        return []
    start = None
    for e in g.edges:
        if f.tau[e] > floor and (start is None or f.tau[e] > f.tau[start]):
            start = e
    if start is None:
        return []
    path = list(start)
    on_path = set(path)

    def best_extension(end: int) -> tuple[int | None, float]:
        best, best_tau = None, floor
        for u in g.neighbors(end):
            if u not in on_path and f.get(end, u) > best_tau:
                best, best_tau = u, f.get(end, u)
        return best, best_tau

    while len(path) < len_cap:
        tail, tail_tau = best_extension(path[-1])
        head, head_tau = best_extension(path[0])
        if tail is None and head is None:
            break
        if tail is not None and (head is None or tail_tau >= head_tau):
            path.append(tail)
            on_path.add(tail)
        else:
            path.insert(0, head)
            on_path.add(head)
    return path


class _Run:
    """Mutable state of a single detection run."""

    def __init__(self, g: SensorGraph, sc: AttackScenario, cfg: DetectorConfig, mode: str, trace: bool):
        if mode not in MODES:
            raise ConfigError(f"unknown mode {mode!r}")
        if sc.graph != g:
            raise ConfigError("scenario was generated on a different graph")
        if sc.horizon < cfg.n_iter:
            raise ConfigError(f"scenario horizon {sc.horizon} shorter than n_iter {cfg.n_iter}")
        self.g, self.sc, self.cfg, self.mode, self.want_trace = g, sc, cfg, mode, trace
        split_seq, walk_seq = np.random.SeedSequence(cfg.seed).spawn(2)
        self.rng = np.random.default_rng(walk_seq)
        self.colony = col.split_colony(cfg.m, cfg.q0, split_seq, beta=cfg.beta)
        if mode != "hsrm":
            for r in self.colony.robots:
                r.klass = RobotClass.EXPLORER
        self.field = PheromoneField(g, cfg.tau0, cfg.resolved_evaporation)
        self.tour_len = cfg.resolved_tour_len(g.n)
        self.kappa = cfg.kappa if cfg.kappa is not None else (sc.max_base_intensity() or 1.0)
        self.retained = np.zeros(g.n)
        self.evaluations = 0
        self.alerts: list[Alert] = []
        self.summary: list[IterationSummary] = []
        self.rows: list[TraceRow] = []

    def place(self) -> None:
        starts = self.rng.integers(0, self.g.n, size=self.cfg.m)
        queued = self.colony.drain_queue() if self.mode == "hsrm" else []
        k = 0
        for r, s in zip(self.colony.robots, starts):
            if r.klass is RobotClass.EXPLOITER and queued:
                r.place(queued[k % len(queued)])
                k += 1
            else:
                r.place(int(s))

    def build_tour(self, r: Robot) -> None:
        g, f, beta = self.g, self.field, self.cfg.beta
        while len(r.path) < self.tour_len:
            i = r.current
            self.evaluations += len(g.neighbors(i))
            try:
                if self.mode == "random_patrol":
                    cands = col.candidates(g, r)
                    if not cands:
                        raise DeadEnd(i)
                    r.move(cands[int(self.rng.integers(0, len(cands)))])
                    continue
                if r.klass is RobotClass.EXPLORER:
                    col.step_sssl(r, col.transition_probabilities(g, f, r, beta), self.rng)
                else:
                    col.step_hssl(g, f, r, beta)
            except DeadEnd:
                break
            f.local_update((i, r.current))

    def sense(self, t: int) -> set[int]:
        visited = sorted({v for r in self.colony.robots for v in r.path})
        fired = set()
        for s in visited:
            evidence = max(self.sc.intensity_at(s, t), self.retained[s])
            hit, residual = intruder_choice_rule(evidence, self.cfg.t_c)
            self.retained[s] = residual
            if hit:
                fired.add(s)
                self.alerts.append(Alert(s, t, residual))
        if self.mode == "hsrm":
            theta = self.cfg.resolved_report_threshold
            for r in self.colony.explorers():
                for s in r.path:
                    if self.sc.intensity_at(s, t) > theta:
                        self.colony.notify(r, s)
        return fired

    def validate(self, t: int, fired: set[int]) -> list[Contribution]:
        seen: set[tuple[int, ...]] = set()
        out = []
        for r in self.colony.robots:
            seg = tuple(suspect_segment(r.path, fired))
            if not seg or seg in seen or not validate_path(seg, fired, self.cfg.rho):
                continue
            seen.add(seg)
            out.append(Contribution(seg, solution_quality(self.sc, seg, t, self.kappa)))
        return out

    def iterate(self, t: int) -> None:
        self.place()
        for klass in (RobotClass.EXPLORER, RobotClass.EXPLOITER):
            for r in self.colony.robots:
                if r.klass is klass:
                    self.build_tour(r)
        n_alerts = len(self.alerts)
        fired = self.sense(t)
        n_alerts = len(self.alerts) - n_alerts
        contributions = self.validate(t, fired) if self.mode != "random_patrol" else []
        if contributions:
            self.field.global_update(contributions)
        if self.mode == "hsrm":
            hot = {e for c in contributions for e in c.edges()}
            for r in self.colony.robots:
                col.adapt_ssl(r, bool(r.tour_edges() & hot), self.cfg.delta, self.cfg.q0)
        tau_max, tau_mean = self.field.max(), self.field.mean()
        self.summary.append(IterationSummary(t, n_alerts, len(contributions),
                                             len(self.colony.explorers()), tau_max, tau_mean))
        if self.want_trace:
            self.rows.extend(TraceRow(t, r.id, r.current, n_alerts, tau_max, tau_mean)
                             for r in self.colony.robots)

    def report(self) -> DetectionReport:
        path = extract_affected_path(self.field, self.g, self.g.n, self.cfg.mu)
        return DetectionReport(path, self.alerts, dict(self.field.tau), self.summary, self.rows,
                               self.evaluations, self.mode)


def run(g: SensorGraph, sc: AttackScenario, cfg: DetectorConfig, *, mode: str = "hsrm",
        trace: bool = False) -> DetectionReport:
    state = _Run(g, sc, cfg, mode, trace)
    for t in range(cfg.n_iter):
        state.iterate(t)
    return state.report()


def baseline_random_patrol(g: SensorGraph, sc: AttackScenario, cfg: DetectorConfig, *,
                           trace: bool = False) -> DetectionReport:
    return run(g, sc, cfg, mode="random_patrol", trace=trace)


def baseline_plain_acs(g: SensorGraph, sc: AttackScenario, cfg: DetectorConfig, *,
                       trace: bool = False) -> DetectionReport:
    return run(g, sc, cfg, mode="plain_acs", trace=trace)


def with_seed(cfg: DetectorConfig, seed: int) -> DetectorConfig:
    return replace(cfg, seed=seed)
