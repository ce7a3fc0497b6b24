"""JSON run configuration: schema, validation and default materialisation."""

from __future__ import annotations

import json
from pathlib import Path
from typing import Annotated, Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from .detector import DetectorConfig
from .network import SensorGraph, complete_graph, grid_graph, random_graph
from .scenario import AttackScenario, Intruder, generate_scenario


class ConfigLoadError(ValueError):
    """Config file could not be parsed or failed validation."""


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid")


class GridGraphSpec(_Strict):
    type: Literal["grid"] = "grid"
    rows: int = Field(ge=1)
    cols: int = Field(ge=1)
    distance: float = Field(1.0, gt=0)


class CompleteGraphSpec(_Strict):
    type: Literal["complete"]
    n: int = Field(ge=2)
    distance: float = Field(1.0, gt=0)


class RandomGraphSpec(_Strict):
    type: Literal["random"]
    n: int = Field(ge=2)
    density: float = Field(ge=0, le=1)
    seed: int = 0
    max_distance: float = Field(1.0, gt=0)


class InlineGraphSpec(_Strict):
    type: Literal["inline"]
    n: int = Field(ge=2)
    edges: list[tuple[int, int, float]]


GraphSpec = Annotated[
    Union[GridGraphSpec, CompleteGraphSpec, RandomGraphSpec, InlineGraphSpec],
    Field(discriminator="type"),
]


class IntruderSpec(_Strict):
    trajectory: list[int] = Field(min_length=1)
    base_intensity: float = Field(gt=0)
    threshold: Optional[float] = Field(None, ge=0)
    tendency: Optional[dict[int, float]] = None


class GeneratorSpec(_Strict):
    k_intruders: int = Field(ge=0)
    walk_len: int = Field(ge=1)
    base_intensity: float = Field(5.0, gt=0)


class ScenarioSpec(_Strict):
    intruders: Optional[list[IntruderSpec]] = None
    generator: Optional[GeneratorSpec] = None
    noise_level: float = Field(0.0, ge=0)
    seed: int = 0
    horizon: Optional[int] = Field(None, ge=1)

    @model_validator(mode="after")
    def _one_source(self):
        if (self.intruders is None) == (self.generator is None):
            raise ValueError("exactly one of 'intruders' or 'generator' must be given")
        return self


class DetectorSpec(_Strict):
    m: int = Field(20, ge=1)
    n_iter: int = Field(100, ge=1)
    beta: float = Field(2.0, gt=0)
    q0: float = Field(0.9, ge=0, le=1)
    tau0: float = Field(1e-4, gt=0)
    t_c: float = Field(1.0, ge=0)
    tour_len: Optional[int] = Field(None, ge=1)
    delta: float = Field(0.05, ge=0)
    report_threshold: Optional[float] = Field(None, ge=0)
    rho: float = Field(0.5, ge=0, le=1)
    mu: float = Field(0.1, ge=0)
    kappa: Optional[float] = Field(None, gt=0)
    evaporation: Optional[float] = Field(0.97, ge=0, le=1)


class OutputSpec(_Strict):
    dir: Optional[str] = None
    trace: bool = False


class RunConfig(_Strict):
    graph: GraphSpec
    scenario: ScenarioSpec
    detector: DetectorSpec = Field(default_factory=DetectorSpec)
    baseline: Literal["none", "random_patrol", "plain_acs"] = "none"
    seeds: list[int] = Field(min_length=1)
    output: OutputSpec = Field(default_factory=OutputSpec)
    workers: int = Field(1, ge=1)

    def build_graph(self) -> SensorGraph:
        spec = self.graph
        if isinstance(spec, GridGraphSpec):
            return grid_graph(spec.rows, spec.cols, spec.distance)
        if isinstance(spec, CompleteGraphSpec):
            return complete_graph(spec.n, spec.distance)
        if isinstance(spec, RandomGraphSpec):
            return random_graph(spec.n, spec.density, spec.seed, spec.max_distance)
        return SensorGraph(spec.n, spec.edges)

    def build_scenario(self, g: SensorGraph) -> AttackScenario:
        sc = self.scenario
        horizon = sc.horizon or self.detector.n_iter
        if sc.generator is not None:
            gen = sc.generator
            return generate_scenario(g, gen.k_intruders, gen.walk_len, gen.base_intensity,
                                     sc.noise_level, sc.seed, horizon=horizon,
                                     threshold=self.detector.t_c)
        intruders = tuple(
            Intruder(id=k, trajectory=tuple(spec.trajectory), base_intensity=spec.base_intensity,
                     threshold=self.detector.t_c if spec.threshold is None else spec.threshold,
                     tendency=spec.tendency)
            for k, spec in enumerate(sc.intruders)
        )
        return AttackScenario(g, intruders, horizon, sc.noise_level, sc.seed)

    def detector_config(self, seed: int) -> DetectorConfig:
        return DetectorConfig(seed=seed, **self.detector.model_dump())

    def materialized(self) -> "RunConfig":
        """Copy with every derived default written out explicitly."""
        g = self.build_graph()
        sc = self.build_scenario(g)
        cfg = self.detector_config(self.seeds[0])
        det = self.detector.model_copy(update={
            "tour_len": cfg.resolved_tour_len(g.n),
            "report_threshold": cfg.resolved_report_threshold,
            "evaporation": cfg.resolved_evaporation,
            "kappa": cfg.kappa if cfg.kappa is not None else (sc.max_base_intensity() or 1.0),
        })
        scen = self.scenario.model_copy(update={"horizon": sc.horizon})
        if scen.intruders is not None:
            scen.intruders = [
                i.model_copy(update={"threshold": self.detector.t_c if i.threshold is None else i.threshold})
                for i in scen.intruders
            ]
        return self.model_copy(update={"detector": det, "scenario": scen})

    def echo(self) -> dict:
        return self.model_dump(mode="json")


def _describe(err: ValidationError) -> str:
    parts = []
    for e in err.errors():
        loc = ".".join(str(x) for x in e["loc"])
        parts.append(f"{loc}: {e['msg']}")
    return "; ".join(parts)


def parse_config(data: dict | str) -> RunConfig:
    if isinstance(data, str):
        try:
            data = json.loads(data)
        except json.JSONDecodeError as e:
            raise ConfigLoadError(f"line {e.lineno}, column {e.colno}: {e.msg}") from e
    try:
        cfg = RunConfig.model_validate(data)
        return cfg.materialized()
    except ValidationError as e:
        raise ConfigLoadError(_describe(e)) from e
    except ValueError as e:
        raise ConfigLoadError(str(e)) from e


def load_config(path: str | Path) -> RunConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as e:
        raise ConfigLoadError(f"{path}: {e.strerror}") from e
    try:
        return parse_config(text)
    except ConfigLoadError as e:
        raise ConfigLoadError(f"{path}: {e}") from e


def template_config() -> dict:
    """Minimal runnable config: 5x5 grid, one planted intruder, default tunables."""
    return {
        "graph": {"type": "grid", "rows": 5, "cols": 5},
        "scenario": {
            "intruders": [{"trajectory": [10, 11, 12, 13, 18, 23], "base_intensity": 5.0}],
            "noise_level": 0.1,
            "seed": 0,
        },
        "detector": DetectorSpec().model_dump(),
        "baseline": "random_patrol",
        "seeds": list(range(20)),
        "output": {"dir": None, "trace": False},
        "workers": 1,
    }
