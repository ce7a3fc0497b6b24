"""Metrics against ground truth, seeded batch execution and report/trace output."""

from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Union

from . import __version__
from .config import RunConfig
from .detector import DetectionReport, run
from .network import edge_key
from .scenario import AttackScenario, ground_truth_edges

NEVER = "never"
TRACE_HEADER = ["iteration", "robot", "node", "alerts", "tau_max", "tau_mean"]
METRIC_NAMES = ("edge_recall", "edge_precision", "false_alarm_rate", "detection_latency")

BASELINE_MODES = {"random_patrol": "random_patrol", "plain_acs": "plain_acs"}


class BatchError(RuntimeError):
    def __init__(self, seed: int, cause: BaseException):
        super().__init__(f"seed {seed}: {type(cause).__name__}: {cause}")
        self.seed = seed


@dataclass(frozen=True)
class Metrics:
    """Detection quality of one report.

    With no ground-truth edges recall is 1; with no reported edges precision
    is 1 (no false claims); with no alerts the false-alarm rate is 0.
    """

    edge_recall: float
    edge_precision: float
    false_alarm_rate: float
    detection_latency: Union[int, str]

    def to_dict(self) -> dict:
        return asdict(self)


def path_edges(path) -> set[tuple[int, int]]:
    return {edge_key(a, b) for a, b in zip(path, path[1:])}


def compute_metrics(report: DetectionReport, sc: AttackScenario) -> Metrics:
    g = sc.graph
    if set(report.final_tau) != set(g.edges) or (report.affected_path and not g.is_walk(report.affected_path)):
        raise ValueError("report and scenario refer to different graphs")
    truth = ground_truth_edges(sc)
    found = path_edges(report.affected_path)
    hits = len(found & truth)
    recall = hits / len(truth) if truth else 1.0
    precision = hits / len(found) if found else 1.0
    on_track = sc.trajectory_nodes()
    if report.alerts:
        false_alarm = sum(1 for a in report.alerts if a.node not in on_track) / len(report.alerts)
        latency: Union[int, str] = min(a.time for a in report.alerts)
    else:
        false_alarm, latency = 0.0, NEVER
    return Metrics(recall, precision, false_alarm, latency)


def aggregate(metrics: list[Metrics]) -> dict:
    """Mean/min/max per metric; exact summation keeps it order-independent."""
    out = {}
    for name in METRIC_NAMES:
        vals = [getattr(m, name) for m in metrics]
        finite = [v for v in vals if v != NEVER]
        if not finite:
            out[name] = {"mean": NEVER, "min": NEVER, "max": NEVER, "never": len(vals)}
            continue
        out[name] = {"mean": math.fsum(finite) / len(finite), "min": min(finite), "max": max(finite)}
        if name == "detection_latency":
            out[name]["never"] = len(vals) - len(finite)
    return out


def trace_csv(report: DetectionReport) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(TRACE_HEADER)
    for row in report.trace:
        w.writerow([row.iteration, row.robot, row.node, row.alerts, repr(row.tau_max), repr(row.tau_mean)])
    return buf.getvalue()


def run_seed(cfg: RunConfig, seed: int, trace: bool = False) -> dict:
    """One seed: detector run, metrics and optional baseline. JSON-ready."""
    g = cfg.build_graph()
    sc = cfg.build_scenario(g)
    det = cfg.detector_config(seed)
    try:
        report = run(g, sc, det, trace=trace)
        report.metrics = compute_metrics(report, sc).to_dict()
        entry = {
            "seed": seed,
            "metrics": report.metrics,
            "affected_path": report.affected_path,
            "alerts": len(report.alerts),
            "candidate_evaluations": report.candidate_evaluations,
        }
        if cfg.baseline != "none":
            base = run(g, sc, det, mode=BASELINE_MODES[cfg.baseline])
            entry["baseline"] = {
                "name": cfg.baseline,
                "metrics": compute_metrics(base, sc).to_dict(),
                "affected_path": base.affected_path,
                "alerts": len(base.alerts),
            }
        if trace:
            entry["trace_csv"] = trace_csv(report)
        return entry
    except Exception as e:  # noqa: BLE001 - re-raised with the seed attached
        raise BatchError(seed, e) from e


def _run_seed_star(args):
    return run_seed(*args)


def _metrics_of(d: dict) -> Metrics:
    return Metrics(**d)


def run_batch(cfg: RunConfig, workers: int | None = None, trace: bool | None = None) -> dict:
    workers = cfg.workers if workers is None else workers
    trace = cfg.output.trace if trace is None else trace
    jobs = [(cfg, s, trace) for s in cfg.seeds]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            entries = list(ex.map(_run_seed_star, jobs))
    else:
        entries = [run_seed(*j) for j in jobs]

    traces = {e["seed"]: e.pop("trace_csv") for e in entries if "trace_csv" in e}
    batch = {
        "tool": "hsrm-id",
        "version": __version__,
        "config": cfg.echo(),
        "runs": entries,
        "aggregate": aggregate([_metrics_of(e["metrics"]) for e in entries]),
    }
    if cfg.baseline != "none":
        batch["baseline_aggregate"] = aggregate([_metrics_of(e["baseline"]["metrics"]) for e in entries])
    if traces:
        batch["_traces"] = traces
    return batch


def dumps(doc: dict) -> str:
    return json.dumps({k: v for k, v in doc.items() if k != "_traces"}, indent=2, sort_keys=True) + "\n"


def write_outputs(doc: dict, out_dir: str | Path, name: str = "batch_report.json") -> list[Path]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = [out / name]
    written[0].write_text(dumps(doc))
    for seed, text in sorted(doc.get("_traces", {}).items()):
        p = out / f"trace_seed{seed}.csv"
        p.write_text(text)
        written.append(p)
    return written
