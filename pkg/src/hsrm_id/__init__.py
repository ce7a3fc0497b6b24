"""Hybrid sensitive-robot metaheuristic for intrusion detection on sensor graphs."""

__version__ = "0.1.0"

from .network import SensorGraph, build_graph, complete_graph, grid_graph, neighbors, random_graph
from .scenario import AttackScenario, Intruder, generate_scenario, ground_truth_paths, intensity_at
from .stigmergy import Contribution, PheromoneField, global_update, init_field, local_update
from .colony import Colony, Robot, RobotClass, split_colony
from .detector import (
    DetectionReport,
    DetectorConfig,
    baseline_plain_acs,
    baseline_random_patrol,
    extract_affected_path,
    intruder_choice_rule,
    run,
)

__all__ = [
    "AttackScenario", "Colony", "Contribution", "DetectionReport", "DetectorConfig", "Intruder",
    "PheromoneField", "Robot", "RobotClass", "SensorGraph", "baseline_plain_acs",
    "baseline_random_patrol", "build_graph", "complete_graph", "extract_affected_path",
    "generate_scenario", "global_update", "grid_graph", "ground_truth_paths", "init_field",
    "intensity_at", "intruder_choice_rule", "local_update", "neighbors", "random_graph", "run",
    "split_colony",
]
