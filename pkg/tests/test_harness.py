import json
import random

import pytest

from hsrm_id.cli import main
from hsrm_id.config import ConfigLoadError, load_config, parse_config, template_config
from hsrm_id.detector import Alert, DetectionReport, DetectorConfig, run
from hsrm_id.harness import (
    NEVER,
    TRACE_HEADER,
    Metrics,
    aggregate,
    compute_metrics,
    dumps,
    run_batch,
)
from hsrm_id.network import grid_graph
from hsrm_id.scenario import AttackScenario, Intruder


def small_config(**overrides):
    cfg = {
        "graph": {"type": "grid", "rows": 4, "cols": 4},
        "scenario": {"intruders": [{"trajectory": [4, 5, 6, 7], "base_intensity": 5.0}],
                     "noise_level": 0.1, "seed": 2},
        "detector": {"m": 6, "n_iter": 15},
        "seeds": [0, 1, 2],
    }
    cfg.update(overrides)
    return cfg


@pytest.fixture
def config_file(tmp_path):
    def write(data, name="cfg.json"):
        p = tmp_path / name
        p.write_text(data if isinstance(data, str) else json.dumps(data))
        return p
    return write


def test_minimal_config_materialises_defaults(config_file):
    cfg = load_config(config_file({
        "graph": {"type": "grid", "rows": 5, "cols": 5},
        "scenario": {"generator": {"k_intruders": 1, "walk_len": 6}},
        "seeds": [1],
    }))
    echo = cfg.echo()
    det = echo["detector"]
    assert det["m"] == 20 and det["n_iter"] == 100
    assert det["tour_len"] == 20
    assert det["report_threshold"] == det["t_c"]
    assert det["evaporation"] == 0.97
    assert det["kappa"] == 5.0
    assert echo["scenario"]["horizon"] == 100
    assert echo["baseline"] == "none"
    assert None not in det.values()


def test_echo_is_a_fixed_point(config_file):
    cfg = load_config(config_file(small_config()))
    again = load_config(config_file(cfg.echo(), "echo.json"))
    assert again.echo() == cfg.echo()


def test_bad_q0_names_field(config_file):
    data = small_config(detector={"q0": 1.5})
    with pytest.raises(ConfigLoadError, match="q0"):
        load_config(config_file(data))


def test_missing_seeds(config_file):
    data = small_config()
    del data["seeds"]
    with pytest.raises(ConfigLoadError, match="seeds"):
        load_config(config_file(data))


def test_unknown_field_rejected(config_file):
    with pytest.raises(ConfigLoadError, match="colour"):
        load_config(config_file(small_config(colour="red")))


def test_parse_error_has_position(config_file):
    with pytest.raises(ConfigLoadError, match="line 2"):
        load_config(config_file('{\n  "graph": ,\n}'))


def test_invalid_trajectory_reported(config_file):
    data = small_config()
    data["scenario"]["intruders"][0]["trajectory"] = [0, 15]
    with pytest.raises(ConfigLoadError, match="not a walk"):
        load_config(config_file(data))


def test_disconnected_inline_graph(config_file):
    data = small_config(graph={"type": "inline", "n": 3, "edges": [[0, 1, 1.0]]})
    data["scenario"] = {"generator": {"k_intruders": 0, "walk_len": 1}}
    with pytest.raises(ConfigLoadError, match="unreachable"):
        load_config(config_file(data))


def test_template_is_valid():
    cfg = parse_config(template_config())
    assert cfg.seeds == list(range(20))


def _report(path, alerts, g):
    return DetectionReport(path, alerts, {e: 0.1 for e in g.edges}, [])


def _scenario(g, walk):
    return AttackScenario(g, (Intruder(0, tuple(walk), 1.0),), horizon=5)


def test_metrics_identity():
    g = grid_graph(3, 3)
    m = compute_metrics(_report([0, 1, 2], [Alert(1, 3, 0.5)], g), _scenario(g, [0, 1, 2]))
    assert m == Metrics(1.0, 1.0, 0.0, 3)


def test_metrics_empty_report():
    g = grid_graph(3, 3)
    m = compute_metrics(_report([], [], g), _scenario(g, [0, 1, 2]))
    assert (m.edge_recall, m.edge_precision, m.detection_latency) == (0.0, 1.0, NEVER)


def test_metrics_set_arithmetic():
    # truth a..d on the walk 0-1-2-5-8; reported 0-1-2-? picks a, b plus one stray edge
    g = grid_graph(3, 3)
    truth_walk = [0, 1, 2, 5, 8]
    reported = [3, 0, 1, 2]
    m = compute_metrics(_report(reported, [Alert(4, 0, 1.0), Alert(1, 2, 1.0)], g), _scenario(g, truth_walk))
    truth = {(0, 1), (1, 2), (2, 5), (5, 8)}
    found = {(0, 3), (0, 1), (1, 2)}
    assert m.edge_recall == len(truth & found) / len(truth) == 0.5
    assert m.edge_precision == pytest.approx(2 / 3)
    assert m.false_alarm_rate == 0.5
    assert m.detection_latency == 0


def test_metrics_graph_mismatch():
    g, other = grid_graph(3, 3), grid_graph(2, 2)
    with pytest.raises(ValueError):
        compute_metrics(_report([], [], other), _scenario(g, [0, 1]))


def test_metrics_pure():
    g = grid_graph(4, 4)
    sc = AttackScenario(g, (Intruder(0, (4, 5, 6), 5.0),), horizon=10)
    rep = run(g, sc, DetectorConfig(m=5, n_iter=10, seed=3))
    assert compute_metrics(rep, sc) == compute_metrics(rep, sc)


def test_aggregate_permutation_invariant():
    rnd = random.Random(0)
    ms = [Metrics(rnd.random(), rnd.random(), rnd.random(), rnd.choice([3, 7, NEVER])) for _ in range(25)]
    base = aggregate(ms)
    for _ in range(5):
        rnd.shuffle(ms)
        assert aggregate(ms) == base


def test_singleton_batch_aggregate():
    cfg = parse_config(small_config(seeds=[4]))
    doc = run_batch(cfg)
    m = doc["runs"][0]["metrics"]
    for name, stats in doc["aggregate"].items():
        if m[name] == NEVER:
            assert stats["mean"] == NEVER
        else:
            assert stats["mean"] == stats["min"] == stats["max"] == m[name]


def test_batch_deterministic_and_concurrency_neutral():
    cfg = parse_config(small_config(baseline="random_patrol"))
    seq = run_batch(cfg, workers=1, trace=True)
    again = run_batch(cfg, workers=1, trace=True)
    par = run_batch(cfg, workers=3, trace=True)
    assert dumps(seq) == dumps(again) == dumps(par)
    assert seq["_traces"] == par["_traces"]
    assert [r["seed"] for r in seq["runs"]] == [0, 1, 2]
    assert "baseline_aggregate" in seq


def test_batch_error_names_seed(monkeypatch):
    import hsrm_id.harness as harness

    def boom(*a, **k):
        raise RuntimeError("kaput")

    monkeypatch.setattr(harness, "run", boom)
    with pytest.raises(harness.BatchError, match="seed 0"):
        run_batch(parse_config(small_config()))


def test_cli_gen(capsys):
    assert main(["gen"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert parse_config(doc).seeds


def test_cli_run_writes_report_and_trace(config_file, tmp_path):
    out = tmp_path / "out"
    code = main(["run", "--config", str(config_file(small_config())), "--seed", "9",
                 "--out", str(out), "--trace"])
    assert code == 0
    report = json.loads((out / "run_report.json").read_text())
    assert [r["seed"] for r in report["runs"]] == [9]
    lines = (out / "trace_seed9.csv").read_text().splitlines()
    assert lines[0] == ",".join(TRACE_HEADER)
    assert len(lines) == 1 + 6 * 15


def test_cli_batch_baseline_flag(config_file, tmp_path):
    out = tmp_path / "b"
    assert main(["batch", "--config", str(config_file(small_config())), "--out", str(out),
                 "--baseline", "plain_acs", "--workers", "2"]) == 0
    doc = json.loads((out / "batch_report.json").read_text())
    assert doc["config"]["baseline"] == "plain_acs"
    assert len(doc["runs"]) == 3
    assert doc["tool"] == "hsrm-id" and doc["version"]


def test_cli_config_error_exit_code(config_file, capsys):
    assert main(["run", "--config", str(config_file(small_config(detector={"q0": 2})))]) == 1
    assert "q0" in capsys.readouterr().err


def test_cli_missing_file_exit_code(tmp_path):
    assert main(["batch", "--config", str(tmp_path / "nope.json")]) == 1


def test_cli_runtime_error_exit_code(config_file, tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    assert main(["run", "--config", str(config_file(small_config())), "--out", str(blocker / "sub")]) == 2


def test_null_evaporation_follows_q0(config_file):
    data = small_config(detector={"q0": 0.8, "evaporation": None})
    assert load_config(config_file(data)).detector.evaporation == 0.8
