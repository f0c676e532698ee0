import json
import subprocess
import sys

import pytest

from perfce.cli import main


def run_cli(*args, capsys):
    code = main(list(args))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


@pytest.fixture(scope="module")
def pipeline(tmp_path_factory):
    """simulate -> learn-structure -> learn-params once per module."""
    root = tmp_path_factory.mktemp("pipeline")
    trace = root / "trace.csv"
    graph = root / "graph.json"
    sem = root / "sem.json"
    anomaly = root / "anomaly.csv"
    assert main(["simulate", "--seed", "7", "--out", str(trace)]) == 0
    assert main(["learn-structure", "--data", str(trace), "--out", str(graph),
                 "--restarts", "2", "--seed", "0"]) == 0
    assert main(["learn-params", "--data", str(trace), "--graph", str(graph),
                 "--out", str(sem)]) == 0
    assert main(["simulate", "--anomaly", "cpu_stress", "--duration", "60",
                 "--seed", "3", "--out", str(anomaly)]) == 0
    return {"root": root, "trace": trace, "graph": graph, "sem": sem,
            "anomaly": anomaly}


def test_simulate_is_byte_reproducible(tmp_path, capsys):
    a = tmp_path / "a.csv"
    b = tmp_path / "b.csv"
    assert run_cli("simulate", "--seed", "7", "--out", str(a), capsys=capsys)[0] == 0
    assert run_cli("simulate", "--seed", "7", "--out", str(b), capsys=capsys)[0] == 0
    assert a.read_bytes() == b.read_bytes()
    assert (tmp_path / "a.segments.json").read_bytes() == \
        (tmp_path / "b.segments.json").read_bytes()


def test_unknown_subcommand_exits_2(capsys):
    code, _, _ = run_cli("frobnicate", capsys=capsys)
    assert code == 2


def test_missing_required_option_exits_2(capsys):
    code, _, _ = run_cli("simulate", capsys=capsys)
    assert code == 2


def test_domain_error_exits_1_with_json(pipeline, capsys):
    code, _, err = run_cli(
        "diagnose", "--sem", str(pipeline["sem"]), "--data", str(pipeline["anomaly"]),
        "--target", "not_a_kpi", capsys=capsys)
    assert code == 1
    payload = json.loads(err)
    assert payload["error"] == "UnknownNode"


def test_learn_structure_outputs(pipeline):
    graph = json.loads(pipeline["graph"].read_text())
    assert set(graph) == {"nodes", "edges"}
    dot = pipeline["graph"].with_suffix(".dot").read_text()
    assert dot.startswith("digraph")


def test_diagnose_emits_sorted_entries(pipeline, capsys):
    code, out, _ = run_cli(
        "diagnose", "--sem", str(pipeline["sem"]), "--data", str(pipeline["anomaly"]),
        "--target", "tps", "--window", "120:180", "--top", "5", capsys=capsys)
    assert code == 0
    payload = json.loads(out)
    blames = [e["blame"] for e in payload["entries"]]
    assert blames == sorted(blames, reverse=True)
    assert len(blames) <= 5


def test_whatif_round_trips_numbers(pipeline, capsys):
    code, out, _ = run_cli(
        "whatif", "--sem", str(pipeline["sem"]), "--data", str(pipeline["anomaly"]),
        "--target", "tps", "--set", "cpu_load=30.0", "--window", "120:180",
        capsys=capsys)
    assert code == 0
    payload = json.loads(out)
    assert set(payload) == {"y", "y_hat", "delta", "per_node_shifts"}
    assert payload["delta"] == pytest.approx(payload["y_hat"] - payload["y"])


def test_whatif_bad_set_syntax_exits_2(pipeline, capsys):
    code, _, _ = run_cli(
        "whatif", "--sem", str(pipeline["sem"]), "--data", str(pipeline["anomaly"]),
        "--target", "tps", "--set", "cpu_load:30", capsys=capsys)
    assert code == 2


def test_eval_synthetic_writes_report(tmp_path, capsys):
    report = tmp_path / "report.json"
    code, out, _ = run_cli(
        "eval", "synthetic", "--out", str(report), "--datasets", "2",
        "--train-n", "400", "--queries", "50", "--seed", "1", capsys=capsys)
    assert code == 0
    payload = json.loads(report.read_text())
    assert payload["config"]["datasets"] == 2
    assert "LS_C" in payload["results"]


def test_eval_rca_writes_report(tmp_path, capsys):
    report = tmp_path / "rca.json"
    code, out, _ = run_cli(
        "eval", "rca", "--out", str(report), "--episodes", "4", "--top-k", "5",
        "--seed", "0", capsys=capsys)
    assert code == 0
    payload = json.loads(report.read_text())
    assert len(payload["episodes"]) == 4
    assert 0.0 <= payload["recall_at_k"] <= 1.0


def test_learn_params_instruments_flag(pipeline, tmp_path, capsys):
    instruments = tmp_path / "instruments.json"
    instruments.write_text(json.dumps({"cpu_load": "chaos_cpu_stress"}))
    sem_out = tmp_path / "sem_iv.json"
    code, _, _ = run_cli(
        "learn-params", "--data", str(pipeline["trace"]),
        "--graph", str(pipeline["graph"]), "--out", str(sem_out),
        "--instruments", str(instruments), capsys=capsys)
    assert code == 0
    payload = json.loads(sem_out.read_text())
    qd_effects = {
        parent: eff for parent, eff in
        payload["node_models"].get("query_duration", {"effects": {}})["effects"].items()
        if eff is not None
    }
    if "cpu_load" in qd_effects:
        assert qd_effects["cpu_load"]["estimator"] == "iv2sls"


def test_module_entrypoint_help():
    out = subprocess.run(
        [sys.executable, "-m", "perfce.cli", "--help"],
        capture_output=True, text=True)
    assert out.returncode == 0
    for name in ("simulate", "learn-structure", "learn-params", "diagnose",
                 "whatif", "eval", "serve"):
        assert name in out.stdout
