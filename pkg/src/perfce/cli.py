"""Command-line entry point.

Every command is deterministic under --seed and exits 0 on success, 1 on
a domain error (with a machine-readable JSON error on stderr) and 2 on
usage errors.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from . import evaluation, rca, sem as sem_mod, simulate, structure
from .dataset import load_dataset, save_dataset
from .errors import PerfceError
from .graph import graph_from_json, graph_to_dot, graph_to_json
from .util import stable_json


@click.group()
def cli():
    """Causal diagnosis toolkit: simulate, learn, diagnose, serve."""


def _load_system(path: str | None) -> simulate.SystemSpec:
    if path is None:
        return simulate.default_system()
    return simulate.load_system(path)


@cli.command("simulate")
@click.option("--system", "system_path", type=click.Path(exists=True), default=None,
              help="SystemSpec JSON (default: built-in 20-KPI system).")
@click.option("--manifest", "manifest_path", type=click.Path(exists=True), default=None,
              help="ExperimentManifest JSON (default: one sweep per chaos variable).")
@click.option("--anomaly", default=None,
              help="Emit a single anomaly episode of this kind instead of a protocol run.")
@click.option("--duration", type=float, default=60.0, show_default=True,
              help="Anomaly duration in seconds (with --anomaly).")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out", type=click.Path(), required=True)
@click.option("--write-system", type=click.Path(), default=None,
              help="Also write the effective SystemSpec JSON here.")
@click.option("--write-manifest", type=click.Path(), default=None,
              help="Also write the effective manifest JSON here.")
def simulate_cmd(system_path, manifest_path, anomaly, duration, seed, out,
                 write_system, write_manifest):
    """Generate a trace from the simulated KPI system."""
    system = _load_system(system_path)
    if anomaly is not None:
        trace, truth = simulate.inject_anomaly(system, anomaly, duration, seed=seed)
        click.echo(stable_json({"anomaly": anomaly, "ground_truth": sorted(truth)}),
                   nl=False)
    else:
        manifest = (simulate.load_manifest(manifest_path) if manifest_path
                    else simulate.default_manifest(system))
        trace = simulate.run_chaos_protocol(system, manifest, seed=seed)
        if write_manifest:
            Path(write_manifest).write_text(simulate.manifest_to_json(manifest),
                                            encoding="utf-8")
    if write_system:
        Path(write_system).write_text(simulate.system_to_json(system), encoding="utf-8")
    save_dataset(trace, out)


@cli.command("learn-structure")
@click.option("--data", type=click.Path(exists=True), required=True)
@click.option("--out", type=click.Path(), required=True, help="Graph JSON output; a .dot sibling is written too.")
@click.option("--exact", "mode", flag_value=structure.MODE_EXACT)
@click.option("--hill-climb", "mode", flag_value=structure.MODE_HILL_CLIMB)
@click.option("--auto", "mode", flag_value=structure.MODE_AUTO, default=True)
@click.option("--max-parents", type=int, default=3, show_default=True)
@click.option("--restarts", type=int, default=10, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
def learn_structure(data, out, mode, max_parents, restarts, seed):
    """Learn the causal graph from a trace."""
    dataset = load_dataset(data)
    config = structure.SearchConfig(max_in_degree=max_parents, restarts=restarts,
                                    seed=seed, mode=mode)
    graph, score, dropped = structure.search_dag_detailed(dataset, config)
    out = Path(out)
    out.write_text(graph_to_json(graph), encoding="utf-8")
    out.with_suffix(".dot").write_text(graph_to_dot(graph), encoding="utf-8")
    click.echo(stable_json({
        "nodes": len(graph.nodes),
        "edges": len(graph.edges),
        "score": score,
        "dropped_columns": dropped,
    }), nl=False)


@cli.command("learn-params")
@click.option("--data", type=click.Path(exists=True), required=True)
@click.option("--graph", "graph_path", type=click.Path(exists=True), required=True)
@click.option("--out", type=click.Path(), required=True)
@click.option("--instruments", type=click.Path(exists=True), default=None,
              help="JSON map treatment -> chaos instrument; mapped treatments are "
                   "treated as latent-confounded.")
@click.option("--seed", type=int, default=0, show_default=True)
def learn_params(data, graph_path, out, instruments, seed):
    """Fit per-edge effects and assemble the SEM."""
    dataset = load_dataset(data)
    graph = graph_from_json(Path(graph_path).read_text(encoding="utf-8"))
    instrument_map = None
    if instruments:
        instrument_map = json.loads(Path(instruments).read_text(encoding="utf-8"))
    model = sem_mod.fit_sem(dataset, graph, instrument_map=instrument_map, seed=seed)
    Path(out).write_text(sem_mod.sem_to_json(model), encoding="utf-8")
    click.echo(stable_json({
        "nodes": len(model.graph.nodes),
        "edges": len(model.graph.edges),
        "unquantified": [list(t) for t in model.unquantified],
    }), nl=False)


def _parse_window(window: str | None, n_rows: int) -> tuple[int, int]:
    if window is None:
        return 0, n_rows
    try:
        a, b = window.split(":")
        return int(a), int(b)
    except ValueError:
        raise click.UsageError("--window must look like START:END") from None


@cli.command()
@click.option("--sem", "sem_path", type=click.Path(exists=True), required=True)
@click.option("--data", type=click.Path(exists=True), required=True)
@click.option("--target", required=True)
@click.option("--window", default=None, help="START:END sample indices (default: whole trace).")
@click.option("--top", type=int, default=None, help="Keep only the top-k entries.")
def diagnose(sem_path, data, target, window, top):
    """Rank candidate root causes for an anomalous KPI."""
    model = sem_mod.sem_from_json(Path(sem_path).read_text(encoding="utf-8"))
    dataset = load_dataset(data)
    start, end = _parse_window(window, dataset.n_rows)
    snapshot = rca.snapshot_from_window(dataset, start, end)
    diagnosis = rca.root_cause_analysis(model, snapshot, target)
    click.echo(stable_json(rca.diagnosis_payload(diagnosis, top)), nl=False)


def _parse_interventions(text: str) -> dict:
    out = {}
    for part in text.split(","):
        if "=" not in part:
            raise click.UsageError("--set expects kpi=value[,kpi=value...]")
        name, value = part.split("=", 1)
        try:
            out[name.strip()] = float(value)
        except ValueError:
            raise click.UsageError(f"{value!r} is not a number") from None
    return out


@cli.command()
@click.option("--sem", "sem_path", type=click.Path(exists=True), required=True)
@click.option("--data", type=click.Path(exists=True), required=True)
@click.option("--target", required=True)
@click.option("--set", "interventions", required=True,
              help="kpi=value[,kpi=value...] ancestor interventions.")
@click.option("--window", default=None, help="START:END sample indices (default: whole trace).")
def whatif(sem_path, data, target, interventions, window):
    """Predict the target under hypothetical KPI values."""
    model = sem_mod.sem_from_json(Path(sem_path).read_text(encoding="utf-8"))
    dataset = load_dataset(data)
    start, end = _parse_window(window, dataset.n_rows)
    snapshot = rca.snapshot_from_window(dataset, start, end)
    payload = rca.whatif_payload(model, snapshot, target,
                                 _parse_interventions(interventions))
    click.echo(stable_json(payload), nl=False)


@cli.group("eval")
def eval_group():
    """Reproduce the synthetic study or score diagnosis quality."""


@eval_group.command("synthetic")
@click.option("--out", type=click.Path(), required=True)
@click.option("--datasets", type=int, default=100, show_default=True)
@click.option("--train-n", type=int, default=5000, show_default=True)
@click.option("--queries", type=int, default=1000, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
def eval_synthetic(out, datasets, train_n, queries, seed):
    """Counterfactual accuracy on the three synthetic local structures."""
    config = evaluation.SyntheticEvalConfig(
        datasets=datasets, train_n=train_n, queries=queries, seed=seed)
    report = evaluation.run_synthetic_eval(config)
    Path(out).write_text(stable_json(report.to_dict()), encoding="utf-8")
    summary = {
        kind: {name: stats.get("r2_mean") for name, stats in methods.items()}
        for kind, methods in report.results.items()
    }
    click.echo(stable_json({"r2_mean": summary}), nl=False)


@eval_group.command("rca")
@click.option("--system", "system_path", type=click.Path(exists=True), default=None)
@click.option("--out", type=click.Path(), required=True)
@click.option("--episodes", type=int, default=20, show_default=True)
@click.option("--top-k", type=int, default=5, show_default=True)
@click.option("--target", default="tps", show_default=True)
@click.option("--learned-graph", is_flag=True,
              help="Learn the graph from the protocol trace instead of using "
                   "the system's ground-truth structure.")
@click.option("--seed", type=int, default=0, show_default=True)
def eval_rca(system_path, out, episodes, top_k, target, learned_graph, seed):
    """Recall@k and NDCG of diagnosis against simulator ground truth."""
    system = _load_system(system_path)
    model = evaluation.train_sem_for_system(
        system, seed=seed, use_true_graph=not learned_graph)
    result = evaluation.rca_recall_study(
        system, model, anomalies=episodes, k=top_k, seed=seed, target=target)
    Path(out).write_text(stable_json(result), encoding="utf-8")
    click.echo(stable_json({
        "recall_at_k": result["recall_at_k"],
        "mean_ndcg": result["mean_ndcg"],
    }), nl=False)


@cli.command()
@click.option("--sem", "sem_path", type=click.Path(exists=True), required=True)
@click.option("--data", type=click.Path(exists=True), required=True)
@click.option("--port", type=int, envvar="PERFCE_PORT", default=8321, show_default=True)
@click.option("--bind", envvar="PERFCE_BIND", default="127.0.0.1", show_default=True)
@click.option("--static", "static_path", type=click.Path(exists=True), default=None,
              help="Directory of console assets to serve at /.")
def serve(sem_path, data, port, bind, static_path):
    """Serve the diagnosis API (and optionally the web console)."""
    import uvicorn

    from .service import ServiceState, build_app

    state = ServiceState.load(sem_path, data, port=port, bind=bind,
                              static_path=static_path)
    uvicorn.run(build_app(state), host=state.bind, port=state.port, log_level="info")


def main(argv=None) -> int:
    try:
        cli.main(args=argv, standalone_mode=False)
        return 0
    except click.exceptions.Exit as exc:
        return exc.exit_code
    except click.UsageError as exc:
        click.echo(f"usage error: {exc.format_message()}", err=True)
        return 2
    except click.ClickException as exc:
        exc.show()
        return 1
    except click.exceptions.Abort:
        return 1
    except (PerfceError, ValueError) as exc:
        click.echo(json.dumps({"error": type(exc).__name__, "message": str(exc)}),
                   err=True)
        return 1


if __name__ == "__main__":
    sys.exit(main())
