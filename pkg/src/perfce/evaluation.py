"""Synthetic counterfactual study and ranking metrics for diagnosis.

The synthetic study draws many datasets per local structure with random
treatment coefficients, fits the matching causal estimator plus naive
baselines, and scores predicted against analytic treatment effects. The
ranking metrics score diagnosis output against simulator ground truth.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .dataset import Dataset
from .effects import fit_dml, fit_iv, fit_ols
from .errors import EmptyRelevantSet, LengthMismatch, PerfceError
from .rca import root_cause_analysis, snapshot_from_window
from .sem import Sem, fit_sem
from .simulate import (
    LS_A,
    LS_B,
    LS_C,
    DgpSpec,
    SystemSpec,
    default_manifest,
    generate_queries,
    inject_anomaly,
    run_chaos_protocol,
    sample_dgp,
)

METHOD = "method"
BASELINE_NAIVE = "linear_naive"
BASELINE_LINEAR_ALL = "linear_all"
BASELINE_TREE = "regression_tree"


def mse_r2(predicted, truth) -> dict:
    """Mean squared error and coefficient of determination.

    r2 is None when the truth has zero variance (undefined).
    """
    predicted = np.asarray(predicted, dtype=float)
    truth = np.asarray(truth, dtype=float)
    if predicted.shape != truth.shape or predicted.size == 0:
        raise LengthMismatch(
            f"predicted has {predicted.size} values, truth has {truth.size}"
        )
    mse = float(np.mean((predicted - truth) ** 2))
    ss_tot = float(np.sum((truth - truth.mean()) ** 2))
    if ss_tot == 0.0:
        return {"mse": mse, "r2": None}
    ss_res = float(np.sum((predicted - truth) ** 2))
    return {"mse": mse, "r2": 1.0 - ss_res / ss_tot}


@dataclass(frozen=True)
class RankingCase:
    ranked: tuple[str, ...]
    relevant: frozenset

    def __post_init__(self):
        if len(set(self.ranked)) != len(self.ranked):
            raise ValueError("ranked list has duplicates")


def map_at_r(case: RankingCase) -> float:
    """Average precision truncated at R = |relevant|."""
    if not case.relevant:
        raise EmptyRelevantSet("map_at_r needs a non-empty relevant set")
    r = len(case.relevant)
    hits = 0
    precision_sum = 0.0
    for i, item in enumerate(case.ranked[:r], start=1):
        if item in case.relevant:
            hits += 1
            precision_sum += hits / i
    return precision_sum / r


def ndcg(case: RankingCase) -> float:
    """Binary-gain NDCG with log2 discount and ideal normalization."""
    if not case.relevant:
        raise EmptyRelevantSet("ndcg needs a non-empty relevant set")
    dcg = sum(
        1.0 / np.log2(i + 1)
        for i, item in enumerate(case.ranked, start=1)
        if item in case.relevant
    )
    ideal = sum(1.0 / np.log2(i + 1) for i in range(1, len(case.relevant) + 1))
    return float(dcg / ideal)


# -- synthetic study -----------------------------------------------------------

@dataclass(frozen=True)
class SyntheticEvalConfig:
    datasets: int = 100
    train_n: int = 5000
    queries: int = 1000
    seed: int = 0
    theta_low: float = 0.5
    theta_high: float = 2.0
    tree_depth: int = 8


@dataclass
class EvalReport:
    config: SyntheticEvalConfig
    results: dict = field(default_factory=dict)  # kind -> method -> stats
    failures: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "config": {
                "datasets": self.config.datasets,
                "train_n": self.config.train_n,
                "queries": self.config.queries,
                "seed": self.config.seed,
                "theta_low": self.config.theta_low,
                "theta_high": self.config.theta_high,
            },
            "results": self.results,
            "failures": list(self.failures),
        }


def _draw_thetas(rng, count, low, high):
    magnitude = rng.uniform(low, high, size=count)
    sign = rng.choice([-1.0, 1.0], size=count)
    return tuple(float(m * s) for m, s in zip(magnitude, sign))


def _fit_method(kind: str, data: Dataset):
    if kind == LS_A:
        return fit_ols(data, "X2", "Y", covariates=("X1",))
    if kind == LS_B:
        return fit_dml(data, "X2", "Y", confounders=("X1",))
    return fit_iv(data, "IV", "X2", "Y")


def _naive_slope(data: Dataset) -> float:
    # Unadjusted regression of outcome on treatment: the "correlation as
    # causation" predictor that confounding biases.
    t = data.column("X2")
    y = data.column("Y")
    return float(np.cov(t, y)[0, 1] / np.var(t, ddof=1))


def _all_columns_slope(data: Dataset) -> float:
    others = [n for n in data.column_names if n not in ("X2", "Y")]
    model = fit_ols(data, "X2", "Y", covariates=tuple(others))
    return model.slope


def _tree_effects(data: Dataset, queries, depth: int) -> np.ndarray:
    from sklearn.tree import DecisionTreeRegressor

    features = [n for n in data.column_names if n != "Y"]
    X = np.column_stack([data.column(n) for n in features])
    tree = DecisionTreeRegressor(max_depth=depth, random_state=0)
    tree.fit(X, data.column("Y"))

    x2_pos = features.index("X2")
    context = np.zeros(len(features))
    if "X1" in features:
        x1_pos = features.index("X1")
    else:
        x1_pos = None  # latent context: hold other features at their mean
    lo = np.empty((len(queries), len(features)))
    hi = np.empty((len(queries), len(features)))
    for i, q in enumerate(queries):
        row = context.copy()
        if x1_pos is not None:
            row[x1_pos] = q.x1
        lo[i] = hi[i] = row
        lo[i, x2_pos] = q.x2_from
        hi[i, x2_pos] = q.x2_to
    return tree.predict(hi) - tree.predict(lo)


def run_synthetic_eval(config: SyntheticEvalConfig | None = None) -> EvalReport:
    """Fit the matching estimator and the baselines on each replicate,
    score the counterfactual queries, and aggregate per local structure.

    Per-dataset MSE / R2 are computed first, then averaged across
    replicates; estimator failures are recorded, not fatal.
    """
    config = config or SyntheticEvalConfig()
    report = EvalReport(config=config)
    root = np.random.SeedSequence(config.seed)

    for kind, theta_count in ((LS_A, 2), (LS_B, 3), (LS_C, 4)):
        per_method: dict[str, list[dict]] = {
            METHOD: [], BASELINE_NAIVE: [], BASELINE_LINEAR_ALL: [], BASELINE_TREE: [],
        }
        for i, seq in enumerate(root.spawn(config.datasets)):
            seeds = seq.generate_state(3)
            rng = np.random.default_rng(int(seeds[0]))
            thetas = _draw_thetas(rng, theta_count, config.theta_low, config.theta_high)
            spec = DgpSpec(kind=kind, thetas=thetas, seed=int(seeds[1]))
            data = sample_dgp(spec, config.train_n)
            queries = generate_queries(spec, config.queries, seed=int(seeds[2]))
            truth = np.array([q.true_te for q in queries])
            deltas = np.array([q.x2_to - q.x2_from for q in queries])

            try:
                method = _fit_method(kind, data)
                per_method[METHOD].append(mse_r2(method.slope * deltas, truth))
            except PerfceError as exc:
                report.failures.append(
                    {"kind": kind, "dataset": i, "method": METHOD, "error": str(exc)}
                )
            per_method[BASELINE_NAIVE].append(
                mse_r2(_naive_slope(data) * deltas, truth))
            per_method[BASELINE_LINEAR_ALL].append(
                mse_r2(_all_columns_slope(data) * deltas, truth))
            per_method[BASELINE_TREE].append(
                mse_r2(_tree_effects(data, queries, config.tree_depth), truth))

        report.results[kind] = {
            name: _aggregate(stats) for name, stats in per_method.items()
        }
    return report


def _aggregate(stats: list[dict]) -> dict:
    if not stats:
        return {"datasets": 0}
    mses = np.array([s["mse"] for s in stats])
    r2s = np.array([s["r2"] for s in stats if s["r2"] is not None])
    return {
        "datasets": len(stats),
        "mse_mean": float(mses.mean()),
        "mse_std": float(mses.std()),
        "r2_mean": float(r2s.mean()) if r2s.size else None,
        "r2_std": float(r2s.std()) if r2s.size else None,
    }


# -- diagnosis ranking study ---------------------------------------------------

def rca_recall_study(system: SystemSpec, sem: Sem, anomalies: int, k: int,
                     seed: int = 0, target: str = "tps",
                     anomaly_duration_s: float = 60.0) -> dict:
    """Seeded anomaly episodes cycled through the catalog, scored top-k
    against the simulator's ground-truth root causes."""
    if anomalies < 1:
        raise ValueError("anomalies must be >= 1")
    kinds = sorted(system.anomaly_catalog)
    root = np.random.SeedSequence(seed)
    recalls = []
    ndcgs = []
    episodes = []
    for i, seq in enumerate(root.spawn(anomalies)):
        kind = kinds[i % len(kinds)]
        trace, truth = inject_anomaly(
            system, kind, duration_s=anomaly_duration_s,
            seed=int(seq.generate_state(1)[0]),
        )
        window = next(s for s in trace.segments if s.kind == "anomaly")
        snapshot = snapshot_from_window(trace, window.start, window.end)
        diagnosis = root_cause_analysis(sem, snapshot, target)
        ranked = tuple(e.kpi for e in diagnosis.entries)
        hit = len(set(ranked[:k]) & truth)
        recalls.append(hit / len(truth))
        ndcgs.append(ndcg(RankingCase(ranked=ranked, relevant=frozenset(truth))))
        episodes.append({
            "kind": kind,
            "ground_truth": sorted(truth),
            "top_k": list(ranked[:k]),
            "recall": hit / len(truth),
        })
    return {
        "episodes": episodes,
        "recall_at_k": float(np.mean(recalls)),
        "mean_ndcg": float(np.mean(ndcgs)),
        "k": k,
        "target": target,
    }


def train_sem_for_system(system: SystemSpec, seed: int = 0,
                         use_true_graph: bool = True,
                         restarts: int = 10) -> Sem:
    """Protocol trace + parameter fit for a system; optionally learn the
    graph from the trace instead of using the system's ground truth."""
    trace = run_chaos_protocol(system, default_manifest(system), seed=seed)
    if use_true_graph:
        graph = system.graph
    else:
        from .structure import GraphLearner

        graph = GraphLearner(restarts=restarts, seed=seed).fit(trace).graph_
    return fit_sem(trace, graph, seed=seed)
