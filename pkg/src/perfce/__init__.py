"""Chaos-experiment-driven causal diagnosis of KPI performance anomalies.

Offline: simulate (or load) a chaos-augmented trace, learn a causal graph
and a structural equation model over the KPIs. Online: answer root-cause
and what-if queries against the fitted model.
"""

from .dataset import (
    Dataset,
    KpiMeta,
    SegmentLabel,
    load_dataset,
    save_dataset,
)
from .density import DensityModel, fit_kde, pdf
from .effects import (
    AteModel,
    RegressorSpec,
    estimate_ate,
    fit_dml,
    fit_iv,
    fit_ols,
)
from .errors import PerfceError
from .evaluation import (
    EvalReport,
    RankingCase,
    SyntheticEvalConfig,
    map_at_r,
    mse_r2,
    ndcg,
    rca_recall_study,
    run_synthetic_eval,
    train_sem_for_system,
)
from .graph import (
    CausalGraph,
    ancestors,
    descendants,
    graph_from_json,
    graph_to_dot,
    graph_to_json,
    topological_sort,
)
from .rca import (
    BlameEntry,
    Diagnosis,
    KpiSnapshot,
    counterfactual_predict,
    root_cause_analysis,
    snapshot_from_window,
    total_te,
    whatif,
)
from .sem import Sem, SemLearner, StructuralModel, fit_sem, sem_from_json, sem_to_json
from .simulate import (
    ChaosBinding,
    ChaosExperiment,
    CounterfactualQuery,
    DgpSpec,
    ExperimentManifest,
    SystemSpec,
    default_manifest,
    default_system,
    generate_queries,
    inject_anomaly,
    run_chaos_protocol,
    sample_dgp,
)
from .structure import (
    GraphLearner,
    LocalScoreCache,
    SearchConfig,
    evaluate_graph,
    local_score,
    search_dag,
)

__version__ = "0.1.0"

__all__ = [
    "AteModel", "BlameEntry", "CausalGraph", "ChaosBinding", "ChaosExperiment",
    "CounterfactualQuery", "Dataset", "DensityModel", "DgpSpec", "Diagnosis",
    "EvalReport", "ExperimentManifest", "GraphLearner", "KpiMeta", "KpiSnapshot",
    "LocalScoreCache", "PerfceError", "RankingCase", "RegressorSpec",
    "SearchConfig", "SegmentLabel", "Sem", "SemLearner", "StructuralModel",
    "SyntheticEvalConfig", "SystemSpec", "ancestors", "counterfactual_predict",
    "default_manifest", "default_system", "descendants", "estimate_ate",
    "evaluate_graph", "fit_dml", "fit_iv", "fit_kde", "fit_ols", "fit_sem",
    "generate_queries", "graph_from_json", "graph_to_dot", "graph_to_json",
    "inject_anomaly", "load_dataset", "local_score", "map_at_r", "mse_r2",
    "ndcg", "pdf", "rca_recall_study", "root_cause_analysis",
    "run_chaos_protocol", "run_synthetic_eval", "sample_dgp", "save_dataset",
    "search_dag", "sem_from_json", "sem_to_json", "snapshot_from_window",
    "topological_sort", "total_te", "train_sem_for_system", "whatif",
]
