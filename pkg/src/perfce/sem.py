"""Structural equation model assembly over a causal graph.

Every edge gets its own treatment-effect model, with the estimator chosen
from the local structure: 2SLS when the parent is latent-confounded and a
chaos instrument is configured, DML when co-parents act as observed
confounders, plain OLS for single-parent edges. A failed edge fit is kept
as "unquantified" instead of aborting the whole model.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np
from sklearn.base import BaseEstimator

from .dataset import Dataset
from .density import DensityModel, fit_kde
from .effects import AteModel, RegressorSpec, fit_dml, fit_iv, fit_ols
from .errors import DegenerateData, PerfceError, SchemaError
from .graph import CausalGraph, topological_sort
from .validation import require_columns


@dataclass(frozen=True)
class StructuralModel:
    """One node's equation: effects of its parents plus Gaussian residual."""

    node: str
    parents: tuple[str, ...]
    effects: dict  # parent -> AteModel | None (None = unquantified edge)
    intercept: float
    noise_scale: float

    def __post_init__(self):
        if set(self.effects) != set(self.parents):
            raise SchemaError(f"effects keys for {self.node!r} must equal parents")
        if not np.isfinite(self.noise_scale) or self.noise_scale < 0:
            raise SchemaError(f"noise_scale for {self.node!r} must be finite and >= 0")


@dataclass(frozen=True)
class Sem:
    """Fitted model: graph + per-node equations, marginals and normal means."""

    graph: CausalGraph
    node_models: dict  # node -> StructuralModel, for every non-root node
    marginals: dict  # node -> DensityModel
    baseline_means: dict  # node -> float
    node_kinds: dict = field(default_factory=dict)  # node -> kpi | chaos-variable
    unquantified: tuple = ()  # (parent, child, reason) triples

    def __post_init__(self):
        non_roots = {n for n in self.graph.nodes if self.graph.parents(n)}
        if set(self.node_models) != non_roots:
            raise SchemaError("node_models keys must be the non-root nodes")
        for node, model in self.node_models.items():
            if tuple(model.parents) != tuple(self.graph.parents(node)):
                raise SchemaError(f"parent list mismatch for {node!r}")
        missing = [n for n in self.graph.nodes if n not in self.baseline_means]
        if missing:
            raise SchemaError(f"baseline_means missing for {', '.join(missing)}")

    def effect(self, parent: str, child: str) -> AteModel | None:
        return self.node_models[child].effects[parent]


def fit_sem(dataset: Dataset, graph: CausalGraph, instrument_map=None,
            latent=None, regressor: RegressorSpec | None = None,
            seed: int = 0) -> Sem:
    """Fit every edge of ``graph`` on ``dataset`` and assemble the SEM.

    ``instrument_map`` maps a treatment KPI to its chaos-variable
    instrument; ``latent`` is the set of treatments flagged as
    latent-confounded (defaults to the instrument map's keys, since the
    map is only consulted for flagged treatments).
    """
    require_columns(dataset, graph.nodes)
    topological_sort(graph)  # rejects cyclic input early
    instrument_map = dict(instrument_map or {})
    latent = set(latent) if latent is not None else set(instrument_map)

    baseline = dataset.baseline_mask()
    if not baseline.any():
        raise DegenerateData("dataset has segment labels but no baseline segment")

    node_models = {}
    failures = []
    for node in graph.nodes:
        parents = graph.parents(node)
        if not parents:
            continue
        effects = {}
        for parent in parents:
            try:
                effects[parent] = _fit_edge(
                    dataset, parent, node, parents, instrument_map, latent,
                    regressor, seed,
                )
            except PerfceError as exc:
                effects[parent] = None
                failures.append((parent, node, f"{type(exc).__name__}: {exc}"))
        node_models[node] = _assemble_node(dataset, node, parents, effects)

    marginals = {}
    means = {}
    for node in graph.nodes:
        values = dataset.column(node)[baseline]
        means[node] = float(values.mean())
        marginals[node] = fit_kde(values, seed=seed)

    kinds = {n: dataset.meta(n).kind for n in graph.nodes}
    return Sem(
        graph=graph,
        node_models=node_models,
        marginals=marginals,
        baseline_means=means,
        node_kinds=kinds,
        unquantified=tuple(failures),
    )


def _fit_edge(dataset, parent, child, parents, instrument_map, latent,
              regressor, seed) -> AteModel:
    if parent in latent and parent in instrument_map:
        instrument = instrument_map[parent]
        return fit_iv(_quiet_rows(dataset, instrument), instrument, parent, child)
    co_parents = tuple(p for p in parents if p != parent)
    if co_parents:
        return fit_dml(dataset, parent, child, co_parents,
                       regressor=regressor, seed=seed)
    return fit_ols(dataset, parent, child)


def _quiet_rows(dataset: Dataset, instrument: str) -> Dataset:
    """Rows where no chaos variable other than the instrument is active.

    Protocol traces sweep one variable at a time, which anti-correlates
    chaos columns across the full trace and leaks other variables'
    effects into the Wald ratio; restricting to the instrument's own
    windows plus baseline restores the exclusion restriction.
    """
    from .dataset import KIND_CHAOS

    others = [
        c.name for c in dataset.columns
        if c.kind == KIND_CHAOS and c.name != instrument
    ]
    if not others:
        return dataset
    mask = np.ones(dataset.n_rows, dtype=bool)
    for name in others:
        mask &= dataset.column(name) == 0.0
    if mask.all():
        return dataset
    if not mask.any():
        raise DegenerateData(
            f"no rows free of chaos variables other than {instrument!r}"
        )
    return Dataset(dataset.columns, dataset.values[mask])


def _effect_values(model: AteModel, x: np.ndarray) -> np.ndarray:
    acc = np.zeros_like(x)
    for k, c in enumerate(model.coeffs, start=1):
        acc += c * x**k
    return acc


def _assemble_node(dataset, node, parents, effects) -> StructuralModel:
    y = dataset.column(node)
    explained = np.zeros_like(y)
    for parent, model in effects.items():
        if model is None:
            continue
        explained += _effect_values(model, dataset.column(parent))
    residual = y - explained
    intercept = float(residual.mean())
    noise = float(np.std(residual - intercept))
    return StructuralModel(
        node=node,
        parents=tuple(parents),
        effects=effects,
        intercept=intercept,
        noise_scale=noise,
    )


class SemLearner(BaseEstimator):
    """Estimator-style wrapper around :func:`fit_sem`.

    Parameters mirror the function; after ``fit`` the model is available
    as ``sem_``.
    """

    def __init__(self, graph=None, instruments=None, latent=None,
                 regressor=None, seed=0):
        self.graph = graph
        self.instruments = instruments
        self.latent = latent
        self.regressor = regressor
        self.seed = seed

    def fit(self, X: Dataset, y=None):
        if self.graph is None:
            raise ValueError("SemLearner needs a graph; fit a GraphLearner first")
        self.sem_ = fit_sem(
            X, self.graph, instrument_map=self.instruments,
            latent=self.latent, regressor=self.regressor, seed=self.seed,
        )
        return self


# -- serialization -----------------------------------------------------------

def sem_to_json(sem: Sem) -> str:
    payload = {
        "graph": {
            "nodes": list(sem.graph.nodes),
            "edges": [list(e) for e in sorted(sem.graph.edges)],
        },
        "node_kinds": sem.node_kinds,
        "baseline_means": sem.baseline_means,
        "node_models": {
            node: {
                "parents": list(m.parents),
                "intercept": m.intercept,
                "noise_scale": m.noise_scale,
                "effects": {
                    parent: _ate_to_dict(eff) for parent, eff in m.effects.items()
                },
            }
            for node, m in sem.node_models.items()
        },
        "marginals": {
            node: {
                "samples": [float(s) for s in d.samples],
                "bandwidth": d.bandwidth,
            }
            for node, d in sem.marginals.items()
        },
        "unquantified": [list(t) for t in sem.unquantified],
    }
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def sem_from_json(text: str) -> Sem:
    try:
        payload = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"sem JSON malformed: {exc}") from exc
    try:
        graph = CausalGraph(
            payload["graph"]["nodes"],
            [tuple(e) for e in payload["graph"]["edges"]],
        )
        node_models = {
            node: StructuralModel(
                node=node,
                parents=tuple(m["parents"]),
                effects={
                    parent: _ate_from_dict(d) for parent, d in m["effects"].items()
                },
                intercept=float(m["intercept"]),
                noise_scale=float(m["noise_scale"]),
            )
            for node, m in payload["node_models"].items()
        }
        marginals = {
            node: DensityModel(
                samples=np.asarray(d["samples"], dtype=float),
                bandwidth=float(d["bandwidth"]),
            )
            for node, d in payload["marginals"].items()
        }
        return Sem(
            graph=graph,
            node_models=node_models,
            marginals=marginals,
            baseline_means={k: float(v) for k, v in payload["baseline_means"].items()},
            node_kinds=payload.get("node_kinds", {}),
            unquantified=tuple(tuple(t) for t in payload.get("unquantified", [])),
        )
    except (KeyError, TypeError) as exc:
        raise SchemaError(f"sem JSON missing field: {exc}") from exc


def _ate_to_dict(model: AteModel | None):
    if model is None:
        return None
    return {
        "treatment": model.treatment,
        "outcome": model.outcome,
        "estimator": model.estimator,
        "coeffs": list(model.coeffs),
        "adjustments": list(model.adjustments),
        "diagnostics": model.diagnostics,
    }


def _ate_from_dict(d) -> AteModel | None:
    if d is None:
        return None
    return AteModel(
        treatment=d["treatment"],
        outcome=d["outcome"],
        estimator=d["estimator"],
        coeffs=tuple(float(c) for c in d["coeffs"]),
        adjustments=tuple(d["adjustments"]),
        diagnostics=d.get("diagnostics", {}),
    )
