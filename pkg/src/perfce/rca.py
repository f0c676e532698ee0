"""Online engine: counterfactual propagation and blame-ranked diagnosis.

A counterfactual sets one ancestor to a hypothetical value and pushes the
change through the graph in topological order, adding each node's total
treatment effect from its parents. Blame compares the outcome's density
at the counterfactual prediction against the observed value: a candidate
whose "normalization" makes the outcome more probable gets the credit.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dataset import KIND_CHAOS, Dataset
from .density import pdf
from .errors import NotAnAncestor, UnknownNode, UnquantifiedEdge
from .graph import ancestors, descendants, topological_sort
from .effects import estimate_ate
from .sem import Sem


@dataclass(frozen=True)
class KpiSnapshot:
    """Observed KPI vector, e.g. per-second sample or window mean."""

    values: dict
    window: tuple[int, int] | None = None

    def __post_init__(self):
        bad = [k for k, v in self.values.items() if not np.isfinite(v)]
        if bad:
            raise ValueError(f"non-finite snapshot values for {', '.join(bad)}")


@dataclass(frozen=True)
class BlameEntry:
    """One candidate root cause: density-difference blame plus the
    counterfactual outcome that produced it."""

    kpi: str
    blame: float
    counterfactual_y: float


@dataclass(frozen=True)
class Diagnosis:
    target: str
    observed_y: float
    entries: tuple[BlameEntry, ...]


def snapshot_from_window(dataset: Dataset, start: int, end: int) -> KpiSnapshot:
    """Window-mean snapshot over rows [start, end)."""
    if not 0 <= start < end <= dataset.n_rows:
        raise ValueError(f"window [{start}, {end}) out of range")
    values = {
        name: float(dataset.column(name)[start:end].mean())
        for name in dataset.column_names
    }
    return KpiSnapshot(values=values, window=(start, end))


def _require_nodes(sem: Sem, snapshot: KpiSnapshot) -> None:
    missing = [n for n in sem.graph.nodes if n not in snapshot.values]
    if missing:
        raise UnknownNode(f"snapshot missing KPIs: {', '.join(missing)}")


def total_te(sem: Sem, node: str, x_hat: dict, x: dict) -> float:
    """Sum of the parents' treatment effects moving from x to x_hat.

    An unquantified edge contributes nothing while its parent is
    unchanged (any effect function gives ATE(x -> x) = 0) but raises once
    the parent has actually moved.
    """
    parents = sem.graph.parents(node)
    if not parents:
        raise UnknownNode(f"{node!r} has no parents in the model")
    total = 0.0
    for parent in parents:
        model = sem.node_models[node].effects[parent]
        if model is None:
            if x_hat[parent] != x[parent]:
                raise UnquantifiedEdge(parent, node)
            continue
        total += estimate_ate(model, x[parent], x_hat[parent])
    return total


def whatif(sem: Sem, snapshot: KpiSnapshot, target: str, interventions: dict,
           order=None, _allow_non_ancestor: bool = False):
    """Predict the target under simultaneous interventions.

    Returns ``(y_hat, shifts)`` where shifts maps every updated node to
    its counterfactual minus observed value. ``order`` may override the
    propagation order with any valid topological order (used to check
    order invariance).
    """
    if not interventions:
        raise ValueError("interventions must be non-empty")
    if target not in sem.graph:
        raise UnknownNode(f"target {target!r} not in model")
    _require_nodes(sem, snapshot)
    for name, value in interventions.items():
        if name not in sem.graph:
            raise UnknownNode(f"intervention KPI {name!r} not in model")
        if not np.isfinite(value):
            raise ValueError(f"intervention on {name!r} is not finite")
    if not _allow_non_ancestor:
        target_ancestors = ancestors(sem.graph, target)
        outside = sorted(set(interventions) - target_ancestors)
        if outside:
            raise NotAnAncestor(outside, target)

    topo = list(order) if order is not None else topological_sort(sem.graph)
    if sorted(topo) != sorted(sem.graph.nodes):
        raise ValueError("order must cover exactly the model's nodes")
    position = {n: i for i, n in enumerate(topo)}
    for p, c in sem.graph.edges:
        if position[p] > position[c]:
            raise ValueError("order is not a topological order of the graph")

    affected = set()
    for name in interventions:
        affected |= descendants(sem.graph, name)
    affected -= set(interventions)

    x = dict(snapshot.values)
    x_hat = dict(snapshot.values)
    x_hat.update({k: float(v) for k, v in interventions.items()})
    shifts = {k: x_hat[k] - x[k] for k in interventions}
    for node in topo:
        if node not in affected:
            continue
        x_hat[node] = x[node] + total_te(sem, node, x_hat, x)
        shifts[node] = x_hat[node] - x[node]
        if node == target:
            break
    return x_hat[target], shifts


def counterfactual_predict(sem: Sem, snapshot: KpiSnapshot, target: str,
                           cause: str, x_new: float, order=None) -> float:
    """Predicted target if ``cause`` had been ``x_new`` instead."""
    y_hat, _ = whatif(sem, snapshot, target, {cause: x_new}, order=order)
    return y_hat


def root_cause_analysis(sem: Sem, snapshot: KpiSnapshot, target: str) -> Diagnosis:
    """Rank the target's ancestors by blame.

    Each candidate is counterfactually reset to its baseline mean; its
    blame is the outcome-density gain PDF_Y(y_hat) - PDF_Y(y). Only
    positive blames survive. Chaos variables are never candidates (an
    operator acts on KPIs, not on injected faults); candidates whose
    propagation path crosses an unquantified edge are skipped.
    """
    if target not in sem.graph:
        raise UnknownNode(f"target {target!r} not in model")
    _require_nodes(sem, snapshot)
    y = float(snapshot.values[target])
    density = sem.marginals[target]
    p_observed = pdf(density, y)

    scored = []
    for cause in sorted(ancestors(sem.graph, target)):
        if sem.node_kinds.get(cause) == KIND_CHAOS:
            continue
        try:
            y_hat, _ = whatif(sem, snapshot, target,
                              {cause: sem.baseline_means[cause]})
        except UnquantifiedEdge:
            continue
        blame = pdf(density, y_hat) - p_observed
        if blame > 0.0:
            scored.append(BlameEntry(kpi=cause, blame=blame, counterfactual_y=y_hat))

    scored.sort(key=lambda e: (-e.blame, -abs(e.counterfactual_y - y), e.kpi))
    return Diagnosis(target=target, observed_y=y, entries=tuple(scored))


def diagnosis_payload(diagnosis: Diagnosis, top: int | None = None) -> dict:
    """JSON-ready view of a diagnosis, shared by the CLI and the API."""
    entries = diagnosis.entries if top is None else diagnosis.entries[:top]
    return {
        "target": diagnosis.target,
        "observed_y": diagnosis.observed_y,
        "entries": [
            {
                "kpi": e.kpi,
                "blame": e.blame,
                "y_hat": e.counterfactual_y,
                "delta": e.counterfactual_y - diagnosis.observed_y,
            }
            for e in entries
        ],
    }


def whatif_payload(sem: Sem, snapshot: KpiSnapshot, target: str,
                   interventions: dict) -> dict:
    """JSON-ready what-if answer, shared by the CLI and the API."""
    y = float(snapshot.values[target])
    y_hat, shifts = whatif(sem, snapshot, target, interventions)
    return {
        "y": y,
        "y_hat": y_hat,
        "delta": y_hat - y,
        "per_node_shifts": {k: v for k, v in sorted(shifts.items())},
    }
