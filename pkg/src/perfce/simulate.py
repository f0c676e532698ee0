"""All training and evaluation data comes from here.

Three generators:

* ``sample_dgp`` - the three synthetic local structures (no confounder,
  observable confounder, latent confounder with an instrument), with
  known treatment coefficients for ground-truth counterfactual queries.
* ``run_chaos_protocol`` - drives a simulated KPI system through a chaos
  experiment schedule (baseline, then per-variable level sweeps with
  suspend gaps) and records every column at 1 Hz.
* ``inject_anomaly`` - seeds one labeled anomaly episode with a known set
  of root-cause KPIs; the triggering fault is hidden from the trace.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .dataset import (
    KIND_CHAOS,
    KIND_KPI,
    SEGMENT_ANOMALY,
    SEGMENT_BASELINE,
    SEGMENT_CHAOS,
    Dataset,
    KpiMeta,
    SegmentLabel,
)
from .errors import SchemaError, UnknownAnomalyKind, UnknownChaosVariable
from .graph import CausalGraph, topological_sort

LS_A = "LS_A"  # no confounder
LS_B = "LS_B"  # observable confounder
LS_C = "LS_C"  # latent confounder + instrument

_THETA_COUNT = {LS_A: 2, LS_B: 3, LS_C: 4}
# Index of the coefficient that multiplies the treatment X2 in Y's equation.
_TREATMENT_THETA = {LS_A: 1, LS_B: 2, LS_C: 3}


@dataclass(frozen=True)
class DgpSpec:
    kind: str
    thetas: tuple[float, ...]
    seed: int = 0

    def __post_init__(self):
        if self.kind not in _THETA_COUNT:
            raise SchemaError(f"unknown DGP kind {self.kind!r}")
        object.__setattr__(self, "thetas", tuple(float(t) for t in self.thetas))
        want = _THETA_COUNT[self.kind]
        if len(self.thetas) != want:
            raise SchemaError(f"{self.kind} needs {want} thetas, got {len(self.thetas)}")
        if any(not np.isfinite(t) or t == 0.0 for t in self.thetas):
            raise SchemaError("thetas must be finite and nonzero")

    @property
    def treatment_theta(self) -> float:
        return self.thetas[_TREATMENT_THETA[self.kind]]


@dataclass(frozen=True)
class CounterfactualQuery:
    x1: float
    x2_from: float
    x2_to: float
    true_te: float


def sample_dgp(spec: DgpSpec, n: int) -> Dataset:
    """Draw ``n`` iid samples from the requested local structure.

    All exogenous draws are Uniform(-1, 1). The latent-confounder
    structure generates X1 internally but omits it from the output; the
    instrument column carries the chaos-variable kind so it is accepted
    by the 2SLS fitter.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    rng = np.random.default_rng(spec.seed)
    u = lambda: rng.uniform(-1.0, 1.0, size=n)  # noqa: E731

    th = spec.thetas
    if spec.kind == LS_A:
        x1, x2, eps = u(), u(), u()
        y = th[0] * x1 + th[1] * x2 + eps
        cols = [KpiMeta("X1"), KpiMeta("X2"), KpiMeta("Y")]
        data = np.column_stack([x1, x2, y])
    elif spec.kind == LS_B:
        x1, eta, eps = u(), u(), u()
        x2 = th[0] * x1 + eta
        y = th[1] * x1 + th[2] * x2 + eps
        cols = [KpiMeta("X1"), KpiMeta("X2"), KpiMeta("Y")]
        data = np.column_stack([x1, x2, y])
    else:  # LS_C
        iv, x1, eta, eps = u(), u(), u(), u()
        x2 = th[0] * x1 + th[1] * iv + eta
        y = th[2] * x1 + th[3] * x2 + eps
        cols = [KpiMeta("IV", kind=KIND_CHAOS), KpiMeta("X2"), KpiMeta("Y")]
        data = np.column_stack([iv, x2, y])
    return Dataset(cols, data)


def generate_queries(spec: DgpSpec, m: int, seed: int) -> list[CounterfactualQuery]:
    """Random what-if queries on X2 with their analytic treatment effects."""
    if m < 1:
        raise ValueError("m must be >= 1")
    rng = np.random.default_rng(seed)
    theta = spec.treatment_theta
    out = []
    for _ in range(m):
        x1, x2_from, x2_to = rng.uniform(-1.0, 1.0, size=3)
        out.append(CounterfactualQuery(
            x1=float(x1), x2_from=float(x2_from), x2_to=float(x2_to),
            true_te=theta * (float(x2_to) - float(x2_from)),
        ))
    return out


# -- simulated KPI system -----------------------------------------------------

BINDING_DIRECT = "direct"
BINDING_CONFIGURABLE = "configurable"


@dataclass(frozen=True)
class ChaosBinding:
    """How one chaos variable enters the system."""

    variable: str
    target: str
    gain: float
    kind: str = BINDING_CONFIGURABLE  # direct | configurable
    sensitivity: str = "low"  # low | high
    valid_range: tuple[float, float] = (0.0, 100.0)

    def __post_init__(self):
        if self.kind not in (BINDING_DIRECT, BINDING_CONFIGURABLE):
            raise SchemaError(f"unknown binding kind {self.kind!r}")
        if self.sensitivity not in ("low", "high"):
            raise SchemaError(f"unknown sensitivity {self.sensitivity!r}")
        lo, hi = self.valid_range
        if not lo < hi:
            raise SchemaError("valid_range must be (lo, hi) with lo < hi")


@dataclass(frozen=True)
class SystemSpec:
    """Ground-truth linear-Gaussian KPI system driven by chaos variables."""

    graph: CausalGraph
    coefficients: dict  # (parent, child) -> gain
    intercepts: dict  # node -> baseline level
    noise_scales: dict  # node -> residual sigma
    bindings: dict  # chaos variable -> ChaosBinding
    anomaly_catalog: dict  # anomaly kind -> tuple of (variable, severity in (0,1])

    def __post_init__(self):
        topological_sort(self.graph)
        kpis = set(self.kpi_names)
        for var, binding in self.bindings.items():
            if var not in self.graph.nodes:
                raise SchemaError(f"chaos variable {var!r} not a graph node")
            if self.graph.parents(var):
                raise SchemaError(f"chaos variable {var!r} must be a root")
            if binding.target not in kpis:
                raise SchemaError(f"binding target {binding.target!r} unknown")
            if self.coefficients.get((var, binding.target)) != binding.gain:
                raise SchemaError(
                    f"binding gain for {var!r} must match the graph edge coefficient"
                )
        for kind, settings in self.anomaly_catalog.items():
            if not settings:
                raise SchemaError(f"anomaly {kind!r} has no chaos settings")
            for var, severity in settings:
                if var not in self.bindings:
                    raise SchemaError(f"anomaly {kind!r} uses unknown variable {var!r}")
                if not 0.0 < severity <= 1.0:
                    raise SchemaError(f"anomaly {kind!r} severity must be in (0, 1]")

    @property
    def chaos_names(self) -> tuple[str, ...]:
        return tuple(n for n in self.graph.nodes if n in self.bindings)

    @property
    def kpi_names(self) -> tuple[str, ...]:
        return tuple(n for n in self.graph.nodes if n not in self.bindings)

    def ground_truth(self, kind: str) -> set[str]:
        """KPIs directly driven by the chaos variables behind an anomaly."""
        if kind not in self.anomaly_catalog:
            raise UnknownAnomalyKind(f"no anomaly kind {kind!r}")
        return {self.bindings[var].target for var, _ in self.anomaly_catalog[kind]}


@dataclass(frozen=True)
class ChaosExperiment:
    variable: str
    levels: tuple[float, ...]
    duration_s: float = 60.0
    suspend_s: float = 30.0

    def __post_init__(self):
        if self.duration_s <= 0 or self.suspend_s <= 0:
            raise SchemaError("durations must be > 0")
        diffs = np.diff(self.levels)
        if len(self.levels) > 1 and np.ptp(diffs) > 1e-12:
            raise SchemaError("levels must be equally spaced")


@dataclass(frozen=True)
class ExperimentManifest:
    experiments: tuple[ChaosExperiment, ...]
    baseline_s: float = 300.0

    def __post_init__(self):
        if self.baseline_s <= 0:
            raise SchemaError("baseline_s must be > 0")


def default_manifest(system: SystemSpec, baseline_s: float = 300.0,
                     duration_s: float = 60.0, suspend_s: float = 30.0) -> ExperimentManifest:
    """One sweep per chaos variable: the valid range is divided equally into
    3 levels (low sensitivity) or 5 (high); direct variables fire once at
    full strength."""
    experiments = []
    for var in sorted(system.bindings):
        binding = system.bindings[var]
        lo, hi = binding.valid_range
        if binding.kind == BINDING_DIRECT:
            levels = (hi,)
        else:
            k = 5 if binding.sensitivity == "high" else 3
            levels = tuple(lo + (hi - lo) * (i + 1) / k for i in range(k))
        experiments.append(ChaosExperiment(var, levels, duration_s, suspend_s))
    return ExperimentManifest(tuple(experiments), baseline_s)


def _forward_sample(system: SystemSpec, chaos_tracks: dict, n: int,
                    rng: np.random.Generator) -> dict:
    """Sample every node column given the chaos variable time series.

    Each KPI is its intercept plus gain-weighted deviations of its
    parents from their own baselines, plus Gaussian noise; chaos columns
    are the deterministic schedule.
    """
    values: dict[str, np.ndarray] = {}
    baseline_of = {n_: system.intercepts.get(n_, 0.0) for n_ in system.graph.nodes}
    for node in topological_sort(system.graph):
        if node in system.bindings:
            values[node] = chaos_tracks[node]
            continue
        level = np.full(n, system.intercepts[node])
        for parent in system.graph.parents(node):
            gain = system.coefficients[(parent, node)]
            level = level + gain * (values[parent] - baseline_of[parent])
        sigma = system.noise_scales[node]
        values[node] = level + sigma * rng.standard_normal(n)
    return values


def run_chaos_protocol(system: SystemSpec, manifest: ExperimentManifest,
                       seed: int = 0) -> Dataset:
    """Baseline, then per experiment per level: a chaos window followed by
    a suspend (baseline) window. 1 Hz rows; deterministic given the seed."""
    for exp in manifest.experiments:
        binding = system.bindings.get(exp.variable)
        if binding is None:
            raise UnknownChaosVariable(f"manifest variable {exp.variable!r} unknown")
        if binding.kind == BINDING_CONFIGURABLE and not 3 <= len(exp.levels) <= 5:
            raise SchemaError(
                f"configurable variable {exp.variable!r} needs 3-5 levels"
            )

    segments: list[SegmentLabel] = []
    windows: list[tuple[str, float, int, int]] = []  # variable, value, start, end
    t = int(round(manifest.baseline_s))
    segments.append(SegmentLabel(SEGMENT_BASELINE, 0, t))
    for exp in manifest.experiments:
        for li, level in enumerate(exp.levels):
            d = int(round(exp.duration_s))
            s = int(round(exp.suspend_s))
            segments.append(SegmentLabel(SEGMENT_CHAOS, t, t + d,
                                         variable=exp.variable, level=li))
            windows.append((exp.variable, float(level), t, t + d))
            segments.append(SegmentLabel(SEGMENT_BASELINE, t + d, t + d + s))
            t += d + s
    n = t

    chaos_tracks = {var: np.zeros(n) for var in system.chaos_names}
    for var, value, start, end in windows:
        chaos_tracks[var][start:end] = value

    rng = np.random.default_rng(seed)
    values = _forward_sample(system, chaos_tracks, n, rng)
    return _as_dataset(system, values, segments)


def inject_anomaly(system: SystemSpec, kind: str, duration_s: float,
                   seed: int = 0, baseline_s: float = 120.0):
    """One anomaly episode with known root causes.

    Returns ``(trace, ground_truth)``. The catalog's chaos settings drive
    the target KPIs internally, but the recorded chaos columns stay zero:
    online faults are not observable experiments.
    """
    if duration_s <= 0:
        raise ValueError("duration_s must be > 0")
    settings = system.anomaly_catalog.get(kind)
    if settings is None:
        raise UnknownAnomalyKind(f"no anomaly kind {kind!r}")

    b = int(round(baseline_s))
    d = int(round(duration_s))
    n = b + d
    segments = [
        SegmentLabel(SEGMENT_BASELINE, 0, b),
        SegmentLabel(SEGMENT_ANOMALY, b, n, anomaly_kind=kind),
    ]
    chaos_tracks = {var: np.zeros(n) for var in system.chaos_names}
    for var, severity in settings:
        lo, hi = system.bindings[var].valid_range
        chaos_tracks[var][b:n] = lo + severity * (hi - lo)

    rng = np.random.default_rng(seed)
    values = _forward_sample(system, chaos_tracks, n, rng)
    for var in system.chaos_names:
        values[var] = np.zeros(n)  # hide the trigger
    return _as_dataset(system, values, segments), system.ground_truth(kind)


def _as_dataset(system: SystemSpec, values: dict, segments) -> Dataset:
    columns = [
        KpiMeta(n, kind=KIND_CHAOS if n in system.bindings else KIND_KPI)
        for n in system.graph.nodes
    ]
    matrix = np.column_stack([values[c.name] for c in columns])
    return Dataset(columns, matrix, segments)


# -- default 20-KPI / 5-chaos-variable system ---------------------------------

_DEFAULT_EDGES = {
    ("chaos_cpu_stress", "cpu_load"): 0.4,
    ("chaos_io_stress", "io_latency"): 0.35,
    ("chaos_network_delay", "net_delay"): 0.5,
    ("chaos_memory_stress", "mem_free"): -0.45,
    ("chaos_workload", "qps"): 0.6,
    ("swap_activity", "cpu_load"): 0.3,
    ("mem_free", "mem_page_faults"): -0.6,
    ("mem_free", "swap_activity"): -0.7,
    ("io_latency", "io_queue_depth"): 0.8,
    ("qps", "io_queue_depth"): 0.3,
    ("net_delay", "net_retrans"): 0.7,
    ("cpu_load", "threads_running"): 0.5,
    ("qps", "threads_running"): 0.5,
    ("qps", "lock_waits"): 0.4,
    ("io_latency", "lock_waits"): 0.5,
    ("io_queue_depth", "io_throughput"): -0.6,
    ("qps", "io_throughput"): 0.7,
    ("mem_free", "buffer_hit_ratio"): 0.5,
    ("io_latency", "buffer_hit_ratio"): -0.4,
    ("net_delay", "net_throughput"): -0.5,
    ("qps", "net_throughput"): 0.6,
    ("threads_running", "connections_active"): 0.8,
    ("io_latency", "checkpoint_age"): 0.6,
    ("qps", "checkpoint_age"): 0.3,
    ("lock_waits", "slow_queries"): 0.5,
    ("io_latency", "slow_queries"): 0.4,
    ("cpu_load", "slow_queries"): 0.4,
    ("cpu_load", "query_duration"): 0.7,
    ("io_latency", "query_duration"): 0.8,
    ("net_delay", "query_duration"): 0.5,
    ("query_duration", "tps"): -0.8,
    ("qps", "tps"): 0.6,
    ("net_delay", "replication_lag"): 0.5,
    ("io_latency", "replication_lag"): 0.4,
}

_DEFAULT_INTERCEPTS = {
    "cpu_load": 30.0, "io_latency": 8.0, "net_delay": 12.0, "mem_free": 60.0,
    "qps": 200.0, "mem_page_faults": 20.0, "swap_activity": 5.0,
    "io_queue_depth": 10.0, "net_retrans": 4.0, "threads_running": 25.0,
    "lock_waits": 6.0, "io_throughput": 150.0, "buffer_hit_ratio": 90.0,
    "net_throughput": 120.0, "connections_active": 40.0, "checkpoint_age": 30.0,
    "slow_queries": 8.0, "query_duration": 50.0, "tps": 180.0,
    "replication_lag": 15.0,
}

_DEFAULT_NOISE = {
    "cpu_load": 1.5, "io_latency": 1.0, "net_delay": 1.2, "mem_free": 1.5,
    "qps": 4.0, "mem_page_faults": 1.2, "swap_activity": 0.8,
    "io_queue_depth": 1.0, "net_retrans": 0.6, "threads_running": 1.5,
    "lock_waits": 0.8, "io_throughput": 3.0, "buffer_hit_ratio": 1.0,
    "net_throughput": 2.5, "connections_active": 1.5, "checkpoint_age": 1.5,
    "slow_queries": 1.0, "query_duration": 2.0, "tps": 3.0,
    "replication_lag": 1.2,
}

_DEFAULT_BINDINGS = {
    "chaos_cpu_stress": ChaosBinding(
        "chaos_cpu_stress", "cpu_load", 0.4, BINDING_CONFIGURABLE, "high"),
    "chaos_io_stress": ChaosBinding(
        "chaos_io_stress", "io_latency", 0.35, BINDING_CONFIGURABLE, "high"),
    "chaos_network_delay": ChaosBinding(
        "chaos_network_delay", "net_delay", 0.5, BINDING_CONFIGURABLE, "low"),
    "chaos_memory_stress": ChaosBinding(
        "chaos_memory_stress", "mem_free", -0.45, BINDING_DIRECT, "low"),
    "chaos_workload": ChaosBinding(
        "chaos_workload", "qps", 0.6, BINDING_CONFIGURABLE, "low"),
}

_DEFAULT_CATALOG = {
    "workload_spike": (("chaos_workload", 1.0),),
    "io_saturation": (("chaos_io_stress", 1.0),),
    "io_latency": (("chaos_io_stress", 0.7),),
    "io_fault": (("chaos_io_stress", 0.9),),
    "network_delay": (("chaos_network_delay", 0.8),),
    "network_partition": (("chaos_network_delay", 1.0),),
    "network_loss": (("chaos_network_delay", 0.9),),
    "memory_stress": (("chaos_memory_stress", 1.0),),
    "cpu_stress": (("chaos_cpu_stress", 1.0),),
    "database_backup": (("chaos_io_stress", 0.8), ("chaos_cpu_stress", 0.6)),
    "database_restore": (("chaos_io_stress", 1.0), ("chaos_cpu_stress", 0.8)),
    "database_flush": (("chaos_io_stress", 0.6), ("chaos_cpu_stress", 0.4)),
}


def default_system() -> SystemSpec:
    """The built-in 20-KPI, 5-chaos-variable database stand-in."""
    kpis = sorted(_DEFAULT_INTERCEPTS)
    chaos = sorted(_DEFAULT_BINDINGS)
    graph = CausalGraph(chaos + kpis, _DEFAULT_EDGES.keys())
    return SystemSpec(
        graph=graph,
        coefficients=dict(_DEFAULT_EDGES),
        intercepts=dict(_DEFAULT_INTERCEPTS),
        noise_scales=dict(_DEFAULT_NOISE),
        bindings=dict(_DEFAULT_BINDINGS),
        anomaly_catalog=dict(_DEFAULT_CATALOG),
    )


# -- JSON documents ------------------------------------------------------------

def system_to_json(system: SystemSpec) -> str:
    payload = {
        "nodes": list(system.graph.nodes),
        "edges": [[p, c, system.coefficients[(p, c)]] for p, c in sorted(system.graph.edges)],
        "intercepts": system.intercepts,
        "noise_scales": system.noise_scales,
        "bindings": {
            var: {
                "target": b.target,
                "gain": b.gain,
                "kind": b.kind,
                "sensitivity": b.sensitivity,
                "valid_range": list(b.valid_range),
            }
            for var, b in system.bindings.items()
        },
        "anomaly_catalog": {
            kind: [[v, s] for v, s in settings]
            for kind, settings in system.anomaly_catalog.items()
        },
    }
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def system_from_json(text: str) -> SystemSpec:
    try:
        payload = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"system JSON malformed: {exc}") from exc
    try:
        edges = [(p, c) for p, c, _ in payload["edges"]]
        return SystemSpec(
            graph=CausalGraph(payload["nodes"], edges),
            coefficients={(p, c): float(g) for p, c, g in payload["edges"]},
            intercepts={k: float(v) for k, v in payload["intercepts"].items()},
            noise_scales={k: float(v) for k, v in payload["noise_scales"].items()},
            bindings={
                var: ChaosBinding(
                    variable=var,
                    target=b["target"],
                    gain=float(b["gain"]),
                    kind=b["kind"],
                    sensitivity=b["sensitivity"],
                    valid_range=tuple(b["valid_range"]),
                )
                for var, b in payload["bindings"].items()
            },
            anomaly_catalog={
                kind: tuple((v, float(s)) for v, s in settings)
                for kind, settings in payload["anomaly_catalog"].items()
            },
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise SchemaError(f"system JSON invalid: {exc}") from exc


def manifest_to_json(manifest: ExperimentManifest) -> str:
    payload = {
        "baseline_s": manifest.baseline_s,
        "experiments": [
            {
                "variable": e.variable,
                "levels": list(e.levels),
                "duration_s": e.duration_s,
                "suspend_s": e.suspend_s,
            }
            for e in manifest.experiments
        ],
    }
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def manifest_from_json(text: str) -> ExperimentManifest:
    try:
        payload = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"manifest JSON malformed: {exc}") from exc
    try:
        return ExperimentManifest(
            experiments=tuple(
                ChaosExperiment(
                    variable=e["variable"],
                    levels=tuple(float(v) for v in e["levels"]),
                    duration_s=float(e["duration_s"]),
                    suspend_s=float(e["suspend_s"]),
                )
                for e in payload["experiments"]
            ),
            baseline_s=float(payload["baseline_s"]),
        )
    except (KeyError, TypeError) as exc:
        raise SchemaError(f"manifest JSON invalid: {exc}") from exc


def load_system(path) -> SystemSpec:
    return system_from_json(Path(path).read_text(encoding="utf-8"))


def load_manifest(path) -> ExperimentManifest:
    return manifest_from_json(Path(path).read_text(encoding="utf-8"))
