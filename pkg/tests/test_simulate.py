import numpy as np
import pytest

import perfce as p
from perfce.errors import SchemaError, UnknownAnomalyKind, UnknownChaosVariable
from perfce.simulate import ChaosExperiment, ExperimentManifest


def test_ls_a_residual_is_zero_mean():
    spec = p.DgpSpec("LS_A", (1.0, 2.0), seed=3)
    d = p.sample_dgp(spec, 5000)
    residual = d.column("Y") - 1.0 * d.column("X1") - 2.0 * d.column("X2")
    # residual is the Uniform(-1,1) noise: sd of its mean is (1/sqrt(3))/sqrt(n)
    assert abs(residual.mean()) < 3 * (1 / np.sqrt(3)) / np.sqrt(5000)


def test_ls_a_treatments_uncorrelated():
    d = p.sample_dgp(p.DgpSpec("LS_A", (1.0, 2.0), seed=1), 5000)
    r = np.corrcoef(d.column("X1"), d.column("X2"))[0, 1]
    assert abs(r) < 0.05


def test_ls_c_hides_the_latent_confounder():
    d = p.sample_dgp(p.DgpSpec("LS_C", (1.0, 1.0, 1.0, 2.0), seed=0), 100)
    assert d.column_names == ("IV", "X2", "Y")
    assert d.meta("IV").kind == "chaos-variable"


def test_dgp_bounds_and_mean_drift():
    for kind, thetas in (("LS_A", (1.0, 2.0)), ("LS_B", (1.0, 1.0, 2.0)),
                         ("LS_C", (1.0, 1.0, 1.0, 2.0))):
        d = p.sample_dgp(p.DgpSpec(kind, thetas, seed=8), 5000)
        exogenous = "X1" if kind != "LS_C" else "IV"
        col = d.column(exogenous)
        assert col.min() >= -1.0 and col.max() <= 1.0
        assert abs(col.mean()) < 3 / np.sqrt(5000) * (2 / np.sqrt(12))


def test_dgp_determinism():
    spec = p.DgpSpec("LS_B", (0.7, -1.2, 1.9), seed=21)
    a = p.sample_dgp(spec, 500)
    b = p.sample_dgp(spec, 500)
    assert np.array_equal(a.values, b.values)


def test_ls_b_confounding_is_real():
    theta1 = 1.3
    d = p.sample_dgp(p.DgpSpec("LS_B", (theta1, 1.0, 2.0), seed=12), 5000)
    cov = np.cov(d.column("X1"), d.column("X2"))[0, 1]
    assert cov == pytest.approx(theta1 / 3, rel=0.1)


def test_dgp_spec_validation():
    with pytest.raises(SchemaError):
        p.DgpSpec("LS_A", (1.0, 2.0, 3.0))
    with pytest.raises(SchemaError):
        p.DgpSpec("LS_B", (1.0, 0.0, 2.0))
    with pytest.raises(SchemaError):
        p.DgpSpec("LS_X", (1.0,))


def test_queries_analytic_effects():
    qs = p.generate_queries(p.DgpSpec("LS_A", (1.0, 2.0), seed=0), 200, seed=4)
    for q in qs:
        assert q.true_te == pytest.approx(2.0 * (q.x2_to - q.x2_from))
    # hand case: moving 0 -> 1 under theta2 = 2 is exactly 2
    assert 2.0 * (1.0 - 0.0) == 2.0
    qs_b = p.generate_queries(p.DgpSpec("LS_B", (1.0, 1.0, 1.5), seed=0), 50, seed=1)
    for q in qs_b:
        # Y-equation difference: only the treatment term moves
        assert q.true_te == pytest.approx(1.5 * (q.x2_to - q.x2_from))


def test_query_with_no_change_has_zero_effect():
    q = p.CounterfactualQuery(x1=0.2, x2_from=0.5, x2_to=0.5, true_te=0.0)
    assert q.true_te == 0.0


def test_low_sensitivity_variable_gets_three_chaos_segments(system):
    manifest = ExperimentManifest(
        (ChaosExperiment("chaos_workload",
                         levels=tuple(100 * (i + 1) / 3 for i in range(3)),
                         duration_s=20, suspend_s=10),),
        baseline_s=60,
    )
    trace = p.run_chaos_protocol(system, manifest, seed=0)
    chaos_segments = [s for s in trace.segments if s.kind == "chaos"]
    assert len(chaos_segments) == 3
    assert {s.variable for s in chaos_segments} == {"chaos_workload"}


def test_default_manifest_levels_per_sensitivity(system):
    manifest = p.default_manifest(system)
    by_var = {e.variable: e for e in manifest.experiments}
    assert len(by_var["chaos_cpu_stress"].levels) == 5  # high sensitivity
    assert len(by_var["chaos_workload"].levels) == 3  # low sensitivity
    assert len(by_var["chaos_memory_stress"].levels) == 1  # direct fault


def test_levels_equally_spaced(system):
    for e in p.default_manifest(system).experiments:
        diffs = np.diff(e.levels)
        if len(diffs) > 1:
            assert np.ptp(diffs) <= 1e-12


def test_empty_manifest_is_pure_baseline(system):
    trace = p.run_chaos_protocol(system, ExperimentManifest((), baseline_s=50), seed=1)
    assert len(trace.segments) == 1
    assert trace.segments[0].kind == "baseline"
    for var in system.chaos_names:
        assert np.all(trace.column(var) == 0.0)


def test_segment_bookkeeping_matches_level_counts(system):
    manifest = p.default_manifest(system)
    trace = p.run_chaos_protocol(system, manifest, seed=2)
    chaos_segments = [s for s in trace.segments if s.kind == "chaos"]
    assert len(chaos_segments) == sum(len(e.levels) for e in manifest.experiments)


def test_cpu_stress_raises_query_duration(system, protocol_trace):
    qd = protocol_trace.column("query_duration")
    base = qd[protocol_trace.baseline_mask()].mean()
    top = [s for s in protocol_trace.segments
           if s.kind == "chaos" and s.variable == "chaos_cpu_stress"][-1]
    assert qd[top.start:top.end].mean() > base


def test_protocol_determinism(system):
    manifest = p.default_manifest(system)
    a = p.run_chaos_protocol(system, manifest, seed=9)
    b = p.run_chaos_protocol(system, manifest, seed=9)
    assert np.array_equal(a.values, b.values)
    assert a.segments == b.segments


def test_unknown_manifest_variable(system):
    bad = ExperimentManifest(
        (ChaosExperiment("chaos_nope", (1.0, 2.0, 3.0)),), baseline_s=10)
    with pytest.raises(UnknownChaosVariable):
        p.run_chaos_protocol(system, bad, seed=0)


def test_network_loss_ground_truth_is_net_family(system):
    _, truth = p.inject_anomaly(system, "network_loss", duration_s=30, seed=0)
    assert "net_delay" in truth


def test_anomaly_duration_must_be_positive(system):
    with pytest.raises(ValueError):
        p.inject_anomaly(system, "cpu_stress", duration_s=0, seed=0)


def test_memory_stress_depresses_mem_free(system):
    trace, truth = p.inject_anomaly(system, "memory_stress", duration_s=60, seed=5)
    assert truth == {"mem_free"}
    seg = next(s for s in trace.segments if s.kind == "anomaly")
    mem = trace.column("mem_free")
    assert mem[seg.start:seg.end].mean() < mem[trace.baseline_mask()].mean()


def test_anomaly_trace_hides_the_trigger(system):
    trace, _ = p.inject_anomaly(system, "cpu_stress", duration_s=30, seed=1)
    for var in system.chaos_names:
        assert np.all(trace.column(var) == 0.0)


def test_unknown_anomaly_kind(system):
    with pytest.raises(UnknownAnomalyKind):
        p.inject_anomaly(system, "martian_invasion", duration_s=10, seed=0)


def test_anomaly_catalog_covers_component_families(system):
    kinds = set(system.anomaly_catalog)
    assert {"workload_spike", "io_saturation", "io_latency", "io_fault",
            "network_delay", "network_partition", "memory_stress", "cpu_stress",
            "database_backup", "database_restore", "database_flush"} <= kinds


def test_system_json_round_trip(system):
    from perfce.simulate import system_from_json, system_to_json

    back = system_from_json(system_to_json(system))
    assert back.graph.nodes == system.graph.nodes
    assert back.graph.edges == system.graph.edges
    assert back.coefficients == system.coefficients
    assert back.anomaly_catalog == system.anomaly_catalog


def test_manifest_json_round_trip(system):
    from perfce.simulate import manifest_from_json, manifest_to_json

    manifest = p.default_manifest(system)
    back = manifest_from_json(manifest_to_json(manifest))
    assert back == manifest
