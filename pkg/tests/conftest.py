import pytest

import perfce as p


@pytest.fixture(scope="session")
def system():
    return p.default_system()


@pytest.fixture(scope="session")
def protocol_trace(system):
    return p.run_chaos_protocol(system, p.default_manifest(system), seed=7)


@pytest.fixture(scope="session")
def trained_sem(system, protocol_trace):
    return p.fit_sem(protocol_trace, system.graph, seed=0)


@pytest.fixture
def diamond():
    return p.CausalGraph(
        ["A", "B", "C", "D"],
        [("A", "B"), ("A", "C"), ("B", "D"), ("C", "D")],
    )


def random_dag(rng, n_nodes, edge_prob=0.4):
    """Random DAG over letters; edges go from earlier to later in a random order."""
    names = [f"n{i}" for i in range(n_nodes)]
    order = list(names)
    rng.shuffle(order)
    edges = []
    for i, child in enumerate(order):
        for parent in order[:i]:
            if rng.random() < edge_prob:
                edges.append((parent, child))
    return p.CausalGraph(names, edges)


def linear_sem(nodes, edges, slopes, baseline_means=None, y_samples=None,
               unquantified=()):
    """Hand-built SEM with known slopes; no fitting involved."""
    from perfce.sem import Sem, StructuralModel

    graph = p.CausalGraph(nodes, edges)
    node_models = {}
    for node in nodes:
        parents = graph.parents(node)
        if not parents:
            continue
        effects = {}
        for parent in parents:
            if (parent, node) in unquantified:
                effects[parent] = None
            else:
                effects[parent] = p.AteModel(
                    treatment=parent, outcome=node, estimator="ols",
                    coeffs=(slopes[(parent, node)],),
                )
        node_models[node] = StructuralModel(
            node=node, parents=parents, effects=effects,
            intercept=0.0, noise_scale=0.0,
        )
    means = baseline_means or {n: 0.0 for n in nodes}
    marginals = {n: p.fit_kde(y_samples if y_samples is not None else [0.0])
                 for n in nodes}
    return Sem(graph=graph, node_models=node_models, marginals=marginals,
               baseline_means=means)
