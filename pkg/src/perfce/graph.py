"""Causal DAG over named KPIs: traversals, validation, JSON/DOT export."""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .errors import CycleDetected, SchemaError, UnknownNode


@dataclass(frozen=True)
class CausalGraph:
    """Directed graph over KPI names. Edges point parent -> child.

    Construction rejects self-loops, undeclared endpoints and duplicate
    nodes; acyclicity is checked by :func:`topological_sort` so that a
    cyclic edge set surfaces as ``CycleDetected`` at the point of use.
    """

    nodes: tuple[str, ...]
    edges: frozenset[tuple[str, str]] = field(default_factory=frozenset)

    def __init__(self, nodes, edges=()):
        object.__setattr__(self, "nodes", tuple(nodes))
        object.__setattr__(self, "edges", frozenset(tuple(e) for e in edges))
        if len(set(self.nodes)) != len(self.nodes):
            raise SchemaError("duplicate node names in graph")
        declared = set(self.nodes)
        for parent, child in self.edges:
            if parent == child:
                raise SchemaError(f"self-loop on {parent!r}")
            if parent not in declared or child not in declared:
                raise SchemaError(f"edge ({parent}, {child}) references undeclared node")

    def __contains__(self, name: str) -> bool:
        return name in set(self.nodes)

    def parents(self, node: str) -> tuple[str, ...]:
        self._require(node)
        return tuple(sorted(p for p, c in self.edges if c == node))

    def children(self, node: str) -> tuple[str, ...]:
        self._require(node)
        return tuple(sorted(c for p, c in self.edges if p == node))

    @property
    def roots(self) -> tuple[str, ...]:
        with_parents = {c for _, c in self.edges}
        return tuple(n for n in self.nodes if n not in with_parents)

    def _require(self, node: str) -> None:
        if node not in set(self.nodes):
            raise UnknownNode(f"node {node!r} not in graph")


def topological_sort(graph: CausalGraph) -> list[str]:
    """Order nodes so every parent precedes its children.

    Kahn's algorithm with a deterministic (declaration-order) tie-break.
    Raises ``CycleDetected`` naming one cycle if the edge set is cyclic.
    """
    indegree = {n: 0 for n in graph.nodes}
    children: dict[str, list[str]] = {n: [] for n in graph.nodes}
    for parent, child in sorted(graph.edges):
        indegree[child] += 1
        children[parent].append(child)

    ready = [n for n in graph.nodes if indegree[n] == 0]
    order: list[str] = []
    while ready:
        node = ready.pop(0)
        order.append(node)
        for child in children[node]:
            indegree[child] -= 1
            if indegree[child] == 0:
                ready.append(child)

    if len(order) < len(graph.nodes):
        raise CycleDetected(_find_cycle(graph, set(graph.nodes) - set(order)))
    return order


def _find_cycle(graph: CausalGraph, suspects: set[str]) -> list[str]:
    # Every unsorted node has an unsorted parent, so walking parent links
    # must revisit a node; the revisited stretch is a directed cycle.
    parents_in: dict[str, list[str]] = {n: [] for n in suspects}
    for p, c in sorted(graph.edges):
        if p in suspects and c in suspects:
            parents_in[c].append(p)
    node = sorted(suspects)[0]
    trail = [node]
    index = {node: 0}
    while True:
        node = parents_in[node][0]
        if node in index:
            i = index[node]
            return [trail[i]] + trail[:i:-1] + [trail[i]]
        index[node] = len(trail)
        trail.append(node)


def ancestors(graph: CausalGraph, node: str) -> set[str]:
    """All nodes with a directed path to ``node``, excluding itself."""
    graph._require(node)
    parents_of: dict[str, set[str]] = {n: set() for n in graph.nodes}
    for p, c in graph.edges:
        parents_of[c].add(p)
    found: set[str] = set()
    frontier = [node]
    while frontier:
        for p in parents_of[frontier.pop()]:
            if p not in found:
                found.add(p)
                frontier.append(p)
    return found


def descendants(graph: CausalGraph, node: str) -> set[str]:
    """All nodes reachable from ``node`` along directed edges, excluding itself."""
    graph._require(node)
    children_of: dict[str, set[str]] = {n: set() for n in graph.nodes}
    for p, c in graph.edges:
        children_of[p].add(c)
    found: set[str] = set()
    frontier = [node]
    while frontier:
        for c in children_of[frontier.pop()]:
            if c not in found:
                found.add(c)
                frontier.append(c)
    return found


def graph_to_json(graph: CausalGraph) -> str:
    payload = {
        "nodes": list(graph.nodes),
        "edges": [list(e) for e in sorted(graph.edges)],
    }
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def graph_from_json(text: str) -> CausalGraph:
    try:
        payload = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"graph JSON malformed: {exc}") from exc
    if not isinstance(payload, dict) or "nodes" not in payload or "edges" not in payload:
        raise SchemaError("graph JSON must contain 'nodes' and 'edges'")
    return CausalGraph(payload["nodes"], [tuple(e) for e in payload["edges"]])


def graph_to_dot(graph: CausalGraph) -> str:
    lines = ["digraph causal {"]
    for node in graph.nodes:
        lines.append(f'  "{node}";')
    for parent, child in sorted(graph.edges):
        lines.append(f'  "{parent}" -> "{child}";')
    lines.append("}")
    return "\n".join(lines) + "\n"
