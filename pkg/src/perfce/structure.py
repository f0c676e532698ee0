"""Two-stage score-based causal graph learning.

Stage one caches BIC local scores per (child, parent-set); stage two
maximizes the decomposable global score, either exactly (dynamic program
over node subsets, feasible up to 12 columns) or by restarted hill
climbing over edge add / remove / reverse moves.

Chaos-variable columns are constrained to be roots: the injection
direction is known, so they may cause KPIs but nothing causes them.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator

from .dataset import KIND_CHAOS, Dataset
from .errors import DegenerateData, NoUsableColumns, UnknownNode
from .graph import CausalGraph, ancestors
from .validation import require_columns

_VAR_FLOOR = 1e-12
_IMPROVEMENT_EPS = 1e-9
# Phi^-1(0.975): two-sided 5% critical value for the Fisher-z test.
_FISHER_Z_CRIT = 1.959963984540054

MODE_EXACT = "exact"
MODE_HILL_CLIMB = "hill_climb"
MODE_AUTO = "auto"
EXACT_LIMIT = 12


@dataclass(frozen=True)
class SearchConfig:
    max_in_degree: int = 3
    restarts: int = 10
    seed: int = 0
    mode: str = MODE_AUTO

    def __post_init__(self):
        if self.max_in_degree < 1:
            raise ValueError("max_in_degree must be >= 1")
        if self.mode not in (MODE_EXACT, MODE_HILL_CLIMB, MODE_AUTO):
            raise ValueError(f"unknown search mode {self.mode!r}")


def local_score(dataset: Dataset, child: str, parent_set) -> float:
    """Linear-Gaussian BIC of regressing child on the parent set.

    loglik - (k/2) ln n with k = |parents| + 2 (slopes, intercept,
    variance). Higher is better; invariant to parent ordering.
    """
    parents = sorted(set(parent_set))
    if child in parents:
        raise ValueError("child cannot be its own parent")
    require_columns(dataset, [child, *parents])
    n = dataset.n_rows
    if n <= len(parents) + 2:
        raise DegenerateData(f"need more than {len(parents) + 2} rows, got {n}")
    y = dataset.column(child)
    if np.ptp(y) == 0.0:
        raise DegenerateData(f"child {child!r} has zero variance")
    X = np.column_stack([dataset.column(p) for p in parents] + [np.ones(n)])
    coef, _, rank, _ = np.linalg.lstsq(X, y, rcond=None)
    if rank < X.shape[1]:
        raise DegenerateData(f"collinear parents for {child!r}: {parents}")
    rss = float(np.sum((y - X @ coef) ** 2))
    sigma2 = max(rss / n, _VAR_FLOOR)
    loglik = -0.5 * n * (np.log(2.0 * np.pi * sigma2) + 1.0)
    k = len(parents) + 2
    return loglik - 0.5 * k * np.log(n)


class LocalScoreCache:
    """Insert-once score cache over (child, parent-set) pairs."""

    def __init__(self, dataset: Dataset, names, max_in_degree: int):
        self.dataset = dataset
        self.names = tuple(names)
        self.max_in_degree = max_in_degree
        self.entries: dict[tuple[str, frozenset], float] = {}

    def score(self, child: str, parents) -> float:
        """Cached local score; collinear parent sets rank as -inf."""
        key = (child, frozenset(parents))
        if len(key[1]) > self.max_in_degree:
            return -np.inf
        if key not in self.entries:
            try:
                self.entries[key] = local_score(self.dataset, child, key[1])
            except DegenerateData:
                self.entries[key] = -np.inf
        return self.entries[key]


def global_score(cache: LocalScoreCache, parents_of: dict) -> float:
    return sum(cache.score(c, ps) for c, ps in parents_of.items())


def _usable_columns(dataset: Dataset) -> tuple[list[str], list[str]]:
    usable, dropped = [], []
    for name in dataset.column_names:
        if np.ptp(dataset.column(name)) == 0.0:
            dropped.append(name)
        else:
            usable.append(name)
    return usable, dropped


def search_dag(dataset: Dataset, config: SearchConfig | None = None) -> CausalGraph:
    """Best-scoring DAG over the dataset's non-constant columns."""
    graph, _, _ = search_dag_detailed(dataset, config)
    return graph


def search_dag_detailed(dataset: Dataset, config: SearchConfig | None = None):
    """As :func:`search_dag`, also returning (score, dropped columns)."""
    config = config or SearchConfig()
    usable, dropped = _usable_columns(dataset)
    if len(usable) < 2:
        raise NoUsableColumns(f"only {len(usable)} non-constant columns")
    mode = config.mode
    if mode == MODE_AUTO:
        mode = MODE_EXACT if len(usable) <= EXACT_LIMIT else MODE_HILL_CLIMB
    if mode == MODE_EXACT and len(usable) > EXACT_LIMIT:
        raise ValueError(f"exact mode supports <= {EXACT_LIMIT} columns")

    cache = LocalScoreCache(dataset, usable, config.max_in_degree)
    forced_roots = {n for n in usable if dataset.meta(n).kind == KIND_CHAOS}
    if mode == MODE_EXACT:
        parents_of = _search_exact(cache, usable, forced_roots, config.max_in_degree)
    else:
        parents_of = _search_hill_climb(cache, usable, forced_roots, config)

    edges = [(p, c) for c, ps in parents_of.items() for p in ps]
    graph = CausalGraph(usable, edges)
    return graph, global_score(cache, parents_of), dropped


# -- exact search over node subsets -------------------------------------------

def _search_exact(cache, names, forced_roots, max_in_degree) -> dict:
    names = sorted(names)
    m = len(names)
    full = (1 << m) - 1

    # Best parent set of each node within every candidate subset.
    bp_score = [np.full(full + 1, -np.inf) for _ in range(m)]
    bp_mask = [np.zeros(full + 1, dtype=np.int64) for _ in range(m)]
    for v, child in enumerate(names):
        if child in forced_roots:
            empty = cache.score(child, ())
            for mask in range(full + 1):
                bp_score[v][mask] = empty
            continue
        others = [i for i in range(m) if i != v]
        exact: dict[int, float] = {}
        for size in range(0, max_in_degree + 1):
            for combo in itertools.combinations(others, size):
                mask = sum(1 << i for i in combo)
                exact[mask] = cache.score(child, [names[i] for i in combo])
        for mask in range(full + 1):
            if mask & (1 << v):
                continue
            best = exact.get(mask, -np.inf)
            best_mask = mask if mask in exact else 0
            sub = mask
            while sub:
                bit = sub & -sub
                prev = mask ^ bit
                if bp_score[v][prev] > best:
                    best = bp_score[v][prev]
                    best_mask = bp_mask[v][prev]
                sub ^= bit
            if not np.isfinite(best):
                best, best_mask = exact.get(0, -np.inf), 0
            bp_score[v][mask] = best
            bp_mask[v][mask] = best_mask

    # Best network over every node subset, choosing each subset's sink.
    net = np.full(full + 1, -np.inf)
    sink = np.full(full + 1, -1, dtype=np.int64)
    net[0] = 0.0
    for mask in range(1, full + 1):
        sub = mask
        while sub:
            bit = sub & -sub
            v = bit.bit_length() - 1
            rest = mask ^ bit
            cand = net[rest] + bp_score[v][rest]
            if cand > net[mask]:
                net[mask] = cand
                sink[mask] = v
            sub ^= bit

    parents_of: dict[str, frozenset] = {}
    mask = full
    while mask:
        v = int(sink[mask])
        rest = mask ^ (1 << v)
        pmask = int(bp_mask[v][rest]) if names[v] not in forced_roots else 0
        parents_of[names[v]] = frozenset(
            names[i] for i in range(m) if pmask & (1 << i)
        )
        mask = rest
    return parents_of


# -- hill climbing -------------------------------------------------------------

class _ClimbState:
    def __init__(self, names, forced_roots, max_in_degree):
        self.names = list(names)
        self.forced_roots = forced_roots
        self.k = max_in_degree
        self.parents: dict[str, set] = {n: set() for n in names}
        self.children: dict[str, set] = {n: set() for n in names}

    def has_path(self, src, dst) -> bool:
        frontier = [src]
        seen = set()
        while frontier:
            node = frontier.pop()
            if node == dst:
                return True
            for child in self.children[node]:
                if child not in seen:
                    seen.add(child)
                    frontier.append(child)
        return False

    def add(self, p, c):
        self.parents[c].add(p)
        self.children[p].add(c)

    def remove(self, p, c):
        self.parents[c].discard(p)
        self.children[p].discard(c)

    def legal_moves(self):
        for c in self.names:
            for p in self.names:
                if p == c:
                    continue
                if p in self.parents[c]:
                    yield ("remove", p, c)
                    # Reverse p->c: c must be allowed to cause p.
                    if (p not in self.forced_roots
                            and len(self.parents[p]) < self.k
                            and not self._path_avoiding(p, c)):
                        yield ("reverse", p, c)
                elif (c not in self.forced_roots
                      and len(self.parents[c]) < self.k
                      and not self.has_path(c, p)):
                    yield ("add", p, c)

    def _path_avoiding(self, p, c) -> bool:
        # Path p -> ... -> c that does not use the direct edge p->c.
        frontier = [child for child in self.children[p] if child != c]
        seen = set(frontier)
        while frontier:
            node = frontier.pop()
            if node == c:
                return True
            for child in self.children[node]:
                if child not in seen:
                    seen.add(child)
                    frontier.append(child)
        return False

    def apply(self, move):
        op, p, c = move
        if op == "add":
            self.add(p, c)
        elif op == "remove":
            self.remove(p, c)
        else:
            self.remove(p, c)
            self.add(c, p)


def _move_delta(cache, state, move) -> float:
    op, p, c = move
    cur_c = cache.score(c, state.parents[c])
    if op == "add":
        return cache.score(c, state.parents[c] | {p}) - cur_c
    if op == "remove":
        return cache.score(c, state.parents[c] - {p}) - cur_c
    cur_p = cache.score(p, state.parents[p])
    return (cache.score(c, state.parents[c] - {p}) - cur_c
            + cache.score(p, state.parents[p] | {c}) - cur_p)


def _climb(cache, state) -> None:
    while True:
        best_move, best_delta = None, _IMPROVEMENT_EPS
        for move in state.legal_moves():
            delta = _move_delta(cache, state, move)
            if delta > best_delta:
                best_move, best_delta = move, delta
        if best_move is None:
            return
        state.apply(best_move)


def _random_start(state, rng) -> None:
    order = list(state.names)
    rng.shuffle(order)
    for i, c in enumerate(order):
        if c in state.forced_roots:
            continue
        for p in order[:i]:
            if len(state.parents[c]) >= state.k:
                break
            if rng.random() < 0.15:
                state.add(p, c)


def _search_hill_climb(cache, names, forced_roots, config) -> dict:
    rng = np.random.default_rng(config.seed)
    best_parents, best_score = None, -np.inf
    for restart in range(max(1, config.restarts)):
        state = _ClimbState(names, forced_roots, config.max_in_degree)
        if restart > 0:
            _random_start(state, rng)
        _climb(cache, state)
        score = global_score(cache, state.parents)
        if score > best_score:
            best_score = score
            best_parents = {c: frozenset(ps) for c, ps in state.parents.items()}
    return best_parents


# -- graph quality -------------------------------------------------------------

def evaluate_graph(graph: CausalGraph, dataset: Dataset) -> dict:
    """Held-out fit of a graph: global BIC plus marginal d-separation
    agreement with pairwise correlation tests (Fisher z, alpha=0.05).

    Scored over every non-constant dataset column so graphs learned on
    different column subsets stay comparable; columns absent from the
    graph count as parentless.
    """
    missing = [n for n in graph.nodes if n not in dataset.column_names]
    if missing:
        raise UnknownNode(f"graph nodes not in dataset: {', '.join(missing)}")
    columns, _ = _usable_columns(dataset)

    bic = 0.0
    for name in columns:
        parents = [p for p in (graph.parents(name) if name in graph else ())
                   if p in columns]
        bic += local_score(dataset, name, parents)

    reach = {}
    for name in columns:
        if name in graph:
            reach[name] = ancestors(graph, name) | {name}
        else:
            reach[name] = {name}

    n = dataset.n_rows
    agree = total = 0
    for a, b in itertools.combinations(columns, 2):
        d_connected = bool(reach[a] & reach[b])
        r = float(np.corrcoef(dataset.column(a), dataset.column(b))[0, 1])
        r = min(max(r, -0.999999999), 0.999999999)
        z = abs(np.arctanh(r)) * np.sqrt(max(n - 3, 1))
        correlated = z > _FISHER_Z_CRIT
        agree += int(d_connected == correlated)
        total += 1
    return {"bic": bic, "dsep_accuracy": agree / total if total else 1.0}


class GraphLearner(BaseEstimator):
    """Estimator-style wrapper around :func:`search_dag`.

    After ``fit``: ``graph_`` (the learned DAG), ``score_`` (its global
    BIC) and ``dropped_columns_`` (constant columns excluded before the
    search).
    """

    def __init__(self, max_in_degree=3, restarts=10, seed=0, mode=MODE_AUTO):
        self.max_in_degree = max_in_degree
        self.restarts = restarts
        self.seed = seed
        self.mode = mode

    def fit(self, X: Dataset, y=None):
        config = SearchConfig(
            max_in_degree=self.max_in_degree, restarts=self.restarts,
            seed=self.seed, mode=self.mode,
        )
        self.graph_, self.score_, self.dropped_columns_ = search_dag_detailed(X, config)
        return self
