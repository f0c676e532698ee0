"""Per-edge treatment-effect estimators: OLS, DML, and chaos-variable 2SLS.

Each fit returns an :class:`AteModel` whose effect function is a basis
expansion in the treatment (degree-1 by default, i.e. a slope), so
``ATE(a -> b) = effect(b) - effect(a)`` and ``ATE(x -> x) == 0`` exactly.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .dataset import KIND_CHAOS, Dataset
from .errors import (
    DegenerateData,
    InsufficientFolds,
    InvalidInstrument,
    WeakInstrument,
)
from .validation import column_matrix, require_columns, require_rows, require_variance

WEAK_INSTRUMENT_R2 = 0.01

ESTIMATOR_OLS = "ols"
ESTIMATOR_DML = "dml"
ESTIMATOR_IV = "iv2sls"


@dataclass(frozen=True)
class RegressorSpec:
    """Pluggable regressor family for nuisance stages and baselines."""

    family: str = "linear"  # linear | polynomial | regression_tree
    degree: int = 1
    depth: int = 4
    cross_fit_folds: int = 2

    def __post_init__(self):
        if self.family not in ("linear", "polynomial", "regression_tree"):
            raise ValueError(f"unknown regressor family {self.family!r}")
        if not 1 <= self.degree <= 3:
            raise ValueError("polynomial degree must be in [1, 3]")
        if not 1 <= self.depth <= 8:
            raise ValueError("tree depth must be in [1, 8]")
        if self.cross_fit_folds < 2:
            raise InsufficientFolds("cross_fit_folds must be >= 2")


@dataclass(frozen=True)
class AteModel:
    """Fitted treatment -> outcome effect.

    ``coeffs[k]`` multiplies treatment**(k+1); there is no constant term,
    so the effect function is identified only up to differences, which is
    all the ATE semantics needs.
    """

    treatment: str
    outcome: str
    estimator: str
    coeffs: tuple[float, ...]
    adjustments: tuple[str, ...] = ()
    diagnostics: dict = field(default_factory=dict)

    @property
    def slope(self) -> float:
        return self.coeffs[0]

    def effect(self, x: float) -> float:
        acc = 0.0
        for k, c in enumerate(self.coeffs, start=1):
            acc += c * x**k
        return acc


def estimate_ate(model: AteModel, x_from: float, x_to: float) -> float:
    """E[Y | do(X=x_to)] - E[Y | do(X=x_from)] under the fitted effect."""
    return model.effect(x_to) - model.effect(x_from)


def _ols_solve(design: np.ndarray, y: np.ndarray) -> np.ndarray:
    coef, _, rank, _ = np.linalg.lstsq(design, y, rcond=None)
    if rank < design.shape[1]:
        raise DegenerateData("collinear design matrix")
    return coef


def _with_intercept(features: np.ndarray) -> np.ndarray:
    return np.column_stack([features, np.ones(features.shape[0])])


def _r2(y: np.ndarray, fitted: np.ndarray) -> float:
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    if ss_tot == 0.0:
        return 0.0
    return 1.0 - float(np.sum((y - fitted) ** 2)) / ss_tot


class _Nuisance:
    """Regression used inside DML first stages, per RegressorSpec family."""

    def __init__(self, spec: RegressorSpec):
        self.spec = spec
        self._coef = None
        self._tree = None

    def _expand(self, X: np.ndarray) -> np.ndarray:
        if self.spec.family == "polynomial" and self.spec.degree > 1:
            return np.hstack([X**d for d in range(1, self.spec.degree + 1)])
        return X

    def fit(self, X: np.ndarray, y: np.ndarray) -> "_Nuisance":
        if self.spec.family == "regression_tree":
            from sklearn.tree import DecisionTreeRegressor

            self._tree = DecisionTreeRegressor(max_depth=self.spec.depth, random_state=0)
            self._tree.fit(X, y)
        else:
            design = _with_intercept(self._expand(X))
            self._coef, *_ = np.linalg.lstsq(design, y, rcond=None)
        return self

    def predict(self, X: np.ndarray) -> np.ndarray:
        if self._tree is not None:
            return self._tree.predict(X)
        return _with_intercept(self._expand(X)) @ self._coef


def fit_ols(dataset: Dataset, treatment: str, outcome: str,
            covariates=(), degree: int = 1) -> AteModel:
    """Least-squares effect of treatment on outcome, optionally adjusting
    for covariates included as extra regressors."""
    covariates = tuple(covariates)
    require_columns(dataset, [treatment, outcome, *covariates])
    require_rows(dataset, 10, "fit_ols")
    t = dataset.column(treatment)
    y = dataset.column(outcome)
    require_variance(t, treatment)

    powers = np.column_stack([t**d for d in range(1, degree + 1)])
    extra = column_matrix(dataset, list(covariates))
    design = _with_intercept(np.column_stack([powers, extra]) if covariates else powers)
    coef = _ols_solve(design, y)
    coeffs = tuple(float(c) for c in coef[:degree])
    fitted = design @ coef
    return AteModel(
        treatment=treatment,
        outcome=outcome,
        estimator=ESTIMATOR_OLS,
        coeffs=coeffs,
        adjustments=covariates,
        diagnostics={"n": dataset.n_rows, "residual_r2": _r2(y, fitted)},
    )


def fit_dml(dataset: Dataset, treatment: str, outcome: str, confounders,
            regressor: RegressorSpec | None = None, seed: int = 0) -> AteModel:
    """Cross-fitted residual-on-residual effect under observed confounding.

    Stage 1 predicts both outcome and treatment from the confounders on
    held-out folds; stage 2 regresses the outcome residual on the
    treatment residual, which isolates the direct effect.
    """
    confounders = tuple(confounders)
    if not confounders:
        raise ValueError("fit_dml needs at least one confounder")
    spec = regressor or RegressorSpec()
    require_columns(dataset, [treatment, outcome, *confounders])
    require_rows(dataset, 50, "fit_dml")
    n = dataset.n_rows
    if n < spec.cross_fit_folds * 2:
        raise InsufficientFolds(f"{n} rows cannot support {spec.cross_fit_folds} folds")

    t = dataset.column(treatment)
    y = dataset.column(outcome)
    W = column_matrix(dataset, list(confounders))
    require_variance(t, treatment)

    rng = np.random.default_rng(seed)
    order = rng.permutation(n)
    folds = np.array_split(order, spec.cross_fit_folds)

    rt = np.empty(n)
    ry = np.empty(n)
    for hold in folds:
        train = np.setdiff1d(order, hold, assume_unique=False)
        rt[hold] = t[hold] - _Nuisance(spec).fit(W[train], t[train]).predict(W[hold])
        ry[hold] = y[hold] - _Nuisance(spec).fit(W[train], y[train]).predict(W[hold])

    if np.var(rt) < 1e-12 * max(float(np.var(t)), 1e-12):
        raise DegenerateData(
            f"treatment {treatment!r} is (nearly) a function of the confounders"
        )
    slope = float(np.sum(rt * ry) / np.sum(rt * rt))
    return AteModel(
        treatment=treatment,
        outcome=outcome,
        estimator=ESTIMATOR_DML,
        coeffs=(slope,),
        adjustments=confounders,
        diagnostics={"n": n, "residual_r2": _r2(ry, slope * rt)},
    )


def fit_iv(dataset: Dataset, instrument: str, treatment: str, outcome: str,
           allow_kpi_instrument: bool = False,
           weak_threshold: float = WEAK_INSTRUMENT_R2) -> AteModel:
    """Two-stage least squares with a chaos variable as the instrument.

    Fits treatment and outcome on the instrument, then the predicted
    outcome on the predicted treatment; for the linear family this equals
    the ratio cov(Z, Y) / cov(Z, X).
    """
    require_columns(dataset, [instrument, treatment, outcome])
    require_rows(dataset, 50, "fit_iv")
    meta = dataset.meta(instrument)
    if meta.kind != KIND_CHAOS and not allow_kpi_instrument:
        raise InvalidInstrument(
            f"{instrument!r} has kind {meta.kind!r}; pass allow_kpi_instrument=True "
            "to use a non-chaos column as instrument"
        )
    z = dataset.column(instrument)
    t = dataset.column(treatment)
    y = dataset.column(outcome)
    require_variance(z, instrument)
    require_variance(t, treatment)

    design = _with_intercept(z[:, None])
    t_coef = _ols_solve(design, t)
    t_hat = design @ t_coef
    first_stage_r2 = _r2(t, t_hat)
    if first_stage_r2 < weak_threshold:
        raise WeakInstrument(instrument, treatment, first_stage_r2, weak_threshold)

    y_coef = _ols_solve(design, y)
    y_hat = design @ y_coef
    slope = float(_ols_solve(_with_intercept(t_hat[:, None]), y_hat)[0])

    intercept = float(np.mean(y) - slope * np.mean(t))
    return AteModel(
        treatment=treatment,
        outcome=outcome,
        estimator=ESTIMATOR_IV,
        coeffs=(slope,),
        adjustments=(instrument,),
        diagnostics={
            "n": dataset.n_rows,
            "first_stage_r2": first_stage_r2,
            "residual_r2": _r2(y, slope * t + intercept),
        },
    )
