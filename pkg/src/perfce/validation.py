"""Input-validation helpers shared by the estimators."""

from __future__ import annotations

import numpy as np

from .dataset import Dataset
from .errors import DegenerateData, UnknownNode


def require_columns(dataset: Dataset, names) -> None:
    missing = [n for n in names if n not in dataset.column_names]
    if missing:
        raise UnknownNode(f"columns not in dataset: {', '.join(missing)}")


def column_matrix(dataset: Dataset, names) -> np.ndarray:
    """Stack the named columns into an (n, len(names)) array."""
    require_columns(dataset, names)
    if not names:
        return np.empty((dataset.n_rows, 0))
    return np.column_stack([dataset.column(n) for n in names])


def require_rows(dataset: Dataset, minimum: int, context: str) -> None:
    if dataset.n_rows < minimum:
        raise DegenerateData(f"{context}: needs >= {minimum} rows, got {dataset.n_rows}")


def is_constant(x: np.ndarray) -> bool:
    return bool(np.all(x == x[0]))


def require_variance(x: np.ndarray, name: str) -> None:
    if is_constant(x):
        raise DegenerateData(f"column {name!r} has zero variance")


def baseline_values(dataset: Dataset, name: str) -> np.ndarray:
    """Column restricted to baseline-labeled rows (all rows if unlabeled)."""
    mask = dataset.baseline_mask()
    if not mask.any():
        raise DegenerateData("dataset has segment labels but no baseline segment")
    return dataset.column(name)[mask]
