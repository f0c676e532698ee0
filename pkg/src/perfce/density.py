"""Gaussian kernel density models for the blame score.

KPI marginals are rarely Gaussian (multi-modal under mixed load), so the
outcome density is approximated non-parametrically from retained baseline
samples with a Silverman-rule bandwidth.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import EmptySamples

BANDWIDTH_FLOOR = 1e-9
SAMPLE_CAP = 10_000
_SQRT_2PI = np.sqrt(2.0 * np.pi)


@dataclass(frozen=True)
class DensityModel:
    samples: np.ndarray
    bandwidth: float

    def pdf(self, y):
        return pdf(self, y)


def silverman_bandwidth(samples: np.ndarray) -> float:
    """h = 0.9 * min(std, IQR/1.34) * n^(-1/5), floored for degenerate data."""
    n = len(samples)
    sigma = float(np.std(samples))
    q75, q25 = np.percentile(samples, [75, 25])
    spread = min(sigma, (q75 - q25) / 1.34)
    return max(0.9 * spread * n ** (-0.2), BANDWIDTH_FLOOR)


def fit_kde(samples, max_samples: int = SAMPLE_CAP, seed: int = 0) -> DensityModel:
    """Fit a Gaussian KDE, reservoir-capping huge sample sets."""
    samples = np.asarray(samples, dtype=float).ravel()
    if samples.size == 0:
        raise EmptySamples("cannot fit a density on zero samples")
    if not np.all(np.isfinite(samples)):
        raise EmptySamples("samples must be finite")
    if samples.size > max_samples:
        rng = np.random.default_rng(seed)
        keep = np.sort(rng.choice(samples.size, size=max_samples, replace=False))
        samples = samples[keep]
    samples = samples.copy()
    samples.flags.writeable = False
    return DensityModel(samples=samples, bandwidth=silverman_bandwidth(samples))


def pdf(model: DensityModel, y):
    """KDE density (1/(n h)) * sum phi((y - s_i)/h); scalar in, scalar out."""
    y_arr = np.atleast_1d(np.asarray(y, dtype=float))
    n = model.samples.size
    h = model.bandwidth
    out = np.empty(y_arr.shape, dtype=float)
    # Chunk query points so the (chunk x n) kernel matrix stays small.
    chunk = max(1, int(4_000_000 // max(n, 1)))
    for lo in range(0, y_arr.size, chunk):
        block = y_arr[lo:lo + chunk, None]
        z = (block - model.samples[None, :]) / h
        out[lo:lo + chunk] = np.exp(-0.5 * z * z).sum(axis=1) / (n * h * _SQRT_2PI)
    return float(out[0]) if np.isscalar(y) or np.ndim(y) == 0 else out
