import numpy as np
import pytest

import perfce as p
from perfce.density import BANDWIDTH_FLOOR, silverman_bandwidth
from perfce.errors import EmptySamples

SQRT_2PI = np.sqrt(2 * np.pi)


def test_degenerate_samples_floor_bandwidth():
    model = p.fit_kde([0.0, 0.0, 0.0])
    assert model.bandwidth == BANDWIDTH_FLOOR
    assert p.pdf(model, 0.0) > p.pdf(model, 1e-6)


def test_bandwidth_matches_rule_on_normal_draws():
    rng = np.random.default_rng(42)
    samples = rng.standard_normal(1000)
    model = p.fit_kde(samples)
    # independent recomputation from the very same sample
    sigma = np.std(samples)
    iqr = np.subtract(*np.percentile(samples, [75, 25]))
    expected = 0.9 * min(sigma, iqr / 1.34) * 1000 ** (-0.2)
    assert model.bandwidth == pytest.approx(expected, rel=1e-12)
    # and close to the unit-sigma prediction 0.9 * n^(-1/5)
    assert model.bandwidth == pytest.approx(0.9 * 1000 ** (-0.2), rel=0.15)


def test_fit_invariant_to_sample_order():
    rng = np.random.default_rng(1)
    samples = rng.uniform(0, 5, 100)
    a = p.fit_kde(samples)
    b = p.fit_kde(samples[::-1])
    assert a.bandwidth == b.bandwidth
    xs = np.linspace(-1, 6, 50)
    assert np.allclose(p.pdf(a, xs), p.pdf(b, xs))


def test_single_sample_analytic_peak():
    model = p.fit_kde([0.0])
    assert p.pdf(model, 0.0) == pytest.approx(1.0 / (model.bandwidth * SQRT_2PI))


def test_symmetric_samples_give_symmetric_pdf():
    model = p.fit_kde([-1.0, 1.0])
    for x in (0.3, 0.7, 1.5):
        assert p.pdf(model, x) == pytest.approx(p.pdf(model, -x))


def test_quadrature_normalization():
    rng = np.random.default_rng(7)
    samples = np.concatenate([rng.standard_normal(300), rng.standard_normal(300) + 4])
    model = p.fit_kde(samples)
    h = model.bandwidth
    xs = np.linspace(samples.min() - 5 * h, samples.max() + 5 * h, 10_000)
    integral = np.trapezoid(p.pdf(model, xs), xs)
    assert 0.999 <= integral <= 1.001


def test_pdf_nonnegative_everywhere():
    model = p.fit_kde(np.random.default_rng(3).uniform(-2, 2, 50))
    xs = np.linspace(-10, 10, 400)
    assert (p.pdf(model, xs) >= 0).all()


def test_bimodal_mixture_keeps_both_modes():
    rng = np.random.default_rng(0)
    samples = np.concatenate([rng.normal(-3, 0.3, 500), rng.normal(3, 0.3, 500)])
    model = p.fit_kde(samples)
    assert p.pdf(model, -3.0) > p.pdf(model, 0.0)
    assert p.pdf(model, 3.0) > p.pdf(model, 0.0)


def test_unimodal_mode_near_median():
    rng = np.random.default_rng(9)
    samples = rng.normal(5.0, 1.0, 2000)
    model = p.fit_kde(samples)
    xs = np.linspace(0, 10, 4001)
    mode = xs[np.argmax(p.pdf(model, xs))]
    assert abs(mode - np.median(samples)) <= 2 * model.bandwidth


def test_empty_samples_error():
    with pytest.raises(EmptySamples):
        p.fit_kde([])


def test_reservoir_cap_is_seeded():
    rng = np.random.default_rng(2)
    samples = rng.standard_normal(25_000)
    a = p.fit_kde(samples, max_samples=1000, seed=5)
    b = p.fit_kde(samples, max_samples=1000, seed=5)
    assert len(a.samples) == 1000
    assert np.array_equal(a.samples, b.samples)


def test_silverman_uses_smaller_of_std_and_iqr():
    # heavy outliers inflate std; the IQR term should win
    samples = np.concatenate([np.linspace(-1, 1, 98), [50.0, -50.0]])
    h = silverman_bandwidth(samples)
    iqr = np.subtract(*np.percentile(samples, [75, 25]))
    assert h == pytest.approx(0.9 * (iqr / 1.34) * len(samples) ** (-0.2))
