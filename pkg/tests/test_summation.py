import numpy as np
import pytest

from dichotomy import (
    InputError,
    QuadratureParams,
    SpectrumHitError,
    cesaro_ladder,
    fejer_weighted_integral,
    laplace_inversion,
    load_generator,
    semigroup_apply,
    spectral_analysis,
)
from conftest import make_hyperbolic, random_vector


def _uniform(n_rad, h):
    m = int(round(n_rad / h))
    return np.arange(-m, m + 1) * h


# ------------------------------------------------------------- params checks

def test_params_reject_bad_shapes():
    with pytest.raises(InputError):
        QuadratureParams(truncation=10.0, spacing=0.1, fejer_n=20.0)  # N > S
    with pytest.raises(InputError):
        QuadratureParams.from_ladder([(100.0, 0.1, 100.0), (50.0, 0.1, 50.0)])
    p = QuadratureParams(truncation=100.0, spacing=0.1, fejer_n=100.0)
    p.validate_for_time(1.0)
    with pytest.raises(InputError):
        p.validate_for_time(50.0)  # Nyquist bound pi/(4*50) < 0.1


# ------------------------------------------------------------ Fejer integral

def test_fejer_gaussian_pair():
    # Oracle: closed-form transform pair g = exp(-t^2/2), ghat = sqrt(2pi) g.
    # The Fejer weight removes exactly (1/N) * 2/sqrt(2pi) of the mass, so the
    # weighted integral at t = 0 equals 1 - 2/(N sqrt(2pi)) up to truncation.
    n_rad, h = 40.0, 0.01
    s = _uniform(n_rad, h)
    vals = np.sqrt(2 * np.pi) * np.exp(-(s**2) / 2)
    out = fejer_weighted_integral(s, vals, 0.0, n_rad)
    expected = 1.0 - 2.0 / (n_rad * np.sqrt(2 * np.pi))
    assert abs(out - expected) < 1e-6


def test_fejer_gaussian_converges_to_one():
    h = 0.01
    residuals = []
    for n_rad in (10.0, 20.0, 40.0, 80.0):
        s = _uniform(n_rad, h)
        vals = np.sqrt(2 * np.pi) * np.exp(-(s**2) / 2)
        residuals.append(abs(fejer_weighted_integral(s, vals, 0.0, n_rad) - 1.0))
    assert all(a > b for a, b in zip(residuals, residuals[1:]))
    assert residuals[-1] < 1e-2


def test_fejer_exponential_kernel():
    # Oracle: 1/(1+is) is the transform of e^{-t} 1_{t>0}.
    n_rad, h = 200.0, 0.01
    s = _uniform(n_rad, h)
    out = fejer_weighted_integral(s, 1.0 / (1.0 + 1j * s), 1.0, n_rad)
    assert abs(out - np.exp(-1.0)) < 1e-3


def test_fejer_zero_is_zero():
    s = _uniform(5.0, 0.1)
    out = fejer_weighted_integral(s, np.zeros((s.size, 3)), 0.3, 5.0)
    np.testing.assert_array_equal(out, np.zeros(3))


def test_fejer_rejects_nonuniform_grid():
    s = np.array([-1.0, -0.5, 0.1, 0.5, 1.0])
    with pytest.raises(InputError):
        fejer_weighted_integral(s, np.ones(5), 0.0, 1.0)


def test_fejer_positivity():
    # the implied kernel is nonnegative: smoothing a nonnegative function
    # cannot produce values below roundoff
    n_rad, h = 40.0, 0.01
    s = _uniform(n_rad, h)
    vals = np.sqrt(2 * np.pi) * np.exp(-(s**2) / 2)  # transform of a density
    for t in np.linspace(-6.0, 6.0, 25):
        assert fejer_weighted_integral(s, vals, t, n_rad).real >= -1e-6


# ------------------------------------------------------------- Cesaro ladder

def test_ladder_sine_integral():
    params = QuadratureParams.from_ladder(
        [(500.0, 0.01, 500.0), (1000.0, 0.01, 1000.0), (2000.0, 0.01, 2000.0)]
    )
    x = np.array([2.0])
    res = cesaro_ladder(lambda s: np.sinc(s / np.pi)[:, None] * x[None, :], 0.0, params)
    # int sinc = pi, so the limit is x * pi/(2 pi) = x/2
    assert res.converged
    assert abs(res.value[0] - 1.0) < 2e-3


def test_ladder_hyperbolic_converges():
    from dichotomy import green_apply

    g = load_generator(np.diag([-1.0, 2.0]))
    res = green_apply(g, 0.0, np.array([1.0, 1.0], dtype=complex))
    assert res.converged
    assert len(res.ladder_values) == 3


def test_ladder_boundary_spectrum():
    # an eigenvalue exactly on a grid node refuses; nodes missing it yield a
    # non-convergent verdict
    from dichotomy import green_apply

    g = load_generator([[1j]])
    with pytest.raises(SpectrumHitError):
        green_apply(g, 0.0, np.array([1.0 + 0j]))  # default h = 0.05 hits s = 1
    params = QuadratureParams.from_ladder(
        [(350.0, 0.07, 350.0), (700.0, 0.07, 700.0)]
    )
    res = green_apply(g, 0.0, np.array([1.0 + 0j]), params=params)
    assert not res.converged


# ---------------------------------------------------------- Laplace inversion

def test_laplace_midpoint_at_zero():
    g = load_generator(np.diag([-1.0, 2.0]))
    x = np.array([1.0, 1.0], dtype=complex)
    out = laplace_inversion(g, x, 0.0, 3.0)
    assert np.linalg.norm(out - x / 2) < 5e-3


def test_laplace_vanishes_backward():
    g = load_generator(np.diag([-1.0, 2.0]))
    x = np.array([1.0, 1.0], dtype=complex)
    assert np.linalg.norm(laplace_inversion(g, x, -2.0, 3.0)) < 1e-4


def test_laplace_matches_semigroup_diag():
    g = load_generator(np.diag([-1.0, 2.0]))
    x = np.array([1.0, 1.0], dtype=complex)
    out = laplace_inversion(g, x, 1.0, 3.0)
    target = np.array([np.exp(-1.0), np.exp(2.0)])
    assert np.linalg.norm(out - target) < 1e-3


def test_laplace_spectrum_hit_and_domain():
    g = load_generator(np.diag([-1.0, 2.0]))
    x = np.array([1.0, 0.0], dtype=complex)
    with pytest.raises(SpectrumHitError):
        laplace_inversion(g, x, 1.0, 2.0)
    with pytest.raises(InputError):
        laplace_inversion(g, x, 1.0, 0.5)  # right of -1 but left of the abscissa


def test_laplace_semigroup_consistency_random():
    rng = np.random.default_rng(41)
    for _ in range(20):
        g = make_hyperbolic(rng, n=6, re_max=1.8, im_max=2.0)
        x = random_vector(rng, 6)
        t = rng.uniform(0.25, 2.0)
        rho = spectral_analysis(g).abscissa + 1.0
        out = laplace_inversion(g, x, t, rho)
        target = semigroup_apply(g, t) @ x
        assert np.linalg.norm(out - target) <= 1e-3 * np.linalg.norm(target)
