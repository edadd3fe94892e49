import numpy as np
from scipy.special import sici

from dichotomy import si
from dichotomy.special import sin_integral_tail


def test_si_matches_scipy_everywhere():
    xs = np.concatenate([
        np.linspace(-60.0, 60.0, 4001),
        np.linspace(7.9, 8.1, 101),      # across the series/integral split
        np.array([0.0, 1e-8, -1e-8, 1e3, -1e3]),
    ])
    expected = sici(xs)[0]
    assert np.max(np.abs(si(xs) - expected)) < 1e-12


def test_si_odd_and_limits():
    xs = np.linspace(0.1, 30.0, 50)
    np.testing.assert_allclose(si(-xs), -si(xs), atol=1e-14)
    assert abs(si(0.0)) == 0.0
    assert abs(si(1e6) - np.pi / 2) < 1e-5


def test_tail_function():
    assert abs(sin_integral_tail(0.0) - np.pi / 2) < 1e-14
    xs = np.array([0.5, 3.0, 20.0])
    np.testing.assert_allclose(sin_integral_tail(xs), np.pi / 2 - sici(xs)[0], atol=1e-12)
