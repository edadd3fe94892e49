import numpy as np
import pytest
import scipy.linalg

from dichotomy import (
    FractionalConfig,
    InputError,
    NotHyperbolicError,
    NumericalError,
    SpectrumHitError,
    alpha_norm,
    complex_power_positive_cut,
    fractional_power,
    load_generator,
    resolvent,
    semigroup_apply,
    spectral_analysis,
    spectral_projection,
)
from conftest import make_hyperbolic, random_unitary

ROTATION = [[0.0, 1.0], [-1.0, 0.0]]


# ---------------------------------------------------------------- loading

def test_load_smallest():
    g = load_generator([[-1.0]])
    assert g.n == 1
    assert g.spectral is None


def test_load_rotation_eigenvalues_on_axis():
    g = load_generator(ROTATION)
    spec = spectral_analysis(g)
    np.testing.assert_allclose(sorted(spec.eigenvalues.imag), [-1.0, 1.0], atol=1e-12)
    assert spec.gap == 0.0


def test_load_rejects_nonsquare():
    with pytest.raises(InputError):
        load_generator(np.zeros((3, 2)))


def test_load_rejects_nonfinite():
    with pytest.raises(InputError):
        load_generator([[np.nan, 0.0], [0.0, 1.0]])


def test_eager_spectral_cache():
    g = load_generator(np.diag([-1.0, 2.0]), eager_spectral=True)
    assert g.spectral is not None
    assert spectral_analysis(g) is g.spectral


# ------------------------------------------------------- spectral analysis

def test_spectral_diag():
    g = load_generator(np.diag([-1.0, 2.0]))
    spec = spectral_analysis(g)
    np.testing.assert_allclose(spec.eigenvalues, [2.0, -1.0])  # sorted by Re, desc
    assert spec.gap == 1.0
    assert spec.abscissa == 2.0


def _charpoly_coeffs(a):
    # Faddeev-LeVerrier trace recursion; independent of np.linalg.eig
    n = a.shape[0]
    coeffs = [1.0 + 0j]
    m = np.zeros_like(a)
    for k in range(1, n + 1):
        m = a @ m + coeffs[-1] * np.eye(n)
        coeffs.append(-np.trace(a @ m) / k)
    return np.array(coeffs)


def test_spectral_gap_against_companion_roots():
    rng = np.random.default_rng(7)
    g = make_hyperbolic(rng, n=8)
    spec = spectral_analysis(g)
    roots = np.roots(_charpoly_coeffs(g.matrix))
    gap_oracle = np.min(np.abs(roots.real))
    assert abs(spec.gap - gap_oracle) < 1e-8


# ---------------------------------------------------------------- semigroup

def test_semigroup_identity_at_zero():
    g = load_generator(np.diag([-1.0, 2.0]))
    np.testing.assert_allclose(semigroup_apply(g, 0.0), np.eye(2), atol=1e-15)


def test_semigroup_diagonal():
    g = load_generator(np.diag([-1.0, 2.0]))
    np.testing.assert_allclose(
        semigroup_apply(g, 1.0), np.diag([np.exp(-1.0), np.exp(2.0)]), rtol=1e-13
    )


def test_semigroup_matches_eigendecomposition():
    rng = np.random.default_rng(11)
    g = make_hyperbolic(rng, n=6)
    spec = spectral_analysis(g)
    v = spec.basis
    oracle = v @ np.diag(np.exp(0.3 * spec.eigenvalues)) @ np.linalg.inv(v)
    err = np.linalg.norm(semigroup_apply(g, 0.3) - oracle, 2)
    assert err < 1e-9 * spec.basis_condition


def test_semigroup_law():
    rng = np.random.default_rng(5)
    for _ in range(3):
        a = rng.standard_normal((8, 8)) + 1j * rng.standard_normal((8, 8))
        a *= 5.0 / np.linalg.norm(a, 2)
        g = load_generator(a)
        for s in (0.1, 0.5, 1.0):
            for t in (0.1, 0.5, 1.0):
                ts, tt = semigroup_apply(g, s), semigroup_apply(g, t)
                lhs = np.linalg.norm(semigroup_apply(g, s + t) - ts @ tt, 2)
                bound = 1e-8 * (1 + np.linalg.norm(ts, 2)) * (1 + np.linalg.norm(tt, 2))
                assert lhs <= bound


def test_semigroup_overflow_guard():
    g = load_generator([[5.0]])
    with pytest.raises(NumericalError):
        semigroup_apply(g, 200.0)


# ---------------------------------------------------------------- resolvent

def test_resolvent_scalar():
    g = load_generator([[-1.0]])
    s = 0.7
    np.testing.assert_allclose(resolvent(g, 1j * s), [[1.0 / (1j * s + 1.0)]], rtol=1e-14)


def test_resolvent_spectrum_hit_reports_eigenvalue():
    g = load_generator(ROTATION)
    with pytest.raises(SpectrumHitError) as err:
        resolvent(g, 1j)
    assert abs(err.value.eigenvalue - 1j) < 1e-12


def test_resolvent_residual_random():
    rng = np.random.default_rng(2)
    g = make_hyperbolic(rng, n=6)
    lam = 3.0 + 2.0j
    r = resolvent(g, lam)
    res = np.linalg.norm((lam * np.eye(6) - g.matrix) @ r - np.eye(6), 2)
    assert res < 1e-9


def test_resolvent_identity():
    rng = np.random.default_rng(3)
    g = make_hyperbolic(rng, n=6)
    lam, mu = 3.0 + 2.0j, -4.0 + 0.5j
    rl, rm = resolvent(g, lam), resolvent(g, mu)
    lhs = rl - rm
    rhs = (mu - lam) * rl @ rm
    assert np.linalg.norm(lhs - rhs, 2) <= 1e-8 * np.linalg.norm(lhs, 2)


# ----------------------------------------------------- spectral projection

def test_projection_diag():
    g = load_generator(np.diag([-1.0, 2.0]))
    np.testing.assert_allclose(spectral_projection(g), np.diag([1.0, 0.0]), atol=1e-12)


def test_projection_uniformly_stable_is_identity():
    g = load_generator(-np.eye(3))
    np.testing.assert_allclose(spectral_projection(g), np.eye(3), atol=1e-12)


def test_projection_requires_gap():
    with pytest.raises(NotHyperbolicError):
        spectral_projection(load_generator(ROTATION))


def test_projection_commutes_with_semigroup():
    rng = np.random.default_rng(13)
    g = make_hyperbolic(rng, n=8)
    p = spectral_projection(g)
    for t in (1.0, -1.0, 2.0, -2.0):
        tt = semigroup_apply(g, t)
        assert np.linalg.norm(p @ tt - tt @ p, 2) <= 1e-8 * np.linalg.norm(tt, 2)


def _riesz_rectangle_trapezoid(gen, m):
    # counterclockwise rectangle around the stable eigenvalues
    spec = spectral_analysis(gen)
    reach = gen.norm + 1.0
    left, right = -reach, -0.5 * spec.gap
    top = reach
    corners = [right - 1j * top, right + 1j * top, left + 1j * top, left - 1j * top]
    total = np.zeros((gen.n, gen.n), dtype=complex)
    for a, b in zip(corners, corners[1:] + corners[:1]):
        zs = a + (b - a) * (np.arange(m) + 0.5) / m
        mats = zs[:, None, None] * np.eye(gen.n) - gen.matrix
        inv = np.linalg.solve(mats, np.broadcast_to(np.eye(gen.n), mats.shape))
        total += ((b - a) / m) * inv.sum(axis=0)
    return total / (2j * np.pi)


def test_projection_matches_contour_riesz_oracle():
    rng = np.random.default_rng(17)
    g = make_hyperbolic(rng, n=8)
    coarse = _riesz_rectangle_trapezoid(g, 4000)
    fine = _riesz_rectangle_trapezoid(g, 8000)
    oracle = (4.0 * fine - coarse) / 3.0  # one Richardson step of the trapezoid
    assert np.linalg.norm(spectral_projection(g) - oracle, 2) < 1e-7


# ------------------------------------------------------- fractional powers

def test_fractional_alpha_one_is_minus_resolvent():
    rng = np.random.default_rng(23)
    g = make_hyperbolic(rng, n=6)
    cfg = FractionalConfig.for_generator(g, 1.0)
    val = fractional_power(g, cfg, sign=-1)
    target = -resolvent(g, cfg.omega)
    assert np.linalg.norm(val - target, 2) < 1e-8 * np.linalg.norm(target, 2)


def test_fractional_scalar_half_power():
    g = load_generator([[-1.0]])
    cfg = FractionalConfig(alpha=0.5, omega=4.0)
    val = fractional_power(g, cfg, sign=-1)
    assert abs(val[0, 0] - (-1j / np.sqrt(5.0))) < 1e-7


def test_fractional_half_composes_to_inverse():
    g = load_generator(np.diag([-1.0, -2.0]))
    cfg = FractionalConfig.for_generator(g, 0.5)
    half = fractional_power(g, cfg, sign=-1)
    cfg1 = FractionalConfig(alpha=1.0, omega=cfg.omega, theta=cfg.theta,
                            ray_length=cfg.ray_length)
    whole = fractional_power(g, cfg1, sign=-1)
    assert np.linalg.norm(half @ half - whole, 2) < 1e-7


def test_fractional_contour_vs_eigen_oracle():
    rng = np.random.default_rng(29)
    for alpha in (0.5, 1.5):
        g = make_hyperbolic(rng, n=6)
        cfg = FractionalConfig.for_generator(g, alpha)
        contour = fractional_power(g, cfg, sign=-1)
        oracle = fractional_power(g, cfg, sign=-1, method="oracle")
        rel = np.linalg.norm(contour - oracle, 2) / np.linalg.norm(oracle, 2)
        assert rel < 1e-6


def test_fractional_defective_contour_vs_schur_pade():
    # contour handles defective input; the eigen oracle must refuse it
    j = np.array([[-1.0, 1.0], [0.0, -1.0]])
    g = load_generator(j)
    cfg = FractionalConfig(alpha=0.5, omega=4.0)
    val = fractional_power(g, cfg, sign=-1)
    ref = scipy.linalg.fractional_matrix_power(j - 4.0 * np.eye(2), -0.5)
    assert np.linalg.norm(val - ref, 2) < 1e-6
    with pytest.raises(NumericalError):
        fractional_power(g, cfg, sign=-1, method="oracle")


def test_fractional_sign_plus_inverts():
    g = load_generator(np.diag([-1.0, -3.0]))
    cfg = FractionalConfig.for_generator(g, 0.5)
    neg = fractional_power(g, cfg, sign=-1)
    pos = fractional_power(g, cfg, sign=+1)
    np.testing.assert_allclose(pos @ neg, np.eye(2), atol=1e-9)


def test_fractional_config_validation():
    g = load_generator(np.diag([-1.0, 2.0]))
    with pytest.raises(InputError):
        fractional_power(g, FractionalConfig(alpha=0.5, omega=2.5), sign=-1)
    with pytest.raises(InputError):
        fractional_power(g, FractionalConfig(alpha=0.5, omega=6.0, theta=1.0), sign=-1)


def test_branch_positive_cut():
    # upper half-plane and negative reals agree with the principal branch
    assert abs(complex_power_positive_cut(-5.0, -0.5) - (-1j / np.sqrt(5))) < 1e-14
    z = -2.0 + 1.0j
    assert abs(complex_power_positive_cut(z, -0.5) - z ** (-0.5)) < 1e-14
    # lower half-plane differs by exp(-2 pi i alpha)
    z = -2.0 - 1.0j
    ratio = complex_power_positive_cut(z, -0.5) / z ** (-0.5)
    assert abs(ratio - np.exp(-2j * np.pi * -0.5)) < 1e-13


# ----------------------------------------------------------------- alpha norm

def test_alpha_norm_zero_is_euclidean():
    g = load_generator(np.diag([-1.0, 2.0]))
    x = np.array([3.0, 4.0])
    cfg = FractionalConfig.for_generator(g, 0.5)
    cfg_zero = FractionalConfig(alpha=0.5, omega=cfg.omega)
    cfg_zero.alpha = 0.0
    assert alpha_norm(g, x, cfg_zero) == pytest.approx(5.0)


def test_alpha_norm_scalar_first_power():
    g = load_generator([[-1.0]])
    cfg = FractionalConfig(alpha=1.0, omega=4.0)
    assert alpha_norm(g, np.array([1.0]), cfg) == pytest.approx(5.0, rel=1e-9)


def test_alpha_norm_log_convexity_on_normal():
    rng = np.random.default_rng(31)
    n = 5
    lam = -rng.uniform(0.5, 3.0, n) + 1j * rng.uniform(-2, 2, n)
    u = random_unitary(rng, n)
    g = load_generator((u * lam[None, :]) @ u.conj().T)
    cfg_h = FractionalConfig.for_generator(g, 0.5)
    cfg_1 = FractionalConfig(alpha=1.0, omega=cfg_h.omega, theta=cfg_h.theta,
                             ray_length=cfg_h.ray_length)
    for _ in range(5):
        x = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        lhs = alpha_norm(g, x, cfg_h)
        rhs = np.sqrt(np.linalg.norm(x) * alpha_norm(g, x, cfg_1))
        assert lhs <= rhs * (1 + 1e-8)


# --------------------------------------------- Laplace representation check

def test_laplace_representation_of_resolvent():
    rng = np.random.default_rng(37)
    g = make_hyperbolic(rng, n=5, re_max=1.5, im_max=1.5)
    spec = spectral_analysis(g)
    lam = spec.abscissa + 1.0 + 0.7j
    t_max = 40.0 / (lam.real - spec.abscissa)
    m = 8001
    ts = np.linspace(0.0, t_max, m)
    h = ts[1] - ts[0]
    w = np.ones(m)
    w[1:-1:2], w[2:-1:2] = 4.0, 2.0
    w *= h / 3.0
    acc = np.zeros((5, 5), dtype=complex)
    step = semigroup_apply(g, h)
    cur = np.eye(5, dtype=complex)
    for k in range(m):
        acc += w[k] * np.exp(-lam * ts[k]) * cur
        cur = step @ cur
    r = resolvent(g, lam)
    assert np.linalg.norm(acc - r, 2) <= 1e-6 * np.linalg.norm(r, 2)
