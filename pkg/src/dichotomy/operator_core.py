"""Complex linear-algebra substrate: generators, semigroups, resolvents,
spectral data, the splitting-projection oracle, and fractional powers.

Conventions used across the package:

* the semigroup is ``t -> expm(t A)``;
* the resolvent is ``R(lambda) = (lambda I - A)^(-1)``;
* complex powers ``mu**a`` inside the fractional-power contour take the
  branch with ``arg mu`` in ``(0, 2 pi)`` (cut along the positive reals),
  which is the unique branch analytic on the region the contour encloses;
* dual pairings are bilinear, ``<x*, y> = sum_i x*_i y_i``, so the adjoint
  of a matrix is its plain transpose.
"""

from dataclasses import dataclass, field
from typing import Optional

import numpy as np
import scipy.linalg

from .errors import InputError, NotHyperbolicError, NumericalError, SpectrumHitError

__all__ = [
    "Generator",
    "SpectralData",
    "FractionalConfig",
    "load_generator",
    "spectral_analysis",
    "semigroup_apply",
    "resolvent",
    "resolvent_apply",
    "spectral_projection",
    "fractional_power",
    "alpha_norm",
    "complex_power_positive_cut",
]

# Scale-invariant cutoff: lambda counts as "on the spectrum" within this.
def _spectrum_tolerance(norm_a):
    return 1e-10 * (1.0 + norm_a)


_AXIS_TOL = 1e-12          # eigenvalue counts as on the imaginary axis
_ORACLE_KAPPA_MAX = 1e8    # eigenvector-basis conditioning the oracle accepts
_EXP_OVERFLOW = 700.0      # log of float64 overflow threshold


@dataclass
class SpectralData:
    """Eigendecomposition bundle used as the brute-force oracle.

    ``gap`` is min |Re lambda_i|, clamped to exactly 0 when some eigenvalue
    sits on the imaginary axis within 1e-12.  ``diagonalizable`` is a
    conditioning verdict (kappa below 1e8), not a rank-theoretic one.
    """

    eigenvalues: np.ndarray
    basis: np.ndarray
    basis_condition: float
    abscissa: float
    gap: float
    diagonalizable: bool


class Generator:
    """Square complex matrix generating the semigroup expm(t A).

    The matrix is frozen on construction (treat it as a value type).  The
    spectral cache is write-once: it is either filled eagerly at load time
    or by the first ``spectral_analysis`` call, after which concurrent
    readers are safe.
    """

    __slots__ = ("matrix", "n", "_spectral", "_norm")

    def __init__(self, matrix):
        a = np.array(matrix, dtype=complex)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise InputError(f"generator must be a square matrix, got shape {a.shape}")
        if a.shape[0] < 1:
            raise InputError("generator must have dimension >= 1")
        if not np.all(np.isfinite(a.view(float))):
            raise InputError("generator entries must be finite")
        a.setflags(write=False)
        self.matrix = a
        self.n = a.shape[0]
        self._spectral: Optional[SpectralData] = None
        self._norm = float(np.linalg.norm(a, 2))

    @property
    def norm(self):
        return self._norm

    @property
    def spectral(self):
        return self._spectral

    def __repr__(self):
        return f"Generator(n={self.n}, norm={self._norm:.3g})"


def load_generator(raw, eager_spectral=False):
    """Build a Generator from matrix-literal data (nested lists or ndarray).

    ``eager_spectral=True`` fills the spectral cache immediately, which is
    what concurrent contexts should use to avoid racing the write-once cache.
    """
    try:
        arr = np.array(raw, dtype=complex)
    except (TypeError, ValueError) as exc:
        raise InputError(f"cannot parse matrix data: {exc}") from exc
    gen = Generator(arr)
    if eager_spectral:
        spectral_analysis(gen)
    return gen


def spectral_analysis(gen):
    """Eigendecomposition of the generator, cached on it.

    Eigenvalues come back sorted by real part, descending.  The gap field
    is the distance from the spectrum to the imaginary axis.
    """
    if gen._spectral is not None:
        return gen._spectral
    try:
        lam, v = np.linalg.eig(gen.matrix)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"eigensolver failed on {gen!r}: {exc}") from exc
    order = np.argsort(-lam.real, kind="stable")
    lam = lam[order]
    v = v[:, order]
    with np.errstate(all="ignore"):
        kappa = float(np.linalg.cond(v))
    if not np.isfinite(kappa):
        kappa = np.inf
    gap = float(np.min(np.abs(lam.real)))
    if gap <= _AXIS_TOL:
        gap = 0.0
    data = SpectralData(
        eigenvalues=lam,
        basis=v,
        basis_condition=kappa,
        abscissa=float(np.max(lam.real)),
        gap=gap,
        diagonalizable=bool(kappa <= _ORACLE_KAPPA_MAX),
    )
    gen._spectral = data
    return data


def semigroup_apply(gen, t):
    """Evaluate T_t = expm(t A); negative t is fine in finite dimension.

    Raises NumericalError instead of returning Inf entries when t * Re(lambda)
    would overflow.
    """
    t = float(t)
    if not np.isfinite(t):
        raise InputError("time must be finite")
    spec = spectral_analysis(gen)
    if np.max(t * spec.eigenvalues.real) > _EXP_OVERFLOW:
        raise NumericalError(
            f"expm overflow: t * max Re(spectrum) = {t * spec.abscissa:.3g} exceeds "
            f"the floating-point range"
        )
    out = scipy.linalg.expm(t * gen.matrix)
    if not np.all(np.isfinite(out.view(float))):
        raise NumericalError("expm produced non-finite entries")
    return out


def _check_off_spectrum(gen, lam):
    spec = spectral_analysis(gen)
    dist = np.abs(spec.eigenvalues - lam)
    i = int(np.argmin(dist))
    tol = _spectrum_tolerance(gen.norm)
    if dist[i] <= tol:
        raise SpectrumHitError(
            f"lambda = {lam} is within {dist[i]:.2e} of the eigenvalue "
            f"{spec.eigenvalues[i]} (tolerance {tol:.2e})",
            point=lam,
            eigenvalue=spec.eigenvalues[i],
        )


def resolvent(gen, lam):
    """R(lambda) = (lambda I - A)^(-1), refusing points on the spectrum."""
    lam = complex(lam)
    _check_off_spectrum(gen, lam)
    n = gen.n
    return np.linalg.solve(lam * np.eye(n) - gen.matrix, np.eye(n))


def resolvent_apply(gen, lams, rhs, check=True, chunk=16384):
    """Batched resolvent action: stack of R(lams[k]) @ rhs.

    ``rhs`` is a vector (n,), a matrix (n, p), or per-node data with leading
    dimension len(lams).  Nodes are validated against the spectrum unless
    ``check=False``.  Work is chunked to bound memory.
    """
    lams = np.asarray(lams, dtype=complex).ravel()
    spec = spectral_analysis(gen)
    if check:
        dist = np.abs(lams[:, None] - spec.eigenvalues[None, :])
        k, i = np.unravel_index(np.argmin(dist), dist.shape)
        tol = _spectrum_tolerance(gen.norm)
        if dist[k, i] <= tol:
            raise SpectrumHitError(
                f"evaluation node {lams[k]} is within {dist[k, i]:.2e} of the "
                f"eigenvalue {spec.eigenvalues[i]}",
                point=lams[k],
                eigenvalue=spec.eigenvalues[i],
            )
    n = gen.n
    rhs = np.asarray(rhs, dtype=complex)
    per_node = rhs.ndim > 1 and rhs.shape[0] == lams.size and rhs.shape[1] == n
    out_shape = (lams.size,) + (rhs.shape[1:] if per_node else rhs.shape)
    out = np.empty(out_shape, dtype=complex)
    eye = np.eye(n)
    for lo in range(0, lams.size, chunk):
        hi = min(lo + chunk, lams.size)
        mats = lams[lo:hi, None, None] * eye - gen.matrix
        if per_node:
            b = rhs[lo:hi]
            if b.ndim == 2:
                out[lo:hi] = np.linalg.solve(mats, b[..., None])[..., 0]
            else:
                out[lo:hi] = np.linalg.solve(mats, b)
        elif rhs.ndim == 1:
            b = np.broadcast_to(rhs[None, :, None], (hi - lo, n, 1))
            out[lo:hi] = np.linalg.solve(mats, b)[..., 0]
        else:
            b = np.broadcast_to(rhs[None, :, :], (hi - lo,) + rhs.shape)
            out[lo:hi] = np.linalg.solve(mats, b)
    return out


def spectral_projection(gen):
    """Riesz projection onto the stable (Re lambda < 0) invariant subspace.

    Computed from a sorted complex Schur form plus one Sylvester solve, so
    defective matrices are fine.  This is the oracle realization of the
    splitting projection; it demands a genuine spectral gap.
    """
    spec = spectral_analysis(gen)
    if spec.gap <= 0.0:
        bad = spec.eigenvalues[np.argmin(np.abs(spec.eigenvalues.real))]
        raise NotHyperbolicError(
            f"no spectral gap: eigenvalue {bad} lies on the imaginary axis "
            f"(min |Re| = {np.min(np.abs(spec.eigenvalues.real)):.2e})"
        )
    n = gen.n
    t, z, sdim = scipy.linalg.schur(
        np.array(gen.matrix), output="complex", sort=lambda lam: lam.real < 0
    )
    if sdim == 0:
        return np.zeros((n, n), dtype=complex)
    if sdim == n:
        return np.eye(n, dtype=complex)
    t11 = t[:sdim, :sdim]
    t12 = t[:sdim, sdim:]
    t22 = t[sdim:, sdim:]
    y = scipy.linalg.solve_sylvester(t11, -t22, t12)
    core = np.zeros((n, n), dtype=complex)
    core[:sdim, :sdim] = np.eye(sdim)
    core[:sdim, sdim:] = y
    p = z @ core @ z.conj().T
    defect = np.linalg.norm(p @ p - p, 2)
    if defect > 1e-9 * (1.0 + np.linalg.norm(p, 2) ** 2):
        raise NumericalError(f"spectral projection failed idempotency: defect {defect:.2e}")
    return p


def complex_power_positive_cut(mu, exponent):
    """mu**exponent on the branch with arg(mu) in (0, 2 pi].

    The cut sits on the positive real axis, so the function is analytic on
    the region enclosed by the fractional-power contour (which flanks the
    positive reals and crosses the negative axis at its vertex).
    """
    mu = np.asarray(mu, dtype=complex)
    ang = np.angle(mu)
    ang = np.where(ang <= 0.0, ang + 2.0 * np.pi, ang)
    r = np.abs(mu)
    return np.exp(exponent * (np.log(r) + 1j * ang))


@dataclass
class FractionalConfig:
    """Knobs for the fractional-power contour.

    The contour consists of two rays leaving -1 at angles +-theta (opening
    toward the right, flanking the positive real axis) closed by the arc
    |mu + 1| = ray_length.  ``omega`` must exceed the spectral abscissa by
    more than 1 so every eigenvalue of A - omega I sits strictly left of
    the vertex and the resolvent decays like 1/(1+|mu|) along the rays.
    """

    alpha: float
    omega: float
    theta: float = np.pi / 12
    ray_length: float = 50.0
    nodes_per_ray: int = 200
    quad_tolerance: float = 1e-8

    def validate_for(self, gen):
        if not (self.alpha > 0):
            raise InputError(f"alpha must be positive, got {self.alpha}")
        if not (0.0 < self.theta < np.pi / 6):
            raise InputError(f"theta must lie in (0, pi/6), got {self.theta}")
        if self.ray_length <= 0 or self.nodes_per_ray < 8:
            raise InputError("ray_length must be positive and nodes_per_ray >= 8")
        spec = spectral_analysis(gen)
        if not (self.omega > spec.abscissa + 1.0):
            raise InputError(
                f"omega = {self.omega} must exceed the spectral abscissa "
                f"{spec.abscissa:.6g} by more than 1"
            )

    @classmethod
    def for_generator(cls, gen, alpha, theta=np.pi / 12, nodes_per_ray=200):
        spec = spectral_analysis(gen)
        omega = max(spec.abscissa + 3.0, 3.0)
        ray = max(50.0, 10.0 * gen.norm)
        return cls(alpha=alpha, omega=omega, theta=theta, ray_length=ray,
                   nodes_per_ray=nodes_per_ray)


def _gauss_panels(a, b, edges_ratio, n_per_panel):
    """Gauss-Legendre nodes/weights on [a, b] over geometrically graded panels."""
    edges = [a]
    w = max((b - a) * 1e-3, 0.25)
    x = a
    while x + w < b:
        x += w
        edges.append(x)
        w *= edges_ratio
    edges.append(b)
    base_x, base_w = np.polynomial.legendre.leggauss(n_per_panel)
    xs, ws = [], []
    for lo, hi in zip(edges[:-1], edges[1:]):
        mid, half = 0.5 * (hi + lo), 0.5 * (hi - lo)
        xs.append(mid + half * base_x)
        ws.append(half * base_w)
    return np.concatenate(xs), np.concatenate(ws)


def _contour_nodes(cfg, scale=1):
    """Quadrature nodes (mu) and complex weights (dmu) for the closed contour.

    Orientation runs up the lower ray, out the upper ray, then around the
    arc counterclockwise, which winds once around everything left of the
    right-opening wedge.
    """
    theta, ell = cfg.theta, cfg.ray_length
    n_ray = int(cfg.nodes_per_ray * scale)
    t, wt = _gauss_panels(0.0, ell, 1.9, max(12, n_ray // 12))
    up = np.exp(1j * theta)
    dn = np.exp(-1j * theta)
    mu_up = -1.0 + t * up
    mu_dn = -1.0 + t * dn
    n_arc = max(96, int(2 * n_ray * scale))
    phi, wphi = _gauss_panels(theta, 2.0 * np.pi - theta, 1.0, max(24, n_arc // 8))
    mu_arc = -1.0 + ell * np.exp(1j * phi)
    mus = np.concatenate([mu_up, mu_dn, mu_arc])
    weights = np.concatenate([wt * up, -wt * dn, wphi * 1j * ell * np.exp(1j * phi)])
    return mus, weights


def _contour_collision_check(cfg, gen):
    spec = spectral_analysis(gen)
    mu = spec.eigenvalues - cfg.omega
    zeta = mu + 1.0
    radius = np.abs(zeta)
    if np.any(radius >= cfg.ray_length - 1.0):
        raise NumericalError(
            "contour arc does not enclose the shifted spectrum; increase ray_length "
            f"(need > {np.max(radius) + 1.0:.3g})"
        )
    # Distance from each shifted eigenvalue to the two rays and to the arc.
    ang = np.abs(np.angle(zeta))
    if np.any(ang <= cfg.theta):
        raise NumericalError(
            "shifted spectrum enters the excluded wedge around the positive reals; "
            "increase omega"
        )
    for sgn in (+1.0, -1.0):
        direction = np.exp(1j * sgn * cfg.theta)
        proj = np.clip((zeta * np.conj(direction)).real, 0.0, cfg.ray_length)
        d = np.abs(zeta - proj * direction)
        if np.min(d) <= 1e-8:
            k = int(np.argmin(d))
            raise NumericalError(
                f"contour passes within {d[k]:.2e} of the shifted eigenvalue {mu[k]}"
            )
    d_arc = np.abs(radius - cfg.ray_length)
    if np.min(d_arc) <= 1e-8:
        raise NumericalError("contour arc passes through the shifted spectrum")


def _fractional_contour(gen, cfg, scale=1):
    mus, weights = _contour_nodes(cfg, scale=scale)
    vals = complex_power_positive_cut(mus, -cfg.alpha)
    res = resolvent_apply(gen, mus + cfg.omega, np.eye(gen.n), check=False)
    integrand = vals[:, None, None] * res
    total = np.tensordot(weights, integrand, axes=(0, 0))
    return total / (2j * np.pi)


def fractional_power(gen, cfg, sign=-1, method="contour"):
    """(A - omega I)^(sign * alpha) by Cauchy-contour quadrature.

    ``sign=-1`` evaluates the contour integral of mu^(-alpha) R(mu + omega);
    ``sign=+1`` inverts that result.  ``method='oracle'`` instead raises the
    shifted eigenvalues to the power directly through the eigenbasis, using
    the same positive-cut branch the contour integral induces (equal to the
    principal branch whenever the spectrum avoids the open lower half-plane).
    """
    if sign not in (-1, +1):
        raise InputError("sign must be -1 or +1")
    cfg.validate_for(gen)
    if method == "oracle":
        spec = spectral_analysis(gen)
        if spec.basis_condition > _ORACLE_KAPPA_MAX:
            raise NumericalError(
                f"eigenbasis condition {spec.basis_condition:.2e} exceeds 1e8: "
                "the eigendecomposition oracle refuses defective input"
            )
        powers = complex_power_positive_cut(spec.eigenvalues - cfg.omega, sign * cfg.alpha)
        v = spec.basis
        return v @ np.diag(powers) @ np.linalg.inv(v)
    if method != "contour":
        raise InputError(f"unknown method {method!r}")
    _contour_collision_check(cfg, gen)
    coarse = _fractional_contour(gen, cfg, scale=1)
    fine = _fractional_contour(gen, cfg, scale=2)
    diff = np.linalg.norm(fine - coarse, 2)
    if diff > cfg.quad_tolerance * (1.0 + np.linalg.norm(fine, 2)):
        raise NumericalError(
            f"contour quadrature did not converge: refinement changed the result "
            f"by {diff:.2e}"
        )
    neg = fine
    if sign == -1:
        return neg
    return np.linalg.solve(neg, np.eye(gen.n))


def alpha_norm(gen, x, cfg):
    """Graph-type norm ||x||_alpha = ||(A - omega I)^alpha x||.

    alpha = 0 returns the plain Euclidean norm.
    """
    x = np.asarray(x, dtype=complex)
    if cfg.alpha == 0:
        return float(np.linalg.norm(x))
    a_pow = fractional_power(gen, cfg, sign=+1)
    return float(np.linalg.norm(a_pow @ x))
