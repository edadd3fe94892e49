"""Cesaro/Fejer machinery for oscillatory resolvent integrals.

The (C,1) average of truncated integrals equals the Fejer-weighted
integral

    (1/2pi) int_{-N}^{N} f(s) e^{ist} (1 - |s|/N) ds,

so every Cesaro limit here is evaluated as a weighted trapezoid sum on a
uniform grid and tested for stabilization along a refinement ladder.
Uniform sampling makes the dominant discretization error the Poisson
aliasing of the (exponentially decaying) inverse transform, which is
negligible next to the O(1/N) Fejer truncation tail.
"""

from dataclasses import dataclass, field
from typing import Callable, Sequence, Tuple

import numpy as np

from .errors import InputError, SpectrumHitError
from .operator_core import resolvent_apply, spectral_analysis

__all__ = [
    "QuadratureParams",
    "CesaroResult",
    "fejer_weighted_integral",
    "cesaro_ladder",
    "laplace_inversion",
]


@dataclass
class QuadratureParams:
    """Numerical knobs for one Cesaro evaluation.

    ``ladder`` is a list of (S, h, N) triples, increasing in S and N, used
    to estimate convergence; ``truncation``/``spacing``/``fejer_n`` describe
    the finest rung.  ``tolerance`` is the relative stabilization threshold
    for declaring the ladder converged (the (C,1) limit has O(1/N) tails,
    so tight defaults would be misleadingly expensive).
    """

    truncation: float
    spacing: float
    fejer_n: float
    ladder: Tuple[Tuple[float, float, float], ...] = ()
    tolerance: float = 1e-3

    def __post_init__(self):
        if self.truncation <= 0 or self.spacing <= 0 or self.fejer_n <= 0:
            raise InputError("truncation, spacing, and fejer_n must be positive")
        if self.fejer_n > self.truncation:
            raise InputError("fejer_n must not exceed the truncation radius")
        if not self.ladder:
            self.ladder = ((self.truncation, self.spacing, self.fejer_n),)
        prev = (0.0, 0.0)
        for s, h, n in self.ladder:
            if n > s:
                raise InputError("ladder rungs need N <= S")
            if s < prev[0] or n < prev[1]:
                raise InputError("ladder must be non-decreasing in S and N")
            prev = (s, n)

    def validate_for_time(self, t_max):
        """Nyquist-style sampling check for targets up to |t| = t_max."""
        bound = min(0.1, np.pi / (4.0 * max(t_max, 1e-12)))
        if self.spacing > bound * (1 + 1e-12):
            raise InputError(
                f"grid spacing {self.spacing} too coarse for times up to {t_max}; "
                f"need h <= {bound:.4g}"
            )

    @classmethod
    def from_ladder(cls, ladder, tolerance=1e-3):
        s, h, n = ladder[-1]
        return cls(truncation=s, spacing=h, fejer_n=n, ladder=tuple(ladder),
                   tolerance=tolerance)

    @classmethod
    def default_laplace(cls, tolerance=1e-3):
        return cls.from_ladder(
            [(4000.0, 0.1, 4000.0), (8000.0, 0.1, 8000.0), (16000.0, 0.1, 16000.0)],
            tolerance=tolerance,
        )

    @classmethod
    def default_green(cls, tolerance=1e-3):
        return cls.from_ladder(
            [(1000.0, 0.05, 1000.0), (2000.0, 0.05, 2000.0), (4000.0, 0.05, 4000.0)],
            tolerance=tolerance,
        )


@dataclass
class CesaroResult:
    """Outcome of a ladder evaluation; non-convergence is a verdict, not an error."""

    value: np.ndarray
    converged: bool
    residual_estimate: float
    ladder_values: list = field(default_factory=list)


def _check_uniform(s):
    s = np.asarray(s, dtype=float)
    if s.size < 2:
        raise InputError("need at least two sample points")
    steps = np.diff(s)
    h = steps[0]
    if h <= 0 or np.any(np.abs(steps - h) > 1e-9 * max(1.0, abs(h))):
        raise InputError("sample grid must be uniform and increasing")
    return h


def fejer_weighted_integral(s, values, t, fejer_n, spacing=None):
    """(1/2pi) int_{-N}^{N} f(s) e^{ist} (1 - |s|/N) ds by composite trapezoid.

    ``values`` holds f on the uniform grid ``s`` (leading axis matches s);
    samples beyond |s| = N carry zero weight, so the grid may be wider.
    """
    s = np.asarray(s, dtype=float)
    values = np.asarray(values)
    h = _check_uniform(s)
    if spacing is not None and abs(spacing - h) > 1e-9 * max(1.0, h):
        raise InputError(f"declared spacing {spacing} does not match the grid ({h})")
    if values.shape[0] != s.size:
        raise InputError("values must be sampled on the given grid")
    if s[0] > -fejer_n + h or s[-1] < fejer_n - h:
        raise InputError("grid must cover [-N, N]")
    weight = np.clip(1.0 - np.abs(s) / fejer_n, 0.0, None)
    phase = np.exp(1j * s * t)
    w = weight * phase
    w[0] *= 0.5
    w[-1] *= 0.5
    extra = (1,) * (values.ndim - 1)
    return (h / (2.0 * np.pi)) * np.sum(w.reshape(-1, *extra) * values, axis=0)


def _grid_for(s_max, h):
    m = int(round(s_max / h))
    return np.arange(-m, m + 1) * h


def cesaro_ladder(integrand: Callable, t, params: QuadratureParams):
    """Evaluate the Fejer-weighted integral along the refinement ladder.

    ``integrand`` maps an array of real nodes s to samples f(s) (leading
    axis = nodes).  Rungs sharing the same spacing reuse one sampling sweep
    of the widest grid.
    """
    groups = {}
    for srad, h, n in params.ladder:
        groups.setdefault(h, []).append((srad, n))
    ladder_values = []
    for h, rungs in groups.items():
        grid = _grid_for(max(min(srad, n) for srad, n in rungs), h)
        samples = np.asarray(integrand(grid))
        for srad, n in rungs:
            mask = np.abs(grid) <= min(srad, n) + 0.5 * h
            ladder_values.append(
                fejer_weighted_integral(grid[mask], samples[mask], t, n)
            )
    if len(ladder_values) >= 2:
        diff = float(np.linalg.norm(np.asarray(ladder_values[-1]) - np.asarray(ladder_values[-2])))
        converged = diff <= params.tolerance * (1.0 + float(np.linalg.norm(ladder_values[-1])))
    else:
        diff = np.inf
        converged = False
    return CesaroResult(
        value=ladder_values[-1],
        converged=converged,
        residual_estimate=diff,
        ladder_values=ladder_values,
    )


def laplace_inversion(gen, x, t, rho, params=None):
    """Cesaro Laplace inversion (1/2pi i) int_{Re lambda = rho} e^{lambda t} R(lambda) x dlambda.

    For rho to the right of the spectrum this reproduces the semigroup for
    t > 0, the midpoint x/2 at the jump t = 0, and 0 for t < 0.
    """
    x = np.asarray(x, dtype=complex)
    spec = spectral_analysis(gen)
    re_parts = spec.eigenvalues.real
    tol = 1e-10 * (1.0 + gen.norm)
    nearest = int(np.argmin(np.abs(re_parts - rho)))
    if abs(re_parts[nearest] - rho) <= tol:
        raise SpectrumHitError(
            f"rho = {rho} coincides with Re of eigenvalue {spec.eigenvalues[nearest]}",
            point=rho,
            eigenvalue=spec.eigenvalues[nearest],
        )
    if rho < spec.abscissa:
        raise InputError(
            f"rho = {rho} must lie to the right of the spectral abscissa "
            f"{spec.abscissa:.6g}"
        )
    if params is None:
        params = QuadratureParams.default_laplace()
    params.validate_for_time(abs(t))

    def integrand(s):
        return resolvent_apply(gen, rho + 1j * s, x, check=False)

    result = cesaro_ladder(integrand, t, params)
    return np.exp(rho * t) * result.value
