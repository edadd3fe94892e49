"""Mild solutions of u' = A u + g on the line via the resolvent multiplier.

For a hyperbolic generator the unique bounded mild solution of the forced
equation is u = M_0 g (equivalently the Green convolution G * g).  The
certificate of correctness is the integral-equation residual

    u(theta) - T_{theta-tau} u(tau) - int_tau^theta T_{theta-s} g(s) ds

evaluated over a lattice of (theta, tau) pairs; the evolution-semigroup
generator itself is never materialized.
"""

from dataclasses import dataclass

import numpy as np

from .errors import InputError, NotHyperbolicError
from .green import _gap_floor
from .multiplier import GridFunction, MultiplierConfig, apply_multiplier
from .operator_core import semigroup_apply, spectral_analysis

__all__ = ["MildSolution", "MildParams", "solve_mild", "mild_residual"]


@dataclass
class MildParams:
    """Residual-certificate lattice: pairs are drawn from the inner fraction
    of the grid (convolution tails wrap near the edges)."""

    n_points: int = 9
    inner_fraction: float = 0.8
    support_threshold: float = 1e-12


@dataclass
class MildSolution:
    u: GridFunction
    forcing: GridFunction
    residual_table: list  # (theta, tau, residual norm)

    @property
    def max_residual(self):
        return max((r for _, _, r in self.residual_table), default=0.0)


def _support_padding(g: GridFunction, threshold):
    norms = np.linalg.norm(np.atleast_2d(g.samples.T).T, axis=tuple(range(1, g.samples.ndim)))
    nz = np.nonzero(norms > threshold * max(norms.max(), 1e-300))[0]
    if nz.size == 0:
        return np.inf
    left = nz[0] * g.spacing
    right = (g.m - 1 - nz[-1]) * g.spacing
    return min(left, right)


def solve_mild(gen, g: GridFunction, params=None):
    """Solve the forced equation for compactly supported forcing.

    Requires a spectral gap; refuses otherwise since without it the bounded
    solution is not unique (the imaginary axis meets the spectrum).
    """
    if params is None:
        params = MildParams()
    spec = spectral_analysis(gen)
    if spec.gap <= _gap_floor(gen):
        raise NotHyperbolicError(
            "mild solver requires a hyperbolic generator: the spectral gap "
            f"{spec.gap:.2e} vanishes, so the imaginary axis is not uniformly "
            "in the resolvent set and bounded solutions are not unique"
        )
    pad = _support_padding(g, params.support_threshold)
    needed = 5.0 / spec.gap
    if pad < needed:
        raise InputError(
            f"forcing support too close to the grid edge: padding {pad:.3g} "
            f"< 5/omega = {needed:.3g}"
        )
    u = apply_multiplier(gen, MultiplierConfig(rho=0.0), g)
    pairs = _pair_lattice(g, params)
    table = mild_residual(gen, u, g, pairs, _table=True)
    return MildSolution(u=u, forcing=g, residual_table=table)


def _pair_lattice(g: GridFunction, params):
    m = g.m
    margin = int(round(0.5 * (1.0 - params.inner_fraction) * m))
    idx = np.unique(np.linspace(margin, m - 1 - margin, params.n_points).astype(int))
    grid = g.grid
    pairs = []
    for i, tau_i in enumerate(idx):
        for theta_i in idx[i + 1 :]:
            pairs.append((float(grid[theta_i]), float(grid[tau_i])))
    return pairs


def _grid_index(f: GridFunction, value):
    pos = (value - f.start) / f.spacing
    idx = int(round(pos))
    if idx < 0 or idx >= f.m or abs(pos - idx) > 1e-8:
        raise InputError(f"point {value} does not lie on the sample grid")
    return idx


def mild_residual(gen, u: GridFunction, g: GridFunction, pairs, _table=False):
    """Max over (theta, tau) pairs of the integral-equation defect.

    The integral uses composite trapezoid on the common grid, so theta and
    tau must be grid points and both functions must share one grid.
    """
    if abs(u.start - g.start) > 1e-12 or abs(u.spacing - g.spacing) > 1e-12 or u.m != g.m:
        raise InputError("solution and forcing grids are misaligned")
    h = g.spacing
    t_h = semigroup_apply(gen, h)
    # powers of the one-step propagator up to the longest pair span
    max_span = max(_grid_index(u, th) - _grid_index(u, ta) for th, ta in pairs)
    n = gen.n
    powers = np.empty((max_span + 1, n, n), dtype=complex)
    powers[0] = np.eye(n)
    for j in range(1, max_span + 1):
        powers[j] = t_h @ powers[j - 1]
    table = []
    worst = 0.0
    for theta, tau in pairs:
        i_th = _grid_index(u, theta)
        i_ta = _grid_index(u, tau)
        if i_th < i_ta:
            raise InputError("pairs must satisfy theta >= tau")
        span = i_th - i_ta
        hom = powers[span] @ u.samples[i_ta]
        seg = g.samples[i_ta : i_th + 1]
        w = np.ones(span + 1)
        if span >= 1:
            w[0] = w[-1] = 0.5
        kernel = powers[span::-1]
        forced = h * np.einsum("j,jkl,jl->k", w, kernel, seg)
        resid = float(np.linalg.norm(u.samples[i_th] - hom - forced))
        table.append((theta, tau, resid))
        worst = max(worst, resid)
    if _table:
        return table
    return worst
