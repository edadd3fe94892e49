"""Resolvent Fourier multipliers on the sampled line and the discrete torus.

Transform convention (fixed package-wide): the forward transform carries
no prefactor and the inverse carries 1/2pi,

    fhat(t) = int f(s) e^{-ist} ds,      fcheck(t) = (1/2pi) int f(s) e^{ist} ds,

so convolution satisfies (k * f)^ = khat fhat with no extra constant.  The
line multiplier with shift rho acts by f -> [R(i. + rho) fhat]^v.
"""

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .errors import InputError, NumericalError, SpectrumHitError
from .operator_core import (
    resolvent_apply,
    semigroup_apply,
    spectral_analysis,
)

__all__ = [
    "GridFunction",
    "TorusFunction",
    "MultiplierConfig",
    "ProbeFamily",
    "transform",
    "apply_multiplier",
    "lp_norm",
    "weak_l1_quasinorm",
    "estimate_multiplier_norm",
    "KvlReport",
    "kvl_functional",
    "KernelGrid",
    "KernelIdentityResiduals",
    "kernel_identity_checks",
    "resolvent_kernel_samples",
    "discrete_multiplier",
    "semigroup_convolution_torus",
    "check_klt_identity",
    "cesaro_resolvent_sum",
    "CesaroSumResult",
    "annulus_scan",
    "AnnulusScanResult",
]


@dataclass(frozen=True)
class GridFunction:
    """Uniformly sampled function on [start, start + (m-1) spacing].

    ``samples`` is (m,) for scalar values or (m, n) for vector values.
    """

    start: float
    spacing: float
    samples: np.ndarray

    def __post_init__(self):
        samples = np.asarray(self.samples, dtype=complex)
        object.__setattr__(self, "samples", samples)
        if samples.shape[0] < 2:
            raise InputError("grid functions need at least two samples")
        if self.spacing <= 0:
            raise InputError("grid spacing must be positive")
        if not np.all(np.isfinite(samples.view(float))):
            raise InputError("grid samples must be finite")

    @property
    def m(self):
        return self.samples.shape[0]

    @property
    def grid(self):
        return self.start + self.spacing * np.arange(self.m)

    @property
    def is_vector(self):
        return self.samples.ndim == 2

    def value_dim(self):
        return self.samples.shape[1] if self.is_vector else 1

    @classmethod
    def from_callable(cls, func, start, spacing, m):
        s = start + spacing * np.arange(m)
        return cls(start, spacing, np.asarray(func(s), dtype=complex))

    @classmethod
    def centered(cls, func, halfwidth, spacing):
        m = int(round(halfwidth / spacing))
        s = spacing * np.arange(-m, m + 1)
        return cls(float(s[0]), spacing, np.asarray(func(s), dtype=complex))


def _dual_grid(m, h):
    sigma = 2.0 * np.pi / (m * h)
    m0 = m // 2
    return -m0 * sigma, sigma


def transform(f: GridFunction, direction: str) -> GridFunction:
    """Discrete realization of the transform pair on the centered dual grid.

    forward:  F(t_k) = h sum_j f(s_j) e^{-i t_k s_j}
    inverse:  F(t_k) = (h/2pi) sum_j f(s_j) e^{+i t_k s_j}

    The dual grid has spacing 2pi/(m h); a forward transform followed by
    ``_inverse_onto`` the original grid round-trips exactly (one FFT pair).
    """
    m, h = f.m, f.spacing
    start, sigma = _dual_grid(m, h)
    m0 = m // 2
    j = np.arange(m)
    t = start + sigma * np.arange(m)
    shape_tail = (1,) * (f.samples.ndim - 1)
    pre = np.exp(2j * np.pi * m0 * j / m).reshape(-1, *shape_tail)
    if direction == "forward":
        core = np.fft.fft(f.samples * pre, axis=0)
        vals = h * np.exp(-1j * t * f.start).reshape(-1, *shape_tail) * core
    elif direction == "inverse":
        core = m * np.fft.ifft(f.samples * np.conj(pre), axis=0)
        vals = (h / (2.0 * np.pi)) * np.exp(1j * t * f.start).reshape(-1, *shape_tail) * core
    else:
        raise InputError(f"direction must be 'forward' or 'inverse', got {direction!r}")
    return GridFunction(start, sigma, vals)


def _inverse_onto(values, dual_start, dual_spacing, target: GridFunction):
    """Inverse transform of dual-grid samples back onto the target grid (exact pairing)."""
    m = values.shape[0]
    if target.m != m:
        raise InputError("dual data and target grid must have equal length")
    m0 = m // 2
    t = dual_start + dual_spacing * np.arange(m)
    shape_tail = (1,) * (values.ndim - 1)
    j = np.arange(m)
    weighted = values * np.exp(1j * target.start * t).reshape(-1, *shape_tail)
    core = m * np.fft.ifft(weighted, axis=0)
    phase = np.exp(-2j * np.pi * j * m0 / m).reshape(-1, *shape_tail)
    vals = (dual_spacing / (2.0 * np.pi)) * phase * core
    return GridFunction(target.start, target.spacing, vals)


@dataclass
class MultiplierConfig:
    """Vertical-line shift for the multiplier symbol R(is + rho).

    ``rho0`` is the half-width of the admissible shift band; in the
    hyperbolic setting it must stay below the spectral gap.  ``validate_band``
    enforces |rho| < rho0 < gap; plain ``apply_multiplier`` only needs the
    per-node spectrum check, so growth-bound scans may use shifts outside
    the band.
    """

    rho: float = 0.0
    rho0: Optional[float] = None

    def band_halfwidth(self, gen):
        if self.rho0 is not None:
            return self.rho0
        return 0.9 * spectral_analysis(gen).gap

    def validate_band(self, gen):
        gap = spectral_analysis(gen).gap
        rho0 = self.band_halfwidth(gen)
        if not (rho0 > 0 and rho0 < gap + 1e-15):
            raise InputError(f"band half-width {rho0} must lie in (0, spectral gap {gap})")
        if abs(self.rho) >= rho0:
            raise InputError(f"|rho| = {abs(self.rho)} must stay below rho0 = {rho0}")


def apply_multiplier(gen, cfg: MultiplierConfig, f: GridFunction) -> GridFunction:
    """Line multiplier M_rho f = [R(i. + rho) fhat]^v on f's own grid.

    Every dual node is checked against the spectrum; a hit names the node
    and the eigenvalue.
    """
    if not f.is_vector or f.value_dim() != gen.n:
        raise InputError("f must be vector-valued with values in C^n")
    fhat = transform(f, "forward")
    freqs = fhat.grid
    spec = spectral_analysis(gen)
    pts = 1j * freqs[:, None] + cfg.rho
    dist = np.abs(pts - spec.eigenvalues[None, :])
    k, i = np.unravel_index(np.argmin(dist), dist.shape)
    tol = 1e-10 * (1.0 + gen.norm)
    if dist[k, i] <= tol:
        raise SpectrumHitError(
            f"multiplier symbol undefined: grid node s = {freqs[k]:.6g} gives "
            f"i s + rho within {dist[k, i]:.2e} of eigenvalue {spec.eigenvalues[i]}",
            point=complex(pts[k, i]),
            eigenvalue=spec.eigenvalues[i],
        )
    mult = resolvent_apply(gen, 1j * freqs + cfg.rho, fhat.samples, check=False)
    return _inverse_onto(mult, fhat.start, fhat.spacing, f)


def _value_norms(f: GridFunction):
    if f.is_vector:
        return np.linalg.norm(f.samples, axis=1)
    return np.abs(f.samples)


def lp_norm(f: GridFunction, p):
    """Riemann-sum L_p norm of the sampled function (p >= 1 or inf)."""
    norms = _value_norms(f)
    if p == np.inf or p == "inf":
        return float(np.max(norms))
    p = float(p)
    if p < 1:
        raise InputError("p must be >= 1 or inf")
    return float((f.spacing * np.sum(norms**p)) ** (1.0 / p))


def weak_l1_quasinorm(f: GridFunction):
    """sup_sigma sigma * mes{ s : ||f(s)|| >= sigma } on the sampled step function.

    Each sample occupies measure h; the supremum is attained at one of the
    sampled values, so sorting descending gives the exact answer
    max_k value_k * (k h).
    """
    norms = np.sort(_value_norms(f))[::-1]
    k = np.arange(1, norms.size + 1)
    return float(np.max(norms * k * f.spacing))


@dataclass
class ProbeFamily:
    """Deterministic probe family for operator-norm lower bounds.

    Gaussians and indicator blocks, optionally modulated at the eigenvalue
    frequencies (where the resolvent peaks), tensored with seeded random
    unit vectors plus the stable/unstable eigenvector directions.
    """

    seed: int = 0
    widths: Sequence[float] = (1.0, 4.0, 16.0)
    n_random_vectors: int = 2
    use_eigenvectors: bool = True
    include_indicator: bool = True
    extra_frequencies: Sequence[float] = ()
    halfwidth: float = 200.0
    spacing: float = 0.05

    def vectors(self, gen):
        rng = np.random.default_rng(self.seed)
        vecs = []
        for _ in range(self.n_random_vectors):
            v = rng.standard_normal(gen.n) + 1j * rng.standard_normal(gen.n)
            vecs.append(v / np.linalg.norm(v))
        if self.use_eigenvectors:
            spec = spectral_analysis(gen)
            for idx in (0, gen.n - 1):
                v = spec.basis[:, idx]
                vecs.append(v / np.linalg.norm(v))
        return vecs

    def envelopes(self):
        envs = []
        for w in self.widths:
            envs.append(("gauss", w, lambda s, w=w: np.exp(-(s**2) / (2.0 * w**2))))
        if self.include_indicator:
            envs.append(("block", 2.0, lambda s: (np.abs(s) <= 1.0).astype(float)))
        return envs

    def frequencies(self, gen):
        freqs = {0.0}
        spec = spectral_analysis(gen)
        freqs.update(float(v) for v in spec.eigenvalues.imag)
        freqs.update(float(v) for v in self.extra_frequencies)
        return sorted(freqs)

    def build(self, gen):
        probes = []
        vecs = self.vectors(gen)
        freqs = self.frequencies(gen)
        m0 = int(round(self.halfwidth / self.spacing))
        s = self.spacing * np.arange(-m0, m0 + 1)
        for _, _, env in self.envelopes():
            base = env(s)
            for omega0 in freqs:
                scalar = base * np.exp(1j * omega0 * s)
                for v in vecs:
                    probes.append(
                        GridFunction(float(s[0]), self.spacing, scalar[:, None] * v[None, :])
                    )
        return probes


def _symbol_matrices(gen, cfg, template: GridFunction):
    """Resolvent symbol R(i s_k + rho) at the dual nodes of the template grid."""
    fhat = transform(template, "forward")
    freqs = fhat.grid
    spec = spectral_analysis(gen)
    pts = 1j * freqs[:, None] + cfg.rho
    dist = np.abs(pts - spec.eigenvalues[None, :])
    k, i = np.unravel_index(np.argmin(dist), dist.shape)
    tol = 1e-10 * (1.0 + gen.norm)
    if dist[k, i] <= tol:
        raise SpectrumHitError(
            f"multiplier symbol undefined: grid node s = {freqs[k]:.6g} gives "
            f"i s + rho within {dist[k, i]:.2e} of eigenvalue {spec.eigenvalues[i]}",
            point=complex(pts[k, i]),
            eigenvalue=spec.eigenvalues[i],
        )
    eye = np.eye(gen.n)
    mats = (1j * freqs)[:, None, None] * eye + cfg.rho * eye - gen.matrix
    return np.linalg.solve(mats, np.broadcast_to(eye, mats.shape)), fhat


def _lp_of_norms(norms, spacing, p):
    if p == np.inf or p == "inf":
        return np.max(norms, axis=0)
    return (spacing * np.sum(norms ** float(p), axis=0)) ** (1.0 / float(p))


def estimate_multiplier_norm(gen, cfg, p, probes=None, weight=None):
    """Lower bound for the L_p operator norm of the line multiplier.

    Maximizes ||M_rho f||_p / ||f||_p over the probe family; monotone in
    the family, and always a lower bound, never the norm itself.  ``weight``
    right-multiplies the symbol (used for smoothing-scale symbols
    R(is + rho) W).  Probes sharing a grid ride one symbol evaluation and
    one batched transform pass.
    """
    if probes is None:
        probes = ProbeFamily()
    family = probes.build(gen) if isinstance(probes, ProbeFamily) else list(probes)
    if p != np.inf and p != "inf" and float(p) < 1:
        raise InputError("p must be >= 1 or inf")
    groups = {}
    for f in family:
        groups.setdefault((f.start, f.spacing, f.m), []).append(f)
    best = 0.0
    for (start, spacing, m), members in groups.items():
        stack = np.stack([f.samples for f in members], axis=1)  # (m, P, n)
        if weight is not None:
            stack = stack @ weight.T
        template = GridFunction(start, spacing, stack[:, 0, :])
        symbols, _ = _symbol_matrices(gen, cfg, template)
        fhat = transform(GridFunction(start, spacing, stack), "forward")
        mult = np.einsum("kab,kpb->kpa", symbols, fhat.samples)
        out = _inverse_onto(mult, fhat.start, fhat.spacing,
                            GridFunction(start, spacing, stack))
        in_norms = _lp_of_norms(np.linalg.norm(stack, axis=2), spacing, p)
        out_norms = _lp_of_norms(np.linalg.norm(out.samples, axis=2), spacing, p)
        ok = in_norms > 0
        if np.any(ok):
            best = max(best, float(np.max(out_norms[ok] / in_norms[ok])))
    return best


@dataclass
class KvlReport:
    """Value and bound diagnostics of the resolvent matrix-element functional."""

    value: complex
    ratio: float
    phi_check_l1: float


def kvl_functional(gen, rho, x, xstar, phi: GridFunction):
    """<r_rho, Phi> = int <x*, R(is + rho) x> Phi(s) ds, plus a bound report.

    The report carries |<r_rho, Phi>| / (||x|| ||x*|| ||Phi^v||_1); its
    supremum over a probe family estimates the K_rho constant in the
    matrix-element characterization of hyperbolicity.
    """
    x = np.asarray(x, dtype=complex)
    xstar = np.asarray(xstar, dtype=complex)
    if phi.is_vector:
        raise InputError("Phi must be scalar-valued")
    spec = spectral_analysis(gen)
    tol = 1e-10 * (1.0 + gen.norm)
    if np.min(np.abs(spec.eigenvalues.real - rho)) <= tol:
        i = int(np.argmin(np.abs(spec.eigenvalues.real - rho)))
        raise SpectrumHitError(
            f"rho = {rho} meets Re of eigenvalue {spec.eigenvalues[i]}",
            point=rho,
            eigenvalue=spec.eigenvalues[i],
        )
    s = phi.grid
    rx = resolvent_apply(gen, 1j * s + rho, x, check=False)
    r_scalar = rx @ xstar
    w = np.ones_like(s)
    w[0] = w[-1] = 0.5
    value = complex(phi.spacing * np.sum(w * r_scalar * phi.samples))
    phi_check = transform(phi, "inverse")
    l1 = lp_norm(phi_check, 1)
    denom = np.linalg.norm(x) * np.linalg.norm(xstar) * l1
    ratio = abs(value) / denom if denom > 0 else 0.0
    return KvlReport(value=value, ratio=ratio, phi_check_l1=l1)


def _kernel_payload(gen, x, xstar, rho, s):
    """Trapezoid payload of the corrected inverse transform of
    <x*, R(is + rho) x>, plus its closed-form restoration coefficients.

    Two terms of the large-s expansion around a reference pole at -w are
    removed (they restore as c0 e^{-wt} + c1 t e^{-wt} on t > 0), leaving
    an O(s^-3) remainder whose truncated oscillatory transform is
    uniformly small.
    """
    x = np.asarray(x, dtype=complex)
    xstar = np.asarray(xstar, dtype=complex)
    w = 1.0 + abs(rho)
    b = gen.matrix - rho * np.eye(gen.n)
    c0 = xstar @ x
    c1 = xstar @ ((b + w * np.eye(gen.n)) @ x)
    rx = resolvent_apply(gen, 1j * s + rho, x, check=True)
    r_scalar = rx @ xstar
    zs = 1j * s + w
    remainder = r_scalar - c0 / zs - c1 / zs**2
    trapw = np.ones_like(s)
    trapw[0] = trapw[-1] = 0.5
    return remainder * trapw, c0, c1, w


def _kernel_from_payload(payload, c0, c1, w, s, spacing, ts, phases=None):
    ts = np.asarray(ts, dtype=float)
    out = np.empty(ts.size, dtype=complex)
    if phases is not None:
        out[:] = (spacing / (2.0 * np.pi)) * (phases @ payload)
    else:
        for lo in range(0, ts.size, 64):
            hi = min(lo + 64, ts.size)
            block = np.exp(1j * np.outer(ts[lo:hi], s))
            out[lo:hi] = (spacing / (2.0 * np.pi)) * (block @ payload)
    pos = ts > 0
    out[pos] += (c0 + c1 * ts[pos]) * np.exp(-w * ts[pos])
    out[ts == 0] += 0.5 * c0
    return out


def resolvent_kernel_samples(gen, x, xstar, rho, ts, truncation=400.0, spacing=0.02):
    """Inverse transform of s -> <x*, R(is + rho) x> at the times ``ts``.

    ``ts`` may be arbitrary (no grid alignment needed).
    """
    m = int(round(truncation / spacing))
    s = spacing * np.arange(-m, m + 1)
    payload, c0, c1, w = _kernel_payload(gen, x, xstar, rho, s)
    return _kernel_from_payload(payload, c0, c1, w, s, spacing, ts)


@dataclass
class KernelGrid:
    """Time/frequency discretization for the kernel identity checks."""

    t_max: float = 3.0
    t_spacing: float = 0.02
    truncation: float = 400.0
    s_spacing: float = 0.02

    def times(self):
        m = int(round(self.t_max / self.t_spacing))
        return self.t_spacing * np.arange(-m, m + 1)


@dataclass
class KernelIdentityResiduals:
    res1: float
    res2: float
    res3: float


def kernel_identity_checks(gen, x, xstar, tau, rho, grid=None):
    """Residuals of the three algebraic kernel identities.

    res1: shifting time by tau against applying T_tau inside, up to the
          indicator correction <x*, T_t x> on [0, tau];
    res2: moving T_tau from the vector slot to the (transpose) dual slot;
    res3: the exponential reweighting kernel_0(t) = e^{rho t} kernel_rho(t).

    Grid points within two time-steps of the jumps (t = 0 and t = tau, and
    the shifted jump of the moved kernel) are excluded from the maxima.
    """
    if tau <= 0:
        raise InputError("tau must be positive")
    if grid is None:
        grid = KernelGrid()
    ts = grid.times()
    ht = grid.t_spacing
    x = np.asarray(x, dtype=complex)
    xstar = np.asarray(xstar, dtype=complex)
    t_tau = semigroup_apply(gen, tau)

    m = int(round(grid.truncation / grid.s_spacing))
    s = grid.s_spacing * np.arange(-m, m + 1)
    # one phase matrix serves every kernel: a time shift by -tau is the
    # payload modulation e^{-i tau s}
    phases = np.exp(1j * np.outer(ts, s))
    shift_mod = np.exp(-1j * tau * s)

    def kernel(rho_, xx, xs, shifted=False):
        payload, c0, c1, w = _kernel_payload(gen, xx, xs, rho_, s)
        if shifted:
            return _kernel_from_payload(
                payload * shift_mod, c0, c1, w, s, grid.s_spacing, ts - tau, phases=phases
            )
        return _kernel_from_payload(payload, c0, c1, w, s, grid.s_spacing, ts, phases=phases)

    k_base = kernel(0.0, x, xstar)
    k_shift = kernel(0.0, t_tau @ x, xstar, shifted=True)
    semigroup_term = np.zeros(ts.size, dtype=complex)
    inside = (ts >= 0) & (ts <= tau)
    for i in np.nonzero(inside)[0]:
        semigroup_term[i] = xstar @ (semigroup_apply(gen, ts[i]) @ x)
    ok = (np.abs(ts) > 2 * ht) & (np.abs(ts - tau) > 2 * ht)
    res1 = float(np.max(np.abs(k_shift - k_base + semigroup_term)[ok]))

    k_left = kernel(0.0, t_tau @ x, xstar)
    k_right = kernel(0.0, x, t_tau.T @ xstar)
    ok2 = np.abs(ts) > 2 * ht
    res2 = float(np.max(np.abs(k_left - k_right)[ok2]))

    k_rho = kernel(rho, x, xstar)
    res3 = float(np.max(np.abs(k_base - np.exp(rho * ts) * k_rho)[ok2]))
    return KernelIdentityResiduals(res1=res1, res2=res2, res3=res3)


@dataclass(frozen=True)
class TorusFunction:
    """Trigonometric polynomial sum_{|k| <= M} coeff_k e^{i k theta} with C^n values.

    ``coeffs`` has shape (2M+1, n); row j holds the coefficient of
    e^{i (j - M) theta}.
    """

    coeffs: np.ndarray
    truncation: int

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=complex)
        if c.ndim == 1:
            c = c[:, None]
        object.__setattr__(self, "coeffs", c)
        if c.shape[0] != 2 * self.truncation + 1:
            raise InputError("coefficient array must have 2M+1 rows")

    @property
    def wavenumbers(self):
        return np.arange(-self.truncation, self.truncation + 1)

    def evaluate(self, thetas):
        thetas = np.atleast_1d(np.asarray(thetas, dtype=float))
        phases = np.exp(1j * np.outer(thetas, self.wavenumbers))
        return phases @ self.coeffs

    def norm(self):
        """L^2(T) norm via Parseval (orthonormal basis e^{ik.}/sqrt(2pi))."""
        return float(np.sqrt(2.0 * np.pi * np.sum(np.abs(self.coeffs) ** 2)))

    @classmethod
    def from_samples(cls, values, truncation):
        values = np.asarray(values, dtype=complex)
        m = values.shape[0]
        if m < 2 * truncation + 1:
            raise InputError("need at least 2M+1 samples to recover degree M")
        hat = np.fft.fft(values, axis=0) / m
        ks = np.fft.fftfreq(m, d=1.0 / m).astype(int)
        coeffs = np.zeros((2 * truncation + 1,) + values.shape[1:], dtype=complex)
        for j, k in enumerate(ks):
            if -truncation <= k <= truncation:
                coeffs[k + truncation] = hat[j]
        return cls(coeffs, truncation)


def _check_lattice_off_spectrum(gen, kmax):
    spec = spectral_analysis(gen)
    lam = spec.eigenvalues
    nearest_k = np.round(lam.imag)
    dist = np.abs(lam - 1j * nearest_k)
    tol = 1e-10 * (1.0 + gen.norm)
    bad = (dist <= tol) & (np.abs(nearest_k) <= kmax)
    if np.any(bad):
        i = int(np.nonzero(bad)[0][0])
        raise SpectrumHitError(
            f"eigenvalue {lam[i]} sits on the lattice point i*{int(nearest_k[i])}",
            point=1j * nearest_k[i],
            eigenvalue=lam[i],
        )


def discrete_multiplier(gen, f: TorusFunction) -> TorusFunction:
    """Coefficient-wise resolvent multiplier L fhat(k) = R(ik) fhat(k)."""
    _check_lattice_off_spectrum(gen, f.truncation)
    out = resolvent_apply(gen, 1j * f.wavenumbers, f.coeffs, check=False)
    return TorusFunction(out, f.truncation)


def _torus_quad_nodes(gen, truncation):
    """Simpson node count keeping the quadrature error of the semigroup
    convolution near 1e-7 relative: the integrand oscillates like
    (M + ||A||) and its magnitude reaches sup_s ||T_s||."""
    sup_t = np.exp(2.0 * np.pi * max(spectral_analysis(gen).abscissa, 0.0))
    scale = (truncation + 1.0 + gen.norm) ** 4 * sup_t * 2.0 * np.pi
    n = 2.0 * np.pi * (scale / (180.0 * 1e-7)) ** 0.25
    return int(min(max(4096, 2 * round(n / 2)), 262144))


def semigroup_convolution_torus(gen, f: TorusFunction, n_quad=None, n_theta=64):
    """K f(theta) = int_0^{2pi} T_s f((theta - s) mod 2pi) ds by Simpson quadrature.

    Returns a GridFunction on [0, 2pi).  The semigroup samples come from
    repeated multiplication by expm(h A), so this route never touches the
    resolvent and stays independent of the discrete multiplier.
    """
    if n_quad is None:
        n_quad = _torus_quad_nodes(gen, f.truncation)
    if n_quad % 2 == 1:
        n_quad += 1
    h = 2.0 * np.pi / n_quad
    n = gen.n
    t_h = semigroup_apply(gen, h)
    w = np.ones(n_quad + 1)
    w[1:-1:2] = 4.0
    w[2:-1:2] = 2.0
    w *= h / 3.0
    ks = f.wavenumbers
    # Q_k = int_0^{2pi} T_s e^{-iks} ds, accumulated in blocks so the
    # semigroup samples never need to be stored all at once.
    q = np.zeros((ks.size, n, n), dtype=complex)
    block_len = 2048
    block = np.empty((block_len, n, n), dtype=complex)
    cur = np.eye(n, dtype=complex)
    j0 = 0
    while j0 <= n_quad:
        jb = min(block_len, n_quad + 1 - j0)
        for i in range(jb):
            block[i] = cur
            cur = t_h @ cur
        s_nodes = h * (j0 + np.arange(jb))
        phases = np.exp(-1j * np.outer(ks, s_nodes)) * w[None, j0 : j0 + jb]
        q += np.tensordot(phases, block[:jb], axes=(1, 0))
        j0 += jb
    thetas = 2.0 * np.pi * np.arange(n_theta) / n_theta
    eval_phases = np.exp(1j * np.outer(thetas, ks))
    qf = np.einsum("knm,km->kn", q, f.coeffs)
    values = eval_phases @ qf
    return GridFunction(0.0, 2.0 * np.pi / n_theta, values)


def check_klt_identity(gen, f: TorusFunction, n_quad=None, n_theta=64):
    """max_theta || K f(theta) - L (I - T_{2pi}) f(theta) ||.

    K is the quadrature semigroup convolution, L the coefficient-wise
    resolvent multiplier; the identity ties them together through I - T_{2pi}.
    """
    kf = semigroup_convolution_torus(gen, f, n_quad=n_quad, n_theta=n_theta)
    t2pi = semigroup_apply(gen, 2.0 * np.pi)
    g = TorusFunction(f.coeffs @ (np.eye(gen.n) - t2pi).T, f.truncation)
    lg = discrete_multiplier(gen, g)
    lg_vals = lg.evaluate(kf.grid)
    return float(np.max(np.linalg.norm(kf.samples - lg_vals, axis=1)))


@dataclass
class CesaroSumResult:
    """Fejer-summed resolvent series over the integer lattice, with the
    left-inverse identity residual."""

    value: np.ndarray
    converged: bool
    residual_estimate: float
    ladder_values: list
    identity_residual: float


def _fejer_lattice_sum(gen, x, n_values):
    n_max = int(max(n_values))
    ks = np.arange(-n_max, n_max + 1)
    terms = resolvent_apply(gen, 1j * ks, x, check=False)
    sums = []
    for n in n_values:
        weights = np.clip(1.0 - np.abs(ks) / n, 0.0, None)
        sums.append(np.tensordot(weights, terms, axes=(0, 0)) / (2.0 * np.pi))
    return sums


def cesaro_resolvent_sum(gen, x, n_max=16000, ladder=None, tolerance=1e-3):
    """S = (1/2pi) (C,1) sum_{k in Z} R(ik) x, with the identity check
    (I/2 + S)(I - T_{2pi}) x = x evaluated alongside."""
    x = np.asarray(x, dtype=complex)
    _check_lattice_off_spectrum(gen, np.inf)
    if ladder is None:
        ladder = [n_max // 4, n_max // 2, n_max]
    sums = _fejer_lattice_sum(gen, x, ladder)
    if len(sums) >= 2:
        diff = float(np.linalg.norm(sums[-1] - sums[-2]))
        converged = diff <= tolerance * (1.0 + float(np.linalg.norm(sums[-1])))
    else:
        diff, converged = np.inf, False
    t2pi = semigroup_apply(gen, 2.0 * np.pi)
    y = x - t2pi @ x
    s_of_y = _fejer_lattice_sum(gen, y, [ladder[-1]])[0]
    identity_residual = float(np.linalg.norm(0.5 * y + s_of_y - x))
    return CesaroSumResult(
        value=sums[-1],
        converged=converged,
        residual_estimate=diff,
        ladder_values=sums,
        identity_residual=identity_residual,
    )


@dataclass
class AnnulusScanResult:
    """Uniform-boundedness scan of (zI - T_{2pi})^{-1} over a polar lattice."""

    sup_norm: float
    blowup: bool
    table: list  # (z, norm, flagged) triples in deterministic scan order

    BLOWUP_THRESHOLD = 1e8


def annulus_scan(gen, r_min=0.5, r_max=1.5, n_radii=5, n_angles=64):
    """Scan ||(zI - T_{2pi})^{-1}|| over the annulus lattice r_min <= |z| <= r_max.

    Norms above 1e8 are flagged as blow-up evidence (non-hyperbolicity);
    an exactly singular lattice point raises a numerical error.
    """
    if not (0 < r_min < r_max):
        raise InputError("need 0 < r_min < r_max")
    t2pi = semigroup_apply(gen, 2.0 * np.pi)
    n = gen.n
    radii = np.linspace(r_min, r_max, n_radii)
    angles = 2.0 * np.pi * np.arange(n_angles) / n_angles
    table = []
    sup = 0.0
    blowup = False
    eye = np.eye(n)
    for r in radii:
        for ang in angles:
            z = r * np.exp(1j * ang)
            try:
                u = np.linalg.solve(z * eye - t2pi, eye)
            except np.linalg.LinAlgError as exc:
                raise NumericalError(
                    f"annulus point z = {z} is exactly singular for I z - T_2pi"
                ) from exc
            norm = float(np.linalg.norm(u, 2))
            flagged = norm > AnnulusScanResult.BLOWUP_THRESHOLD
            blowup = blowup or flagged
            sup = max(sup, norm)
            table.append((z, norm, flagged))
    return AnnulusScanResult(sup_norm=sup, blowup=blowup, table=table)
