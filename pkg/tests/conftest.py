"""Shared corpora and oracles for the test suite.

The hyperbolic corpus is constructed, not filtered: eigenvalues are drawn
with |Re| >= 0.5 (at least one stable and one unstable), and the eigenbasis
is a random unitary optionally stretched to a prescribed condition number,
so the gap and conditioning guarantees hold by construction.
"""

import numpy as np
import pytest
import scipy.signal

from dichotomy import (
    Generator,
    GridFunction,
    load_generator,
    semigroup_apply,
    spectral_analysis,
    spectral_projection,
)

CORPUS_SEED = 1729
NORMAL_COUNT = 8
CORPUS_SIZE = 20


def random_unitary(rng, n):
    z = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def make_hyperbolic(rng, n=8, normal=False, kappa_range=(2.0, 8.0),
                    delta_min=0.5, re_max=2.2, im_max=2.5):
    re = rng.uniform(delta_min, re_max, n) * rng.choice([-1.0, 1.0], n)
    re[0] = abs(re[0])      # keep both subspaces nontrivial
    re[1] = -abs(re[1])
    lam = re + 1j * rng.uniform(-im_max, im_max, n)
    if normal:
        v = random_unitary(rng, n)
        a = (v * lam[None, :]) @ v.conj().T
    else:
        kappa = np.exp(rng.uniform(np.log(kappa_range[0]), np.log(kappa_range[1])))
        sig = np.exp(np.linspace(np.log(np.sqrt(kappa)), -np.log(np.sqrt(kappa)), n))
        v = (random_unitary(rng, n) * sig[None, :]) @ random_unitary(rng, n).conj().T
        a = v @ np.diag(lam) @ np.linalg.inv(v)
    return load_generator(a)


@pytest.fixture(scope="session")
def hyperbolic_corpus():
    rng = np.random.default_rng(CORPUS_SEED)
    corpus = []
    for i in range(CORPUS_SIZE):
        gen = make_hyperbolic(rng, normal=(i < NORMAL_COUNT))
        spec = spectral_analysis(gen)
        assert spec.gap >= 0.5
        assert spec.basis_condition <= 100.0
        corpus.append(gen)
    return corpus


@pytest.fixture(scope="session")
def normal_corpus(hyperbolic_corpus):
    return hyperbolic_corpus[:NORMAL_COUNT]


@pytest.fixture(scope="session")
def negative_corpus():
    """Generators with an eigenvalue within 1e-8 of the imaginary axis."""
    mats = [
        [[0.0, 1.0], [-1.0, 0.0]],
        [[1j]],
        np.diag([1j, -1.0 + 0j]),
        [[1j, 1.0], [0.0, 1j]],
        np.diag([1e-9 + 1j, -1.5 + 0j]),
    ]
    return [load_generator(m) for m in mats]


def green_kernel_oracle(gen, halfwidth, spacing):
    """Sampled Green kernel built from the spectral oracle and expm powers.

    Returns (plus, minus): T_u P on u = 0..halfwidth and -T_{-u}(I-P) on
    u = 0..halfwidth (index j <-> |u| = j*spacing).
    """
    p = spectral_projection(gen)
    q = np.eye(gen.n) - p
    m = int(round(halfwidth / spacing))
    t_fwd = semigroup_apply(gen, spacing)
    t_bwd = semigroup_apply(gen, -spacing)
    plus = np.empty((m + 1, gen.n, gen.n), dtype=complex)
    minus = np.empty((m + 1, gen.n, gen.n), dtype=complex)
    plus[0] = p
    minus[0] = -q
    for j in range(1, m + 1):
        plus[j] = t_fwd @ plus[j - 1]
        minus[j] = t_bwd @ minus[j - 1]
    return plus, minus


def _simpson_weights(m):
    if m % 2 == 0:
        raise ValueError("Simpson needs an odd sample count")
    w = np.ones(m)
    w[1:-1:2] = 4.0
    w[2:-1:2] = 2.0
    return w / 3.0


def green_convolution_oracle(gen, f: GridFunction):
    """(G * f) on f's grid by half-line Simpson convolutions with the
    spectral-oracle kernel.  Completely independent of the transform path."""
    h = f.spacing
    m = f.m
    klen = m if m % 2 == 1 else m - 1
    plus, minus = green_kernel_oracle(gen, (klen - 1) * h, h)
    w = _simpson_weights(klen) * h
    n = gen.n
    out = np.zeros((m, n), dtype=complex)
    fs = f.samples
    for a in range(n):
        for b in range(n):
            kp = w * plus[:, a, b]
            km = w * minus[:, a, b]
            # sum_j kp[j] f_b(t - j h): causal convolution
            conv_p = scipy.signal.fftconvolve(kp, fs[:, b])[:m]
            # sum_j km[j] f_b(t + j h): anticausal, i.e. correlation
            conv_m = scipy.signal.fftconvolve(km[::-1], fs[:, b])[klen - 1 : klen - 1 + m]
            out[:, a] += conv_p + conv_m
    return GridFunction(f.start, h, out)


def random_vector(rng, n):
    v = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    return v / np.linalg.norm(v)
