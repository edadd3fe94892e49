"""Exponential dichotomy of matrix semigroups via resolvent Fourier multipliers.

Given a finite-dimensional generator A, this package decides hyperbolicity
of the semigroup expm(t A), constructs the Green's function and splitting
projection from Cesaro-summed resolvent integrals, solves the forced
equation on the line through the resolvent multiplier, and estimates
fractional growth/spectral bounds.  Every construction is cross-checked
against a spectral (eigendecomposition/Schur) oracle.
"""

from .bounds import (
    BoundsReport,
    compute_bounds,
    omega_alpha_decay,
    omega_alpha_multiplier,
    s_alpha_scan,
    strip_boundedness_verdicts,
)
from .errors import (
    BracketingError,
    DichotomyError,
    InputError,
    NotHyperbolicError,
    NumericalError,
    SpectrumHitError,
)
from .green import (
    GreenIdentityReport,
    GreenSamples,
    HyperbolicityReport,
    dichotomy_constants,
    green_apply,
    green_regularized,
    green_samples,
    splitting_projection,
    verify_green_identities,
)
from .multiplier import (
    AnnulusScanResult,
    CesaroSumResult,
    GridFunction,
    KernelGrid,
    KernelIdentityResiduals,
    KvlReport,
    MultiplierConfig,
    ProbeFamily,
    TorusFunction,
    annulus_scan,
    apply_multiplier,
    cesaro_resolvent_sum,
    check_klt_identity,
    discrete_multiplier,
    estimate_multiplier_norm,
    kernel_identity_checks,
    kvl_functional,
    lp_norm,
    semigroup_convolution_torus,
    transform,
    weak_l1_quasinorm,
)
from .operator_core import (
    FractionalConfig,
    Generator,
    SpectralData,
    alpha_norm,
    complex_power_positive_cut,
    fractional_power,
    load_generator,
    resolvent,
    resolvent_apply,
    semigroup_apply,
    spectral_analysis,
    spectral_projection,
)
from .perron import MildParams, MildSolution, mild_residual, solve_mild
from .special import si
from .summation import (
    CesaroResult,
    QuadratureParams,
    cesaro_ladder,
    fejer_weighted_integral,
    laplace_inversion,
)

__version__ = "0.1.0"
