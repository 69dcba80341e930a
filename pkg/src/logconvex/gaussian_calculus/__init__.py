"""Exact calculus of chirped Gaussians and the uncertainty-principle tooling built on it."""

from .core import (
    ChirpedGaussian,
    boost,
    chirp,
    conjugate,
    convolve,
    dilate,
    evaluate,
    fourier,
    fourier_multiplier,
    gaussian,
    heat,
    heat_preimage,
    inverse_fourier,
    multiply,
    propagate,
    random_chirped,
    scale_amplitude,
    translate,
)
from .norms import log_gaussian_integral, weighted_l2_log_norm, weighted_lp_membership
from .uncertainty import (
    ComplexBound,
    HardyClass,
    OpqClass,
    appel,
    appel_norm_identity,
    appel_residual,
    beurling_box_log_integrals,
    beurling_functional,
    complex_bound_params,
    corollary_2_1_params,
    dada_residual,
    hardy_classify,
    lemma_params_d,
    lemma_params_e,
    opq_class,
)
