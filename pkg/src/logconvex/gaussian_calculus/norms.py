"""Weighted L2 norms of chirped Gaussians, in the log domain.

Linear and Gaussian weights reduce to the completed square
``int exp(-A x^2 + B x) dx = sqrt(pi/A) exp(B^2/(4A))``; power weights with
exponent below 2 need quadrature.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.special import gammaln

from .._quadrature import log_integral
from ..errors import UnsupportedWeightError
from ..weighting import WeightSpec
from .core import ChirpedGaussian


def log_gaussian_integral(Q, B) -> float:
    """``log int_{R^k} exp(-x.Q.x + B.x) dx`` for real symmetric ``Q``.

    Returns ``+inf`` unless ``Q`` is positive definite.
    """
    Q = np.atleast_2d(np.asarray(Q, dtype=float))
    B = np.atleast_1d(np.asarray(B, dtype=float))
    try:
        L = np.linalg.cholesky(Q)
    except np.linalg.LinAlgError:
        return math.inf
    k = Q.shape[0]
    y = np.linalg.solve(L, B)
    logdet = 2.0 * np.sum(np.log(np.diag(L)))
    return 0.5 * k * math.log(math.pi) - 0.5 * logdet + 0.25 * float(y @ y)


def _modulus_coeffs(g: ChirpedGaussian):
    """``log|g|^2 = c0 - sum A_j x_j^2 + sum B_j x_j``."""
    return 2.0 * g.log_amp.real, 2.0 * g.quad.real, 2.0 * g.lin.real


def _axis_log_integral(A: float, B: float, extra=None) -> float:
    if extra is None:
        if A <= 0:
            return math.inf
        return 0.5 * math.log(math.pi / A) + B * B / (4.0 * A)
    center = B / (2.0 * A)
    width = 1.0 / math.sqrt(A)
    return log_integral(
        lambda x: -A * x * x + B * x + extra(x),
        breakpoints=(0.0,),
        search=(center - 40 * width - 10, center + 40 * width + 10),
    )


def weighted_l2_log_norm(g: ChirpedGaussian, w: WeightSpec) -> float:
    """``log || exp(phi) g ||_2``; ``+inf`` when the weighted integral diverges."""
    if w.is_interaction:
        raise UnsupportedWeightError("interaction weights need a pair of Gaussians")
    c0, A, B = _modulus_coeffs(g)
    n = g.dim

    if w.kind == "power_radial" and w.p[0] < 2.0 and n > 1:
        return 0.5 * _radial_power_log_norm_sq(g, w)

    A_eff = A - 2.0 * w.gaussian_rates(n)
    B_eff = B + 2.0 * w.linear_coeffs(n)
    if np.any(A_eff <= 0):
        return math.inf

    extras = [None] * n
    if w.kind == "power_axis":
        gam = w._axis_vector(w.gamma, n)
        pw = w._axis_vector(w.p, n)
        for j in range(n):
            if pw[j] < 2.0 and gam[j] > 0:
                extras[j] = _power_term(gam[j], pw[j], w.scale)
    elif w.kind == "power_radial" and w.p[0] < 2.0:
        extras[0] = _power_term(1.0, w.p[0], w.scale)

    total = c0 + sum(_axis_log_integral(A_eff[j], B_eff[j], extras[j]) for j in range(n))
    return 0.5 * total


def _power_term(gamma: float, p: float, s: float):
    return lambda x: 2.0 * gamma * abs(x / s) ** p


def _radial_power_log_norm_sq(g: ChirpedGaussian, w: WeightSpec) -> float:
    re_z = g.quad.real
    if not (np.allclose(re_z, re_z[0], rtol=1e-14, atol=0) and np.all(g.lin.real == 0)):
        raise UnsupportedWeightError("radial power weights need a radially symmetric Gaussian")
    n = g.dim
    a = re_z[0]
    p, s = w.p[0], w.scale
    log_sphere = math.log(2.0) + 0.5 * n * math.log(math.pi) - gammaln(0.5 * n)
    r_peak = math.sqrt((n - 1) / (4.0 * a))
    log_r = log_integral(
        lambda r: (n - 1) * math.log(r) - 2.0 * a * r * r + 2.0 * (r / s) ** p if r > 0 else -math.inf,
        lower=0.0,
        search=(0.0, r_peak + 40.0 / math.sqrt(a) + 10.0),
    )
    return 2.0 * g.log_amp.real + log_sphere + log_r


def weighted_lp_membership(g: ChirpedGaussian, rate: float, p: float = 2.0) -> bool:
    """Whether ``exp(rate |x|^2) g`` lies in ``L^p``.

    The boundary ``rate == min Re z`` counts as outside for every ``p``.
    """
    if not 1.0 <= p <= math.inf:
        raise ValueError("p must lie in [1, inf]")
    return bool(rate < np.min(g.quad.real))
