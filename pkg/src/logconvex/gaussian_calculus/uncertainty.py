"""Decay classes, Hardy-type classification and the conformal (Appel) map.

Rates follow the ``O_{p,q}(A1; A2)`` convention: ``A1`` is the largest
exponent with ``exp(A1 |x|^2) f`` integrable, ``A2`` the same for the Fourier
transform.  For a chirped Gaussian those suprema are ``min Re z_j`` and
``min Re(1/(4 z_j))``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import erf, log_ndtr

from .._quadrature import log_integral
from ..weighting import WeightSpec
from .core import (
    ChirpedGaussian,
    chirp,
    conjugate,
    dilate,
    fourier,
    propagate,
    scale_amplitude,
)
from .norms import weighted_l2_log_norm


@dataclass(frozen=True)
class OpqClass:
    a1_sup: float
    a2_sup: float
    p: float
    q: float

    @property
    def m(self) -> float:
        return self.a1_sup * self.a2_sup


def opq_class(g: ChirpedGaussian, p: float = math.inf, q: float = math.inf) -> OpqClass:
    a1 = float(np.min(g.quad.real))
    a2 = float(np.min(fourier(g).quad.real))
    return OpqClass(a1, a2, p, q)


class HardyClass(str, enum.Enum):
    FORCED_ZERO = "forced_zero"
    EXTREMAL = "extremal"
    ADMISSIBLE = "admissible"


def hardy_classify(a1: float, a2: float, p: float = math.inf, q: float = math.inf,
                   rtol: float = 1e-12) -> HardyClass:
    """Classify the decay pair ``(a1, a2)`` by Hardy's uncertainty principle.

    With ``p = q = inf`` a product above 1/4 forces ``f = 0`` and equality
    leaves only the Gaussian.  If either exponent is finite the equality case
    is also forced to zero (Cowling-Price); applied in every dimension.
    """
    if not (a1 > 0 and a2 > 0):
        raise ValueError("decay rates must be positive")
    m = a1 * a2
    on_boundary = math.isclose(m, 0.25, rel_tol=rtol, abs_tol=0.0)
    if math.isinf(p) and math.isinf(q):
        if on_boundary:
            return HardyClass.EXTREMAL
        return HardyClass.FORCED_ZERO if m > 0.25 else HardyClass.ADMISSIBLE
    if on_boundary or m > 0.25:
        return HardyClass.FORCED_ZERO
    return HardyClass.ADMISSIBLE


# Beurling-Hormander functional -------------------------------------------


def _log_erfc(y):
    return math.log(2.0) + float(log_ndtr(-math.sqrt(2.0) * y))


def _log_erf_diff(u: float, v: float) -> float:
    """``log(erf(u) - erf(v))`` for ``u > v`` without cancellation."""
    if v >= 0:
        lv, lu = _log_erfc(v), _log_erfc(u)
        return lv + math.log1p(-math.exp(lu - lv))
    if u <= 0:
        lu, lv = _log_erfc(-u), _log_erfc(-v)
        return lu + math.log1p(-math.exp(lv - lu))
    return math.log(float(erf(u) - erf(v)))


def _log_half_line(a: float, beta: float, R: float) -> float:
    """``log int_0^R exp(-a x^2 + beta x) dx``."""
    ra = math.sqrt(a)
    u = ra * R - beta / (2 * ra)
    v = -beta / (2 * ra)
    return beta * beta / (4 * a) + 0.5 * math.log(math.pi / (4 * a)) + _log_erf_diff(u, v)


def beurling_box_log_integrals(g: ChirpedGaussian, radii=(5.0, 10.0, 20.0, 40.0)) -> list[float]:
    """``log`` of ``int int_{[-R,R]^2} |g(x)| |g^(xi)| exp(|x xi|)`` for each ``R``."""
    if g.dim != 1:
        raise ValueError("the Beurling functional is implemented for n = 1 only")
    a, b, a0 = g.quad.real[0], g.lin.real[0], g.log_amp.real
    gh = fourier(g)
    ah, bh, a0h = gh.quad.real[0], gh.lin.real[0], gh.log_amp.real
    out = []
    for R in radii:
        def inner(xi, R=R):
            k = abs(xi)
            return a0 + np.logaddexp(_log_half_line(a, b + k, R), _log_half_line(a, -b + k, R))

        out.append(log_integral(
            lambda xi: a0h - ah * xi * xi + bh * xi + inner(xi),
            lower=-R, upper=R, breakpoints=(0.0,), search=(-R, R), rtol=1e-8,
        ))
    return out


def beurling_functional(g: ChirpedGaussian, growth: float = 1.5,
                        radii=(5.0, 10.0, 20.0, 40.0)) -> float:
    """Box-ladder estimate of the Beurling-Hormander double integral.

    Returns ``inf`` when the box integral grows by more than ``growth`` over
    the last doubling; otherwise the value on the largest box.
    """
    logs = beurling_box_log_integrals(g, radii)
    if logs[-1] - logs[-2] > math.log(growth):
        return math.inf
    return math.exp(logs[-1])


# complex-extension bound ------------------------------------------------


@dataclass(frozen=True)
class ComplexBound:
    """``|g(x + i y)| <= N exp(-a |x|^2 + b |y|^2)`` with ``log_n = log N``."""

    log_n: float
    a: float
    b: float

    def log_bound(self, x, y) -> np.ndarray:
        x = np.atleast_2d(np.asarray(x, dtype=float))
        y = np.atleast_2d(np.asarray(y, dtype=float))
        return self.log_n - self.a * np.sum(x**2, axis=-1) + self.b * np.sum(y**2, axis=-1)

    def dominates(self, g: ChirpedGaussian, x, y, rtol: float = 1e-12) -> bool:
        x = np.asarray(x, dtype=float).reshape(-1, g.dim)
        y = np.asarray(y, dtype=float).reshape(-1, g.dim)
        lhs = g.log_modulus(x + 1j * y)
        rhs = self.log_bound(x, y)
        return bool(np.all(lhs <= rhs + rtol * np.maximum(1.0, np.abs(rhs))))


def complex_bound_params(g: ChirpedGaussian, slack: float = 0.5) -> ComplexBound:
    """Constants ``(N, a, b)`` bounding the entire extension of ``g``.

    Per axis ``log|g| = -a x^2 + a y^2 + 2 Im(z) x y + Re(c) x - Im(c) y``.  A
    fraction ``slack`` of the x-decay absorbs the cross term and the x-linear
    term (Young's inequality); the y-linear term goes into ``y^2`` with unit
    weight relative to ``Re z``.
    """
    if not 0 < slack < 1:
        raise ValueError("slack must lie in (0, 1)")
    re_z, im_z = g.quad.real, g.quad.imag
    cr, ci = g.lin.real, g.lin.imag
    eps = 0.5 * slack * re_z
    b = re_z + im_z**2 / eps + np.where(ci != 0, re_z, 0.0)
    log_n = g.log_amp.real + float(np.sum(cr**2 / (4 * eps) + np.where(ci != 0, ci**2 / (4 * re_z), 0.0)))
    return ComplexBound(log_n, float((1 - slack) * np.min(re_z)), float(np.max(b)))


# parameter maps for decay classes --------------------------------------


def lemma_params_d(c1: float, c2: float, t: float) -> tuple[float, float]:
    """Decay class of ``exp(i t Laplacian) h`` for ``h`` in ``O_2(c1; c2)``."""
    t = abs(t)
    r = math.sqrt(c1 * c2)
    return c1 * c2 / (c2 + 4 * t * r + 4 * t * t * c1), c2


def lemma_params_e(c1: float, c2: float, tau: float) -> tuple[float, float]:
    """Decay class of ``exp(-i tau |x|^2) h`` for ``h`` in ``O_2(c1; c2)``.

    The spatial rate is untouched by a unimodular factor; only the Fourier
    rate degrades.
    """
    tau = abs(tau)
    r = math.sqrt(c1 * c2)
    return c1, c1 * c2 / (c1 + 4 * tau * r + 4 * tau * tau * c2)


def corollary_2_1_params(mu1: float, mu2: float, s: float) -> tuple[float, float]:
    """Class of ``u0`` given decay ``2 mu1`` at time 0 and ``2 mu2`` at time ``s``.

    ``exp(i|x|^2/(4s)) u0`` lies in ``O_2(mu1; 4 s^2 mu2)``; removing the chirp
    with :func:`lemma_params_e` at ``tau = 1/(4s)`` gives the result.
    """
    if not (mu1 > 0 and mu2 > 0 and s > 0):
        raise ValueError("parameters must be positive")
    return lemma_params_e(mu1, 4 * s * s * mu2, 1.0 / (4.0 * s))


# conformal map ----------------------------------------------------------


def appel(u0: ChirpedGaussian) -> ChirpedGaussian:
    """Initial datum ``v0(x) = 2^(-n/2) conj(u0^)(x/2)`` of the conformal partner."""
    v = dilate(conjugate(fourier(u0)), 2.0)
    return scale_amplitude(v, -0.5 * u0.dim * math.log(2.0))


def appel_residual(u0: ChirpedGaussian, x, t: float) -> float:
    """Relative mismatch of ``conj v(x,t) = (-it)^(-n/2) e^{-i|x|^2/4t} u(x/t, 1/t)``."""
    x = np.atleast_2d(np.asarray(x, dtype=float))
    n = u0.dim
    lhs = np.conj(propagate(appel(u0), t).log_value(x))
    rhs = (
        -0.5 * n * np.log(-1j * t)
        - 1j * np.sum(x**2, axis=-1) / (4 * t)
        + propagate(u0, 1.0 / t).log_value(x / t)
    )
    return float(np.max(np.abs(np.expm1(lhs - rhs))))


def dada_residual(u0: ChirpedGaussian, x, t: float) -> float:
    """Relative mismatch of ``(2it)^(n/2) e^{-i|x|^2/4t} u(x,t) = F[e^{i|.|^2/4t} u0](x/2t)``."""
    x = np.atleast_2d(np.asarray(x, dtype=float))
    n = u0.dim
    chirped = chirp(u0, 1.0 / (4 * t))
    lhs = (
        0.5 * n * np.log(2j * t)
        - 1j * np.sum(x**2, axis=-1) / (4 * t)
        + propagate(u0, t).log_value(x)
    )
    rhs = fourier(chirped).log_value(x / (2 * t))
    return float(np.max(np.abs(np.expm1(lhs - rhs))))


def appel_norm_identity(u0: ChirpedGaussian, lam, alpha: float, beta: float,
                        t: float) -> tuple[float, float]:
    """Both sides (log norms) of ``||e^{lam.x/(beta/t+alpha)} v(1/t)|| = ||e^{lam.x/(alpha t+beta)} u(t)||``."""
    v0 = appel(u0)
    lhs = weighted_l2_log_norm(propagate(v0, 1.0 / t), WeightSpec.linear(lam, beta / t + alpha))
    rhs = weighted_l2_log_norm(propagate(u0, t), WeightSpec.linear(lam, alpha * t + beta))
    return lhs, rhs
