"""Weighted norms on exact Gaussians, Gaussian pairs and grid fields.

Every norm is ``log || exp(phi) u ||_2``.  Grid sums are accumulated with
log-sum-exp so weights with ``phi`` in the hundreds stay finite.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.special import logsumexp

from ._quadrature import log_integral
from .errors import TailDominanceError, UnsupportedWeightError
from .gaussian_calculus import ChirpedGaussian, log_gaussian_integral, weighted_l2_log_norm
from .spectral import GridField
from .weighting import ScheduleScale, WeightSpec

__all__ = [
    "ScheduleScale",
    "WeightSpec",
    "exact_weighted_log_norm",
    "grid_weighted_log_norm",
    "pair_weighted_log_norm",
    "power_weight_constant_probe",
    "probe_ratio",
]

TAIL_TOL = 1e-10


def grid_weighted_log_norm(f: GridField, w: WeightSpec, tail_tol: float | None = TAIL_TOL) -> float:
    """Discrete ``log || exp(phi) f ||_2`` with cell weight ``(L/N)^n``.

    Raises :class:`TailDominanceError` when the weighted integrand on the box
    boundary exceeds ``tail_tol`` of its maximum; ``tail_tol=None`` disables
    the check.
    """
    phi = w.log_multiplier(f.spec.coordinates())
    with np.errstate(divide="ignore"):
        integrand = 2.0 * phi + 2.0 * np.log(np.abs(f.values))
    peak = np.max(integrand)
    if tail_tol is not None and np.isfinite(peak):
        edge = max(np.take(integrand, idx, axis=ax).max()
                   for ax in range(f.spec.dim) for idx in (0, -1))
        if edge - peak > math.log(tail_tol):
            raise TailDominanceError(
                f"weighted integrand at the boundary is exp({edge - peak:.3g}) of its maximum"
            )
    return 0.5 * (float(logsumexp(integrand)) + math.log(f.spec.cell_volume))


def _pair_axis_form(u: ChirpedGaussian, v: ChirpedGaussian, j: int, rate: float, lin: float):
    Q = np.array([[2 * u.quad.real[j], 0.0], [0.0, 2 * v.quad.real[j]]])
    Q -= 2 * rate * np.array([[1.0, -1.0], [-1.0, 1.0]])
    B = np.array([2 * u.lin.real[j] + 2 * lin, 2 * v.lin.real[j] - 2 * lin])
    return Q, B


def pair_weighted_log_norm(u: ChirpedGaussian, v: ChirpedGaussian, w: WeightSpec) -> float:
    """``log || W(x - y) u(x) v(y) ||_{L^2(R^2n)}`` for an interaction weight.

    Each axis pair ``(x_j, y_j)`` carries a 2x2 quadratic form, so the integral
    is a completed square.  For the distance weight ``|x - y|`` the second
    moment of that form is used.
    """
    if u.dim != v.dim:
        raise ValueError("pair members must have the same dimension")
    if not w.is_interaction:
        raise UnsupportedWeightError("pair norms need an interaction weight")
    n = u.dim
    base = 2.0 * (u.log_amp.real + v.log_amp.real)
    if w.kind == "interaction_distance":
        total = base
        moment = 0.0
        for j in range(n):
            Q, B = _pair_axis_form(u, v, j, 0.0, 0.0)
            total += log_gaussian_integral(Q, B)
            cov = np.linalg.inv(2 * Q)
            mean = cov @ B
            moment += (mean[0] - mean[1]) ** 2 + cov[0, 0] + cov[1, 1] - 2 * cov[0, 1]
        return 0.5 * (total + math.log(moment))
    rate = 1.0 / w.scale**2 if w.kind == "interaction_gaussian" else 0.0
    lins = w.linear_coeffs(n)
    total = base
    for j in range(n):
        Q, B = _pair_axis_form(u, v, j, rate, lins[j])
        total += log_gaussian_integral(Q, B)
    return 0.5 * total


def exact_weighted_log_norm(g: ChirpedGaussian, w: WeightSpec,
                            partner: ChirpedGaussian | None = None) -> float:
    """Closed-form weighted norm; ``partner`` selects the tensor ``g(x) partner(y)``."""
    if partner is not None or w.is_interaction:
        if partner is None:
            raise UnsupportedWeightError("interaction weights need a partner Gaussian")
        return pair_weighted_log_norm(g, partner, w)
    return weighted_l2_log_norm(g, w)


def _probe_log_ratio(x: float, p: float, rtol: float) -> float:
    q = p / (p - 1.0)
    power = 0.5 * (q - 2.0)
    base = abs(x) ** p / p

    def logf(lam):
        if lam == 0.0 and power > 0:
            return -math.inf
        extra = power * math.log(abs(lam)) if power else 0.0
        return lam * x - abs(lam) ** q / q + extra - base

    peak = math.copysign(abs(x) ** (p - 1.0), x)
    width = 1.0 / math.sqrt((q - 1.0) * max(abs(peak), 1e-3) ** (q - 2.0))
    return log_integral(logf, breakpoints=(0.0,), rtol=rtol,
                        search=(peak - 30 * width - 5, peak + 30 * width + 5))


def power_weight_constant_probe(p: float, x_range=(1.0, 10.0), samples: int = 41,
                                rtol: float = 1e-10) -> tuple[float, float]:
    """Band of ``int exp(lam x - |lam|^p'/p') |lam|^((p'-2)/2) dlam / exp(|x|^p/p)``.

    Returns the minimum and maximum of the ratio over ``samples`` points of
    ``x_range``; the averaging identity for power weights requires both to be
    finite and positive.  For large ``|x|`` the ratio tends to
    ``sqrt(2 pi (p - 1))``.
    """
    if not 1.0 < p <= 2.0:
        raise ValueError("p must lie in (1, 2]")
    xs = np.linspace(x_range[0], x_range[1], samples)
    logs = np.array([_probe_log_ratio(float(x), p, rtol) for x in xs])
    return float(np.exp(logs.min())), float(np.exp(logs.max()))


def probe_ratio(x: float, p: float, rtol: float = 1e-10) -> float:
    return math.exp(_probe_log_ratio(x, p, rtol))
