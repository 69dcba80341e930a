"""Log-domain adaptive quadrature on the real line.

Integrands here are ``exp(logf(x))`` where ``logf`` can reach hundreds in
magnitude, so the integral is computed as ``M + log int exp(logf - M)`` with
``M`` the maximum of ``logf``.
"""

from __future__ import annotations

import math
from typing import Callable

import numpy as np
from scipy import integrate, optimize

from .errors import QuadratureError

# exp(-80) ~ 1.8e-35: negligible against any relative tolerance we use
CUTOFF = 80.0


def _argmax(logf: Callable[[float], float], lo: float, hi: float, guess: float | None) -> float:
    xs = np.linspace(lo, hi, 513)
    if guess is not None:
        xs = np.append(xs, guess)
    vals = np.array([logf(x) for x in xs])
    k = int(np.argmax(vals))
    x0 = xs[k]
    span = (hi - lo) / 512
    res = optimize.minimize_scalar(
        lambda x: -logf(x),
        bounds=(max(lo, x0 - span), min(hi, x0 + span)),
        method="bounded",
        options={"xatol": 1e-12 * max(1.0, abs(x0))},
    )
    return float(res.x) if -res.fun >= vals[k] else float(x0)


def _extent(logf, x0: float, peak: float, direction: float, limit: float) -> float:
    step = 1.0
    x = x0
    while abs(x - x0) < limit:
        x = x0 + direction * step
        if logf(x) < peak - CUTOFF:
            return x
        step *= 2.0
    raise QuadratureError("integrand does not decay; integral diverges or support too wide")


def log_integral(
    logf: Callable[[float], float],
    lower: float = -math.inf,
    upper: float = math.inf,
    breakpoints=(),
    rtol: float = 1e-10,
    search: tuple[float, float] = (-50.0, 50.0),
) -> float:
    """``log int_lower^upper exp(logf(x)) dx`` by adaptive Gauss-Kronrod.

    Infinite limits are truncated where ``logf`` has dropped ``CUTOFF`` below
    its maximum.  Raises :class:`QuadratureError` if the estimated error
    exceeds ``rtol`` relative.
    """
    lo_s = max(lower, search[0])
    hi_s = min(upper, search[1])
    x0 = _argmax(logf, lo_s, hi_s, None)
    peak = logf(x0)
    if not math.isfinite(peak):
        raise QuadratureError("integrand maximum is not finite")
    a = lower if math.isfinite(lower) else _extent(logf, x0, peak, -1.0, 1e6)
    b = upper if math.isfinite(upper) else _extent(logf, x0, peak, +1.0, 1e6)
    pts = sorted({p for p in (*breakpoints, x0) if a < p < b})
    edges = [a, *pts, b]
    total = 0.0
    err = 0.0
    for left, right in zip(edges[:-1], edges[1:]):
        val, e = integrate.quad(
            lambda x: math.exp(logf(x) - peak),
            left,
            right,
            epsabs=0.0,
            epsrel=rtol * 0.1,
            limit=500,
        )
        total += val
        err += e
    if not total > 0 or err > rtol * total:
        raise QuadratureError(f"quadrature did not converge (estimate {total}, error {err})")
    return peak + math.log(total)
