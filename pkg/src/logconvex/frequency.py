"""Frequency-function identities for matrix flows ``f' = S f + A f``.

``S(t)`` is Hermitian and ``A(t)`` anti-Hermitian.  With ``H = <f, f>``,
``D = <S f, f>`` and ``N = D / H`` the quotient rule gives an exact
expression for ``N'`` whose first term is driven by ``S_t + [S, A]``.  The
checks here evaluate both sides on finite matrices: time derivatives come
from centred differences with one Richardson level, and along ODE traces the
states at the stencil points are recomputed from ``f(t)`` at tight tolerance
so that the stencil does not see interpolation error.

Residuals are normalised by ``scale(t) = ||S_t|| + 2 ||S|| ||A|| + ||S||^2``
(spectral norms), which has the units of ``N'``; this keeps the tolerances
meaningful when ``N'`` itself vanishes.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Sequence

import numpy as np
from scipy.integrate import solve_ivp
from scipy.linalg import expm

from .errors import StepSizeError

Matrix = Callable[[float], np.ndarray]
Vector = Callable[[float], np.ndarray]

HERMITIAN_TOL = 1e-13


def _inner(a: np.ndarray, b: np.ndarray) -> complex:
    """``<a, b> = sum a conj(b)`` (linear in the first slot)."""
    return complex(np.vdot(b, a))


def _norm2(v: np.ndarray) -> float:
    return float(np.vdot(v, v).real)


@dataclass(frozen=True, eq=False)
class OperatorPair:
    """Time-dependent ``S`` (Hermitian), ``A`` (anti-Hermitian) and exact ``S_t``."""

    dim: int
    S: Matrix
    A: Matrix
    S_t: Matrix

    @classmethod
    def constant(cls, S, A) -> "OperatorPair":
        S = np.asarray(S, dtype=complex)
        A = np.asarray(A, dtype=complex)
        zero = np.zeros_like(S)
        pair = cls(S.shape[0], lambda t: S, lambda t: A, lambda t: zero)
        pair.validate(0.0)
        return pair

    @classmethod
    def random_constant(cls, rng: np.random.Generator, m: int = 8, commuting: bool = False) -> "OperatorPair":
        """Random pair with entries of order ``1/sqrt(m)``.

        ``commuting=True`` builds both from one eigenbasis so ``[S, A] = 0``.
        """
        def gauss():
            return (rng.standard_normal((m, m)) + 1j * rng.standard_normal((m, m))) / np.sqrt(2 * m)

        if commuting:
            q, _ = np.linalg.qr(gauss())
            S = q @ np.diag(rng.standard_normal(m)) @ q.conj().T
            A = q @ np.diag(1j * rng.standard_normal(m)) @ q.conj().T
            S = 0.5 * (S + S.conj().T)
            A = 0.5 * (A - A.conj().T)
        else:
            M, K = gauss(), gauss()
            S = 0.5 * (M + M.conj().T)
            A = 0.5 * (K - K.conj().T)
        return cls.constant(S, A)

    def validate(self, t: float, tol: float = HERMITIAN_TOL) -> None:
        S, A = self.S(t), self.A(t)
        scale = max(1.0, float(np.max(np.abs(S))), float(np.max(np.abs(A))))
        if np.max(np.abs(S - S.conj().T)) > tol * scale:
            raise ValueError(f"S is not Hermitian at t={t}")
        if np.max(np.abs(A + A.conj().T)) > tol * scale:
            raise ValueError(f"A is not anti-Hermitian at t={t}")

    def generator(self, t: float) -> np.ndarray:
        return self.S(t) + self.A(t)

    def commutator_term(self, t: float) -> np.ndarray:
        """``S_t + [S, A]`` (Hermitian)."""
        S, A = self.S(t), self.A(t)
        return self.S_t(t) + S @ A - A @ S

    def scale(self, t: float) -> float:
        s = np.linalg.norm(self.S(t), 2)
        a = np.linalg.norm(self.A(t), 2)
        return float(np.linalg.norm(self.S_t(t), 2) + 2 * s * a + s * s)


@dataclass(frozen=True, eq=False)
class FrequencyTrace:
    times: np.ndarray
    f: np.ndarray
    H: np.ndarray
    D: np.ndarray
    N: np.ndarray
    residuals: dict = field(default_factory=dict)

    def with_residual(self, name: str, values) -> "FrequencyTrace":
        values = np.asarray(values, dtype=float)
        if values.shape != self.times.shape:
            raise ValueError("residual must have one value per time")
        return FrequencyTrace(self.times, self.f, self.H, self.D, self.N,
                              {**self.residuals, name: values})

    def csv_text(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        names = sorted(self.residuals)
        w.writerow(["t", "H", "D", "N", *names])
        for k, t in enumerate(self.times):
            row = [t, self.H[k], self.D[k], self.N[k], *(self.residuals[n][k] for n in names)]
            w.writerow([repr(float(v)) for v in row])
        return buf.getvalue()

    def to_csv(self, path) -> None:
        Path(path).write_text(self.csv_text())


def _hdn(ops: OperatorPair, times, states):
    H = np.array([_norm2(f) for f in states])
    D = np.array([_inner(ops.S(t) @ f, f).real for t, f in zip(times, states)])
    return H, D, D / H


def trace_from_states(ops: OperatorPair, times, states) -> FrequencyTrace:
    times = np.asarray(times, dtype=float)
    states = np.asarray(states, dtype=complex)
    H, D, N = _hdn(ops, times, states)
    return FrequencyTrace(times, states, H, D, N)


def _rhs(ops: OperatorPair, forcing: Vector | None):
    def rhs(t, y):
        out = ops.generator(t) @ y
        if forcing is not None:
            out = out + forcing(t)
        return out
    return rhs


def _integrate(ops, forcing, t0: float, y0, t_eval, rtol: float):
    t_eval = np.asarray(t_eval, dtype=float)
    if t_eval.size == 0:
        return np.empty((0, y0.size), dtype=complex)
    atol = rtol * 1e-3 * max(float(np.linalg.norm(y0)), 1e-300)
    sol = solve_ivp(_rhs(ops, forcing), (t0, float(t_eval[-1])), y0, method="DOP853",
                    t_eval=t_eval, rtol=rtol, atol=atol)
    if sol.status != 0:
        raise StepSizeError(f"integration failed: {sol.message}")
    return sol.y.T


def evolve(f0, ops: OperatorPair, times: Sequence[float], forcing: Vector | None = None,
           rtol: float = 1e-11) -> FrequencyTrace:
    """Integrate ``f' = S f + A f (+ forcing)`` from ``times[0]`` with DOP853."""
    f0 = np.asarray(f0, dtype=complex)
    if not np.any(f0):
        raise ValueError("initial state must be nonzero")
    times = np.asarray(times, dtype=float)
    if np.any(np.diff(times) <= 0):
        raise ValueError("times must be strictly increasing")
    for t in times[:: max(1, times.size // 8)]:
        ops.validate(float(t))
    states = np.vstack([f0[None, :], _integrate(ops, forcing, times[0], f0, times[1:], rtol)])
    return trace_from_states(ops, times, states)


# derivatives ----------------------------------------------------------------


def _default_step(ops: OperatorPair, t: float) -> float:
    g = np.linalg.norm(ops.generator(t), 2)
    return 0.02 / (1.0 + g)


def _local_states(ops, forcing, t: float, f_t, h: float, rtol: float = 1e-13):
    """States at ``t + (-h, -h/2, h/2, h)`` integrated from ``f(t)``."""
    fwd = _integrate(ops, forcing, t, f_t, [t + h / 2, t + h], rtol)
    bwd = _integrate(ops, forcing, t, f_t, [t - h / 2, t - h], rtol)
    return {-h: bwd[1], -h / 2: bwd[0], h / 2: fwd[0], h: fwd[1]}


def richardson(values: dict, h: float) -> float:
    """Centred derivative from samples at ``(-h, -h/2, h/2, h)`` with one Richardson step."""
    d_h = (values[h] - values[-h]) / (2 * h)
    d_half = (values[h / 2] - values[-h / 2]) / h
    return (4.0 * d_half - d_h) / 3.0


def _stencil_quantities(ops, t: float, states: dict):
    out_H, out_N = {}, {}
    for off, f in states.items():
        H = _norm2(f)
        out_H[off] = H
        out_N[off] = _inner(ops.S(t + off) @ f, f).real / H
    return out_H, out_N


# identities -----------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class FrequencyCheck:
    """Pointwise residuals (``sense='residual'``) or margins (``sense='margin'``)."""

    name: str
    times: np.ndarray
    values: np.ndarray
    tolerance: float
    sense: str = "residual"

    @property
    def worst(self) -> float:
        return float(np.max(self.values)) if self.sense == "residual" else float(np.min(self.values))

    @property
    def passed(self) -> bool:
        if self.sense == "residual":
            return bool(self.worst <= self.tolerance)
        return bool(self.worst >= -self.tolerance)

    def summary(self) -> dict:
        return {"check": self.name, "sense": self.sense, "worst": self.worst,
                "tolerance": self.tolerance, "pass": self.passed}


def identity_2_2a_terms(f, fdot, ops: OperatorPair, t: float) -> tuple[float, float, float]:
    """The three terms on the right of the exact ``N'`` identity at one time."""
    S, A = ops.S(t), ops.A(t)
    H = _norm2(f)
    first = _inner(ops.commutator_term(t) @ f, f).real / H
    plus = fdot - A @ f + S @ f
    minus = fdot - A @ f - S @ f
    second = 0.5 * (_norm2(plus) * H - _inner(plus, f).real ** 2) / H**2
    third = 0.5 * (_inner(minus, f).real ** 2 - _norm2(minus) * H) / H**2
    return first, second, third


def check_identity_2_2a(f: Vector, fdot: Vector, ops: OperatorPair, times,
                        h: float | None = None, tol: float = 1e-7) -> FrequencyCheck:
    """Compare a differenced ``N'`` of an analytic trajectory with the exact right side."""
    times = np.asarray(times, dtype=float)
    res = []
    for t in times:
        t = float(t)
        step = _default_step(ops, t) if h is None else h
        Nvals = {}
        for off in (-step, -step / 2, step / 2, step):
            g = f(t + off)
            Nvals[off] = _inner(ops.S(t + off) @ g, g).real / _norm2(g)
        ndot = richardson(Nvals, step)
        terms = identity_2_2a_terms(f(t), fdot(t), ops, t)
        res.append(abs(ndot - sum(terms)) / max(ops.scale(t), 1e-300))
    return FrequencyCheck("identity_2_2a", times, np.array(res), tol)


def check_hdot(trace: FrequencyTrace, ops: OperatorPair, forcing: Vector | None = None,
               tol: float = 1e-8) -> FrequencyCheck:
    """``H' = 2 Re<f' - S f - A f, f> + 2 D`` along an integrated trace (``H' = 2D`` when unforced)."""
    res = []
    for t, f in zip(trace.times, trace.f):
        t = float(t)
        h = _default_step(ops, t)
        Hs, _ = _stencil_quantities(ops, t, _local_states(ops, forcing, t, f, h))
        hdot = richardson(Hs, h)
        D = _inner(ops.S(t) @ f, f).real
        extra = 2.0 * _inner(forcing(t), f).real if forcing is not None else 0.0
        norm_s = np.linalg.norm(ops.S(t), 2)
        res.append(abs(hdot - 2.0 * D - extra) / max(_norm2(f) * (norm_s + 1e-300), 1e-300))
    return FrequencyCheck("hdot_equals_2d", trace.times, np.array(res), tol)


def check_ndot_lower_bound(trace: FrequencyTrace, ops: OperatorPair, forcing: Vector | None = None,
                           tol: float = 1e-7) -> FrequencyCheck:
    """Margin of ``N' >= <(S_t + [S, A]) f, f>/H - ||f' - A f - S f||^2 ||f||^2 / (2 H^2)``.

    Evaluated at the interior times of the trace; ``f' - A f - S f`` is the
    forcing, zero for exact flows.
    """
    times = trace.times[1:-1]
    margins = []
    for t, f in zip(times, trace.f[1:-1]):
        t = float(t)
        h = _default_step(ops, t)
        _, Ns = _stencil_quantities(ops, t, _local_states(ops, forcing, t, f, h))
        ndot = richardson(Ns, h)
        H = _norm2(f)
        defect = forcing(t) if forcing is not None else np.zeros_like(f)
        bound = _inner(ops.commutator_term(t) @ f, f).real / H - 0.5 * _norm2(defect) * H / H**2
        margins.append((ndot - bound) / max(ops.scale(t), 1e-300))
    return FrequencyCheck("ndot_lower_bound", times, np.array(margins), tol, sense="margin")


def log_convexity_margins(trace: FrequencyTrace) -> np.ndarray:
    """Second divided differences of ``log H`` along the trace times."""
    t = trace.times
    y = np.log(trace.H)
    d1 = np.diff(y) / np.diff(t)
    return 2.0 * np.diff(d1) / (t[2:] - t[:-2])


# space-time expansion ---------------------------------------------------------


@dataclass(frozen=True)
class CarlemanResult:
    lhs: float            # int ||f' - S f - A f||^2
    antisym: float        # int ||f' - A f||^2
    sym: float            # int ||S f||^2
    commutator: float     # int <(S_t + [S, A]) f, f>
    boundary: float       # D(t1) - D(t0)
    commutator_floor: float

    @property
    def residual(self) -> float:
        """Relative mismatch of the expansion including the boundary term."""
        rhs = self.antisym + self.sym + self.commutator - self.boundary
        return abs(self.lhs - rhs) / max(self.lhs, self.antisym + self.sym, 1e-300)

    @property
    def residual_without_boundary(self) -> float:
        rhs = self.antisym + self.sym + self.commutator
        return abs(self.lhs - rhs) / max(self.lhs, self.antisym + self.sym, 1e-300)

    @property
    def carleman_holds(self) -> bool:
        return self.antisym + self.sym <= self.lhs * (1 + 1e-12) + 1e-300


def check_carleman_expansion(f: Vector, fdot: Vector, ops: OperatorPair, t0: float, t1: float,
                             nodes: int = 64) -> CarlemanResult:
    """Space-time norms of ``f' - S f - A f`` and its split, by Gauss-Legendre in ``t``.

    The expansion integrates ``-2 Re<S f, f' - A f>`` by parts in time, which
    produces ``-[D]_{t0}^{t1}``.  It is reported separately; trajectories
    vanishing at both ends make it zero.
    """
    x, wts = np.polynomial.legendre.leggauss(nodes)
    ts = 0.5 * (t1 - t0) * x + 0.5 * (t1 + t0)
    wts = 0.5 * (t1 - t0) * wts
    lhs = antisym = sym = comm = 0.0
    floor = np.inf
    for t, w in zip(ts, wts):
        t = float(t)
        g, gd = f(t), fdot(t)
        S, A = ops.S(t), ops.A(t)
        C = ops.commutator_term(t)
        lhs += w * _norm2(gd - S @ g - A @ g)
        antisym += w * _norm2(gd - A @ g)
        sym += w * _norm2(S @ g)
        comm += w * _inner(C @ g, g).real
        floor = min(floor, float(np.linalg.eigvalsh(0.5 * (C + C.conj().T)).min()))

    def D(t):
        g = f(t)
        return _inner(ops.S(t) @ g, g).real

    return CarlemanResult(lhs, antisym, sym, comm, D(t1) - D(t0), floor)


def polynomial_bump(rng: np.random.Generator, m: int, t0: float, t1: float, degree: int = 3):
    """Random vector polynomial ``(t - t0)(t1 - t) p(t)`` and its derivative."""
    coef = rng.standard_normal((degree + 1, m)) + 1j * rng.standard_normal((degree + 1, m))

    def p(t):
        return sum(c * t**k for k, c in enumerate(coef))

    def dp(t):
        return sum(k * c * t ** (k - 1) for k, c in enumerate(coef) if k)

    def f(t):
        return (t - t0) * (t1 - t) * p(t)

    def fdot(t):
        return (t1 + t0 - 2 * t) * p(t) + (t - t0) * (t1 - t) * dp(t)

    return f, fdot


def constant_flow(ops: OperatorPair, f0):
    """Closed-form ``f(t) = expm(t (S + A)) f0`` for constant operators, with ``f'``."""
    G = ops.generator(0.0)
    f0 = np.asarray(f0, dtype=complex)

    def f(t):
        return expm(t * G) @ f0

    def fdot(t):
        return G @ f(t)

    return f, fdot


# Gaussian surrogate of the linear-weight flow -------------------------------------


def spectral_derivatives(points: int, length: float) -> tuple[np.ndarray, np.ndarray]:
    """Periodic spectral first and second derivative matrices.

    The Nyquist mode of the first derivative is zeroed so the matrix is real
    skew-symmetric; the second derivative is its square.
    """
    k = 2 * np.pi * np.fft.fftfreq(points, d=length / points)
    k[points // 2] = 0.0
    eye = np.eye(points)
    D1 = np.fft.ifft(1j * k[:, None] * np.fft.fft(eye, axis=0), axis=0).real
    D1 = 0.5 * (D1 - D1.T)
    return D1, D1 @ D1


def weighted_flow_operators(lam: float, alpha: float, beta: float, points: int = 256,
                            length: float = 40.0) -> tuple[OperatorPair, np.ndarray]:
    """Discrete ``S = -(2i lam/s) d/dx - (alpha lam/s^2) x`` and ``A = i(d^2/dx^2 + lam^2/s^2)``.

    ``s = alpha t + beta``.  Returns the pair and the grid.
    """
    if points > 512:
        raise ValueError("dense surrogate limited to 512 points")
    x = -0.5 * length + np.arange(points) * (length / points)
    D1, D2 = spectral_derivatives(points, length)
    X = np.diag(x)
    eye = np.eye(points)

    def s(t):
        return alpha * t + beta

    def S(t):
        return -(2j * lam / s(t)) * D1 - (alpha * lam / s(t) ** 2) * X

    def A(t):
        return 1j * (D2 + (lam / s(t)) ** 2 * eye)

    def S_t(t):
        return (2j * alpha * lam / s(t) ** 2) * D1 + (2 * alpha**2 * lam / s(t) ** 3) * X

    return OperatorPair(points, S, A, S_t), x


@dataclass(frozen=True, eq=False)
class SurrogateReport:
    times: np.ndarray
    commutator_residual: float
    dlogH: np.ndarray
    d2logH: np.ndarray
    frequency_mismatch: float
    margins: np.ndarray

    @property
    def min_margin(self) -> float:
        return float(np.min(self.margins))

    def passed(self, tol: float = 1e-6, identity_tol: float = 1e-8) -> bool:
        return self.commutator_residual <= identity_tol and self.min_margin >= -tol


def gaussian_surrogate_check(u0, lam: float, alpha: float, beta: float, times=None,
                             points: int = 256, length: float = 40.0,
                             probes: int = 6, seed: int = 0) -> SurrogateReport:
    """Matrix form of the linear-weight flow and its convexity inequality.

    * commutator identity ``S_t + [S, A] = -(2 alpha / s) S`` applied to
      Gaussian-localised probe vectors (relative residual, worst case);
    * ``(log H)'' + (2 alpha / s) (log H)' >= 0`` for ``f = exp(lam x / s) u(t)``
      sampled on the grid, derivatives by Richardson-extrapolated differences;
    * agreement of ``(log H)'`` with ``2 <S f, f>/H`` from the matrices.
    """
    from .gaussian_calculus import propagate
    from .spectral import GridSpec, sample
    from .weighting import WeightSpec

    ops, x = weighted_flow_operators(lam, alpha, beta, points, length)
    times = np.linspace(0.05, 0.5, 10) if times is None else np.asarray(times, dtype=float)
    rng = np.random.default_rng(seed)
    spec = GridSpec(1, points, length)
    dx = spec.spacing

    worst = 0.0
    for t in times[:: max(1, len(times) // 3)]:
        t = float(t)
        ops.validate(t, tol=1e-12)
        s = alpha * t + beta
        lhs_op = ops.commutator_term(t)
        rhs_op = -(2 * alpha / s) * ops.S(t)
        for _ in range(probes):
            x0 = rng.uniform(-0.2, 0.2) * length
            k = rng.uniform(-3, 3)
            v = np.exp(-0.5 * (x - x0) ** 2 + 1j * k * x)
            scale = np.linalg.norm(ops.S_t(t) @ v) + 2 * np.linalg.norm(ops.S(t) @ (ops.A(t) @ v))
            if scale == 0:
                continue
            worst = max(worst, float(np.linalg.norm((lhs_op - rhs_op) @ v) / scale))

    def field(t):
        w = WeightSpec.linear([lam], alpha * t + beta)
        u = sample(propagate(u0, t), spec, guard=1e-12).values
        return np.exp(w.log_multiplier(x[:, None])) * u

    def logH(t):
        return float(np.log(np.sum(np.abs(field(t)) ** 2) * dx))

    d1, d2, mismatch = [], [], 0.0
    for t in times:
        t = float(t)
        h = 1e-2
        vals = {off: logH(t + off) for off in (-h, -h / 2, h / 2, h)}
        first = richardson(vals, h)
        c = logH(t)
        d2_h = (vals[h] - 2 * c + vals[-h]) / h**2
        d2_half = (vals[h / 2] - 2 * c + vals[-h / 2]) / (h / 2) ** 2
        second = (4 * d2_half - d2_h) / 3
        d1.append(first)
        d2.append(second)
        f = field(t)
        freq = 2 * _inner(ops.S(t) @ f, f).real / _norm2(f)
        mismatch = max(mismatch, abs(freq - first) / max(1.0, abs(first)))
    d1, d2 = np.array(d1), np.array(d2)
    margins = d2 + 2 * alpha / (alpha * times + beta) * d1
    return SurrogateReport(times, worst, d1, d2, mismatch, margins)
