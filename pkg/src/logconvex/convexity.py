"""Two-endpoint interpolation checks for weighted norms of free waves.

Every check evaluates a weighted norm ``||exp(phi_t) u(t)||`` at the times of
a :class:`ConvexitySchedule` and compares its logarithm with the interpolated
bound ``e(t) * left + (1 - e(t)) * right`` where ``e`` is ``theta`` or ``mu``.
Margins are log-domain differences ``rhs_log - lhs_log``, so they are
relative margins on the norms themselves.

Two data paths exist.  The exact path uses the closed-form Gaussian calculus.
The grid path samples the datum on a periodic box, propagates it with the FFT
and sums the weighted integrand; for Gaussian data the box is sized from the
closed-form spread of every weighted integrand the check will touch.
"""

from __future__ import annotations

import csv
import io
import itertools
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Sequence

import numpy as np

from .errors import AliasingGuardError, EndpointInfiniteError
from .gaussian_calculus import (
    ChirpedGaussian,
    boost,
    fourier,
    propagate,
    translate,
    weighted_l2_log_norm,
)
from .spectral import (
    GridField,
    GridSpec,
    fft_propagate,
    grid_fourier,
    sample,
    tensor_field,
)
from .weighted_norms import grid_weighted_log_norm, pair_weighted_log_norm
from .weighting import ScheduleScale, WeightSpec

EXACT_TOL = 1e-9
GRID_TOL = 1e-6
STATUSES = ("pass", "fail", "vacuous", "skipped")

# drops of the squared modulus at the edge of an automatic box: the field
# itself (below the 1e-12 aliasing guard) and the weighted integrand, which
# prefers WEIGHTED_DROP but may settle for ACCURACY_DROP when round-off noise
# amplified by the weight forces a smaller box
FIELD_DROP = 60.0
WEIGHTED_DROP = 30.0
ACCURACY_DROP = 24.0


# schedule ---------------------------------------------------------------


def lobatto_times(horizon: float, points: int = 33) -> np.ndarray:
    """Chebyshev-Lobatto nodes on ``[0, T]``; dense near both endpoints."""
    if points < 3:
        raise ValueError("need at least three time points")
    k = np.arange(points)
    t = 0.5 * horizon * (1.0 - np.cos(np.pi * k / (points - 1)))
    t[0], t[-1] = 0.0, horizon
    return t


@dataclass(frozen=True, eq=False)
class ConvexitySchedule:
    scale: ScheduleScale
    horizon: float
    times: np.ndarray = field(default=None)  # type: ignore[assignment]

    def __post_init__(self):
        if not self.horizon > 0:
            raise ValueError("horizon T must be positive")
        times = lobatto_times(self.horizon) if self.times is None else np.asarray(self.times, float)
        if np.any(np.diff(times) <= 0):
            raise ValueError("times must be strictly increasing")
        if times[0] < 0 or times[-1] > self.horizon:
            raise ValueError("times must lie in [0, T]")
        object.__setattr__(self, "times", times)

    @classmethod
    def make(cls, alpha: float, beta: float, horizon: float, points: int = 33) -> "ConvexitySchedule":
        return cls(ScheduleScale(alpha, beta), horizon, lobatto_times(horizon, points))

    @property
    def alpha(self) -> float:
        return self.scale.alpha

    @property
    def beta(self) -> float:
        return self.scale.beta

    def scale_at(self, t):
        return self.scale.scale_at(t)

    def theta_at(self, t):
        a, b, T = self.alpha, self.beta, self.horizon
        t = np.asarray(t, dtype=float)
        return b * (T - t) / (T * (a * t + b))

    def mu_at(self, t):
        return self.beta / self.scale_at(t)

    def rescaled(self, factor: float) -> "ConvexitySchedule":
        """Same scale, horizon and node count multiplied by ``factor``."""
        return ConvexitySchedule.make(self.alpha, self.beta, factor * self.horizon, len(self.times))

    def params(self) -> dict[str, float]:
        return {"alpha": self.alpha, "beta": self.beta, "T": self.horizon}


# report -----------------------------------------------------------------


def _num(x: float) -> float | str | None:
    x = float(x)
    if math.isnan(x):
        return None
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return x


@dataclass(eq=False)
class ConvexityReport:
    """Per-time sides of one check.

    For divided-difference checks ``lhs_log`` is zero and ``rhs_log`` holds the
    second difference, so the margin is the difference itself.
    """

    check: str
    params: dict[str, Any]
    times: np.ndarray
    lhs_log: np.ndarray
    rhs_log: np.ndarray
    tolerance: float
    status: str = ""
    constant: float | None = None
    path: str = "exact"

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        self.lhs_log = np.asarray(self.lhs_log, dtype=float)
        self.rhs_log = np.asarray(self.rhs_log, dtype=float)
        if not self.status:
            self.status = "pass" if self.min_margin >= -self.tolerance else "fail"
        if self.status not in STATUSES:
            raise ValueError(f"unknown status {self.status!r}")

    @property
    def margin(self) -> np.ndarray:
        with np.errstate(invalid="ignore"):
            return self.rhs_log - self.lhs_log

    @property
    def min_margin(self) -> float:
        m = self.margin
        m = m[~np.isnan(m)]
        return float(m.min()) if m.size else math.nan

    @property
    def passed(self) -> bool:
        return self.status == "pass"

    @property
    def vacuous(self) -> bool:
        return self.status == "vacuous"

    def rows(self):
        for t, lhs, rhs, m in zip(self.times, self.lhs_log, self.rhs_log, self.margin):
            yield float(t), float(lhs), float(rhs), float(m)

    def csv_text(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["t", "lhs_log", "rhs_log", "margin"])
        for row in self.rows():
            w.writerow([repr(v) for v in row])
        return buf.getvalue()

    def to_csv(self, path) -> None:
        Path(path).write_text(self.csv_text())

    def summary(self) -> dict[str, Any]:
        out: dict[str, Any] = {
            "check": self.check,
            "params": self.params,
            "pass": self.passed,
            "min_margin": _num(self.min_margin),
            "vacuous": self.vacuous,
            "status": self.status,
            "tolerance": self.tolerance,
            "path": self.path,
        }
        if self.constant is not None:
            out["constant"] = _num(self.constant)
        return out

    def to_json(self) -> str:
        return json.dumps(self.summary(), indent=2)


# data paths -------------------------------------------------------------


class _ExactPath:
    name = "exact"
    tol = EXACT_TOL

    def __init__(self, u0: ChirpedGaussian):
        self.u0 = u0

    def norm(self, t: float, w: WeightSpec) -> float:
        return weighted_l2_log_norm(propagate(self.u0, t), w)

    def fourier_norm(self, w: WeightSpec) -> float:
        return weighted_l2_log_norm(fourier(self.u0), w)


class _ExactPairPath(_ExactPath):
    def __init__(self, u0: ChirpedGaussian, v0: ChirpedGaussian):
        if u0.dim != v0.dim:
            raise ValueError("pair members must have the same dimension")
        self.u0, self.v0 = u0, v0

    def norm(self, t: float, w: WeightSpec) -> float:
        return pair_weighted_log_norm(propagate(self.u0, t), propagate(self.v0, t), w)

    def fourier_norm(self, w: WeightSpec) -> float:
        return pair_weighted_log_norm(fourier(self.u0), fourier(self.v0), w)


class _GridPath:
    name = "grid"
    tol = GRID_TOL

    def __init__(self, field0: GridField):
        self.field0 = field0
        self._hat: GridField | None = None

    def field_at(self, t: float) -> GridField:
        return fft_propagate(self.field0, t)

    def norm(self, t: float, w: WeightSpec) -> float:
        return grid_weighted_log_norm(self.field_at(t), w)

    def fourier_norm(self, w: WeightSpec) -> float:
        if self._hat is None:
            self._hat = grid_fourier(self.field0)
        return grid_weighted_log_norm(self._hat, w)


class _GridPairPath(_GridPath):
    def __init__(self, u0: GridField, v0: GridField):
        if u0.spec != v0.spec or u0.spec.dim != 1:
            raise ValueError("grid pairs need two 1-d fields on one grid")
        self.u0, self.v0 = u0, v0
        self._hat = None

    def field_at(self, t: float) -> GridField:
        return tensor_field(fft_propagate(self.u0, t), fft_propagate(self.v0, t))

    def fourier_norm(self, w: WeightSpec) -> float:
        if self._hat is None:
            self._hat = tensor_field(grid_fourier(self.u0), grid_fourier(self.v0))
        return grid_weighted_log_norm(self._hat, w)


# automatic box ----------------------------------------------------------
#
# A requirement describes ``2 log|g|`` by a quadratic form ``(Q0, B0)`` and the
# weighted integrand ``2 log|g| + 2 phi`` by ``(Q, B)`` (power terms with p < 2
# excluded).  The box half-width must be large enough for both to have fallen
# below their peaks, and small enough that round-off noise of relative size
# ``exp(NOISE_LOG)`` (measured FFT floor), amplified by the weight at the box
# corners, stays ACCURACY_DROP below the weighted peak.

NOISE_LOG = math.log(5e-16)


@dataclass(frozen=True, eq=False)
class _Requirement:
    Q0: np.ndarray
    B0: np.ndarray
    Q: np.ndarray
    B: np.ndarray
    weight: WeightSpec | None = None
    tensor: bool = False


def _single_req(g: ChirpedGaussian, w: WeightSpec | None = None) -> _Requirement:
    Q0 = np.diag(2.0 * g.quad.real)
    B0 = 2.0 * g.lin.real
    if w is None:
        return _Requirement(Q0, B0, Q0, B0)
    n = g.dim
    Q = Q0 - 2.0 * np.diag(w.gaussian_rates(n))
    B = B0 + 2.0 * w.linear_coeffs(n)
    return _Requirement(Q0, B0, Q, B, w)


def _pair_req(u: ChirpedGaussian, v: ChirpedGaussian, w: WeightSpec | None = None) -> _Requirement:
    if u.dim != 1:
        raise ValueError("grid pairs are limited to n = 1")
    Q0 = np.diag([2.0 * u.quad.real[0], 2.0 * v.quad.real[0]])
    B0 = np.array([2.0 * u.lin.real[0], 2.0 * v.lin.real[0]])
    if w is None:
        return _Requirement(Q0, B0, Q0, B0)
    rate = 1.0 / w.scale**2 if w.kind == "interaction_gaussian" else 0.0
    lin = float(w.linear_coeffs(1)[0]) if w.kind == "interaction_linear" else 0.0
    Q = Q0 - 2.0 * rate * np.array([[1.0, -1.0], [-1.0, 1.0]])
    B = B0 + np.array([2.0 * lin, -2.0 * lin])
    return _Requirement(Q0, B0, Q, B, w, tensor=True)


def _peak(Q, B) -> float:
    return 0.25 * float(B @ np.linalg.solve(Q, B))


def _reach(Q, B, drop: float) -> tuple[float, float, float]:
    lam = float(np.linalg.eigvalsh(Q).min())
    if lam <= 0:
        raise AliasingGuardError("weighted integrand does not decay; no finite box exists")
    center = float(np.max(np.abs(np.linalg.solve(Q, B)))) / 2.0
    return center + math.sqrt(drop / lam), center, lam


def _corner_phi(w: WeightSpec, h: float, k: int) -> float:
    corners = np.array(list(itertools.product((-h, h), repeat=k)))
    return float(np.max(w.log_multiplier(corners)))


def _weighted_reach(req: _Requirement, drop: float) -> float:
    h, center, lam = _reach(req.Q, req.B, drop)
    w = req.weight
    if w is not None and w.is_power:
        k = req.Q.shape[0]
        while lam * (h - center) ** 2 - 2.0 * _corner_phi(w, h, k) < drop:
            h *= 1.25
    return h


def _noise_log(req: _Requirement, h: float) -> float:
    """Largest weighted round-off contribution on a box of half-width ``h``.

    A jointly transformed field carries noise ``eps * max|f|`` everywhere, so
    the worst point is a corner.  A tensor ``u(x) v(y)`` of separately
    propagated factors only sees ``eps * max|u| * |v(y)|`` near ``x = +-h``
    (and symmetrically), so the boundary lines are scanned instead.
    """
    k = req.Q.shape[0]
    w = req.weight
    if not req.tensor:
        return 2.0 * NOISE_LOG + _peak(req.Q0, req.B0) + 2.0 * _corner_phi(w, h, k)
    q = np.diag(req.Q0)
    b = req.B0
    line = np.linspace(-h, h, 801)
    worst = -math.inf
    for noisy, other in ((0, 1), (1, 0)):
        peak_noisy = b[noisy] ** 2 / (4.0 * q[noisy])
        profile = -q[other] * line**2 + b[other] * line
        for edge in (-h, h):
            pts = np.empty((line.size, 2))
            pts[:, noisy] = edge
            pts[:, other] = line
            worst = max(worst, float(np.max(profile + 2.0 * w.log_multiplier(pts))) + peak_noisy)
    return 2.0 * NOISE_LOG + worst


def _noise_ok(req: _Requirement, h: float) -> bool:
    if req.weight is None:
        return True
    return _noise_log(req, h) <= _peak(req.Q, req.B) - ACCURACY_DROP


def _box_half_width(reqs) -> float:
    """Largest half-width in the admissible window of every requirement."""
    floor = max(_reach(r.Q0, r.B0, FIELD_DROP)[0] for r in reqs)
    weighted = [r for r in reqs if r.weight is not None]
    if not weighted:
        return floor
    low = max([floor] + [_weighted_reach(r, ACCURACY_DROP) for r in weighted])
    high = max([floor] + [_weighted_reach(r, WEIGHTED_DROP) for r in weighted])

    def ok(h):
        return all(_noise_ok(r, h) for r in weighted)

    if ok(high):
        return high
    if not ok(low):
        raise AliasingGuardError(
            "no box resolves the weighted integrand without amplifying round-off noise"
        )
    for _ in range(60):
        mid = 0.5 * (low + high)
        low, high = (mid, high) if ok(mid) else (low, mid)
    return low


def _pow2_at_least(x: float, floor: int) -> int:
    n = floor
    while n < x:
        n *= 2
    return n


def auto_grid(space_reqs, fourier_reqs, dim: int, fourier_weighted: bool = False,
              min_points: int = 256, max_points: int | None = None) -> GridSpec:
    """Power-of-two grid whose box and dual box satisfy every requirement.

    With ``fourier_weighted`` the dual half-width is pinned to its lower
    bound (the box length absorbs the power-of-two rounding); otherwise the
    box half-width is pinned.  Raises :class:`AliasingGuardError` when the
    decay and noise bounds are incompatible or the grid would be too large.
    """
    if max_points is None:
        max_points = 1 << 16 if dim == 1 else 1 << 10
    hx = _box_half_width(space_reqs)
    hxi = _box_half_width(fourier_reqs)
    if fourier_weighted:
        points = _pow2_at_least(2.0 * hx * hxi / math.pi, min_points)
        length = math.pi * points / hxi
    else:
        length = 2.0 * hx
        points = _pow2_at_least(length * hxi / math.pi, min_points)
    if points > max_points:
        raise AliasingGuardError(f"automatic grid needs {points} points per axis (limit {max_points})")
    return GridSpec(dim, points, length)


class _AutoGridPath(_GridPath):
    """Grid path that sizes a fresh box for every (time, weight) evaluation."""

    def __init__(self, u0: ChirpedGaussian, v0: ChirpedGaussian | None = None):
        if v0 is not None and (u0.dim != 1 or v0.dim != 1):
            raise ValueError("grid pairs are limited to n = 1")
        self.u0, self.v0 = u0, v0
        self.dim = u0.dim if v0 is None else 2

    def _members(self):
        return (self.u0,) if self.v0 is None else (self.u0, self.v0)

    def _sampled(self, spec: GridSpec) -> list[GridField]:
        if self.v0 is None:
            return [sample(self.u0, spec)]
        one = GridSpec(1, spec.points, spec.length)
        return [sample(self.u0, one), sample(self.v0, one)]

    def norm(self, t: float, w: WeightSpec) -> float:
        members = self._members()
        moved = [propagate(g, t) for g in members]
        space = [_single_req(g) for g in members + tuple(moved)]
        space.append(_single_req(moved[0], w) if self.v0 is None else _pair_req(*moved, w))
        freq = [_single_req(fourier(g)) for g in members]
        spec = auto_grid(space, freq, self.dim, False)
        fields = [fft_propagate(f, t) for f in self._sampled(spec)]
        field = fields[0] if self.v0 is None else tensor_field(*fields)
        return grid_weighted_log_norm(field, w)

    def fourier_norm(self, w: WeightSpec) -> float:
        members = self._members()
        hats = [fourier(g) for g in members]
        space = [_single_req(g) for g in members]
        freq = [_single_req(h) for h in hats]
        freq.append(_single_req(hats[0], w) if self.v0 is None else _pair_req(*hats, w))
        spec = auto_grid(space, freq, self.dim, True)
        fields = [grid_fourier(f) for f in self._sampled(spec)]
        field = fields[0] if self.v0 is None else tensor_field(*fields)
        return grid_weighted_log_norm(field, w)


def _make_path(u0, source: str, v0=None):
    """Exact or grid path for single data (``v0 is None``) or a pair."""
    if source not in ("exact", "grid"):
        raise ValueError("source must be 'exact' or 'grid'")
    if isinstance(u0, GridField):
        return _GridPath(u0) if v0 is None else _GridPairPath(u0, v0)
    if source == "exact":
        return _ExactPath(u0) if v0 is None else _ExactPairPath(u0, v0)
    return _AutoGridPath(u0, v0)


# generic interpolation check ------------------------------------------


def _data_dim(u0) -> int:
    return u0.spec.dim if isinstance(u0, GridField) else u0.dim


def _interpolate(name: str, params: dict, sched: ConvexitySchedule, path,
                 space_weight: Callable[[float], WeightSpec], variant: str,
                 fourier_weight: WeightSpec | None = None, vacuous: bool = False,
                 tol: float | None = None, log_const: float = 0.0) -> ConvexityReport:
    """Evaluate ``lhs(t)`` and ``e(t) left + (1 - e(t)) right`` over the schedule."""
    times = sched.times
    tol = path.tol if tol is None else tol
    left = path.norm(0.0, space_weight(0.0))
    if variant == "theta":
        right = path.norm(sched.horizon, space_weight(sched.horizon))
        e = sched.theta_at(times)
    elif variant == "mu":
        if fourier_weight is None:
            raise ValueError("the mu interpolation needs a Fourier-side weight")
        right = path.fourier_norm(fourier_weight)
        e = sched.mu_at(times)
    else:
        raise ValueError(f"unknown interpolation {variant!r}")

    finite = math.isfinite(left) and math.isfinite(right)
    if not finite and not vacuous:
        raise EndpointInfiniteError(
            f"{name}: endpoint norms are not finite (left {left}, right {right})"
        )
    lhs = np.array([path.norm(float(t), space_weight(float(t))) for t in times])
    with np.errstate(invalid="ignore"):
        rhs = e * left + (1.0 - e) * right + log_const
    status = "vacuous" if vacuous else ""
    return ConvexityReport(name, params, times, lhs, rhs, tol, status=status, path=path.name)


def _lam_vector(lam, dim: int) -> tuple[float, ...]:
    arr = np.atleast_1d(np.asarray(lam, dtype=float))
    if arr.size == 1:
        arr = np.full(dim, float(arr[0]))
    if arr.size != dim:
        raise ValueError("lambda must have one entry per dimension")
    return tuple(float(x) for x in arr)


# Theorem-level checks ---------------------------------------------------


def vacuous_2_22(sched: ConvexitySchedule) -> bool:
    a, b, T = sched.alpha, sched.beta, sched.horizon
    return 4 * T >= b * (a * T + b)


def vacuous_2_23(sched: ConvexitySchedule) -> bool:
    return 4 >= sched.alpha * sched.beta


def check_eq_2_20(u0, lam, sched: ConvexitySchedule, source: str = "exact",
                  tol: float | None = None) -> ConvexityReport:
    """Linear weight ``lambda.x / (alpha t + beta)`` between the two endpoint times."""
    lam = _lam_vector(lam, _data_dim(u0))

    def w(t):
        return WeightSpec.linear(lam, float(sched.scale_at(t)))

    path = _make_path(u0, source)
    params = {**sched.params(), "lam": list(lam)}
    return _interpolate("eq_2_20", params, sched, path, w, "theta", tol=tol)


def check_eq_2_21(u0, lam, sched: ConvexitySchedule, source: str = "exact",
                  tol: float | None = None) -> ConvexityReport:
    """Linear weight against ``exp(2 lambda.xi / alpha) u0^`` with exponent ``1 - mu``."""
    if not sched.alpha > 0:
        raise ValueError("this check needs alpha > 0")
    lam = _lam_vector(lam, _data_dim(u0))

    def w(t):
        return WeightSpec.linear(lam, float(sched.scale_at(t)))

    fw = WeightSpec.linear(lam, sched.alpha / 2.0)
    path = _make_path(u0, source)
    params = {**sched.params(), "lam": list(lam)}
    return _interpolate("eq_2_21", params, sched, path, w, "mu", fw, tol=tol)


def check_eq_2_22(u0, sched: ConvexitySchedule, source: str = "exact",
                  tol: float | None = None) -> ConvexityReport:
    """Gaussian weight ``|x|^2 / (alpha t + beta)^2`` between the endpoint times.

    Flagged vacuous when ``4T >= beta (alpha T + beta)``; in that region the
    weighted norms of any nonzero datum cannot both be finite.
    """
    def w(t):
        return WeightSpec.gaussian_iso(float(sched.scale_at(t)))

    vac = vacuous_2_22(sched)
    params = sched.params()
    path = _ExactPath(u0) if vac and not isinstance(u0, GridField) else _make_path(u0, source)
    return _interpolate("eq_2_22", params, sched, path, w, "theta", vacuous=vac, tol=tol)


def check_eq_2_23(u0, sched: ConvexitySchedule, source: str = "exact",
                  tol: float | None = None) -> ConvexityReport:
    """Gaussian weight against ``exp(4 |xi|^2 / alpha^2) u0^``; vacuous when ``alpha beta <= 4``."""
    if not sched.alpha > 0:
        raise ValueError("this check needs alpha > 0")

    def w(t):
        return WeightSpec.gaussian_iso(float(sched.scale_at(t)))

    fw = WeightSpec.gaussian_iso(sched.alpha / 2.0)
    vac = vacuous_2_23(sched)
    params = sched.params()
    if vac and not isinstance(u0, GridField):
        path = _ExactPath(u0)
    else:
        path = _make_path(u0, source)
    return _interpolate("eq_2_23", params, sched, path, w, "mu", fw, vacuous=vac, tol=tol)


def second_differences(t, f) -> np.ndarray:
    """Second divided differences ``2 f[t0, t1, t2]`` on a nonuniform grid."""
    t = np.asarray(t, dtype=float)
    f = np.asarray(f, dtype=float)
    d1 = np.diff(f) / np.diff(t)
    return 2.0 * np.diff(d1) / (t[2:] - t[:-2])


def _dd_report(name, params, t, f, tol, path_name) -> ConvexityReport:
    dd = second_differences(t, f)
    h = float(np.min(np.diff(t)))
    # round-off in f is amplified by 1/h^2 in the differences
    scaled_tol = tol + 16.0 * np.finfo(float).eps * max(1.0, float(np.max(np.abs(f)))) / (h * h)
    return ConvexityReport(name, params, np.asarray(t)[1:-1], np.zeros_like(dd), dd,
                           scaled_tol, path=path_name)


def check_logconvex_G(u0, sched: ConvexitySchedule, lam=None, weight: str = "linear",
                      source: str = "exact", tol: float | None = None) -> ConvexityReport:
    """Convexity of ``(alpha t + beta) log H(t)`` with ``H = ||exp(phi_t) u(t)||^2``.

    ``weight='linear'`` uses ``lambda.x / (alpha t + beta)``; ``'gaussian'``
    uses ``|x|^2 / (alpha t + beta)^2``.
    """
    n = _data_dim(u0)
    if weight == "linear":
        lam_v = _lam_vector(0.0 if lam is None else lam, n)

        def w(t):
            return WeightSpec.linear(lam_v, float(sched.scale_at(t)))
        params = {**sched.params(), "weight": weight, "lam": list(lam_v)}
    elif weight == "gaussian":
        def w(t):
            return WeightSpec.gaussian_iso(float(sched.scale_at(t)))
        params = {**sched.params(), "weight": weight}
    else:
        raise ValueError("weight must be 'linear' or 'gaussian'")
    path = _make_path(u0, source)
    tol = path.tol if tol is None else tol
    logH = np.array([2.0 * path.norm(float(t), w(float(t))) for t in sched.times])
    if not np.all(np.isfinite(logH)):
        raise EndpointInfiniteError("weighted norm is infinite on the time grid")
    f = sched.scale_at(sched.times) * logH
    return _dd_report("logconvex_G", params, sched.times, f, tol, path.name)


# Section 3 --------------------------------------------------------------


def check_cor_3_1(u0, gamma, sched: ConvexitySchedule, variant: str = "theta",
                  source: str = "exact", tol: float | None = None) -> ConvexityReport:
    """Anisotropic weight ``sum gamma_j x_j^2 / (alpha t + beta)^2``."""
    n = _data_dim(u0)
    gamma = tuple(float(g) for g in np.broadcast_to(np.asarray(gamma, float), (n,)))

    def w(t):
        return WeightSpec.gaussian_aniso(gamma, float(sched.scale_at(t)))

    fw = WeightSpec.gaussian_aniso(gamma, sched.alpha / 2.0) if variant == "mu" else None
    path = _make_path(u0, source)
    params = {**sched.params(), "gamma": list(gamma), "variant": variant}
    return _interpolate("cor_3_1", params, sched, path, w, variant, fw, tol=tol)


def _power_weights(n: int, p, gamma, radial: bool):
    if radial:
        p = float(p)

        def w(s):
            return WeightSpec.power_radial(p, s)
        return w, {"p": p, "radial": True}
    p = tuple(float(x) for x in np.broadcast_to(np.asarray(p, float), (n,)))
    gamma = tuple(float(x) for x in np.broadcast_to(np.asarray(1.0 if gamma is None else gamma, float), (n,)))

    def w(s):
        return WeightSpec.power_axis(p, gamma, s)
    return w, {"p": list(p), "gamma": list(gamma), "radial": False}


def _power_constant(u0, sched, weight_of_scale, variant, source) -> tuple[ConvexityReport, float]:
    def w(t):
        return weight_of_scale(float(sched.scale_at(t)))

    fw = weight_of_scale(sched.alpha / 2.0) if variant == "mu" else None
    path = _make_path(u0, source)
    base = _interpolate("cor_3_2_3_3", {}, sched, path, w, variant, fw)
    log_c = float(np.max(base.lhs_log - base.rhs_log))
    return base, log_c


def check_cor_3_2_3_3(u0, sched: ConvexitySchedule, p, gamma=None, radial: bool = False,
                      variant: str = "theta", source: str = "exact",
                      stability: float = 10.0) -> ConvexityReport:
    """Power weights ``gamma_j |x_j / (alpha t + beta)|^p_j`` (or radial ``|x/s|^p``).

    Reports the smallest constant ``c`` for which the interpolation bound
    holds on the time grid.  ``rhs_log`` includes ``log c``.  The check passes
    when ``c`` is finite and changes by at most ``stability`` when the
    horizon is doubled.
    """
    n = _data_dim(u0)
    weight_of_scale, wparams = _power_weights(n, p, gamma, radial)
    base, log_c = _power_constant(u0, sched, weight_of_scale, variant, source)
    _, log_c2 = _power_constant(u0, sched.rescaled(2.0), weight_of_scale, variant, source)
    stable = math.isfinite(log_c) and math.isfinite(log_c2) and abs(log_c2 - log_c) <= math.log(stability)
    params = {**sched.params(), **wparams, "variant": variant,
              "constant_2T": math.exp(log_c2) if math.isfinite(log_c2) else math.inf}
    log_used = max(log_c, 0.0)
    return ConvexityReport(
        "cor_3_2_3_3", params, base.times, base.lhs_log, base.rhs_log + log_used,
        base.tolerance, status="pass" if stable else "fail",
        constant=math.exp(log_used), path=base.path,
    )


COR_3_4_VARIANTS = ("dos1", "dos3", "fourier-linear", "fourier-gaussian")


def check_cor_3_4(u0, v0, sched: ConvexitySchedule, variant: str = "dos3", lam=None,
                  source: str = "exact", tol: float | None = None) -> ConvexityReport:
    """Interaction weights on ``u(x, t) v(y, t)``.

    ``dos1``/``fourier-linear`` use ``lambda.(x - y)/(alpha t + beta)``;
    ``dos3``/``fourier-gaussian`` use ``|x - y|^2/(alpha t + beta)^2``.  The
    Fourier variants interpolate against ``u0^(xi) v0^(eta)`` with the weight
    scale ``alpha / 2``.
    """
    if variant not in COR_3_4_VARIANTS:
        raise ValueError(f"variant must be one of {COR_3_4_VARIANTS}")
    n = _data_dim(u0)
    linear = variant in ("dos1", "fourier-linear")
    params = {**sched.params(), "variant": variant}
    if linear:
        lam_v = _lam_vector(1.0 if lam is None else lam, n)
        params["lam"] = list(lam_v)

        def w(s):
            return WeightSpec.interaction_linear(lam_v, s)
    else:
        def w(s):
            return WeightSpec.interaction_gaussian(s)

    def space_weight(t):
        return w(float(sched.scale_at(t)))

    interp = "theta" if variant.startswith("dos") else "mu"
    fw = w(sched.alpha / 2.0) if interp == "mu" else None
    path = _make_path(u0, source, v0=v0)
    return _interpolate("cor_3_4", params, sched, path, space_weight, interp, fw, tol=tol)


def check_variance_convexity(u0, v0, times=None, source: str = "exact",
                             tol: float = 1e-8) -> ConvexityReport:
    """Convexity in ``t`` of ``|| |x - y| u(x, t) v(y, t) ||^2`` (negative times included)."""
    times = np.linspace(-1.0, 1.0, 41) if times is None else np.asarray(times, dtype=float)
    w = WeightSpec.interaction_distance()
    path = _make_path(u0, source, v0=v0)
    F = np.array([math.exp(2.0 * path.norm(float(t), w)) for t in times])
    return _dd_report("variance_convexity", {"t_min": float(times[0]), "t_max": float(times[-1]),
                                             "points": int(times.size)},
                      times, F, tol, path.name)


def check_cor_3_5(u0: ChirpedGaussian, nu, sched: ConvexitySchedule, variant: str = "gal1",
                  route: str = "delegate", source: str = "exact",
                  tol: float | None = None) -> ConvexityReport:
    """Moving-centre Gaussian weights ``|x + 2 t nu|^2 / (alpha t + beta)^2``.

    ``route='delegate'`` boosts the datum by ``exp(i nu.x)`` and runs the
    centred check; ``route='direct'`` evaluates the shifted weights on the
    unboosted solution (exact path only).  ``gal1`` interpolates between the
    endpoint times, ``gal2`` against ``exp(4 |xi + nu|^2 / alpha^2) u0^``.

    ``route='comoving'`` is the equivariance counterpart: the boosted
    solution measured with weights centred on its moving packet
    (``|x - 2 t nu|^2`` and ``|xi - nu|^2``), which reproduces the unboosted
    centred check.
    """
    if variant not in ("gal1", "gal2"):
        raise ValueError("variant must be 'gal1' or 'gal2'")
    nu_v = np.broadcast_to(np.asarray(nu, dtype=float), (u0.dim,)).copy()
    params = {**sched.params(), "nu": nu_v.tolist(), "variant": variant, "route": route}
    if route == "delegate":
        boosted = boost(u0, nu_v)
        rep = check_eq_2_22(boosted, sched, source, tol) if variant == "gal1" \
            else check_eq_2_23(boosted, sched, source, tol)
        rep.check, rep.params = "cor_3_5", params
        return rep
    if route not in ("direct", "comoving"):
        raise ValueError("route must be 'delegate', 'direct' or 'comoving'")

    def w(t):
        return WeightSpec.gaussian_iso(float(sched.scale_at(t)))

    # weights centred at -2 t nu (direct) or +2 t nu (comoving) are applied by
    # translating the solution the opposite way
    sign = 1.0 if route == "direct" else -1.0
    data = u0 if route == "direct" else boost(u0, nu_v)

    class _Shifted(_ExactPath):
        def norm(self, t, weight):
            moved = translate(propagate(self.u0, t), sign * 2.0 * t * nu_v)
            return weighted_l2_log_norm(moved, weight)

        def fourier_norm(self, weight):
            return weighted_l2_log_norm(translate(fourier(self.u0), sign * nu_v), weight)

    path = _Shifted(data)
    if variant == "gal1":
        return _interpolate("cor_3_5", params, sched, path, w, "theta",
                            vacuous=vacuous_2_22(sched), tol=tol)
    if not sched.alpha > 0:
        raise ValueError("gal2 needs alpha > 0")
    return _interpolate("cor_3_5", params, sched, path, w, "mu",
                        WeightSpec.gaussian_iso(sched.alpha / 2.0),
                        vacuous=vacuous_2_23(sched), tol=tol)


@dataclass(frozen=True, eq=False)
class NuSchedule:
    """``nu(t) = 1 / (alpha t + beta)^2`` with per-time finiteness of ``||exp(nu |x|^2) u(t)||``."""

    times: np.ndarray
    nu: np.ndarray
    finite: np.ndarray
    hypotheses: bool

    @property
    def certified(self) -> bool:
        return bool(self.hypotheses and np.all(self.finite))


def nu_schedule(u0: ChirpedGaussian, alpha: float, beta: float,
                times: Sequence[float] | None = None) -> NuSchedule:
    """Tabulate the decay schedule and certify it from closed-form rates.

    The hypotheses are the finiteness of both right-hand norms of the
    Fourier-side Gaussian interpolation: ``min Re z > 1/beta^2`` and the
    Fourier rate above ``4/alpha^2``.
    """
    scale = ScheduleScale(alpha, beta)
    times = np.linspace(0.0, 1.0, 21) if times is None else np.asarray(times, dtype=float)
    nu = 1.0 / scale.scale_at(times) ** 2
    hyp = bool(np.min(u0.quad.real) > 1.0 / beta**2
               and alpha > 0 and np.min(fourier(u0).quad.real) > 4.0 / alpha**2)
    finite = np.array([np.min(propagate(u0, float(t)).quad.real) > v for t, v in zip(times, nu)])
    return NuSchedule(times, nu, finite, hyp)
