"""Weight descriptors and the affine time scale ``alpha * t + beta``.

A weight multiplies the amplitude before the L2 norm is taken, so every norm
in the package is ``|| exp(phi) u ||_2``.  ``log_multiplier`` returns ``phi``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

import numpy as np

KINDS = (
    "linear",
    "gaussian_iso",
    "gaussian_aniso",
    "power_axis",
    "power_radial",
    "interaction_linear",
    "interaction_gaussian",
    "interaction_distance",
)


def _tuple(values) -> tuple[float, ...]:
    return tuple(float(v) for v in np.atleast_1d(np.asarray(values, dtype=float)))


@dataclass(frozen=True)
class WeightSpec:
    """Immutable description of an amplitude weight ``exp(phi(x))``.

    Use the classmethod constructors rather than calling this directly.
    ``interaction_*`` kinds act on tensor data ``u(x) v(y)``: a point is the
    concatenation ``(x, y)`` with ``x`` and ``y`` of equal dimension.
    """

    kind: str
    scale: float = 1.0
    lam: tuple[float, ...] = field(default_factory=tuple)
    gamma: tuple[float, ...] = field(default_factory=tuple)
    p: tuple[float, ...] = field(default_factory=tuple)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown weight kind {self.kind!r}")
        if not self.scale > 0:
            raise ValueError("weight scale must be positive")
        if any(g < 0 for g in self.gamma):
            raise ValueError("gamma entries must be non-negative")
        if any(not (1.0 < q <= 2.0) for q in self.p):
            raise ValueError("power exponents must lie in (1, 2]")
        if self.kind in ("power_axis",) and len(self.p) != len(self.gamma):
            raise ValueError("power_axis needs one exponent per gamma entry")

    # constructors -----------------------------------------------------

    @classmethod
    def linear(cls, lam, scale: float = 1.0) -> "WeightSpec":
        return cls("linear", float(scale), lam=_tuple(lam))

    @classmethod
    def trivial(cls, dim: int = 1) -> "WeightSpec":
        return cls.linear(np.zeros(dim))

    @classmethod
    def gaussian_iso(cls, scale: float = 1.0) -> "WeightSpec":
        return cls("gaussian_iso", float(scale))

    @classmethod
    def gaussian_aniso(cls, gamma, scale: float = 1.0) -> "WeightSpec":
        return cls("gaussian_aniso", float(scale), gamma=_tuple(gamma))

    @classmethod
    def power_axis(cls, p, gamma, scale: float = 1.0) -> "WeightSpec":
        gamma = _tuple(gamma)
        p = _tuple(p)
        if len(p) == 1 and len(gamma) > 1:
            p = p * len(gamma)
        return cls("power_axis", float(scale), gamma=gamma, p=p)

    @classmethod
    def power_radial(cls, p: float, scale: float = 1.0) -> "WeightSpec":
        return cls("power_radial", float(scale), p=(float(p),))

    @classmethod
    def interaction_linear(cls, lam, scale: float = 1.0) -> "WeightSpec":
        return cls("interaction_linear", float(scale), lam=_tuple(lam))

    @classmethod
    def interaction_gaussian(cls, scale: float = 1.0) -> "WeightSpec":
        return cls("interaction_gaussian", float(scale))

    @classmethod
    def interaction_distance(cls) -> "WeightSpec":
        return cls("interaction_distance", 1.0)

    # queries ------------------------------------------------------------

    @property
    def is_interaction(self) -> bool:
        return self.kind.startswith("interaction")

    @property
    def is_power(self) -> bool:
        return self.kind.startswith("power")

    def gaussian_rates(self, dim: int) -> np.ndarray:
        """Per-axis coefficient ``r_j`` of ``phi = sum r_j x_j**2`` (zero if none)."""
        s2 = self.scale**2
        if self.kind == "gaussian_iso":
            return np.full(dim, 1.0 / s2)
        if self.kind == "gaussian_aniso":
            return self._axis_vector(self.gamma, dim) / s2
        if self.kind == "power_axis":
            g = self._axis_vector(self.gamma, dim)
            p = self._axis_vector(self.p, dim)
            return np.where(p == 2.0, g / s2, 0.0)
        if self.kind == "power_radial" and self.p[0] == 2.0:
            return np.full(dim, 1.0 / s2)
        return np.zeros(dim)

    def linear_coeffs(self, dim: int) -> np.ndarray:
        if self.kind not in ("linear", "interaction_linear"):
            return np.zeros(dim)
        return self._axis_vector(self.lam, dim) / self.scale

    @staticmethod
    def _axis_vector(values, dim: int) -> np.ndarray:
        arr = np.asarray(values, dtype=float)
        if arr.size == 1:
            return np.full(dim, float(arr[0]))
        if arr.size != dim:
            raise ValueError(f"weight has {arr.size} components, data has dimension {dim}")
        return arr

    def log_multiplier(self, points) -> np.ndarray:
        """Evaluate ``phi`` at ``points`` of shape ``(..., n)`` (``(..., 2n)`` for pairs)."""
        pts = np.asarray(points, dtype=float)
        n = pts.shape[-1]
        s = self.scale
        kind = self.kind
        if kind == "linear":
            return pts @ self._axis_vector(self.lam, n) / s
        if kind == "gaussian_iso":
            return np.sum(pts**2, axis=-1) / s**2
        if kind == "gaussian_aniso":
            return pts**2 @ self._axis_vector(self.gamma, n) / s**2
        if kind == "power_axis":
            g = self._axis_vector(self.gamma, n)
            p = self._axis_vector(self.p, n)
            return np.sum(g * np.abs(pts / s) ** p, axis=-1)
        if kind == "power_radial":
            return (np.linalg.norm(pts, axis=-1) / s) ** self.p[0]
        if n % 2:
            raise ValueError("interaction weights need points of even dimension (x, y)")
        half = n // 2
        diff = pts[..., :half] - pts[..., half:]
        if kind == "interaction_linear":
            return diff @ self._axis_vector(self.lam, half) / s
        if kind == "interaction_gaussian":
            return np.sum(diff**2, axis=-1) / s**2
        with np.errstate(divide="ignore"):
            return np.log(np.linalg.norm(diff, axis=-1))

    # serialization ------------------------------------------------------

    def to_dict(self) -> dict[str, Any]:
        out: dict[str, Any] = {"kind": self.kind, "scale": self.scale}
        if self.lam:
            out["lam"] = list(self.lam)
        if self.gamma:
            out["gamma"] = list(self.gamma)
        if self.p:
            out["p"] = list(self.p)
        return out

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "WeightSpec":
        return cls(
            data["kind"],
            float(data.get("scale", 1.0)),
            lam=_tuple(data.get("lam", [])) if data.get("lam") is not None else (),
            gamma=_tuple(data.get("gamma", [])) if data.get("gamma") is not None else (),
            p=_tuple(data.get("p", [])) if data.get("p") is not None else (),
        )


@dataclass(frozen=True)
class ScheduleScale:
    """The affine weight scale ``alpha * t + beta``."""

    alpha: float
    beta: float

    def __post_init__(self):
        if self.alpha < 0:
            raise ValueError("alpha must be non-negative")
        if not self.beta > 0:
            raise ValueError("beta must be positive")

    def scale_at(self, t):
        return self.alpha * np.asarray(t, dtype=float) + self.beta
