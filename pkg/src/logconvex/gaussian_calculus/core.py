"""Closed-form algebra of chirped Gaussians.

A chirped Gaussian is ``exp(log_amp + sum_j (-z_j x_j**2 + c_j x_j))`` with
complex ``z_j`` (``Re z_j > 0``) and complex ``c_j``.  The family is closed
under the unitary Fourier transform, the free Schrodinger group, the heat
semigroup, chirps, boosts, products and convolutions, so every one of these
operations is a map on the coefficients.

Fourier convention: ``f^(xi) = (2 pi)^(-n/2) int exp(-i x.xi) f(x) dx``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Any

import numpy as np

LOG_2PI = math.log(2.0 * math.pi)


def _cvec(values, dim: int | None = None) -> np.ndarray:
    arr = np.atleast_1d(np.asarray(values, dtype=complex)).copy()
    if dim is not None and arr.size == 1 and dim > 1:
        arr = np.full(dim, arr[0], dtype=complex)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False, init=False, repr=False)
class ChirpedGaussian:
    """Diagonal complex Gaussian ``exp(log_amp + sum(-quad * x**2 + lin * x))``."""

    log_amp: complex
    quad: np.ndarray
    lin: np.ndarray

    def __init__(self, quad, lin=0.0, log_amp: complex = 0.0):
        quad = _cvec(quad)
        lin = _cvec(lin, quad.size)
        if lin.size != quad.size:
            raise ValueError("quad and lin must have the same length")
        if not np.all(np.isfinite(quad)) or not np.all(np.isfinite(lin)):
            raise ValueError("coefficients must be finite")
        if np.any(quad.real <= 0):
            raise ValueError("every quadratic coefficient needs a positive real part")
        object.__setattr__(self, "quad", quad)
        object.__setattr__(self, "lin", lin)
        object.__setattr__(self, "log_amp", complex(log_amp))

    @property
    def dim(self) -> int:
        return self.quad.size

    def __repr__(self) -> str:
        return (
            f"ChirpedGaussian(quad={self.quad.tolist()}, lin={self.lin.tolist()}, "
            f"log_amp={self.log_amp!r})"
        )

    def allclose(self, other: "ChirpedGaussian", rtol=1e-12, atol=1e-12) -> bool:
        """Coefficient-wise comparison; ``log_amp`` is compared modulo ``2 pi i``."""
        if self.dim != other.dim:
            return False
        d = self.log_amp - other.log_amp
        d = complex(d.real, math.remainder(d.imag, 2 * math.pi))
        return (
            np.allclose(self.quad, other.quad, rtol=rtol, atol=atol)
            and np.allclose(self.lin, other.lin, rtol=rtol, atol=atol)
            and abs(d) <= atol + rtol * abs(self.log_amp)
        )

    # evaluation ---------------------------------------------------------

    def log_value(self, points) -> np.ndarray:
        """Complex logarithm of the analytic continuation at ``points``.

        ``points`` has shape ``(..., n)`` (a scalar is accepted when ``n == 1``)
        and may be complex.  Real part is ``log|g|``, imaginary part the phase.
        """
        w = np.asarray(points, dtype=complex)
        if self.dim == 1 and (w.ndim == 0 or w.shape[-1] != 1):
            w = w[..., None]
        return self.log_amp + np.sum(-self.quad * w**2 + self.lin * w, axis=-1)

    def __call__(self, points) -> np.ndarray:
        return np.exp(self.log_value(points))

    def log_modulus(self, points) -> np.ndarray:
        return self.log_value(points).real

    # serialization ------------------------------------------------------

    def to_dict(self) -> dict[str, Any]:
        return {
            "dim": self.dim,
            "log_amp": [self.log_amp.real, self.log_amp.imag],
            "quad": [[z.real, z.imag] for z in self.quad.tolist()],
            "lin": [[c.real, c.imag] for c in self.lin.tolist()],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "ChirpedGaussian":
        quad = [complex(re, im) for re, im in data["quad"]]
        lin = [complex(re, im) for re, im in data["lin"]]
        if "dim" in data and int(data["dim"]) != len(quad):
            raise ValueError("'dim' does not match the number of quadratic coefficients")
        re, im = data.get("log_amp", [0.0, 0.0])
        return cls(quad, lin, complex(re, im))

    @classmethod
    def from_json(cls, text: str) -> "ChirpedGaussian":
        return cls.from_dict(json.loads(text))


def gaussian(rate, dim: int = 1, lin=0.0, log_amp: complex = 0.0) -> ChirpedGaussian:
    """Shorthand for ``exp(-rate |x|^2 + lin.x)`` in ``dim`` dimensions."""
    return ChirpedGaussian(_cvec(rate, dim), _cvec(lin, dim), log_amp)


def random_chirped(
    rng: np.random.Generator,
    dim: int = 1,
    re_range=(0.3, 3.0),
    im_bound: float = 2.0,
    lin_bound: float = 2.0,
    real: bool = False,
) -> ChirpedGaussian:
    """Draw a Gaussian with ``Re z`` uniform in ``re_range``, ``|Im z| <= im_bound``
    and ``|c| <= lin_bound`` (uniform radius and phase)."""
    re = rng.uniform(*re_range, size=dim)
    if real:
        return ChirpedGaussian(re, np.zeros(dim))
    im = rng.uniform(-im_bound, im_bound, size=dim)
    radius = rng.uniform(0.0, lin_bound, size=dim)
    phase = rng.uniform(0.0, 2 * np.pi, size=dim)
    return ChirpedGaussian(re + 1j * im, radius * np.exp(1j * phase))


def evaluate(g: ChirpedGaussian, point) -> tuple[float, float]:
    """``(log|g(w)|, arg g(w))`` at a single complex point ``w``."""
    lv = complex(np.asarray(g.log_value(point)).reshape(-1)[0])
    return lv.real, math.remainder(lv.imag, 2 * math.pi)


# transforms -------------------------------------------------------------


def fourier(g: ChirpedGaussian) -> ChirpedGaussian:
    """Unitary Fourier transform: ``z -> 1/(4z)``, ``c -> -i c/(2z)``."""
    z, c = g.quad, g.lin
    log_amp = g.log_amp + np.sum(-0.5 * np.log(2 * z) + c**2 / (4 * z))
    return ChirpedGaussian(1 / (4 * z), -1j * c / (2 * z), log_amp)


def inverse_fourier(g: ChirpedGaussian) -> ChirpedGaussian:
    z, c = g.quad, g.lin
    log_amp = g.log_amp + np.sum(-0.5 * np.log(2 * z) + c**2 / (4 * z))
    return ChirpedGaussian(1 / (4 * z), 1j * c / (2 * z), log_amp)


def fourier_multiplier(g: ChirpedGaussian, w) -> ChirpedGaussian:
    """Multiply the Fourier transform by ``exp(-w |xi|^2)`` (complex ``w``).

    Covers the Schrodinger group (``w = i t``) and the heat semigroup
    (``w = delta``).  The result must stay in the class, i.e.
    ``Re(1/(4z) + w) > 0`` on every axis.  The square-root branch is the
    principal logarithm of ``1 + 4 w z``, which equals the branch obtained by
    composing ``fourier`` and ``inverse_fourier`` because both ``2z`` and
    ``2(1/(4z) + w)`` lie in the right half-plane.
    """
    z, c = g.quad, g.lin
    w = np.broadcast_to(np.asarray(w, dtype=complex), z.shape)
    if np.any((1 / (4 * z) + w).real <= 0):
        raise ValueError("Fourier multiplier leaves the Gaussian class")
    d = 1 + 4 * w * z
    log_amp = g.log_amp + np.sum(-0.5 * np.log(d) + w * c**2 / d)
    return ChirpedGaussian(z / d, c / d, log_amp)


def propagate(g: ChirpedGaussian, t: float) -> ChirpedGaussian:
    """Free Schrodinger flow ``exp(i t Laplacian)``: ``z -> z / (1 + 4 i z t)``."""
    return fourier_multiplier(g, 1j * float(t))


def heat(g: ChirpedGaussian, delta: float) -> ChirpedGaussian:
    """Heat flow ``exp(delta Laplacian)``, ``delta > 0``."""
    if not delta > 0:
        raise ValueError("heat time must be positive")
    return fourier_multiplier(g, float(delta))


def heat_preimage(g: ChirpedGaussian, delta: float) -> ChirpedGaussian:
    """Return ``h`` with ``heat(h, delta) == g``.

    Built by multiplying the transform by ``exp(delta |xi|^2)``; needs
    ``delta`` below the Fourier-side decay rate ``min Re(1/(4 z_j))``.
    """
    if not delta > 0:
        raise ValueError("heat time must be positive")
    return fourier_multiplier(g, -float(delta))


def chirp(g: ChirpedGaussian, tau: float) -> ChirpedGaussian:
    """Multiply by ``exp(i tau |x|^2)``."""
    return ChirpedGaussian(g.quad - 1j * tau, g.lin, g.log_amp)


def boost(g: ChirpedGaussian, nu) -> ChirpedGaussian:
    """Galilean boost: multiply by ``exp(i nu.x)``."""
    nu = np.broadcast_to(np.asarray(nu, dtype=float), g.quad.shape)
    return ChirpedGaussian(g.quad, g.lin + 1j * nu, g.log_amp)


def translate(g: ChirpedGaussian, shift) -> ChirpedGaussian:
    """``x -> g(x - shift)`` for a real or complex shift vector."""
    a = np.broadcast_to(np.asarray(shift, dtype=complex), g.quad.shape)
    z, c = g.quad, g.lin
    return ChirpedGaussian(z, c + 2 * z * a, g.log_amp + np.sum(-z * a**2 - c * a))


def dilate(g: ChirpedGaussian, factor: float) -> ChirpedGaussian:
    """``x -> g(x / factor)``."""
    return ChirpedGaussian(g.quad / factor**2, g.lin / factor, g.log_amp)


def conjugate(g: ChirpedGaussian) -> ChirpedGaussian:
    """Pointwise complex conjugate on the real space."""
    return ChirpedGaussian(np.conj(g.quad), np.conj(g.lin), np.conj(g.log_amp))


def scale_amplitude(g: ChirpedGaussian, log_factor: complex) -> ChirpedGaussian:
    return ChirpedGaussian(g.quad, g.lin, g.log_amp + log_factor)


def multiply(g: ChirpedGaussian, h: ChirpedGaussian) -> ChirpedGaussian:
    if g.dim != h.dim:
        raise ValueError("dimension mismatch")
    return ChirpedGaussian(g.quad + h.quad, g.lin + h.lin, g.log_amp + h.log_amp)


def convolve(g: ChirpedGaussian, h: ChirpedGaussian) -> ChirpedGaussian:
    """``(g * h)(x) = int g(x - y) h(y) dy`` through the Fourier side.

    With the unitary transform ``(g*h)^ = (2 pi)^(n/2) g^ h^``.
    """
    prod = multiply(fourier(g), fourier(h))
    return inverse_fourier(scale_amplitude(prod, 0.5 * g.dim * LOG_2PI))
