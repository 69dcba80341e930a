"""FFT propagator for the free Schrodinger equation on a periodic box.

The grid on every axis is ``x_k = -L/2 + k L/N``.  Frequencies are
``2 pi k / L`` (signed), so the discrete transform approximates the unitary
convention ``(2 pi)^(-n/2) int exp(-i x.xi) f(x) dx``.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from .errors import AliasingGuardError
from .gaussian_calculus import ChirpedGaussian

GUARD = 1e-12


@dataclass(frozen=True)
class GridSpec:
    dim: int
    points: int
    length: float

    def __post_init__(self):
        if self.dim not in (1, 2):
            raise ValueError("grids support n = 1 or n = 2")
        if self.points < 8 or self.points & (self.points - 1):
            raise ValueError("points per axis must be a power of two >= 8")
        if not self.length > 0:
            raise ValueError("box length must be positive")

    @property
    def spacing(self) -> float:
        return self.length / self.points

    @property
    def cell_volume(self) -> float:
        return self.spacing**self.dim

    def axis(self) -> np.ndarray:
        return -0.5 * self.length + np.arange(self.points) * self.spacing

    def coordinates(self) -> np.ndarray:
        """Points of shape ``(N, ..., N, dim)``."""
        ax = self.axis()
        mesh = np.meshgrid(*([ax] * self.dim), indexing="ij")
        return np.stack(mesh, axis=-1)

    def frequencies(self) -> np.ndarray:
        """Squared frequency magnitude ``|xi|^2`` in FFT (unshifted) order."""
        k = 2 * np.pi * np.fft.fftfreq(self.points, d=self.spacing)
        mesh = np.meshgrid(*([k] * self.dim), indexing="ij")
        return sum(m**2 for m in mesh)

    def dual(self) -> "GridSpec":
        """Frequency grid: ``xi_k = -pi N/L + 2 pi k/L``."""
        return GridSpec(self.dim, self.points, 2 * np.pi * self.points / self.length)


@dataclass(frozen=True, eq=False)
class GridField:
    spec: GridSpec
    values: np.ndarray
    time: float = 0.0

    def __post_init__(self):
        shape = (self.spec.points,) * self.spec.dim
        if self.values.shape != shape:
            raise ValueError(f"values must have shape {shape}")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("field values must be finite")

    def l2_norm(self) -> float:
        return float(np.sqrt(np.sum(np.abs(self.values) ** 2) * self.spec.cell_volume))

    def boundary_ratio(self) -> float:
        """Largest boundary magnitude relative to the field maximum."""
        mag = np.abs(self.values)
        peak = mag.max()
        if peak == 0:
            return 0.0
        edge = max(np.take(mag, idx, axis=ax).max()
                   for ax in range(self.spec.dim) for idx in (0, -1))
        return float(edge / peak)

    def to_csv(self, path) -> None:
        """Rows ``x,re,im`` (n = 1) or ``x,y,re,im`` (n = 2)."""
        pts = self.spec.coordinates().reshape(-1, self.spec.dim)
        vals = self.values.reshape(-1)
        header = ["x", "re", "im"] if self.spec.dim == 1 else ["x", "y", "re", "im"]
        with open(Path(path), "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(header)
            for p, v in zip(pts, vals):
                w.writerow([*(repr(float(c)) for c in p), repr(float(v.real)), repr(float(v.imag))])


def sample(g: ChirpedGaussian, spec: GridSpec, guard: float | None = GUARD) -> GridField:
    """Evaluate ``g`` on the grid.

    Raises :class:`AliasingGuardError` if the boundary magnitude exceeds
    ``guard`` times the maximum (checked in the log domain, before
    exponentiation).  ``guard=None`` skips the check.
    """
    if g.dim != spec.dim:
        raise ValueError("grid and Gaussian dimensions differ")
    logv = g.log_value(spec.coordinates())
    if guard is not None:
        logmod = logv.real
        edge = max(np.take(logmod, idx, axis=ax).max()
                   for ax in range(spec.dim) for idx in (0, -1))
        if edge - logmod.max() > math.log(guard):
            raise AliasingGuardError(
                f"boundary magnitude exp({edge - logmod.max():.3g}) relative to the "
                f"maximum exceeds {guard:g}; enlarge the box"
            )
    return GridField(spec, np.exp(logv), 0.0)


def sample_sum(terms, spec: GridSpec, guard: float | None = GUARD) -> GridField:
    """Sample a superposition of chirped Gaussians (a non-Gaussian datum)."""
    values = sum(sample(g, spec, guard=None).values for g in terms)
    field = GridField(spec, values, 0.0)
    if guard is not None and field.boundary_ratio() > guard:
        raise AliasingGuardError("superposition is not small at the box boundary")
    return field


def fft_propagate(f: GridField, t: float) -> GridField:
    """Exact periodic propagation: multiply the DFT by ``exp(-i t |xi|^2)``."""
    if t == 0:
        return replace(f, values=f.values.copy())
    spectrum = np.fft.fftn(f.values)
    spectrum *= np.exp(-1j * t * f.spec.frequencies())
    return GridField(f.spec, np.fft.ifftn(spectrum), f.time + t)


def grid_fourier(f: GridField) -> GridField:
    """Unitary transform sampled on :meth:`GridSpec.dual` (centred order)."""
    spec = f.spec
    dx = spec.spacing
    n = spec.dim
    spectrum = np.fft.fftshift(np.fft.fftn(f.values))
    # samples start at -L/2: the shift phase exp(i L xi_k / 2) is exactly
    # (-1)^k because N is a multiple of 4
    phase = np.where(np.arange(spec.points) % 2, -1.0, 1.0)
    for ax in range(n):
        shape = [1] * n
        shape[ax] = spec.points
        spectrum = spectrum * phase.reshape(shape)
    spectrum *= (dx / math.sqrt(2 * math.pi)) ** n
    return GridField(spec.dual(), spectrum, f.time)


def field_error(f: GridField, g: ChirpedGaussian) -> float:
    """Relative discrete L2 distance between ``f`` and samples of ``g``."""
    ref = sample(g, f.spec, guard=None).values
    denom = np.linalg.norm(ref)
    if denom == 0:
        raise ZeroDivisionError("reference field vanishes on the grid")
    return float(np.linalg.norm(f.values - ref) / denom)


def tensor_field(u: GridField, v: GridField) -> GridField:
    """``u(x) v(y)`` on the product of two 1-d grids."""
    if u.spec != v.spec or u.spec.dim != 1:
        raise ValueError("tensor fields need two 1-d fields on the same grid")
    spec = GridSpec(2, u.spec.points, u.spec.length)
    return GridField(spec, np.outer(u.values, v.values), u.time)


def _axis_extent(g: ChirpedGaussian, drop: float) -> float:
    """Largest ``|x|`` where ``|g|`` is within ``exp(-drop)`` of its peak, over all axes."""
    a, b = g.quad.real, g.lin.real
    centre = b / (2 * a)
    return float(np.max(np.abs(centre) + np.sqrt(drop / a)))


def covering_grid(states, drop: float = 40.0, min_points: int = 256,
                  max_points: int = 1 << 18) -> GridSpec:
    """Smallest power-of-two grid resolving every Gaussian in ``states``.

    The box holds each state down to ``exp(-drop)`` of its peak and the
    frequency cutoff ``pi N / L`` does the same for each transform.  Pass the
    datum together with its propagated states to keep the periodic images
    apart over a whole run.
    """
    from .gaussian_calculus import fourier

    states = list(states)
    dim = states[0].dim
    half = max(_axis_extent(g, drop) for g in states)
    half_xi = max(_axis_extent(fourier(g), drop) for g in states)
    length = 2.0 * half
    points = max(min_points, 1 << max(3, math.ceil(math.log2(length * half_xi / math.pi))))
    if points > max_points:
        raise AliasingGuardError(f"covering grid needs {points} points per axis")
    return GridSpec(dim, points, length)
