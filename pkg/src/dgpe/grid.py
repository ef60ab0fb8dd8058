"""Periodic 3D grid, spectral transforms, and Fourier multipliers.

Conventions used throughout the package:

* physical sample points per axis are ``x_j = (j - n/2) * dx`` so the box is
  centered at the origin;
* angular frequencies are ``xi = 2*pi*k/L`` for ``k = -n/2 .. n/2-1`` (the
  layout of ``fft.fftfreq``);
* transforms are unscaled forward / ``1/N``-scaled inverse, so the continuum
  transform ``F f(xi) = integral exp(-i x.xi) f dx`` corresponds to
  ``dV * fftn(f)`` and Parseval reads ``sum |f|^2 dV = sum |fh|^2 dV / Ntot``.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy import fft as sfft

__all__ = [
    "Grid",
    "ComplexField",
    "make_grid",
    "fft_forward",
    "fft_inverse",
    "dipolar_multiplier",
    "laplacian_multiplier",
    "fft_workers",
    "set_fft_workers",
]

_FFT_WORKERS = int(os.environ.get("DGPE_THREADS", 0)) or -1


def fft_workers() -> int:
    return _FFT_WORKERS


def set_fft_workers(n: int) -> None:
    """Set the worker count used by all transforms (-1 = all cores)."""
    global _FFT_WORKERS
    _FFT_WORKERS = n if n != 0 else -1


@dataclass(frozen=True)
class Grid:
    """Immutable periodic box: ``n[i]`` points on extent ``L[i]`` per axis.

    ``L`` is snapped to ``dx * n`` at construction so that ``dx[i] * n[i]``
    reproduces ``L[i]`` bit-for-bit.  Derived arrays are cached lazily and
    the instance is shareable across threads.
    """

    n: tuple[int, int, int]
    L: tuple[float, float, float]

    @cached_property
    def dx(self) -> tuple[float, float, float]:
        return tuple(Li / ni for ni, Li in zip(self.n, self.L))

    @property
    def dV(self) -> float:
        d = self.dx
        return d[0] * d[1] * d[2]

    @property
    def total_points(self) -> int:
        return self.n[0] * self.n[1] * self.n[2]

    @cached_property
    def x1d(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Per-axis coordinates measured from the box center."""
        return tuple(
            (np.arange(ni) - ni // 2) * di for ni, di in zip(self.n, self.dx)
        )

    @cached_property
    def xi1d(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Per-axis angular frequencies in fft layout."""
        return tuple(
            2.0 * np.pi * sfft.fftfreq(ni, d=di) for ni, di in zip(self.n, self.dx)
        )

    @cached_property
    def x(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        return tuple(np.meshgrid(*self.x1d, indexing="ij"))

    @cached_property
    def r2(self) -> np.ndarray:
        """|x|^2 from the box center, broadcast to full shape."""
        a, b, c = self.x1d
        return (
            a[:, None, None] ** 2 + b[None, :, None] ** 2 + c[None, None, :] ** 2
        )

    @cached_property
    def xi(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        return tuple(np.meshgrid(*self.xi1d, indexing="ij"))

    @cached_property
    def xi2(self) -> np.ndarray:
        """|xi|^2, broadcast to full shape."""
        a, b, c = self.xi1d
        return (
            a[:, None, None] ** 2 + b[None, :, None] ** 2 + c[None, None, :] ** 2
        )

    @cached_property
    def dipolar(self) -> np.ndarray:
        """Dipolar interaction multiplier on the c2c frequency layout."""
        a, b, c = self.xi1d
        return _dipolar_values(
            a[:, None, None], b[None, :, None], c[None, None, :]
        )

    @cached_property
    def dipolar_rfft(self) -> np.ndarray:
        """Dipolar multiplier on the rfftn (half-spectrum) layout."""
        a, b = self.xi1d[0], self.xi1d[1]
        c = 2.0 * np.pi * sfft.rfftfreq(self.n[2], d=self.dx[2])
        return _dipolar_values(
            a[:, None, None], b[None, :, None], c[None, None, :]
        )

    @cached_property
    def boundary_mask(self) -> np.ndarray:
        """One-cell-thick shell on all faces, used for boundary-mass checks."""
        m = np.zeros(self.n, dtype=bool)
        m[0, :, :] = m[-1, :, :] = True
        m[:, 0, :] = m[:, -1, :] = True
        m[:, :, 0] = m[:, :, -1] = True
        return m

    def max_radius(self) -> float:
        """Largest |x| on the grid (corner of the box)."""
        return float(np.sqrt(sum((Li / 2.0) ** 2 for Li in self.L)))

    def rescaled(self, factor: float) -> "Grid":
        """Same samples relabeled onto a box scaled by ``factor``."""
        return Grid(self.n, tuple(Li * factor for Li in self.L))


def _dipolar_values(xi1, xi2_, xi3) -> np.ndarray:
    q = xi1 * xi1 + xi2_ * xi2_ + xi3 * xi3
    with np.errstate(invalid="ignore", divide="ignore"):
        m = (4.0 * np.pi / 3.0) * (2.0 * xi3 * xi3 - xi1 * xi1 - xi2_ * xi2_) / q
    m = np.asarray(m)
    m[q == 0.0] = 0.0  # angular average of the symbol over the sphere is zero
    return m


def make_grid(n, L) -> Grid:
    """Validated grid constructor.

    Points per axis must be even and at least 8; extents positive.  The
    stored extent is ``(L/n) * n`` so the spacing identity is exact.
    """
    n = tuple(int(v) for v in n)
    L = tuple(float(v) for v in L)
    if len(n) != 3 or len(L) != 3:
        raise ValueError("grid needs three axes")
    for ni in n:
        if ni % 2 != 0:
            raise ValueError(f"points per axis must be even, got {ni}")
        if ni < 8:
            raise ValueError(f"points per axis must be >= 8, got {ni}")
    for Li in L:
        if not (Li > 0.0) or not np.isfinite(Li):
            raise ValueError(f"box extent must be positive, got {Li}")
    L_snapped = tuple((Li / ni) * ni for ni, Li in zip(n, L))
    return Grid(n, L_snapped)


PHYSICAL = "physical"
SPECTRAL = "spectral"


@dataclass
class ComplexField:
    """Complex scalar field on a :class:`Grid` with a space tag.

    ``values`` has shape ``grid.n`` and is indexed ``[ix, iy, iz]``.
    """

    grid: Grid
    values: np.ndarray
    space: str = PHYSICAL

    def __post_init__(self):
        self.values = np.ascontiguousarray(self.values, dtype=np.complex128)
        if self.values.shape != self.grid.n:
            raise ValueError(
                f"field shape {self.values.shape} does not match grid {self.grid.n}"
            )
        if self.space not in (PHYSICAL, SPECTRAL):
            raise ValueError(f"unknown space tag {self.space!r}")

    def copy(self) -> "ComplexField":
        return ComplexField(self.grid, self.values.copy(), self.space)

    def is_finite(self) -> bool:
        return bool(np.all(np.isfinite(self.values.view(np.float64))))

    def require_space(self, space: str) -> None:
        if self.space != space:
            raise ValueError(f"field is {self.space}, expected {space}")

    @classmethod
    def zeros(cls, grid: Grid, space: str = PHYSICAL) -> "ComplexField":
        return cls(grid, np.zeros(grid.n, dtype=np.complex128), space)

    @classmethod
    def from_values(cls, grid: Grid, values) -> "ComplexField":
        return cls(grid, np.asarray(values, dtype=np.complex128), PHYSICAL)


def fft_forward(f: ComplexField) -> ComplexField:
    """Physical -> spectral (unscaled forward transform)."""
    f.require_space(PHYSICAL)
    out = sfft.fftn(f.values, workers=_FFT_WORKERS)
    return ComplexField(f.grid, out, SPECTRAL)


def fft_inverse(F: ComplexField) -> ComplexField:
    """Spectral -> physical (1/N-scaled inverse transform)."""
    F.require_space(SPECTRAL)
    out = sfft.ifftn(F.values, workers=_FFT_WORKERS)
    return ComplexField(F.grid, out, PHYSICAL)


def dipolar_multiplier(g: Grid) -> np.ndarray:
    """Multiplier of the dipolar kernel; every value lies in [-4pi/3, 8pi/3]."""
    return g.dipolar


def laplacian_multiplier(g: Grid) -> np.ndarray:
    """Multiplier of the Laplacian: ``-|xi|^2`` per mode."""
    return -g.xi2


def spectral_zoom(
    values: np.ndarray, src: Grid, dst: Grid, scale: float = 1.0
) -> np.ndarray:
    """Evaluate the trigonometric interpolant of ``values`` at ``scale * x``
    for every point ``x`` of ``dst``.

    Separable in the three axes, so the cost is three dense matrix
    contractions instead of a full non-uniform transform.  Points mapping
    outside the source box wrap periodically.  The result is complex; take
    the real part for real inputs.
    """
    out = sfft.fftn(values, workers=_FFT_WORKERS)
    for ax in range(3):
        n_src = src.n[ax]
        k = sfft.fftfreq(n_src) * n_src  # signed integer mode numbers
        q = scale * dst.x1d[ax]
        j = q / src.dx[ax] + n_src // 2  # fractional index coordinates
        E = np.exp(2j * np.pi * np.outer(j, k) / n_src) / n_src
        out = np.moveaxis(np.tensordot(E, out, axes=([1], [ax])), 0, ax)
    return out


# low-level helpers shared by the heavier modules ---------------------------

def fftn(a: np.ndarray) -> np.ndarray:
    return sfft.fftn(a, workers=_FFT_WORKERS)


def ifftn(a: np.ndarray) -> np.ndarray:
    return sfft.ifftn(a, workers=_FFT_WORKERS)


def rfftn(a: np.ndarray) -> np.ndarray:
    return sfft.rfftn(a, workers=_FFT_WORKERS)


def irfftn(a: np.ndarray, shape) -> np.ndarray:
    return sfft.irfftn(a, s=shape, workers=_FFT_WORKERS)
