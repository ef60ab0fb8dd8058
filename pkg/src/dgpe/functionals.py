"""Conserved quantities, virial quantities, and inequality residuals.

Everything here is a pure function of a physical-space :class:`ComplexField`
and the pair of coupling constants ``(lambda1, lambda2)``.  Integrals use the
rectangle rule (spectrally accurate for smooth periodic fields); gradients and
the interaction convolution are evaluated in Fourier space.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from functools import lru_cache
from typing import NamedTuple

import numpy as np

from .errors import DomainError
from .grid import ComplexField, Grid, PHYSICAL, fftn, ifftn, irfftn, rfftn

__all__ = [
    "CouplingParams",
    "FunctionalBundle",
    "mass",
    "kinetic",
    "dipolar_convolution",
    "potential",
    "energy",
    "pohozaev",
    "weinstein",
    "variance",
    "variance_rate",
    "l4_norm",
    "scattering_accumulator",
    "boundary_mass",
    "spectral_tail_fraction",
    "cutoff_chi",
    "cutoff_chi_d1",
    "cutoff_chi_d2",
    "localized_virial",
    "LocalizedVirial",
    "radial_momentum_residual",
    "evaluate_bundle",
]

BOUNDARY_MASS_WARN = 1e-8  # relative to total mass, for variance validity


@dataclass(frozen=True)
class CouplingParams:
    """Strengths of the local cubic term and the dipolar convolution term."""

    lambda1: float
    lambda2: float

    def __post_init__(self):
        if not (np.isfinite(self.lambda1) and np.isfinite(self.lambda2)):
            raise ValueError("couplings must be finite")

    def as_tuple(self) -> tuple[float, float]:
        return (self.lambda1, self.lambda2)


@dataclass(frozen=True)
class FunctionalBundle:
    """One snapshot of every functional of interest.

    ``E = (H + N) / 2``, ``G = H + 1.5 N`` and ``Vpp = 2 G`` are stored as
    derived fields so the algebraic relations hold exactly.
    """

    M: float
    H: float
    N: float
    V: float
    Vp: float

    @property
    def E(self) -> float:
        return 0.5 * (self.H + self.N)

    @property
    def G(self) -> float:
        return self.H + 1.5 * self.N

    @property
    def Vpp(self) -> float:
        return 2.0 * self.G


def _dV(f: ComplexField) -> float:
    return f.grid.dV


def mass(f: ComplexField) -> float:
    """Squared L2 norm."""
    f.require_space(PHYSICAL)
    v = f.values
    return float(np.sum(v.real * v.real + v.imag * v.imag) * _dV(f))


def kinetic(f: ComplexField) -> float:
    """Squared L2 norm of the gradient, evaluated spectrally."""
    f.require_space(PHYSICAL)
    fh = fftn(f.values)
    g = f.grid
    return float(np.sum(g.xi2 * (fh.real**2 + fh.imag**2)) * g.dV / g.total_points)


def dipolar_convolution(f2: ComplexField) -> ComplexField:
    """Convolution of the dipolar kernel with ``f2`` (usually ``|u|^2``).

    Diagonal in Fourier space; the result of a real input is real up to
    roundoff and is returned with its tiny imaginary residue intact.
    """
    f2.require_space(PHYSICAL)
    g = f2.grid
    out = ifftn(g.dipolar * fftn(f2.values))
    return ComplexField(g, out, PHYSICAL)


def _dipolar_convolve_real(g: Grid, h: np.ndarray) -> np.ndarray:
    """Fast path for real densities: rfft-based kernel application."""
    return irfftn(g.dipolar_rfft * rfftn(h), g.n)


def potential(f: ComplexField, cp: CouplingParams, method: str = "direct") -> float:
    """Quartic interaction functional.

    ``direct`` forms the integrand in physical space; ``plancherel`` sums
    ``(lambda1 + lambda2*m(xi)) |F[|f|^2]|^2`` with the discrete Parseval
    weight ``dV / Ntot``.  Both agree to roundoff for resolved fields.
    """
    f.require_space(PHYSICAL)
    g = f.grid
    v = f.values
    h = v.real * v.real + v.imag * v.imag
    if method == "direct":
        Kh = _dipolar_convolve_real(g, h)
        return float(np.sum((cp.lambda1 * h + cp.lambda2 * Kh) * h) * g.dV)
    if method == "plancherel":
        hh = rfftn(h)
        w = _rfft_weights(g)
        m = g.dipolar_rfft
        s = np.sum(w * (cp.lambda1 + cp.lambda2 * m) * (hh.real**2 + hh.imag**2))
        return float(s * g.dV / g.total_points)
    raise ValueError(f"unknown method {method!r}")


@lru_cache(maxsize=32)
def _rfft_weights(g: Grid) -> np.ndarray:
    """Mode multiplicities for summing |rfftn|^2 as if over the full spectrum."""
    n3 = g.n[2]
    w = np.full(n3 // 2 + 1, 2.0)
    w[0] = 1.0
    if n3 % 2 == 0:
        w[-1] = 1.0
    return w[None, None, :]


def energy(f: ComplexField, cp: CouplingParams) -> float:
    return 0.5 * (kinetic(f) + potential(f, cp))


def pohozaev(f: ComplexField, cp: CouplingParams) -> float:
    """Virial functional ``H + (3/2) N`` (the second derivative of the variance)."""
    return kinetic(f) + 1.5 * potential(f, cp)


def weinstein(f: ComplexField, cp: CouplingParams) -> float:
    """Quotient ``H^{3/2} M^{1/2} / (-N)``; defined only where ``N < 0``."""
    N = potential(f, cp)
    if N >= 0.0:
        raise DomainError(f"N(f) = {N:.3e} >= 0: field outside the admissible set")
    return kinetic(f) ** 1.5 * np.sqrt(mass(f)) / (-N)


def _check_boundary(f: ComplexField, what: str) -> None:
    m = mass(f)
    if m == 0.0:
        return
    bm = boundary_mass(f)
    if bm > BOUNDARY_MASS_WARN * m:
        warnings.warn(
            f"{what}: boundary mass {bm:.2e} exceeds {BOUNDARY_MASS_WARN:.0e} of "
            f"total mass {m:.2e}; periodic truncation may bias the value",
            stacklevel=3,
        )


def variance(f: ComplexField, check_boundary: bool = True) -> float:
    """Second moment ``integral |x|^2 |f|^2 dx``, x measured from the box center."""
    f.require_space(PHYSICAL)
    if check_boundary:
        _check_boundary(f, "variance")
    v = f.values
    h = v.real * v.real + v.imag * v.imag
    return float(np.sum(f.grid.r2 * h) * _dV(f))


def variance_rate(f: ComplexField, check_boundary: bool = True) -> float:
    """Time derivative of the variance: ``2 Im integral conj(f) x.grad(f) dx``."""
    f.require_space(PHYSICAL)
    if check_boundary:
        _check_boundary(f, "variance_rate")
    g = f.grid
    fh = fftn(f.values)
    acc = 0.0
    for ax in range(3):
        grad = ifftn(1j * _xi_axis(g, ax) * fh)
        acc += np.sum((np.conj(f.values) * grad).imag * _x_axis(g, ax))
    return float(2.0 * acc * g.dV)


def _xi_axis(g: Grid, ax: int) -> np.ndarray:
    shape = [1, 1, 1]
    shape[ax] = g.n[ax]
    return g.xi1d[ax].reshape(shape)


def _x_axis(g: Grid, ax: int) -> np.ndarray:
    shape = [1, 1, 1]
    shape[ax] = g.n[ax]
    return g.x1d[ax].reshape(shape)


def l4_norm(f: ComplexField) -> float:
    f.require_space(PHYSICAL)
    v = f.values
    h = v.real * v.real + v.imag * v.imag
    return float(np.sum(h * h) * _dV(f)) ** 0.25


def scattering_accumulator(prev: float, f: ComplexField, dt: float) -> float:
    """Left-endpoint accumulation of the L8-in-time L4-in-space norm to the 8th power."""
    return prev + l4_norm(f) ** 8 * dt


def boundary_mass(f: ComplexField) -> float:
    """Mass in the one-cell shell at the box faces."""
    f.require_space(PHYSICAL)
    v = f.values[f.grid.boundary_mask]
    return float(np.sum(v.real * v.real + v.imag * v.imag) * _dV(f))


def spectral_tail_fraction(f: ComplexField) -> float:
    """Fraction of |fh|^2 carried by the top octave of any axis frequency."""
    f.require_space(PHYSICAL)
    fh = fftn(f.values)
    p = fh.real**2 + fh.imag**2
    total = float(np.sum(p))
    if total == 0.0:
        return 0.0
    return float(np.sum(p[_tail_mask(f.grid)]) / total)


@lru_cache(maxsize=32)
def _tail_mask(g: Grid) -> np.ndarray:
    masks = []
    for ax in range(3):
        xi = np.abs(g.xi1d[ax])
        masks.append(xi > 0.5 * xi.max())
    a, b, c = masks
    return a[:, None, None] | b[None, :, None] | c[None, None, :]


# ---------------------------------------------------------------------------
# localized virial machinery
# ---------------------------------------------------------------------------
#
# The radial cutoff chi equals r^2 for r <= 1 and is constant (= 2) for
# r >= 2, with chi'' <= 2 everywhere.  The transition uses
# chi''(r) = 2 - 2520 s^4 (1-s)^4, s = r - 1, which integrates to zero slope
# at r = 2.  A cutoff that is identically zero beyond r = 2 cannot satisfy
# chi'' <= 2 (integrating chi' >= 2(r-2) over [1,2] forces chi(2) > 0), so
# the constant tail is the consistent choice; it leaves the derivative
# quantities and the virial inequality untouched.

_CHI_PLATEAU = 2.0


def _poly_Q(s: np.ndarray) -> np.ndarray:
    # integral of 630 s^4 (1-s)^4
    return s**5 * (126.0 + s * (-420.0 + s * (540.0 + s * (-315.0 + s * 70.0))))


def _poly_P(s: np.ndarray) -> np.ndarray:
    # integral of _poly_Q
    return s**6 * (21.0 + s * (-60.0 + s * (67.5 + s * (-35.0 + s * 7.0))))


def cutoff_chi(r):
    r = np.asarray(r, dtype=float)
    s = np.clip(r - 1.0, 0.0, 1.0)
    out = np.where(r <= 2.0, r * r - 4.0 * _poly_P(s), _CHI_PLATEAU)
    return np.where(r <= 1.0, r * r, out)


def cutoff_chi_d1(r):
    r = np.asarray(r, dtype=float)
    s = np.clip(r - 1.0, 0.0, 1.0)
    out = np.where(r <= 2.0, 2.0 * r - 4.0 * _poly_Q(s), 0.0)
    return np.where(r <= 1.0, 2.0 * r, out)


def cutoff_chi_d2(r):
    r = np.asarray(r, dtype=float)
    s = r - 1.0
    mid = 2.0 - 2520.0 * s**4 * (1.0 - s) ** 4
    out = np.where((r > 1.0) & (r < 2.0), mid, 0.0)
    return np.where(r <= 1.0, 2.0, out)


class LocalizedVirial(NamedTuple):
    z: float
    zprime: float
    envelope: float


@lru_cache(maxsize=16)
def _virial_weights(g: Grid, R: float):
    r = np.sqrt(g.r2)
    phi_R = R * R * cutoff_chi(r / R)
    # grad(phi_R) = R * chi'(r/R) * x/r
    with np.errstate(invalid="ignore", divide="ignore"):
        fac = np.where(r > 0.0, R * cutoff_chi_d1(r / R) / r, 2.0)
    grads = tuple(fac * g.x[ax] for ax in range(3))
    outside = r >= R
    return phi_R, grads, outside


def localized_virial(
    f: ComplexField, cp: CouplingParams, R: float
) -> LocalizedVirial:
    """Cutoff variance ``z``, its rate ``z'``, and the remainder envelope.

    ``z'' <= 2 G + A_R`` holds along trajectories; ``A_R`` is estimated by the
    envelope ``R^-1 (1 + Hs + Hs*q) + q + q^2`` with ``Hs = M + H`` (the
    squared Sobolev norm) and ``q`` the squared L4 norm outside radius R.
    The caller forms ``z''`` by finite differences across time samples.
    """
    f.require_space(PHYSICAL)
    g = f.grid
    if not (R > 1.0):
        raise DomainError(f"cutoff radius must exceed 1, got {R}")
    if 2.0 * R > min(g.L):
        raise DomainError(
            f"cutoff radius {R} exceeds half of the smallest box extent {min(g.L)/2}"
        )
    phi_R, grads, outside = _virial_weights(g, float(R))
    v = f.values
    h = v.real * v.real + v.imag * v.imag
    z = float(np.sum(phi_R * h) * g.dV)

    fh = fftn(v)
    zp = 0.0
    for ax in range(3):
        grad = ifftn(1j * _xi_axis(g, ax) * fh)
        zp += np.sum((np.conj(v) * grad).imag * grads[ax])
    zp = float(zp * g.dV)

    M = float(np.sum(h) * g.dV)
    H = float(np.sum(g.xi2 * (fh.real**2 + fh.imag**2)) * g.dV / g.total_points)
    hs = M + H
    q = float(np.sqrt(np.sum((h * h)[outside]) * g.dV))  # ||f||_{L4(|x|>=R)}^2
    envelope = (1.0 + hs + hs * q) / R + q + q * q
    return LocalizedVirial(z, zp, float(envelope))


def radial_momentum_residual(
    f: ComplexField, cp: CouplingParams, copt: float
) -> float:
    """Slack of the variance-weighted interpolation inequality.

    Returns ``||x f||^2 (H - (-N)^{2/3} / (copt^{2/3} M^{1/3}))`` minus the
    squared radial momentum ``(Im integral conj(f) x.grad f)^2``; nonnegative
    whenever ``copt`` is the sharp interpolation constant.
    """
    N = potential(f, cp)
    if N >= 0.0:
        raise DomainError("residual requires N(f) < 0")
    M = mass(f)
    H = kinetic(f)
    V = variance(f, check_boundary=False)
    lhs = (0.5 * variance_rate(f, check_boundary=False)) ** 2
    rhs = V * (H - (-N) ** (2.0 / 3.0) / (copt ** (2.0 / 3.0) * M ** (1.0 / 3.0)))
    return float(rhs - lhs)


def evaluate_bundle(
    f: ComplexField, cp: CouplingParams, check_boundary: bool = False
) -> FunctionalBundle:
    """All functionals of one field in a single pass."""
    return FunctionalBundle(
        M=mass(f),
        H=kinetic(f),
        N=potential(f, cp),
        V=variance(f, check_boundary=check_boundary),
        Vp=variance_rate(f, check_boundary=False),
    )
