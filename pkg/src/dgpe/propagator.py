"""Strang split-step time integration with trajectory diagnostics.

One step is a half kinetic rotation in Fourier space, a full nonlinear phase
rotation in physical space, and another half kinetic rotation.  The nonlinear
substep is exact because a pure phase change leaves ``|u|^2`` (and hence the
convolution term) invariant, so both substeps are isometries and mass is
conserved to FFT roundoff.  Adjacent half-kinetic factors between diagnostic
samples are merged into full steps.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .functionals import (
    CouplingParams,
    boundary_mass,
    kinetic,
    l4_norm,
    localized_virial,
    mass,
    potential,
    spectral_tail_fraction,
    variance,
    variance_rate,
)
from .grid import ComplexField, PHYSICAL, fftn, ifftn, irfftn, rfftn

__all__ = [
    "PropagatorConfig",
    "DiagnosticsRow",
    "Trajectory",
    "strang_step",
    "adaptive_dt",
    "evolve",
    "asymptotic_label",
    "DIAG_COLUMNS",
]

DIAG_COLUMNS = [
    "t", "M", "H", "N", "E", "G", "V", "Vprime", "Vsecond",
    "L4", "L8L4_acc", "zR", "zRprime", "boundary_mass", "verdict_flag",
]

RUNNING = "running"
COMPLETED = "completed"
BLOWUP = "blowup_detected"
UNDERRESOLVED = "underresolved"


@dataclass(frozen=True)
class PropagatorConfig:
    dt: float = 1e-2
    t_end: float = 1.0
    diag_stride: int = 10
    blowup_kinetic_factor: float = 100.0
    resolution_floor: float = 4.0
    adaptive: bool = False
    virial_radius: float | None = None  # defaults to min(L)/4 at run time
    spectral_tail_limit: float = 1e-4
    nl_phase_cap: float = 0.1
    max_steps: int = 2_000_000
    snapshot_times: tuple[float, ...] = ()

    def __post_init__(self):
        if self.dt <= 0.0:
            raise ValueError("dt must be positive")
        if self.diag_stride < 1:
            raise ValueError("diag_stride must be >= 1")
        if self.t_end < 0.0:
            raise ValueError("t_end must be nonnegative")


@dataclass(frozen=True)
class DiagnosticsRow:
    t: float
    M: float
    H: float
    N: float
    E: float
    G: float
    V: float
    Vprime: float
    Vsecond: float
    L4: float
    L8L4_acc: float
    zR: float
    zRprime: float
    boundary_mass: float
    verdict_flag: str
    spectral_tail: float = 0.0  # not part of the CSV schema

    def csv_values(self) -> list:
        return [getattr(self, c) for c in DIAG_COLUMNS]


@dataclass
class Trajectory:
    rows: list[DiagnosticsRow] = field(default_factory=list)
    snapshots: dict[float, ComplexField] = field(default_factory=dict)
    verdict: str = RUNNING
    virial_radius: float = 0.0

    def column(self, name: str) -> np.ndarray:
        return np.array([getattr(r, name) for r in self.rows])

    def final(self) -> DiagnosticsRow:
        return self.rows[-1]


def _kinetic_phase(grid, tau: float) -> np.ndarray:
    # free evolution over tau multiplies each mode by exp(-i |xi|^2 tau / 2)
    return np.exp(-0.5j * tau * grid.xi2)


def _nonlinear_phase(u: np.ndarray, grid, cp: CouplingParams, dt: float) -> np.ndarray:
    h = u.real * u.real + u.imag * u.imag
    pot = cp.lambda1 * h
    if cp.lambda2 != 0.0:
        pot = pot + cp.lambda2 * irfftn(grid.dipolar_rfft * rfftn(h), grid.n)
    return u * np.exp(-1j * dt * pot)


def strang_step(u: ComplexField, cp: CouplingParams, dt: float) -> ComplexField:
    """One full split step; exact time reversal under ``dt -> -dt``."""
    u.require_space(PHYSICAL)
    g = u.grid
    half = _kinetic_phase(g, 0.5 * dt)
    v = ifftn(half * fftn(u.values))
    v = _nonlinear_phase(v, g, cp, dt)
    v = ifftn(half * fftn(v))
    return ComplexField(g, v, PHYSICAL)


def adaptive_dt(u: ComplexField, cp: CouplingParams, cfg: PropagatorConfig) -> float:
    """Step size keeping the nonlinear phase per step below the cap."""
    v = u.values
    peak = float(np.max(v.real * v.real + v.imag * v.imag))
    lam = abs(cp.lambda1) + (8.0 * np.pi / 3.0) * abs(cp.lambda2)
    rate = lam * peak
    if rate <= 0.0:
        return cfg.dt
    return min(cfg.dt, cfg.nl_phase_cap / rate)


class _DiagState:
    def __init__(self, cfg: PropagatorConfig, grid):
        self.acc = 0.0
        self.prev_l4 = None
        self.prev_t = None
        self.R = cfg.virial_radius if cfg.virial_radius else min(grid.L) / 4.0

    def row(self, u: ComplexField, t: float, cp: CouplingParams, flag: str):
        if self.prev_l4 is not None:
            self.acc += self.prev_l4**8 * (t - self.prev_t)
        M = mass(u)
        H = kinetic(u)
        N = potential(u, cp)
        E = 0.5 * (H + N)
        G = H + 1.5 * N
        V = variance(u, check_boundary=False)
        Vp = variance_rate(u, check_boundary=False)
        l4 = l4_norm(u)
        lv = localized_virial(u, cp, self.R)
        row = DiagnosticsRow(
            t=t, M=M, H=H, N=N, E=E, G=G, V=V, Vprime=Vp, Vsecond=2.0 * G,
            L4=l4, L8L4_acc=self.acc, zR=lv.z, zRprime=lv.zprime,
            boundary_mass=boundary_mass(u), verdict_flag=flag,
            spectral_tail=spectral_tail_fraction(u),
        )
        self.prev_l4 = l4
        self.prev_t = t
        return row


def _verdict_update(row: DiagnosticsRow, H0: float, grid, cfg: PropagatorConfig) -> str:
    if H0 > 0.0 and row.H > cfg.blowup_kinetic_factor * H0:
        focus_len = math.sqrt(row.M / row.H) if row.H > 0 else math.inf
        if focus_len < cfg.resolution_floor * max(grid.dx):
            return BLOWUP
    if row.spectral_tail > cfg.spectral_tail_limit:
        return UNDERRESOLVED
    return RUNNING


def evolve(u0: ComplexField, cp: CouplingParams, cfg: PropagatorConfig) -> Trajectory:
    """Propagate ``u0`` to ``t_end`` with diagnostics every ``diag_stride`` steps.

    Halts early with ``blowup_detected`` when the kinetic energy grows past
    the configured factor while the focusing length ``sqrt(M/H)`` drops below
    the resolution floor, or ``underresolved`` when the top-octave spectral
    fraction exceeds its limit.  NaNs abort with the appropriate flag.
    """
    u0.require_space(PHYSICAL)
    g = u0.grid
    traj = Trajectory()
    diag = _DiagState(cfg, g)
    traj.virial_radius = diag.R

    t = 0.0
    row = diag.row(u0, t, cp, RUNNING)
    traj.rows.append(row)
    H0 = row.H
    verdict = _verdict_update(row, H0, g, cfg) if row.H > 0 else RUNNING
    if cfg.t_end == 0.0 or verdict != RUNNING:
        traj.verdict = COMPLETED if verdict == RUNNING else verdict
        traj.rows[-1] = _replace_flag(traj.rows[-1], traj.verdict)
        return traj

    snap_times = sorted(cfg.snapshot_times)
    u = u0.values.copy()
    uhat = fftn(u)
    carried = 0.0  # pending kinetic half-angle not yet applied
    step = 0
    eps = 1e-12 * max(cfg.dt, 1.0)
    kin_seen = row.H > cfg.blowup_kinetic_factor * H0

    while t < cfg.t_end - eps and step < cfg.max_steps:
        dt = adaptive_dt(ComplexField(g, u, PHYSICAL), cp, cfg) if cfg.adaptive else cfg.dt
        dt = min(dt, cfg.t_end - t)
        uhat *= _kinetic_phase(g, carried + 0.5 * dt)
        u = ifftn(uhat)
        if not np.all(np.isfinite(u.view(np.float64))):
            traj.verdict = BLOWUP if kin_seen else UNDERRESOLVED
            traj.rows[-1] = _replace_flag(traj.rows[-1], traj.verdict)
            return traj
        u = _nonlinear_phase(u, g, cp, dt)
        uhat = fftn(u)
        carried = 0.5 * dt
        t += dt
        step += 1

        take_snapshot = bool(snap_times) and t >= snap_times[0] - eps
        sample = (
            step % cfg.diag_stride == 0
            or t >= cfg.t_end - eps
            or take_snapshot
        )
        if not sample:
            continue
        uhat *= _kinetic_phase(g, carried)
        carried = 0.0
        u = ifftn(uhat)
        if not np.all(np.isfinite(u.view(np.float64))):
            traj.verdict = BLOWUP if kin_seen else UNDERRESOLVED
            traj.rows[-1] = _replace_flag(traj.rows[-1], traj.verdict)
            return traj
        fld = ComplexField(g, u.copy(), PHYSICAL)
        while snap_times and t >= snap_times[0] - eps:
            traj.snapshots[snap_times.pop(0)] = fld.copy()
        row = diag.row(fld, t, cp, RUNNING)
        kin_seen = kin_seen or row.H > cfg.blowup_kinetic_factor * H0
        verdict = _verdict_update(row, H0, g, cfg)
        traj.rows.append(row)
        if verdict != RUNNING:
            traj.verdict = verdict
            traj.rows[-1] = _replace_flag(row, verdict)
            return traj

    traj.verdict = COMPLETED
    traj.rows[-1] = _replace_flag(traj.rows[-1], COMPLETED)
    return traj


def _replace_flag(row: DiagnosticsRow, flag: str) -> DiagnosticsRow:
    return replace(row, verdict_flag=flag)


def asymptotic_label(traj: Trajectory) -> tuple[str, float]:
    """Heuristic long-time label: one of ``scattering-consistent``,
    ``grow-up-consistent`` or ``unlabeled``, plus the fitted L4 decay rate.

    The L4 norm is fit to ``c * t^-alpha`` over the final decade of the run;
    free dispersion gives alpha = 3/4.  On a finite box at finite resolution
    these labels are indicative only, never a proof of the asymptotics.
    """
    if traj.verdict != COMPLETED or len(traj.rows) < 8:
        return "unlabeled", float("nan")
    t = traj.column("t")
    l4 = traj.column("L4")
    t_end = t[-1]
    sel = t >= 0.1 * t_end
    sel &= l4 > 0
    alpha = float("nan")
    if np.count_nonzero(sel) >= 4:
        coef = np.polyfit(np.log(t[sel]), np.log(l4[sel]), 1)
        alpha = -float(coef[0])
        acc = traj.column("L8L4_acc")[sel]
        inc = np.diff(acc)
        decaying = len(inc) >= 2 and inc[-1] < 0.5 * max(inc[0], 1e-300)
        if 0.5 <= alpha <= 1.0 and decaying:
            return "scattering-consistent", alpha
    H = traj.column("H")
    if len(H) >= 4:
        growth = H[-1] / max(H[0], 1e-300)
        rising = np.all(np.diff(H) > -1e-9 * H[0])
        if growth > 1.5 and rising:
            return "grow-up-consistent", alpha
    return "unlabeled", alpha
