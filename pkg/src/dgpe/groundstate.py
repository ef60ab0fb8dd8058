"""Ground states of the stationary equation and the sharp-constant record.

The bound states solve

    -1/2 Lap(phi) + phi + lambda1 |phi|^2 phi + lambda2 (K * |phi|^2) phi = 0

and minimize the Weinstein quotient ``W = H^{3/2} M^{1/2} / (-N)`` over fields
with negative interaction energy.  The solver runs in two stages:

1. gauge-projected, preconditioned gradient descent on ``log W`` with a
   backtracking line search.  Amplitude is renormalized to ``M = 1`` every
   step, and both the amplitude and dilation directions are projected out of
   the search direction (on a lattice torus, the quotient decreases weakly
   toward sub-grid spikes on one side and the flat state on the other, so the
   scale window must be pinned).
2. a damped fixed-point polish of the stationary equation itself in the
   bound-state gauge, which converges to a lattice critical point where the
   quotient gradient vanishes to roundoff.

The box relabeling used between gauges changes only the box metadata, never
the sample values, so it is exact.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError, NonConvergenceError
from .functionals import CouplingParams, kinetic, mass, potential, weinstein
from .grid import (
    ComplexField,
    Grid,
    fftn,
    ifftn,
    irfftn,
    make_grid,
    rfftn,
    spectral_zoom,
)

__all__ = [
    "MinimizerOptions",
    "GroundStateRecord",
    "minimize_weinstein",
    "rescale_to_bound_state",
    "elliptic_residual",
    "thresholds",
    "compute_ground_state",
    "DEFAULT_RECORD_GRID",
]

DEFAULT_RECORD_GRID = ((64, 64, 64), (30.0, 30.0, 30.0))


@dataclass(frozen=True)
class MinimizerOptions:
    """Tolerances and step-control knobs for the two-stage solver.

    ``grad_tol`` bounds the preconditioned quotient gradient at exit.  Its
    floor on a lattice is the discrete dilation-identity defect (roughly
    1e-5 at 64^3), so the default sits above that; genuine non-convergence
    shows up orders of magnitude higher.
    """

    max_iters: int = 400
    step0: float = 1.0
    backtrack_factor: float = 0.5
    step_growth: float = 1.5
    max_step: float = 20.0
    grad_tol: float = 1e-3
    w_rel_tol: float = 1e-10
    w_window: int = 10
    plateau_rel: float = 1e-7
    plateau_window: int = 25
    anisotropy: float = 2.0
    noise_amplitude: float = 0.03
    descent_gtol: float = 1e-4
    polish_iters: int = 120
    polish_tol: float = 1e-11
    pohozaev_tol: float = 1e-3
    residual_tol: float = 1e-6
    refine_threshold: float = 4e-4
    boundary_level: float = 3e-4
    max_refinements: int = 2

    def __post_init__(self):
        for name in ("grad_tol", "w_rel_tol", "polish_tol", "residual_tol"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if self.max_iters < 1 or self.polish_iters < 1:
            raise ValueError("iteration limits must be positive")


@dataclass(frozen=True)
class GroundStateRecord:
    """Converged bound state plus the four coupling-dependent constants."""

    phi: ComplexField
    cp: CouplingParams
    copt: float
    em: float
    hm: float
    neg_nm: float
    residual: float
    iterations: int
    seed: int = 0
    w_value: float = 0.0

    def summary(self) -> dict:
        return {
            "lambda1": self.cp.lambda1,
            "lambda2": self.cp.lambda2,
            "copt": self.copt,
            "em": self.em,
            "hm": self.hm,
            "neg_nm": self.neg_nm,
            "residual": self.residual,
            "iterations": self.iterations,
            "seed": self.seed,
            "w_value": self.w_value,
            "grid_n": list(self.phi.grid.n),
            "grid_L": list(self.phi.grid.L),
        }


def thresholds(rec: GroundStateRecord) -> dict:
    """The mass-energy threshold products and the sharp constant."""
    return {"EM": rec.em, "HM": rec.hm, "negNM": rec.neg_nm, "Copt": rec.copt}


# ---------------------------------------------------------------------------
# internal spectral work arrays
# ---------------------------------------------------------------------------


class _Work:
    """Per-grid arrays for the solver (mask keeps |kappa| <= 2/3 Nyquist)."""

    def __init__(self, g: Grid):
        self.g = g
        self.xi2 = g.xi2
        self.mr = g.dipolar_rfft
        masks = []
        for ax in range(3):
            xi = np.abs(g.xi1d[ax])
            masks.append(xi <= (2.0 / 3.0) * xi.max())
        a, b, c = masks
        self.mask = a[:, None, None] & b[None, :, None] & c[None, None, :]
        self.dV = g.dV
        self.Nt = g.total_points

    def functionals(self, f: np.ndarray, cp: CouplingParams):
        fh = fftn(f)
        M = float(np.sum(f * f) * self.dV)
        H = float(np.sum(self.xi2 * (fh.real**2 + fh.imag**2)) * self.dV / self.Nt)
        h = f * f
        Kh = irfftn(self.mr * rfftn(h), self.g.n)
        N = float(np.sum((cp.lambda1 * h + cp.lambda2 * Kh) * h) * self.dV)
        return M, H, N, fh, Kh


def _initial_guess(work: _Work, cp: CouplingParams, opts: MinimizerOptions, seed: int):
    """Gaussian with sign-appropriate anisotropy; flips if the admissible set
    is missed, since which orientation makes N negative depends on lambda2."""
    g = work.g
    base = 0.07 * min(g.L)
    a = max(opts.anisotropy, 1.0)
    shapes = [(base, base, base)]
    if cp.lambda2 != 0.0:
        elong = (base, base, a * base)
        flat = (a * base, a * base, base)
        shapes = [elong, flat] if cp.lambda2 > 0 else [flat, elong]
        shapes.append((base, base, base))
    X = g.x
    rng = np.random.default_rng(seed)
    for w in shapes:
        f = np.exp(
            -X[0] ** 2 / (2 * w[0] ** 2)
            - X[1] ** 2 / (2 * w[1] ** 2)
            - X[2] ** 2 / (2 * w[2] ** 2)
        )
        if seed != 0 and opts.noise_amplitude > 0.0:
            noise = rng.standard_normal(g.n)
            noise = ifftn(fftn(noise) * np.exp(-8.0 * work.xi2)).real
            f = f * (1.0 + opts.noise_amplitude * noise / np.abs(noise).max())
        f = ifftn(work.mask * fftn(f)).real
        _, _, N, _, _ = work.functionals(f, cp)
        if N < 0.0:
            return f
    raise DomainError(
        f"no admissible initial guess: N >= 0 for couplings ({cp.lambda1}, {cp.lambda2}); "
        "the admissible set is empty in the stable regime"
    )


def _projected_gradient(work: _Work, f, M, H, N, fh, Kh, cp: CouplingParams):
    """Preconditioned gradient of log W with amplitude and dilation projected out."""
    g = work.g
    lap = ifftn(-work.xi2 * fh).real
    grad = 3.0 * (-lap) / H + f / M - 4.0 * (
        cp.lambda1 * f**3 + cp.lambda2 * Kh * f
    ) / N
    p = ifftn(work.mask * fftn(grad) / (1.0 + work.xi2)).real
    # tangent projection against amplitude (f) and dilation (3/2 f + x.grad f)
    gen = 1.5 * f
    for ax in range(3):
        shape = [1, 1, 1]
        shape[ax] = g.n[ax]
        xi_ax = g.xi1d[ax].reshape(shape)
        x_ax = g.x1d[ax].reshape(shape)
        gen = gen + x_ax * ifftn(1j * xi_ax * fh).real
    g11 = np.sum(f * f)
    g12 = np.sum(f * gen)
    g22 = np.sum(gen * gen)
    b1 = np.sum(f * p)
    b2 = np.sum(gen * p)
    det = g11 * g22 - g12 * g12
    al = (g22 * b1 - g12 * b2) / det
    be = (g11 * b2 - g12 * b1) / det
    return p - al * f - be * gen


def _descend(work: _Work, f, cp: CouplingParams, opts: MinimizerOptions):
    """Stage 1: monotone descent of W.  Returns (f, trace of accepted W)."""
    M, H, N, fh, Kh = work.functionals(f, cp)
    if N >= 0.0:
        raise DomainError("initial guess left the admissible set")
    f = f / np.sqrt(M)
    M, H, N, fh, Kh = work.functionals(f, cp)
    W = H**1.5 * np.sqrt(M) / (-N)
    p = _projected_gradient(work, f, M, H, N, fh, Kh, cp)
    trace = [W]
    alpha = opts.step0
    failures = 0
    for _ in range(opts.max_iters):
        gn = float(np.sqrt(np.sum(p * p) * work.dV))
        if gn < opts.descent_gtol:
            break
        s = alpha
        accepted = False
        for _ in range(40):
            fn = f - s * p
            Mn, Hn, Nn, fhn, Khn = work.functionals(fn, cp)
            if Nn < 0.0:
                Wn = Hn**1.5 * np.sqrt(Mn) / (-Nn)
                if Wn < W:
                    accepted = True
                    break
            s *= opts.backtrack_factor
        if not accepted:
            failures += 1
            alpha = 0.1
            if failures > 3:
                break
            continue
        failures = 0
        fn = fn / np.sqrt(Mn)
        Mn, Hn, Nn, fhn, Khn = work.functionals(fn, cp)
        pn = _projected_gradient(work, fn, Mn, Hn, Nn, fhn, Khn, cp)
        # Barzilai-Borwein guess for the next trial step
        y = pn - p
        sy = -s * float(np.sum(p * y))
        ss = s * s * float(np.sum(p * p))
        alpha = float(np.clip(ss / sy if sy > 0 else s * opts.step_growth,
                              1e-3, opts.max_step))
        f, M, H, N, fh, Kh, p = fn, Mn, Hn, Nn, fhn, Khn, pn
        W = H**1.5 * np.sqrt(M) / (-N)
        trace.append(W)
        if (
            len(trace) > opts.w_window
            and abs(trace[-opts.w_window - 1] - W) / W < opts.w_rel_tol
        ):
            break
        # basin plateau: hand over to the stationary-equation polish
        if (
            len(trace) > opts.plateau_window
            and abs(trace[-opts.plateau_window - 1] - W) / W < opts.plateau_rel
        ):
            break
    return f, trace


def _bound_state_gauge(f: np.ndarray, g: Grid, M, H, copt):
    """Relabel the minimizer onto the bound-state box; values / nu, box * mu."""
    a = 3.0 * np.sqrt(H * M)
    b = H**1.5 / np.sqrt(M)
    nu = np.sqrt(b * copt / 4.0)
    mu = np.sqrt(b / (2.0 * a))
    return f / nu, g.rescaled(mu)


def _residual_array(work: _Work, phi: np.ndarray, cp: CouplingParams) -> np.ndarray:
    Lm = 1.0 + 0.5 * work.xi2
    h = phi * phi
    Kh = irfftn(work.mr * rfftn(h), work.g.n)
    return (
        ifftn(Lm * fftn(phi)).real
        + cp.lambda1 * h * phi
        + cp.lambda2 * Kh * phi
    )


def _polish(work: _Work, phi, cp: CouplingParams, opts: MinimizerOptions):
    """Stage 2: damped fixed-point iteration on the stationary equation.

    phi <- S^{3/2} (1 - Lap/2)^{-1} R(phi) with the standard stabilizing
    exponent for a cubic nonlinearity; damping halves on sustained residual
    growth, which is needed when the nonlocal term dominates.
    """
    Lm = 1.0 + 0.5 * work.xi2
    theta = 1.0
    best = phi
    best_rn = _l2(work, _residual_array(work, phi, cp))
    rn_prev = best_rn
    grow = 0
    its = 0
    for its in range(1, opts.polish_iters + 1):
        h = phi * phi
        Kh = irfftn(work.mr * rfftn(h), work.g.n)
        R = -(cp.lambda1 * h * phi + cp.lambda2 * Kh * phi)
        ph = fftn(phi)
        denom = float(np.sum(R * phi) * work.dV)
        if denom <= 0.0:
            phi, theta = best, theta * 0.5
            if theta < 1e-3:
                break
            continue
        S = float(np.sum(Lm * (ph.real**2 + ph.imag**2)) * work.dV / work.Nt) / denom
        step = S**1.5 * ifftn(fftn(R) / Lm).real
        phi = (1.0 - theta) * phi + theta * step
        rn = _l2(work, _residual_array(work, phi, cp))
        scale = max(1.0, _l2(work, phi))
        if rn < best_rn:
            best, best_rn = phi, rn
        if rn < opts.polish_tol * scale:
            return phi, rn, its
        grow = grow + 1 if rn > rn_prev else 0
        if grow >= 4:
            phi, theta, grow = best, theta * 0.5, 0
            if theta < 1e-3:
                break
        rn_prev = rn
    return best, best_rn, its


def _l2(work: _Work, a: np.ndarray) -> float:
    return float(np.sqrt(np.sum(a * a) * work.dV))


def _newton_fallback(work: _Work, phi, cp: CouplingParams, opts: MinimizerOptions):
    """Preconditioned Newton-Krylov on the stationary residual.

    Takes over when the fixed-point tail stalls (slowly decaying near-neutral
    modes); quadratic convergence from an already-good state.
    """
    from scipy.optimize import newton_krylov
    from scipy.sparse.linalg import LinearOperator

    Lm = 1.0 + 0.5 * work.xi2
    shape = phi.shape
    size = phi.size
    precond = LinearOperator(
        (size, size),
        matvec=lambda v: ifftn(fftn(v.reshape(shape)) / Lm).real.ravel(),
    )

    def fun(v):
        return _residual_array(work, v.reshape(shape), cp).ravel()

    try:
        sol = newton_krylov(
            fun, phi.ravel(), method="lgmres", inner_M=precond,
            maxiter=25, f_rtol=1e-13,
        )
        cand = sol.reshape(shape)
    except Exception:
        return phi, _l2(work, _residual_array(work, phi, cp))
    rn = _l2(work, _residual_array(work, cand, cp))
    rn_old = _l2(work, _residual_array(work, phi, cp))
    if rn < rn_old:
        return cand, rn
    return phi, rn_old


def _refine(phi: np.ndarray, g: Grid, factor: float):
    """Spectrally interpolate onto a grid with ``factor`` times the points."""
    n_new = tuple(int(np.ceil(ni * factor / 2.0)) * 2 for ni in g.n)
    g_new = make_grid(n_new, g.L)
    vals = spectral_zoom(phi.astype(complex), g, g_new, scale=1.0).real
    return vals, g_new


def _extend_box(phi: np.ndarray, g: Grid, factor: float = 1.5):
    """Embed the field in a larger box at the same spacing, zero outside."""
    n_new, pads = [], []
    for ni in g.n:
        target = int(np.ceil(ni * factor / 2.0)) * 2
        if (target - ni) % 2:
            target += 1
        n_new.append(target)
        pads.append((target - ni) // 2)
    g_new = make_grid(
        tuple(n_new), tuple(nn * di for nn, di in zip(n_new, g.dx))
    )
    vals = np.zeros(tuple(n_new), dtype=phi.dtype)
    s = tuple(slice(p, p + ni) for p, ni in zip(pads, g.n))
    vals[s] = phi
    return vals, g_new


def _boundary_level(phi: np.ndarray) -> float:
    """Largest face value relative to the peak."""
    peak = float(np.abs(phi).max())
    if peak == 0.0:
        return 0.0
    faces = max(
        float(np.abs(phi[0]).max()), float(np.abs(phi[-1]).max()),
        float(np.abs(phi[:, 0]).max()), float(np.abs(phi[:, -1]).max()),
        float(np.abs(phi[:, :, 0]).max()), float(np.abs(phi[:, :, -1]).max()),
    )
    return faces / peak


def _recenter(phi: np.ndarray) -> np.ndarray:
    """Roll the peak to the center index (exact on a periodic box)."""
    idx = np.unravel_index(int(np.argmax(np.abs(phi))), phi.shape)
    shift = tuple(ni // 2 - i for ni, i in zip(phi.shape, idx))
    if any(shift):
        phi = np.roll(phi, shift, axis=(0, 1, 2))
    return phi


def _symmetrize(phi: np.ndarray) -> np.ndarray:
    """Average over the eight per-axis reflections about the center index.

    Reflection ``j -> (n - j) mod n`` is a lattice automorphism, the centered
    bound state is even in each coordinate, and projecting out the odd part
    removes the translation zero modes that otherwise stall the polish for
    asymmetric starting guesses.
    """
    for ax in range(3):
        flipped = np.roll(np.flip(phi, axis=ax), 1, axis=ax)
        phi = 0.5 * (phi + flipped)
    return phi


def _polish_adaptive(phi_vals, g2: Grid, cp: CouplingParams, opts: MinimizerOptions):
    """Polish, then adapt the grid on measured quality until the dilation
    defect and residual meet their thresholds.

    A high defect with raised boundary values means the box truncates the
    bound-state tails (extend at fixed spacing); with clean boundaries it
    means the spacing is too coarse (refine at fixed box).
    """
    work2 = _Work(g2)

    def solve(vals):
        vals = _symmetrize(_recenter(vals))
        vals, rn, its = _polish(work2, vals, cp, opts)
        if rn > opts.polish_tol * max(1.0, _l2(work2, vals)):
            vals = _symmetrize(vals)
            vals, rn, more = _polish(work2, vals, cp, opts)
            its += more
        if rn > opts.polish_tol * max(1.0, _l2(work2, vals)):
            vals, rn = _newton_fallback(work2, vals, cp, opts)
        return vals, rn, its

    phi_vals, rn, its = solve(phi_vals)
    extensions = refinements = 0
    while True:
        Mq, Hq, _, _, _ = work2.functionals(phi_vals, cp)
        defect = abs(Hq - 6.0 * Mq) / Hq
        resid_ok = rn <= opts.residual_tol * max(1.0, np.sqrt(Mq))
        boundary_high = _boundary_level(phi_vals) > opts.boundary_level
        if defect <= opts.refine_threshold and resid_ok and not boundary_high:
            break
        if boundary_high and extensions < opts.max_refinements:
            phi_vals, g2 = _extend_box(phi_vals, g2, 1.5)
            extensions += 1
        elif (
            (defect > opts.refine_threshold or not resid_ok)
            and refinements < opts.max_refinements
        ):
            phi_vals, g2 = _refine(phi_vals, g2, 1.5)
            refinements += 1
        else:
            break
        work2 = _Work(g2)
        phi_vals, rn, more = solve(phi_vals)
        its += more
    return phi_vals, g2, rn, its


def minimize_weinstein(
    grid: Grid, cp: CouplingParams, opts: MinimizerOptions | None = None, seed: int = 0
) -> ComplexField:
    """Minimize the Weinstein quotient; returns the minimizer with M = H = 1.

    The returned field lives on a relabeled (and possibly refined) grid; its
    quotient value gives the sharp interpolation constant as ``1 / W``.
    Raises :class:`DomainError` if no admissible initial data exists and
    :class:`NonConvergenceError` if the tolerances are not met.
    """
    opts = opts or MinimizerOptions()
    work = _Work(grid)
    f0 = _initial_guess(work, cp, opts, seed)
    f, trace = _descend(work, f0, cp, opts)
    if any(later > earlier for earlier, later in zip(trace, trace[1:])):
        raise AssertionError("W increased along an accepted step")

    # move to the bound-state gauge, polish the stationary equation, and
    # adapt the grid until the record-quality thresholds are met
    M, H, N, _, _ = work.functionals(f, cp)
    copt_est = (-N) / (H**1.5 * np.sqrt(M))
    phi, g2 = _bound_state_gauge(f, grid, M, H, copt_est)
    phi, g2, rn, its = _polish_adaptive(phi, g2, cp, opts)
    work2 = _Work(g2)
    scale = max(1.0, _l2(work2, phi))
    if rn > opts.residual_tol * scale:
        raise NonConvergenceError(
            f"stationary residual {rn:.3e} above tolerance after "
            f"{len(trace)} descent + {its} polish iterations"
        )

    # exact relabel back to the M = H = 1 gauge
    M2, H2, N2, _, _ = work2.functionals(phi, cp)
    b = np.sqrt(M2 / H2)
    amp = M2**0.25 * H2**-0.75
    gstar_grid = g2.rescaled(1.0 / b)
    gstar = ComplexField(gstar_grid, (phi * amp).astype(complex))
    gstar.iterations = len(trace) + its  # type: ignore[attr-defined]
    gstar.w_trace = trace  # type: ignore[attr-defined]

    gn = _final_gradient_norm(gstar, cp)
    if gn > opts.grad_tol:
        raise NonConvergenceError(
            f"preconditioned quotient gradient {gn:.3e} exceeds {opts.grad_tol:.1e}"
        )
    gstar.grad_norm = gn  # type: ignore[attr-defined]
    return gstar


def _final_gradient_norm(gstar: ComplexField, cp: CouplingParams) -> float:
    work = _Work(gstar.grid)
    f = gstar.values.real
    M, H, N, fh, Kh = work.functionals(f, cp)
    p = _projected_gradient(work, f, M, H, N, fh, Kh, cp)
    return float(np.sqrt(np.sum(p * p) * work.dV))


def elliptic_residual(phi: ComplexField, cp: CouplingParams) -> float:
    """L2 norm of the stationary-equation defect, with spectral derivatives."""
    work = _Work(phi.grid)
    return _l2(work, _residual_array(work, phi.values.real, cp))


def rescale_to_bound_state(
    g: ComplexField,
    cp: CouplingParams,
    copt: float | None = None,
    opts: MinimizerOptions | None = None,
    seed: int = 0,
    iterations: int = 0,
) -> GroundStateRecord:
    """Relabel a Weinstein minimizer into an exact bound state and validate.

    The substitution ``g(x) = nu * phi(mu x)`` with ``nu = sqrt(b*copt/4)``,
    ``mu = sqrt(b/(2a))``, ``a = 3 |grad g| |g|``, ``b = |grad g|^3 / |g|``
    maps the minimizer onto a solution of the stationary equation; on the
    grid this is a pure box relabel.
    """
    opts = opts or MinimizerOptions()
    f = g.values.real
    M = mass(g)
    H = kinetic(g)
    if copt is None:
        copt = 1.0 / weinstein(g, cp)
    phi_vals, g2 = _bound_state_gauge(f, g.grid, M, H, copt)

    # The algebraic relabel reproduces the bound state only up to the lattice
    # dilation-identity defect, so a short fixed-point pass re-converges the
    # stationary equation; when the minimizer was produced by
    # minimize_weinstein the grid is already adapted and this is nearly a
    # no-op.
    phi_vals, g2, rn, _ = _polish_adaptive(phi_vals, g2, cp, opts)
    phi = ComplexField(g2, phi_vals.astype(complex))

    M2 = mass(phi)
    H2 = kinetic(phi)
    N2 = potential(phi, cp)
    copt_out = (-N2) / (H2**1.5 * np.sqrt(M2))
    em = 0.5 * (H2 + N2) * M2
    hm = H2 * M2
    neg_nm = -N2 * M2
    res = elliptic_residual(phi, cp)

    tol = opts.pohozaev_tol
    checks = {
        "pohozaev H=6M": abs(H2 - 6.0 * M2) / H2,
        "pohozaev H=-(3/2)N": abs(H2 + 1.5 * N2) / H2,
        "chain EM=HM/6": abs(em - hm / 6.0) / abs(em),
        "chain EM=negNM/4": abs(em - neg_nm / 4.0) / abs(em),
        "chain EM=(2/27)/C^2": abs(em - (2.0 / 27.0) / copt_out**2) / abs(em),
    }
    for name, val in checks.items():
        if val > tol:
            raise NonConvergenceError(f"bound-state invariant {name} off by {val:.2e}")
    if res > opts.residual_tol * max(1.0, np.sqrt(M2)):
        raise NonConvergenceError(f"stationary residual {res:.2e} above tolerance")

    return GroundStateRecord(
        phi=phi,
        cp=cp,
        copt=float(copt_out),
        em=float(em),
        hm=float(hm),
        neg_nm=float(neg_nm),
        residual=float(res),
        iterations=iterations,
        seed=seed,
        w_value=float(1.0 / copt if copt else 0.0),
    )


def compute_ground_state(
    grid: Grid | None = None,
    cp: CouplingParams = CouplingParams(-1.0, 0.0),
    opts: MinimizerOptions | None = None,
    seed: int = 0,
) -> GroundStateRecord:
    """Full pipeline: minimize, rescale, validate, and package the record."""
    if grid is None:
        grid = make_grid(*DEFAULT_RECORD_GRID)
    opts = opts or MinimizerOptions()
    gstar = minimize_weinstein(grid, cp, opts, seed=seed)
    return rescale_to_bound_state(
        gstar,
        cp,
        copt=1.0 / weinstein(gstar, cp),
        opts=opts,
        seed=seed,
        iterations=getattr(gstar, "iterations", 0),
    )
