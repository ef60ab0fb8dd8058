"""Regime classification and dynamics predictions from conserved quantities.

Every check compares scale-invariant products (energy*mass, kinetic*mass,
interaction*mass) of an initial datum against the corresponding products of
the ground state, and reports per-condition margins.  Strict inequalities are
evaluated with a relative tolerance band: values inside the band are flagged
ambiguous instead of being forced into a branch.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError
from .functionals import FunctionalBundle
from .groundstate import GroundStateRecord
from .propagator import BLOWUP, COMPLETED, Trajectory, asymptotic_label

__all__ = [
    "UNSTABLE_SLOPE",
    "GW_SLOPE",
    "ThresholdSet",
    "RegimeVerdict",
    "ConditionCheck",
    "TheoremReport",
    "classify_regime",
    "below_threshold_membership",
    "MembershipResult",
    "check_scattering_conditions",
    "check_blowup_conditions",
    "variance_convexity_threshold",
    "sqrt_variance_rate_bound",
    "coercivity_margin",
    "blowup_delta_default",
    "at_threshold_classify",
    "trajectory_verdict",
    "TrajectoryAssessment",
    "STRICT_BAND",
]

UNSTABLE_SLOPE = 4.0 * np.pi / 3.0
GW_SLOPE = 8.0 * np.pi / 3.0
STRICT_BAND = 1e-6  # relative band around strict inequalities


@dataclass(frozen=True)
class ThresholdSet:
    """Scale-invariant ground-state products defining the thresholds."""

    EM: float
    HM: float
    negNM: float
    Copt: float

    @classmethod
    def from_record(cls, rec: GroundStateRecord) -> "ThresholdSet":
        return cls(EM=rec.em, HM=rec.hm, negNM=rec.neg_nm, Copt=rec.copt)


def _coerce_thresholds(th) -> ThresholdSet:
    if isinstance(th, ThresholdSet):
        return th
    if isinstance(th, GroundStateRecord):
        return ThresholdSet.from_record(th)
    if isinstance(th, dict):
        return ThresholdSet(th["EM"], th["HM"], th["negNM"], th["Copt"])
    raise TypeError(f"cannot interpret thresholds from {type(th)!r}")


# ---------------------------------------------------------------------------
# coupling regimes
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RegimeVerdict:
    regime: str  # "stable" | "unstable"
    in_cond_gw: bool
    margins: dict = field(default_factory=dict)
    notes: str = ""

    @property
    def unstable(self) -> bool:
        return self.regime == "unstable"


def classify_regime(cp) -> RegimeVerdict:
    """Partition of the coupling plane.

    For positive lambda2 the unstable cone is ``lambda1 < (4pi/3) lambda2``
    and the negative-interaction subcone is ``lambda1 < -(8pi/3) lambda2``;
    for negative lambda2 the slopes swap with opposite signs.  On the
    ``lambda2 = 0`` line both reduce to ``lambda1 < 0``.  The partition is
    exact (boundary points are stable); margins report signed distances.
    """
    l1, l2 = cp.lambda1, cp.lambda2
    if l2 > 0.0:
        unstable_edge = UNSTABLE_SLOPE * l2
        gw_edge = -GW_SLOPE * l2
    elif l2 < 0.0:
        unstable_edge = -GW_SLOPE * l2
        gw_edge = UNSTABLE_SLOPE * l2
    else:
        unstable_edge = 0.0
        gw_edge = 0.0
    unstable = l1 < unstable_edge
    in_gw = l1 < gw_edge
    scale = max(abs(l1), abs(l2), 1e-300)
    margins = {
        "unstable_edge": (unstable_edge - l1) / scale,
        "negative_interaction_edge": (gw_edge - l1) / scale,
    }
    notes = ""
    if in_gw:
        notes = "interaction multiplier negative at every frequency; N < 0 for all fields"
    return RegimeVerdict("unstable" if unstable else "stable", in_gw, margins, notes)


# ---------------------------------------------------------------------------
# per-condition reports
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ConditionCheck:
    name: str
    lhs: float
    rhs: float
    satisfied: bool
    margin: float  # signed relative distance to the boundary
    ambiguous: bool = False

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "satisfied": bool(self.satisfied),
            "margin": self.margin,
            "ambiguous": bool(self.ambiguous),
        }


@dataclass(frozen=True)
class TheoremReport:
    theorem_id: str
    conditions: tuple[ConditionCheck, ...]
    prediction: str  # scatter|blowup|bloworgrow|threshold-trichotomy|none
    notes: str = ""

    @property
    def all_satisfied(self) -> bool:
        return all(c.satisfied for c in self.conditions)

    def to_dict(self) -> dict:
        return {
            "theorem_id": self.theorem_id,
            "prediction": self.prediction,
            "conditions": [c.to_dict() for c in self.conditions],
            "notes": self.notes,
        }


def _strict(name, lhs, rhs, sense, band=STRICT_BAND) -> ConditionCheck:
    """Strict comparison with an ambiguity band relative to |rhs|."""
    scale = max(abs(rhs), abs(lhs), 1e-300)
    diff = (rhs - lhs) / scale  # positive means lhs < rhs
    if sense == "<":
        sat, margin = lhs < rhs, diff
    elif sense == ">":
        sat, margin = lhs > rhs, -diff
    elif sense == "<=":
        sat, margin = lhs <= rhs, diff
    elif sense == ">=":
        sat, margin = lhs >= rhs, -diff
    else:
        raise ValueError(sense)
    return ConditionCheck(name, float(lhs), float(rhs), bool(sat),
                          float(margin), abs(diff) <= band)


# ---------------------------------------------------------------------------
# set membership below the threshold
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MembershipResult:
    label: str  # "scattering_set" | "blowup_set" | "neither"
    ambiguous: bool
    em_check: ConditionCheck
    hm_check: ConditionCheck


def below_threshold_membership(
    bundle: FunctionalBundle, th, band: float = STRICT_BAND
) -> MembershipResult:
    """Membership in the two invariant sets below the mass-energy threshold.

    ``scattering_set``: EM and HM both strictly below the ground-state
    products; ``blowup_set``: EM below, HM strictly above.  Points on either
    boundary (within the band) are reported ambiguous.
    """
    t = _coerce_thresholds(th)
    em = _strict("EM_below_threshold", bundle.E * bundle.M, t.EM, "<", band)
    hm_low = _strict("HM_below_threshold", bundle.H * bundle.M, t.HM, "<", band)
    ambiguous = em.ambiguous or hm_low.ambiguous
    if not em.satisfied or em.ambiguous:
        return MembershipResult("neither", ambiguous, em, hm_low)
    if hm_low.ambiguous:
        return MembershipResult("neither", True, em, hm_low)
    label = "scattering_set" if hm_low.satisfied else "blowup_set"
    return MembershipResult(label, False, em, hm_low)


# ---------------------------------------------------------------------------
# above-threshold scattering and blow-up conditions
# ---------------------------------------------------------------------------


def _variance_cap_product(bundle: FunctionalBundle, t: ThresholdSet) -> float:
    """(EM / EM_threshold) * (1 - V'(0)^2 / (8 E V)) in the division-free form
    M (E - V'^2 / (8V)) / EM_threshold, valid for any sign of E."""
    if bundle.V <= 0.0:
        raise DomainError("variance cap needs V(0) > 0 (nonzero field)")
    return bundle.M * (bundle.E - bundle.Vp**2 / (8.0 * bundle.V)) / t.EM


def check_scattering_conditions(
    bundle: FunctionalBundle, th, cp=None, band: float = STRICT_BAND
) -> TheoremReport:
    """Above-threshold scattering conditions on an initial datum.

    All four must hold (with the couplings in the negative-interaction cone)
    for the prediction ``scatter``: EM at or above threshold, the
    variance-weighted cap at most 1, interaction product strictly below
    threshold, and nonnegative initial variance growth.
    """
    t = _coerce_thresholds(th)
    conds = (
        _strict("mass_energy_at_or_above_threshold", bundle.E * bundle.M, t.EM, ">=", band),
        _strict("variance_weighted_cap", _variance_cap_product(bundle, t), 1.0, "<=", band),
        _strict("interaction_product_below_threshold", -bundle.N * bundle.M, t.negNM, "<", band),
        _strict("variance_initially_growing", bundle.Vp, 0.0, ">=", band),
    )
    ok = all(c.satisfied for c in conds)
    regime_ok = classify_regime(cp).in_cond_gw if cp is not None else True
    notes = "" if regime_ok else "couplings outside the negative-interaction cone"
    return TheoremReport(
        "scattering_above_threshold",
        conds,
        "scatter" if (ok and regime_ok) else "none",
        notes,
    )


def check_blowup_conditions(
    bundle: FunctionalBundle, th, cp=None, band: float = STRICT_BAND
) -> TheoremReport:
    """Large-data blow-up conditions (mirror of the scattering check)."""
    t = _coerce_thresholds(th)
    conds = (
        _strict("variance_weighted_cap", _variance_cap_product(bundle, t), 1.0, "<=", band),
        _strict("interaction_product_above_threshold", -bundle.N * bundle.M, t.negNM, ">", band),
        _strict("variance_initially_shrinking", bundle.Vp, 0.0, "<=", band),
    )
    ok = all(c.satisfied for c in conds)
    regime_ok = classify_regime(cp).in_cond_gw if cp is not None else True
    notes = "" if regime_ok else "couplings outside the negative-interaction cone"
    return TheoremReport(
        "variance_blowup",
        conds,
        "blowup" if (ok and regime_ok) else "none",
        notes,
    )


# ---------------------------------------------------------------------------
# the convexity envelope for sqrt(variance)
# ---------------------------------------------------------------------------


def variance_convexity_threshold(energy: float, m: float, em_threshold: float) -> tuple[float, bool]:
    """Level that V'' must stay above for the above-threshold argument.

    Returns ``(value, admissible)`` where ``value = 4E (1 - EM_th / (E M))``;
    a negative value (datum below threshold) is reported with
    ``admissible = False`` rather than raised.
    """
    if energy <= 0.0:
        raise DomainError("convexity threshold requires positive energy")
    val = 4.0 * energy * (1.0 - em_threshold / (energy * m))
    return float(val), bool(val >= 0.0)


def sqrt_variance_rate_bound(vpp: float, energy: float, m: float, copt: float) -> float:
    """Envelope bounding ``(d/dt sqrt(V))^2`` as a function of ``V''``.

    Decreasing below the convexity threshold and increasing above it; its
    minimum value equals half the threshold.  Requires ``vpp <= 4 E``.
    """
    if vpp > 4.0 * energy:
        raise DomainError(f"V''={vpp} exceeds 4E={4*energy}")
    return float(
        6.0 * energy
        - vpp
        - (4.0 * energy - vpp) ** (2.0 / 3.0) / (copt ** (2.0 / 3.0) * m ** (1.0 / 3.0))
    )


def coercivity_margin(A: float, th) -> float:
    """Lower-bound factor nu with ``G >= nu * H`` for data whose interaction
    product stays at most ``A`` strictly below the threshold."""
    t = _coerce_thresholds(th)
    if not (0.0 < A < t.negNM):
        raise DomainError(f"need 0 < A < {t.negNM}, got {A}")
    eta = 1.0 - A / t.negNM
    return float(1.0 - (1.0 - eta) ** (1.0 / 3.0))


def blowup_delta_default(bundle: FunctionalBundle, th) -> float:
    """Default uniform-negativity level for the blow-up/grow-up criterion.

    For data with EM below and HM above the thresholds, ``G M`` stays below
    ``-3 (EM_th - EM)`` along the flow, so a tenth of that bound divided by
    the mass is a safe default for delta.
    """
    t = _coerce_thresholds(th)
    em = bundle.E * bundle.M
    hm = bundle.H * bundle.M
    if not (em < t.EM and hm > t.HM):
        raise DomainError(
            "coercivity-informed delta needs EM below and HM above the thresholds"
        )
    return float(0.1 * 3.0 * (t.EM - em) / bundle.M)


# ---------------------------------------------------------------------------
# at-threshold trichotomy
# ---------------------------------------------------------------------------


def at_threshold_classify(
    bundle: FunctionalBundle, th, tol: float = 1e-4, cp=None
) -> TheoremReport:
    """Branch classification for data with EM equal to the threshold.

    Within the relative band ``tol`` around EM = EM_threshold: HM below the
    threshold gives global existence (scattering or concentration when the
    interaction cone condition also holds); HM at the threshold is the
    standing-wave branch; HM above gives blow-up, grow-up, or concentration.
    """
    t = _coerce_thresholds(th)
    em = bundle.E * bundle.M
    hm = bundle.H * bundle.M
    if abs(em - t.EM) > tol * abs(t.EM):
        raise DomainError(
            f"EM={em:.6e} not within {tol:.0e} of the threshold {t.EM:.6e}"
        )
    on_em = ConditionCheck(
        "mass_energy_at_threshold", float(em), float(t.EM), True,
        float((t.EM - em) / abs(t.EM)), True,
    )
    hm_rel = (hm - t.HM) / abs(t.HM)
    if abs(hm_rel) <= tol:
        hm_check = ConditionCheck("HM_at_threshold", float(hm), float(t.HM), True, float(-hm_rel), True)
        prediction = "threshold-trichotomy"
        notes = (
            "standing-wave branch: the solution is the rescaled bound state "
            "times a phase rotation"
        )
    elif hm_rel < 0.0:
        hm_check = _strict("HM_below_threshold", hm, t.HM, "<", tol)
        prediction = "threshold-trichotomy"
        gw = classify_regime(cp).in_cond_gw if cp is not None else None
        notes = "global branch: HM stays below threshold for all time"
        if gw:
            notes += (
                "; with the negative-interaction cone the solution either "
                "scatters or concentrates to a rescaled bound state along a "
                "time sequence (no finite-time discriminator exists)"
            )
    else:
        hm_check = _strict("HM_above_threshold", hm, t.HM, ">", tol)
        prediction = "threshold-trichotomy"
        notes = (
            "blow/grow branch: HM stays above threshold; finite-time blow-up, "
            "grow-up along a sequence, or concentration"
        )
        if bundle.V > 0.0 and np.isfinite(bundle.V):
            notes += "; finite variance excludes pure grow-up"
    return TheoremReport("at_threshold_trichotomy", (on_em, hm_check), prediction, notes)


# ---------------------------------------------------------------------------
# trajectory reconciliation
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TrajectoryAssessment:
    scattering_criterion: bool
    scattering_margin: float
    blowup_criterion: bool
    blowup_margin: float
    delta: float
    propagator_verdict: str
    asymptotic: str
    l4_decay_rate: float
    consistent: bool
    notes: str

    def to_dict(self) -> dict:
        return {
            "scattering_criterion": self.scattering_criterion,
            "scattering_margin": self.scattering_margin,
            "blowup_criterion": self.blowup_criterion,
            "blowup_margin": self.blowup_margin,
            "delta": self.delta,
            "propagator_verdict": self.propagator_verdict,
            "asymptotic": self.asymptotic,
            "l4_decay_rate": self.l4_decay_rate,
            "consistent": self.consistent,
            "notes": self.notes,
        }


def trajectory_verdict(traj: Trajectory, th, delta: float) -> TrajectoryAssessment:
    """Empirical check of the two criteria over the sampled trajectory.

    (a) the supremum over samples of ``-N M`` stayed below the ground-state
    product (scattering criterion); (b) ``G <= -delta`` at every sample
    (blow-up/grow-up criterion).  The supremum over continuous time is
    replaced by the max over diagnostics samples; the sampling stride is
    whatever the trajectory was run with.
    """
    if not traj.rows:
        raise DomainError("empty trajectory")
    t = _coerce_thresholds(th)
    nm = np.array([-r.N * r.M for r in traj.rows])
    g = traj.column("G")
    sup_nm = float(nm.max())
    scat = sup_nm < t.negNM
    scat_margin = (t.negNM - sup_nm) / abs(t.negNM)
    blow = bool(np.all(g <= -delta))
    blow_margin = float((-delta - g.max()) / max(abs(delta), 1e-300))
    label, alpha = asymptotic_label(traj)
    verdict = traj.verdict

    notes = []
    consistent = True
    if blow and verdict == COMPLETED and traj.rows[-1].t > 0:
        notes.append(
            "uniformly negative G but run completed; horizon may be too short"
        )
        consistent = False
    if scat and verdict == BLOWUP:
        notes.append("scattering criterion held at samples yet collapse was flagged")
        consistent = False
    if blow and verdict == BLOWUP:
        notes.append("uniform G negativity matches detected collapse")
    if scat and verdict == COMPLETED:
        notes.append("interaction product stayed below threshold at every sample")
    return TrajectoryAssessment(
        scattering_criterion=bool(scat),
        scattering_margin=float(scat_margin),
        blowup_criterion=blow,
        blowup_margin=blow_margin,
        delta=float(delta),
        propagator_verdict=verdict,
        asymptotic=label,
        l4_decay_rate=float(alpha),
        consistent=consistent,
        notes="; ".join(notes),
    )
