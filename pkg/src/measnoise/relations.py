"""Uncertainty inequalities evaluated as ``lhs >= rhs`` reports."""

from __future__ import annotations

import hashlib
from dataclasses import dataclass

import numpy as np

from . import hilbert as hb
from . import metrics as mt
from .errors import DegenerateSigma
from .hilbert import TOL
from .measurement import JointFamily, MeasurementFamily, marginals

RELATION_IDS = (
    "robertson",
    "heisenberg_nd",
    "universal",
    "universal_dimensionless",
    "thm8",
    "arthurs_goodman",
    "ishikawa_ozawa",
    "thm4_joint",
    "lemma6",
    "ndm",
    "nlm",
)

# Relations that hold for every input; a failure is a defect, not a finding.
GUARANTEED = frozenset(RELATION_IDS) - {"heisenberg_nd"}


@dataclass(frozen=True)
class RelationReport:
    relation_id: str
    lhs: float
    rhs: float
    margin: float
    passed: bool
    inputs_digest: str
    applicable: bool = True

    @property
    def guaranteed(self) -> bool:
        return self.relation_id in GUARANTEED

    @property
    def is_defect(self) -> bool:
        return self.guaranteed and self.applicable and not self.passed


def digest(*items) -> str:
    """Short stable hash of the numerical inputs of a check."""
    h = hashlib.sha256()
    for item in items:
        if isinstance(item, (MeasurementFamily, JointFamily)):
            h.update(np.asarray(item.labels, dtype=float).tobytes())
            h.update(np.ascontiguousarray(item.ops).tobytes())
        else:
            h.update(np.ascontiguousarray(np.asarray(getattr(item, "op", item), dtype=complex)).tobytes())
    return h.hexdigest()[:16]


def make_report(relation_id, lhs, rhs, inputs, applicable=True, slack=TOL.numeric_slack):
    lhs, rhs = float(lhs), float(rhs)
    margin = lhs - rhs
    return RelationReport(
        relation_id, lhs, rhs, margin, bool(margin >= -slack), digest(*inputs), applicable
    )


def robertson(a, b, psi) -> RelationReport:
    lhs = mt.sigma(a, psi) * mt.sigma(b, psi)
    return make_report("robertson", lhs, mt.commutator_bound(a, b, psi), (a, b, psi))


def heisenberg_nd(f: MeasurementFamily, a, b, psi) -> RelationReport:
    """``eps(A) eta(B) >= |<[A,B]>|/2``; not valid in general."""
    lhs = mt.epsilon(f, a, psi) * mt.eta(f, b, psi)
    return make_report("heisenberg_nd", lhs, mt.commutator_bound(a, b, psi), (f, a, b, psi))


def universal(f: MeasurementFamily, a, b, psi) -> RelationReport:
    q = mt.noise_quantities(f, a, b, psi)
    lhs = q.epsilon * q.eta + q.epsilon * q.sigma_b + q.sigma_a * q.eta
    return make_report("universal", lhs, q.commutator_bound, (f, a, b, psi))


def universal_dimensionless(f: MeasurementFamily, a, b, psi) -> RelationReport:
    q = mt.noise_quantities(f, a, b, psi)
    if q.sigma_a <= TOL.sigma_floor or q.sigma_b <= TOL.sigma_floor:
        raise DegenerateSigma(
            f"standard deviations ({q.sigma_a:.3e}, {q.sigma_b:.3e}) too small to divide by"
        )
    ss = q.sigma_a * q.sigma_b
    lhs = q.epsilon * q.eta / ss + q.epsilon / q.sigma_a + q.eta / q.sigma_b
    return make_report("universal_dimensionless", lhs, q.commutator_bound / ss, (f, a, b, psi))


def thm8(f: MeasurementFamily, a, b, psi) -> RelationReport:
    """Noise-disturbance product corrected by the mean noise/disturbance commutators."""
    a_op, b_op = hb.as_operator(a), hb.as_operator(b)
    n_a = mt.mean_noise_operator(f, a_op)
    d_b = mt.mean_disturbance_operator(f, b_op)
    correction = abs(
        hb.expectation(hb.commutator(n_a, b_op), psi) - hb.expectation(hb.commutator(d_b, a_op), psi)
    ) / 2
    lhs = mt.epsilon(f, a_op, psi) * mt.eta(f, b_op, psi) + correction
    return make_report("thm8", lhs, mt.commutator_bound(a_op, b_op, psi), (f, a, b, psi))


def thm10_residual(f: MeasurementFamily, a, b) -> float:
    """``||[n_A, B] - [d_B, A]||``; zero means the Heisenberg-type relation holds on every state."""
    a_op, b_op = hb.as_operator(a), hb.as_operator(b)
    n_a = mt.mean_noise_operator(f, a_op)
    d_b = mt.mean_disturbance_operator(f, b_op)
    return hb.operator_norm(hb.commutator(n_a, b_op) - hb.commutator(d_b, a_op))


def non_disturbing_defect(f: MeasurementFamily, b, psi) -> float:
    b = hb.as_operator(b)
    return max(float(np.linalg.norm(hb.commutator(op, b) @ psi)) for op in f.ops)


def noiseless_defect(f: MeasurementFamily, a, psi) -> float:
    a = hb.as_operator(a)
    a_psi = a @ psi
    return max(float(np.linalg.norm(m * (op @ psi) - op @ a_psi)) for m, op in f)


def thm11_checks(f: MeasurementFamily, a, b, psi, tol: float = TOL.hypothesis):
    """Reports for the non-disturbing and noiseless special cases.

    Each report is marked ``applicable`` only when its hypothesis holds on
    ``psi`` within ``tol``.
    """
    bound = mt.commutator_bound(a, b, psi)
    inputs = (f, a, b, psi)
    ndm = make_report(
        "ndm",
        mt.epsilon(f, a, psi) * mt.sigma(b, psi),
        bound,
        inputs,
        applicable=non_disturbing_defect(f, b, psi) <= tol,
    )
    nlm = make_report(
        "nlm",
        mt.sigma(a, psi) * mt.eta(f, b, psi),
        bound,
        inputs,
        applicable=noiseless_defect(f, a, psi) <= tol,
    )
    return ndm, nlm


def lemma6(f: MeasurementFamily, b, psi) -> RelationReport:
    return make_report("lemma6", 2 * hb.operator_norm(b), mt.eta(f, b, psi), (f, b, psi))


# ---------------------------------------------------------------------------
# joint measurements
# ---------------------------------------------------------------------------

def arthurs_goodman(j: JointFamily, a, b, psi) -> RelationReport:
    sa, sb = mt.joint_meter_sigma(j, a, b, psi)
    bound = 2 * mt.commutator_bound(a, b, psi)
    return make_report("arthurs_goodman", sa * sb, bound, (j, a, b, psi))


def ishikawa_ozawa(j: JointFamily, a, b, psi) -> RelationReport:
    """Noise deviations ``sigma(N_A) sigma(N_B)`` with the mean noise subtracted."""
    ea, eb = mt.joint_noise_sigma(j, a, b, psi)
    pa, pb = marginals(j)
    bias_a = hb.real_expectation(pa.first_moment() - hb.as_operator(a), psi)
    bias_b = hb.real_expectation(pb.first_moment() - hb.as_operator(b), psi)
    sa = np.sqrt(max(ea**2 - bias_a**2, 0.0))
    sb = np.sqrt(max(eb**2 - bias_b**2, 0.0))
    return make_report("ishikawa_ozawa", sa * sb, mt.commutator_bound(a, b, psi), (j, a, b, psi))


def thm4_joint(j: JointFamily, a, b, psi) -> RelationReport:
    ea, eb = mt.joint_noise_sigma(j, a, b, psi)
    return make_report("thm4_joint", ea * eb, mt.commutator_bound(a, b, psi), (j, a, b, psi))
