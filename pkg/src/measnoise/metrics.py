"""Standard deviations, rms noise and rms disturbance for pure input states.

Observables may be passed as :class:`~measnoise.hilbert.Observable` or as
Hermitian arrays.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import hilbert as hb
from .errors import DimensionMismatch, NotJointlyUnbiased, OrthogonalityViolated
from .hilbert import TOL
from .measurement import JointFamily, MeasurementFamily, Pom, joint_unbiasedness_residual


@dataclass(frozen=True)
class NoiseQuantities:
    epsilon: float
    eta: float
    sigma_a: float
    sigma_b: float
    commutator_bound: float


def _check(op: np.ndarray, psi: np.ndarray) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex)
    if psi.shape != (op.shape[0],):
        raise DimensionMismatch(f"state of shape {psi.shape} vs operator {op.shape}")
    return psi


def _family_dim(f, op: np.ndarray) -> None:
    if f.dim != op.shape[0]:
        raise DimensionMismatch(f"family dimension {f.dim} vs operator {op.shape[0]}")


def sigma(a, psi: np.ndarray) -> float:
    """Standard deviation ``||(A - <A>) psi||``."""
    a = hb.as_operator(a)
    psi = _check(a, psi)
    mean = np.vdot(psi, a @ psi).real
    return float(np.linalg.norm(a @ psi - mean * psi))


def commutator_bound(a, b, psi: np.ndarray) -> float:
    """``|<[A, B]>| / 2``."""
    a, b = hb.as_operator(a), hb.as_operator(b)
    psi = _check(a, psi)
    return abs(hb.expectation(hb.commutator(a, b), psi)) / 2


def epsilon(f: MeasurementFamily, a, psi: np.ndarray) -> float:
    """Root-mean-square noise ``(sum_m ||M_m (m - A) psi||^2)^(1/2)``."""
    a = hb.as_operator(a)
    _family_dim(f, a)
    psi = _check(a, psi)
    a_psi = a @ psi
    total = 0.0
    for m, op in f:
        total += np.linalg.norm(op @ (m * psi - a_psi)) ** 2
    return float(np.sqrt(total))


def epsilon_orthogonal(f: MeasurementFamily, a, psi: np.ndarray, tol: float = TOL.orthogonality) -> float:
    """Noise ``||sum_m m M_m psi - A psi||``, valid for mutually orthogonal ranges."""
    a = hb.as_operator(a)
    _family_dim(f, a)
    psi = _check(a, psi)
    ops = f.ops
    for i in range(len(ops)):
        for j in range(i + 1, len(ops)):
            overlap = hb.operator_norm(ops[i].conj().T @ ops[j])
            if overlap > tol:
                raise OrthogonalityViolated(
                    f"ranges of outcomes {f.labels[i]} and {f.labels[j]} overlap ({overlap:.3e})"
                )
    moment = np.einsum("k,kij->ij", np.asarray(f.labels), ops)
    return float(np.linalg.norm(moment @ psi - a @ psi))


def epsilon_from_pom(p: Pom, a, psi: np.ndarray) -> float:
    """Noise from output moments on the inputs ``psi``, ``A psi`` and ``(A + I) psi``.

    The auxiliary vectors enter unnormalized, so each first moment is a
    plain quadratic form ``<v| Pi |v>``.
    """
    a = hb.as_operator(a)
    if p.dim != a.shape[0]:
        raise DimensionMismatch(f"POM dimension {p.dim} vs operator {a.shape[0]}")
    psi = _check(a, psi)
    a_psi = a @ psi
    shifted = a_psi + psi
    m = np.asarray(p.labels)

    def moments(v):
        return np.einsum("i,kij,j->k", v.conj(), p.effects, v).real

    q_psi, q_a, q_shift = moments(psi), moments(a_psi), moments(shifted)
    value = (
        np.vdot(a_psi, a_psi).real
        + np.sum(m**2 * q_psi)
        + np.sum(m * (q_psi + q_a - q_shift))
    )
    return float(np.sqrt(max(value, 0.0)))


def eta(f: MeasurementFamily, b, psi: np.ndarray) -> float:
    """Root-mean-square disturbance ``(sum_m ||[M_m, B] psi||^2)^(1/2)``."""
    b = hb.as_operator(b)
    _family_dim(f, b)
    psi = _check(b, psi)
    b_psi = b @ psi
    total = 0.0
    for _, op in f:
        total += np.linalg.norm(op @ b_psi - b @ (op @ psi)) ** 2
    return float(np.sqrt(total))


def mean_noise_operator(f: MeasurementFamily, a) -> np.ndarray:
    a = hb.as_operator(a)
    _family_dim(f, a)
    moment = np.einsum("k,kji,kjl->il", np.asarray(f.labels), f.ops.conj(), f.ops)
    return moment - a


def mean_disturbance_operator(f: MeasurementFamily, b) -> np.ndarray:
    b = hb.as_operator(b)
    _family_dim(f, b)
    return np.einsum("kji,jl,klm->im", f.ops.conj(), b, f.ops) - b


def noise_quantities(f: MeasurementFamily, a, b, psi: np.ndarray) -> NoiseQuantities:
    return NoiseQuantities(
        epsilon=epsilon(f, a, psi),
        eta=eta(f, b, psi),
        sigma_a=sigma(a, psi),
        sigma_b=sigma(b, psi),
        commutator_bound=commutator_bound(a, b, psi),
    )


# ---------------------------------------------------------------------------
# joint measurements
# ---------------------------------------------------------------------------

def require_jointly_unbiased(j: JointFamily, a, b, tol: float = TOL.unbiasedness) -> None:
    ra, rb = joint_unbiasedness_residual(j, a, b)
    if ra > tol or rb > tol:
        raise NotJointlyUnbiased(f"marginal first moments miss (A, B) by ({ra:.3e}, {rb:.3e})")


def _joint_setup(j: JointFamily, a, b, psi):
    a, b = hb.as_operator(a), hb.as_operator(b)
    _family_dim(j, a)
    _family_dim(j, b)
    psi = _check(a, psi)
    require_jointly_unbiased(j, a, b)
    return a, b, psi


def joint_meter_sigma(j: JointFamily, a, b, psi: np.ndarray) -> tuple[float, float]:
    """Meter deviations ``sigma(M_A)``, ``sigma(M_B)`` of a jointly unbiased family."""
    a, b, psi = _joint_setup(j, a, b, psi)
    probs = np.array([np.linalg.norm(op @ psi) ** 2 for op in j.ops])
    mean_a = np.vdot(psi, a @ psi).real
    mean_b = np.vdot(psi, b @ psi).real
    sa = np.sum((j.a_labels - mean_a) ** 2 * probs)
    sb = np.sum((j.b_labels - mean_b) ** 2 * probs)
    return float(np.sqrt(sa)), float(np.sqrt(sb))


def _joint_noise_second_moments(j: JointFamily, a, b, psi) -> tuple[float, float]:
    a_psi, b_psi = a @ psi, b @ psi
    na = nb = 0.0
    for (la, lb), op in j:
        na += np.linalg.norm(op @ (la * psi - a_psi)) ** 2
        nb += np.linalg.norm(op @ (lb * psi - b_psi)) ** 2
    return na, nb


def joint_noise_sigma(j: JointFamily, a, b, psi: np.ndarray) -> tuple[float, float]:
    """``(sum ||M_(a,b)(a - A) psi||^2)^(1/2)`` and its B counterpart.

    Under joint unbiasedness these are both the noise deviations and the
    rms noises of the joint measurement.
    """
    a, b, psi = _joint_setup(j, a, b, psi)
    na, nb = _joint_noise_second_moments(j, a, b, psi)
    return float(np.sqrt(na)), float(np.sqrt(nb))
