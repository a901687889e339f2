"""Explicit measuring processes realizing measurement families.

A family ``{M_m}`` with ``k`` outcomes is realized on ``H (x) C^k`` with
ancilla state ``|0>``, meter ``sum_m m |m><m|`` and a unitary ``U`` that
sends ``psi (x) |0>`` to ``sum_m M_m psi (x) |m>``.  The remaining columns
of ``U`` complete that isometry to a unitary.

The model-side quantities below (``model_epsilon``, ``model_eta``, the
model instrument and POM) only use ``U``, ``xi`` and the meter, so they act
as an independent check on the closed-form formulas of :mod:`metrics`.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from . import hilbert as hb
from .errors import DimensionMismatch, LabelMismatch
from .hilbert import TOL, Observable
from .measurement import MeasurementFamily, Pom, TpcpMap


@dataclass(frozen=True, eq=False)
class MeasuringProcess:
    system_dim: int
    ancilla_dim: int
    xi: np.ndarray
    u: np.ndarray
    meter: Observable

    def __post_init__(self):
        n = self.system_dim * self.ancilla_dim
        if self.u.shape != (n, n):
            raise DimensionMismatch(f"coupling unitary has shape {self.u.shape}, expected {(n, n)}")
        if self.xi.shape != (self.ancilla_dim,) or self.meter.dim != self.ancilla_dim:
            raise DimensionMismatch("ancilla state or meter does not match ancilla dimension")
        if not hb.is_unitary(self.u, TOL.norm):
            raise ValueError("coupling operator is not unitary")

    @property
    def rho0(self) -> np.ndarray:
        return np.outer(self.xi, self.xi.conj())

    def meter_projector(self, label: float) -> np.ndarray:
        try:
            return self.meter.projectors[self.meter.eigenvalues.index(float(label))]
        except ValueError:
            raise LabelMismatch(f"meter has no eigenvalue {label!r}") from None

    def posterior_meter(self) -> np.ndarray:
        """``M' = U^dag (I (x) M) U``."""
        lifted = hb.tensor(np.eye(self.system_dim), self.meter.op)
        return self.u.conj().T @ lifted @ self.u


@dataclass(frozen=True, eq=False)
class DilatedNoiseOperators:
    n_op: np.ndarray
    d_op: np.ndarray


def label_meter(labels: Sequence[float]) -> Observable:
    """Diagonal meter with one basis vector per label, no degeneracy merging."""
    k = len(labels)
    projectors = tuple(np.diag(np.eye(k)[i]).astype(complex) for i in range(k))
    return Observable(np.diag(np.asarray(labels, dtype=complex)), tuple(float(m) for m in labels), projectors)


def isometry_of(f: MeasurementFamily) -> np.ndarray:
    """``V psi = sum_m M_m psi (x) |m>`` as a ``(d k) x d`` matrix."""
    k, d, _ = f.ops.shape
    return np.transpose(f.ops, (1, 0, 2)).reshape(d * k, d)


def dilate(f: MeasurementFamily, completion_perm: Sequence[int] | None = None) -> MeasuringProcess:
    """Build a pure measuring process realizing ``f``.

    The complement of the isometry range is spanned by the trailing columns
    of a complete QR factorization; ``completion_perm`` reorders those
    columns, which yields a different but equally valid unitary.
    """
    k, d = len(f), f.dim
    v = isometry_of(f)
    q, _ = np.linalg.qr(v, mode="complete")
    complement = q[:, d:]
    if completion_perm is not None:
        perm = list(completion_perm)
        if sorted(perm) != list(range(complement.shape[1])):
            raise ValueError(f"completion_perm must permute {complement.shape[1]} columns")
        complement = complement[:, perm]
    n = d * k
    u = np.empty((n, n), dtype=complex)
    fed = np.arange(d) * k
    rest = np.setdiff1d(np.arange(n), fed)
    u[:, fed] = v
    u[:, rest] = complement
    return MeasuringProcess(d, k, hb.basis_ket(k, 0), u, label_meter(f.labels))


def swap_columns(p: MeasuringProcess, i: int, j: int) -> MeasuringProcess:
    """Copy of ``p`` with two columns of the coupling unitary exchanged."""
    u = p.u.copy()
    u[:, [i, j]] = u[:, [j, i]]
    return MeasuringProcess(p.system_dim, p.ancilla_dim, p.xi, u, p.meter)


# ---------------------------------------------------------------------------
# model-side statistics
# ---------------------------------------------------------------------------

def _evolve(p: MeasuringProcess, rho: np.ndarray) -> np.ndarray:
    rho = hb.as_operator(rho, p.system_dim)
    return p.u @ hb.tensor(rho, p.rho0) @ p.u.conj().T


def _ancilla_projector(p: MeasuringProcess, subset: Iterable[float]) -> np.ndarray:
    proj = np.zeros((p.ancilla_dim, p.ancilla_dim), dtype=complex)
    for m in set(float(x) for x in subset):
        proj += p.meter_projector(m)
    return hb.tensor(np.eye(p.system_dim), proj)


def model_instrument(p: MeasuringProcess, subset: Iterable[float], rho: np.ndarray) -> np.ndarray:
    """``Tr_K[(I (x) E^M(D)) U (rho (x) rho0) U^dag]``."""
    return hb.partial_trace_ancilla(_ancilla_projector(p, subset) @ _evolve(p, rho), p.ancilla_dim)


def model_probability(p: MeasuringProcess, subset: Iterable[float], rho) -> float:
    rho = hb.density_operator(rho)
    return float(np.trace(_ancilla_projector(p, subset) @ _evolve(p, rho)).real)


def model_tpcp(p: MeasuringProcess, rho: np.ndarray) -> np.ndarray:
    return hb.partial_trace_ancilla(_evolve(p, rho), p.ancilla_dim)


def model_dual(p: MeasuringProcess, a: np.ndarray) -> np.ndarray:
    """``Tr_K[U^dag (A (x) I) U (I (x) rho0)]``."""
    a = hb.as_operator(a, p.system_dim)
    heis = p.u.conj().T @ hb.tensor(a, np.eye(p.ancilla_dim)) @ p.u
    return hb.partial_trace_ancilla(heis @ hb.tensor(np.eye(p.system_dim), p.rho0), p.ancilla_dim)


def model_pom(p: MeasuringProcess) -> Pom:
    """Effects ``<xi| U^dag (I (x) E^M_m) U |xi>_K``."""
    effects = []
    for m in p.meter.eigenvalues:
        heis = p.u.conj().T @ _ancilla_projector(p, [m]) @ p.u
        effects.append((m, hb.partial_inner(heis, p.xi)))
    return Pom(effects)


def noise_operators(p: MeasuringProcess, a, b) -> DilatedNoiseOperators:
    """``N_A = U^dag (I (x) M) U - A (x) I`` and ``D_B = U^dag (B (x) I) U - B (x) I``."""
    a = hb.as_operator(a, p.system_dim)
    b = hb.as_operator(b, p.system_dim)
    ik = np.eye(p.ancilla_dim)
    b_big = hb.tensor(b, ik)
    n_op = p.posterior_meter() - hb.tensor(a, ik)
    d_op = p.u.conj().T @ b_big @ p.u - b_big
    return DilatedNoiseOperators(n_op, d_op)


def _rms(op: np.ndarray, v: np.ndarray) -> float:
    return float(np.sqrt(max(np.vdot(v, op @ (op @ v)).real, 0.0)))


def model_epsilon(p: MeasuringProcess, a, psi: np.ndarray) -> float:
    """``<N_A^2>^(1/2)`` in the state ``psi (x) xi``."""
    a = hb.as_operator(a, p.system_dim)
    n_op = p.posterior_meter() - hb.tensor(a, np.eye(p.ancilla_dim))
    return _rms(n_op, np.kron(psi, p.xi))


def model_eta(p: MeasuringProcess, b, psi: np.ndarray) -> float:
    """``<D_B^2>^(1/2)`` in the state ``psi (x) xi``."""
    b = hb.as_operator(b, p.system_dim)
    b_big = hb.tensor(b, np.eye(p.ancilla_dim))
    d_op = p.u.conj().T @ b_big @ p.u - b_big
    return _rms(d_op, np.kron(psi, p.xi))


def model_mean_noise_operator(p: MeasuringProcess, a) -> np.ndarray:
    """``Tr_K[N_A (I (x) rho0)]``."""
    n_op = noise_operators(p, a, np.zeros((p.system_dim, p.system_dim))).n_op
    return hb.partial_trace_ancilla(n_op @ hb.tensor(np.eye(p.system_dim), p.rho0), p.ancilla_dim)


def model_mean_disturbance_operator(p: MeasuringProcess, b) -> np.ndarray:
    d_op = noise_operators(p, np.zeros((p.system_dim, p.system_dim)), b).d_op
    return hb.partial_trace_ancilla(d_op @ hb.tensor(np.eye(p.system_dim), p.rho0), p.ancilla_dim)


# ---------------------------------------------------------------------------
# realization checks
# ---------------------------------------------------------------------------

def verify_realization(p: MeasuringProcess, f: MeasurementFamily) -> float:
    """Largest deviation from ``M_m rho M_m^dag = Tr_K[(I (x) E_m) U (rho (x) rho0) U^dag]``.

    Checked on every matrix unit ``|i><j|`` (the identity is linear in
    ``rho``), together with the POM identity for every outcome.
    """
    if p.system_dim != f.dim:
        raise DimensionMismatch(f"process acts on dimension {p.system_dim}, family on {f.dim}")
    if not set(f.labels) <= set(p.meter.eigenvalues):
        raise LabelMismatch(f"meter eigenvalues {p.meter.eigenvalues} do not cover {f.labels}")
    d = f.dim
    worst = 0.0
    pom = model_pom(p)
    for m, op in f:
        for i in range(d):
            for j in range(d):
                unit = np.zeros((d, d), dtype=complex)
                unit[i, j] = 1.0
                lhs = op @ unit @ op.conj().T
                rhs = model_instrument(p, [m], unit)
                worst = max(worst, hb.operator_norm(lhs - rhs))
        worst = max(worst, hb.operator_norm(op.conj().T @ op - pom.effect(m)))
    return worst


def realize_pom(pom: Pom) -> MeasuringProcess:
    """Process whose POM is ``pom``, via the square-root family ``M_m = Pi_m^(1/2)``."""
    family = MeasurementFamily((m, hb.psd_sqrt(e)) for m, e in pom)
    return dilate(family)


def realize_tpcp(t: TpcpMap) -> MeasuringProcess:
    """Process whose nonselective reduction is ``t``; outcomes are labelled 1..k."""
    family = MeasurementFamily((i + 1, op) for i, op in enumerate(t.kraus))
    return dilate(family)
