"""Measurement-operator families and the objects derived from them.

A family ``{M_m}`` assigns one operator to each real outcome label and
satisfies ``sum_m M_m^dag M_m = I``.  It determines the POM
``Pi_m = M_m^dag M_m``, the discrete CP instrument
``I({m}) rho = M_m rho M_m^dag`` and the nonselective reduction
``T rho = sum_m M_m rho M_m^dag``.
"""

from __future__ import annotations

from typing import Iterable, Sequence

import numpy as np

from . import hilbert as hb
from .errors import (
    CompletenessViolated,
    DimensionMismatch,
    UnknownLabel,
    ZeroProbability,
)
from .hilbert import TOL


def _stack(ops: Iterable, dim: int | None = None) -> np.ndarray:
    arrays = [hb.as_operator(o, dim) for o in ops]
    if not arrays:
        raise ValueError("need at least one operator")
    d = arrays[0].shape[0]
    for a in arrays:
        if a.shape != (d, d):
            raise DimensionMismatch("operators of different dimensions")
    return np.stack(arrays)


def _completeness_defect(ops: np.ndarray) -> float:
    s = np.einsum("kji,kjl->il", ops.conj(), ops)
    return float(np.linalg.norm(s - np.eye(ops.shape[1]), 2))


class MeasurementFamily:
    """Finite family of measurement operators with distinct real labels.

    Outcomes are stored in ascending label order.
    """

    def __init__(self, outcomes: Iterable[tuple[float, np.ndarray]], tol: float = TOL.completeness):
        pairs = sorted(((float(m), op) for m, op in outcomes), key=lambda p: p[0])
        labels = tuple(m for m, _ in pairs)
        if len(set(labels)) != len(labels):
            raise ValueError(f"outcome labels are not distinct: {labels}")
        ops = _stack(op for _, op in pairs)
        defect = _completeness_defect(ops)
        if defect > tol:
            raise CompletenessViolated(f"sum M^dag M deviates from I by {defect:.3e}")
        self.labels = labels
        self.ops = ops
        self.ops.setflags(write=False)

    @property
    def dim(self) -> int:
        return self.ops.shape[1]

    def __len__(self) -> int:
        return len(self.labels)

    def __iter__(self):
        return iter(zip(self.labels, self.ops))

    def __repr__(self) -> str:
        return f"MeasurementFamily(dim={self.dim}, labels={self.labels})"

    def index(self, label: float) -> int:
        try:
            return self.labels.index(float(label))
        except ValueError:
            raise UnknownLabel(f"label {label!r} not among {self.labels}") from None

    def operator(self, label: float) -> np.ndarray:
        return self.ops[self.index(label)]


class Pom:
    """Probability operator-valued measure on finitely many real outcomes."""

    def __init__(self, effects: Iterable[tuple[float, np.ndarray]], tol: float = TOL.completeness):
        pairs = sorted(((float(m), e) for m, e in effects), key=lambda p: p[0])
        labels = tuple(m for m, _ in pairs)
        if len(set(labels)) != len(labels):
            raise ValueError(f"effect labels are not distinct: {labels}")
        effects_arr = _stack(e for _, e in pairs)
        for m, e in zip(labels, effects_arr):
            if not hb.is_positive_semidefinite(e, tol):
                raise ValueError(f"effect for outcome {m} is not positive semidefinite")
        total = effects_arr.sum(axis=0)
        defect = float(np.linalg.norm(total - np.eye(total.shape[0]), 2))
        if defect > tol:
            raise CompletenessViolated(f"effects sum to I only within {defect:.3e}")
        self.labels = labels
        self.effects = effects_arr

    @property
    def dim(self) -> int:
        return self.effects.shape[1]

    def __iter__(self):
        return iter(zip(self.labels, self.effects))

    def __repr__(self) -> str:
        return f"Pom(dim={self.dim}, labels={self.labels})"

    def effect(self, label: float) -> np.ndarray:
        try:
            return self.effects[self.labels.index(float(label))]
        except ValueError:
            raise UnknownLabel(f"label {label!r} not among {self.labels}") from None

    def first_moment(self) -> np.ndarray:
        return np.einsum("k,kij->ij", np.asarray(self.labels), self.effects)

    def probabilities(self, rho: np.ndarray) -> np.ndarray:
        rho = hb.density_operator(rho)
        return np.einsum("kij,ji->k", self.effects, rho).real


class TpcpMap:
    """Trace-preserving CP map given by Kraus operators."""

    def __init__(self, kraus: Iterable[np.ndarray], tol: float = TOL.completeness):
        ops = _stack(kraus)
        defect = _completeness_defect(ops)
        if defect > tol:
            raise CompletenessViolated(f"Kraus operators are not trace preserving ({defect:.3e})")
        self.kraus = ops

    @property
    def dim(self) -> int:
        return self.kraus.shape[1]

    def apply(self, rho: np.ndarray) -> np.ndarray:
        rho = hb.as_operator(rho, self.dim)
        return np.einsum("kij,jl,kml->im", self.kraus, rho, self.kraus.conj())

    def apply_dual(self, b: np.ndarray) -> np.ndarray:
        return apply_dual(self, b)


class Instrument:
    """Discrete CP instrument ``I(D) rho = sum_{m in D} M_m rho M_m^dag``."""

    def __init__(self, family: MeasurementFamily):
        self.family = family

    def apply(self, subset: Iterable[float], rho: np.ndarray) -> np.ndarray:
        f = self.family
        rho = hb.as_operator(rho, f.dim)
        idx = _subset_indices(f, subset)
        ops = f.ops[idx]
        return np.einsum("kij,jl,kml->im", ops, rho, ops.conj())

    def total(self) -> TpcpMap:
        return tpcp_of(self.family)


class JointFamily:
    """Two-parameter family ``{M_(a,b)}`` with ``sum M^dag M = I``."""

    def __init__(self, outcomes: Iterable[tuple[tuple[float, float], np.ndarray]], tol: float = TOL.completeness):
        pairs = sorted(
            (((float(ab[0]), float(ab[1])), op) for ab, op in outcomes), key=lambda p: p[0]
        )
        labels = tuple(ab for ab, _ in pairs)
        if len(set(labels)) != len(labels):
            raise ValueError("joint outcome labels are not distinct")
        ops = _stack(op for _, op in pairs)
        defect = _completeness_defect(ops)
        if defect > tol:
            raise CompletenessViolated(f"sum M^dag M deviates from I by {defect:.3e}")
        self.labels = labels
        self.ops = ops

    @property
    def dim(self) -> int:
        return self.ops.shape[1]

    @property
    def a_labels(self) -> np.ndarray:
        return np.array([ab[0] for ab in self.labels])

    @property
    def b_labels(self) -> np.ndarray:
        return np.array([ab[1] for ab in self.labels])

    def __iter__(self):
        return iter(zip(self.labels, self.ops))

    def __repr__(self) -> str:
        return f"JointFamily(dim={self.dim}, outcomes={len(self.labels)})"


# ---------------------------------------------------------------------------
# constructions
# ---------------------------------------------------------------------------

def projective_family(a) -> MeasurementFamily:
    """Family of spectral projectors of an observable."""
    obs = hb.spectral(a)
    return MeasurementFamily(zip(obs.eigenvalues, obs.projectors))


def identity_family(dim: int, label: float = 1.0) -> MeasurementFamily:
    return MeasurementFamily([(label, np.eye(dim))])


def pom_of(f: MeasurementFamily) -> Pom:
    return Pom((m, op.conj().T @ op) for m, op in f)


def tpcp_of(f: MeasurementFamily) -> TpcpMap:
    return TpcpMap(f.ops)


def apply_dual(t: TpcpMap, b: np.ndarray) -> np.ndarray:
    """Heisenberg-picture map ``T* B = sum_j L_j^dag B L_j``."""
    b = hb.as_operator(b, t.dim)
    k = t.kraus
    return np.einsum("kji,jl,klm->im", k.conj(), b, k)


def _subset_indices(f, subset: Iterable[float]) -> list[int]:
    return sorted({f.index(m) for m in subset})


def outcome_probability(f: MeasurementFamily, subset: Iterable[float], state) -> float:
    """Probability that the outcome lies in ``subset``.

    Round-off negatives down to ``-1e-12`` are clamped; anything below is an error.
    """
    rho = hb.density_operator(state)
    if rho.shape[0] != f.dim:
        raise DimensionMismatch(f"state dimension {rho.shape[0]} vs family dimension {f.dim}")
    idx = _subset_indices(f, subset)
    ops = f.ops[idx]
    p = float(np.einsum("kji,kjl,li->", ops.conj(), ops, rho).real) if idx else 0.0
    slack = TOL.probability_clamp
    if p < -slack or p > 1 + slack:
        raise ValueError(f"probability {p!r} outside [0, 1]")
    return min(max(p, 0.0), 1.0)


def post_state(f: MeasurementFamily, subset: Iterable[float], state) -> np.ndarray:
    """Conditional output state given the outcome lies in ``subset``."""
    subset = list(subset)
    p = outcome_probability(f, subset, state)
    if p <= TOL.zero_probability:
        raise ZeroProbability(f"outcome set {subset} has probability {p:.3e}")
    rho = hb.density_operator(state)
    out = Instrument(f).apply(subset, rho)
    out = out / np.trace(out).real
    return (out + out.conj().T) / 2


def marginals(j: JointFamily) -> tuple[Pom, Pom]:
    effects = np.einsum("kji,kjl->kil", j.ops.conj(), j.ops)
    out = []
    for axis_labels in (j.a_labels, j.b_labels):
        values = sorted(set(axis_labels.tolist()))
        out.append(Pom((v, effects[axis_labels == v].sum(axis=0)) for v in values))
    return out[0], out[1]


def joint_unbiasedness_residual(j: JointFamily, a, b) -> tuple[float, float]:
    """Operator-norm distances of the marginal first moments from ``A`` and ``B``."""
    pa, pb = marginals(j)
    a_op = hb.as_operator(a, j.dim)
    b_op = hb.as_operator(b, j.dim)
    return (
        hb.operator_norm(pa.first_moment() - a_op),
        hb.operator_norm(pb.first_moment() - b_op),
    )


# ---------------------------------------------------------------------------
# random and named constructions
# ---------------------------------------------------------------------------

def random_kraus(dim: int, outcomes: int, rng: np.random.Generator) -> np.ndarray:
    """Slice a Haar-random isometry ``C^d -> C^d (x) C^k`` into ``k`` Kraus blocks."""
    v = hb.random_isometry(dim * outcomes, dim, rng)
    return v.reshape(outcomes, dim, dim)


def random_family(
    dim: int,
    outcomes: int,
    rng: np.random.Generator,
    labels: Sequence[float] | None = None,
) -> MeasurementFamily:
    if labels is None:
        labels = rng.standard_normal(outcomes)
    return MeasurementFamily(zip(labels, random_kraus(dim, outcomes, rng)))


def random_joint_family(
    dim: int, a_outcomes: int, b_outcomes: int, rng: np.random.Generator
) -> JointFamily:
    ops = random_kraus(dim, a_outcomes * b_outcomes, rng)
    a_vals = rng.standard_normal(a_outcomes)
    b_vals = rng.standard_normal(b_outcomes)
    labels = [(a, b) for a in a_vals for b in b_vals]
    return JointFamily(zip(labels, ops))


def unsharp_product_family(
    a_effects: Pom, b_effects: Pom, a_scale: float = 1.0, b_scale: float = 1.0
) -> JointFamily:
    """Joint family ``M_(a,b) = sqrt(Pi^A_a) sqrt(Pi^B_b)`` with stretched labels.

    The B marginal reproduces ``b_effects`` exactly; the A marginal is the
    ``b_effects``-smeared version of ``a_effects``.
    """
    if a_effects.dim != b_effects.dim:
        raise DimensionMismatch("effects act on different spaces")
    roots_a = [hb.psd_sqrt(e) for e in a_effects.effects]
    roots_b = [hb.psd_sqrt(e) for e in b_effects.effects]
    outcomes = []
    for a, ra in zip(a_effects.labels, roots_a):
        for b, rb in zip(b_effects.labels, roots_b):
            outcomes.append(((a_scale * a, b_scale * b), ra @ rb))
    return JointFamily(outcomes)


def unbiased_zx_family(sharpness_z: float = 1.0, sharpness_x: float = 2 ** -0.5) -> JointFamily:
    """Jointly unbiased joint measurement of ``(Z, X)`` on a qubit.

    Starts from unsharp effects ``(I +- lz Z)/2`` and ``(I +- lx X)/2``,
    forms the square-root product family and rescales both label axes so
    the marginal first moments equal ``Z`` and ``X``.  The scale factors
    are read off the unit-label first moments numerically.
    """
    if not 0 < sharpness_x < 1 or not 0 < sharpness_z <= 1:
        raise ValueError("sharpness_x must lie in (0, 1) and sharpness_z in (0, 1]")
    z, x, i2 = hb.PAULI_Z, hb.PAULI_X, hb.PAULI_I
    pom_z = Pom([(-1, (i2 - sharpness_z * z) / 2), (1, (i2 + sharpness_z * z) / 2)])
    pom_x = Pom([(-1, (i2 - sharpness_x * x) / 2), (1, (i2 + sharpness_x * x) / 2)])
    trial = unsharp_product_family(pom_z, pom_x)
    pa, pb = marginals(trial)
    a_scale = 2.0 / np.trace(pa.first_moment() @ z).real
    b_scale = 2.0 / np.trace(pb.first_moment() @ x).real
    return unsharp_product_family(pom_z, pom_x, a_scale, b_scale)
