"""Dense linear algebra on finite-dimensional Hilbert spaces.

Operators are plain complex ``numpy`` arrays of shape ``(d, d)`` and kets
are unit-norm complex vectors of shape ``(d,)``.  Composite spaces use the
system-major Kronecker convention: the basis vector ``|i>|k>`` of
``H (x) K`` sits at index ``i * dim(K) + k``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import DimensionMismatch, NotHermitian


@dataclass(frozen=True)
class Tolerances:
    """Numerical tolerances shared by every module."""

    norm: float = 1e-10
    hermitian: float = 1e-10
    psd: float = 1e-10
    trace: float = 1e-10
    completeness: float = 1e-10
    degeneracy: float = 1e-8
    projector: float = 1e-9
    reconstruction: float = 1e-9
    real_part: float = 1e-12
    probability_clamp: float = 1e-12
    zero_probability: float = 1e-12
    orthogonality: float = 1e-9
    unbiasedness: float = 1e-8
    hypothesis: float = 1e-9
    sigma_floor: float = 1e-9
    numeric_slack: float = 1e-9


TOL = Tolerances()


# ---------------------------------------------------------------------------
# constructors and predicates
# ---------------------------------------------------------------------------

def ket(amplitudes: Sequence[complex] | np.ndarray, normalize: bool = True) -> np.ndarray:
    """Return a unit-norm state vector.

    Zero vectors are rejected.  With ``normalize=False`` the input must
    already have unit norm within ``TOL.norm``.
    """
    v = np.asarray(amplitudes, dtype=complex).reshape(-1)
    if v.size == 0:
        raise ValueError("ket needs at least one amplitude")
    n = np.linalg.norm(v)
    if n < TOL.norm:
        raise ValueError("cannot build a ket from the zero vector")
    if normalize:
        return v / n
    if abs(n - 1.0) > TOL.norm:
        raise ValueError(f"ket norm is {n!r}, expected 1")
    return v


def basis_ket(dim: int, index: int) -> np.ndarray:
    v = np.zeros(dim, dtype=complex)
    v[index] = 1.0
    return v


def as_operator(x, dim: int | None = None) -> np.ndarray:
    a = np.asarray(getattr(x, "op", x), dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionMismatch(f"expected a square matrix, got shape {a.shape}")
    if dim is not None and a.shape[0] != dim:
        raise DimensionMismatch(f"expected dimension {dim}, got {a.shape[0]}")
    return a


def is_hermitian(x: np.ndarray, tol: float = TOL.hermitian) -> bool:
    x = as_operator(x)
    return bool(np.max(np.abs(x - x.conj().T), initial=0.0) <= tol)


def is_unitary(x: np.ndarray, tol: float = TOL.norm) -> bool:
    x = as_operator(x)
    return bool(np.linalg.norm(x.conj().T @ x - np.eye(x.shape[0]), 2) <= tol)


def is_positive_semidefinite(x: np.ndarray, tol: float = TOL.psd) -> bool:
    x = as_operator(x)
    if not is_hermitian(x, tol):
        return False
    return bool(np.linalg.eigvalsh((x + x.conj().T) / 2).min() >= -tol)


def density_operator(x, tol: float = TOL.trace) -> np.ndarray:
    """Validate a density operator; a 1-D input is taken as a pure state."""
    x = np.asarray(x, dtype=complex)
    if x.ndim == 1:
        psi = ket(x)
        return np.outer(psi, psi.conj())
    x = as_operator(x)
    if not is_hermitian(x, tol):
        raise NotHermitian("density operator is not Hermitian")
    if not is_positive_semidefinite(x, tol):
        raise ValueError("density operator has negative eigenvalues")
    if abs(np.trace(x) - 1.0) > tol:
        raise ValueError(f"density operator has trace {np.trace(x).real!r}")
    return x


# ---------------------------------------------------------------------------
# elementary operations
# ---------------------------------------------------------------------------

def tensor(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Kronecker product, system index major."""
    return np.kron(np.asarray(x, dtype=complex), np.asarray(y, dtype=complex))


def partial_trace_ancilla(x: np.ndarray, dim_k: int) -> np.ndarray:
    """Trace out the ancilla (minor) factor of an operator on ``H (x) K``."""
    x = as_operator(x)
    if dim_k < 1 or x.shape[0] % dim_k:
        raise DimensionMismatch(
            f"dimension {x.shape[0]} is not divisible by ancilla dimension {dim_k}"
        )
    d = x.shape[0] // dim_k
    return np.einsum("ikjk->ij", x.reshape(d, dim_k, d, dim_k))


def partial_inner(x: np.ndarray, xi: np.ndarray) -> np.ndarray:
    """Partial matrix element ``<xi| x |xi>_K`` over the ancilla factor."""
    x = as_operator(x)
    xi = np.asarray(xi, dtype=complex)
    k = xi.shape[0]
    if x.shape[0] % k:
        raise DimensionMismatch("ancilla vector does not fit the operator")
    d = x.shape[0] // k
    return np.einsum("k,ikjl,l->ij", xi.conj(), x.reshape(d, k, d, k), xi)


def commutator(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    a, b = as_operator(a), as_operator(b)
    if a.shape != b.shape:
        raise DimensionMismatch(f"cannot commute {a.shape} with {b.shape}")
    return a @ b - b @ a


def operator_norm(b: np.ndarray) -> float:
    """Largest singular value."""
    return float(np.linalg.norm(as_operator(b), 2))


def expectation(a: np.ndarray, psi: np.ndarray) -> complex:
    a = as_operator(a)
    psi = np.asarray(psi, dtype=complex)
    if psi.shape != (a.shape[0],):
        raise DimensionMismatch(f"state of length {psi.shape[0]} vs operator {a.shape}")
    return complex(np.vdot(psi, a @ psi))


def real_expectation(a: np.ndarray, psi: np.ndarray, tol: float = 1e-9) -> float:
    """Expectation of a Hermitian operator; the imaginary part must vanish."""
    value = expectation(a, psi)
    if abs(value.imag) > tol * max(1.0, abs(value.real)):
        raise NotHermitian(f"expectation has imaginary part {value.imag!r}")
    return value.real


def psd_sqrt(x: np.ndarray, tol: float = TOL.psd) -> np.ndarray:
    """Positive square root of a positive semidefinite operator."""
    x = as_operator(x)
    if not is_positive_semidefinite(x, tol):
        raise ValueError("operator is not positive semidefinite")
    w, v = np.linalg.eigh((x + x.conj().T) / 2)
    return (v * np.sqrt(np.clip(w, 0.0, None))) @ v.conj().T


# ---------------------------------------------------------------------------
# observables
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class Observable:
    """Hermitian operator together with its spectral projectors.

    ``eigenvalues`` are distinct and ascending; ``projectors[i]`` is the
    projector onto the eigenspace of ``eigenvalues[i]``.
    """

    op: np.ndarray
    eigenvalues: tuple[float, ...]
    projectors: tuple[np.ndarray, ...] = field(repr=False)

    @property
    def dim(self) -> int:
        return self.op.shape[0]

    def reconstruct(self) -> np.ndarray:
        return sum(m * e for m, e in zip(self.eigenvalues, self.projectors))


def spectral(a, degeneracy_tol: float = TOL.degeneracy) -> Observable:
    """Spectral decomposition with eigenvalues merged within ``degeneracy_tol``."""
    if isinstance(a, Observable):
        return a
    a = as_operator(a)
    if not is_hermitian(a, TOL.hermitian):
        raise NotHermitian("spectral decomposition needs a Hermitian operator")
    h = (a + a.conj().T) / 2
    w, v = np.linalg.eigh(h)
    groups: list[list[int]] = []
    for i, value in enumerate(w):
        if groups and value - w[groups[-1][0]] <= degeneracy_tol:
            groups[-1].append(i)
        else:
            groups.append([i])
    eigenvalues = []
    projectors = []
    for g in groups:
        cols = v[:, g]
        eigenvalues.append(float(np.mean(w[g])))
        projectors.append(cols @ cols.conj().T)
    return Observable(h, tuple(eigenvalues), tuple(projectors))


# ---------------------------------------------------------------------------
# standard operators
# ---------------------------------------------------------------------------

PAULI_I = np.eye(2, dtype=complex)
PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)


# ---------------------------------------------------------------------------
# seeded sampling
# ---------------------------------------------------------------------------

def rng_stream(seed: int, *keys: int) -> np.random.Generator:
    """Independent generator for ``(seed, *keys)``.

    Streams depend only on their key, never on which worker draws them.
    """
    return np.random.Generator(
        np.random.PCG64(np.random.SeedSequence(seed, spawn_key=tuple(keys)))
    )


def ginibre(rows: int, cols: int, rng: np.random.Generator) -> np.ndarray:
    return (rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols))) / np.sqrt(2)


def haar_random_ket(dim: int, rng: np.random.Generator) -> np.ndarray:
    if dim < 1:
        raise ValueError("dimension must be positive")
    return ket(ginibre(dim, 1, rng)[:, 0])


def random_isometry(rows: int, cols: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random isometry ``C^cols -> C^rows`` (QR with phase fixing)."""
    if rows < cols:
        raise ValueError("an isometry needs rows >= cols")
    q, r = np.linalg.qr(ginibre(rows, cols, rng))
    d = np.diag(r)
    return q * (d / np.abs(d))


def random_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    if dim < 1:
        raise ValueError("dimension must be positive")
    return random_isometry(dim, dim, rng)


def random_hermitian(dim: int, rng: np.random.Generator) -> np.ndarray:
    g = ginibre(dim, dim, rng)
    return (g + g.conj().T) / 2
