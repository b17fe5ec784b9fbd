"""
Quantum State Core
==================

Minimal complex linear algebra for the polarization (p) and OAM (o) qubits
of a single photon and for their four-dimensional spin-orbit product.

Basis ordering is global and fixed, polarization slot first:

    dim 2: |+1>, |-1>
    dim 4: |+1>_p|+1>_o, |+1>_p|-1>_o, |-1>_p|+1>_o, |-1>_p|-1>_o

Circular polarization is identified with the SAM eigenstates,
|L>_p = |+1>_p and |R>_p = |-1>_p.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import List, Sequence, Union

import numpy as np

from .errors import (
    InvalidDimensionError, NonPhysicalError, NormalizationError, NotAProjectorError,
)

logger = logging.getLogger(__name__)


NORM_TOLERANCE = 1e-12
HERMITIAN_TOLERANCE = 1e-12
TRACE_TOLERANCE = 1e-12
PSD_TOLERANCE = 1e-10
PROJECTOR_TOLERANCE = 1e-10
CLAMP_TOLERANCE = 1e-10
PHASE_TOLERANCE = 1e-10

QUBIT_BASIS = ('|+1>', '|-1>')
SPIN_ORBIT_BASIS = (
    '|+1>_p|+1>_o',
    '|+1>_p|-1>_o',
    '|-1>_p|+1>_o',
    '|-1>_p|-1>_o',
)

ArrayLike = Union[np.ndarray, Sequence[complex]]


class Slot(str, Enum):
    """Tensor factor of the spin-orbit space"""
    POLARIZATION = 'polarization'
    OAM = 'oam'


def basis_label(dim: int) -> tuple:
    if dim == 2:
        return QUBIT_BASIS
    if dim == 4:
        return SPIN_ORBIT_BASIS
    raise InvalidDimensionError(f"Unsupported Hilbert-space dimension {dim}; expected 2 or 4")


@dataclass(frozen=True, eq=False)
class StateVector:
    """Normalized amplitude vector over the global basis ordering"""
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.array(self.amplitudes, dtype=complex).reshape(-1)
        basis_label(amps.size)
        norm_sq = float(np.vdot(amps, amps).real)
        if abs(norm_sq - 1.0) > NORM_TOLERANCE:
            raise NormalizationError(f"State norm^2 is {norm_sq!r}, expected 1")
        amps.setflags(write=False)
        object.__setattr__(self, 'amplitudes', amps)

    @property
    def dim(self) -> int:
        return int(self.amplitudes.size)

    @property
    def basis_label(self) -> tuple:
        return basis_label(self.dim)

    @classmethod
    def from_amplitudes(cls, amplitudes: ArrayLike) -> 'StateVector':
        """Build a state, normalizing the given amplitudes"""
        amps = np.asarray(amplitudes, dtype=complex).reshape(-1)
        norm = np.linalg.norm(amps)
        if norm == 0.0 or not np.isfinite(norm):
            raise NormalizationError("Cannot normalize a zero or non-finite amplitude vector")
        return cls(amps / norm)

    @classmethod
    def basis(cls, index: int, dim: int) -> 'StateVector':
        amps = np.zeros(dim, dtype=complex)
        amps[index] = 1.0
        return cls(amps)

    def inner(self, other: 'StateVector') -> complex:
        """<self|other>"""
        if self.dim != other.dim:
            raise InvalidDimensionError(f"Inner product of dim {self.dim} with dim {other.dim}")
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def __repr__(self):
        amps = ', '.join(f"{a.real:+.4f}{a.imag:+.4f}j" for a in self.amplitudes)
        return f"StateVector(dim={self.dim}, [{amps}])"


def _amplitudes(s: Union[StateVector, ArrayLike]) -> np.ndarray:
    if isinstance(s, StateVector):
        return s.amplitudes
    return np.asarray(s, dtype=complex).reshape(-1)


def tensor_amplitudes(a: Union[StateVector, ArrayLike], b: Union[StateVector, ArrayLike]) -> np.ndarray:
    """Unnormalized Kronecker product a_j * b_k, polarization slot first."""
    amps_a, amps_b = _amplitudes(a), _amplitudes(b)
    if amps_a.size != 2 or amps_b.size != 2:
        raise InvalidDimensionError(
            f"tensor expects two qubit vectors, got dims {amps_a.size} and {amps_b.size}"
        )
    return np.kron(amps_a, amps_b)


def tensor(a: Union[StateVector, ArrayLike], b: Union[StateVector, ArrayLike]) -> StateVector:
    """Spin-orbit product state |a>_p |b>_o"""
    return StateVector.from_amplitudes(tensor_amplitudes(a, b))


def projector(s: Union[StateVector, ArrayLike]) -> np.ndarray:
    """Rank-1 projector |s><s|; unnormalized input is rejected."""
    amps = _amplitudes(s)
    norm_sq = float(np.vdot(amps, amps).real)
    if abs(norm_sq - 1.0) > NORM_TOLERANCE:
        raise NormalizationError(f"Projector requested for a state with norm^2 {norm_sq!r}")
    return np.outer(amps, amps.conj())


def overlap(a: StateVector, b: StateVector) -> float:
    """|<a|b>|^2, insensitive to global phase"""
    return abs(a.inner(b)) ** 2


def states_equal(a: StateVector, b: StateVector, tol: float = PHASE_TOLERANCE) -> bool:
    return a.dim == b.dim and overlap(a, b) >= 1.0 - tol


@dataclass
class PhysicalityDiagnostics:
    """Which density-operator invariant failed, and by how much"""
    shape: tuple
    hermitian_error: float = 0.0
    trace_error: float = 0.0
    min_eigenvalue: float = 0.0
    failures: List[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures

    def summary(self) -> str:
        if self.ok:
            return "physical"
        parts = []
        for failure in self.failures:
            if failure == 'shape':
                parts.append(f"not a square 2x2/4x4 matrix (shape {self.shape})")
            elif failure == 'hermitian':
                parts.append(f"non-Hermitian by {self.hermitian_error:.3e}")
            elif failure == 'trace':
                parts.append(f"trace off by {self.trace_error:.3e}")
            elif failure == 'psd':
                parts.append(f"negative eigenvalue {self.min_eigenvalue:.3e} (margin {PSD_TOLERANCE:.0e})")
        return '; '.join(parts)


def diagnose(matrix: ArrayLike) -> PhysicalityDiagnostics:
    m = np.asarray(matrix, dtype=complex)
    diag = PhysicalityDiagnostics(shape=m.shape)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] not in (2, 4):
        diag.failures.append('shape')
        return diag

    diag.hermitian_error = float(np.max(np.abs(m - m.conj().T)))
    if diag.hermitian_error > HERMITIAN_TOLERANCE:
        diag.failures.append('hermitian')

    diag.trace_error = float(abs(np.trace(m) - 1.0))
    if diag.trace_error > TRACE_TOLERANCE:
        diag.failures.append('trace')

    diag.min_eigenvalue = float(np.min(np.linalg.eigvalsh(0.5 * (m + m.conj().T))))
    if diag.min_eigenvalue < -PSD_TOLERANCE:
        diag.failures.append('psd')
    return diag


@dataclass(frozen=True, eq=False)
class DensityOperator:
    """Hermitian, unit-trace, positive-semidefinite operator"""
    entries: np.ndarray

    def __post_init__(self):
        m = np.array(self.entries, dtype=complex)
        diag = diagnose(m)
        if not diag.ok:
            raise NonPhysicalError(f"Not a density operator: {diag.summary()}", diagnostics=diag)
        m.setflags(write=False)
        object.__setattr__(self, 'entries', m)

    @property
    def dim(self) -> int:
        return int(self.entries.shape[0])

    @classmethod
    def from_state(cls, s: StateVector) -> 'DensityOperator':
        return cls(projector(s))

    @classmethod
    def maximally_mixed(cls, dim: int) -> 'DensityOperator':
        return cls(np.eye(dim, dtype=complex) / dim)

    def purity(self) -> float:
        return float(np.trace(self.entries @ self.entries).real)


def validate_physical(rho: ArrayLike) -> Union[DensityOperator, PhysicalityDiagnostics]:
    """Return a DensityOperator, or the diagnostics explaining why not."""
    diag = diagnose(rho)
    if not diag.ok:
        logger.debug(f"Physicality check failed: {diag.summary()}")
        return diag
    return DensityOperator(rho)


def _as_density(rho: Union[DensityOperator, ArrayLike]) -> DensityOperator:
    if isinstance(rho, DensityOperator):
        return rho
    result = validate_physical(rho)
    if isinstance(result, PhysicalityDiagnostics):
        raise NonPhysicalError(f"Not a density operator: {result.summary()}", diagnostics=result)
    return result


def is_projector(matrix: np.ndarray, tol: float = PROJECTOR_TOLERANCE) -> bool:
    m = np.asarray(matrix, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        return False
    return bool(
        np.max(np.abs(m - m.conj().T)) <= tol
        and np.max(np.abs(m @ m - m)) <= tol
    )


def born_probability(rho: Union[DensityOperator, ArrayLike], proj: ArrayLike) -> float:
    """tr(rho P), clamped to [0, 1]"""
    rho = _as_density(rho)
    p = np.asarray(proj, dtype=complex)
    if p.shape != rho.entries.shape:
        raise InvalidDimensionError(f"Projector shape {p.shape} does not match state dim {rho.dim}")
    if not is_projector(p):
        raise NotAProjectorError("born_probability requires a Hermitian idempotent operator")

    value = float(np.trace(rho.entries @ p).real)
    if value < -CLAMP_TOLERANCE or value > 1.0 + CLAMP_TOLERANCE:
        raise NonPhysicalError(f"Born probability {value!r} outside [0, 1]")
    return min(max(value, 0.0), 1.0)


def _psd_sqrt(m: np.ndarray) -> np.ndarray:
    w, v = np.linalg.eigh(m)
    w = np.clip(w, 0.0, None)
    return (v * np.sqrt(w)) @ v.conj().T


def fidelity(rho: Union[DensityOperator, ArrayLike], sigma: Union[DensityOperator, ArrayLike]) -> float:
    """
    Uhlmann fidelity (tr sqrt(sqrt(rho) sigma sqrt(rho)))^2.

    When either argument is pure this is tr(rho sigma), which is evaluated
    directly.
    """
    rho, sigma = _as_density(rho), _as_density(sigma)
    if rho.dim != sigma.dim:
        raise InvalidDimensionError(f"Fidelity between dim {rho.dim} and dim {sigma.dim}")

    if sigma.purity() >= 1.0 - PHASE_TOLERANCE or rho.purity() >= 1.0 - PHASE_TOLERANCE:
        value = float(np.trace(rho.entries @ sigma.entries).real)
    else:
        root = _psd_sqrt(rho.entries)
        inner = root @ sigma.entries @ root
        eigs = np.clip(np.linalg.eigvalsh(0.5 * (inner + inner.conj().T)), 0.0, None)
        value = float(np.sum(np.sqrt(eigs)) ** 2)
    return min(max(value, 0.0), 1.0)


def partial_trace(rho: Union[DensityOperator, ArrayLike], keep: Slot) -> DensityOperator:
    """Reduced operator of the kept qubit"""
    rho = _as_density(rho)
    if rho.dim != 4:
        raise InvalidDimensionError(f"partial_trace expects a dim-4 operator, got dim {rho.dim}")
    t = rho.entries.reshape(2, 2, 2, 2)
    if Slot(keep) is Slot.POLARIZATION:
        reduced = np.einsum('ijkj->ik', t)
    else:
        reduced = np.einsum('ijik->jk', t)
    return DensityOperator(reduced)


def embed_operator(op: np.ndarray, slot: Slot) -> np.ndarray:
    """Lift a qubit operator to dim 4 by tensoring the identity on the other slot."""
    op = np.asarray(op, dtype=complex)
    if op.shape != (2, 2):
        raise InvalidDimensionError(f"Only qubit operators can be embedded, got shape {op.shape}")
    identity = np.eye(2, dtype=complex)
    if Slot(slot) is Slot.POLARIZATION:
        return np.kron(op, identity)
    return np.kron(identity, op)


@dataclass(frozen=True, eq=False)
class ProjectiveObservable:
    """Two-outcome qubit observable P+ - P-, acting on one slot of the spin-orbit space"""
    plus_projector: np.ndarray
    minus_projector: np.ndarray
    slot: Slot = Slot.POLARIZATION

    def __post_init__(self):
        plus = np.array(self.plus_projector, dtype=complex)
        minus = np.array(self.minus_projector, dtype=complex)
        for name, p in (('plus', plus), ('minus', minus)):
            if p.shape != (2, 2):
                raise InvalidDimensionError(f"{name} projector must be 2x2, got {p.shape}")
            if not is_projector(p, tol=NORM_TOLERANCE):
                raise NotAProjectorError(f"{name} projector is not idempotent and Hermitian")
            if abs(np.trace(p).real - 1.0) > NORM_TOLERANCE:
                raise NotAProjectorError(f"{name} projector is not rank 1")
        if np.max(np.abs(plus @ minus)) > NORM_TOLERANCE:
            raise NotAProjectorError("Outcome projectors are not mutually orthogonal")
        if np.max(np.abs(plus + minus - np.eye(2))) > NORM_TOLERANCE:
            raise NotAProjectorError("Outcome projectors do not resolve the identity")
        object.__setattr__(self, 'plus_projector', plus)
        object.__setattr__(self, 'minus_projector', minus)
        object.__setattr__(self, 'slot', Slot(self.slot))

    @classmethod
    def from_basis(cls, plus: StateVector, minus: StateVector, slot: Slot = Slot.POLARIZATION):
        return cls(projector(plus), projector(minus), slot)

    @property
    def operator(self) -> np.ndarray:
        return self.plus_projector - self.minus_projector

    def projector_for(self, outcome: int) -> np.ndarray:
        if outcome == +1:
            return self.plus_projector
        if outcome == -1:
            return self.minus_projector
        raise ValueError(f"Outcome must be +1 or -1, got {outcome!r}")

    def embedded(self, outcome: int = None) -> np.ndarray:
        """Dim-4 outcome projector, or the full dim-4 operator when no outcome is given."""
        if outcome is None:
            return embed_operator(self.operator, self.slot)
        return embed_operator(self.projector_for(outcome), self.slot)
