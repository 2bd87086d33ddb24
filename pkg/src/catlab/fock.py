"""Dense linear algebra on a truncated Fock space.

States and operators are frozen dataclasses around read-only numpy arrays.
Single-mode objects live on ``dim`` levels |0>..|dim-1>; two-mode objects on
``dim**2`` levels ordered row-major (mode 1 outer, mode 2 inner).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Union

import numpy as np

from .conventions import SQRT2
from .errors import DomainError, InvalidDimensionError, ShapeError

HERMITIAN_TOL = 1e-9
TRACE_TOL = 1e-9
EIGENVALUE_FLOOR = -1e-8


def _frozen(array: np.ndarray) -> np.ndarray:
    out = np.array(array, dtype=np.complex128, copy=True)
    out.setflags(write=False)
    return out


def _check_modes(dim: int, modes: int) -> None:
    if int(dim) != dim or dim < 2:
        raise InvalidDimensionError(f"dim must be an integer >= 2, got {dim}")
    if modes not in (1, 2):
        raise ShapeError(f"modes must be 1 or 2, got {modes}")


@dataclass(frozen=True)
class StateVector:
    """Pure state.  ``truncated_weight`` is the norm lost to the cutoff when
    the state was built from an infinite expansion."""

    amplitudes: np.ndarray
    dim: int
    modes: int = 1
    truncated_weight: float = 0.0

    def __post_init__(self):
        _check_modes(self.dim, self.modes)
        amps = _frozen(self.amplitudes).reshape(-1)
        if amps.size != self.dim**self.modes:
            raise ShapeError(
                f"expected {self.dim ** self.modes} amplitudes, got {amps.size}"
            )
        object.__setattr__(self, "amplitudes", amps)

    @property
    def size(self) -> int:
        return self.dim**self.modes

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def normalize(self) -> StateVector:
        n = self.norm()
        if n == 0.0:
            raise DomainError("cannot normalize the zero vector")
        return StateVector(self.amplitudes / n, self.dim, self.modes, self.truncated_weight)

    def inner(self, other: StateVector) -> complex:
        """<self|other>."""
        _same_shape(self, other)
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def to_density(self) -> DensityOperator:
        v = self.amplitudes
        return DensityOperator(np.outer(v, v.conj()), self.dim, self.modes, self.truncated_weight)

    def populations(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2


@dataclass(frozen=True)
class LinearOperator:
    matrix: np.ndarray
    dim: int
    modes: int = 1

    def __post_init__(self):
        _check_modes(self.dim, self.modes)
        m = _frozen(self.matrix)
        n = self.dim**self.modes
        if m.shape != (n, n):
            raise ShapeError(f"operator matrix must be {n}x{n}, got {m.shape}")
        object.__setattr__(self, "matrix", m)

    @property
    def size(self) -> int:
        return self.dim**self.modes

    def dag(self) -> LinearOperator:
        return LinearOperator(self.matrix.conj().T, self.dim, self.modes)

    def __matmul__(self, other):
        if isinstance(other, StateVector):
            _same_shape(self, other)
            return StateVector(self.matrix @ other.amplitudes, self.dim, self.modes)
        if isinstance(other, LinearOperator):
            _same_shape(self, other)
            return LinearOperator(self.matrix @ other.matrix, self.dim, self.modes)
        return NotImplemented

    def __add__(self, other: LinearOperator) -> LinearOperator:
        _same_shape(self, other)
        return LinearOperator(self.matrix + other.matrix, self.dim, self.modes)

    def __sub__(self, other: LinearOperator) -> LinearOperator:
        _same_shape(self, other)
        return LinearOperator(self.matrix - other.matrix, self.dim, self.modes)

    def __mul__(self, scalar: complex) -> LinearOperator:
        return LinearOperator(self.matrix * scalar, self.dim, self.modes)

    __rmul__ = __mul__


@dataclass(frozen=True)
class DensityOperator:
    """Mixed state.  Construction validates Hermiticity, unit trace and
    positivity at the module tolerances."""

    matrix: np.ndarray
    dim: int
    modes: int = 1
    truncated_weight: float = 0.0
    validate: bool = field(default=True, repr=False, compare=False)

    def __post_init__(self):
        _check_modes(self.dim, self.modes)
        m = _frozen(self.matrix)
        n = self.dim**self.modes
        if m.shape != (n, n):
            raise ShapeError(f"density matrix must be {n}x{n}, got {m.shape}")
        object.__setattr__(self, "matrix", m)
        if self.validate:
            check_density_matrix(m)

    @property
    def size(self) -> int:
        return self.dim**self.modes

    def trace(self) -> float:
        return float(np.trace(self.matrix).real)

    def populations(self) -> np.ndarray:
        return np.clip(np.diag(self.matrix).real, 0.0, None)


AnyState = Union[StateVector, DensityOperator]


def check_density_matrix(m: np.ndarray, *, hermitian_tol=HERMITIAN_TOL,
                         trace_tol=TRACE_TOL, eig_floor=EIGENVALUE_FLOOR) -> None:
    herm = np.max(np.abs(m - m.conj().T)) if m.size else 0.0
    if herm > hermitian_tol:
        raise DomainError(f"matrix is not Hermitian (max deviation {herm:.2e})")
    tr = np.trace(m)
    if abs(tr - 1.0) > trace_tol:
        raise DomainError(f"trace is {tr.real:.12g}, expected 1")
    lo = np.linalg.eigvalsh(0.5 * (m + m.conj().T))[0]
    if lo < eig_floor:
        raise DomainError(f"matrix is not positive semidefinite (min eigenvalue {lo:.2e})")


def _same_shape(a, b) -> None:
    if a.dim != b.dim or a.modes != b.modes:
        raise ShapeError(
            f"shape mismatch: dim={a.dim}, modes={a.modes} vs dim={b.dim}, modes={b.modes}"
        )


def as_density(state: AnyState) -> DensityOperator:
    if isinstance(state, StateVector):
        return state.to_density()
    if isinstance(state, DensityOperator):
        return state
    raise TypeError(f"expected a StateVector or DensityOperator, got {type(state).__name__}")


def density_from_matrix(m: np.ndarray, dim: int, modes: int = 1, *,
                        truncated_weight: float = 0.0) -> DensityOperator:
    """Symmetrise and renormalise a numerically computed density matrix."""
    m = 0.5 * (m + m.conj().T)
    tr = np.trace(m).real
    if tr <= 0:
        raise DomainError("density matrix has non-positive trace")
    return DensityOperator(m / tr, dim, modes, truncated_weight)


# Elementary operators


def ladder_operators(dim: int) -> tuple[LinearOperator, LinearOperator]:
    """Annihilation and creation operators on ``dim`` levels."""
    _check_modes(dim, 1)
    a = np.diag(np.sqrt(np.arange(1, dim, dtype=float)), 1)
    return LinearOperator(a, dim), LinearOperator(a.T, dim)


def number_operator(dim: int) -> LinearOperator:
    _check_modes(dim, 1)
    return LinearOperator(np.diag(np.arange(dim, dtype=float)), dim)


def identity(dim: int, modes: int = 1) -> LinearOperator:
    _check_modes(dim, modes)
    return LinearOperator(np.eye(dim**modes), dim, modes)


def quadrature_operator(dim: int, theta: float = 0.0) -> LinearOperator:
    """X_theta = (a e^{-i theta} + a^dag e^{i theta}) / sqrt(2)."""
    a, _ = ladder_operators(dim)
    m = a.matrix * np.exp(-1j * theta)
    return LinearOperator((m + m.conj().T) / SQRT2, dim)


def phase_rotation(dim: int, phi: float) -> LinearOperator:
    """exp(i phi n): maps a coherent state |alpha> to |alpha e^{i phi}>."""
    _check_modes(dim, 1)
    return LinearOperator(np.diag(np.exp(1j * phi * np.arange(dim))), dim)


def basis_state(dim: int, n: int) -> StateVector:
    if not 0 <= n < dim:
        raise InvalidDimensionError(f"level {n} outside 0..{dim - 1}")
    v = np.zeros(dim, dtype=complex)
    v[n] = 1.0
    return StateVector(v, dim)


def tensor_product(a, b):
    """Kronecker product of two single-mode states or operators (a = mode 1)."""
    if type(a) is not type(b):
        raise ShapeError("tensor_product operands must be of the same kind")
    if a.modes != 1 or b.modes != 1:
        raise ShapeError("tensor_product needs single-mode operands")
    if a.dim != b.dim:
        raise ShapeError(f"dimension mismatch {a.dim} vs {b.dim}")
    if isinstance(a, StateVector):
        return StateVector(np.kron(a.amplitudes, b.amplitudes), a.dim, 2,
                           1.0 - (1.0 - a.truncated_weight) * (1.0 - b.truncated_weight))
    if isinstance(a, DensityOperator):
        return DensityOperator(np.kron(a.matrix, b.matrix), a.dim, 2, validate=False)
    if isinstance(a, LinearOperator):
        return LinearOperator(np.kron(a.matrix, b.matrix), a.dim, 2)
    raise TypeError(f"unsupported operand {type(a).__name__}")


def partial_trace(rho: AnyState, keep: int) -> DensityOperator:
    """Reduce a two-mode state to mode ``keep`` (1 or 2)."""
    rho = as_density(rho)
    if rho.modes != 2:
        raise ShapeError("partial_trace needs a two-mode state")
    if keep not in (1, 2):
        raise ShapeError(f"keep must be 1 or 2, got {keep}")
    d = rho.dim
    t = rho.matrix.reshape(d, d, d, d)
    red = np.einsum("ijkj->ik", t) if keep == 1 else np.einsum("jijk->ik", t)
    return DensityOperator(0.5 * (red + red.conj().T), d, 1, rho.truncated_weight)


def expectation(op: LinearOperator, state: AnyState) -> complex:
    _same_shape(op, state)
    if isinstance(state, StateVector):
        v = state.amplitudes
        return complex(np.vdot(v, op.matrix @ v))
    return complex(np.trace(state.matrix @ op.matrix))


def variance(op: LinearOperator, state: AnyState) -> float:
    mean = expectation(op, state).real
    return expectation(op @ op, state).real - mean**2


def same_up_to_phase(psi: StateVector, phi: StateVector, tol: float = 1e-9) -> bool:
    """True when |<psi|phi>| is within ``tol`` of 1 (both normalised)."""
    _same_shape(psi, phi)
    return abs(abs(psi.normalize().inner(phi.normalize())) - 1.0) <= tol


def crop(state: AnyState, dim: int, *, renormalize: bool = True):
    """Restrict a single-mode state to the first ``dim`` levels."""
    if state.modes != 1:
        raise ShapeError("crop supports single-mode states only")
    if dim > state.dim:
        raise InvalidDimensionError(f"cannot crop dim {state.dim} up to {dim}")
    if isinstance(state, StateVector):
        v = state.amplitudes[:dim]
        kept = float(np.sum(np.abs(v) ** 2))
        lost = 1.0 - (1.0 - state.truncated_weight) * kept
        if not renormalize:
            return StateVector(v, dim, 1, lost)
        return StateVector(v / np.sqrt(kept), dim, 1, lost)
    m = state.matrix[:dim, :dim]
    kept = float(np.trace(m).real)
    lost = 1.0 - (1.0 - state.truncated_weight) * kept
    return density_from_matrix(m, dim, truncated_weight=lost)


def pad(state: AnyState, dim: int):
    """Embed a single-mode state into a larger Fock space."""
    if state.modes != 1:
        raise ShapeError("pad supports single-mode states only")
    if dim < state.dim:
        raise InvalidDimensionError(f"cannot pad dim {state.dim} down to {dim}")
    if isinstance(state, StateVector):
        v = np.zeros(dim, dtype=complex)
        v[: state.dim] = state.amplitudes
        return StateVector(v, dim, 1, state.truncated_weight)
    m = np.zeros((dim, dim), dtype=complex)
    m[: state.dim, : state.dim] = state.matrix
    return DensityOperator(m, dim, 1, state.truncated_weight)
