"""Beam splitters, photon loss and heralded photon subtraction."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Literal

import numpy as np
from scipy.linalg import expm
from scipy.special import comb

from .errors import DomainError, NoHeraldError, ShapeError
from .fock import (
    AnyState,
    DensityOperator,
    LinearOperator,
    StateVector,
    as_density,
    density_from_matrix,
    ladder_operators,
    pad,
)

NO_HERALD_THRESHOLD = 1e-15


@dataclass(frozen=True)
class DetectorModel:
    kind: Literal["ideal", "on-off"] = "on-off"
    efficiency: float = 1.0

    def __post_init__(self):
        if self.kind not in ("ideal", "on-off"):
            raise DomainError(f"unknown detector kind {self.kind!r}")
        if not 0.0 < self.efficiency <= 1.0:
            raise DomainError(f"detector efficiency must lie in (0, 1], got {self.efficiency}")

    def click_povm(self, dim: int) -> np.ndarray:
        """Diagonal of the click POVM element in the Fock basis."""
        n = np.arange(dim)
        if self.kind == "ideal":
            return (n == 1).astype(float)
        return 1.0 - (1.0 - self.efficiency) ** n


@dataclass(frozen=True)
class HeraldOutcome:
    state: DensityOperator
    probability: float
    pure: StateVector | None = None


@lru_cache(maxsize=32)
def _beam_splitter_matrix(transmissivity: float, dim: int) -> np.ndarray:
    theta = np.arccos(np.sqrt(transmissivity))
    a = ladder_operators(dim)[0].matrix.real
    eye = np.eye(dim)
    a1 = np.kron(a, eye)
    a2 = np.kron(eye, a)
    # U^dag a1 U = cos(theta) a1 + sin(theta) a2 for U = exp(theta (a1^dag a2 - a1 a2^dag))
    gen = a1.T @ a2 - a1 @ a2.T
    u = expm(theta * gen)
    u.setflags(write=False)
    return u


def beam_splitter_unitary(transmissivity: float, dim: int) -> LinearOperator:
    """Two-mode beam splitter a1 -> sqrt(T) a1 + sqrt(1-T) a2, a2 -> sqrt(T) a2 - sqrt(1-T) a1.

    The generator conserves total photon number, so the matrix is exact on
    every shell with fewer than ``dim`` photons in total.
    """
    if not 0.0 <= transmissivity <= 1.0:
        raise DomainError(f"transmissivity must lie in [0, 1], got {transmissivity}")
    if dim < 2:
        raise ShapeError("dim must be >= 2")
    return LinearOperator(_beam_splitter_matrix(float(transmissivity), int(dim)), dim, 2)


def apply_beam_splitter(state: AnyState, transmissivity: float) -> AnyState:
    """Apply the beam splitter to a two-mode state without cutting photon shells.

    Each mode is padded to 2*dim - 1 levels, evolved, and cut back to ``dim``;
    the weight pushed above the cutoff is reported as ``truncated_weight``.
    """
    if state.modes != 2:
        raise ShapeError("apply_beam_splitter needs a two-mode state")
    d = state.dim
    work = 2 * d - 1
    u = beam_splitter_unitary(transmissivity, work).matrix
    if isinstance(state, StateVector):
        big = np.zeros((work, work), dtype=complex)
        big[:d, :d] = state.amplitudes.reshape(d, d)
        out = (u @ big.reshape(-1)).reshape(work, work)[:d, :d].reshape(-1)
        kept = float(np.vdot(out, out).real)
        lost = 1.0 - (1.0 - state.truncated_weight) * kept
        return StateVector(out / np.sqrt(kept), d, 2, lost)
    big = np.zeros((work,) * 4, dtype=complex)
    big[:d, :d, :d, :d] = state.matrix.reshape(d, d, d, d)
    big = big.reshape(work * work, work * work)
    out = (u @ big @ u.conj().T).reshape((work,) * 4)[:d, :d, :d, :d].reshape(d * d, d * d)
    kept = float(np.trace(out).real)
    return density_from_matrix(out, d, 2, truncated_weight=1.0 - (1.0 - state.truncated_weight) * kept)


def loss_kraus(eta: float, dim: int) -> list[np.ndarray]:
    """Kraus operators A_k = sum_m sqrt(C(m,k) eta^(m-k) (1-eta)^k) |m-k><m|."""
    if not 0.0 <= eta <= 1.0:
        raise DomainError(f"transmissivity must lie in [0, 1], got {eta}")
    ops = []
    m = np.arange(dim)
    for k in range(dim):
        w = comb(m[k:], k) * eta ** (m[k:] - k) * (1.0 - eta) ** k
        a = np.zeros((dim, dim))
        a[m[k:] - k, m[k:]] = np.sqrt(w)
        ops.append(a)
        if eta == 1.0:
            break
    return ops


def loss_channel(rho: AnyState, eta: float) -> DensityOperator:
    """Pure-loss channel of transmissivity ``eta`` (|alpha> -> |sqrt(eta) alpha>)."""
    rho = as_density(rho)
    if rho.modes != 1:
        raise ShapeError("loss_channel acts on single-mode states")
    if not 0.0 <= eta <= 1.0:
        raise DomainError(f"transmissivity must lie in [0, 1], got {eta}")
    if eta == 1.0:
        return rho
    out = np.zeros_like(rho.matrix)
    for a in loss_kraus(eta, rho.dim):
        out += a @ rho.matrix @ a.T
    return density_from_matrix(out, rho.dim, truncated_weight=rho.truncated_weight)


def _condition(matrix: np.ndarray, dim: int, what: str, truncated_weight=0.0) -> HeraldOutcome:
    p = float(np.trace(matrix).real)
    if p < NO_HERALD_THRESHOLD:
        raise NoHeraldError(f"{what}: herald probability {p:.3e} is numerically zero", p)
    return HeraldOutcome(density_from_matrix(matrix, dim, truncated_weight=truncated_weight), p)


def tap_and_herald(rho: AnyState, tap_reflectivity: float, detector: DetectorModel) -> HeraldOutcome:
    """Tap a fraction R of the mode onto a detector and keep the clicked branch.

    The mode is mixed with vacuum on a beam splitter of transmissivity 1 - R,
    the click POVM acts on the tapped port, and the tapped port is traced out.
    Since the input carries at most dim - 1 photons the composite evolution is
    exact in the truncated space.
    """
    rho = as_density(rho)
    if rho.modes != 1:
        raise ShapeError("tap_and_herald acts on single-mode states")
    if not 0.0 <= tap_reflectivity < 1.0:
        raise DomainError(f"tap reflectivity must lie in (0, 1), got {tap_reflectivity}")
    d = rho.dim
    u = _beam_splitter_matrix(1.0 - float(tap_reflectivity), d)
    # rho (x) |0><0| only touches composite columns with n2 = 0
    v = u[:, ::d]
    joint = (v @ rho.matrix @ v.conj().T).reshape(d, d, d, d)
    povm = detector.click_povm(d)
    cond = np.einsum("ijkj,j->ik", joint, povm)
    return _condition(cond, d, "tap_and_herald", rho.truncated_weight)


def ideal_photon_subtraction(rho: AnyState) -> HeraldOutcome:
    """a rho a^dag / Tr[a rho a^dag]; the trace is returned as the weight."""
    rho = as_density(rho)
    if rho.modes != 1:
        raise ShapeError("ideal_photon_subtraction acts on single-mode states")
    a = ladder_operators(rho.dim)[0].matrix
    return _condition(a @ rho.matrix @ a.T, rho.dim, "ideal_photon_subtraction", rho.truncated_weight)


def beam_splitter_projection(first: AnyState, second: AnyState, projected_n: int,
                             transmissivity: float = 0.5) -> HeraldOutcome:
    """Interfere two single-mode states, project output mode 2 onto |n>.

    Inputs are padded to 2*dim - 1 levels so no photon-number shell is cut;
    the conditioned mode-1 state is returned in that enlarged space.
    """
    if first.modes != 1 or second.modes != 1:
        raise ShapeError("inputs must be single-mode")
    if first.dim != second.dim:
        raise ShapeError(f"input dims differ: {first.dim} vs {second.dim}")
    work = 2 * first.dim - 1
    if not 0 <= projected_n < work:
        raise NoHeraldError(f"|{projected_n}> lies outside the reachable photon numbers", 0.0)
    u = _beam_splitter_matrix(float(transmissivity), work)
    if isinstance(first, StateVector) and isinstance(second, StateVector):
        psi = np.kron(pad(first, work).amplitudes, pad(second, work).amplitudes)
        branch = (u @ psi).reshape(work, work)[:, projected_n]
        p = float(np.vdot(branch, branch).real)
        if p < NO_HERALD_THRESHOLD:
            raise NoHeraldError(f"projection onto |{projected_n}> has probability {p:.3e}", p)
        pure = StateVector(branch / np.sqrt(p), work)
        return HeraldOutcome(pure.to_density(), p, pure)
    rho = np.kron(pad(as_density(first), work).matrix, pad(as_density(second), work).matrix)
    out = (u @ rho @ u.conj().T).reshape(work, work, work, work)
    return _condition(out[:, projected_n, :, projected_n], work,
                      f"projection onto |{projected_n}>")


def fcc_synthesis(psi_c: AnyState, psi_d: AnyState, projected_n: int) -> HeraldOutcome:
    """Four-component-cat synthesis: 50:50 interference, then |n> projection of
    the second output with n larger than 2."""
    if projected_n < 3:
        raise DomainError(
            f"projected_n must be larger than 2 for four-component synthesis, got {projected_n}"
        )
    return beam_splitter_projection(psi_c, psi_d, projected_n, 0.5)
