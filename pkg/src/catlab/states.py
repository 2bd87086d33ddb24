"""Constructors for the named states of the two-cat experiment.

Every pure-state constructor evaluates its closed-form Fock expansion,
keeps the first ``dim`` levels and renormalises.  The weight discarded by the
cutoff is stored on the returned object and must stay below ``tol``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

import numpy as np
from scipy.linalg import expm
from scipy.special import gammaln

from .errors import DomainError, InvalidDimensionError, SpecError, TruncationError, UndefinedStateError
from .fock import DensityOperator, StateVector, density_from_matrix, ladder_operators

TRUNCATION_TOL = 1e-6

Orientation = Literal["amplitude", "phase"]
Axis = Literal["x", "p"]


@dataclass(frozen=True)
class SqueezingSpec:
    r: float
    orientation: Orientation = "amplitude"

    def __post_init__(self):
        if not np.isfinite(self.r) or self.r < 0:
            raise SpecError(f"squeezing parameter must be >= 0, got {self.r}")
        if self.orientation not in ("amplitude", "phase"):
            raise SpecError(f"unknown orientation {self.orientation!r}")

    @property
    def sign(self) -> float:
        """Sign of the tanh(r) alternation: -1 squeezes X, +1 squeezes P."""
        return -1.0 if self.orientation == "amplitude" else 1.0


@dataclass(frozen=True)
class GaussianNoiseSpec:
    """Measured squeezing/antisqueezing levels, both stored as positive dB."""

    squeezing_db: float
    antisqueezing_db: float
    orientation: Orientation = "amplitude"

    def __post_init__(self):
        if self.squeezing_db < 0:
            raise SpecError("squeezing_db is stored as a positive number")
        if self.antisqueezing_db < self.squeezing_db:
            raise SpecError(
                f"antisqueezing ({self.antisqueezing_db} dB) below squeezing "
                f"({self.squeezing_db} dB) implies a negative thermal occupation"
            )
        if self.orientation not in ("amplitude", "phase"):
            raise SpecError(f"unknown orientation {self.orientation!r}")

    @property
    def min_variance(self) -> float:
        return 0.5 * 10 ** (-self.squeezing_db / 10)

    @property
    def max_variance(self) -> float:
        return 0.5 * 10 ** (self.antisqueezing_db / 10)

    @property
    def thermal_occupation(self) -> float:
        return float(np.sqrt(self.min_variance * self.max_variance) - 0.5)

    @property
    def effective_r(self) -> float:
        return float(0.25 * np.log(self.max_variance / self.min_variance))

    @property
    def purity(self) -> float:
        return float(0.5 / np.sqrt(self.min_variance * self.max_variance))


@dataclass(frozen=True)
class CatSpec:
    alpha: complex
    axis: Axis = "x"
    parity: Literal["odd"] = "odd"

    def __post_init__(self):
        if self.axis not in ("x", "p"):
            raise SpecError(f"axis must be 'x' or 'p', got {self.axis!r}")
        if self.parity != "odd":
            raise SpecError("only odd cats are supported")

    @property
    def normalization(self) -> float:
        a2 = abs(self.alpha) ** 2
        if a2 == 0:
            raise UndefinedStateError("odd cat with alpha = 0 has no normalisation")
        return float(1.0 / np.sqrt(-2.0 * np.expm1(-2.0 * a2)))

    @property
    def displacement(self) -> complex:
        """Coherent amplitude of the first component."""
        return complex(self.alpha) * (1j if self.axis == "p" else 1.0)


def _check_dim(dim: int) -> None:
    if int(dim) != dim or dim < 2:
        raise InvalidDimensionError(f"dim must be an integer >= 2, got {dim}")


def _finish(amps: np.ndarray, dim: int, total: float, tol: float, what: str) -> StateVector:
    """Cut an analytic expansion (``amps`` may be longer than ``dim``)."""
    kept = amps[:dim]
    captured = float(np.sum(np.abs(kept) ** 2))
    deficit = max(0.0, 1.0 - captured / total)
    if deficit > tol:
        raise TruncationError(f"{what} needs a larger cutoff than dim={dim}", deficit)
    return StateVector(kept / np.sqrt(captured), dim, 1, deficit)


def _extended(dim: int) -> int:
    return max(2 * dim, dim + 120)


def _coherent_log_amplitudes(alpha_abs: float, n: np.ndarray) -> np.ndarray:
    with np.errstate(divide="ignore"):
        return n * np.log(alpha_abs) - 0.5 * gammaln(n + 1) - 0.5 * alpha_abs**2


def squeezed_vacuum(spec: SqueezingSpec, dim: int, *, tol: float = TRUNCATION_TOL) -> StateVector:
    """(cosh r)^{-1/2} sum_m sqrt((2m)!)/(2^m m!) (sign tanh r)^m |2m>."""
    _check_dim(dim)
    if spec.r == 0:
        return _finish(np.eye(1, dim, 0, dtype=complex)[0], dim, 1.0, tol, "vacuum")
    length = _extended(dim)
    m = np.arange((length + 1) // 2)
    t = np.tanh(spec.r)
    logc = 0.5 * gammaln(2 * m + 1) - m * np.log(2) - gammaln(m + 1) + m * np.log(t) - 0.5 * np.log(np.cosh(spec.r))
    amps = np.zeros(length, dtype=complex)
    amps[2 * m] = spec.sign**m * np.exp(logc)
    return _finish(amps, dim, 1.0, tol, "squeezed vacuum")


def photon_subtracted_squeezed(spec: SqueezingSpec, dim: int, *, tol: float = TRUNCATION_TOL) -> StateVector:
    """(cosh r)^{-3/2} sum_{m>=1} sqrt((2m-1)!)/(2^{m-1}(m-1)!) (sign tanh r)^{m-1} |2m-1>.

    The prefactor already normalises the series (its squared sum is cosh^3 r).
    """
    _check_dim(dim)
    if spec.r == 0:
        raise UndefinedStateError("photon subtraction from vacuum is undefined (r = 0)")
    length = _extended(dim)
    m = np.arange(1, length // 2 + 1)
    t = np.tanh(spec.r)
    logc = (0.5 * gammaln(2 * m) - (m - 1) * np.log(2) - gammaln(m)
            + (m - 1) * np.log(t) - 1.5 * np.log(np.cosh(spec.r)))
    amps = np.zeros(length, dtype=complex)
    amps[2 * m - 1] = spec.sign ** (m - 1) * np.exp(logc)
    return _finish(amps, dim, 1.0, tol, "photon-subtracted squeezed vacuum")


def coherent(alpha: complex, dim: int, *, tol: float = TRUNCATION_TOL) -> StateVector:
    _check_dim(dim)
    alpha = complex(alpha)
    length = _extended(dim) + int(4 * abs(alpha) ** 2)
    n = np.arange(length)
    if alpha == 0:
        amps = np.eye(1, length, 0, dtype=complex)[0]
    else:
        amps = np.exp(_coherent_log_amplitudes(abs(alpha), n) + 1j * n * np.angle(alpha))
    return _finish(amps, dim, 1.0, tol, f"coherent state alpha={alpha:.4g}")


def odd_cat(spec: CatSpec, dim: int, *, tol: float = TRUNCATION_TOL) -> StateVector:
    """N (|a> - |-a>) with a = alpha (axis x) or i alpha (axis p)."""
    _check_dim(dim)
    norm = spec.normalization
    a = spec.displacement
    length = _extended(dim) + int(4 * abs(a) ** 2)
    n = np.arange(length)
    odd = n % 2 == 1
    amps = np.zeros(length, dtype=complex)
    amps[odd] = np.exp(np.log(2 * norm) + _coherent_log_amplitudes(abs(a), n[odd]) + 1j * n[odd] * np.angle(a))
    return _finish(amps, dim, 1.0, tol, f"odd cat alpha={spec.alpha:.4g}")


def odd_cat_overlap_vector(alpha: complex, axis: Axis, dim: int) -> np.ndarray:
    """First ``dim`` amplitudes of the exact (untruncated) odd cat.

    Unlike :func:`odd_cat` this neither renormalises nor enforces a cutoff,
    so ``<v|rho|v>`` is the exact overlap of a ``dim``-level rho with the cat.
    """
    spec = CatSpec(alpha, axis)
    norm = spec.normalization
    a = spec.displacement
    n = np.arange(dim)
    v = np.zeros(dim, dtype=complex)
    odd = n % 2 == 1
    v[odd] = np.exp(np.log(2 * norm) + _coherent_log_amplitudes(abs(a), n[odd]) + 1j * n[odd] * np.angle(a))
    return v


def two_mode_squeezed_vacuum(r: float, dim: int, *, tol: float = TRUNCATION_TOL) -> StateVector:
    """sum_n (-tanh r)^n / cosh r |n, n>, for which V[X1 + X2] = e^{-2r}."""
    _check_dim(dim)
    if r < 0:
        raise SpecError("r must be >= 0")
    t = np.tanh(r)
    n = np.arange(dim)
    coeffs = (-t) ** n / np.cosh(r)
    deficit = float(t ** (2 * dim))
    if deficit > tol:
        raise TruncationError(f"two-mode squeezed vacuum needs a larger cutoff than dim={dim}", deficit)
    amps = np.zeros(dim * dim, dtype=complex)
    amps[n * dim + n] = coeffs
    amps /= np.linalg.norm(amps)
    return StateVector(amps, dim, 2, deficit)


def thermal_state(nbar: float, dim: int) -> DensityOperator:
    """Bose-Einstein diagonal state, cut at ``dim`` and renormalised."""
    _check_dim(dim)
    if nbar < 0:
        raise SpecError("mean photon number must be >= 0")
    n = np.arange(dim)
    if nbar == 0:
        p = (n == 0).astype(float)
    else:
        q = nbar / (1 + nbar)
        p = q**n / (1 + nbar)
    deficit = 1.0 - float(p.sum())
    return DensityOperator(np.diag(p / p.sum()).astype(complex), dim, 1, max(0.0, deficit))


def squeeze_operator(r: float, dim: int) -> np.ndarray:
    """exp(r/2 (a^2 - a^dag^2)) on ``dim`` levels (defect confined to the top levels)."""
    a, _ = ladder_operators(dim)
    a2 = a.matrix @ a.matrix
    return expm(0.5 * r * (a2 - a2.conj().T))


def squeezed_thermal_from_db(spec: GaussianNoiseSpec, dim: int, *, tol: float = TRUNCATION_TOL) -> DensityOperator:
    """S(r_eff) rho_thermal(nbar) S(r_eff)^dag matching both measured variances.

    The squeeze is evaluated in an enlarged space and cut back to ``dim`` so
    the truncation defect of the matrix exponential never reaches the result.
    """
    _check_dim(dim)
    nbar = spec.thermal_occupation
    if nbar < -1e-12:
        raise SpecError(f"implied thermal occupation {nbar:.3g} is negative")
    nbar = max(nbar, 0.0)
    r = spec.effective_r
    if spec.orientation == "phase":
        r = -r
    work = dim + 60
    th = thermal_state(nbar, work).matrix
    s = squeeze_operator(r, work)
    rho = s @ th @ s.conj().T
    kept = float(np.trace(rho[:dim, :dim]).real)
    deficit = max(0.0, 1.0 - kept)
    if deficit > tol:
        raise TruncationError(f"squeezed thermal state needs a larger cutoff than dim={dim}", deficit)
    return density_from_matrix(rho[:dim, :dim], dim, truncated_weight=deficit)


def four_component_cat(beta: complex, k: int, dim: int, *, tol: float = TRUNCATION_TOL) -> StateVector:
    """(|b> + (-1)^k |-b> + (-i)^k |ib> + i^k |-ib>) / N_k.

    The four phase factors interfere so only levels n = k (mod 4) survive.
    """
    _check_dim(dim)
    if k not in (0, 1, 2, 3):
        raise DomainError(f"k must be 0..3, got {k}")
    beta = complex(beta)
    if beta == 0:
        if k != 0:
            raise UndefinedStateError("four-component cat with beta = 0 vanishes for k != 0")
        return _finish(np.eye(1, dim, 0, dtype=complex)[0], dim, 1.0, tol, "vacuum")
    length = _extended(dim) + int(4 * abs(beta) ** 2)
    n = np.arange(length)
    sel = n % 4 == k
    logs = _coherent_log_amplitudes(abs(beta), n[sel])
    # normalise in log space before exponentiating; small beta underflows otherwise
    logs = logs - logs.max()
    amps = np.zeros(length, dtype=complex)
    amps[sel] = np.exp(logs + 1j * n[sel] * np.angle(beta))
    amps /= np.linalg.norm(amps)
    return _finish(amps, dim, 1.0, tol, f"four-component cat beta={beta:.4g}")

