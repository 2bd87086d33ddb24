"""Iterative maximum-likelihood (R rho R) homodyne tomography.

Data are histogrammed per phase; each (phase, x-bin) cell has a POVM element
equal to the ideal bin projector pulled back through a pure-loss channel, so
the reconstruction reports the state *before* a known detection loss.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .channels import loss_kraus
from .conventions import DEFAULT_EFFICIENCY_CORRECTION, DEFAULT_TOMOGRAPHY_DIM
from .errors import DegenerateModelError, DomainError, InputError
from .fock import DensityOperator, LinearOperator, density_from_matrix
from .homodyne import QuadratureDataset, fock_wavefunctions

log = logging.getLogger(__name__)

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(16)
_PANEL_WIDTH = 0.25
REPAIR_EVERY = 50
EIGEN_CLIP = -1e-10


@dataclass(frozen=True)
class TomographyConfig:
    dim: int = DEFAULT_TOMOGRAPHY_DIM
    efficiency_correction: float = DEFAULT_EFFICIENCY_CORRECTION
    x_bins: int = 100
    x_range: float | None = None  # half-width; None -> max(6 sigma, max |x|)
    phase_bins: int | None = None  # None -> one group per distinct phase
    max_iterations: int = 2000
    convergence_epsilon: float = 1e-10
    dilution: float = 1.0

    def __post_init__(self):
        if self.dim < 2:
            raise DomainError("dim must be >= 2")
        if not 0.0 < self.efficiency_correction <= 1.0:
            raise DomainError("efficiency_correction must lie in (0, 1]")
        if self.convergence_epsilon <= 0:
            raise DomainError("convergence_epsilon must be positive")
        if not 0.0 < self.dilution <= 1.0:
            raise DomainError("dilution must lie in (0, 1]")
        if self.x_bins < 1 or self.max_iterations < 1:
            raise DomainError("x_bins and max_iterations must be positive")


@dataclass(frozen=True)
class BinnedData:
    counts: np.ndarray  # (J,) observed counts, zero cells dropped
    povms: np.ndarray  # (J, D, D)
    x_edges: np.ndarray
    phases: np.ndarray

    @property
    def bin_width(self) -> float:
        return float(self.x_edges[1] - self.x_edges[0])


@dataclass(frozen=True)
class ReconstructionResult:
    rho: DensityOperator
    iterations: int
    loglik_trace: list[float]
    converged: bool
    meta: dict = field(default_factory=dict)


def _bin_integrals(edges: np.ndarray, dim: int) -> np.ndarray:
    """I[j, m, n] = integral of psi_m psi_n over [edges[j], edges[j+1]]."""
    out = np.empty((edges.size - 1, dim, dim))
    for j, (lo, hi) in enumerate(zip(edges[:-1], edges[1:])):
        panels = max(1, int(np.ceil((hi - lo) / _PANEL_WIDTH)))
        cuts = np.linspace(lo, hi, panels + 1)
        half = 0.5 * np.diff(cuts)
        mid = 0.5 * (cuts[1:] + cuts[:-1])
        xs = (mid[:, None] + half[:, None] * _GL_NODES[None, :]).ravel()
        ws = (half[:, None] * _GL_WEIGHTS[None, :]).ravel()
        psi = fock_wavefunctions(dim, xs)
        out[j] = (psi * ws) @ psi.T
    return out


def _finite_edges(lo: float, hi: float, dim: int) -> tuple[float, float]:
    reach = np.sqrt(2.0 * dim + 1.0) + 12.0
    return max(lo, -reach), min(hi, reach)


def _loss_adjoint(ops: np.ndarray, eta: float) -> np.ndarray:
    """Heisenberg-picture loss: Pi -> sum_k A_k^dag Pi A_k, batched over the first axis."""
    if eta == 1.0:
        return ops
    out = np.zeros_like(ops)
    for a in loss_kraus(eta, ops.shape[-1]):
        out += np.einsum("km,jkl,ln->jmn", a, ops, a)
    return out


def _phase_factors(theta: float, dim: int) -> np.ndarray:
    n = np.arange(dim)
    return np.exp(1j * theta * (n[:, None] - n[None, :]))


def povm_element(x_bin: tuple[float, float], theta: float, eta: float, dim: int) -> LinearOperator:
    """Efficiency-corrected POVM element for observing x in ``x_bin`` at phase theta.

    <m|Pi|n> = e^{i(m-n)theta} integral psi_m psi_n dx, pulled back through a
    loss channel of transmissivity ``eta``.  Infinite bin edges are allowed.
    """
    if not 0.0 < eta <= 1.0:
        raise DomainError(f"eta must lie in (0, 1], got {eta}")
    lo, hi = float(x_bin[0]), float(x_bin[1])
    if not lo < hi:
        raise DomainError("bin must be a non-empty interval")
    lo, hi = _finite_edges(lo, hi, dim)
    base = _bin_integrals(np.array([lo, hi]), dim)
    pulled = _loss_adjoint(base, eta)[0]
    return LinearOperator(pulled * _phase_factors(theta, dim), dim)


def _data_range(xs: np.ndarray) -> float:
    # sorting makes the spread (and thus the bin edges) independent of sample order
    s = np.sort(xs)
    return float(max(6.0 * np.std(s), np.max(np.abs(s))) * (1.0 + 1e-9))


def bin_dataset(ds: QuadratureDataset, cfg: TomographyConfig) -> BinnedData:
    half = cfg.x_range if cfg.x_range is not None else _data_range(ds.xs)
    if np.max(np.abs(ds.xs)) > half:
        raise InputError(f"x_range {half} does not cover the data (max |x| = {np.max(np.abs(ds.xs)):.3f})")
    edges = np.linspace(-half, half, cfg.x_bins + 1)
    if cfg.phase_bins is None:
        phases, group = np.unique(ds.thetas, return_inverse=True)
    else:
        width = np.pi / cfg.phase_bins
        group = np.minimum((np.mod(ds.thetas, np.pi) / width).astype(int), cfg.phase_bins - 1)
        phases = (np.arange(cfg.phase_bins) + 0.5) * width
    base = _loss_adjoint(_bin_integrals(edges, cfg.dim), cfg.efficiency_correction)
    counts, povms, kept_phases = [], [], []
    for g, theta in enumerate(phases):
        hist, _ = np.histogram(ds.xs[group == g], bins=edges)
        nz = np.flatnonzero(hist)
        if nz.size == 0:
            continue
        kept_phases.append(theta)
        counts.append(hist[nz])
        povms.append(base[nz] * _phase_factors(theta, cfg.dim)[None])
    if not counts:
        raise InputError("dataset populates no bins")
    return BinnedData(np.concatenate(counts).astype(float), np.concatenate(povms), edges,
                      np.array(kept_phases))


def _probabilities(rho: np.ndarray, povms: np.ndarray) -> np.ndarray:
    # Tr[rho Pi_j] = sum_mn rho_nm Pi_j,mn
    return np.einsum("jmn,nm->j", povms, rho).real


def loglikelihood(rho, counts, povms) -> float:
    """sum_j f_j ln Tr[rho Pi_j]."""
    m = rho.matrix if isinstance(rho, DensityOperator) else np.asarray(rho)
    if isinstance(povms, (list, tuple)):
        povms = np.array([p.matrix if isinstance(p, LinearOperator) else p for p in povms])
    counts = np.asarray(counts, dtype=float)
    p = _probabilities(m, povms)
    bad = (counts > 0) & (p <= 0)
    if np.any(bad):
        raise DegenerateModelError(
            f"{int(bad.sum())} observed bins have zero model probability; "
            "raise the Fock cutoff or widen the x grid"
        )
    used = counts > 0
    return float(np.sum(counts[used] * np.log(p[used])))


def _repair(rho: np.ndarray) -> np.ndarray:
    rho = 0.5 * (rho + rho.conj().T)
    w, v = np.linalg.eigh(rho)
    if w[0] < EIGEN_CLIP:
        w = np.clip(w, 0.0, None)
        rho = (v * w) @ v.conj().T
    return rho / np.trace(rho).real


def rrr_step(rho: np.ndarray, freqs: np.ndarray, povms: np.ndarray, dilution: float = 1.0) -> np.ndarray:
    """One (diluted) R rho R update."""
    p = _probabilities(rho, povms)
    r = np.tensordot(freqs / p, povms, axes=1)
    if dilution < 1.0:
        r = (1.0 - dilution) * np.eye(rho.shape[0]) + dilution * r
    new = r @ rho @ r
    new = 0.5 * (new + new.conj().T)
    return new / np.trace(new).real


def reconstruct_binned(data: BinnedData, cfg: TomographyConfig) -> ReconstructionResult:
    dim = cfg.dim
    freqs = data.counts / data.counts.sum()
    povms = data.povms
    rho = np.eye(dim, dtype=complex) / dim
    ll = loglikelihood(rho, freqs, povms)
    trace = [ll]
    converged = False
    it = 0
    for it in range(1, cfg.max_iterations + 1):
        mix = cfg.dilution
        new = rrr_step(rho, freqs, povms, mix)
        if it % REPAIR_EVERY == 0:
            new = _repair(new)
        new_ll = loglikelihood(new, freqs, povms)
        # the undiluted map can overshoot; small enough dilution always ascends
        while new_ll < ll and mix > 1e-6:
            mix *= 0.5
            new = rrr_step(rho, freqs, povms, mix)
            new_ll = loglikelihood(new, freqs, povms)
        if new_ll < ll:
            log.debug("no ascent at iteration %d; stopping", it)
            converged = True
            break
        change = abs(new_ll - ll)
        rho, ll = new, new_ll
        trace.append(ll)
        if change <= cfg.convergence_epsilon * abs(ll):
            converged = True
            break
    rho = _repair(rho)
    return ReconstructionResult(
        density_from_matrix(rho, dim),
        it,
        trace,
        converged,
        {"bin_width": data.bin_width, "x_bins": int(data.x_edges.size - 1),
         "x_range": float(data.x_edges[-1]), "phases": int(data.phases.size),
         "efficiency_correction": cfg.efficiency_correction},
    )


def mle_reconstruct(ds: QuadratureDataset, cfg: TomographyConfig | None = None) -> ReconstructionResult:
    cfg = cfg or TomographyConfig()
    return reconstruct_binned(bin_dataset(ds, cfg), cfg)
