"""Wigner functions, fidelities and cat-state fits."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.optimize import minimize
from scipy.special import eval_genlaguerre, gammaln

from .errors import DomainError, ShapeError
from .fock import AnyState, StateVector, as_density
from .states import Axis, odd_cat_overlap_vector

DEFAULT_ALPHAS = np.round(np.arange(0.05, 3.0 + 1e-9, 0.01), 10)


@dataclass(frozen=True)
class WignerGrid:
    xs: np.ndarray
    ps: np.ndarray
    values: np.ndarray  # values[i, j] = W(xs[i], ps[j])
    normalization: float

    def at(self, x: float, p: float) -> float:
        i = int(np.argmin(np.abs(self.xs - x)))
        j = int(np.argmin(np.abs(self.ps - p)))
        return float(self.values[i, j])


@dataclass(frozen=True)
class CatFitResult:
    alpha_star: float
    fidelity_star: float
    curve: list[tuple[float, float]]
    axis: str = "x"


def _displacement_elements(beta: np.ndarray, m: int, n: int) -> np.ndarray:
    """<n|D(beta)|m> for n >= m, evaluated on an array of beta."""
    b2 = np.abs(beta) ** 2
    pref = np.exp(0.5 * (gammaln(m + 1) - gammaln(n + 1)))
    return pref * beta ** (n - m) * np.exp(-0.5 * b2) * eval_genlaguerre(m, n - m, b2)


def wigner(rho: AnyState, xs: Sequence[float], ps: Sequence[float]) -> WignerGrid:
    """W(x, p) = (1/pi) Tr[rho D(alpha) Parity D(alpha)^dag], alpha = (x + ip)/sqrt(2).

    D(alpha) Parity D(alpha)^dag = D(2 alpha) Parity, so each density-matrix
    element contributes (-1)^m <n|D(2 alpha)|m> in closed (Laguerre) form; no
    displaced operator is ever truncated.
    """
    rho = as_density(rho)
    xs = np.asarray(xs, dtype=float)
    ps = np.asarray(ps, dtype=float)
    beta = np.sqrt(2.0) * (xs[:, None] + 1j * ps[None, :])
    mat = rho.matrix
    w = np.zeros(beta.shape)
    for m in range(rho.dim):
        sign = -1.0 if m % 2 else 1.0
        w += sign * (mat[m, m] * _displacement_elements(beta, m, m)).real
        for n in range(m + 1, rho.dim):
            if mat[m, n] == 0:
                continue
            w += 2.0 * sign * (mat[m, n] * _displacement_elements(beta, m, n)).real
    w /= np.pi
    norm = float(np.trapezoid(np.trapezoid(w, ps, axis=1), xs)) if xs.size > 1 and ps.size > 1 else float("nan")
    return WignerGrid(xs, ps, w, norm)


def wigner_origin(rho: AnyState) -> float:
    """(1/pi) times the mean photon-number parity."""
    pops = np.diag(as_density(rho).matrix).real
    return float(np.sum(pops * (-1.0) ** np.arange(pops.size)) / np.pi)


def fidelity(rho: AnyState, ideal: AnyState) -> float:
    """Linear overlap Tr[rho_exp rho_ideal]; equals <psi|rho|psi> for a pure ideal.

    This is deliberately not the Uhlmann (square-root) fidelity.
    """
    if rho.dim != ideal.dim or rho.modes != ideal.modes:
        raise ShapeError("fidelity arguments have different shapes")
    if isinstance(ideal, StateVector):
        v = ideal.amplitudes
        if isinstance(rho, StateVector):
            return float(abs(np.vdot(v, rho.amplitudes)) ** 2)
        return float(np.vdot(v, rho.matrix @ v).real)
    return float(np.trace(as_density(rho).matrix @ ideal.matrix).real)


def trace_distance(rho: AnyState, sigma: AnyState) -> float:
    """(1/2) || rho - sigma ||_1."""
    if rho.dim != sigma.dim or rho.modes != sigma.modes:
        raise ShapeError("trace_distance arguments have different shapes")
    diff = as_density(rho).matrix - as_density(sigma).matrix
    return float(0.5 * np.sum(np.abs(np.linalg.eigvalsh(diff))))


def purity(rho: AnyState) -> float:
    m = as_density(rho).matrix
    return float(np.vdot(m, m).real)


def photon_number_distribution(rho: AnyState) -> np.ndarray:
    return np.diag(as_density(rho).matrix).real.copy()


def mean_photon_number(rho: AnyState) -> float:
    p = photon_number_distribution(rho)
    return float(np.dot(np.arange(p.size), p))


def _cat_fidelities(m: np.ndarray, axis: Axis, alphas: np.ndarray) -> np.ndarray:
    dim = m.shape[0]
    vs = np.array([odd_cat_overlap_vector(a, axis, dim) for a in alphas])
    return np.einsum("am,mn,an->a", vs.conj(), m, vs).real


def cat_fit_sweep(rho: AnyState, axis: Axis = "x", alphas: Sequence[float] | None = None) -> CatFitResult:
    """Fidelity with the odd cat along ``axis`` over a grid of amplitudes.

    The overlaps use the exact (uncut) cat, so they are valid for any grid
    value regardless of the state's cutoff.  The maximum is refined with a
    parabola through the three grid points around the best one; the refined
    point is added to the curve when it improves on the grid maximum.
    """
    m = as_density(rho).matrix
    alphas = np.asarray(DEFAULT_ALPHAS if alphas is None else alphas, dtype=float)
    if alphas.size == 0 or np.any(alphas <= 0):
        raise DomainError("alpha grid must be non-empty and positive")
    alphas = np.sort(alphas)
    fids = _cat_fidelities(m, axis, alphas)
    curve = list(zip(alphas.tolist(), fids.tolist()))
    i = int(np.argmax(fids))
    if 0 < i < alphas.size - 1:
        x0, x1, x2 = alphas[i - 1 : i + 2]
        y0, y1, y2 = fids[i - 1 : i + 2]
        denom = (x0 - x1) * (x0 - x2) * (x1 - x2)
        a = (x2 * (y1 - y0) + x1 * (y0 - y2) + x0 * (y2 - y1)) / denom
        b = (x2**2 * (y0 - y1) + x1**2 * (y2 - y0) + x0**2 * (y1 - y2)) / denom
        if a < 0:
            xr = float(np.clip(-b / (2 * a), x0, x2))
            fr = float(_cat_fidelities(m, axis, np.array([xr]))[0])
            if fr > fids[i] and xr not in alphas:
                curve.append((xr, fr))
                curve.sort()
    best = max(curve, key=lambda c: c[1])
    return CatFitResult(best[0], best[1], curve, axis)


def best_cat_axis(rho: AnyState, alphas=None) -> tuple[str, CatFitResult, CatFitResult]:
    """Axis ('x' or 'p') whose odd-cat sweep reaches the higher fidelity."""
    fx = cat_fit_sweep(rho, "x", alphas)
    fp = cat_fit_sweep(rho, "p", alphas)
    return ("x" if fx.fidelity_star >= fp.fidelity_star else "p"), fx, fp


# Generic cat families used to score four-component synthesis


def _normalized_sum(beta: complex, dim: int, selector) -> np.ndarray | None:
    """Exact first ``dim`` amplitudes of a normalised superposition of rotated
    coherent states whose Fock support is given by ``selector(n)``."""
    n = np.arange(dim + 200)
    amps = np.zeros(n.size, dtype=complex)
    sel = selector(n)
    if not np.any(sel):
        return None
    logs = n[sel] * np.log(abs(beta)) - 0.5 * gammaln(n[sel] + 1)
    amps[sel] = np.exp(logs - logs.max() + 1j * n[sel] * np.angle(beta))
    norm = np.linalg.norm(amps)
    if norm == 0:
        return None
    return (amps / norm)[:dim]


def four_cat_vector(beta: complex, k: int, dim: int) -> np.ndarray:
    return _normalized_sum(beta, dim, lambda n: n % 4 == k)


def two_cat_vector(gamma: complex, parity: int, dim: int) -> np.ndarray:
    return _normalized_sum(gamma, dim, lambda n: n % 2 == parity)


def _fit(rho: AnyState, family, labels, magnitudes, angles) -> tuple[complex, int, float]:
    m = as_density(rho).matrix
    dim = m.shape[0]

    def fid(mag, ang, lab):
        v = family(mag * np.exp(1j * ang), lab, dim)
        return float(np.vdot(v, m @ v).real) if v is not None else 0.0

    best = (0.0, 0.0, labels[0], -1.0)
    for lab in labels:
        for mag in magnitudes:
            for ang in angles:
                f = fid(mag, ang, lab)
                if f > best[3]:
                    best = (mag, ang, lab, f)
    mag0, ang0, lab, _ = best
    res = minimize(lambda z: -fid(abs(z[0]) + 1e-9, z[1], lab), x0=[mag0, ang0],
                   method="Nelder-Mead", options={"xatol": 1e-6, "fatol": 1e-10})
    mag, ang = abs(res.x[0]) + 1e-9, res.x[1]
    f = fid(mag, ang, lab)
    if f < best[3]:
        mag, ang, f = mag0, ang0, best[3]
    return complex(mag * np.exp(1j * ang)), lab, f


def fit_four_component_cat(rho: AnyState) -> tuple[complex, int, float]:
    """Best (beta, k, fidelity) over four-component cats."""
    return _fit(rho, four_cat_vector, (0, 1, 2, 3), np.arange(0.1, 3.01, 0.05),
                np.linspace(0, np.pi / 2, 13, endpoint=False))


def fit_two_component_cat(rho: AnyState) -> tuple[complex, int, float]:
    """Best (gamma, parity, fidelity) over even (0) and odd (1) two-component cats."""
    return _fit(rho, two_cat_vector, (0, 1), np.arange(0.1, 3.01, 0.05),
                np.linspace(0, np.pi, 25, endpoint=False))


def central_dip(xs: np.ndarray, bins: int = 60) -> float:
    """Bimodality score of a sample: 1 - (density near the median) / (peak density).

    ~0 for unimodal data peaked at the centre; approaches 1 when the centre is
    a deep valley between two lobes.
    """
    xs = np.asarray(xs, dtype=float)
    hist, edges = np.histogram(xs, bins=bins, density=True)
    centres = 0.5 * (edges[1:] + edges[:-1])
    mid = np.median(xs)
    width = 2.5 * (edges[1] - edges[0])
    near = hist[np.abs(centres - mid) <= width]
    return float(1.0 - near.mean() / hist.max())
