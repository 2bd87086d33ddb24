"""Homodyne statistics: quadrature densities, seeded sampling and dataset files."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterator, NamedTuple, Sequence

import numpy as np

from .errors import DomainError, InputError, ParseError
from .fock import AnyState, as_density, expectation, quadrature_operator

HEADER_TAG = "catlab-quadrature v1"
GRID_POINTS = 2048
GRID_SIGMAS = 6.0


def fock_wavefunctions(nmax: int, x) -> np.ndarray:
    """psi_n(x) for n = 0..nmax-1 as an array of shape (nmax, len(x)).

    Uses the normalised three-term recurrence
    psi_{n+1} = sqrt(2/(n+1)) x psi_n - sqrt(n/(n+1)) psi_{n-1},
    which never forms H_n or n! explicitly.
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    out = np.empty((max(nmax, 1), x.size))
    out[0] = np.pi**-0.25 * np.exp(-0.5 * x**2)
    if nmax > 1:
        out[1] = np.sqrt(2.0) * x * out[0]
    for n in range(1, nmax - 1):
        out[n + 1] = np.sqrt(2.0 / (n + 1)) * x * out[n] - np.sqrt(n / (n + 1)) * out[n - 1]
    return out[:nmax]


def fock_position_wavefunction(n: int, x: float) -> float:
    if n < 0:
        raise DomainError("n must be >= 0")
    return float(fock_wavefunctions(n + 1, x)[n, 0])


def quadrature_pdf(rho: AnyState, theta: float, xs) -> np.ndarray:
    """pr(x|theta) = sum_{mn} rho_mn e^{i(n-m)theta} psi_m(x) psi_n(x)."""
    rho = as_density(rho)
    if rho.modes != 1:
        raise DomainError("quadrature_pdf needs a single-mode state")
    xs = np.asarray(xs, dtype=float)
    if not np.all(np.isfinite(xs)):
        raise DomainError("quadrature grid must be finite")
    psi = fock_wavefunctions(rho.dim, xs.ravel())
    phase = np.exp(1j * theta * np.arange(rho.dim))
    # amplitude-like vectors: sum_n e^{i n theta} psi_n(x) |n>
    v = phase[:, None] * psi
    pdf = np.einsum("mx,mn,nx->x", v.conj(), rho.matrix, v).real
    if np.any(pdf < -1e-10):
        raise DomainError(f"negative quadrature density {pdf.min():.2e}; input is not a valid state")
    return np.clip(pdf, 0.0, None).reshape(xs.shape)


def quadrature_moments(rho: AnyState, theta: float) -> tuple[float, float]:
    """Mean and variance of X_theta from the density matrix."""
    rho = as_density(rho)
    x = quadrature_operator(rho.dim, theta)
    mean = expectation(x, rho).real
    return mean, expectation(x @ x, rho).real - mean**2


class QuadratureSample(NamedTuple):
    theta: float
    x: float
    mode_label: str


@dataclass(frozen=True)
class QuadratureDataset:
    """Homodyne record: one (theta, x) pair per sample, all from one mode."""

    thetas: np.ndarray
    xs: np.ndarray
    mode_label: str = "c"
    seed: int = 0
    state: str = ""
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        thetas = np.array(self.thetas, dtype=float).reshape(-1)
        xs = np.array(self.xs, dtype=float).reshape(-1)
        if thetas.size == 0:
            raise InputError("dataset must not be empty")
        if thetas.shape != xs.shape:
            raise InputError("theta and x columns differ in length")
        thetas.setflags(write=False)
        xs.setflags(write=False)
        object.__setattr__(self, "thetas", thetas)
        object.__setattr__(self, "xs", xs)

    def __len__(self) -> int:
        return self.xs.size

    def __eq__(self, other) -> bool:
        if not isinstance(other, QuadratureDataset):
            return NotImplemented
        return (self.mode_label == other.mode_label and self.seed == other.seed
                and self.state == other.state and np.array_equal(self.thetas, other.thetas)
                and np.array_equal(self.xs, other.xs))

    @property
    def samples(self) -> Iterator[QuadratureSample]:
        for t, x in zip(self.thetas, self.xs):
            yield QuadratureSample(float(t), float(x), self.mode_label)

    def phases(self) -> np.ndarray:
        return np.unique(self.thetas)


def uniform_phases(k: int) -> np.ndarray:
    if k < 1:
        raise DomainError("need at least one phase")
    return np.arange(k) * (np.pi / k)


def _reduce_phase(theta: float) -> float:
    t = math.fmod(theta, math.pi)
    return t + math.pi if t < 0 else t


def _quantize(values: np.ndarray) -> np.ndarray:
    """Round to the 9 significant digits stored on disk so files round-trip exactly."""
    return np.array([float(f"{v:.9g}") for v in values.tolist()])


def _sampling_grid(rho, phases: Sequence[float]) -> np.ndarray:
    spread = max(
        math.sqrt(max(var + mean**2, 0.5 * 1e-6))
        for mean, var in (quadrature_moments(rho, t) for t in phases)
    )
    span = GRID_SIGMAS * spread
    return np.linspace(-span, span, GRID_POINTS)


def _jittered_pdf(rho, theta: float, grid: np.ndarray, jitter: float) -> np.ndarray:
    if jitter <= 0:
        return quadrature_pdf(rho, theta, grid)
    nodes, weights = np.polynomial.hermite_e.hermegauss(21)
    weights = weights / weights.sum()
    return sum(w * quadrature_pdf(rho, theta + jitter * z, grid) for z, w in zip(nodes, weights))


def _inverse_cdf(grid: np.ndarray, pdf: np.ndarray):
    cdf = np.concatenate([[0.0], np.cumsum(0.5 * (pdf[1:] + pdf[:-1]) * np.diff(grid))])
    cdf /= cdf[-1]
    # strictly increasing abscissa for np.interp; flat tails collapse to one point
    keep = np.concatenate([[True], np.diff(cdf) > 0])
    return cdf[keep], grid[keep]


def sample_dataset(rho: AnyState, phases: Sequence[float] | int, n_samples: int, seed: int, *,
                   mode_label: str = "c", state: str = "", phase_jitter: float = 0.0) -> QuadratureDataset:
    """Draw ``n_samples`` homodyne outcomes, cycling round-robin through ``phases``.

    ``phases`` is either an explicit list (reduced into [0, pi)) or a count k
    for a uniform scan.  Each phase block draws from its own generator seeded
    by (seed, block index), so the output does not depend on evaluation order.
    ``phase_jitter`` (radians, default 0) blurs the true phase around the
    recorded one with a Gaussian; it is a robustness option, not part of the
    reference model.
    """
    if n_samples < 1:
        raise DomainError("n_samples must be >= 1")
    rho = as_density(rho)
    schedule = uniform_phases(phases) if isinstance(phases, (int, np.integer)) else np.asarray(phases, float)
    if schedule.size == 0:
        raise DomainError("phase schedule is empty")
    schedule = _quantize(np.array([_reduce_phase(t) for t in schedule]))
    k = schedule.size
    grid = _sampling_grid(rho, schedule)
    idx = np.arange(n_samples) % k
    xs = np.empty(n_samples)
    for block in range(k):
        where = np.flatnonzero(idx == block)
        if where.size == 0:
            continue
        cdf, support = _inverse_cdf(grid, _jittered_pdf(rho, schedule[block], grid, phase_jitter))
        rng = np.random.default_rng(np.random.SeedSequence([int(seed), block]))
        xs[where] = np.interp(rng.random(where.size), cdf, support)
    return QuadratureDataset(schedule[idx], _quantize(xs), mode_label, int(seed), state,
                             {"phase_jitter": phase_jitter})


# File format


def write_dataset(ds: QuadratureDataset, path) -> None:
    state = ds.state.replace("\n", " ").replace(";", ",")
    lines = [f"# {HEADER_TAG}; mode={ds.mode_label}; seed={ds.seed}; n={len(ds)}; state={state}"]
    lines.extend(f"{t:.9g},{x:.9g}" for t, x in zip(ds.thetas.tolist(), ds.xs.tolist()))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def _parse_header(line: str) -> dict:
    body = line.lstrip("#").strip()
    parts = [p.strip() for p in body.split(";")]
    if not parts or parts[0] != HEADER_TAG:
        raise ParseError(f"missing '{HEADER_TAG}' header", 1)
    fields = {}
    for p in parts[1:]:
        key, sep, value = p.partition("=")
        if not sep:
            raise ParseError(f"malformed header field {p!r}", 1)
        fields[key.strip()] = value.strip()
    for key in ("mode", "seed", "n"):
        if key not in fields:
            raise ParseError(f"header lacks '{key}'", 1)
    return fields


def read_dataset(path) -> QuadratureDataset:
    text = Path(path).read_text(encoding="utf-8")
    lines = text.splitlines()
    if not lines or not lines[0].startswith("#"):
        raise ParseError(f"missing '{HEADER_TAG}' header", 1)
    head = _parse_header(lines[0])
    thetas, xs = [], []
    for lineno, line in enumerate(lines[1:], start=2):
        s = line.strip()
        if not s or s.startswith("#"):
            continue
        t, sep, x = s.partition(",")
        try:
            if not sep or "," in x:
                raise ValueError
            thetas.append(float(t))
            xs.append(float(x))
        except ValueError:
            raise ParseError(f"expected 'theta,x', got {s[:40]!r}", lineno) from None
        if not (math.isfinite(thetas[-1]) and math.isfinite(xs[-1])):
            raise ParseError("non-finite value", lineno)
    try:
        n = int(head["n"])
        seed = int(head["seed"])
    except ValueError:
        raise ParseError("non-integer seed or count in header", 1) from None
    if n != len(xs):
        raise ParseError(f"header announces {n} samples, file holds {len(xs)}", len(lines))
    if not xs:
        raise ParseError("dataset holds no samples", len(lines))
    return QuadratureDataset(np.array(thetas), np.array(xs), head["mode"], seed, head.get("state", ""))
