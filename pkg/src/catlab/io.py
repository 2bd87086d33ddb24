"""Density-matrix and Wigner-grid files."""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .errors import DomainError, ParseError, ValidationError
from .fock import DensityOperator, check_density_matrix

DENSITY_TAG = "catlab-density v1"

# 12 significant digits leave a trace error far below the 1e-9 validation tolerance
_FILE_TRACE_TOL = 1e-9


def write_density(rho: DensityOperator, path) -> None:
    if rho.modes != 1:
        raise ValidationError("density files hold single-mode states")
    d = rho.dim
    # exact Hermitian symmetry makes a read-then-write cycle reproduce the file
    m = 0.5 * (rho.matrix + rho.matrix.conj().T)
    lines = [f"# {DENSITY_TAG}; dim={d}"]
    for i in range(d):
        for j in range(d):
            lines.append(f"{i},{j},{m[i, j].real:.12g},{m[i, j].imag:.12g}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_density(path) -> DensityOperator:
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    if not lines or not lines[0].startswith("#") or DENSITY_TAG not in lines[0]:
        raise ParseError(f"missing '{DENSITY_TAG}' header", 1)
    dim = None
    for part in lines[0].lstrip("#").split(";"):
        key, _, value = part.strip().partition("=")
        if key == "dim":
            try:
                dim = int(value)
            except ValueError:
                raise ParseError(f"bad dim {value!r}", 1) from None
    if dim is None or dim < 2:
        raise ParseError("header lacks a valid dim", 1)
    m = np.zeros((dim, dim), dtype=complex)
    seen = np.zeros((dim, dim), dtype=bool)
    for lineno, line in enumerate(lines[1:], start=2):
        s = line.strip()
        if not s or s.startswith("#"):
            continue
        parts = s.split(",")
        try:
            if len(parts) != 4:
                raise ValueError
            i, j = int(parts[0]), int(parts[1])
            re_, im_ = float(parts[2]), float(parts[3])
        except ValueError:
            raise ParseError(f"expected 'row,col,re,im', got {s[:40]!r}", lineno) from None
        if not (0 <= i < dim and 0 <= j < dim):
            raise ParseError(f"index ({i},{j}) outside dim {dim}", lineno)
        m[i, j] = complex(re_, im_)
        seen[i, j] = True
    if not seen.all():
        raise ParseError(f"{int((~seen).sum())} matrix entries missing", len(lines))
    try:
        check_density_matrix(m, trace_tol=_FILE_TRACE_TOL)
    except DomainError as exc:
        raise ValidationError(f"{path}: {exc}") from None
    return DensityOperator(0.5 * (m + m.conj().T), dim)


def write_wigner_csv(grid, path) -> None:
    lines = ["x,p,W"]
    for i, x in enumerate(grid.xs.tolist()):
        for j, p in enumerate(grid.ps.tolist()):
            lines.append(f"{x:.6g},{p:.6g},{grid.values[i, j]:.9g}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def write_wigner_grid(grid, path) -> None:
    """Matrix layout for plotting: row i is x = xs[i], column j is p = ps[j]."""
    head = ["# catlab-wigner-grid v1; rows=x; cols=p",
            "# xs " + " ".join(f"{v:.6g}" for v in grid.xs.tolist()),
            "# ps " + " ".join(f"{v:.6g}" for v in grid.ps.tolist())]
    body = [" ".join(f"{v:.9g}" for v in row) for row in grid.values.tolist()]
    Path(path).write_text("\n".join(head + body) + "\n", encoding="utf-8")
