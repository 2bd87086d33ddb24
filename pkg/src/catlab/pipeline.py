"""Stage-by-stage reproduction of the two-cat experiment.

Each stage reads and writes plain files in an output directory and records
them, with SHA-256 checksums, in ``manifest.json``.  Stages downstream of
``simulate`` always read their inputs back from disk, so rerunning a single
stage from stored files reproduces its stored output byte for byte.
"""

from __future__ import annotations

import configparser
import dataclasses
import hashlib
import json
import logging
import time
from dataclasses import dataclass, field, fields
from pathlib import Path

import numpy as np

from . import analysis
from .channels import DetectorModel, fcc_synthesis, loss_channel, tap_and_herald
from .conventions import MODE_CAT_AXIS, MODE_LABELS, MODE_ORIENTATION
from .errors import CatlabError, DomainError, NoHeraldError, ValidationError
from .fock import DensityOperator, StateVector, crop
from .homodyne import read_dataset, sample_dataset, write_dataset
from .io import read_density, write_density, write_wigner_csv, write_wigner_grid
from .states import GaussianNoiseSpec, squeezed_thermal_from_db
from .tomography import TomographyConfig, mle_reconstruct

log = logging.getLogger(__name__)

MANIFEST = "manifest.json"
TIMINGS = "timings.json"


def _param(section: str, help: str, **kw):
    return field(metadata={"section": section, "help": help}, **kw)


@dataclass(frozen=True)
class ExperimentConfig:
    squeezing_db: float = _param("source", "squeezing level, positive dB", default=3.2)
    antisqueezing_db: float = _param("source", "antisqueezing level, dB", default=4.2)
    tap_reflectivity: float = _param("herald", "fraction tapped to the click detector", default=0.04)
    snspd_efficiency: float = _param(
        "herald", "click-detector efficiency (assumed; mainly sets the herald rate)",
        default=0.9)
    transmission_efficiency: float = _param("loss", "signal-path transmission", default=0.9)
    hd_efficiency: float = _param("loss", "homodyne detection efficiency", default=0.9)
    hd_loss_on_state: bool = _param(
        "loss", "degrade the state by the homodyne efficiency when sampling", default=True)
    mle_correction: float = _param("tomography", "efficiency corrected during reconstruction", default=0.81)
    fock_cutoff: int = _param("tomography", "reconstruction Fock levels (photon numbers 0..cutoff-1)", default=13)
    x_bins: int = _param("tomography", "quadrature histogram bins", default=100)
    max_iterations: int = _param("tomography", "R rho R iteration cap", default=2000)
    convergence_epsilon: float = _param("tomography", "relative log-likelihood change to stop", default=1e-10)
    samples_per_mode: int = _param("homodyne", "quadrature samples per mode", default=50000)
    phase_count: int = _param("homodyne", "uniformly spaced LO phases in [0, pi)", default=12)
    phase_jitter: float = _param("homodyne", "Gaussian LO phase noise in rad (extension; 0 = off)", default=0.0)
    simulation_dim: int = _param("simulation", "Fock levels used to simulate the heralded states", default=30)
    fcc_dim: int = _param("simulation", "per-mode levels for four-component synthesis", default=12)
    wigner_points: int = _param("analysis", "Wigner grid points per axis", default=121)
    wigner_extent: float = _param("analysis", "Wigner grid half-width", default=5.0)
    seed: int = _param("run", "master seed for homodyne sampling", default=2024)

    def __post_init__(self):
        for name in ("snspd_efficiency", "transmission_efficiency", "hd_efficiency", "mle_correction"):
            v = getattr(self, name)
            if not 0.0 < v <= 1.0:
                raise ValidationError(f"{name} must lie in (0, 1], got {v}")
        if not 0.0 <= self.tap_reflectivity < 1.0:
            raise ValidationError(f"tap_reflectivity must lie in [0, 1), got {self.tap_reflectivity}")
        if self.fock_cutoff < 4:
            raise ValidationError("fock_cutoff must be >= 4")
        if self.simulation_dim < self.fock_cutoff:
            raise ValidationError("simulation_dim must be >= fock_cutoff")
        if self.antisqueezing_db < self.squeezing_db or self.squeezing_db < 0:
            raise ValidationError("need 0 <= squeezing_db <= antisqueezing_db")
        if self.samples_per_mode < 1 or self.phase_count < 1:
            raise ValidationError("samples_per_mode and phase_count must be positive")
        if self.seed < 0 or self.seed >= 2**64:
            raise ValidationError("seed must be an unsigned 64-bit integer")

    def replace(self, **changes) -> ExperimentConfig:
        return dataclasses.replace(self, **changes)

    def tomography(self) -> TomographyConfig:
        return TomographyConfig(dim=self.fock_cutoff, efficiency_correction=self.mle_correction,
                                x_bins=self.x_bins, max_iterations=self.max_iterations,
                                convergence_epsilon=self.convergence_epsilon)

    def mode_seed(self, mode: str) -> int:
        ss = np.random.SeedSequence([self.seed, MODE_LABELS.index(mode)])
        return int(ss.generate_state(1, np.uint64)[0])

    def to_ini(self) -> str:
        sections: dict[str, list[str]] = {}
        for f in fields(self):
            value = getattr(self, f.name)
            text = str(value).lower() if isinstance(value, bool) else repr(value)
            sections.setdefault(f.metadata["section"], []).append(
                f"# {f.metadata['help']}\n{f.name} = {text}")
        return "\n\n".join(f"[{name}]\n" + "\n".join(items) for name, items in sections.items()) + "\n"

    @classmethod
    def from_ini(cls, text: str, **overrides) -> ExperimentConfig:
        parser = configparser.ConfigParser()
        parser.read_string(text)
        known = {f.name: f for f in fields(cls)}
        values = {}
        for section in parser.sections():
            for key, raw in parser.items(section):
                if key not in known:
                    raise ValidationError(f"unknown config key [{section}] {key}")
                values[key] = _coerce(known[key], raw)
        values.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**values)

    @classmethod
    def load(cls, path=None, **overrides) -> ExperimentConfig:
        text = Path(path).read_text(encoding="utf-8") if path else ""
        return cls.from_ini(text, **overrides)


def _coerce(f, raw: str):
    kind = f.type if isinstance(f.type, str) else f.type.__name__
    try:
        if kind == "bool":
            if raw.strip().lower() not in ("true", "false", "1", "0", "yes", "no"):
                raise ValueError
            return raw.strip().lower() in ("true", "1", "yes")
        if kind == "int":
            return int(raw)
        return float(raw)
    except ValueError:
        raise ValidationError(f"cannot read {f.name} = {raw!r} as {kind}") from None


# Manifest


def sha256(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def _load_json(path: Path, default: dict) -> dict:
    if path.exists():
        return json.loads(path.read_text(encoding="utf-8"))
    return default


def _record(out: Path, cfg: ExperimentConfig, stage: str, files: list[Path], seconds: float) -> None:
    """Add a stage's outputs to the manifest.

    Wall-clock times go to a sibling ``timings.json`` so that the manifest
    itself stays byte-identical across reruns with the same config.
    """
    manifest = _load_json(out / MANIFEST, {"config": {}, "stages": {}})
    manifest["config"] = dataclasses.asdict(cfg)
    manifest["stages"][stage] = {p.name: sha256(p) for p in files}
    _dump_json(manifest, out / MANIFEST)
    timings = _load_json(out / TIMINGS, {})
    timings[stage] = round(seconds, 3)
    _dump_json(timings, out / TIMINGS)


def verify_manifest(out) -> dict[str, bool]:
    """Map every recorded file to whether it exists with the recorded checksum."""
    out = Path(out)
    manifest = _load_json(out / MANIFEST, {"stages": {}})
    status = {}
    for files in manifest["stages"].values():
        for name, digest in files.items():
            p = out / name
            status[name] = p.exists() and sha256(p) == digest
    return status


def _dump_json(obj, path: Path) -> None:
    path.write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def _round(x: float, digits: int = 10) -> float:
    return float(f"{x:.{digits}g}")


# Stages


def state_path(out: Path, mode: str) -> Path:
    return out / f"state_{mode}.dm"


def heralded_state(cfg: ExperimentConfig, mode: str) -> tuple[DensityOperator, float]:
    """Squeezed-thermal source -> tap and click herald -> transmission loss.

    The result is the state arriving at the homodyne detector; detector
    inefficiency is applied by :func:`detected_state` in the sampling stage.
    """
    spec = GaussianNoiseSpec(cfg.squeezing_db, cfg.antisqueezing_db, MODE_ORIENTATION[mode])
    source = squeezed_thermal_from_db(spec, cfg.simulation_dim)
    if cfg.tap_reflectivity == 0.0:
        raise NoHeraldError("tap_reflectivity is 0, so no photon can be heralded; raise tap_reflectivity")
    try:
        herald = tap_and_herald(source, cfg.tap_reflectivity, DetectorModel("on-off", cfg.snspd_efficiency))
    except NoHeraldError as exc:
        raise NoHeraldError(f"{exc}; raise tap_reflectivity or squeezing_db", exc.probability) from None
    return loss_channel(herald.state, cfg.transmission_efficiency), herald.probability


def detected_state(cfg: ExperimentConfig, rho: DensityOperator) -> DensityOperator:
    """State whose quadratures the homodyne detector effectively records."""
    return loss_channel(rho, cfg.hd_efficiency) if cfg.hd_loss_on_state else rho


def cmd_simulate(cfg: ExperimentConfig, out) -> dict[str, Path]:
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    t0 = time.perf_counter()
    paths, info = {}, {}
    for mode in MODE_LABELS:
        state, p = heralded_state(cfg, mode)
        paths[mode] = state_path(out, mode)
        write_density(state, paths[mode])
        info[mode] = {"herald_probability": _round(p), "orientation": MODE_ORIENTATION[mode]}
        log.info("mode %s heralded with probability %.4g", mode, p)
    _dump_json(info, out / "simulate.json")
    _record(out, cfg, "simulate", [*paths.values(), out / "simulate.json"], time.perf_counter() - t0)
    return paths


def cmd_sample(cfg: ExperimentConfig, state_file, mode: str, out) -> Path:
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    t0 = time.perf_counter()
    rho = detected_state(cfg, read_density(state_file))
    seed = cfg.mode_seed(mode)
    ds = sample_dataset(rho, cfg.phase_count, cfg.samples_per_mode, seed, mode_label=mode,
                        state=f"{Path(state_file).name} dim={rho.dim}", phase_jitter=cfg.phase_jitter)
    path = out / f"data_{mode}.csv"
    write_dataset(ds, path)
    _record(out, cfg, f"sample_{mode}", [path], time.perf_counter() - t0)
    return path


@dataclass
class ReconstructOutput:
    matrix: Path
    diagnostics: Path
    converged: bool


def cmd_reconstruct(cfg: ExperimentConfig, dataset_file, out, mode: str | None = None) -> ReconstructOutput:
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    t0 = time.perf_counter()
    ds = read_dataset(dataset_file)
    mode = mode or ds.mode_label
    res = mle_reconstruct(ds, cfg.tomography())
    matrix = out / f"recon_{mode}.dm"
    diag = out / f"recon_{mode}.json"
    write_density(res.rho, matrix)
    _dump_json({"mode": mode, "iterations": res.iterations, "converged": res.converged,
                "loglik_trace": [_round(v, 14) for v in res.loglik_trace],
                **{k: (_round(v) if isinstance(v, float) else v) for k, v in res.meta.items()}}, diag)
    _record(out, cfg, f"reconstruct_{mode}", [matrix, diag], time.perf_counter() - t0)
    if not res.converged:
        log.warning("mode %s: reconstruction did not converge in %d iterations", mode, res.iterations)
    return ReconstructOutput(matrix, diag, res.converged)


def analyze_state(rho: DensityOperator, axis: str | None = None) -> dict:
    chosen, fx, fp = analysis.best_cat_axis(rho)
    fit = {"x": fx, "p": fp}[axis or chosen]
    return {
        "wigner_origin": _round(analysis.wigner_origin(rho)),
        "purity": _round(analysis.purity(rho)),
        "mean_photon_number": _round(analysis.mean_photon_number(rho)),
        "photon_distribution": [_round(max(v, 0.0)) for v in analysis.photon_number_distribution(rho)],
        "best_axis": chosen,
        "axis": axis or chosen,
        "alpha_star": _round(fit.alpha_star),
        "fidelity_star": _round(fit.fidelity_star),
        "sweeps": {
            name: {"alpha_star": _round(f.alpha_star), "fidelity_star": _round(f.fidelity_star),
                   "curve": [[_round(a), _round(v)] for a, v in f.curve]}
            for name, f in (("x", fx), ("p", fp))
        },
    }


def cmd_analyze(cfg: ExperimentConfig, matrix_file, out, axis: str | None = None,
                mode: str | None = None) -> Path:
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    t0 = time.perf_counter()
    if axis not in (None, "x", "p"):
        raise ValidationError(f"axis must be x or p, got {axis!r}")
    rho = read_density(matrix_file)
    tag = mode or Path(matrix_file).stem
    report = {"source": Path(matrix_file).name, "dim": rho.dim, **analyze_state(rho, axis)}
    grid_axis = np.linspace(-cfg.wigner_extent, cfg.wigner_extent, cfg.wigner_points)
    grid = analysis.wigner(rho, grid_axis, grid_axis)
    report["wigner_normalization"] = _round(grid.normalization)
    wcsv = out / f"wigner_{tag}.csv"
    wgrid = out / f"wigner_{tag}.grid"
    write_wigner_csv(grid, wcsv)
    write_wigner_grid(grid, wgrid)
    report["wigner_csv"] = wcsv.name
    path = out / f"report_{tag}.json"
    _dump_json(report, path)
    _record(out, cfg, f"analyze_{tag}", [path, wcsv, wgrid], time.perf_counter() - t0)
    return path


class StageError(CatlabError):
    def __init__(self, stage: str, error: Exception):
        super().__init__(f"stage '{stage}' failed: {error}")
        self.stage = stage
        self.error = error


def _stage(name, fn, *args, **kw):
    try:
        return fn(*args, **kw)
    except StageError:
        raise
    except (CatlabError, OSError) as exc:
        raise StageError(name, exc) from exc


@dataclass
class EndToEndResult:
    reports: dict[str, dict]
    converged: bool
    manifest: Path


def cmd_end2end(cfg: ExperimentConfig, out) -> EndToEndResult:
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    states = _stage("simulate", cmd_simulate, cfg, out)
    reports, converged = {}, True
    for mode in MODE_LABELS:
        data = _stage(f"sample_{mode}", cmd_sample, cfg, states[mode], mode, out)
        rec = _stage(f"reconstruct_{mode}", cmd_reconstruct, cfg, data, out, mode)
        converged &= rec.converged
        rpt = _stage(f"analyze_{mode}", cmd_analyze, cfg, rec.matrix, out, None, mode)
        reports[mode] = json.loads(rpt.read_text(encoding="utf-8"))
    axes = {m: reports[m]["best_axis"] for m in MODE_LABELS}
    if axes["c"] == axes["d"]:
        raise StageError("end2end", ValidationError(
            f"fitted cats share the {axes['c']} axis; expected orthogonal superposition directions"))
    for m in MODE_LABELS:
        if axes[m] != MODE_CAT_AXIS[m]:
            log.warning("mode %s fitted on the %s axis, expected %s", m, axes[m], MODE_CAT_AXIS[m])
    return EndToEndResult(reports, converged, out / MANIFEST)


def _fcc_input(rho: DensityOperator, dim: int):
    rho = crop(rho, dim)
    w, v = np.linalg.eigh(rho.matrix)
    if w[-1] > 1.0 - 1e-9:
        return StateVector(v[:, -1], dim).normalize()
    return rho


def cmd_fcc(cfg: ExperimentConfig, state_c, state_d, projected_n: int, out) -> Path:
    """Four-component synthesis from two heralded-state files."""
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    t0 = time.perf_counter()
    if projected_n < 3:
        raise DomainError(f"projected_n must be larger than 2, got {projected_n}")
    inputs = [_fcc_input(read_density(p), cfg.fcc_dim) for p in (state_c, state_d)]
    res = fcc_synthesis(inputs[0], inputs[1], projected_n)
    target = res.pure if res.pure is not None else res.state
    beta, k, f4 = analysis.fit_four_component_cat(target)
    gamma, parity, f2 = analysis.fit_two_component_cat(target)
    report = {
        "projected_n": projected_n,
        "pure_inputs": res.pure is not None,
        "herald_probability": _round(res.probability),
        "four_component": {"beta": [_round(beta.real, 6), _round(beta.imag, 6)], "k": k, "fidelity": _round(f4, 8)},
        "two_component": {"gamma": [_round(gamma.real, 6), _round(gamma.imag, 6)],
                          "parity": "odd" if parity else "even", "fidelity": _round(f2, 8)},
        "photon_distribution": [_round(v, 8) for v in analysis.photon_number_distribution(res.state)],
    }
    path = out / f"fcc_n{projected_n}.json"
    _dump_json(report, path)
    _record(out, cfg, f"fcc_n{projected_n}", [path], time.perf_counter() - t0)
    return path
