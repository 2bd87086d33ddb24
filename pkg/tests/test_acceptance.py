"""Acceptance criteria, one test per criterion.

Each test records a one-line PASS/FAIL summary; ``conftest.py`` prints the
lines at the end of the session.  Running this file directly prints them too.
"""

import time

import numpy as np
import pytest

from catlab.analysis import (
    best_cat_axis,
    fit_four_component_cat,
    fit_two_component_cat,
    trace_distance,
    wigner,
)
from catlab.channels import apply_beam_splitter, fcc_synthesis, loss_channel
from catlab.fock import (
    basis_state,
    expectation,
    number_operator,
    partial_trace,
    quadrature_operator,
    tensor_product,
    variance,
)
from catlab.homodyne import quadrature_moments, sample_dataset
from catlab.pipeline import ExperimentConfig, cmd_end2end
from catlab.states import (
    CatSpec,
    GaussianNoiseSpec,
    SqueezingSpec,
    coherent,
    odd_cat,
    photon_subtracted_squeezed,
    squeezed_thermal_from_db,
    squeezed_vacuum,
    thermal_state,
    two_mode_squeezed_vacuum,
)
from catlab.tomography import TomographyConfig, mle_reconstruct

RESULTS: dict[int, str] = {}


def record(number: int, name: str, ok: bool, detail: str) -> None:
    RESULTS[number] = f"[{'PASS' if ok else 'FAIL'}] criterion {number} ({name}): {detail}"
    print(RESULTS[number])
    assert ok, RESULTS[number]


def test_criterion_1_purity():
    start = time.perf_counter()
    rho = squeezed_thermal_from_db(GaussianNoiseSpec(3.2, 4.2), 30)
    p = float(np.vdot(rho.matrix, rho.matrix).real)
    ms = 1e3 * (time.perf_counter() - start)
    record(1, "purity", abs(p - 0.891) <= 0.005, f"Tr[rho^2] = {p:.5f} (target 0.891 +- 0.005), {ms:.0f} ms")


def test_criterion_2_decoupling():
    r, d = 0.4, 12
    out = apply_beam_splitter(two_mode_squeezed_vacuum(r, d), 0.5)
    amp = squeezed_vacuum(SqueezingSpec(r, "amplitude"), d, tol=1e-4)
    pha = squeezed_vacuum(SqueezingSpec(r, "phase"), d, tol=1e-4)
    target = tensor_product(amp, pha).normalize()
    fid = abs(target.inner(out)) ** 2
    vx_c = variance(quadrature_operator(d, 0.0), partial_trace(out, 1))
    vp_d = variance(quadrature_operator(d, np.pi / 2), partial_trace(out, 2))
    expected = np.exp(-2 * r) / 2
    ok = fid >= 1 - 1e-6 and abs(vx_c - expected) <= 1e-4 and abs(vp_d - expected) <= 1e-4
    record(2, "squeezing decoupling", ok,
           f"joint fidelity 1 - {1 - fid:.1e}; V[X_c] = {vx_c:.6f}, V[P_d] = {vp_d:.6f} (target {expected:.6f})")


def test_criterion_3_cat_approximation():
    start = time.perf_counter()
    alphas = np.arange(0.05, 3.0, 0.001)
    parts, ok = [], True
    for r in (0.3, 0.45, 0.6):
        # r = 0.6 leaves ~1e-6 of its norm above n = 24; the overlaps are insensitive to that
        psi = photon_subtracted_squeezed(SqueezingSpec(r), 25, tol=1e-5)
        axis, fx, fp = best_cat_axis(psi)
        fit = fx if axis == "x" else fp
        # brute-force oracle: overlaps with explicitly constructed cats on a fine grid
        brute = np.array([abs(odd_cat(CatSpec(a, axis), 25, tol=1.0).inner(psi)) ** 2 for a in alphas])
        a_star, f_star = float(alphas[brute.argmax()]), float(brute.max())
        agree = abs(fit.fidelity_star - f_star) < 1e-4 and abs(fit.alpha_star - a_star) < 0.01
        needs = a_star <= 1.2
        ok &= agree and (f_star >= 0.99 or not needs)
        parts.append(f"r={r}: alpha*={a_star:.3f} F*={f_star:.5f}" + ("" if needs else " (alpha*>1.2, exempt)"))
    secs = time.perf_counter() - start
    ok &= secs < 10
    record(3, "cat approximation", ok, "; ".join(parts) + f"; {secs:.1f} s")


def test_criterion_4_headline_numbers(tmp_path):
    targets = {"c": (0.61, 1.19, -0.12), "d": (0.60, 1.21, -0.14)}
    start = time.perf_counter()
    res = cmd_end2end(ExperimentConfig(), tmp_path)
    secs = time.perf_counter() - start
    parts, ok = [], res.converged and secs < 600
    for mode, (f0, a0, w0) in targets.items():
        rep = res.reports[mode]
        f, a, w = rep["fidelity_star"], rep["alpha_star"], rep["wigner_origin"]
        checks = (abs(f - f0) <= 0.05, abs(a - a0) <= 0.10, abs(w - w0) <= 0.04)
        ok &= all(checks)
        flags = "".join("ok " if c else "OUT " for c in checks).strip()
        parts.append(f"{mode}: F*={f:.3f} (vs {f0}) alpha*={a:.3f} (vs {a0}) W(0,0)={w:.3f} (vs {w0}) [{flags}]")
    record(4, "end-to-end headline numbers", ok, "; ".join(parts) + f"; {secs:.1f} s")


CLOSED_LOOP_STATES = {
    "|1>": lambda: basis_state(13, 1).to_density(),
    "odd cat 1.2": lambda: odd_cat(CatSpec(1.2), 13, tol=1e-5).to_density(),
    "coherent 1.0": lambda: coherent(1.0, 13, tol=1e-6).to_density(),
    "squeezed thermal": lambda: squeezed_thermal_from_db(GaussianNoiseSpec(3.2, 4.2), 13, tol=1e-5),
    "photon-subtracted r=0.45": lambda: photon_subtracted_squeezed(SqueezingSpec(0.45), 13, tol=1e-3).to_density(),
    "thermal 0.5": lambda: thermal_state(0.5, 13),
}


def test_criterion_5_tomography_closed_loop():
    worst_td, worst_step, parts = 0.0, np.inf, []
    for k, (name, make) in enumerate(CLOSED_LOOP_STATES.items()):
        rho = make()
        assert expectation(number_operator(13), rho).real <= 2
        for eta in (1.0, 0.81):
            ds = sample_dataset(loss_channel(rho, eta), 12, 50_000, seed=100 + k)
            res = mle_reconstruct(ds, TomographyConfig(efficiency_correction=eta))
            td = trace_distance(res.rho, rho)
            worst_td = max(worst_td, td)
            worst_step = min(worst_step, float(np.min(np.diff(res.loglik_trace))))
            parts.append(f"{name}@{eta}: {td:.3f}")
    ok = worst_td <= 0.05 and worst_step >= -1e-9
    record(5, "tomography closed loop", ok,
           f"max trace distance {worst_td:.3f} (<= 0.05), min log-likelihood step {worst_step:.1e}; " + ", ".join(parts))


def test_criterion_6_wigner_conventions():
    w0 = wigner(basis_state(6, 0), [0.0], [0.0]).values[0, 0]
    w1 = wigner(basis_state(6, 1), [0.0], [0.0]).values[0, 0]
    states = {
        "vacuum": basis_state(20, 0),
        "|1>": basis_state(20, 1),
        "|3>": basis_state(20, 3),
        "odd cat 1.2": odd_cat(CatSpec(1.2, "p"), 20),
        "squeezed r=0.4": squeezed_vacuum(SqueezingSpec(0.4), 20),
        "squeezed thermal": squeezed_thermal_from_db(GaussianNoiseSpec(3.2, 4.2), 30),
    }
    worst = 0.0
    for state in states.values():
        # sigma: the larger rms quadrature spread, so +-5 sigma also covers displaced lobes
        sigma = max(np.sqrt(var + mean**2) for mean, var in (quadrature_moments(state, t) for t in (0, np.pi / 2)))
        axis = np.linspace(-5 * sigma, 5 * sigma, 301)
        worst = max(worst, abs(wigner(state, axis, axis).normalization - 1))
    ok = abs(w0 - 1 / np.pi) <= 1e-9 and abs(w1 + 1 / np.pi) <= 1e-9 and worst <= 1e-3
    record(6, "Wigner conventions", ok,
           f"W_vac(0,0) - 1/pi = {w0 - 1 / np.pi:.1e}, W_1(0,0) + 1/pi = {w1 + 1 / np.pi:.1e}, "
           f"max |integral - 1| = {worst:.1e} over {len(states)} states")


def test_criterion_7_loss_algebra():
    rho = squeezed_thermal_from_db(GaussianNoiseSpec(3.2, 4.2), 30)
    n = number_operator(30)
    compose = np.max(np.abs(loss_channel(loss_channel(rho, 0.9), 0.7).matrix - loss_channel(rho, 0.63).matrix))
    ident = np.max(np.abs(loss_channel(rho, 1.0).matrix - rho.matrix))
    n_in = expectation(n, rho).real
    scale = max(abs(expectation(n, loss_channel(rho, eta)).real - eta * n_in) for eta in (0.1, 0.5, 0.81, 0.9))
    ok = compose <= 1e-9 and ident <= 1e-12 and scale <= 1e-9
    record(7, "loss-channel algebra", ok,
           f"composition err {compose:.1e}, identity err {ident:.1e}, mean-photon scaling err {scale:.1e}")


def test_criterion_8_fcc():
    start = time.perf_counter()
    c = photon_subtracted_squeezed(SqueezingSpec(0.6, "amplitude"), 15, tol=1e-3)
    d = photon_subtracted_squeezed(SqueezingSpec(0.6, "phase"), 15, tol=1e-3)
    out = fcc_synthesis(c, d, 3)
    beta, k, f4 = fit_four_component_cat(out.pure)
    _, parity, f2 = fit_two_component_cat(out.pure)
    secs = time.perf_counter() - start
    record(8, "four-component synthesis", f4 > f2 and secs < 30,
           f"F4 = {f4:.4f} (k={k}, |beta|={abs(beta):.3f}) vs F2 = {f2:.4f}, p = {out.probability:.3f}, {secs:.1f} s")


def test_criterion_9_determinism(tmp_path):
    cfg = ExperimentConfig()
    cmd_end2end(cfg, tmp_path / "a")
    cmd_end2end(cfg, tmp_path / "b")
    # timings.json holds wall-clock times only and is deliberately outside the checksummed set
    files = sorted(p.name for p in (tmp_path / "a").iterdir() if p.name != "timings.json")
    same = [(tmp_path / "a" / f).read_bytes() == (tmp_path / "b" / f).read_bytes() for f in files]
    record(9, "determinism", all(same) and len(files) > 0,
           f"{sum(same)}/{len(files)} artifacts byte-identical across two seeded runs")


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-q"]))
