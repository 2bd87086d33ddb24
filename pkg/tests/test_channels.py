import numpy as np
import pytest

from catlab.analysis import fidelity, fit_four_component_cat, fit_two_component_cat
from catlab.channels import (
    DetectorModel,
    apply_beam_splitter,
    beam_splitter_projection,
    beam_splitter_unitary,
    fcc_synthesis,
    ideal_photon_subtraction,
    loss_channel,
    loss_kraus,
    tap_and_herald,
)
from catlab.errors import DomainError, NoHeraldError
from catlab.fock import (
    StateVector,
    basis_state,
    expectation,
    ladder_operators,
    number_operator,
    same_up_to_phase,
    tensor_product,
)
from catlab.states import (
    GaussianNoiseSpec,
    SqueezingSpec,
    photon_subtracted_squeezed,
    squeezed_thermal_from_db,
    squeezed_vacuum,
    thermal_state,
    two_mode_squeezed_vacuum,
)


def test_unit_transmissivity_is_identity():
    np.testing.assert_allclose(beam_splitter_unitary(1.0, 5).matrix, np.eye(25), atol=1e-14)


@pytest.mark.parametrize("t", [0.2, 0.5, 0.96])
def test_beam_splitter_is_unitary(t):
    u = beam_splitter_unitary(t, 6).matrix
    np.testing.assert_allclose(u @ u.conj().T, np.eye(36), atol=1e-12)


def test_heisenberg_action():
    t, d = 0.3, 12
    u = beam_splitter_unitary(t, d).matrix
    a = ladder_operators(d)[0].matrix
    eye = np.eye(d)
    a1, a2 = np.kron(a, eye), np.kron(eye, a)
    # compare on states with fewer than d photons in total, where the matrices are exact
    low = np.array([i + j < d - 1 for i in range(d) for j in range(d)])
    lhs = (u.conj().T @ a1 @ u)[:, low]
    rhs = (np.sqrt(t) * a1 + np.sqrt(1 - t) * a2)[:, low]
    np.testing.assert_allclose(lhs, rhs, atol=1e-12)


def test_single_photon_splits():
    out = apply_beam_splitter(tensor_product(basis_state(3, 1), basis_state(3, 0)), 0.5)
    expected = np.zeros(9)
    expected[3], expected[1] = 1 / np.sqrt(2), -1 / np.sqrt(2)
    np.testing.assert_allclose(out.amplitudes, expected, atol=1e-14)


def test_tmsv_decouples_into_squeezed_pair():
    r, d = 0.4, 12
    out = apply_beam_splitter(two_mode_squeezed_vacuum(r, d), 0.5)
    amp = squeezed_vacuum(SqueezingSpec(r, "amplitude"), d, tol=1e-4)
    pha = squeezed_vacuum(SqueezingSpec(r, "phase"), d, tol=1e-4)
    target = tensor_product(amp, pha).normalize()
    assert fidelity(out, target) >= 1 - 1e-6


def test_mixed_beam_splitter_matches_pure():
    psi = tensor_product(basis_state(4, 1), basis_state(4, 2))
    pure = apply_beam_splitter(psi, 0.3)
    mixed = apply_beam_splitter(psi.to_density(), 0.3)
    np.testing.assert_allclose(mixed.matrix, pure.to_density().matrix, atol=1e-12)


def test_unit_loss_is_identity():
    rho = thermal_state(0.4, 8)
    assert np.max(np.abs(loss_channel(rho, 1.0).matrix - rho.matrix)) < 1e-12


def test_single_photon_loss():
    out = loss_channel(basis_state(4, 1), 0.9)
    np.testing.assert_allclose(np.diag(out.matrix).real, [0.1, 0.9, 0, 0], atol=1e-14)


def test_loss_scales_mean_photon():
    rho = squeezed_thermal_from_db(GaussianNoiseSpec(3.2, 4.2), 30)
    n = number_operator(30)
    assert expectation(n, loss_channel(rho, 0.81)).real == pytest.approx(0.81 * expectation(n, rho).real, abs=1e-9)


def test_loss_composes():
    rho = squeezed_thermal_from_db(GaussianNoiseSpec(3.2, 4.2, "phase"), 25)
    two_step = loss_channel(loss_channel(rho, 0.9), 0.8)
    np.testing.assert_allclose(two_step.matrix, loss_channel(rho, 0.72).matrix, atol=1e-12)


def test_kraus_completeness():
    ops = loss_kraus(0.7, 9)
    total = sum(a.T @ a for a in ops)
    np.testing.assert_allclose(total, np.eye(9), atol=1e-12)


@pytest.mark.parametrize("eta", [-0.1, 1.5])
def test_loss_rejects_bad_eta(eta):
    with pytest.raises(DomainError):
        loss_channel(basis_state(3, 0), eta)


def test_vacuum_cannot_herald():
    with pytest.raises(NoHeraldError):
        tap_and_herald(basis_state(6, 0), 0.04, DetectorModel("on-off", 0.9))


def test_zero_tap_cannot_herald():
    with pytest.raises(NoHeraldError):
        tap_and_herald(basis_state(6, 1), 0.0, DetectorModel("ideal"))


def test_weak_tap_approaches_photon_subtraction():
    spec = SqueezingSpec(0.4)
    out = tap_and_herald(squeezed_vacuum(spec, 25), 0.001, DetectorModel("ideal"))
    assert fidelity(out.state, photon_subtracted_squeezed(spec, 25)) >= 0.999


def test_on_off_herald_probability_first_order():
    rho = squeezed_thermal_from_db(GaussianNoiseSpec(3.2, 4.2), 30)
    nbar = expectation(number_operator(30), rho).real
    out = tap_and_herald(rho, 0.04, DetectorModel("on-off", 0.5))
    estimate = 0.04 * 0.5 * nbar
    assert abs(out.probability - estimate) <= 0.2 * estimate


def test_herald_trace_and_parity():
    rho = squeezed_thermal_from_db(GaussianNoiseSpec(3.2, 4.2), 30)
    out = tap_and_herald(rho, 0.04, DetectorModel("on-off", 0.9))
    assert np.trace(out.state.matrix).real == pytest.approx(1.0)
    pops = np.diag(out.state.matrix).real
    assert pops[1::2].sum() > 0.6


def test_subtraction_of_one_photon():
    out = ideal_photon_subtraction(basis_state(5, 1))
    assert out.state.matrix[0, 0].real == pytest.approx(1.0)
    assert out.probability == pytest.approx(1.0)


def test_subtraction_of_squeezed_vacuum():
    spec = SqueezingSpec(0.5)
    out = ideal_photon_subtraction(squeezed_vacuum(spec, 40))
    target = photon_subtracted_squeezed(spec, 40)
    assert fidelity(out.state, target) == pytest.approx(1.0, abs=1e-9)
    w, v = np.linalg.eigh(out.state.matrix)
    assert same_up_to_phase(StateVector(v[:, -1], 40), target, tol=1e-6)


def test_subtraction_of_thermal_state():
    d, nbar = 60, 1.0
    rho = thermal_state(nbar, d)
    out = ideal_photon_subtraction(rho)
    a = ladder_operators(d)[0].matrix
    direct = a @ rho.matrix @ a.T
    assert out.probability == pytest.approx(np.trace(direct).real)
    np.testing.assert_allclose(out.state.matrix, direct / np.trace(direct), atol=1e-12)
    # a photon-subtracted thermal state has twice the mean occupation
    assert expectation(number_operator(d), out.state).real == pytest.approx(2 * nbar, abs=1e-6)


def test_hong_ou_mandel_projection():
    one = basis_state(4, 1)
    out = beam_splitter_projection(one, one, 2)
    assert out.state.matrix[0, 0].real == pytest.approx(1.0)
    assert out.probability == pytest.approx(0.5)


def test_projection_without_photons():
    psi = squeezed_vacuum(SqueezingSpec(1e-4), 3)
    with pytest.raises(NoHeraldError):
        beam_splitter_projection(psi, psi, 5)


def test_fcc_precondition():
    psi = photon_subtracted_squeezed(SqueezingSpec(0.6), 15, tol=1e-3)
    with pytest.raises(DomainError, match="larger than 2"):
        fcc_synthesis(psi, psi, 2)


def test_fcc_prefers_four_component_cat():
    c = photon_subtracted_squeezed(SqueezingSpec(0.6, "amplitude"), 15, tol=1e-3)
    d = photon_subtracted_squeezed(SqueezingSpec(0.6, "phase"), 15, tol=1e-3)
    out = fcc_synthesis(c, d, 3)
    assert out.pure is not None
    _, _, f4 = fit_four_component_cat(out.pure)
    _, _, f2 = fit_two_component_cat(out.pure)
    assert f4 > f2


def test_fcc_mixed_inputs_match_pure_path():
    c = photon_subtracted_squeezed(SqueezingSpec(0.5, "amplitude"), 10, tol=1e-2)
    d = photon_subtracted_squeezed(SqueezingSpec(0.5, "phase"), 10, tol=1e-2)
    pure = fcc_synthesis(c, d, 3)
    mixed = fcc_synthesis(c.to_density(), d.to_density(), 3)
    assert mixed.probability == pytest.approx(pure.probability, rel=1e-10)
    np.testing.assert_allclose(mixed.state.matrix, pure.state.matrix, atol=1e-12)


def test_weak_tap_fidelity_is_monotone():
    spec = SqueezingSpec(0.4)
    psi = squeezed_vacuum(spec, 25)
    target = photon_subtracted_squeezed(spec, 25)
    fids = [fidelity(tap_and_herald(psi, r, DetectorModel("ideal")).state, target)
            for r in (0.3, 0.1, 0.03, 0.01, 0.001)]
    assert np.all(np.diff(fids) > 0)


def test_independent_heralds_compose():
    d, tap = 10, 0.1
    c = squeezed_vacuum(SqueezingSpec(0.3, "amplitude"), d, tol=1e-5)
    e = squeezed_vacuum(SqueezingSpec(0.3, "phase"), d, tol=1e-5)
    # joint evolution of (signal c, tap c, signal d, tap d), both taps projected on |1>
    u = beam_splitter_unitary(1 - tap, d).matrix
    vac = basis_state(d, 0).amplitudes
    branch_c = (u @ np.kron(c.amplitudes, vac)).reshape(d, d)[:, 1]
    branch_d = (u @ np.kron(e.amplitudes, vac)).reshape(d, d)[:, 1]
    joint = np.einsum("i,j->ij", branch_c, branch_d).reshape(-1)
    p_joint = np.vdot(joint, joint).real
    one_c = tap_and_herald(c, tap, DetectorModel("ideal"))
    one_d = tap_and_herald(e, tap, DetectorModel("ideal"))
    assert p_joint == pytest.approx(one_c.probability * one_d.probability, rel=1e-12)
    product = np.kron(one_c.state.matrix, one_d.state.matrix)
    np.testing.assert_allclose(np.outer(joint, joint.conj()) / p_joint, product, atol=1e-12)
