import numpy as np
import pytest

from metatfr.covariance import (
    THRESHOLDS,
    BlackBoxTFR,
    a_wigner_box,
    certify,
    default_holdout,
    estimate_shift,
    negative_control,
    recover_phi,
    run_covariance,
    stft_box,
    tensor_box,
    wigner_box,
)
from metatfr.grid import Grid, gaussian, hermite, tensor_product
from metatfr.shifts import rho
from metatfr.symplectic import expected_phi_wigner, is_symplectic, random_symplectic


@pytest.fixture(scope="module")
def ref64():
    g = Grid(64)
    return tensor_product(gaussian(g), gaussian(g, center=0.2))


def test_estimate_shift_half_grid(ref64):
    d = ref64.grid.delta
    for nu0 in ([0.5, -1.0, 1.5, 0.0], [-2.5, 3.0, 0.0, 0.5]):
        nu0 = np.array(nu0) * d
        est = estimate_shift(rho(nu0, ref64), ref64)
        assert np.abs(est.nu - nu0).max() <= 1e-9
        assert est.residual <= 1e-9
        assert est.ok


def test_estimate_shift_off_grid(ref64, rng):
    for _ in range(5):
        nu0 = rng.uniform(-1, 1, 4)
        nu0 *= min(1.0, 1.0 / np.linalg.norm(nu0))
        est = estimate_shift(rho(nu0, ref64) * np.exp(0.4j), ref64)
        assert np.abs(est.nu - nu0).max() <= 1e-4
        assert est.c == pytest.approx(np.exp(0.4j), abs=1e-6)


def test_estimate_shift_flags_orthogonal(grid64):
    h0, h1 = hermite(0, grid64), hermite(1, grid64)
    est = estimate_shift(tensor_product(h0, h0), tensor_product(h1, h1))
    assert est.residual > 0.5
    assert not est.ok


def test_recover_tensor_is_identity(grid64):
    phi = recover_phi(tensor_box(), grid=grid64)
    assert np.abs(phi.field_matrix - np.eye(4)).max() <= 1e-6


def test_recover_wigner(grid64):
    phi = recover_phi(wigner_box("sesquilinear"), grid=grid64)
    assert np.abs(phi.matrix - expected_phi_wigner("sesquilinear")).max() <= 1e-3
    assert phi.symplectic_defect <= 1e-3
    assert is_symplectic(phi.field_matrix, 1e-3)
    assert phi.c_modulus_drift <= 1e-3


@pytest.mark.parametrize("seed", [0, 5])
def test_recover_a_wigner(grid64, seed):
    A = random_symplectic(seed, 2)
    phi = recover_phi(a_wigner_box(A), grid=grid64, workers=2)
    assert np.abs(phi.field_matrix - A).max() <= 1e-3
    assert phi.homogeneity_defect <= 1e-3
    assert max(phi.integer_defects) <= 1e-3


def test_certify_scaled(grid64):
    A = random_symplectic(3, 2)
    a0 = 2 * np.exp(1j * np.pi / 3)
    R = a_wigner_box(A, a0)
    rep = certify(R, recover_phi(R, grid=grid64), grid=grid64)
    assert abs(rep.a) == pytest.approx(2, rel=1e-3)
    assert rep.match_residual <= 1e-4
    assert rep.passed


def test_certify_tensor(grid64):
    rep = run_covariance(tensor_box(), grid64)
    assert rep.a == pytest.approx(1, abs=1e-9)
    assert rep.match_residual <= 1e-9


@pytest.mark.parametrize("box", [wigner_box("sesquilinear"), wigner_box("bilinear"), stft_box()])
def test_isometric_representations(grid64, box):
    rep = run_covariance(box, grid64)
    assert rep.passed
    assert rep.isometry_ratio_spread <= 1e-6
    assert abs(rep.a) == pytest.approx(1, abs=1e-6)


@pytest.mark.parametrize("kind", ["broken-phase", "nonlinear-phi", "degenerate"])
def test_negative_controls_fail(grid64, kind):
    rep = run_covariance(negative_control(kind), grid64)
    assert not rep.passed
    assert rep.phi.max_probe_residual > 0.05 or rep.nondegeneracy_min < THRESHOLDS["nondegeneracy_min"]


def test_degenerate_control_vanishes_on_orthogonal(grid64):
    R = negative_control("degenerate")
    rep = certify(R, recover_phi(R, grid=grid64), grid=grid64)
    assert rep.nondegeneracy_min < THRESHOLDS["nondegeneracy_min"]


def test_report_serialisable(grid64):
    import json

    d = run_covariance(tensor_box(), grid64).to_dict()
    json.dumps(d)
    assert d["thresholds"] == THRESHOLDS
    assert d["verdict"]["pass"] is True


def test_vanishing_representation(grid64):
    R = BlackBoxTFR(lambda f, g: tensor_product(f, g) * 0.0, name="zero")
    with pytest.raises(ValueError):
        recover_phi(R, grid=grid64)


def test_default_holdout_pairs(grid64):
    assert len(default_holdout(grid64)) == 3
