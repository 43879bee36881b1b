import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from metatfr.symplectic import (
    Chirp,
    Dilate,
    FactorizationError,
    Fourier,
    GeneratorWord,
    NotSymplecticError,
    check_symplectic,
    expected_phi_wigner,
    factor_generators,
    field_to_probe_matrix,
    is_symplectic,
    permutation_matrix,
    probe_to_field_matrix,
    random_symplectic,
    random_word,
    snap_symplectic,
    standard_J,
    symplectic_defect,
    symplectic_form,
    tensor_reorder_permutation,
)


@pytest.mark.parametrize("D", [1, 2, 3])
def test_standard_J(D):
    J = standard_J(D)
    assert np.array_equal(J @ J, -np.eye(2 * D))
    assert np.array_equal(J.T, -J)
    if D == 1:
        assert np.array_equal(J, [[0, 1], [-1, 0]])


def test_symplectic_form(rng):
    assert symplectic_form([1, 0], [0, 1]) == 1
    lam, mu = rng.normal(size=(2, 4))
    assert symplectic_form(lam, lam) == pytest.approx(0, abs=1e-15)
    assert symplectic_form(lam, mu) == pytest.approx(-symplectic_form(mu, lam))
    with pytest.raises(ValueError):
        symplectic_form([1, 0], [1, 0, 0, 0])


def test_is_symplectic_examples():
    assert is_symplectic(np.eye(2))
    assert is_symplectic(standard_J(1))
    assert not is_symplectic(np.diag([2.0, 1.0]))
    with pytest.raises(ValueError):
        is_symplectic(np.eye(3))


def test_check_symplectic_rejects():
    with pytest.raises(NotSymplecticError):
        check_symplectic(np.diag([2.0, 1.0]))


@pytest.mark.parametrize(
    "fac",
    [Fourier((1,)), Fourier((1, -1)), Fourier((0, 1)), Chirp(np.array([[0.3, -0.2], [-0.2, 1.1]])),
     Dilate(np.array([[1.2, 0.4], [-0.1, 0.9]]))],
)
def test_generators_are_symplectic(fac):
    M = fac.matrix()
    assert is_symplectic(M, 1e-14)
    assert np.abs(M @ fac.inverse().matrix() - np.eye(M.shape[0])).max() <= 1e-14


def test_generator_validation():
    with pytest.raises(ValueError):
        Chirp(np.array([[0.0, 1.0], [0.0, 0.0]]))
    with pytest.raises(ValueError):
        Dilate(np.zeros((2, 2)))


def test_word_order():
    # factors are listed in application order, so the matrix is the reversed product
    a, b = Chirp(np.array([[0.5]])), Fourier((1,))
    w = GeneratorWord([a, b], 1)
    assert np.allclose(w.matrix(), b.matrix() @ a.matrix())
    assert np.allclose(w.inverse().matrix(), np.linalg.inv(w.matrix()))


def test_factor_J_is_single_fourier():
    w = factor_generators(standard_J(1))
    assert [f.kind for f in w] == ["fourier"]


def test_factor_lower_shear_is_chirp():
    w = factor_generators(np.array([[1.0, 0.0], [0.7, 1.0]]))
    assert [f.kind for f in w] == ["chirp"]
    assert w.factors[0].P[0, 0] == pytest.approx(0.7)


def test_factor_random_seed7():
    A = random_symplectic(7, 2)
    w = factor_generators(A)
    assert len(w) <= 6
    assert np.abs(w.matrix() - A).max() <= 1e-8


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6), st.sampled_from([1, 2]), st.integers(0, 6))
def test_factor_reconstructs(seed, D, word_len):
    A = random_symplectic(seed, D, word_len)
    assert is_symplectic(A)
    w = factor_generators(A)
    assert len(w) <= 6
    assert np.abs(w.matrix() - A).max() <= 1e-8


def test_factor_rejects_non_symplectic():
    with pytest.raises(NotSymplecticError):
        factor_generators(np.diag([2.0, 1.0]))


def test_factor_block_diagonal_and_swaps():
    cases = [
        np.diag([2.0, 0.5, 0.5, 2.0]),
        Fourier((1, 0)).matrix(),
        Fourier((0, -1)).matrix() @ Chirp(np.diag([0.4, -0.3])).matrix(),
    ]
    for A in cases:
        assert np.abs(factor_generators(A).matrix() - A).max() <= 1e-8


def test_factorization_error_type():
    assert issubclass(FactorizationError, Exception)


def test_random_symplectic_determinism():
    assert np.array_equal(random_symplectic(3, 2), random_symplectic(3, 2))
    assert np.array_equal(random_symplectic(3, 2, 0), np.eye(4))
    assert not np.array_equal(random_symplectic(3, 2), random_symplectic(4, 2))


def test_random_word_bounds():
    for seed in range(200):
        for fac in random_word(seed, 2, 4):
            if fac.kind == "chirp":
                assert np.linalg.norm(fac.P, 2) <= 2
            elif fac.kind == "dilate":
                assert np.linalg.cond(fac.L) <= 4


def test_form_preserved(rng):
    for seed in range(10):
        A = random_symplectic(seed, 2)
        for lam, mu in rng.normal(size=(10, 2, 4)):
            assert symplectic_form(A @ lam, A @ mu) == pytest.approx(symplectic_form(lam, mu), abs=1e-9)


def test_snap_symplectic(rng):
    A = random_symplectic(11, 2)
    noisy = A + 1e-4 * rng.normal(size=A.shape)
    snapped = snap_symplectic(noisy)
    assert symplectic_defect(snapped) <= 1e-10
    assert np.abs(snapped - A).max() <= 1e-3


def test_reorder_permutation():
    p = tensor_reorder_permutation(1)
    v = np.array([10.0, 20.0, 30.0, 40.0])
    assert np.array_equal(v[p], [10, 30, 20, 40])
    assert np.array_equal(v[p][p], v)
    p2 = tensor_reorder_permutation(2)
    assert np.array_equal(p2, [0, 1, 4, 5, 2, 3, 6, 7])
    assert np.array_equal(p2[p2], np.arange(8))
    P = permutation_matrix(p)
    assert np.array_equal(P @ v, v[p])


def test_expected_phi_wigner():
    M = expected_phi_wigner("sesquilinear")
    assert np.array_equal(M[0], [0.5, 0, 0.5, 0])
    lam = np.array([0.3, -0.7])
    assert np.allclose(M @ np.concatenate([lam, lam]), [0.3, -0.7, 0, 0])
    for mode in ("sesquilinear", "bilinear"):
        A = probe_to_field_matrix(expected_phi_wigner(mode), mode)
        assert is_symplectic(A, 1e-12)
        assert np.array_equal(field_to_probe_matrix(A, mode), expected_phi_wigner(mode))
    assert np.array_equal(expected_phi_wigner("bilinear")[:, 3], -M[:, 3])
