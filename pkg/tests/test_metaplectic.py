import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from metatfr.grid import AdmissibilityError, Grid, GridMismatchError, fourier, gaussian, hermite, l2_norm, tensor_product
from metatfr.metaplectic import (
    ChirpAliasError,
    DilationError,
    MetaplecticOp,
    apply_factor,
    collins_oracle,
    intertwining_residual,
    phase_modulo_distance,
)
from metatfr.shifts import rho
from metatfr.symplectic import Chirp, Dilate, GeneratorWord, random_symplectic, random_word, standard_J


def test_identity_operator(grid64):
    f = hermite(2, grid64)
    assert np.array_equal(MetaplecticOp(np.eye(2))(f).values, f.values)


def test_J_is_fourier(grid64):
    f = hermite(1, grid64) + gaussian(grid64, center=0.3)
    assert phase_modulo_distance(MetaplecticOp(standard_J(1))(f), fourier(f)) <= 1e-9 * l2_norm(f)


def test_chirp_keeps_modulus(grid64):
    f = hermite(3, grid64)
    out = MetaplecticOp(np.array([[1.0, 0.0], [1.0, 1.0]]))(f)
    assert np.abs(np.abs(out.values) - np.abs(f.values)).max() <= 1e-14


@pytest.mark.parametrize("D", [1, 2])
def test_unitary_and_invertible(D, grid128):
    g = Grid(128, D)
    f = hermite(2, grid128) if D == 1 else tensor_product(hermite(1, grid128), gaussian(grid128))
    assert g == f.grid
    for seed in range(5):
        op = MetaplecticOp(random_symplectic(seed, D))
        out = op(f)
        assert abs(l2_norm(out) - l2_norm(f)) <= 1e-9
        assert l2_norm(op.inverse()(out) - f) <= 1e-9


def test_homomorphism_modulo_phase(grid128):
    f = tensor_product(gaussian(grid128), hermite(1, grid128))
    u, v = random_word(1, 2), random_word(2, 2)
    uv = MetaplecticOp(word=v.then(u))
    lhs = MetaplecticOp(uv.matrix)(f)
    rhs = MetaplecticOp(word=u)(MetaplecticOp(word=v)(f))
    assert phase_modulo_distance(lhs, rhs) <= 1e-7 * l2_norm(f)


def test_collins_J(grid64):
    for n, phase in [(0, 1.0), (1, -1j)]:
        h = hermite(n, grid64)
        out = collins_oracle(standard_J(1), h)
        assert phase_modulo_distance(out, phase * h) <= 1e-9
        assert phase_modulo_distance(out, fourier(h)) <= 1e-9


def test_collins_agrees_with_word(grid64):
    # the Riemann sum aliases when |B| is small, so only well-conditioned free matrices are used
    checked = 0
    seed = 0
    while checked < 20:
        A = random_symplectic(seed, 1, 4)
        seed += 1
        if abs(A[0, 1]) < 0.9:
            continue
        f = hermite(checked % 4, grid64)
        u, v = MetaplecticOp(A)(f), collins_oracle(A, f)
        assert phase_modulo_distance(u, v) <= 1e-6 * l2_norm(f)
        checked += 1


def test_collins_two_variables():
    g = Grid(32)
    A = standard_J(2)
    F = tensor_product(hermite(1, g), gaussian(g))
    assert phase_modulo_distance(collins_oracle(A, F), MetaplecticOp(A)(F)) <= 1e-9


def test_collins_errors(grid64):
    with pytest.raises(np.linalg.LinAlgError):
        collins_oracle(np.eye(2), gaussian(grid64))
    with pytest.raises(ValueError):
        collins_oracle(standard_J(1), gaussian(Grid(256)))


def test_intertwining_zero_shift(grid64):
    op = MetaplecticOp(random_symplectic(0, 1))
    assert intertwining_residual(op, [0.0, 0.0], hermite(1, grid64)) <= 1e-12


def test_intertwining_J(grid128):
    op = MetaplecticOp(standard_J(1))
    assert intertwining_residual(op, [0.6, 0.0], gaussian(grid128)) <= 1e-9


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10**6), st.integers(0, 4), st.lists(st.floats(-0.5, 0.5), min_size=2, max_size=2))
def test_intertwining_D1(seed, n, lam):
    grid = Grid(128)
    op = MetaplecticOp(random_symplectic(seed, 1))
    assert intertwining_residual(op, lam, hermite(n, grid)) <= 1e-7


def test_intertwining_D2(grid128, rng):
    F = tensor_product(gaussian(grid128), gaussian(grid128))
    for seed in range(5):
        op = MetaplecticOp(random_symplectic(100 + seed, 2))
        assert intertwining_residual(op, rng.uniform(-0.5, 0.5, 4), F) <= 1e-7


def test_errors(grid64):
    op2 = MetaplecticOp(np.eye(4))
    with pytest.raises(GridMismatchError):
        op2(gaussian(grid64))
    with pytest.raises(AdmissibilityError):
        MetaplecticOp(standard_J(1))(gaussian(grid64, center=3.6))
    F = tensor_product(gaussian(grid64), gaussian(grid64))
    with pytest.raises(DilationError):
        apply_factor(Dilate(np.diag([4.0, 0.25])), F)
    with pytest.raises(ChirpAliasError):
        apply_factor(Chirp(np.array([[2.5]])), gaussian(grid64))
    apply_factor(Chirp(np.array([[2.5]])), gaussian(Grid(128)))


def test_word_and_matrix_must_agree_in_repr():
    op = MetaplecticOp(word=GeneratorWord([Chirp(np.array([[0.2]]))], 1))
    assert op.dim == 1
    assert "chirp" in repr(op)
