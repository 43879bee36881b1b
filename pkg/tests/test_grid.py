import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from metatfr.grid import (
    AdmissibilityError,
    Field,
    Grid,
    GridMismatchError,
    check_admissible,
    conjugate,
    fourier,
    gaussian,
    hermite,
    inner_product,
    l2_norm,
    tail_fraction,
    tensor_product,
)


def test_grid_is_self_dual():
    for N in (16, 64, 128, 512):
        g = Grid(N)
        assert g.delta * g.period == pytest.approx(1.0)
        assert g.freqs()[1] - g.freqs()[0] == pytest.approx(g.delta)
        assert g.axis()[N // 2] == 0.0


@pytest.mark.parametrize("N,vars_", [(15, 1), (8, 1), (64, 3)])
def test_grid_rejects_bad_parameters(N, vars_):
    with pytest.raises(ValueError):
        Grid(N, vars_)


def test_field_shape_checked(grid64):
    with pytest.raises(ValueError):
        Field(grid64, np.zeros(10))


def test_hermite_orthonormal(hermites128):
    G = np.array([[inner_product(a, b) for b in hermites128] for a in hermites128])
    assert np.abs(G - np.eye(9)).max() <= 1e-8


@pytest.mark.parametrize("n", range(6))
def test_hermite_fourier_eigenfunction(grid128, n):
    h = hermite(n, grid128)
    assert l2_norm(fourier(h) - (-1j) ** n * h) <= 1e-8


def test_hermite_at_origin(grid64):
    assert hermite(0, grid64).values[32] == pytest.approx(2**0.25, abs=1e-15)


def test_hermite_order_guard(grid64):
    hermite(16, grid64)
    with pytest.raises(ValueError):
        hermite(17, grid64)


def test_gaussian_norm_and_tensor(grid64):
    g = gaussian(grid64)
    assert l2_norm(g) == pytest.approx(1.0, abs=1e-10)
    h = hermite(3, grid64)
    assert l2_norm(tensor_product(g, h)) == pytest.approx(l2_norm(g) * l2_norm(h), rel=1e-14)


def test_conjugate_involution(grid64, rng):
    f = Field(grid64, rng.normal(size=64) + 1j * rng.normal(size=64))
    assert np.array_equal(conjugate(conjugate(f)).values, f.values)


def test_tensor_bilinear(grid64, rng):
    f1, f2, g = (Field(grid64, rng.normal(size=64) + 1j * rng.normal(size=64)) for _ in range(3))
    a = 0.3 - 1.7j
    lhs = tensor_product(f1 * a + f2, g)
    rhs = tensor_product(f1, g) * a + tensor_product(f2, g)
    assert np.abs(lhs.values - rhs.values).max() <= 1e-14


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32 - 1), st.sampled_from([1, 2]))
def test_parseval(seed, vars_):
    rng = np.random.default_rng(seed)
    g = Grid(32, vars_)
    f = Field(g, rng.normal(size=g.shape) + 1j * rng.normal(size=g.shape))
    assert abs(l2_norm(fourier(f)) - l2_norm(f)) <= 1e-12 * l2_norm(f)
    assert l2_norm(fourier(fourier(f), inverse=True) - f) <= 1e-12 * l2_norm(f)


def test_grid_mismatch(grid64, grid128):
    with pytest.raises(GridMismatchError):
        inner_product(gaussian(grid64), gaussian(grid128))


def test_admissibility(grid64):
    check_admissible(hermite(4, grid64))
    far = gaussian(grid64, center=3.5)
    assert tail_fraction(far)[0] > 1e-3
    with pytest.raises(AdmissibilityError):
        check_admissible(far)
