"""Symmetric time-frequency shifts ``rho(x, w) = T_{x/2} M_w T_{x/2}``."""

from __future__ import annotations

import numpy as np

from .grid import Field, GridMismatchError, tensor_product, l2_norm
from .symplectic import symplectic_form


def _point(lam, f: Field) -> np.ndarray:
    lam = np.asarray(lam, dtype=float).ravel()
    if lam.size != 2 * f.grid.vars:
        raise GridMismatchError(
            f"phase point of length {lam.size} cannot shift a {f.grid.vars}-variable field"
        )
    return lam


def translate(values: np.ndarray, shift, grid) -> np.ndarray:
    """``F(t - shift)`` via FFT phase ramps (exact on band-limited periodic data)."""
    shift = np.atleast_1d(np.asarray(shift, dtype=float))
    if not np.any(shift):
        return values
    xi = grid.freqs()
    ramp = np.ones(grid.shape, dtype=complex)
    for ax, s in enumerate(shift):
        if s:
            shape = [1] * grid.vars
            shape[ax] = grid.N
            ramp = ramp * np.exp(-2j * np.pi * s * xi).reshape(shape)
    return np.fft.ifftn(np.fft.fftn(values) * ramp)


def modulate(values: np.ndarray, freq, grid) -> np.ndarray:
    freq = np.atleast_1d(np.asarray(freq, dtype=float))
    if not np.any(freq):
        return values
    phase = sum(w * t for w, t in zip(freq, grid.mesh()))
    return values * np.exp(2j * np.pi * phase)


def rho(lam, f: Field) -> Field:
    """Apply ``rho(lam)`` with ``lam = (x, w)`` of length ``2 * f.grid.vars``."""
    lam = _point(lam, f)
    D = f.grid.vars
    x, w = lam[:D], lam[D:]
    if not np.any(x):
        return f.like(modulate(f.values, w, f.grid))
    half = translate(f.values, 0.5 * x, f.grid)
    return f.like(translate(modulate(half, w, f.grid), 0.5 * x, f.grid))


def weyl_phase(lam1, lam2) -> complex:
    """Phase in ``rho(l1 + l2) = weyl_phase(l1, l2) rho(l1) rho(l2)``."""
    return complex(np.exp(1j * np.pi * symplectic_form(lam1, lam2)))


def rho_power(lam, n: int, f: Field) -> Field:
    lam = _point(lam, f)
    step = lam if n >= 0 else -lam
    out = f
    for _ in range(abs(int(n))):
        out = rho(step, out)
    return out


def rho_tensor_check(l1, l2, l3, l4, f: Field, g: Field) -> float:
    """Residual of ``rho(l1,l2,l3,l4)(f x g) = rho(l1,l3) f x rho(l2,l4) g``."""
    lhs = rho([l1, l2, l3, l4], tensor_product(f, g))
    rhs = tensor_product(rho([l1, l3], f), rho([l2, l4], g))
    return l2_norm(lhs - rhs)
