"""Time-frequency representations: cross-Wigner, cross-STFT and A-Wigner.

Output fields are 2-variable fields on the input grid; the first axis is
time, the second frequency.
"""

from __future__ import annotations

import numpy as np

from . import _kernels
from .grid import Field, GridMismatchError, conjugate, fourier, tensor_product
from .metaplectic import MetaplecticOp, apply_metaplectic
from .symplectic import Dilate, Fourier, GeneratorWord

MODES = ("bilinear", "sesquilinear")

# (x, t) -> (x + t/2, x - t/2) followed by a Fourier transform in t
WIGNER_COORDINATES = np.array([[1.0, 0.5], [1.0, -0.5]])
WIGNER_WORD = GeneratorWord([Dilate(WIGNER_COORDINATES), Fourier((0, 1))], 2)
WIGNER_MATRIX = WIGNER_WORD.matrix()


def _check_pair(f: Field, g: Field):
    if f.grid.vars != 1 or g.grid.vars != 1:
        raise GridMismatchError("representations take two 1-variable fields")
    if f.grid != g.grid:
        raise GridMismatchError(f"grid mismatch: {f.grid} vs {g.grid}")


def _check_mode(mode):
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}, got {mode!r}")


def half_grid_samples(f: Field) -> np.ndarray:
    """Band-limited values of ``f`` at ``(j - N) * delta / 2``, ``j < 2N``."""
    N, delta = f.grid.N, f.grid.delta
    pts = (np.arange(2 * N) - N) * 0.5 * delta
    return _kernels.eval_rows(f.values[None, :], pts[None, :], delta)[0]


def wigner_direct(f: Field, g: Field) -> Field:
    """Cross-Wigner distribution by direct Riemann sums, ``O(N**3)``.

    Reference implementation; ``f(x + t/2)`` and ``g(x - t/2)`` are read from
    band-limited half-grid samples.
    """
    _check_pair(f, g)
    if f.grid.N > 128:
        raise ValueError("wigner_direct is limited to N <= 128")
    fh, gh = half_grid_samples(f), half_grid_samples(g)
    W = _kernels.wigner_direct(fh, gh, f.grid.delta)
    return Field(f.grid.with_vars(2), W)


def wigner_fast(f: Field, g: Field) -> Field:
    """Cross-Wigner distribution as a partial Fourier transform of the
    coordinate-changed tensor ``f(x + t/2) conj(g(x - t/2))``."""
    _check_pair(f, g)
    F = tensor_product(f, conjugate(g))
    return apply_metaplectic(MetaplecticOp(WIGNER_MATRIX, WIGNER_WORD), F, check=False)


wigner = wigner_fast


def a_wigner(A, f: Field, g: Field, mode: str = "bilinear", check: bool = True) -> Field:
    """``A^(f x g)`` (bilinear) or ``A^(f x conj g)`` (sesquilinear)."""
    _check_pair(f, g)
    _check_mode(mode)
    op = A if isinstance(A, MetaplecticOp) else MetaplecticOp(A)
    if op.dim != 2:
        raise GridMismatchError("a_wigner needs a matrix in Sp(4)")
    second = conjugate(g) if mode == "sesquilinear" else g
    return apply_metaplectic(op, tensor_product(f, second), check=check)


def stft(f: Field, g: Field) -> Field:
    """``V_g f(x, w) = int f(t) conj(g(t - x)) exp(-2 pi i w t) dt`` with
    window translates taken circularly on the grid."""
    _check_pair(f, g)
    N = f.grid.N
    n = np.arange(N)[:, None]
    k = np.arange(N)[None, :]
    window = g.values[(k - n + N // 2) % N]
    prod = Field(f.grid.with_vars(2), f.values[None, :] * np.conj(window))
    return fourier(prod, axes=(1,))
