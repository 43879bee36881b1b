"""Executable metaplectic operators built from Fourier / Chirp / Dilate words.

Phase convention: Fourier factors are the unitary centred DFT, chirps carry no
constant phase and dilations use the positive amplitude ``|det L|**0.5``.  Two
words for the same matrix may therefore differ by a unimodular constant; every
operator-level comparison is made modulo such a constant or in conjugation
form, where it cancels.
"""

from __future__ import annotations

import numpy as np

from . import _kernels
from .grid import Field, GridMismatchError, check_admissible, fourier, l2_norm, inner_product
from .shifts import rho
from .symplectic import (
    Chirp,
    Dilate,
    Fourier,
    GeneratorWord,
    check_symplectic,
    factor_generators,
    free_block,
)

DILATION_COND_LIMIT = 8.0
# chirp rates above L/4 push fields concentrated in |x| <= 2 past the Nyquist band
CHIRP_RATE_FRACTION = 0.25


class DilationError(ValueError):
    pass


class ChirpAliasError(ValueError):
    pass


def chirp_rate_limit(grid) -> float:
    return CHIRP_RATE_FRACTION * grid.period


# --- primitive actions ----------------------------------------------------


def _resample_axis(values, axis, points, delta):
    """Evaluate the band-limited interpolant along ``axis`` at per-line points.

    ``points`` has the shape of ``values`` and gives, for every output sample,
    the position along ``axis`` at which the input line is evaluated.
    """
    moved = np.moveaxis(values, axis, -1)
    pts = np.moveaxis(points, axis, -1)
    lead = moved.shape[:-1]
    N = moved.shape[-1]
    out = _kernels.eval_rows(moved.reshape(-1, N), pts.reshape(-1, N), delta)
    return np.moveaxis(out.reshape(lead + (N,)), -1, axis)


def _dilation_steps(L):
    """Elementary maps whose successive application gives ``f -> f(Lx)``.

    Each step ``E`` sends ``g`` to ``g(Ex)``; applying ``E1`` then ``E2``
    yields ``f(E1 E2 x)``.
    """
    a, b = L[0]
    c, d = L[1]
    steps = []
    if abs(a) < abs(c):
        steps.append(("swap", None))
        a, b, c, d = c, d, a, b
    det = a * d - b * c
    steps.append(("lower", c / a))
    steps.append(("scale", (a, det / a)))
    steps.append(("upper", b / a))
    return steps


def _apply_dilation(values, L, grid):
    D = grid.vars
    delta = grid.delta
    ax = grid.axis()
    if D == 1:
        s = L[0, 0]
        out = _kernels.eval_rows(values[None, :], (s * ax)[None, :], delta)[0]
        return np.sqrt(abs(s)) * out
    x1, x2 = grid.mesh()
    out = values
    for kind, p in _dilation_steps(L):
        if kind == "swap":
            out = out.T.copy()
        elif kind == "lower" and p:
            out = _resample_axis(out, 1, x2 + p * x1, delta)
        elif kind == "upper" and p:
            out = _resample_axis(out, 0, x1 + p * x2, delta)
        elif kind == "scale":
            sa, sb = p
            if sa != 1.0:
                out = _resample_axis(out, 0, sa * x1, delta)
            if sb != 1.0:
                out = _resample_axis(out, 1, sb * x2, delta)
    return np.sqrt(abs(np.linalg.det(L))) * out


def _apply_chirp(values, P, grid):
    mesh = grid.mesh()
    quad = sum(P[i, j] * mesh[i] * mesh[j] for i in range(grid.vars) for j in range(grid.vars))
    return values * np.exp(1j * np.pi * quad)


def apply_factor(factor, f: Field) -> Field:
    if factor.dim != f.grid.vars:
        raise GridMismatchError(f"{factor.kind} factor of dimension {factor.dim} on {f.grid.vars}-variable field")
    if isinstance(factor, Fourier):
        out = f
        fwd = tuple(i for i, s in enumerate(factor.signs) if s > 0)
        inv = tuple(i for i, s in enumerate(factor.signs) if s < 0)
        if fwd:
            out = fourier(out, fwd)
        if inv:
            out = fourier(out, inv, inverse=True)
        return out
    if isinstance(factor, Chirp):
        rate = np.linalg.norm(factor.P, 2)
        limit = chirp_rate_limit(f.grid)
        if rate > limit * (1 + 1e-9):
            raise ChirpAliasError(f"chirp rate {rate:.3g} exceeds {limit:.3g} on an N={f.grid.N} grid")
        return f.like(_apply_chirp(f.values, factor.P, f.grid))
    if isinstance(factor, Dilate):
        cond = np.linalg.cond(factor.L)
        if cond > DILATION_COND_LIMIT:
            raise DilationError(f"dilation condition number {cond:.2f} exceeds {DILATION_COND_LIMIT}")
        return f.like(_apply_dilation(f.values, factor.L, f.grid))
    raise TypeError(f"unknown factor {factor!r}")


# --- operators ------------------------------------------------------------


class MetaplecticOp:
    """Metaplectic operator for a symplectic matrix, realised by a generator word."""

    phase_convention = "unitary-dft/positive-dilation"

    def __init__(self, matrix=None, word: GeneratorWord | None = None):
        if word is None:
            if matrix is None:
                raise ValueError("need a matrix or a generator word")
            matrix = check_symplectic(matrix)
            word = factor_generators(matrix)
        elif matrix is None:
            matrix = word.matrix()
        self.matrix = np.asarray(matrix, dtype=float)
        self.word = word

    @property
    def dim(self) -> int:
        return self.word.dim

    def inverse(self) -> "MetaplecticOp":
        return MetaplecticOp(np.linalg.inv(self.matrix), self.word.inverse())

    def __call__(self, f: Field, check: bool = True) -> Field:
        return apply_metaplectic(self, f, check=check)

    def __repr__(self):
        kinds = ", ".join(fac.kind for fac in self.word)
        return f"MetaplecticOp(D={self.dim}, word=[{kinds}])"


def apply_metaplectic(op: MetaplecticOp, f: Field, check: bool = True) -> Field:
    if f.grid.vars != op.dim:
        raise GridMismatchError(f"operator on {op.dim} variables applied to {f.grid.vars}-variable field")
    if check:
        check_admissible(f)
    for factor in op.word:
        f = apply_factor(factor, f)
    return f


def collins_oracle(A, f: Field) -> Field:
    """Direct quadrature of the quadratic-Fourier integral for free ``A``.

    ``det(iB)**-0.5 int exp(pi i (x.DB^-1 x - 2 x.B^-T t + t.B^-1 A t)) f(t) dt``
    with the principal square root; cost ``O(N**(2D))``.
    """
    A = check_symplectic(A)
    D = A.shape[0] // 2
    if D != f.grid.vars:
        raise GridMismatchError("matrix and field dimensions differ")
    if f.grid.N > 128:
        raise ValueError("collins_oracle is limited to N <= 128")
    B = free_block(A)
    if abs(np.linalg.det(B)) < 1e-12:
        raise np.linalg.LinAlgError("upper-right block is singular")
    Binv = np.linalg.inv(B)
    P = A[D:, D:] @ Binv
    K = Binv.T
    Q = Binv @ A[:D, :D]
    pref = 1.0 / np.sqrt(complex(np.linalg.det(1j * B)))
    return f.like(pref * _kernels.collins(f.values, P, K, Q, f.grid.delta))


def intertwining_residual(op: MetaplecticOp, lam, f: Field) -> float:
    """``||rho(A lam) f - A^ rho(lam) A^-1 f|| / ||f||``."""
    lam = np.asarray(lam, dtype=float)
    lhs = rho(op.matrix @ lam, f)
    rhs = op(rho(lam, op.inverse()(f, check=False)), check=False)
    return l2_norm(lhs - rhs) / l2_norm(f)


def phase_modulo_distance(u: Field, v: Field) -> float:
    """``min_{|c|=1} ||u - c v||`` (absolute)."""
    ip = inner_product(u, v)
    c = ip / abs(ip) if ip != 0 else 1.0
    return l2_norm(u - c * v)
