"""Self-dual periodic grids, sampled fields and test signals.

A grid with ``N`` samples per axis uses spacing ``delta = 1/sqrt(N)`` so that
the time lattice and the discrete-Fourier frequency lattice coincide.  Samples
sit at ``x_k = (k - N/2) * delta`` which puts ``t = 0`` on the grid.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class GridMismatchError(ValueError):
    pass


class AdmissibilityError(ValueError):
    """Raised when a field leaks too much energy towards the period boundary."""


@dataclass(frozen=True)
class Grid:
    N: int
    vars: int = 1

    def __post_init__(self):
        if self.vars not in (1, 2):
            raise ValueError(f"vars must be 1 or 2, got {self.vars}")
        if self.N < 16 or self.N % 2:
            raise ValueError(f"N must be even and >= 16, got {self.N}")

    @property
    def delta(self) -> float:
        return 1.0 / np.sqrt(self.N)

    @property
    def period(self) -> float:
        return self.N * self.delta

    @property
    def shape(self) -> tuple:
        return (self.N,) * self.vars

    def axis(self) -> np.ndarray:
        """Sample positions along one axis (also the frequency axis)."""
        return (np.arange(self.N) - self.N // 2) * self.delta

    def freqs(self) -> np.ndarray:
        """Frequencies in unshifted FFT order, for phase ramps."""
        return np.fft.fftfreq(self.N, d=self.delta)

    def mesh(self) -> list[np.ndarray]:
        ax = self.axis()
        if self.vars == 1:
            return [ax]
        return list(np.meshgrid(ax, ax, indexing="ij"))

    def with_vars(self, vars: int) -> "Grid":
        return Grid(self.N, vars)


@dataclass(frozen=True, eq=False)
class Field:
    grid: Grid
    values: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=complex)
        if vals.shape != self.grid.shape:
            raise GridMismatchError(
                f"values of shape {vals.shape} do not fit grid {self.grid.shape}"
            )
        object.__setattr__(self, "values", vals)

    def like(self, values: np.ndarray) -> "Field":
        return Field(self.grid, values)

    def __add__(self, other: "Field") -> "Field":
        _check_same(self, other)
        return self.like(self.values + other.values)

    def __sub__(self, other: "Field") -> "Field":
        _check_same(self, other)
        return self.like(self.values - other.values)

    def __mul__(self, scalar) -> "Field":
        return self.like(self.values * scalar)

    __rmul__ = __mul__

    def __neg__(self) -> "Field":
        return self.like(-self.values)


def _check_same(f: Field, g: Field):
    if f.grid != g.grid:
        raise GridMismatchError(f"grid mismatch: {f.grid} vs {g.grid}")


def hermite(n: int, grid: Grid) -> Field:
    """L2-normalised Hermite function ``h_n`` sampled on a 1-variable grid.

    Uses the three-term recurrence started from ``h_0(t) = 2**0.25 exp(-pi t^2)``,
    so that the Fourier transform ``int f(t) exp(-2 pi i t w) dt`` maps
    ``h_n`` to ``(-i)**n h_n``.
    """
    if grid.vars != 1:
        raise GridMismatchError("hermite functions live on 1-variable grids")
    if n < 0:
        raise ValueError("n must be non-negative")
    if n > grid.N // 4:
        raise ValueError(f"h_{n} is not concentrated on a grid with N={grid.N}")
    t = grid.axis()
    u = np.sqrt(2 * np.pi) * t
    prev = np.zeros_like(t)
    cur = 2**0.25 * np.exp(-np.pi * t**2)
    for k in range(n):
        prev, cur = cur, np.sqrt(2.0 / (k + 1)) * u * cur - np.sqrt(k / (k + 1)) * prev
    return Field(grid, cur)


def gaussian(grid: Grid, center=None, freq=None) -> Field:
    """Normalised Gaussian ``2**(vars/4) exp(-pi |t - center|^2)``, optionally modulated."""
    mesh = grid.mesh()
    center = np.zeros(grid.vars) if center is None else np.broadcast_to(center, grid.vars)
    freq = np.zeros(grid.vars) if freq is None else np.broadcast_to(freq, grid.vars)
    vals = np.full(grid.shape, 2 ** (grid.vars / 4), dtype=complex)
    for t, c, w in zip(mesh, center, freq):
        vals *= np.exp(-np.pi * (t - c) ** 2 + 2j * np.pi * w * t)
    return Field(grid, vals)


def tensor_product(f: Field, g: Field) -> Field:
    if f.grid.vars != 1 or g.grid.vars != 1:
        raise GridMismatchError("tensor_product expects two 1-variable fields")
    _check_same(f, g)
    return Field(f.grid.with_vars(2), np.multiply.outer(f.values, g.values))


def conjugate(f: Field) -> Field:
    return f.like(np.conj(f.values))


def inner_product(f: Field, g: Field) -> complex:
    """``<f, g> = delta**vars * sum f * conj(g)``."""
    _check_same(f, g)
    return complex(np.vdot(g.values, f.values) * f.grid.delta**f.grid.vars)


def l2_norm(f: Field) -> float:
    return float(np.linalg.norm(f.values) * f.grid.delta ** (f.grid.vars / 2))


def fourier(f: Field, axes=None, inverse: bool = False) -> Field:
    """Unitary centred DFT approximating ``int f(t) exp(-2 pi i t w) dt``.

    ``axes`` selects which variables are transformed (default: all).
    """
    if axes is None:
        axes = tuple(range(f.grid.vars))
    axes = tuple(axes)
    if not axes:
        return f
    shifted = np.fft.ifftshift(f.values, axes=axes)
    op = np.fft.ifftn if inverse else np.fft.fftn
    out = op(shifted, axes=axes, norm="ortho")
    return f.like(np.fft.fftshift(out, axes=axes))


def tail_fraction(f: Field, fraction: float = 0.125) -> tuple[float, float]:
    """Energy fractions in the outer ``fraction`` of the box, in time and in frequency."""
    total = np.sum(np.abs(f.values) ** 2)
    if total == 0:
        return 0.0, 0.0
    N = f.grid.N
    edge = int(round(N * fraction))
    mask = np.ones(f.grid.shape, dtype=bool)
    inner = (slice(edge, N - edge),) * f.grid.vars
    mask[inner] = False
    spec = fourier(f).values
    t_tail = np.sum(np.abs(f.values[mask]) ** 2) / total
    w_tail = np.sum(np.abs(spec[mask]) ** 2) / total
    return float(t_tail), float(w_tail)


def check_admissible(f: Field, tol: float = 1e-10) -> None:
    t_tail, w_tail = tail_fraction(f)
    if t_tail > tol or w_tail > tol:
        raise AdmissibilityError(
            f"field is not concentrated: time tail {t_tail:.2e}, "
            f"frequency tail {w_tail:.2e} (limit {tol:.0e})"
        )
