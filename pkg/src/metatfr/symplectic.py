"""Symplectic linear algebra: forms, membership, generator words, reorderings."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

MEMBERSHIP_TOL = 1e-10
RECONSTRUCTION_TOL = 1e-8


class NotSymplecticError(ValueError):
    pass


class FactorizationError(RuntimeError):
    pass


def standard_J(D: int) -> np.ndarray:
    if D < 1:
        raise ValueError("D must be >= 1")
    I = np.eye(D)
    Z = np.zeros((D, D))
    return np.block([[Z, I], [-I, Z]])


def symplectic_form(lam, mu) -> float:
    lam = np.asarray(lam, dtype=float)
    mu = np.asarray(mu, dtype=float)
    if lam.shape != mu.shape or lam.ndim != 1 or lam.size % 2:
        raise ValueError(f"phase points of shapes {lam.shape} and {mu.shape} are incompatible")
    return float(lam @ standard_J(lam.size // 2) @ mu)


def symplectic_defect(M) -> float:
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1] or M.shape[0] % 2:
        raise ValueError(f"expected a square matrix of even size, got {M.shape}")
    J = standard_J(M.shape[0] // 2)
    return float(np.max(np.abs(M.T @ J @ M - J)))


def is_symplectic(M, tol: float = MEMBERSHIP_TOL) -> bool:
    return symplectic_defect(M) <= tol


def check_symplectic(M, tol: float = MEMBERSHIP_TOL) -> np.ndarray:
    M = np.asarray(M, dtype=float)
    defect = symplectic_defect(M)
    if defect > tol:
        raise NotSymplecticError(f"matrix is not symplectic (defect {defect:.2e} > {tol:.0e})")
    return M


def snap_symplectic(M, tol: float = 1e-13, max_iter: int = 50) -> np.ndarray:
    """Project a nearly symplectic matrix onto Sp(2D).

    Newton iteration for the polar-type retraction ``M <- M (I + X)^(-1/2)``
    with ``X = J^T M^T J M - I``; converges quadratically for small defects.
    """
    M = np.array(M, dtype=float)
    n = M.shape[0]
    J = standard_J(n // 2)
    for _ in range(max_iter):
        if symplectic_defect(M) <= tol:
            break
        # M^T J M = J (I + X)  =>  M (I + X)^(-1/2) is symplectic when (I + X) is
        # symplectic-symmetric; first-order step uses (I + X)^(-1/2) ~ I - X/2.
        X = -J @ M.T @ J @ M - np.eye(n)
        M = M @ (np.eye(n) - 0.5 * X + 0.375 * X @ X)
    return M


def free_block(A) -> np.ndarray:
    D = A.shape[0] // 2
    return A[:D, D:]


# --- generators ----------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Fourier:
    """Unitary Fourier transform on selected axes.

    ``signs[i]`` is +1 (forward), -1 (inverse) or 0 (axis untouched).
    """

    signs: tuple

    kind = "fourier"

    @property
    def dim(self) -> int:
        return len(self.signs)

    def matrix(self) -> np.ndarray:
        D = self.dim
        M = np.eye(2 * D)
        for i, s in enumerate(self.signs):
            if s:
                M[i, i] = M[D + i, D + i] = 0.0
                M[i, D + i] = s
                M[D + i, i] = -s
        return M

    def inverse(self) -> "Fourier":
        return Fourier(tuple(-s for s in self.signs))

    def payload(self) -> np.ndarray:
        return np.diag(np.asarray(self.signs, dtype=float))


@dataclass(frozen=True, eq=False)
class Chirp:
    """Multiplication by ``exp(pi i x.Px)`` with ``P`` real symmetric."""

    P: np.ndarray

    kind = "chirp"

    def __post_init__(self):
        P = np.atleast_2d(np.asarray(self.P, dtype=float))
        if np.max(np.abs(P - P.T)) > 1e-8 * max(1.0, np.max(np.abs(P))):
            raise ValueError("chirp matrix must be symmetric")
        object.__setattr__(self, "P", 0.5 * (P + P.T))

    @property
    def dim(self) -> int:
        return self.P.shape[0]

    def matrix(self) -> np.ndarray:
        D = self.dim
        return np.block([[np.eye(D), np.zeros((D, D))], [self.P, np.eye(D)]])

    def inverse(self) -> "Chirp":
        return Chirp(-self.P)

    def payload(self) -> np.ndarray:
        return self.P


@dataclass(frozen=True, eq=False)
class Dilate:
    """``f(x) -> |det L|**0.5 f(Lx)`` for real invertible ``L``."""

    L: np.ndarray

    kind = "dilate"

    def __post_init__(self):
        L = np.atleast_2d(np.asarray(self.L, dtype=float))
        if abs(np.linalg.det(L)) < 1e-14:
            raise ValueError("dilation matrix must be invertible")
        object.__setattr__(self, "L", L)

    @property
    def dim(self) -> int:
        return self.L.shape[0]

    def matrix(self) -> np.ndarray:
        D = self.dim
        Z = np.zeros((D, D))
        return np.block([[np.linalg.inv(self.L), Z], [Z, self.L.T]])

    def inverse(self) -> "Dilate":
        return Dilate(np.linalg.inv(self.L))

    def payload(self) -> np.ndarray:
        return self.L


@dataclass(eq=False)
class GeneratorWord:
    """Primitive factors listed in the order they are applied to a field.

    The matrix of the word is therefore ``M_k @ ... @ M_1``.
    """

    factors: list = field(default_factory=list)
    dim: int = 1

    def matrix(self) -> np.ndarray:
        M = np.eye(2 * self.dim)
        for fac in self.factors:
            M = fac.matrix() @ M
        return M

    def inverse(self) -> "GeneratorWord":
        return GeneratorWord([f.inverse() for f in reversed(self.factors)], self.dim)

    def __len__(self):
        return len(self.factors)

    def __iter__(self):
        return iter(self.factors)

    def then(self, other: "GeneratorWord") -> "GeneratorWord":
        """Word applying ``self`` first and ``other`` second."""
        return GeneratorWord(list(self.factors) + list(other.factors), self.dim)


def _is_identity_factor(fac, tol=1e-14) -> bool:
    if isinstance(fac, Fourier):
        return not any(fac.signs)
    if isinstance(fac, Chirp):
        return np.max(np.abs(fac.P)) <= tol
    return np.max(np.abs(fac.L - np.eye(fac.dim))) <= tol


def _lower_word(A) -> list:
    # A = Chirp(C A11^-1) o Dilate(A11^-1)  when the upper-right block vanishes
    D = A.shape[0] // 2
    A11, A21 = A[:D, :D], A[D:, :D]
    return [Dilate(np.linalg.inv(A11)), Chirp(A21 @ np.linalg.inv(A11))]


def _free_word(A) -> list:
    D = A.shape[0] // 2
    A11, B = A[:D, :D], A[:D, D:]
    A22 = A[D:, D:]
    Binv = np.linalg.inv(B)
    return [
        Chirp(Binv @ A11),
        Fourier((1,) * D),
        Dilate(Binv),
        Chirp(A22 @ Binv),
    ]


def _word_cost(factors) -> float:
    cost = 0.0
    for fac in factors:
        if isinstance(fac, Chirp):
            cost = max(cost, np.linalg.norm(fac.P, 2))
        elif isinstance(fac, Dilate):
            s = np.linalg.svd(fac.L, compute_uv=False)
            cost = max(cost, s[0], 1.0 / s[-1])
    return cost


def _axis_subsets(D):
    for k in range(D + 1):
        yield from itertools.combinations(range(D), k)


def factor_generators(A) -> GeneratorWord:
    """Factor a symplectic matrix into Fourier / Chirp / Dilate generators.

    Candidates are the block-lower-triangular word (upper-right block zero)
    and, for every axis subset ``S`` in order of increasing size, a partial
    Fourier transform on ``S`` followed by the chirp-dilate-Fourier-chirp word
    of ``A F_S^-1``.  The candidate with the mildest chirp rates and dilation
    factors wins; ties go to the earlier candidate.
    """
    A = check_symplectic(A)
    D = A.shape[0] // 2
    candidates = []
    B = free_block(A)
    if np.max(np.abs(B)) <= 1e-12:
        candidates.append(_lower_word(A))
    vanishing = []
    for axes in _axis_subsets(D):
        signs = tuple(1 if i in axes else 0 for i in range(D))
        pre = Fourier(signs)
        Ap = A @ pre.inverse().matrix()
        Bp = free_block(Ap)
        if np.linalg.cond(Bp) > 1e6:
            vanishing.append(axes)
            continue
        try:
            word = _free_word(Ap)
        except ValueError:
            vanishing.append(axes)
            continue
        candidates.append(([pre] if axes else []) + word)
    if not candidates:
        raise FactorizationError(
            f"no axis subset makes the upper-right block invertible; singular for {vanishing}"
        )
    best = min(candidates, key=_word_cost)
    word = GeneratorWord([f for f in best if not _is_identity_factor(f)], D)
    err = np.max(np.abs(word.matrix() - A))
    if err > RECONSTRUCTION_TOL:
        raise FactorizationError(f"word reconstructs A only to {err:.2e}")
    return word


def random_word(seed: int, D: int, word_len: int = 3) -> GeneratorWord:
    """Random product of generators; chirps have ||P|| <= 0.75 and dilations
    have singular values in [1/1.3, 1.3] (condition number below 1.7)."""
    rng = np.random.default_rng(seed)
    factors = []
    for _ in range(word_len):
        kind = rng.integers(3)
        if kind == 0:
            signs = tuple(int(s) for s in rng.choice([-1, 0, 1], size=D))
            if not any(signs):
                signs = (1,) + signs[1:]
            factors.append(Fourier(signs))
        elif kind == 1:
            Q = _random_orthogonal(rng, D)
            eig = rng.uniform(-0.75, 0.75, size=D)
            factors.append(Chirp(Q @ np.diag(eig) @ Q.T))
        else:
            U, V = _random_orthogonal(rng, D), _random_orthogonal(rng, D)
            s = np.exp(rng.uniform(-np.log(1.3), np.log(1.3), size=D))
            factors.append(Dilate(U @ np.diag(s) @ V.T))
    return GeneratorWord(factors, D)


def _random_orthogonal(rng, D):
    if D == 1:
        return np.array([[rng.choice([-1.0, 1.0])]])
    Q, R = np.linalg.qr(rng.normal(size=(D, D)))
    return Q * np.sign(np.diag(R))


def random_symplectic(seed: int, D: int, word_len: int = 3) -> np.ndarray:
    if word_len < 0:
        raise ValueError("word_len must be non-negative")
    return random_word(seed, D, word_len).matrix()


# --- reorderings ----------------------------------------------------------


def tensor_reorder_permutation(d: int = 1) -> np.ndarray:
    """Index map swapping the two middle d-blocks of a 4d-vector.

    ``v[perm]`` turns the probe ordering ``(x_f, w_f, x_g, w_g)`` into the
    field ordering ``(x_f, x_g, w_f, w_g)`` and back (the map is an involution).
    """
    if d < 1:
        raise ValueError("d must be >= 1")
    blocks = [np.arange(k * d, (k + 1) * d) for k in range(4)]
    return np.concatenate([blocks[0], blocks[2], blocks[1], blocks[3]])


def permutation_matrix(perm) -> np.ndarray:
    """Matrix ``P`` with ``P @ v == v[perm]``."""
    perm = np.asarray(perm)
    return np.eye(perm.size)[perm]


CONJUGATION_FLIP = np.diag([1.0, 1.0, 1.0, -1.0])


def probe_to_field_matrix(M, mode: str = "bilinear") -> np.ndarray:
    """Turn an intertwining matrix in probe ordering into the matrix acting on
    field-ordered phase points.

    Only the input side is reordered: the output is already a shift argument
    for the 2-variable field.  In sesquilinear mode the frequency coordinate
    of the second probe is negated first, since conj(rho(y, n) g) = rho(y, -n) conj(g).
    """
    M = np.asarray(M, dtype=float)
    if mode == "sesquilinear":
        M = M @ CONJUGATION_FLIP
    elif mode != "bilinear":
        raise ValueError(f"unknown mode {mode!r}")
    return M @ permutation_matrix(tensor_reorder_permutation(1))


def field_to_probe_matrix(A, mode: str = "bilinear") -> np.ndarray:
    A = np.asarray(A, dtype=float)
    M = A @ permutation_matrix(tensor_reorder_permutation(1))
    if mode == "sesquilinear":
        M = M @ CONJUGATION_FLIP
    return M


def expected_phi_wigner(mode: str = "sesquilinear") -> np.ndarray:
    """Intertwining matrix of the cross-Wigner distribution in probe ordering.

    Maps (x_f, w_f, x_g, w_g) to the shift ((x_f+x_g)/2, (w_f+w_g)/2,
    w_f - w_g, x_g - x_f) of W(f, g).
    """
    M = np.array(
        [
            [0.5, 0.0, 0.5, 0.0],
            [0.0, 0.5, 0.0, 0.5],
            [0.0, 1.0, 0.0, -1.0],
            [-1.0, 0.0, 1.0, 0.0],
        ]
    )
    if mode == "bilinear":
        return M @ CONJUGATION_FLIP
    if mode != "sesquilinear":
        raise ValueError(f"unknown mode {mode!r}")
    return M
