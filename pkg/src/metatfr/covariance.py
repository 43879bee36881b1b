"""Probe a black-box representation, recover its intertwining matrix and
certify that it is a multiple of a metaplectic representation.

Probe ordering is ``(x_f, w_f, x_g, w_g)``: a probe shifts ``f`` by
``rho(x_f, w_f)`` and ``g`` by ``rho(x_g, w_g)``.  The recovered matrix maps
probe vectors to the shift argument of the 2-variable output; conversion to
field ordering happens only in :func:`metatfr.symplectic.probe_to_field_matrix`.
"""

from __future__ import annotations

import itertools
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .grid import Field, Grid, fourier, gaussian, hermite, inner_product, l2_norm, tensor_product, conjugate
from .metaplectic import MetaplecticOp
from .shifts import rho
from .symplectic import (
    probe_to_field_matrix,
    snap_symplectic,
    symplectic_defect,
    symplectic_form,
)
from .tfr import a_wigner, stft, wigner_fast

THRESHOLDS = {
    "match_residual": 1e-3,
    "symplectic_defect": 1e-3,
    "nondegeneracy_min": 1e-3,
    "probe_residual": 1e-3,
    "homogeneity_defect": 1e-3,
    "additivity_defect": 1e-3,
    "integer_defect": 1e-3,
}


# --- black boxes ------------------------------------------------------------


class BlackBoxTFR:
    """A bilinear or sesquilinear map from two signals to a 2-variable field.

    ``serial`` marks evaluators that must not be called concurrently.
    """

    def __init__(self, fn, mode: str = "bilinear", name: str = "custom", serial: bool = False):
        if mode not in ("bilinear", "sesquilinear"):
            raise ValueError(f"unknown mode {mode!r}")
        self.fn = fn
        self.mode = mode
        self.name = name
        self.serial = serial

    def __call__(self, f: Field, g: Field) -> Field:
        return self.fn(f, g)

    def __repr__(self):
        return f"BlackBoxTFR({self.name!r}, mode={self.mode})"


def wigner_box(mode: str = "sesquilinear") -> BlackBoxTFR:
    if mode == "sesquilinear":
        return BlackBoxTFR(wigner_fast, mode, "wigner")
    return BlackBoxTFR(lambda f, g: wigner_fast(f, conjugate(g)), mode, "wigner-bilinear")


def stft_box() -> BlackBoxTFR:
    return BlackBoxTFR(stft, "sesquilinear", "stft")


def a_wigner_box(A, a: complex = 1.0, mode: str = "bilinear") -> BlackBoxTFR:
    op = MetaplecticOp(A)
    return BlackBoxTFR(lambda f, g: a * a_wigner(op, f, g, mode), mode, "a-wigner")


def tensor_box() -> BlackBoxTFR:
    return BlackBoxTFR(tensor_product, "bilinear", "tensor")


# --- shift estimation -------------------------------------------------------


@dataclass
class ShiftEstimate:
    nu: np.ndarray
    c: complex
    residual: float
    ok: bool
    message: str = ""


def _circular_peak(a: np.ndarray, b: np.ndarray, max_steps: float):
    """Integer circular shift ``k`` maximising ``sum a(t) b(t - k)``, restricted
    to ``|k| <= max_steps``; also reports whether the global peak was inside."""
    corr = np.real(np.fft.ifftn(np.fft.fftn(a) * np.conj(np.fft.fftn(b))))
    N = a.shape[0]
    k = np.fft.fftfreq(N, 1.0 / N)
    grids = np.meshgrid(*([k] * a.ndim), indexing="ij")
    inside = np.all([np.abs(g) <= max_steps for g in grids], axis=0)
    best = np.unravel_index(np.argmax(np.where(inside, corr, -np.inf)), corr.shape)
    interior = corr[best] >= corr.max() * (1 - 1e-9)
    return np.array([g[best] for g in grids]), bool(interior)


class _Correlator:
    def __init__(self, target: Field, ref: Field):
        self.target = target
        self.ref = ref

    def value(self, nu) -> complex:
        return inner_product(self.target, rho(nu, self.ref))

    def logmag(self, nu) -> float:
        v = abs(self.value(nu))
        return np.log(v) if v > 0 else -np.inf


def _local_grid_max(cor: _Correlator, center, step):
    """Best point of the 3**n half-step grid around ``center``; ties within
    1e-12 (relative) go to the smallest-norm shift."""
    n = center.size
    best, best_val = None, -np.inf
    cands = []
    for offs in itertools.product((-1, 0, 1), repeat=n):
        nu = center + step * np.asarray(offs)
        cands.append((abs(cor.value(nu)), nu))
    top = max(v for v, _ in cands)
    ties = [nu for v, nu in cands if v >= top * (1 - 1e-12)]
    best = min(ties, key=lambda nu: (np.linalg.norm(nu), tuple(nu)))
    return best, top


def _newton_refine(cor: _Correlator, nu, delta, max_iter: int = 12):
    """Maximise ``log|<target, rho(nu) ref>|`` with finite-difference Newton
    steps; the first round uses the half-grid spacing so that its diagonal is
    the per-coordinate three-point quadratic fit."""
    n = nu.size
    s = 0.5 * delta
    m0 = cor.logmag(nu)
    for it in range(max_iter):
        E = np.eye(n) * s
        fp = np.array([cor.logmag(nu + E[i]) for i in range(n)])
        fm = np.array([cor.logmag(nu - E[i]) for i in range(n)])
        grad = (fp - fm) / (2 * s)
        H = np.diag((fp - 2 * m0 + fm) / s**2)
        for i, j in itertools.combinations(range(n), 2):
            fpp = cor.logmag(nu + E[i] + E[j])
            fpm = cor.logmag(nu + E[i] - E[j])
            fmp = cor.logmag(nu - E[i] + E[j])
            fmm = cor.logmag(nu - E[i] - E[j])
            H[i, j] = H[j, i] = (fpp - fpm - fmp + fmm) / (4 * s * s)
        if not np.all(np.isfinite(H)) or not np.all(np.isfinite(grad)):
            break
        try:
            evals = np.linalg.eigvalsh(H)
        except np.linalg.LinAlgError:
            break
        if evals.max() < 0:
            step = -np.linalg.solve(H, grad)
        else:
            # not concave here: fall back to a bounded gradient step
            step = grad * (s / max(np.abs(grad).max(), 1e-300))
        if np.abs(step).max() > delta:
            step *= delta / np.abs(step).max()
        cand = nu + step
        m1 = cor.logmag(cand)
        while m1 < m0 and np.abs(step).max() > 1e-14:
            step *= 0.5
            cand = nu + step
            m1 = cor.logmag(cand)
        if m1 < m0:
            break
        nu, m0 = cand, m1
        if np.abs(step).max() < 1e-12:
            break
        s = max(s / 4, 1e-4)
    return nu


def estimate_shift(target: Field, ref: Field, search_radius: float | None = None) -> ShiftEstimate:
    """Find ``nu`` and ``c`` with ``target ~ c rho(nu) ref``.

    Coarse location comes from circular cross-correlation of the moduli in
    time (insensitive to frequency shifts) and in frequency (insensitive to
    time shifts); the estimate is then polished on the half-step grid and by
    quadratic fits of the log correlation magnitude.
    """
    if target.grid != ref.grid:
        raise ValueError("target and reference live on different grids")
    nref = l2_norm(ref)
    ntarget = l2_norm(target)
    if nref == 0:
        raise ValueError("reference field is zero")
    D = ref.grid.vars
    delta = ref.grid.delta
    if search_radius is None:
        search_radius = 0.25 * ref.grid.period
    if ntarget == 0:
        return ShiftEstimate(np.zeros(2 * D), 0j, 1.0, False, "target field is zero")
    max_steps = search_radius / delta
    kx, in_x = _circular_peak(np.abs(target.values), np.abs(ref.values), max_steps)
    kw, in_w = _circular_peak(np.abs(fourier(target).values), np.abs(fourier(ref).values), max_steps)
    coarse = np.concatenate([kx, kw]) * delta
    cor = _Correlator(target, ref)
    nu, _ = _local_grid_max(cor, coarse, 0.5 * delta)
    nu = _newton_refine(cor, nu, delta)
    S = rho(nu, ref)
    ip = inner_product(target, S)
    c = ip / nref**2
    cu = ip / abs(ip) if ip != 0 else 1.0
    residual = l2_norm(target - cu * S) / ntarget
    msg = ""
    if not (in_x and in_w and np.all(np.abs(nu) <= search_radius)):
        msg = "no interior peak within the search radius"
    elif residual > THRESHOLDS["probe_residual"]:
        msg = f"no shift of the reference explains the target (residual {residual:.3g})"
    ok = not msg
    return ShiftEstimate(nu, complex(c), float(residual), bool(ok), msg)


# --- recovery of the intertwining matrix -----------------------------------


@dataclass
class PhiEstimate:
    matrix: np.ndarray
    mode: str
    step: float
    c_samples: list
    residuals: list
    homogeneity_defect: float
    additivity_defect: float
    symplectic_defect: float
    integer_defects: list
    probe_failures: list = field(default_factory=list)

    @property
    def field_matrix(self) -> np.ndarray:
        return probe_to_field_matrix(self.matrix, self.mode)

    @property
    def max_probe_residual(self) -> float:
        return float(max(self.residuals)) if self.residuals else float("inf")

    @property
    def c_modulus_drift(self) -> float:
        mods = np.abs(self.c_samples)
        return float(mods.max() - mods.min())

    @property
    def c_phase_drift(self) -> float:
        c = np.asarray(self.c_samples)
        c = c[np.abs(c) > 0]
        if c.size == 0:
            return float("nan")
        ang = np.angle(c / (c.sum() / abs(c.sum()) if c.sum() != 0 else 1.0))
        return float(np.abs(ang).max())

    def to_dict(self) -> dict:
        return {
            "matrix": self.matrix.tolist(),
            "field_matrix": self.field_matrix.tolist(),
            "mode": self.mode,
            "step": self.step,
            "c_samples": [[c.real, c.imag] for c in self.c_samples],
            "c_modulus_drift": self.c_modulus_drift,
            "c_phase_drift": self.c_phase_drift,
            "residuals": list(self.residuals),
            "homogeneity_defect": self.homogeneity_defect,
            "additivity_defect": self.additivity_defect,
            "symplectic_defect": self.symplectic_defect,
            "integer_defects": list(self.integer_defects),
            "probe_failures": list(self.probe_failures),
        }


def default_probe_pairs(grid: Grid):
    h = [hermite(n, grid) for n in range(3)]
    return [(h[0], h[0]), (h[0], h[1]), (h[1], h[0]), (h[1], h[1])]


def _shifted_args(vec, f, g):
    return rho(vec[:2], f), rho(vec[2:], g)


def _run_probes(R: BlackBoxTFR, vectors, f, g, workers: int):
    def one(vec):
        return R(*_shifted_args(vec, f, g))

    if workers > 1 and not R.serial:
        with ThreadPoolExecutor(workers) as pool:
            return list(pool.map(one, vectors))
    return [one(v) for v in vectors]


def recover_phi(
    R: BlackBoxTFR,
    step: float | None = None,
    f: Field | None = None,
    g: Field | None = None,
    grid: Grid | None = None,
    search_radius: float | None = None,
    seed: int = 0,
    workers: int = 1,
) -> PhiEstimate:
    """Estimate the intertwining matrix of ``R`` from shifted probes.

    Each column comes from shifting one probe coordinate by ``step`` (default
    four grid spacings); the whole set is repeated at ``2 * step`` to measure
    homogeneity, and one mixed probe measures additivity.
    """
    if f is None or g is None:
        grid = grid or Grid(64)
        pairs = default_probe_pairs(grid)
    else:
        pairs = [(f, g)]
        grid = f.grid
    base = None
    for f, g in pairs:
        cand = R(f, g)
        if l2_norm(cand) > 1e-12 * l2_norm(f) * l2_norm(g):
            base = cand
            break
    if base is None:
        raise ValueError("representation vanishes on every probe pair")
    h = 4 * grid.delta if step is None else float(step)
    eye = np.eye(4)
    vectors = [h * e for e in eye] + [2 * h * e for e in eye] + [h * (eye[0] + eye[2])]
    outputs = _run_probes(R, vectors, f, g, workers)
    ests = [estimate_shift(out, base, search_radius) for out in outputs]
    failures = [i for i, e in enumerate(ests) if not e.ok]
    nus = np.array([e.nu for e in ests])
    M = (nus[:4] / h).T
    homog = float(np.max(np.abs(nus[4:8] / 2 - nus[:4])) / h)
    additivity = float(np.max(np.abs(nus[8] - nus[0] - nus[2])) / h)
    A = probe_to_field_matrix(M, R.mode)
    rng = np.random.default_rng(seed)
    pairs_lm = rng.uniform(-1, 1, size=(20, 2, 4))
    integer = [abs(symplectic_form(l, m) - symplectic_form(A @ l, A @ m)) for l, m in pairs_lm]
    return PhiEstimate(
        matrix=M,
        mode=R.mode,
        step=h,
        c_samples=[e.c for e in ests],
        residuals=[e.residual for e in ests],
        homogeneity_defect=homog,
        additivity_defect=additivity,
        symplectic_defect=symplectic_defect(A),
        integer_defects=integer,
        probe_failures=failures,
    )


# --- certification ----------------------------------------------------------


@dataclass
class CovarianceReport:
    phi: PhiEstimate
    a: complex | None
    match_residual: float | None
    isometry_ratio_spread: float
    nondegeneracy_min: float
    snapped_defect: float | None
    flags: dict
    grid_N: int
    thresholds: dict = field(default_factory=lambda: dict(THRESHOLDS))

    @property
    def passed(self) -> bool:
        return bool(self.flags["pass"])

    def to_dict(self) -> dict:
        from . import __version__

        def cplx(z):
            return None if z is None else [z.real, z.imag]

        return {
            "tool": "metatfr",
            "version": __version__,
            "grid": {"N": self.grid_N, "delta": 1.0 / np.sqrt(self.grid_N)},
            "phi": self.phi.to_dict(),
            "a": cplx(self.a),
            "abs_a": None if self.a is None else abs(self.a),
            "match_residual": self.match_residual,
            "isometry_ratio_spread": self.isometry_ratio_spread,
            "nondegeneracy_min": self.nondegeneracy_min,
            "snapped_symplectic_defect": self.snapped_defect,
            "thresholds": dict(self.thresholds),
            "verdict": dict(self.flags),
        }


def default_holdout(grid: Grid):
    h = [hermite(n, grid) for n in range(4)]
    shifted = gaussian(grid, center=0.4, freq=-0.3)
    return [(h[1], h[2]), (h[3], h[0]), (shifted, h[1])]


def _verdict(phi: PhiEstimate, match, nondeg, thresholds=None) -> dict:
    t = THRESHOLDS if thresholds is None else thresholds
    flags = {
        "probes": not phi.probe_failures and phi.max_probe_residual <= t["probe_residual"],
        "linear": phi.homogeneity_defect <= t["homogeneity_defect"]
        and phi.additivity_defect <= t["additivity_defect"],
        "symplectic": phi.symplectic_defect <= t["symplectic_defect"],
        "integer_lemma": max(phi.integer_defects) <= t["integer_defect"],
        "nondegenerate": nondeg >= t["nondegeneracy_min"],
        "match": match is not None and match <= t["match_residual"],
    }
    flags["pass"] = all(flags.values())
    return flags


def certify(
    R: BlackBoxTFR, phi: PhiEstimate, holdout=None, grid: Grid | None = None, thresholds: dict | None = None
) -> CovarianceReport:
    """Fit ``R(f, g) = a A^(f x g)`` with ``A`` the snapped recovered matrix and
    measure match, isometry spread and non-degeneracy on holdout pairs.

    ``thresholds`` overrides :data:`THRESHOLDS` for the verdict only.
    """
    thresholds = dict(THRESHOLDS if thresholds is None else thresholds)
    if holdout is None:
        holdout = default_holdout(grid or Grid(64))
    N = holdout[0][0].grid.N
    outputs = [R(f, g) for f, g in holdout]
    ratios = [l2_norm(out) / (l2_norm(f) * l2_norm(g)) for out, (f, g) in zip(outputs, holdout)]
    nondeg = float(min(ratios))
    spread = float(max(ratios) / min(ratios) - 1) if min(ratios) > 0 else float("inf")
    a = match = snapped = None
    if phi.symplectic_defect <= thresholds["symplectic_defect"]:
        A = snap_symplectic(phi.field_matrix)
        snapped = symplectic_defect(A)
        try:
            op = MetaplecticOp(A)
            models = [a_wigner(op, f, g, R.mode, check=False) for f, g in holdout]
        except ValueError:
            models = None
        if models is not None:
            m0 = models[0]
            a = inner_product(outputs[0], m0) / l2_norm(m0) ** 2
            match = float(
                max(
                    l2_norm(out - a * m) / (l2_norm(f) * l2_norm(g))
                    for out, m, (f, g) in zip(outputs, models, holdout)
                )
            )
    flags = _verdict(phi, match, nondeg, thresholds)
    return CovarianceReport(phi, a, match, spread, nondeg, snapped, flags, N, thresholds)


def run_covariance(
    R: BlackBoxTFR, grid: Grid | None = None, seed: int = 0, workers: int = 1, thresholds: dict | None = None
) -> CovarianceReport:
    grid = grid or Grid(64)
    phi = recover_phi(R, grid=grid, seed=seed, workers=workers)
    return certify(R, phi, default_holdout(grid), thresholds=thresholds)


# --- negative controls ------------------------------------------------------


def negative_control(kind: str, A=None, grid_hint: Grid | None = None) -> BlackBoxTFR:
    """Representations that must fail certification.

    ``broken-phase``: A^(f x g) multiplied by a cubic phase, which turns
    shifts into position-dependent modulations.
    ``nonlinear-phi``: A^(f x g) + 0.1 A'^(f x g); shifts of the two parts
    move along different matrices, so no single shift explains a probe.
    ``degenerate``: <f, h0> A^(h0 x g), which annihilates every f orthogonal to h0.
    """
    if A is None:
        A = np.eye(4)
    op = MetaplecticOp(A)
    if kind == "broken-phase":

        def fn(f, g):
            out = a_wigner(op, f, g)
            x1, x2 = out.grid.mesh()
            return out.like(out.values * np.exp(2j * np.pi * 0.15 * (x1**3 + x2**3)))

    elif kind == "nonlinear-phi":
        other = MetaplecticOp(np.diag([1.0, 1.0, 1.0, 1.0]) @ _rotation4(0.9))

        def fn(f, g):
            return a_wigner(op, f, g) + 0.1 * a_wigner(other, f, g)

    elif kind == "degenerate":

        def fn(f, g):
            h0 = hermite(0, f.grid)
            return inner_product(f, h0) * a_wigner(op, h0, g)

    else:
        raise ValueError(f"unknown control {kind!r}")
    return BlackBoxTFR(fn, "bilinear", f"control:{kind}")


def _rotation4(theta):
    # symplectic rotation mixing position and frequency on the first axis
    c, s = np.cos(theta), np.sin(theta)
    M = np.eye(4)
    M[0, 0] = M[2, 2] = c
    M[0, 2] = s
    M[2, 0] = -s
    return M
