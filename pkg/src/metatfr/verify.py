"""Invariant suites run by ``metatfr verify``.

Every check records the identity it tests, the worst residual, the threshold
and a pass flag.  ``fault="phase-sign"`` (or ``METATFR_FAULT=phase-sign``)
flips the sign of the symmetric phase of ``rho`` inside the suites, so that
they can be shown to fail when the phase convention is wrong.
"""

from __future__ import annotations

import os
import time

import numpy as np

from .grid import AdmissibilityError, Grid, check_admissible, gaussian, hermite, l2_norm, tensor_product
from .metaplectic import MetaplecticOp, intertwining_residual
from .shifts import rho, weyl_phase
from .symplectic import random_symplectic, standard_J
from .tfr import a_wigner, wigner_direct, wigner_fast

SUITES = ("shifts", "metaplectic", "wigner-covariance")
FAULTS = ("phase-sign",)
FAULT_ENV = "METATFR_FAULT"

# grid size used for two-variable operators when the requested grid is smaller
D2_MIN_N = 128
# random shift coordinates are drawn from [-SHIFT_RANGE, SHIFT_RANGE]
SHIFT_RANGE = 0.5


def _fault(fault):
    if fault is None:
        fault = os.environ.get(FAULT_ENV) or None
    if fault is not None and fault not in FAULTS:
        raise ValueError(f"unknown fault {fault!r}")
    return fault


def _check(identity, residual, threshold, tol_scale, **extra):
    thr = threshold * tol_scale
    out = {
        "identity": identity,
        "residual": float(residual),
        "threshold": float(thr),
        "pass": bool(residual <= thr),
    }
    out.update(extra)
    return out


def _admissible(*fields) -> bool:
    try:
        for f in fields:
            check_admissible(f)
    except AdmissibilityError:
        return False
    return True


def _shift(lam, f, fault):
    """``rho(lam) f``; the phase-sign fault uses ``exp(-pi i x.w)`` in place of
    ``exp(+pi i x.w)`` for the symmetric phase."""
    out = rho(lam, f)
    if fault == "phase-sign":
        D = f.grid.vars
        lam = np.asarray(lam, dtype=float)
        out = out * np.exp(-2j * np.pi * np.dot(lam[:D], lam[D:]))
    return out


def suite_shifts(N: int = 128, seed: int = 0, tol_scale: float = 1.0, fault=None) -> list:
    fault = _fault(fault)
    grid = Grid(N)
    rng = np.random.default_rng(seed)
    hs = [hermite(n, grid) for n in range(5)]
    worst_sum = worst_pow = worst_inv = 0.0
    n_sum = n_pow = skipped = 0
    while n_sum < 200 and n_sum + skipped < 800:
        lam, mu = rng.uniform(-SHIFT_RANGE, SHIFT_RANGE, (2, 2))
        f = hs[(n_sum + skipped) % 5]
        if not _admissible(rho(lam + mu, f), rho(mu, f), rho(3 * lam, f), rho(2 * lam, f), rho(-lam, f)):
            skipped += 1
            continue
        lhs = _shift(lam + mu, f, fault)
        rhs = weyl_phase(lam, mu) * _shift(lam, _shift(mu, f, fault), fault)
        worst_sum = max(worst_sum, l2_norm(lhs - rhs) / l2_norm(f))
        if n_pow < 50:
            cube = _shift(lam, _shift(lam, _shift(lam, f, fault), fault), fault)
            worst_pow = max(worst_pow, l2_norm(cube - _shift(3 * lam, f, fault)) / l2_norm(f))
            back = _shift(lam, _shift(-lam, f, fault), fault)
            worst_inv = max(worst_inv, l2_norm(back - f) / l2_norm(f))
            n_pow += 1
        n_sum += 1
    if n_sum < 200:
        worst_sum = worst_pow = worst_inv = float("inf")
    return [
        _check("rho(l+m) = exp(pi i [l,m]) rho(l) rho(m)", worst_sum, 1e-10, tol_scale, samples=n_sum, skipped=skipped),
        _check("rho(l)^3 = rho(3l)", worst_pow, 1e-10, tol_scale, samples=n_pow),
        _check("rho(l) rho(-l) = I", worst_inv, 1e-10, tol_scale, samples=n_pow),
    ]


def suite_metaplectic(N: int = 64, seed: int = 0, tol_scale: float = 1.0, fault=None) -> list:
    fault = _fault(fault)
    rng = np.random.default_rng(seed)
    out = []
    for D, count in ((1, 50), (2, 20)):
        n = N if D == 1 else max(N, D2_MIN_N)
        grid = Grid(n)
        worst = 0.0
        done = skipped = i = 0
        while done < count and i < 4 * count:
            op = MetaplecticOp(random_symplectic(seed * 1000 + i, D))
            lam = rng.uniform(-SHIFT_RANGE, SHIFT_RANGE, 2 * D)
            if D == 1:
                f = hermite(i % 4, grid)
            else:
                f = tensor_product(hermite(i % 3, grid), hermite((i + 1) % 3, grid))
            i += 1
            pre = op.inverse()(f, check=False)
            if not _admissible(pre, op(f, check=False), rho(lam, pre)):
                skipped += 1
                continue
            if fault is None:
                res = intertwining_residual(op, lam, f)
            else:
                lhs = _shift(op.matrix @ lam, f, fault)
                rhs = op(_shift(lam, pre, fault), check=False)
                res = l2_norm(lhs - rhs) / l2_norm(f)
            worst = max(worst, res)
            done += 1
        if done < count:
            worst = float("inf")
        out.append(
            _check(
                f"rho(A l) = A^ rho(l) A^-1, D={D}", worst, 1e-7, tol_scale, samples=done, skipped=skipped, N=n
            )
        )
    return out


def suite_wigner(N: int = 64, seed: int = 0, tol_scale: float = 1.0, fault=None) -> list:
    fault = _fault(fault)
    J = standard_J(1)
    grid = Grid(N)
    rng = np.random.default_rng(seed)
    hs = [hermite(n, grid) for n in range(4)]
    out = []

    # the direct oracle is cubic in N
    nd = min(N, 128)
    hd = hs if nd == N else [hermite(n, Grid(nd)) for n in range(4)]
    worst = 0.0
    for a, b in [(0, 0), (1, 3), (2, 2), (3, 1)]:
        Wd = wigner_direct(hd[a], hd[b])
        worst = max(worst, l2_norm(Wd - wigner_fast(hd[a], hd[b])) / l2_norm(Wd))
    out.append(_check("wigner_fast = wigner_direct (relative L2)", worst, 1e-6, tol_scale, N=nd))

    W = wigner_fast(gaussian(grid), gaussian(grid))
    x, w = W.grid.mesh()
    exact = 2 * np.exp(-2 * np.pi * (x**2 + w**2))
    out.append(_check("W(h0,h0) = 2 exp(-2 pi (x^2 + w^2))", np.abs(W.values - exact).max(), 1e-7, tol_scale))

    # the lag integral of the Wigner distribution is truncated to the box, so
    # the two-variable covariance laws are checked on the larger grid
    nc = max(N, D2_MIN_N)
    hc = [hermite(n, Grid(nc)) for n in range(4)]
    worst4 = worst2 = 0.0
    for i in range(50):
        f, g = hc[i % 4], hc[(i + 1) % 4]
        lam, gam = rng.uniform(-SHIFT_RANGE, SHIFT_RANGE, (2, 2))
        W0 = wigner_fast(f, g)
        scale = l2_norm(f) * l2_norm(g)
        lhs = wigner_fast(_shift(lam, f, fault), _shift(lam, g, fault))
        worst4 = max(worst4, l2_norm(lhs - _shift(np.concatenate([lam, [0.0, 0.0]]), W0, fault)) / scale)
        lhs = wigner_fast(_shift(lam, f, fault), _shift(gam, g, fault))
        rhs = _shift(np.concatenate([(lam + gam) / 2, J @ (lam - gam)]), W0, fault)
        worst2 = max(worst2, l2_norm(lhs - rhs) / scale)
    out.append(_check("W(rho(l)f, rho(l)g) = T_l W(f,g)", worst4, 1e-6, tol_scale, samples=50, N=nc))
    out.append(
        _check("W(rho(l)f, rho(g)g) = rho((l+g)/2, J(l-g)) W(f,g)", worst2, 1e-6, tol_scale, samples=50, N=nc)
    )

    worst = 0.0
    for a in range(4):
        for b in range(4):
            worst = max(worst, abs(l2_norm(wigner_fast(hs[a], hs[b])) - 1.0))
    out.append(_check("||W(f,g)|| = ||f|| ||g||", worst, 1e-6, tol_scale, pairs=16))

    n2 = max(N, D2_MIN_N)
    g2 = Grid(n2)
    h2 = [hermite(n, g2) for n in range(4)]
    worst = 0.0
    for i in range(10):
        op = MetaplecticOp(random_symplectic(seed * 1000 + 500 + i, 2))
        f, g = h2[i % 4], h2[(i + 2) % 4]
        worst = max(worst, abs(l2_norm(a_wigner(op, f, g)) - 1.0))
    out.append(_check("||A^(f x g)|| = ||f|| ||g||", worst, 1e-6, tol_scale, samples=10, N=n2))
    return out


_RUNNERS = {
    "shifts": suite_shifts,
    "metaplectic": suite_metaplectic,
    "wigner-covariance": suite_wigner,
}


def run_suite(name: str, N: int = 64, seed: int = 0, tol_scale: float = 1.0, fault=None, timing: bool = True) -> dict:
    """Run one suite (or ``all``) and return a JSON-ready report."""
    names = SUITES if name == "all" else (name,)
    for n in names:
        if n not in _RUNNERS:
            raise ValueError(f"unknown suite {n!r}; choose from {SUITES + ('all',)}")
    suites = {}
    for n in names:
        t0 = time.perf_counter()
        checks = _RUNNERS[n](N=N, seed=seed, tol_scale=tol_scale, fault=fault)
        entry = {"checks": checks, "pass": all(c["pass"] for c in checks)}
        if timing:
            entry["seconds"] = round(time.perf_counter() - t0, 3)
        suites[n] = entry
    return {
        "suite": name,
        "N": N,
        "seed": seed,
        "tol_scale": tol_scale,
        "suites": suites,
        "pass": all(s["pass"] for s in suites.values()),
    }
