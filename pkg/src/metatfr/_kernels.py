"""Hot numeric loops, each with a numba and a pure-numpy implementation.

The numba path is used when numba imports and ``METATFR_DISABLE_NUMBA`` is
unset (or ``0``).  Both paths are always importable as ``NUMPY_KERNELS`` and
``NUMBA_KERNELS`` (the latter is ``None`` without numba) so they can be
compared and benchmarked side by side.
"""

import os

import numpy as np

try:
    import numba
except ImportError:  # pragma: no cover - numba is optional
    numba = None


# ---------------------------------------------------------------------------
# band-limited evaluation: rows of samples on the centred grid, evaluated at
# arbitrary points; points outside the box [-L/2, L/2) evaluate to zero.


def _centred_coefficients(samples):
    """Coefficients ``c_j`` with ``f(t) = sum_j c_j w**j * w**(-N/2)``,
    ``w = exp(2 pi i (t - t0)/L)``, ``t0 = -L/2``.

    The Nyquist term is split evenly between +N/2 and -N/2.
    """
    N = samples.shape[-1]
    c = np.fft.fft(samples, axis=-1) / N
    # reorder frequencies -N/2 .. N/2 - 1 -> exponents 0 .. N-1 after factoring w**(-N/2)
    c = np.fft.fftshift(c, axes=-1)
    out = np.zeros(samples.shape[:-1] + (N + 1,), dtype=complex)
    out[..., :N] = c
    out[..., 0] *= 0.5
    out[..., N] = out[..., 0]
    return out


def _np_eval_rows(samples, points, delta):
    N = samples.shape[-1]
    L = N * delta
    coef = _centred_coefficients(samples)
    m = np.arange(N + 1) - N // 2
    u = points + 0.5 * L  # position relative to t0
    phase = np.exp(2j * np.pi * u[..., None] * m / L)
    out = np.einsum("rjm,rm->rj", phase, coef)
    out[(points < -0.5 * L - 1e-12) | (points >= 0.5 * L - 1e-12)] = 0.0
    return out


def _nb_eval_rows_impl(coef, points, L):
    R, M = points.shape
    K = coef.shape[1]
    half = (K - 1) // 2
    out = np.zeros((R, M), dtype=np.complex128)
    for r in range(R):
        for j in range(M):
            p = points[r, j]
            if p < -0.5 * L - 1e-12 or p >= 0.5 * L - 1e-12:
                continue
            w = np.exp(2j * np.pi * (p + 0.5 * L) / L)
            acc = 0j
            for k in range(K - 1, -1, -1):
                acc = acc * w + coef[r, k]
            out[r, j] = acc * np.exp(-2j * np.pi * half * (p + 0.5 * L) / L)
    return out


# ---------------------------------------------------------------------------
# direct cross-Wigner quadrature from half-grid samples


def _half_index(N):
    n = np.arange(N)[:, None]
    k = np.arange(N)[None, :]
    plus = 2 * n + k - N // 2
    minus = 2 * n - k + N // 2
    return plus, minus


def _np_wigner_direct(fh, gh, delta):
    N = fh.size // 2
    plus, minus = _half_index(N)
    fpad = np.concatenate([fh, [0.0]])
    gpad = np.concatenate([gh, [0.0]])
    plus = np.where((plus >= 0) & (plus < 2 * N), plus, 2 * N)
    minus = np.where((minus >= 0) & (minus < 2 * N), minus, 2 * N)
    prod = fpad[plus] * np.conj(gpad[minus])
    t = (np.arange(N) - N // 2) * delta
    E = np.exp(-2j * np.pi * np.outer(t, t))
    return delta * prod @ E


def _nb_wigner_direct_impl(fh, gh, delta):
    N = fh.size // 2
    t = (np.arange(N) - N // 2) * delta
    E = np.empty((N, N), dtype=np.complex128)
    for k in range(N):
        for m in range(N):
            E[k, m] = np.exp(-2j * np.pi * t[k] * t[m])
    out = np.zeros((N, N), dtype=np.complex128)
    v = np.empty(N, dtype=np.complex128)
    for n in range(N):
        for k in range(N):
            jp = 2 * n + k - N // 2
            jm = 2 * n - k + N // 2
            if 0 <= jp < 2 * N and 0 <= jm < 2 * N:
                v[k] = fh[jp] * np.conj(gh[jm])
            else:
                v[k] = 0.0
        for m in range(N):
            acc = 0j
            for k in range(N):
                acc += v[k] * E[k, m]
            out[n, m] = delta * acc
    return out


# ---------------------------------------------------------------------------
# quadratic-Fourier (Collins) quadrature:
#   out(x) = sum_t exp(pi i (x.Px - 2 x.Kt + t.Qt)) f(t) delta**D


def _np_collins(f, P, K, Q, delta):
    D = f.ndim
    N = f.shape[0]
    ax = (np.arange(N) - N // 2) * delta
    if D == 1:
        x = ax[:, None]
        t = ax[None, :]
        kern = np.exp(1j * np.pi * (P[0, 0] * x**2 - 2 * K[0, 0] * x * t + Q[0, 0] * t**2))
        return delta * kern @ f
    t1, t2 = np.meshgrid(ax, ax, indexing="ij")
    tQt = Q[0, 0] * t1**2 + 2 * Q[0, 1] * t1 * t2 + Q[1, 1] * t2**2
    g = f * np.exp(1j * np.pi * tQt)
    out = np.empty((N, N), dtype=complex)
    for i in range(N):
        x1 = ax[i]
        x2 = ax
        xPx = P[0, 0] * x1**2 + 2 * P[0, 1] * x1 * x2 + P[1, 1] * x2**2
        # x.K t = (x1 K00 + x2 K10) t1 + (x1 K01 + x2 K11) t2
        a1 = x1 * K[0, 0] + x2 * K[1, 0]
        a2 = x1 * K[0, 1] + x2 * K[1, 1]
        e1 = np.exp(-2j * np.pi * a1[:, None] * ax[None, :])
        e2 = np.exp(-2j * np.pi * a2[:, None] * ax[None, :])
        # sum_{t1,t2} e1[j,t1] g[t1,t2] e2[j,t2]
        out[i] = np.exp(1j * np.pi * xPx) * np.einsum("ja,ab,jb->j", e1, g, e2)
    return delta**2 * out


def _nb_collins1_impl(f, P, K, Q, delta):
    N = f.shape[0]
    out = np.zeros(N, dtype=np.complex128)
    for i in range(N):
        x = (i - N // 2) * delta
        acc = 0j
        for k in range(N):
            t = (k - N // 2) * delta
            acc += np.exp(1j * np.pi * (P[0, 0] * x * x - 2 * K[0, 0] * x * t + Q[0, 0] * t * t)) * f[k]
        out[i] = delta * acc
    return out


def _nb_collins2_impl(f, P, K, Q, delta):
    N = f.shape[0]
    g = np.empty((N, N), dtype=np.complex128)
    for a in range(N):
        t1 = (a - N // 2) * delta
        for b in range(N):
            t2 = (b - N // 2) * delta
            g[a, b] = f[a, b] * np.exp(
                1j * np.pi * (Q[0, 0] * t1 * t1 + 2 * Q[0, 1] * t1 * t2 + Q[1, 1] * t2 * t2)
            )
    t0 = -(N // 2) * delta
    out = np.zeros((N, N), dtype=np.complex128)
    h = np.empty(N, dtype=np.complex128)
    for i in range(N):
        x1 = (i - N // 2) * delta
        for j in range(N):
            x2 = (j - N // 2) * delta
            a1 = x1 * K[0, 0] + x2 * K[1, 0]
            a2 = x1 * K[0, 1] + x2 * K[1, 1]
            # exp(-2 pi i a t) over the grid by recurrence, one exp per axis
            w2 = np.exp(-2j * np.pi * a2 * delta)
            e2_start = np.exp(-2j * np.pi * a2 * t0)
            for a in range(N):
                row = 0j
                e2 = e2_start
                for b in range(N):
                    row += e2 * g[a, b]
                    e2 *= w2
                h[a] = row
            w1 = np.exp(-2j * np.pi * a1 * delta)
            e1 = np.exp(-2j * np.pi * a1 * t0)
            acc = 0j
            for a in range(N):
                acc += e1 * h[a]
                e1 *= w1
            xPx = P[0, 0] * x1 * x1 + 2 * P[0, 1] * x1 * x2 + P[1, 1] * x2 * x2
            out[i, j] = delta * delta * np.exp(1j * np.pi * xPx) * acc
    return out


class _Kernels:
    def __init__(self, name, eval_rows, wigner_direct, collins):
        self.name = name
        self.eval_rows = eval_rows
        self.wigner_direct = wigner_direct
        self.collins = collins


NUMPY_KERNELS = _Kernels("numpy", _np_eval_rows, _np_wigner_direct, _np_collins)

if numba is not None:
    _nb_eval_rows_jit = numba.njit(cache=True)(_nb_eval_rows_impl)
    _nb_wigner_jit = numba.njit(cache=True)(_nb_wigner_direct_impl)
    _nb_collins1_jit = numba.njit(cache=True)(_nb_collins1_impl)
    _nb_collins2_jit = numba.njit(cache=True)(_nb_collins2_impl)

    def _nb_eval_rows(samples, points, delta):
        samples = np.ascontiguousarray(samples, dtype=np.complex128)
        points = np.ascontiguousarray(points, dtype=np.float64)
        coef = np.ascontiguousarray(_centred_coefficients(samples))
        return _nb_eval_rows_jit(coef, points, samples.shape[-1] * delta)

    def _nb_wigner_direct(fh, gh, delta):
        return _nb_wigner_jit(
            np.ascontiguousarray(fh, dtype=np.complex128),
            np.ascontiguousarray(gh, dtype=np.complex128),
            float(delta),
        )

    def _nb_collins(f, P, K, Q, delta):
        f = np.ascontiguousarray(f, dtype=np.complex128)
        args = [np.ascontiguousarray(M, dtype=np.float64) for M in (P, K, Q)]
        if f.ndim == 1:
            return _nb_collins1_jit(f, *args, float(delta))
        return _nb_collins2_jit(f, *args, float(delta))

    NUMBA_KERNELS = _Kernels("numba", _nb_eval_rows, _nb_wigner_direct, _nb_collins)
else:  # pragma: no cover
    NUMBA_KERNELS = None


def _select():
    disabled = os.environ.get("METATFR_DISABLE_NUMBA", "0") not in ("", "0", "false", "no")
    if NUMBA_KERNELS is None or disabled:
        return NUMPY_KERNELS
    return NUMBA_KERNELS


active = _select()


def eval_rows(samples, points, delta):
    """Evaluate each row's band-limited interpolant at ``points[row]``."""
    return active.eval_rows(samples, points, delta)


def wigner_direct(fh, gh, delta):
    return active.wigner_direct(fh, gh, delta)


def collins(f, P, K, Q, delta):
    return active.collins(f, P, K, Q, delta)
