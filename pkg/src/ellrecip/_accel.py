"""Windowed lattice-sum kernel with an optional numba backend.

Set ELLRECIP_DISABLE_NUMBA=1 to force the pure-numpy path.
"""
import os

import numpy as np

_DISABLED = os.environ.get("ELLRECIP_DISABLE_NUMBA", "") not in ("", "0")

try:
    if _DISABLED:
        raise ImportError
    from numba import njit

    HAVE_NUMBA = True
except ImportError:
    HAVE_NUMBA = False


def window_sums_numpy(w, k, half):
    """For each shift w_i, sum_{j} (w_i + j)^(-k) over |j + round(Re w_i)| <= half.

    Terms with w_i + j == 0 are skipped.  Returns (sums, jlo, jhi).
    """
    w = np.asarray(w, dtype=np.complex128)
    center = -np.rint(w.real)
    offs = np.arange(-half, half + 1, dtype=np.float64)
    js = center[:, None] + offs[None, :]
    den = w[:, None] + js
    zero = den == 0
    den = np.where(zero, 1.0, den)
    terms = np.where(zero, 0.0, den ** (-k))
    return terms.sum(axis=1), center - half, center + half


if HAVE_NUMBA:

    @njit(cache=True)
    def _window_kernel(w, k, half):
        n = w.shape[0]
        out = np.zeros(n, dtype=np.complex128)
        jlo = np.empty(n)
        jhi = np.empty(n)
        for i in range(n):
            c = -np.rint(w[i].real)
            jlo[i] = c - half
            jhi[i] = c + half
            acc = 0j
            for t in range(-half, half + 1):
                d = w[i] + (c + t)
                if d == 0:
                    continue
                r = 1.0 / d
                x = r
                for _ in range(k - 1):
                    x *= r
                acc += x
            out[i] = acc
        return out, jlo, jhi

    def window_sums_numba(w, k, half):
        return _window_kernel(np.asarray(w, dtype=np.complex128), k, half)

else:
    window_sums_numba = None


def window_sums(w, k, half):
    if HAVE_NUMBA:
        return window_sums_numba(w, k, half)
    return window_sums_numpy(w, k, half)
