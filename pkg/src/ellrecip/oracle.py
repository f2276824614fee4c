"""Floating-point lattice sums for E_k and F_k, used to pin normalizations.

The outer sum over m runs over |m| <= cutoff with a smooth flat-top window,
which regularizes the conditionally convergent weight-one cases.  For each
m the inner sum over n is split by residue class mod L, summed directly
over a window, and completed by Euler-Maclaurin tails with symmetric
truncation in n.
"""
import cmath
import math

import numpy as np

from . import _accel
from .errors import DomainError

__all__ = ["lattice_oracle", "smooth_window"]

_HALF = 100
# B_2/2!, B_4/4!, B_6/6!
_EM = ((1, 1.0 / 12), (3, -1.0 / 720), (5, 1.0 / 30240))


def smooth_window(x):
    """1 on [0, 1/2], smooth monotone decay to 0 at 1."""
    x = np.asarray(x, dtype=float)
    t = np.clip((1.0 - x) * 2.0, 0.0, 1.0)
    with np.errstate(divide="ignore", over="ignore"):
        f = np.where(t > 0, np.exp(-1.0 / np.where(t > 0, t, 1.0)), 0.0)
        g = np.where(t < 1, np.exp(-1.0 / np.where(t < 1, 1.0 - t, 1.0)), 0.0)
    return f / (f + g)


def _deriv(w, x, k, order):
    # d^order/dx^order (x + w)^(-k)
    c = 1.0
    for i in range(order):
        c *= -(k + i)
    return c * (x + w) ** (-k - order)


def _full_line(w, k, half=_HALF):
    """sum over all integers j of (w + j)^(-k), symmetric in j, j = -w skipped."""
    win, jlo, jhi = _accel.window_sums(w, k, half)
    A = jhi + 1.0
    B = jlo - 1.0
    if k == 1:
        integral = np.log(-w - B) - np.log(w + A)
    else:
        integral = ((A + w) ** (1 - k) - (B + w) ** (1 - k)) / (k - 1)
    tail = integral + 0.5 * ((A + w) ** (-k) + (B + w) ** (-k))
    for order, coef in _EM:
        tail = tail - coef * (_deriv(w, A, k, order) - _deriv(w, B, k, order))
    return win + tail


def lattice_oracle(kind, k, s, idx, tau, cutoff=400, lift=None):
    """Numeric E_k(s tau, e tau + b/L) or F_k(tau, (a tau + b)/L).

    ``kind`` is "E" or "F".  For "E" the point is e = lift/L (default a/L)
    with lattice Z + Z s tau; ``s`` is ignored for "F".
    """
    if tau.imag <= 0:
        raise DomainError("tau must lie in the upper half plane", "Im tau > 0")
    if k < 1:
        raise DomainError("weight must be at least 1", "k >= 1")
    L, a, b = idx.L, idx.a, idx.b
    K = int(cutoff)
    ms = np.arange(-K, K + 1)
    weights = smooth_window(np.abs(ms) / K)
    pref = math.factorial(k - 1) / (-2j * math.pi) ** k
    if kind == "E":
        e = (a if lift is None else lift) / L
        z = e * tau + b / L
        w = ms * (s * tau) + z
        inner = _full_line(w, k)
        return complex(pref * np.sum(weights * inner))
    if kind == "F":
        total = np.zeros(len(ms), dtype=np.complex128)
        for r in range(L):
            w = (ms * tau + r) / L
            inner = _full_line(w, k) / L**k
            total += cmath.exp(-2j * math.pi * r * a / L) * inner
        chars = np.exp(2j * math.pi * ms * b / L)
        return complex(pref * np.sum(weights * chars * total))
    raise DomainError(f"unknown oracle kind {kind!r}")
