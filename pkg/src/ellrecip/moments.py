"""Sym^(k-2)-weighted moments of the Siegel-unit tower and their p-adic coherence.

The Kummer image of g_u at a torsion point is replaced by its logarithmic
q-derivative, so a moment S_n is a vector of q-expansions

    S_n[i] = (1/(k-2)!) sum binom(k-2, i) a^(k-2-i) b^i  dlog g_u(N p^n; a, b)

over 1 <= a, b <= N p^n with (a, b) = (alpha, beta) mod N and (a, b) not
both divisible by p.
"""
from __future__ import annotations

from fractions import Fraction
from math import comb, factorial, gcd

from .eisenstein import TorsionIndex, siegel_form_u
from .errors import DomainError
from .qseries import QExpansion
from .reports import make_report, run_ordered

__all__ = ["SymVector", "soule_moment", "measure_coherence_check", "moment_grid"]


class SymVector:
    """Components indexed by e1^(k-2-i) e2^i, 0 <= i <= k-2."""

    def __init__(self, k: int, components):
        components = list(components)
        if k < 2 or len(components) != k - 1:
            raise DomainError(f"weight {k} needs {max(k - 1, 0)} components", "k >= 2")
        self.k = k
        self.components = components

    def __getitem__(self, i) -> QExpansion:
        return self.components[i]

    def __len__(self):
        return len(self.components)

    def _zip(self, other, op):
        if self.k != other.k:
            raise DomainError("weights differ", "same k")
        return SymVector(self.k, [op(x, y) for x, y in zip(self.components, other.components)])

    def __add__(self, other):
        return self._zip(other, lambda x, y: x + y)

    def __sub__(self, other):
        return self._zip(other, lambda x, y: x - y)

    def scale(self, c) -> "SymVector":
        return SymVector(self.k, [x.scale(c) for x in self.components])

    def embed(self, level: int) -> "SymVector":
        return SymVector(self.k, [x.embed(level) for x in self.components])

    def __eq__(self, other):
        return isinstance(other, SymVector) and self.k == other.k and self.components == other.components

    def __repr__(self):
        return f"SymVector(k={self.k}, {[str(c) for c in self.components]})"


def _check(k, u, N, p):
    if k < 2:
        raise DomainError("weight must be at least 2", "k >= 2")
    if gcd(N, p) != 1:
        raise DomainError(f"gcd(N, p) = gcd({N}, {p}) != 1", "N prime to p")
    if gcd(u, 6 * p) != 1:
        raise DomainError(f"gcd({u}, 6p) != 1", "u must be prime to 6p")


def moment_grid(N, p, n, alpha, beta):
    """Grid points at level N p^n in the residue class, off p Z_p^2."""
    L = N * p**n
    a0, b0 = (alpha - 1) % N + 1, (beta - 1) % N + 1
    return [
        (a, b)
        for a in range(a0, L + 1, N)
        for b in range(b0, L + 1, N)
        if a % p or b % p
    ]


def _weights(k, a, b):
    return [comb(k - 2, i) * a ** (k - 2 - i) * b**i for i in range(k - 1)]


def _row(k, u, L, p, a, bs, prec):
    """Unnormalized weighted dlog sums for one value of a."""
    acc = None
    for b in bs:
        d = siegel_form_u(u, TorsionIndex(L, a, b), prec, p).dlog(prec)
        part = [d * w for w in _weights(k, a, b)]
        acc = part if acc is None else [x + y for x, y in zip(acc, part)]
    return acc


def _excluded_point(N, p, alpha, beta):
    """The level-Np point congruent to (alpha, beta) mod N and to 0 mod p."""
    a = next(x for x in range(p, N * p + 1, p) if (x - alpha) % N == 0)
    b = next(x for x in range(p, N * p + 1, p) if (x - beta) % N == 0)
    return a, b


def _raw_moment(k, u, N, alpha, beta, n, prec, p, workers=1):
    L = N * p**n
    grid = moment_grid(N, p, n, alpha, beta)
    rows = {}
    for a, b in grid:
        rows.setdefault(a, []).append(b)
    jobs = [(k, u, L, p, a, bs, prec) for a, bs in sorted(rows.items())]
    total = None
    for part in run_ordered(_row, jobs, workers):
        total = part if total is None else [x + y for x, y in zip(total, part)]
    if n == 0:
        # the box at level N still contains one sub-box inside p Z_p^2;
        # remove it so S_0 is the measure of the restricted box
        a, b = _excluded_point(N, p, alpha, beta)
        d = siegel_form_u(u, TorsionIndex(N * p, a, b), prec, p).dlog(prec).embed(N * p)
        w = _weights(k, alpha % N or N, beta % N or N)
        if total is None:
            total = [-(d * x) for x in w]
        else:
            total = [x.embed(N * p) - d * y for x, y in zip(total, w)]
    if total is None:
        raise DomainError("empty moment grid", "(alpha, beta) off p Z^2")
    return [x.embed(N * p ** max(n, 1)) for x in total]


def soule_moment(k, u, N, alpha, beta, n, prec, p, workers=1) -> SymVector:
    """S_n including the 1/(k-2)! normalization."""
    _check(k, u, N, p)
    raw = _raw_moment(k, u, N, alpha, beta, n, prec, p, workers)
    return SymVector(k, [x.scale(Fraction(1, factorial(k - 2))) for x in raw])


def measure_coherence_check(k, u, N, alpha, beta, n, prec, t, p, workers=1):
    """(k-2)! (S_(n+1) - S_n) must lie in p^t Z_(p)[zeta] componentwise.

    The prime-to-p denominators are cleared first; the clearing constant is
    reported together with the observed p-order of every component.
    """
    _check(k, u, N, p)
    params = {
        "k": k, "u": u, "N": N, "p": p, "alpha": alpha, "beta": beta,
        "n": n, "prec": str(Fraction(prec)), "t": t,
    }
    level = N * p ** (n + 1)
    lo = _raw_moment(k, u, N, alpha, beta, n, prec, p, workers)
    hi = _raw_moment(k, u, N, alpha, beta, n + 1, prec, p, workers)
    diffs = [h.embed(level) - l.embed(level) for h, l in zip(hi, lo)]
    clear = 1
    for d in diffs:
        c = d.prime_to_p_denominator(p)
        clear = clear * c // gcd(clear, c)
    orders = [d.p_order(p) for d in diffs]
    observed = min(orders)
    first = None
    for i, d in enumerate(diffs):
        cleared = d.scale(clear)
        bad = [(e, c) for e, c in cleared.items() if not c.is_p_integral(p, t)]
        if bad:
            e, c = bad[0]
            first = {"component": i, "exponent": str(e), "coefficient": str(c), "pOrder": str(c.p_order(p))}
            break
    return make_report(
        "measure_coherence",
        params,
        first,
        clearingConstant=clear,
        componentOrders=[str(o) for o in orders],
        observedSharpness=str(observed),
    )
