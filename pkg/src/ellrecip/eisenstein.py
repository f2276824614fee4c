"""Theta specializations, Eisenstein series and Siegel units as exact q-series.

The theta product is specialized at x1 = q^s, x2 = q^e zeta_L^b with
e = lift/L.  Every factor (1 - y) whose q-exponent is negative is rewritten
as -y (1 - 1/y), so the result is a monomial times a product of factors
(1 - zeta^j q^E) with E > 0, plus constant factors (1 - zeta^j) when E = 0.
All derived series (logarithmic derivatives, E_k, Siegel units) are read off
this factored form.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import comb, factorial, gcd

from .cyclotomic import CycNumber
from .errors import DomainError, LatticePointError
from .qseries import QExpansion

__all__ = [
    "TorsionIndex",
    "ProductForm",
    "theta_form",
    "theta_spec",
    "d2log_theta_spec",
    "e_series_spec",
    "e1_periodic",
    "eisenstein_F",
    "eisenstein_F_u",
    "u_act",
    "siegel_unit_c",
    "siegel_unit_u",
    "siegel_form_c",
    "siegel_form_u",
    "periodic_bernoulli",
    "polylog_neg",
]


def _lcm(a, b):
    return a * b // gcd(a, b)


@dataclass(frozen=True)
class TorsionIndex:
    """(a/L, b/L) in (Q/Z)^2 with canonical representatives 0 <= a, b < L."""

    L: int
    a: int
    b: int

    def __post_init__(self):
        if self.L < 1:
            raise DomainError("torsion level must be positive", "L >= 1")
        object.__setattr__(self, "a", self.a % self.L)
        object.__setattr__(self, "b", self.b % self.L)

    @property
    def nonzero(self) -> bool:
        return self.a != 0 or self.b != 0

    def scaled(self, c: int) -> "TorsionIndex":
        return TorsionIndex(self.L, c * self.a, c * self.b)


# -- Bernoulli numbers and polylogarithms at negative integers ---------------

@lru_cache(maxsize=None)
def _bernoulli_poly(k: int) -> tuple[Fraction, ...]:
    """Coefficients of B_k(x), lowest degree first."""
    B = [Fraction(1)]
    for m in range(1, k + 1):
        B.append(-sum(comb(m + 1, j) * B[j] for j in range(m)) / (m + 1))
    return tuple(comb(k, i) * B[k - i] for i in range(k + 1))


def periodic_bernoulli(k: int, x) -> Fraction:
    """B_k({x}), with the value 0 for k = 1 at integers."""
    x = Fraction(x)
    frac = x - (x.numerator // x.denominator)
    if k == 1 and frac == 0:
        return Fraction(0)
    return sum(c * frac**i for i, c in enumerate(_bernoulli_poly(k)))


@lru_cache(maxsize=None)
def _eulerian_numerator(m: int) -> tuple[Fraction, ...]:
    # Li_{-m}(x) = P_m(x) / (1-x)^(m+1),  P_0 = x,
    # P_{m+1} = x (P_m' (1-x) + (m+1) P_m)
    if m == 0:
        return (Fraction(0), Fraction(1))
    P = list(_eulerian_numerator(m - 1))
    dP = [i * P[i] for i in range(1, len(P))] + [Fraction(0)]
    inner = [Fraction(0)] * (len(P) + 1)
    for i, c in enumerate(dP):
        inner[i] += c
        inner[i + 1] -= c
    for i, c in enumerate(P):
        inner[i] += m * c
    return tuple([Fraction(0)] + inner)


def polylog_neg(m: int, x: CycNumber) -> CycNumber:
    """Li_{-m}(x) for x != 1, as the rational function sum_{j>=1} j^m x^j."""
    P = _eulerian_numerator(m)
    num = CycNumber.zero(x.level)
    for c in reversed(P):
        num = num * x + c
    return num * ((1 - x) ** (m + 1)).inv()


# -- factored theta products ----------------------------------------------------

class ProductForm:
    """zeta_{2L}^z2 * q^E0 * x2^delta * prod (1 - zeta_L^j q^E)^mult.

    ``factors`` holds tuples (j, E, d, mult) with E >= 0; d is the degree of
    the factor in x2, used by the operator D2 = x2 d/dx2.  All factors with
    exponent below ``complete`` are present.
    """

    __slots__ = ("L", "z2", "E0", "delta", "factors", "complete")

    def __init__(self, L, z2, E0, delta, factors, complete):
        self.L = L
        self.z2 = z2 % (2 * L)
        self.E0 = Fraction(E0)
        self.delta = Fraction(delta)
        self.factors = list(factors)
        self.complete = Fraction(complete)

    def __mul__(self, other: "ProductForm") -> "ProductForm":
        if other.L != self.L:
            raise DomainError("product forms at different levels")
        return ProductForm(
            self.L, self.z2 + other.z2, self.E0 + other.E0, self.delta + other.delta,
            self.factors + other.factors, min(self.complete, other.complete),
        )

    def __pow__(self, n: int) -> "ProductForm":
        return ProductForm(
            self.L, self.z2 * n, self.E0 * n, self.delta * n,
            [(j, E, d, m * n) for j, E, d, m in self.factors], self.complete,
        )

    def shift(self, e) -> "ProductForm":
        return ProductForm(self.L, self.z2, self.E0 + e, self.delta, self.factors, self.complete)

    def _check(self, rel):
        if rel > self.complete:
            raise DomainError(
                f"factored form only complete below q^{self.complete}, need q^{rel}"
            )

    def _merged(self):
        acc = {}
        for j, E, d, m in self.factors:
            key = (j % self.L, E)
            acc[key] = acc.get(key, 0) + m
        return {k: m for k, m in acc.items() if m}

    def series(self, prec, level=None, exp_denom=None) -> QExpansion:
        """Expand to absolute precision ``prec``."""
        L = self.L
        level = 2 * L if level is None else level
        prec = Fraction(prec)
        rel = prec - self.E0
        self._check(rel)
        merged = self._merged()
        if exp_denom is None:
            exp_denom = self.E0.denominator
            for _, E in merged:
                exp_denom = _lcm(exp_denom, E.denominator)
        if level % L:
            raise DomainError(f"level {level} is not a multiple of {L}")
        coef = _zeta_half(self.z2, L, level)
        zL = level // L
        unit = QExpansion.constant(1, level, max(rel, Fraction(0)), exp_denom)
        for (j, E), m in sorted(merged.items()):
            c = CycNumber.zeta(level, j * zL)
            if E == 0:
                coef = coef * (1 - c) ** m
                continue
            if E >= rel:
                continue
            terms = {}
            step = E * exp_denom
            i, ci = 0, CycNumber.one(level)
            while i * E < rel:
                terms[int(i * step)] = ci * (_gbinom(m, i) * (-1) ** i)
                ci = ci * c
                i += 1
            unit = unit * QExpansion(exp_denom, level, rel, terms)
        return unit.shift(self.E0).scale(coef).truncate(prec) if rel > 0 else QExpansion.zero(level, prec, exp_denom)

    def e_series(self, k: int, prec) -> QExpansion:
        """D2^(k-1) of D2 log, the E_k-specialization of this form."""
        prec = Fraction(prec)
        self._check(prec)
        L = self.L
        exp_denom = L
        for _, E, _, _ in self.factors:
            exp_denom = _lcm(exp_denom, E.denominator)
        group = {}
        const = CycNumber.rational(L, self.delta if k == 1 else 0)
        for j, E, d, m in self.factors:
            w = m * d**k
            if not w:
                continue
            if E == 0:
                const = const - polylog_neg(k - 1, CycNumber.zeta(L, j)) * w
                continue
            i = 1
            while i * E < prec:
                n = int(i * E * exp_denom)
                group.setdefault(n, {})
                key = (i * j) % L
                group[n][key] = group[n].get(key, 0) - w * i ** (k - 1)
                i += 1
        terms = {n: CycNumber.from_group_ring(L, g) for n, g in group.items()}
        terms[0] = terms.get(0, CycNumber.zero(L)) + const
        return QExpansion(exp_denom, L, prec, terms)

    def dlog(self, prec) -> QExpansion:
        """q d/dq log of the form."""
        prec = Fraction(prec)
        self._check(prec)
        L = self.L
        exp_denom = L
        for _, E, _, _ in self.factors:
            exp_denom = _lcm(exp_denom, E.denominator)
        group = {}
        for j, E, d, m in self.factors:
            if E == 0 or not m:
                continue
            i = 1
            while i * E < prec:
                n = int(i * E * exp_denom)
                group.setdefault(n, {})
                key = (i * j) % L
                group[n][key] = group[n].get(key, 0) - m * E
                i += 1
        terms = {n: CycNumber.from_group_ring(L, g) for n, g in group.items()}
        terms[0] = terms.get(0, CycNumber.zero(L)) + self.E0
        return QExpansion(exp_denom, L, prec, terms)


def _zeta_half(k: int, L: int, level: int) -> CycNumber:
    """zeta_{2L}^k as an element of Q(zeta_level), L | level."""
    if (level * k) % (2 * L) == 0:
        return CycNumber.zeta(level, level * k // (2 * L))
    if L % 2:
        # zeta_{2L}^L = -1
        return -CycNumber.zeta(level, level * (k + L) // (2 * L))
    raise DomainError(f"zeta_{2 * L}^{k} does not lie in Q(zeta_{level})")


def _gbinom(m: int, i: int) -> Fraction:
    r = Fraction(1)
    for t in range(i):
        r = r * (m - t) / (t + 1)
    return r


def theta_form(s: int, L: int, lift: int, b: int, rel_bound, scale: int = 1) -> ProductForm:
    """theta(x1, x2) at x1 = q^s, x2 = q^(lift/L) zeta_L^b.

    ``scale`` records the degree of x2 relative to a base point, so that
    theta(c z) can be differentiated in the variable of z.
    """
    if s < 1:
        raise DomainError("x1 exponent must be positive")
    e = Fraction(lift, L)
    rel_bound = Fraction(rel_bound)
    z2 = b  # x2^(1/2) carries zeta_{2L}^b
    E0 = Fraction(s, 12) + e / 2
    delta = Fraction(scale, 2)
    raw = [(-b, -e, -scale)]
    n = 1
    while n * s < rel_bound + abs(e):
        raw.append((b, n * s + e, scale))
        raw.append((-b, n * s - e, -scale))
        n += 1
    complete = n * s - abs(e)
    factors = []
    for j, E, d in raw:
        if E < 0:
            z2 += L + 2 * j
            E0 += E
            delta += d
            j, E, d = -j, -E, -d
        if E == 0 and j % L == 0:
            raise LatticePointError()
        factors.append((j % L, E, d, 1))
    return ProductForm(L, z2, E0, delta, factors, complete)


def _covering(build, prec):
    # enlarge the factor range until both the additive and the
    # multiplicative expansions are complete to prec
    prec = Fraction(prec)
    bound = prec + 1
    while True:
        form = build(bound)
        if form.complete >= prec - form.E0 and form.complete >= prec:
            return form
        bound = bound * 2 + 1


def _theta_form_for(s, L, lift, b, prec, scale=1):
    return _covering(lambda bound: theta_form(s, L, lift, b, bound, scale), prec)


def _lift_for(s, idx, lift):
    if lift is None:
        return idx.a
    if (lift - idx.a) % idx.L:
        raise DomainError(f"lift {lift} does not reduce to {idx.a} mod {idx.L}")
    return lift


def _check_domain(s, idx, lift):
    e = Fraction(lift, idx.L)
    if e % s == 0 and idx.b == 0:
        raise LatticePointError()


def theta_spec(s: int, idx: TorsionIndex, prec, lift=None) -> QExpansion:
    """theta(q^s, q^(a'/L) zeta_L^b) with expDenom lcm(12, 2L), level 2L."""
    lift = _lift_for(s, idx, lift)
    _check_domain(s, idx, lift)
    form = _theta_form_for(s, idx.L, lift, idx.b, prec)
    return form.series(prec, level=2 * idx.L, exp_denom=_lcm(12, 2 * idx.L))


def e_series_spec(k: int, s: int, idx: TorsionIndex, prec, lift=None) -> QExpansion:
    """D2^(k-1) D2 log theta at x1 = q^s, x2 = q^(a'/L) zeta_L^b."""
    if k < 1:
        raise DomainError("weight must be at least 1", "k >= 1")
    lift = _lift_for(s, idx, lift)
    _check_domain(s, idx, lift)
    return _theta_form_for(s, idx.L, lift, idx.b, prec).e_series(k, prec)


def d2log_theta_spec(s: int, idx: TorsionIndex, prec, lift=None) -> QExpansion:
    return e_series_spec(1, s, idx, prec, lift)


def e1_periodic(s: int, idx: TorsionIndex, prec, lift=None) -> QExpansion:
    """D2 log theta + e/s: the lift-independent completion of the k=1 series."""
    lift = _lift_for(s, idx, lift)
    return d2log_theta_spec(s, idx, prec, lift) + Fraction(lift, idx.L * s)


# -- F series ---------------------------------------------------------------

def eisenstein_F(k: int, idx: TorsionIndex, prec, hecke_e2: bool = False) -> QExpansion:
    """F_k at (a/L, b/L) via its Fourier expansion in q^(1/L)."""
    if k < 1:
        raise DomainError("weight must be at least 1", "k >= 1")
    L, a, b = idx.L, idx.a, idx.b
    if k == 2 and not idx.nonzero and not hecke_e2:
        raise DomainError(
            "F_2 at (0,0) needs the Hecke-summed E2 flag",
            "k = 2 requires (alpha, beta) != (0, 0)",
        )
    prec = Fraction(prec)
    bound = prec * L
    group = {}

    def add(n, key, val):
        g = group.setdefault(n, {})
        g[key] = g.get(key, 0) + val

    sign = (-1) ** k
    for r, zsign, wsign in ((a, 1, 1), ((-a) % L, -1, sign)):
        # mu = (r + jL)/L > 0, exponent m*mu in units of 1/L
        start = r if r else L
        m = 1
        while m * start < bound:
            num = start
            while m * num < bound:
                add(m * num, (zsign * m * b) % L, wsign * Fraction(num, L) ** (k - 1))
                num += L
            m += 1
    terms = {n: CycNumber.from_group_ring(L, g) for n, g in group.items()}
    const = CycNumber.rational(L, -periodic_bernoulli(k, Fraction(a, L)) / k)
    if k == 1 and a == 0 and b != 0:
        z = CycNumber.zeta(L, b)
        const = (1 + z) * (1 - z).inv() * Fraction(1, 2)
    terms[0] = terms.get(0, CycNumber.zero(L)) + const
    return QExpansion(L, L, prec, terms)


def u_act(u: int, L: int, a: int, p: int) -> int:
    """Multiply a/L by u on the p-part of L only (CRT), result mod L."""
    if u % p == 0:
        raise DomainError(f"u={u} is divisible by p={p}", "u must be prime to p")
    pv, rest = 1, L
    while rest % p == 0:
        rest //= p
        pv *= p
    # x = u*a mod pv, x = a mod rest
    x = a % rest
    while x % pv != (u * a) % pv:
        x += rest
    return x % L


def _u_index(u, idx, p):
    return TorsionIndex(idx.L, u_act(u, idx.L, idx.a, p), u_act(u, idx.L, idx.b, p))


def eisenstein_F_u(k: int, u: int, idx: TorsionIndex, prec, p: int, hecke_e2: bool = False) -> QExpansion:
    """u^2 F_(a,b) - u^(2-k) F_(<u>a, <u>b)."""
    if u < 1:
        raise DomainError("u must be a positive integer", "u positive, prime to p")
    twisted = _u_index(u, idx, p)
    first = eisenstein_F(k, idx, prec, hecke_e2) * (u * u)
    return first - eisenstein_F(k, twisted, prec, hecke_e2) * Fraction(u) ** (2 - k)


# -- Siegel units ---------------------------------------------------------

def siegel_form_c(c: int, idx: TorsionIndex, prec, lift=None) -> ProductForm:
    if gcd(c, 6) != 1:
        raise DomainError(f"gcd({c}, 6) != 1", "c must be prime to 6")
    if not idx.scaled(c).nonzero or not idx.nonzero:
        raise LatticePointError()
    lift = _lift_for(1, idx, lift)
    L, b = idx.L, idx.b

    def build(bound):
        base = theta_form(1, L, lift, b, bound)
        scaled = theta_form(1, L, c * lift, c * b, bound, scale=c)
        return base ** (c * c) * scaled ** (-1)

    return _covering(build, prec)


def siegel_unit_c(c: int, idx: TorsionIndex, prec, lift=None) -> QExpansion:
    """theta(z)^(c^2) / theta(c z) with z = (a'/L) tau + b/L, at level L."""
    return siegel_form_c(c, idx, prec, lift).series(prec, level=idx.L)


def siegel_form_u(u: int, idx: TorsionIndex, prec, p: int, lift=None) -> ProductForm:
    if gcd(u, 6 * p) != 1:
        raise DomainError(f"gcd({u}, 6p) != 1", "u must be prime to 6p")
    if not idx.nonzero:
        raise LatticePointError()
    lift = _lift_for(1, idx, lift)
    tw = _u_index(u, idx, p)
    e = Fraction(lift, idx.L)
    eu = Fraction(tw.a, idx.L)

    def build(bound):
        base = theta_form(1, idx.L, lift, idx.b, bound).shift(e * e / 2)
        twisted = theta_form(1, idx.L, tw.a, tw.b, bound).shift(eu * eu / 2)
        return base ** (u * u) * twisted ** (-1)

    return _covering(build, prec)


def siegel_unit_u(u: int, idx: TorsionIndex, prec, p: int, lift=None) -> QExpansion:
    """G(z)^(u^2) / G(<u> z) with G = q^(e^2/2) theta, at level 2L."""
    return siegel_form_u(u, idx, prec, p, lift).series(prec, level=2 * idx.L)
