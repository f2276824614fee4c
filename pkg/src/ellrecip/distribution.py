"""Finite-level distributions on the adelic plane and their consistency checks.

Compact opens are unions of boxes (a + rZ^) x (b + rZ^).  The Eisenstein
distribution is evaluated lazily on boxes; the Siegel distribution is
tested through the c-twisted integral units.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import factorial, gcd

from .eisenstein import (
    TorsionIndex,
    eisenstein_F,
    eisenstein_F_u,
    e_series_spec,
    siegel_form_c,
    siegel_unit_c,
)
from .errors import DomainError, LatticePointError
from .reports import failure, make_report

__all__ = [
    "CosetBox",
    "LCFunction",
    "integrate_eis_dR",
    "integrate_eis_dR_u",
    "distribution_relation_check",
    "siegel_distribution_check",
    "borel_equivariance_check",
    "borel_siegel_check",
    "siegel_lift_check",
    "siegel_composition_check",
    "siegel_dlog_check",
    "siegel_precision",
]


def _lcm(a, b):
    return a * b // gcd(a, b)


@dataclass(frozen=True)
class CosetBox:
    """(a + rZ^) x (b + rZ^) with 0 <= a, b < r."""

    r: int
    a: int
    b: int

    def __post_init__(self):
        if self.r < 1:
            raise DomainError("box scale must be a positive integer", "r >= 1")
        object.__setattr__(self, "a", self.a % self.r)
        object.__setattr__(self, "b", self.b % self.r)

    def index(self) -> TorsionIndex:
        return TorsionIndex(self.r, self.a, self.b)

    def refine(self, D: int):
        """The D^2 sub-boxes at scale rD, in (i, j) order."""
        r = self.r
        return [CosetBox(r * D, self.a + i * r, self.b + j * r) for i in range(D) for j in range(D)]

    def key(self):
        return [self.r, self.a, self.b]


class LCFunction:
    """Integer combination of indicator functions of boxes."""

    def __init__(self, terms=()):
        self.terms = [(int(w), box) for w, box in terms]

    def __add__(self, other):
        return LCFunction(self.terms + other.terms)

    def level(self) -> int:
        R = 1
        for _, box in self.terms:
            R = _lcm(R, box.r)
        return R

    def normal_form(self, R=None) -> dict:
        """Weights on the boxes of the common refinement at scale R."""
        R = self.level() if R is None else R
        out = {}
        for w, box in self.terms:
            if R % box.r:
                raise DomainError(f"scale {R} does not refine {box.r}")
            for sub in box.refine(R // box.r):
                out[sub] = out.get(sub, 0) + w
        return {b: w for b, w in out.items() if w}

    def __eq__(self, other):
        R = _lcm(self.level(), other.level())
        return self.normal_form(R) == other.normal_form(R)

    def integrate(self, k, prec, hecke_e2=False):
        total = None
        for w, box in self.terms:
            v = integrate_eis_dR(k, box, prec, hecke_e2)
            v = v.embed(_lcm(v.level, self.level()))
            term = v * w
            if total is None:
                total = term
            else:
                L = _lcm(total.level, term.level)
                total = total.embed(L) + term.embed(L)
        return total


def integrate_eis_dR(k: int, box: CosetBox, prec, hecke_e2: bool = False):
    """r^(k-2) F^(k) at (a/r, b/r)."""
    return eisenstein_F(k, box.index(), prec, hecke_e2) * Fraction(box.r) ** (k - 2)


def integrate_eis_dR_u(k: int, u: int, box: CosetBox, prec, p: int):
    """(1/(k-2)!) r^(k-2) F^(k)_u at (a/r, b/r)."""
    if k < 2:
        raise DomainError("the u-twisted distribution needs k >= 2", "k >= 2")
    val = eisenstein_F_u(k, u, box.index(), prec, p)
    return val * (Fraction(box.r) ** (k - 2) / factorial(k - 2))


def _sum_at_level(values, level):
    total = None
    for v in values:
        v = v.embed(level)
        total = v if total is None else total + v
    return total


def distribution_relation_check(k, box: CosetBox, D: int, prec, hecke_e2=False):
    params = {"k": k, "box": box.key(), "D": D, "prec": str(Fraction(prec))}
    if D == 1:
        return make_report("distribution_relation", params)
    try:
        lhs = integrate_eis_dR(k, box, prec, hecke_e2)
    except DomainError as exc:
        return make_report("distribution_relation", params, skipped=str(exc))
    subs = box.refine(D)
    rhs = _sum_at_level((integrate_eis_dR(k, s, prec, hecke_e2) for s in subs), box.r * D)
    lhs = lhs.embed(box.r * D)
    if lhs == rhs:
        return make_report("distribution_relation", params)
    return make_report("distribution_relation", params, failure(box.key(), lhs, rhs))


def siegel_precision(c, idx, extra=2):
    """Absolute precision `extra` beyond the leading order of g_c."""
    return siegel_form_c(c, idx, 1).E0 + extra


def siegel_distribution_check(c, box: CosetBox, D: int, extra=2, perturb=False):
    """g_c at the box equals the product of g_c over the D^2 sub-boxes."""
    params = {"c": c, "box": box.key(), "D": D, "relPrec": extra}
    if gcd(c, 6) != 1 or gcd(c, D) != 1:
        raise DomainError(f"need gcd(c,6) = gcd(c,D) = 1 (c={c}, D={D})", "gcd(c, 6D) = 1")
    if D == 1:
        return make_report("siegel_distribution", params)
    idx = box.index()
    subs = box.refine(D)
    for s in [box] + subs:
        if not s.index().nonzero or not s.index().scaled(c).nonzero:
            return make_report("siegel_distribution", params, excluded=f"excluded coset {s.key()}")
    P = siegel_precision(c, idx, extra)
    level = box.r * D
    lhs = siegel_unit_c(c, idx, P).embed(level)
    orders = [siegel_form_c(c, s.index(), 1).E0 for s in subs]
    total = sum(orders)
    rhs = None
    for n, s in enumerate(subs):
        # each factor to P minus the other factors' orders, so the product reaches P
        Pn = P - (total - orders[n])
        g = siegel_unit_c(c, s.index(), Pn).embed(level)
        if perturb and n == 0:
            g = g * 2
        rhs = g if rhs is None else rhs * g
    eps = _unit_ratio(lhs, rhs, level)
    if eps is not None and lhs.scale(eps).agrees(rhs, P):
        return make_report("siegel_distribution", params, epsilon=str(eps), strict=eps == 1)
    return make_report("siegel_distribution", params, failure(box.key(), lhs, rhs))


def _unit_ratio(lhs, rhs, level):
    """rhs/lhs leading-coefficient ratio if it is a root of unity of order | 2*level."""
    e = lhs.ord()
    a, b = lhs.coeff(e), rhs.coeff(e)
    if a.is_zero() or b.is_zero():
        return None
    eps = b / a
    return eps if eps ** (2 * level) == 1 else None


def _indices(L):
    return [(a, b) for a in range(L) for b in range(L)]


def borel_equivariance_check(k, L, prec, ds=None):
    """twist_T(F_{a,b}) = F_{a,a+b} and sigma_d(F_{a,b}) = F_{a,db} at level L."""
    ds = [d for d in range(1, L + 1) if gcd(d, L) == 1] if ds is None else ds
    params = {"k": k, "L": L, "prec": str(Fraction(prec)), "d": ds}
    for a, b in _indices(L):
        idx = TorsionIndex(L, a, b)
        try:
            f = eisenstein_F(k, idx, prec)
        except DomainError:
            continue
        lhs, rhs = f.twist_T(), eisenstein_F(k, TorsionIndex(L, a, a + b), prec)
        if lhs != rhs:
            return make_report("borel_equivariance", params, failure([L, a, b, "T"], lhs, rhs))
        for d in ds:
            if gcd(d, L) != 1:
                raise DomainError(f"gcd({d}, {L}) != 1", "d must be prime to the level")
            lhs, rhs = f.galois(d), eisenstein_F(k, TorsionIndex(L, a, d * b), prec)
            if lhs != rhs:
                return make_report("borel_equivariance", params, failure([L, a, b, "d", d], lhs, rhs))
    return make_report("borel_equivariance", params)


def borel_siegel_check(c, L, extra=2, ds=None):
    """The same Borel invariance for the Siegel units g_c."""
    ds = [d for d in range(1, L + 1) if gcd(d, L) == 1] if ds is None else ds
    params = {"c": c, "L": L, "relPrec": extra, "d": ds}
    for a, b in _indices(L):
        idx = TorsionIndex(L, a, b)
        if not idx.nonzero or not idx.scaled(c).nonzero:
            continue
        P = siegel_precision(c, idx, extra)
        g = siegel_unit_c(c, idx, P)
        lhs, rhs = g.twist_T(), siegel_unit_c(c, TorsionIndex(L, a, a + b), P)
        if lhs != rhs:
            return make_report("borel_siegel", params, failure([L, a, b, "T"], lhs, rhs))
        for d in ds:
            lhs, rhs = g.galois(d), siegel_unit_c(c, TorsionIndex(L, a, d * b), P)
            if lhs != rhs:
                return make_report("borel_siegel", params, failure([L, a, b, "d", d], lhs, rhs))
    return make_report("borel_siegel", params)


def siegel_lift_check(c, L, extra=2, shifts=((1, 0), (-2, 0), (0, 1), (1, -1))):
    """g_c does not depend on the lift of (a/L, b/L)."""
    params = {"c": c, "L": L, "relPrec": extra}
    for a, b in _indices(L):
        idx = TorsionIndex(L, a, b)
        if not idx.nonzero or not idx.scaled(c).nonzero:
            continue
        P = siegel_precision(c, idx, extra)
        base = siegel_form_c(c, idx, P).series(P, level=L)
        for da, db in shifts:
            other = _siegel_with_lift(c, L, a + da * L, b + db * L, P)
            if other != base:
                return make_report("siegel_lift", params, failure([L, a, b, da, db], base, other))
    return make_report("siegel_lift", params)


def _siegel_with_lift(c, L, a_lift, b_lift, prec):
    # theta(z)^(c^2)/theta(cz) built directly from the unreduced pair
    from .eisenstein import theta_form, _covering

    def build(bound):
        base = theta_form(1, L, a_lift, b_lift, bound)
        scaled = theta_form(1, L, c * a_lift, c * b_lift, bound, scale=c)
        return base ** (c * c) * scaled ** (-1)

    return _covering(build, prec).series(prec, level=L)


def siegel_composition_check(c1, c2, L, extra=2):
    """g_c1(x)^(c2^2) / g_c1(c2 x) = g_c2(x)^(c1^2) / g_c2(c1 x)."""
    params = {"c": [c1, c2], "L": L, "relPrec": extra}
    checked = 0
    for a, b in _indices(L):
        idx = TorsionIndex(L, a, b)
        pts = [idx, idx.scaled(c1), idx.scaled(c2), idx.scaled(c1 * c2)]
        if not all(x.nonzero for x in pts):
            continue
        # forms complete to relative order `extra` suffice for any product
        lhs_f = siegel_form_c(c1, idx, extra) ** (c2 * c2) * siegel_form_c(c1, idx.scaled(c2), extra) ** -1
        rhs_f = siegel_form_c(c2, idx, extra) ** (c1 * c1) * siegel_form_c(c2, idx.scaled(c1), extra) ** -1
        P = lhs_f.E0 + extra
        lhs, rhs = lhs_f.series(P, level=L), rhs_f.series(P, level=L)
        checked += 1
        if lhs != rhs:
            return make_report("siegel_composition", params, failure([L, a, b], lhs, rhs))
    return make_report("siegel_composition", params, checkedIndices=checked)


def siegel_dlog_check(c, L, prec=2):
    """D2 log g_c = c^2 E_1(x) - c E_1(c x), lifts kept consistent.

    Also checks q d/dq log of the expanded unit against the factored form.
    """
    params = {"c": c, "L": L, "prec": str(Fraction(prec))}
    for a, b in _indices(L):
        idx = TorsionIndex(L, a, b)
        if not idx.nonzero or not idx.scaled(c).nonzero:
            continue
        form = siegel_form_c(c, idx, prec)
        lhs = form.e_series(1, prec)
        rhs = e_series_spec(1, 1, idx, prec) * (c * c) - e_series_spec(
            1, 1, TorsionIndex(L, c * a, c * b), prec, lift=c * a
        ) * c
        if lhs != rhs:
            return make_report("siegel_dlog", params, failure([L, a, b, "D2"], lhs, rhs))
        P = form.E0 + prec
        g = siegel_unit_c(c, idx, P)
        qd = g.q_derivative() / g
        ref = form.dlog(prec)
        if not qd.agrees(ref, prec):
            return make_report("siegel_dlog", params, failure([L, a, b, "qdlog"], qd, ref))
    return make_report("siegel_dlog", params)
