"""The trace R_M, the P_m-action, delta^(1), res_k and the reciprocity limit.

Conventions:

* A tower element at level M p^n is stored in the basis
  F_(Mp^n) = sum_(0 <= i < p^n) F_M zeta_(Mp^n)^i, with q-exponents counted
  in units of q_(Mp^n) = q^(1/(M p^n)).
* log zeta_L^c = (c/L) t, log(-1) = 0 and u_q = log q are carried as
  exact rational coordinates of a LogElement.
* P_m acts on the right: x * (g1 g2) = (x * g1) * g2, with
  (u1, v1)(u2, v2) = (e^v2 u1 + u2, v1 + v2).  On generators the action is
  t -> e^v t and q^e -> q^e exp(u e t), i.e. exp((u/p^m) d1) after
  exp((v/p^m) d2).
"""
from __future__ import annotations

from fractions import Fraction
from math import ceil, comb, factorial, gcd

from .cyclotomic import CycNumber, v_p
from .eisenstein import TorsionIndex, e1_periodic, eisenstein_F, eisenstein_F_u, u_act
from .errors import DomainError, LevelMismatchError
from .qseries import QExpansion
from .reports import make_report, run_ordered

__all__ = [
    "TowerElement",
    "trace_RM",
    "LogElement",
    "log_theta_tower",
    "log_theta_base",
    "rm_logtheta_check",
    "TadicElement",
    "derive_d1",
    "derive_d2",
    "PmElement",
    "padic_exp",
    "pm_act",
    "group_law_check",
    "generator_grid",
    "cocycle_delta1",
    "e_u1",
    "delta1",
    "weight_sym",
    "res_k_extract",
    "reciprocity_partial_sum",
    "corollary_sum",
    "exp_star_verify",
]


def _m_of(M, p):
    m = v_p(M, p)
    need = v_p(2 * p, p)
    if m < need:
        raise DomainError(f"v_p(M) = {m} is below v_p(2p) = {need}", "v_p(M) >= v_p(2p)")
    return m


# -- tower elements and R_M --------------------------------------------------

class TowerElement:
    """sum c_(i,j) zeta_(Mp^n)^i q_(Mp^n)^j with c_(i,j) in Q(zeta_M)."""

    def __init__(self, M: int, p: int, n: int, prec, data=None):
        if M % p:
            raise DomainError(f"p={p} does not divide M={M}", "p | M")
        self.M, self.p, self.n = M, p, n
        self.prec = Fraction(prec)
        size = p**n
        self.data = {}
        for (i, j), c in (data or {}).items():
            if not 0 <= i < size or j < 0:
                raise DomainError(f"basis index ({i}, {j}) out of range")
            if Fraction(j, M * size) < self.prec and not c.is_zero():
                self.data[(i, j)] = c

    @property
    def level(self) -> int:
        return self.M * self.p**self.n

    @classmethod
    def from_terms(cls, M, p, n, prec, terms):
        """Build from (root exponent mod Mp^n, q_(Mp^n)-exponent, rational) triples."""
        size = p**n
        L = M * size
        acc = {}
        for e, j, c in terms:
            e %= L
            i, r = e % size, e // size  # zeta_(Mp^n)^(p^n r) = zeta_M^r
            acc.setdefault((i, j), {})
            acc[(i, j)][r] = acc[(i, j)].get(r, 0) + c
        data = {key: CycNumber.from_group_ring(M, g) for key, g in acc.items()}
        return cls(M, p, n, prec, data)

    @classmethod
    def from_series(cls, x: QExpansion, p: int):
        """A level-M series as a depth-0 tower element."""
        M = x.level
        if M % x.exp_denom:
            x = x.embed(M * x.exp_denom // gcd(M, x.exp_denom))
            M = x.level
        D = x.exp_denom
        data = {(0, n * (M // D)): c for n, c in x.terms.items()}
        return cls(M, p, 0, x.prec, data)

    def _same(self, other):
        if (self.M, self.p, self.n) != (other.M, other.p, other.n):
            raise LevelMismatchError("tower elements live at different levels")

    def __add__(self, other):
        self._same(other)
        data = dict(self.data)
        for key, c in other.data.items():
            data[key] = data[key] + c if key in data else c
        return TowerElement(self.M, self.p, self.n, min(self.prec, other.prec), data)

    def scale(self, c) -> "TowerElement":
        return TowerElement(self.M, self.p, self.n, self.prec, {k: v.scale(c) for k, v in self.data.items()})

    def __eq__(self, other):
        return (
            isinstance(other, TowerElement)
            and (self.M, self.p, self.n, self.prec) == (other.M, other.p, other.n, other.prec)
            and self.data == other.data
        )

    def __repr__(self):
        return f"TowerElement(M={self.M}, p={self.p}, n={self.n}, terms={len(self.data)})"


def trace_RM(x: TowerElement) -> QExpansion:
    """Keep the monomials with i = 0 and p^n | j, relabelled as powers of q_M."""
    size = x.p**x.n
    terms = {j // size: c for (i, j), c in x.data.items() if i == 0 and j % size == 0}
    return QExpansion(x.M, x.M, x.prec, terms)


# -- logarithms --------------------------------------------------------------

class LogElement:
    """uq * log q + tc * t + tail."""

    def __init__(self, uq, tc, tail: TowerElement):
        self.uq = Fraction(uq)
        self.tc = Fraction(tc)
        self.tail = tail

    def trace(self) -> "LogElement":
        """R_M, extended by R_M(u_q) = u_q and R_M(t) = t."""
        base = trace_RM(self.tail)
        return LogElement(self.uq, self.tc, TowerElement.from_series(base, self.tail.p))

    def scale(self, c) -> "LogElement":
        return LogElement(self.uq * c, self.tc * c, self.tail.scale(c))

    def __eq__(self, other):
        return (
            isinstance(other, LogElement)
            and (self.uq, self.tc) == (other.uq, other.tc)
            and self.tail == other.tail
        )

    def __repr__(self):
        return f"LogElement(uq={self.uq}, t={self.tc}, tail={self.tail!r})"


def _log_theta_terms(s_units, a, b, L, units, prec_units):
    """Tail of log theta(q^s, q^(a/L) zeta_L^b) as (root exp, q-exponent, coeff).

    Exponents are in units of q^(1/units); s_units = s * units and the
    x2-exponent is a * (units / L).
    """
    ea = a * (units // L)
    out = []

    def log1m(root, E):
        # log(1 - zeta^root q^E) = -sum zeta^(m root) q^(m E) / m
        m = 1
        while m * E < prec_units:
            out.append((m * root, m * E, Fraction(-1, m)))
            m += 1

    log1m(b, ea)
    k = 1
    while k * s_units - ea < prec_units:
        log1m(b, k * s_units + ea)
        log1m(-b, k * s_units - ea)
        k += 1
    return out


def _log_theta(s, a, b, L, M, p, n, prec):
    if not 0 < a < s * L:
        raise DomainError(
            f"x2-exponent {a}/{L} must lie strictly between 0 and {s}",
            "theta factor with exponent zero has no expanded logarithm",
        )
    units = M * p**n
    tail = TowerElement.from_terms(
        M, p, n, prec, _log_theta_terms(s * units, a, b, L, units, Fraction(prec) * units)
    )
    e = Fraction(a, L)
    # q^(s/12) (x2^(1/2) - x2^(-1/2)) = -q^(s/12) x2^(-1/2) (1 - x2)
    return LogElement(Fraction(s, 12) - e / 2, -Fraction(b, 2 * L), tail)


def log_theta_tower(M, p, n, a, b, prec) -> LogElement:
    """log theta(q, q_(Mp^n)^a zeta_(Mp^n)^b), 0 < a < M p^n."""
    return _log_theta(1, a, b, M * p**n, M, p, n, prec)


def log_theta_base(M, p, n, a, b, prec) -> LogElement:
    """log theta(q^(p^n), q_M^a zeta_M^b) at depth 0."""
    return _log_theta(p**n, a, b, M, M, p, 0, prec)


def rm_logtheta_check(M, n, a, b, prec, p):
    params = {"M": M, "p": p, "n": n, "a": a, "b": b, "prec": str(Fraction(prec))}
    _m_of(M, p)
    if a % p == 0 and b % p == 0:
        raise DomainError(f"(a, b) = ({a}, {b}) lies in pZ^2", "(a, b) not in p Z_p^2")
    lhs = log_theta_tower(M, p, n, a, b, prec).trace()
    rhs = log_theta_base(M, p, n, a, b, prec).scale(Fraction(1, p**n))
    if lhs == rhs:
        return make_report("rm_logtheta", params)
    detail = {
        "uq": [str(lhs.uq), str(rhs.uq)],
        "t": [str(lhs.tc), str(rhs.tc)],
        "lhsTerms": trace_RM(lhs.tail).to_json_obj()["terms"],
        "rhsTerms": trace_RM(rhs.tail).to_json_obj()["terms"],
    }
    return make_report("rm_logtheta", params, detail)


# -- t-adic elements and derivations ----------------------------------------

class TadicElement:
    """sum_(s < T) f_s t^s with level-M coefficient series f_s."""

    def __init__(self, T: int, coeffs):
        coeffs = list(coeffs)[:T]
        if not coeffs:
            raise DomainError("need at least one t-coefficient", "T >= 1")
        ref = coeffs[0]
        coeffs += [QExpansion.zero(ref.level, ref.prec, ref.exp_denom)] * (T - len(coeffs))
        self.T = T
        self.coeffs = coeffs

    @classmethod
    def monomial(cls, T, f: QExpansion, s: int = 0):
        zero = QExpansion.zero(f.level, f.prec, f.exp_denom)
        return cls(T, [f if i == s else zero for i in range(T)])

    def __add__(self, other):
        return TadicElement(min(self.T, other.T), [x + y for x, y in zip(self.coeffs, other.coeffs)])

    def __sub__(self, other):
        return TadicElement(min(self.T, other.T), [x - y for x, y in zip(self.coeffs, other.coeffs)])

    def scale(self, c) -> "TadicElement":
        return TadicElement(self.T, [x.scale(c) for x in self.coeffs])

    def t_degrees(self):
        return [s for s, f in enumerate(self.coeffs) if not f.is_zero()]

    def p_order(self, p):
        return min(f.p_order(p) for f in self.coeffs)

    def __eq__(self, other):
        return isinstance(other, TadicElement) and self.T == other.T and self.coeffs == other.coeffs

    def __repr__(self):
        return "TadicElement(" + ", ".join(f"t^{s}: {f}" for s, f in enumerate(self.coeffs) if not f.is_zero()) + ")"


def derive_d1(x: TadicElement, m: int, p: int) -> TadicElement:
    """d1(q^e t^s) = p^m e q^e t^(s+1); with e = r/M this is (p^m r/M) q_M^r t^(s+1)."""
    pm = p**m
    out = [x.coeffs[0].scale(0)] + [f.q_derivative().scale(pm) for f in x.coeffs[:-1]]
    return TadicElement(x.T, out)


def derive_d2(x: TadicElement, m: int, p: int) -> TadicElement:
    """d2(q^e t^s) = p^m s q^e t^s."""
    pm = p**m
    return TadicElement(x.T, [f.scale(pm * s) for s, f in enumerate(x.coeffs)])


# -- the group P_m -----------------------------------------------------------

def padic_exp(v, p: int, padic_prec: int) -> Fraction:
    """sum v^j/j! truncated once the terms lie in p^padic_prec Z_(p)."""
    v = Fraction(v)
    if v == 0:
        return Fraction(1)
    if v_p(v.numerator, p) - v_p(v.denominator, p) < (2 if p == 2 else 1):
        raise DomainError(f"exp({v}) does not converge {p}-adically", "v in p Z_p (4 Z_2)")
    # v_p(v^j / j!) >= j (w - 1/(p-1)) bounds every omitted term
    slope = Fraction(v_p(v.numerator, p) - v_p(v.denominator, p)) - Fraction(1, p - 1)
    stop = ceil(Fraction(padic_prec) / slope)
    total, term = Fraction(1), Fraction(1)
    for j in range(1, stop):
        term = term * v / j
        total += term
    return total


class PmElement:
    """(1 u; 0 e^v) with u, v in p^m Z_(p)."""

    def __init__(self, u, v, m: int, p: int):
        self.u, self.v = Fraction(u), Fraction(v)
        self.m, self.p = m, p
        for name, x in (("u", self.u), ("v", self.v)):
            if x and (x.denominator % p == 0 or v_p(x.numerator, p) < m):
                raise DomainError(f"{name}={x} is not in p^{m} Z_(p)", "u, v in p^m Z_p")

    def mul(self, other: "PmElement", padic_prec: int) -> "PmElement":
        """(u1, v1)(u2, v2) = (e^v2 u1 + u2, v1 + v2)."""
        ev = padic_exp(other.v, self.p, padic_prec)
        return PmElement(ev * self.u + other.u, self.v + other.v, self.m, self.p)

    def key(self):
        return [str(self.u), str(self.v)]

    def __repr__(self):
        return f"PmElement({self.u}, {self.v})"


def pm_act(g: PmElement, x: TadicElement, padic_prec: int) -> TadicElement:
    """exp((u/p^m) d1) after exp((v/p^m) d2), to t^T and p^padic_prec."""
    T, p = x.T, g.p
    zero = x.coeffs[0].scale(0)
    scaled = [f.scale(padic_exp(g.v * s, p, padic_prec)) for s, f in enumerate(x.coeffs)]
    out = [zero] * T
    # exp(u e t) acting on q^e t^s: add (u e)^j / j! q^e t^(s+j)
    for s, f in enumerate(scaled):
        if f.is_zero():
            continue
        cur = f
        for j in range(T - s):
            out[s + j] = out[s + j] + cur.scale(Fraction(1, factorial(j)))
            cur = cur.q_derivative().scale(g.u)
    return TadicElement(T, out)


def generator_grid(m: int, p: int):
    pm = p**m
    return [PmElement(u, v, m, p) for u, v in ((pm, 0), (-pm, 0), (0, pm), (0, -pm), (pm, pm))]


def _default_samples(M, T, prec):
    xs = []
    for r in (1, 2):
        for c in (CycNumber.one(M), CycNumber.zeta(M, 1)):
            f = QExpansion.monomial(c, Fraction(r, M), M, prec, M)
            xs.append(TadicElement.monomial(T, f, 0))
            xs.append(TadicElement.monomial(T, f, 1))
    return xs


def group_law_check(g1: PmElement, g2: PmElement, M: int, T: int, padic_prec: int, xs=None, prec=2):
    """x * g1 * g2 = x * (g1 g2) on sample monomials, mod (t^T, p^padic_prec)."""
    p = g1.p
    params = {"g1": g1.key(), "g2": g2.key(), "M": M, "p": p, "T": T, "padicPrec": padic_prec}
    g12 = g1.mul(g2, padic_prec + T)
    for n, x in enumerate(xs if xs is not None else _default_samples(M, T, prec)):
        lhs = pm_act(g2, pm_act(g1, x, padic_prec + T), padic_prec + T)
        rhs = pm_act(g12, x, padic_prec + T)
        defect = (lhs - rhs).p_order(p)
        if defect < padic_prec:
            return make_report("group_law", params, {"sample": n, "defectOrder": str(defect)})
    return make_report("group_law", params)


def cocycle_delta1(x: TadicElement, m: int, p: int, padic_prec: int) -> TadicElement:
    """Linear coefficient c_1 of the cocycle u -> x * (u, 0) - x.

    The cocycle is a polynomial in u of degree < T, so c_1 comes out of
    exact interpolation at u = p^m, 2 p^m, ..., T p^m.
    """
    T = x.T
    pm = p**m
    nodes = [pm * (i + 1) for i in range(T)]
    vals = [pm_act(PmElement(u, 0, m, p), x, padic_prec) - x for u in nodes]
    # c(u) = sum_(j >= 1) c_j u^j; Lagrange on c(u)/u gives c_1 = value at 0
    out = None
    for i, ui in enumerate(nodes):
        w = Fraction(1, ui)
        for j, uj in enumerate(nodes):
            if j != i:
                w *= Fraction(-uj, ui - uj)
        term = vals[i].scale(w)
        out = term if out is None else out + term
    return out


# -- delta^(1), res_k and the limit ------------------------------------------

def _check_domain(k, u, M, alpha, beta, p):
    if k < 2:
        raise DomainError("weight must be at least 2", "k >= 2")
    _m_of(M, p)
    if gcd(u, 6 * p) != 1:
        raise DomainError(f"gcd({u}, 6p) != 1", "u must be prime to 6p")
    if alpha % p == 0 and beta % p == 0:
        raise DomainError(f"(alpha, beta) = ({alpha}, {beta}) lies in pZ^2", "(alpha, beta) not in p Z^2")


def e_u1(u, M, p, n, a, b, prec) -> QExpansion:
    """E_(u,1)(q^(p^n), q_M^a zeta_M^b) in the lattice normalization.

    E_1 = -(D2 log theta + e/s) with e = a/M, s = p^n; the twisted term
    moves the point (a/(M p^n), b/M) by <u> on its p-part.
    """
    s = p**n
    at = u_act(u, M * s, a % (M * s), p)
    bt = u_act(u, M, b % M, p)
    one = e1_periodic(s, TorsionIndex(M, a % M, b), prec, lift=a)
    two = e1_periodic(s, TorsionIndex(M, at % M, bt), prec, lift=at)
    return -(one.scale(u * u) - two.scale(u))


def delta1(k, u, M, n, a, b, prec, T, p) -> TadicElement:
    """(a t/M) E_(u,1), concentrated in t-degree 1."""
    _check_domain(k, u, M, a, b, p)
    f = e_u1(u, M, p, n, a, b, prec).scale(Fraction(a, M))
    return TadicElement.monomial(T, f, 1)


def weight_sym(k, a, b, x: TadicElement):
    """(a e1 + b e2)^(k-2) x as a list of slots e1^(k-2-i) e2^i."""
    return [x.scale(comb(k - 2, i) * a ** (k - 2 - i) * b**i) for i in range(k - 1)]


def res_k_extract(slots, k):
    """The t^1 coefficient of the e1^(k-2) slot, with a record of any other mass."""
    if len(slots) != k - 1:
        raise DomainError(f"weight {k} needs {k - 1} slots", "k >= 2")
    head = slots[0]
    off = []
    for i, x in enumerate(slots):
        for s in x.t_degrees():
            if (i, s) != (0, 1):
                off.append([i, s])
    return head.coeffs[1], {"offSlotMass": bool(off), "offSlots": off}


def _lambda_term(k, u, M, p, n, a, beta, prec):
    return e_u1(u, M, p, n, a, beta, prec).scale(a ** (k - 1))


def reciprocity_partial_sum(k, u, M, alpha, beta, n, prec, p, workers=1) -> QExpansion:
    """Lambda_n = sum_(a = alpha (M), 1 <= a <= M p^n) a^(k-1) E_(u,1)."""
    _check_domain(k, u, M, alpha, beta, p)
    start = (alpha - 1) % M + 1
    jobs = [(k, u, M, p, n, a, beta, prec) for a in range(start, M * p**n + 1, M)]
    total = None
    for x in run_ordered(_lambda_term, jobs, workers):
        total = x if total is None else total + x
    return total


def corollary_sum(k, u, M, alpha, beta, n, prec, p):
    """res_k of (1/((k-2)! p^n)) sum over U^(n) of (a e1 + b e2)^(k-2) delta^(1)_(a,b).

    Returns the extracted series and whether any mass sat outside the
    e1^(k-2) t slot.
    """
    _check_domain(k, u, M, alpha, beta, p)
    L = M * p**n
    a0, b0 = (alpha - 1) % M + 1, (beta - 1) % M + 1
    total, off = None, False
    for a in range(a0, L + 1, M):
        for b in range(b0, L + 1, M):
            f, flags = res_k_extract(weight_sym(k, a, b, delta1(k, u, M, n, a, b, prec, 2, p)), k)
            off = off or flags["offSlotMass"]
            total = f if total is None else total + f
    return total.scale(Fraction(1, factorial(k - 2) * p**n)), off


def _defect_order(x: QExpansion, p):
    clear = x.prime_to_p_denominator(p)
    return x.scale(clear).p_order(p), clear


def exp_star_verify(k, u, M, alpha, beta, prec, n_max, t_target, p, workers=1, twisted=True, slack=1):
    """Cauchy table of Lambda_n and the final congruence against M^(k-1) F_u.

    PASS iff s(n) >= n - slack for 1 <= n < n_max and the final defect
    has p-order >= t_target.  twisted=False compares with the untwisted F,
    a probe that must fail.
    """
    _check_domain(k, u, M, alpha, beta, p)
    params = {
        "k": k, "u": u, "M": M, "p": p, "alpha": alpha, "beta": beta,
        "prec": str(Fraction(prec)), "nMax": n_max, "tTarget": t_target,
        "twisted": twisted, "slack": slack,
    }
    lams = [reciprocity_partial_sum(k, u, M, alpha, beta, n, prec, p, workers) for n in range(n_max + 1)]
    idx = TorsionIndex(M, alpha, beta)
    if twisted:
        target = eisenstein_F_u(k, u, idx, prec, p)
    else:
        target = eisenstein_F(k, idx, prec)
    target = target.scale(M ** (k - 1))
    table, first, clear = [], None, 1
    for n in range(1, n_max):
        s, c = _defect_order(lams[n + 1] - lams[n], p)
        clear = clear * c // gcd(clear, c)
        table.append({"n": n, "observedS": str(s)})
        if s < n - slack and first is None:
            first = {"stage": "cauchy", "n": n, "observedS": str(s)}
    final, c = _defect_order(lams[n_max] - target, p)
    clear = clear * c // gcd(clear, c)
    if final < t_target and first is None:
        first = {"stage": "final", "defectOrder": str(final)}
    return make_report(
        "exp_star",
        params,
        first,
        cauchyTable=table,
        finalDefectValuation=str(final),
        clearingConstant=clear,
        **{"pass": first is None},
    )
