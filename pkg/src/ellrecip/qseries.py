"""Truncated Puiseux series in q with cyclotomic coefficients.

A series stores exponents on the lattice (1/D)Z as integer keys n meaning
q^(n/D).  Terms with exponent >= prec are dropped, and every ring
operation tracks precision pessimistically.
"""
from __future__ import annotations

import cmath
import json
from fractions import Fraction
from math import ceil, gcd

from .cyclotomic import CycNumber
from .errors import DomainError, LevelMismatchError

__all__ = [
    "QExpansion",
    "series_add",
    "series_mul",
    "series_invert",
    "formal_log1m",
    "substitute_power",
    "twist_T",
    "is_KM_integral",
]


def _lcm(a, b):
    return a * b // gcd(a, b)


class QExpansion:
    __slots__ = ("exp_denom", "level", "prec", "terms")

    def __init__(self, exp_denom: int, level: int, prec, terms=None):
        if exp_denom < 1:
            raise DomainError("exponent denominator must be positive")
        self.exp_denom = exp_denom
        self.level = level
        self.prec = Fraction(prec)
        bound = self.prec * exp_denom
        clean = {}
        for n, c in (terms or {}).items():
            if n < bound and not c.is_zero():
                if c.level != level:
                    raise LevelMismatchError(
                        f"coefficient level {c.level} != series level {level}",
                        "coefficients must share the series level",
                    )
                clean[n] = c
        self.terms = clean

    # -- constructors -------------------------------------------------
    @classmethod
    def zero(cls, level, prec, exp_denom=1):
        return cls(exp_denom, level, prec)

    @classmethod
    def constant(cls, c, level, prec, exp_denom=1):
        if not isinstance(c, CycNumber):
            c = CycNumber.rational(level, c)
        return cls(exp_denom, level, prec, {0: c})

    @classmethod
    def monomial(cls, c, e, level, prec, exp_denom=None):
        """c * q^e."""
        e = Fraction(e)
        if exp_denom is None:
            exp_denom = e.denominator
        if (e * exp_denom).denominator != 1:
            raise DomainError(f"exponent {e} not on the 1/{exp_denom} lattice")
        if not isinstance(c, CycNumber):
            c = CycNumber.rational(level, c)
        return cls(exp_denom, level, prec, {int(e * exp_denom): c})

    # -- inspection ---------------------------------------------------
    def exponents(self):
        return sorted(Fraction(n, self.exp_denom) for n in self.terms)

    def coeff(self, e) -> CycNumber:
        e = Fraction(e)
        n = e * self.exp_denom
        if n.denominator != 1:
            return CycNumber.zero(self.level)
        if e >= self.prec:
            raise DomainError(f"coefficient of q^{e} is beyond precision {self.prec}")
        return self.terms.get(int(n), CycNumber.zero(self.level))

    def items(self):
        """(exponent, coefficient) pairs in increasing exponent order."""
        D = self.exp_denom
        return [(Fraction(n, D), self.terms[n]) for n in sorted(self.terms)]

    def ord(self) -> Fraction:
        if not self.terms:
            return self.prec
        return Fraction(min(self.terms), self.exp_denom)

    def is_zero(self) -> bool:
        return not self.terms

    def __repr__(self):
        return f"QExpansion({self}, O(q^{self.prec}))"

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for e, c in self.items():
            cs = str(c)
            if e == 0:
                parts.append(cs)
                continue
            mono = "q" if e == 1 else f"q^({e})"
            if cs == "1":
                parts.append(mono)
            elif cs == "-1":
                parts.append("-" + mono)
            elif c.is_rational():
                parts.append(f"{cs}*{mono}")
            else:
                parts.append(f"({cs})*{mono}")
        return " + ".join(parts).replace("+ -", "- ")

    # -- lattice and level changes ----------------------------------------
    def with_exp_denom(self, D: int) -> "QExpansion":
        if D % self.exp_denom:
            raise DomainError(f"cannot refine 1/{self.exp_denom} lattice to 1/{D}")
        if D == self.exp_denom:
            return self
        f = D // self.exp_denom
        return QExpansion(D, self.level, self.prec, {n * f: c for n, c in self.terms.items()})

    def compact(self) -> "QExpansion":
        """Smallest exponent lattice carrying all terms."""
        g = self.exp_denom
        for n in self.terms:
            g = gcd(g, n)
            if g == 1:
                return self
        return QExpansion(
            self.exp_denom // g, self.level, self.prec, {n // g: c for n, c in self.terms.items()}
        )

    def embed(self, level: int) -> "QExpansion":
        if level == self.level:
            return self
        return QExpansion(
            self.exp_denom, level, self.prec, {n: c.embed(level) for n, c in self.terms.items()}
        )

    def galois(self, d: int) -> "QExpansion":
        return QExpansion(
            self.exp_denom, self.level, self.prec, {n: c.galois(d) for n, c in self.terms.items()}
        )

    def truncate(self, prec) -> "QExpansion":
        prec = Fraction(prec)
        if prec > self.prec:
            raise DomainError(f"cannot raise precision {self.prec} to {prec}")
        return QExpansion(self.exp_denom, self.level, prec, self.terms)

    def _align(self, other):
        if other.level != self.level:
            raise LevelMismatchError(
                f"series level mismatch {self.level} != {other.level}",
                "series must share a coefficient level",
            )
        D = _lcm(self.exp_denom, other.exp_denom)
        return self.with_exp_denom(D), other.with_exp_denom(D)

    def _lift(self, other):
        if isinstance(other, QExpansion):
            return other
        if isinstance(other, (int, Fraction, CycNumber)):
            return QExpansion.constant(other, self.level, self.prec, self.exp_denom)
        return None

    # -- ring operations ------------------------------------------------
    def __add__(self, other):
        other = self._lift(other)
        if other is None:
            return NotImplemented
        x, y = self._align(other)
        terms = dict(x.terms)
        for n, c in y.terms.items():
            terms[n] = terms[n] + c if n in terms else c
        return QExpansion(x.exp_denom, x.level, min(x.prec, y.prec), terms)

    __radd__ = __add__

    def __neg__(self):
        return QExpansion(self.exp_denom, self.level, self.prec, {n: -c for n, c in self.terms.items()})

    def __sub__(self, other):
        other = self._lift(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c) -> "QExpansion":
        if isinstance(c, CycNumber) and c.level != self.level:
            raise LevelMismatchError("scalar level mismatch", "scalar must share the series level")
        return QExpansion(self.exp_denom, self.level, self.prec, {n: v * c for n, v in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, CycNumber)):
            return self.scale(other)
        if not isinstance(other, QExpansion):
            return NotImplemented
        x, y = self._align(other)
        prec = min(x.prec + y.ord(), y.prec + x.ord())
        bound = prec * x.exp_denom
        terms = {}
        ys = sorted(y.terms.items())
        for n1, c1 in sorted(x.terms.items()):
            for n2, c2 in ys:
                n = n1 + n2
                if n >= bound:
                    break
                p = c1 * c2
                terms[n] = terms[n] + p if n in terms else p
        return QExpansion(x.exp_denom, x.level, prec, terms)

    def __rmul__(self, other):
        return self * other

    def shift(self, e) -> "QExpansion":
        """Multiply by q^e exactly (precision shifts too)."""
        e = Fraction(e)
        D = _lcm(self.exp_denom, e.denominator)
        x = self.with_exp_denom(D)
        s = int(e * D)
        return QExpansion(D, self.level, self.prec + e, {n + s: c for n, c in x.terms.items()})

    def invert(self) -> "QExpansion":
        if not self.terms:
            raise ZeroDivisionError("series has no invertible leading term")
        D = self.exp_denom
        n0 = min(self.terms)
        e0 = Fraction(n0, D)
        lead_inv = self.terms[n0].inv()
        prec = self.prec - 2 * e0
        count = ceil((self.prec - e0) * D)
        rel = [self.terms.get(n0 + j) for j in range(count)]
        out = [lead_inv]
        for m in range(1, count):
            acc = None
            for j in range(1, m + 1):
                a = rel[j]
                if a is not None and out[m - j] is not None:
                    t = a * out[m - j]
                    acc = t if acc is None else acc + t
            out.append(None if acc is None or acc.is_zero() else -(acc * lead_inv))
        terms = {m - n0: c for m, c in enumerate(out) if c is not None}
        return QExpansion(D, self.level, prec, terms)

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction, CycNumber)):
            if isinstance(other, CycNumber):
                return self.scale(other.inv())
            return self.scale(Fraction(1) / Fraction(other))
        if not isinstance(other, QExpansion):
            return NotImplemented
        return self * other.invert()

    def __pow__(self, n: int):
        if n < 0:
            return self.invert() ** (-n)
        if n == 0:
            return QExpansion.constant(1, self.level, _BIG, self.exp_denom)
        result = None
        base = self
        while n:
            if n & 1:
                result = base if result is None else result * base
            n >>= 1
            if n:
                base = base * base
        return result

    # -- analytic-free operators -------------------------------------------
    def substitute_power(self, s: int) -> "QExpansion":
        if s < 1:
            raise DomainError("substitution power must be positive")
        return QExpansion(self.exp_denom, self.level, self.prec * s, {n * s: c for n, c in self.terms.items()})

    def twist_T(self) -> "QExpansion":
        """tau -> tau + 1: multiply the q^(n/D) coefficient by zeta_D^n."""
        D = self.exp_denom
        if self.level % D:
            raise LevelMismatchError(
                f"exponent denominator {D} does not divide level {self.level}",
                "embed coefficients to a level divisible by the exponent denominator",
            )
        f = self.level // D
        return QExpansion(
            D, self.level, self.prec,
            {n: c * CycNumber.zeta(self.level, (n * f) % self.level) for n, c in self.terms.items()},
        )

    def q_derivative(self) -> "QExpansion":
        """q d/dq, termwise multiplication by the exponent."""
        D = self.exp_denom
        return QExpansion(D, self.level, self.prec, {n: c * Fraction(n, D) for n, c in self.terms.items()})

    def p_order(self, p: int):
        """Least coefficient p-order (+inf for the zero series)."""
        return min((c.p_order(p) for c in self.terms.values()), default=float("inf"))

    def prime_to_p_denominator(self, p: int) -> int:
        d = 1
        for c in self.terms.values():
            d = _lcm(d, c.prime_to_p_denominator(p))
        return d

    def is_KM_integral(self, M: int, p: int, t: int = 0) -> bool:
        """Sufficient power-basis test for membership in p^t times the ring
        of series sum a_n q_M^n with v_p(a_n) + n/M >= 0."""
        for e, c in self.items():
            need = ceil(Fraction(t) - e)
            if c.p_order(p) < need:
                return False
        return True

    def evaluate(self, tau: complex) -> complex:
        q = 2j * cmath.pi * tau / self.exp_denom
        return sum(c.to_complex() * cmath.exp(q * n) for n, c in self.terms.items())

    # -- comparison and serialization --------------------------------------
    def agrees(self, other: "QExpansion", prec=None) -> bool:
        """Equality of all terms below prec (default: the joint precision)."""
        p = min(self.prec, other.prec) if prec is None else Fraction(prec)
        if p > min(self.prec, other.prec):
            return False
        d = self - other
        return all(e >= p for e, _ in d.items())

    def __eq__(self, other):
        if not isinstance(other, QExpansion):
            return NotImplemented
        a, b = self.compact(), other.compact()
        return (
            a.exp_denom == b.exp_denom and a.level == b.level
            and a.prec == b.prec and a.terms == b.terms
        )

    def __hash__(self):
        a = self.compact()
        return hash((a.exp_denom, a.level, a.prec, tuple(sorted(a.terms.items()))))

    def to_json_obj(self) -> dict:
        D = self.exp_denom
        rows = []
        for n in sorted(self.terms):
            e = Fraction(n, D)
            rows.append([e.numerator, e.denominator] + self.terms[n].to_json())
        return {"expDenom": D, "coeffLevel": self.level, "prec": str(self.prec), "terms": rows}

    def to_json(self) -> str:
        return json.dumps(self.to_json_obj(), sort_keys=True, separators=(",", ":"))

    @classmethod
    def from_json_obj(cls, obj) -> "QExpansion":
        D, level = obj["expDenom"], obj["coeffLevel"]
        terms = {}
        for row in obj["terms"]:
            e = Fraction(row[0], row[1])
            n = e * D
            if n.denominator != 1:
                raise DomainError(f"exponent {e} not on the 1/{D} lattice")
            terms[int(n)] = CycNumber.from_json(level, row[2:])
        return cls(D, level, Fraction(obj["prec"]), terms)

    @classmethod
    def from_json(cls, text: str) -> "QExpansion":
        return cls.from_json_obj(json.loads(text))


# precision assigned to exact constants such as x**0
_BIG = Fraction(10**9)


def series_add(x, y):
    return x + y


def series_mul(x, y):
    return x * y


def series_invert(x):
    return x.invert()


def formal_log1m(c: CycNumber, e, prec, exp_denom=None) -> QExpansion:
    """log(1 - c q^e) = -sum_{j>=1} c^j/j q^(je), truncated below prec."""
    e = Fraction(e)
    if e <= 0:
        raise DomainError("formal_log1m needs a positive exponent", "exponent e > 0")
    prec = Fraction(prec)
    D = e.denominator if exp_denom is None else exp_denom
    if (e * D).denominator != 1:
        raise DomainError(f"exponent {e} not on the 1/{D} lattice")
    step = int(e * D)
    terms = {}
    cj = c
    j = 1
    while j * e < prec:
        terms[j * step] = cj * Fraction(-1, j)
        cj = cj * c
        j += 1
    return QExpansion(D, c.level, prec, terms)


def substitute_power(x: QExpansion, s: int) -> QExpansion:
    return x.substitute_power(s)


def twist_T(x: QExpansion) -> QExpansion:
    return x.twist_T()


def is_KM_integral(x: QExpansion, M: int, p: int, t: int = 0) -> bool:
    return x.is_KM_integral(M, p, t)
