"""Exact arithmetic in cyclotomic fields Q(zeta_D).

Elements are stored in the power basis 1, z, ..., z^(phi(D)-1) of
Q(zeta_D), reduced modulo the D-th cyclotomic polynomial, as a tuple of
integer numerators over one positive common denominator.  This gives a
unique normal form, so equality and hashing are coordinate comparisons.
"""
from __future__ import annotations

import cmath
from fractions import Fraction
from functools import lru_cache
from math import gcd

from .errors import DomainError, LevelMismatchError

__all__ = [
    "CycNumber",
    "cyclotomic_poly",
    "euler_phi",
    "cyc_add",
    "cyc_mul",
    "cyc_inv",
    "embed",
    "galois_sigma",
    "is_p_integral",
    "p_order",
    "v_p",
]


def v_p(n: int, p: int) -> int:
    """p-adic valuation of a nonzero integer."""
    if n == 0:
        raise ValueError("v_p(0) is infinite")
    n = abs(n)
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


@lru_cache(maxsize=None)
def euler_phi(n: int) -> int:
    result, m, q = n, n, 2
    while q * q <= m:
        if m % q == 0:
            while m % q == 0:
                m //= q
            result -= result // q
        q += 1
    if m > 1:
        result -= result // m
    return result


def _poly_divexact(num, den):
    # integer polynomials, lowest degree first; den is monic
    num = list(num)
    out = [0] * (len(num) - len(den) + 1)
    for i in range(len(out) - 1, -1, -1):
        c = num[i + len(den) - 1]
        out[i] = c
        if c:
            for j, d in enumerate(den):
                num[i + j] -= c * d
    assert not any(num[: len(den) - 1])
    return out


@lru_cache(maxsize=None)
def cyclotomic_poly(D: int) -> tuple[int, ...]:
    """Coefficients of Phi_D, lowest degree first."""
    if D < 1:
        raise ValueError("level must be positive")
    poly = [-1] + [0] * (D - 1) + [1]
    for d in range(1, D):
        if D % d == 0:
            poly = _poly_divexact(poly, cyclotomic_poly(d))
    return tuple(poly)


@lru_cache(maxsize=None)
def _power_rows(D: int) -> tuple[tuple[int, ...], ...]:
    """Row i holds the power-basis coordinates of zeta_D^i, 0 <= i < D."""
    phi = euler_phi(D)
    cp = cyclotomic_poly(D)
    rows = []
    cur = [1] + [0] * (phi - 1)
    for _ in range(D):
        rows.append(tuple(cur))
        top = cur[-1]
        cur = [0] + cur[:-1]
        if top:
            for j in range(phi):
                cur[j] -= top * cp[j]
    return tuple(rows)


def _normalize(nums, den):
    if den == 0:
        raise ZeroDivisionError("zero denominator")
    if den < 0:
        nums = [-x for x in nums]
        den = -den
    g = den
    for x in nums:
        if x:
            g = gcd(g, x)
            if g == 1:
                break
    if not any(nums):
        return tuple(0 for _ in nums), 1
    if g != 1:
        nums = [x // g for x in nums]
        den //= g
    return tuple(nums), den


class CycNumber:
    """An element of Q(zeta_D) in canonical reduced power-basis form."""

    __slots__ = ("level", "num", "den", "_hash")

    def __init__(self, level: int, coords=None, *, _raw=None):
        if level < 1:
            raise DomainError("cyclotomic level must be positive")
        self.level = level
        self._hash = None
        if _raw is not None:
            self.num, self.den = _raw
            return
        phi = euler_phi(level)
        coords = [Fraction(c) for c in (coords or ())]
        if len(coords) > phi:
            # treat as an unreduced polynomial in zeta
            self.num, self.den = CycNumber.from_group_ring(
                level, dict(enumerate(coords))
            )._pair()
            return
        coords += [Fraction(0)] * (phi - len(coords))
        den = 1
        for c in coords:
            den = den * c.denominator // gcd(den, c.denominator)
        self.num, self.den = _normalize([int(c * den) for c in coords], den)

    def _pair(self):
        return self.num, self.den

    # -- constructors -------------------------------------------------
    @classmethod
    def _make(cls, level, nums, den):
        return cls(level, _raw=_normalize(nums, den))

    @classmethod
    def zero(cls, level: int) -> "CycNumber":
        return cls(level, _raw=((0,) * euler_phi(level), 1))

    @classmethod
    def rational(cls, level: int, r) -> "CycNumber":
        r = Fraction(r)
        nums = [0] * euler_phi(level)
        nums[0] = r.numerator
        return cls(level, _raw=_normalize(nums, r.denominator))

    @classmethod
    def one(cls, level: int) -> "CycNumber":
        return cls.rational(level, 1)

    @classmethod
    def zeta(cls, level: int, e: int = 1) -> "CycNumber":
        """zeta_level ** e."""
        return cls(level, _raw=(_power_rows(level)[e % level], 1))

    @classmethod
    def from_group_ring(cls, level: int, coeffs) -> "CycNumber":
        """Sum of coeffs[e] * zeta^e over a mapping exponent -> rational."""
        rows = _power_rows(level)
        phi = euler_phi(level)
        items = [(e % level, Fraction(c)) for e, c in coeffs.items() if c]
        den = 1
        for _, c in items:
            den = den * c.denominator // gcd(den, c.denominator)
        acc = [0] * phi
        for e, c in items:
            m = c.numerator * (den // c.denominator)
            row = rows[e]
            for j in range(phi):
                if row[j]:
                    acc[j] += m * row[j]
        return cls(level, _raw=_normalize(acc, den))

    # -- inspection ---------------------------------------------------
    @property
    def coords(self) -> tuple[Fraction, ...]:
        return tuple(Fraction(x, self.den) for x in self.num)

    def is_zero(self) -> bool:
        return not any(self.num)

    def __bool__(self):
        return not self.is_zero()

    def is_rational(self) -> bool:
        return not any(self.num[1:])

    def to_fraction(self) -> Fraction:
        if not self.is_rational():
            raise ValueError("not a rational number")
        return Fraction(self.num[0], self.den)

    def __eq__(self, other):
        if isinstance(other, CycNumber):
            return self.level == other.level and self.num == other.num and self.den == other.den
        if isinstance(other, (int, Fraction)):
            return self.is_rational() and Fraction(self.num[0], self.den) == other
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.level, self.num, self.den))
        return self._hash

    def __repr__(self):
        return f"CycNumber({self.level}, {self})"

    def __str__(self):
        parts = []
        for i, c in enumerate(self.coords):
            if not c:
                continue
            mono = "" if i == 0 else (f"z{self.level}" if i == 1 else f"z{self.level}^{i}")
            if not mono:
                parts.append(str(c))
            elif c == 1:
                parts.append(mono)
            elif c == -1:
                parts.append("-" + mono)
            else:
                parts.append(f"{c}*{mono}")
        return " + ".join(parts).replace("+ -", "- ") if parts else "0"

    # -- arithmetic -----------------------------------------------------
    def _coerce(self, other):
        if isinstance(other, CycNumber):
            if other.level != self.level:
                raise LevelMismatchError(
                    f"level mismatch {self.level} != {other.level}; embed first",
                    "operands must share a cyclotomic level",
                )
            return other
        if isinstance(other, (int, Fraction)):
            return CycNumber.rational(self.level, other)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        d1, d2 = self.den, o.den
        if d1 == d2:
            return CycNumber._make(self.level, [x + y for x, y in zip(self.num, o.num)], d1)
        return CycNumber._make(
            self.level, [x * d2 + y * d1 for x, y in zip(self.num, o.num)], d1 * d2
        )

    __radd__ = __add__

    def __neg__(self):
        return CycNumber(self.level, _raw=(tuple(-x for x in self.num), self.den))

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, r) -> "CycNumber":
        r = Fraction(r)
        return CycNumber._make(
            self.level, [x * r.numerator for x in self.num], self.den * r.denominator
        )

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        a, b = self.num, o.num
        phi = len(a)
        if phi == 1:
            return CycNumber._make(self.level, [a[0] * b[0]], self.den * o.den)
        conv = [0] * (2 * phi - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    if y:
                        conv[i + j] += x * y
        acc = list(conv[:phi])
        rows = _power_rows(self.level)
        for i in range(phi, 2 * phi - 1):
            c = conv[i]
            if c:
                row = rows[i % self.level]
                for j in range(phi):
                    if row[j]:
                        acc[j] += c * row[j]
        return CycNumber._make(self.level, acc, self.den * o.den)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            return self.inv() ** (-n)
        result = CycNumber.one(self.level)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def inv(self) -> "CycNumber":
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero in Q(zeta_D)")
        if self.is_rational():
            return CycNumber.rational(self.level, 1 / self.to_fraction())
        # extended Euclid in Q[X] against Phi_D
        a = _trim([Fraction(x, self.den) for x in self.num])
        m = _trim([Fraction(c) for c in cyclotomic_poly(self.level)])
        s0, s1 = [Fraction(1)], [Fraction(0)]
        r0, r1 = a, m
        while len(r1) > 1 or r1[0] != 0:
            q, r = _pdivmod(r0, r1)
            r0, r1 = r1, r
            s0, s1 = s1, _trim(_psub(s0, _pmul(q, s1)))
        # r0 is a nonzero constant
        c = r0[0]
        return CycNumber(self.level, [x / c for x in s0])

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            if other == 0:
                raise ZeroDivisionError("division by zero")
            return self.scale(Fraction(1) / Fraction(other))
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self * o.inv()

    def __rtruediv__(self, other):
        return self.inv() * other

    # -- level change, Galois action, integrality -------------------------
    def embed(self, new_level: int) -> "CycNumber":
        if new_level % self.level:
            raise LevelMismatchError(
                f"cannot embed level {self.level} into {new_level}",
                "target level must be a multiple of the source level",
            )
        if new_level == self.level:
            return self
        f = new_level // self.level
        return CycNumber.from_group_ring(
            new_level, {i * f: Fraction(x, self.den) for i, x in enumerate(self.num) if x}
        )

    def galois(self, d: int) -> "CycNumber":
        if gcd(d, self.level) != 1:
            raise DomainError(
                f"gcd({d}, {self.level}) != 1", "sigma_d needs d prime to the level"
            )
        return CycNumber.from_group_ring(
            self.level, {i * d: Fraction(x, self.den) for i, x in enumerate(self.num) if x}
        )

    def p_order(self, p: int):
        """min over power-basis coordinates of v_p; +inf for zero.

        x lies in p^t * Z_(p)[zeta_D] exactly when p_order(x) >= t.
        """
        if self.is_zero():
            return float("inf")
        return min(v_p(x, p) for x in self.num if x) - v_p(self.den, p)

    def prime_to_p_denominator(self, p: int) -> int:
        d = self.den
        while d % p == 0:
            d //= p
        return d

    def is_p_integral(self, p: int, t: int = 0) -> bool:
        """True iff self lies in p^t * Z[zeta_D]."""
        if self.is_zero():
            return True
        if self.prime_to_p_denominator(p) != 1:
            return False
        return self.p_order(p) >= t

    def to_complex(self) -> complex:
        z = cmath.exp(2j * cmath.pi / self.level)
        total = 0j
        for x in reversed(self.num):
            total = total * z + x
        return total / self.den

    def to_json(self) -> list[str]:
        return [str(c) for c in self.coords]

    @classmethod
    def from_json(cls, level: int, coords) -> "CycNumber":
        return cls(level, [Fraction(c) for c in coords])


def _trim(p):
    p = list(p)
    while len(p) > 1 and p[-1] == 0:
        p.pop()
    return p or [Fraction(0)]


def _psub(a, b):
    n = max(len(a), len(b))
    return [(a[i] if i < len(a) else 0) - (b[i] if i < len(b) else 0) for i in range(n)]


def _pmul(a, b):
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return out


def _pdivmod(a, b):
    a = list(a)
    db = len(b) - 1
    if len(a) - 1 < db:
        return [Fraction(0)], _trim(a)
    q = [Fraction(0)] * (len(a) - db)
    lead = b[-1]
    for i in range(len(q) - 1, -1, -1):
        c = a[i + db] / lead
        q[i] = c
        if c:
            for j, y in enumerate(b):
                a[i + j] -= c * y
    return _trim(q), _trim(a[:db] if db else [Fraction(0)])


# Functional aliases mirroring the operation names used in reports and docs.
def cyc_add(x: CycNumber, y: CycNumber) -> CycNumber:
    return x + y


def cyc_mul(x: CycNumber, y: CycNumber) -> CycNumber:
    return x * y


def cyc_inv(x: CycNumber) -> CycNumber:
    return x.inv()


def embed(x: CycNumber, level: int) -> CycNumber:
    return x.embed(level)


def galois_sigma(d: int, x: CycNumber) -> CycNumber:
    return x.galois(d)


def is_p_integral(x: CycNumber, p: int, t: int = 0) -> bool:
    return x.is_p_integral(p, t)


def p_order(x: CycNumber, p: int):
    return x.p_order(p)
