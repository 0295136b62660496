"""Exact arithmetic in small number fields and their cyclotomic extensions.

Coefficient fields of Hecke eigenforms (degree <= 4 here) are represented as
Q[t]/(g) with g monic and integral; elements carry Fraction coordinates in the
power basis.  Root-of-unity layers needed for character-twisted Euler factors
live in the group ring K[Z/m], with equality decided after reduction modulo
the m-th cyclotomic polynomial.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache

import mpmath

Q0 = Fraction(0)
Q1 = Fraction(1)


# ---------------------------------------------------------------------------
# dense polynomial helpers over Fraction, ascending coefficient order


def poly_trim(c):
    c = list(c)
    while c and c[-1] == 0:
        c.pop()
    return c


def poly_add(a, b):
    n = max(len(a), len(b))
    out = [Q0] * n
    for i, x in enumerate(a):
        out[i] = out[i] + x
    for i, x in enumerate(b):
        out[i] = out[i] + x
    return poly_trim(out)


def poly_mul(a, b):
    if not a or not b:
        return []
    out = [Q0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                if y:
                    out[i + j] += x * y
    return poly_trim(out)


def poly_divmod(a, b):
    a = list(a)
    b = poly_trim(b)
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    inv_lead = Q1 / Fraction(b[-1])
    q = [Q0] * max(0, len(a) - len(b) + 1)
    while len(poly_trim(a)) >= len(b):
        a = poly_trim(a)
        shift = len(a) - len(b)
        coef = a[-1] * inv_lead
        q[shift] = coef
        for i, y in enumerate(b):
            a[i + shift] -= coef * y
        a[-1] = Q0
    return poly_trim(q), poly_trim(a)


def poly_xgcd(a, b):
    """Extended gcd in Q[x]: returns (g, u, v) with u*a + v*b = g, g monic."""
    r0, r1 = poly_trim(a), poly_trim(b)
    u0, u1 = [Q1], []
    v0, v1 = [], [Q1]
    while r1:
        q, r = poly_divmod(r0, r1)
        r0, r1 = r1, r
        u0, u1 = u1, poly_add(u0, [-c for c in poly_mul(q, u1)])
        v0, v1 = v1, poly_add(v0, [-c for c in poly_mul(q, v1)])
    if not r0:
        return [], u0, v0
    lead = r0[-1]
    inv = Q1 / lead
    return ([c * inv for c in r0], [c * inv for c in u0], [c * inv for c in v0])


@lru_cache(maxsize=None)
def cyclotomic_polynomial(m):
    """Ascending integer coefficients of the m-th cyclotomic polynomial."""
    if m == 1:
        return (-1, 1)
    poly = [Fraction(c) for c in ([-1] + [0] * (m - 1) + [1])]  # x^m - 1
    for d in range(1, m):
        if m % d == 0:
            q, r = poly_divmod(poly, [Fraction(c) for c in cyclotomic_polynomial(d)])
            assert not r
            poly = q
    assert all(c.denominator == 1 for c in poly)
    return tuple(int(c) for c in poly)


# ---------------------------------------------------------------------------
# number fields


class NumberField:
    """Q[t]/(g) for a monic irreducible g with integer coefficients."""

    def __init__(self, poly, name="t"):
        poly = [Fraction(c) for c in poly]
        if not poly or poly[-1] != 1:
            raise ValueError("defining polynomial must be monic")
        if any(c.denominator != 1 for c in poly):
            raise ValueError("defining polynomial must have integer coefficients")
        self.poly = tuple(poly)
        self.degree = len(poly) - 1
        self.name = name
        # t^(degree+i) reduced, for i = 0..degree-2 (covers products of basis monomials)
        red = []
        cur = [-c for c in poly[:-1]]  # t^degree
        red.append(tuple(cur))
        for _ in range(self.degree - 2):
            cur = [Q0] + cur
            if len(cur) > self.degree:
                lead = cur.pop()
                cur = [c + lead * r for c, r in zip(cur, red[0])]
            red.append(tuple(cur))
        self._reduction = red
        self._embeddings = {}

    def __repr__(self):
        if self.degree == 1:
            return "NumberField(Q)"
        return f"NumberField({self.name}, deg={self.degree})"

    def __eq__(self, other):
        return isinstance(other, NumberField) and self.poly == other.poly

    def __hash__(self):
        return hash(self.poly)

    @property
    def is_rational(self):
        return self.degree == 1

    def element(self, coords):
        if isinstance(coords, FieldElement):
            if coords.field is not self and coords.field != self:
                raise ValueError("element of a different field")
            return coords
        if isinstance(coords, (int, Fraction)):
            coords = [coords] + [0] * (self.degree - 1)
        coords = [Fraction(c) for c in coords]
        if len(coords) != self.degree:
            raise ValueError(f"expected {self.degree} coordinates")
        return FieldElement(self, tuple(coords))

    def zero(self):
        return self.element(0)

    def one(self):
        return self.element(1)

    def gen(self):
        if self.degree == 1:
            return self.element(-self.poly[0])
        return self.element([0, 1] + [0] * (self.degree - 2))

    def _reduce(self, coords):
        """Reduce a coordinate list of length <= 2*degree-1 modulo g."""
        d = self.degree
        if len(coords) <= d:
            return tuple(coords) + (Q0,) * (d - len(coords))
        out = list(coords[:d])
        for i, c in enumerate(coords[d:]):
            if c:
                row = self._reduction[i]
                for j in range(d):
                    out[j] += c * row[j]
        return tuple(out)

    def embeddings(self, dps):
        """Complex roots of g at dps digits, ordered by (real, imag)."""
        key = dps
        if key not in self._embeddings:
            with mpmath.workdps(dps + 10):
                roots = mpmath.polyroots(
                    [mpmath.mpf(int(c)) for c in reversed(self.poly)],
                    maxsteps=200, extraprec=60,
                )
                roots = sorted(roots, key=lambda z: (mpmath.re(z), mpmath.im(z)))
                self._embeddings[key] = [mpmath.mpc(z) for z in roots]
        return self._embeddings[key]

    def automorphism_image_of_gen(self):
        """Image of t under the nontrivial automorphism (quadratic fields only)."""
        if self.degree != 2:
            raise ValueError("automorphism available only for quadratic fields")
        # roots of t^2 + a1 t + a0 sum to -a1
        return self.element([-self.poly[1], -1])

    def apply_automorphism(self, elem):
        if self.degree == 1:
            return elem
        sigma_t = self.automorphism_image_of_gen()
        out = self.zero()
        power = self.one()
        for c in elem.co:
            out = out + power * c
            power = power * sigma_t
        return out


class FieldElement:
    __slots__ = ("field", "co")

    def __init__(self, field, co):
        self.field = field
        self.co = co

    def __repr__(self):
        name = self.field.name
        parts = []
        for i, c in enumerate(self.co):
            if c == 0:
                continue
            if i == 0:
                parts.append(str(c))
            elif i == 1:
                parts.append(f"{c}*{name}")
            else:
                parts.append(f"{c}*{name}^{i}")
        return " + ".join(parts) if parts else "0"

    def _coerce(self, other):
        if isinstance(other, FieldElement):
            return other
        if isinstance(other, (int, Fraction)):
            return self.field.element(other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return FieldElement(self.field, tuple(a + b for a, b in zip(self.co, other.co)))

    __radd__ = __add__

    def __neg__(self):
        return FieldElement(self.field, tuple(-a for a in self.co))

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return FieldElement(self.field, tuple(a - b for a, b in zip(self.co, other.co)))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return FieldElement(self.field, tuple(a * other for a in self.co))
        if not isinstance(other, FieldElement):
            return NotImplemented
        a, b = self.co, other.co
        n = len(a)
        if n == 1:
            return FieldElement(self.field, (a[0] * b[0],))
        prod = [Q0] * (2 * n - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    if y:
                        prod[i + j] += x * y
        return FieldElement(self.field, self.field._reduce(prod))

    __rmul__ = __mul__

    def __pow__(self, e):
        if e < 0:
            return self.inverse() ** (-e)
        result = self.field.one()
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def inverse(self):
        g, u, _ = poly_xgcd(list(self.co), list(self.field.poly))
        if len(g) != 1:
            raise ZeroDivisionError("element is not invertible")
        inv = [c / g[0] for c in u]
        return FieldElement(self.field, self.field._reduce(inv))

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self * other.inverse()

    def __eq__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self.co == other.co

    def __hash__(self):
        return hash((self.field.poly, self.co))

    def is_zero(self):
        return all(c == 0 for c in self.co)

    def is_rational(self):
        return all(c == 0 for c in self.co[1:])

    def as_fraction(self):
        if not self.is_rational():
            raise ValueError("element is not rational")
        return self.co[0]

    def embed(self, dps, index=0):
        """Numeric value under the index-th complex embedding."""
        with mpmath.workdps(dps):
            if self.field.degree == 1:
                c = self.co[0]
                return mpmath.mpf(c.numerator) / c.denominator
            t = self.field.embeddings(dps)[index]
            acc = mpmath.mpc(0)
            for c in reversed(self.co):
                acc = acc * t + mpmath.mpf(c.numerator) / c.denominator
            return acc

    def conjugate_element(self):
        return self.field.apply_automorphism(self)


QQ = NumberField([0, 1], name="q")  # the rationals as a degree-1 field


# ---------------------------------------------------------------------------
# group-ring layer for exact root-of-unity coefficients


class CycloElement:
    """Element of K[Z/m]: exact sums of K-multiples of m-th roots of unity.

    Multiplication is cyclic convolution (exponent arithmetic mod m), which
    keeps arithmetic denominator-free; equality reduces the difference modulo
    the m-th cyclotomic polynomial.
    """

    __slots__ = ("field", "m", "co")

    def __init__(self, field, m, co):
        self.field = field
        self.m = m
        self.co = co  # tuple of FieldElement, length m

    @classmethod
    def from_field(cls, field, m, elem):
        co = [field.zero()] * m
        co[0] = field.element(elem)
        return cls(field, m, tuple(co))

    @classmethod
    def root_of_unity(cls, field, m, exponent, scale=1):
        co = [field.zero()] * m
        co[exponent % m] = field.element(scale)
        return cls(field, m, tuple(co))

    def _check(self, other):
        if self.m != other.m or self.field != other.field:
            raise ValueError("mixed group-ring arithmetic")

    def __add__(self, other):
        if isinstance(other, (int, Fraction, FieldElement)):
            other = CycloElement.from_field(self.field, self.m, other)
        self._check(other)
        return CycloElement(self.field, self.m,
                            tuple(a + b for a, b in zip(self.co, other.co)))

    __radd__ = __add__

    def __neg__(self):
        return CycloElement(self.field, self.m, tuple(-a for a in self.co))

    def __sub__(self, other):
        if isinstance(other, (int, Fraction, FieldElement)):
            other = CycloElement.from_field(self.field, self.m, other)
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, FieldElement)):
            return CycloElement(self.field, self.m, tuple(a * other for a in self.co))
        self._check(other)
        m = self.m
        out = [self.field.zero()] * m
        for i, x in enumerate(self.co):
            if x.is_zero():
                continue
            for j, y in enumerate(other.co):
                if not y.is_zero():
                    k = i + j
                    if k >= m:
                        k -= m
                    out[k] = out[k] + x * y
        return CycloElement(self.field, self.m, tuple(out))

    __rmul__ = __mul__

    def reduced(self):
        """Coordinates modulo the m-th cyclotomic polynomial (length phi(m))."""
        phi = cyclotomic_polynomial(self.m)
        deg = len(phi) - 1
        out = list(self.co)
        for i in range(self.m - 1, deg - 1, -1):
            c = out[i]
            if not c.is_zero():
                out[i] = self.field.zero()
                for j in range(deg):
                    out[i - deg + j] = out[i - deg + j] - c * phi[j]
        return tuple(out[:deg])

    def __eq__(self, other):
        if isinstance(other, (int, Fraction, FieldElement)):
            other = CycloElement.from_field(self.field, self.m, other)
        if self.m != other.m:
            return NotImplemented
        diff = self - other
        return all(c.is_zero() for c in diff.reduced())

    def __hash__(self):
        return hash((self.m, self.reduced()))

    def is_zero(self):
        return all(c.is_zero() for c in self.reduced())

    def embed(self, dps, index=0):
        with mpmath.workdps(dps):
            zeta = mpmath.expjpi(mpmath.mpf(2) / self.m)
            acc = mpmath.mpc(0)
            for e in range(self.m - 1, -1, -1):
                acc = acc * zeta + self.co[e].embed(dps, index)
            return acc

    def __repr__(self):
        parts = [f"({c})*z^{e}" for e, c in enumerate(self.co) if not c.is_zero()]
        return " + ".join(parts) if parts else "0"
