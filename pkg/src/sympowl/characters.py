"""Exact Dirichlet characters: conductors, parity, Gauss sums.

Character values are stored as exponents of a fixed primitive root of unity,
so multiplicativity and conductor computations are exact; numeric values are
produced on demand at any requested precision.  Gauss sums follow the
classical unnormalized convention: the sum is taken over the associated
primitive character and is not divided by sqrt(conductor).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from math import gcd, lcm

import mpmath


class NonCoprimeConductorError(ValueError):
    """Gauss-sum multiplicativity requires coprime conductors."""


def factorize(n):
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            e = 0
            while n % d == 0:
                n //= d
                e += 1
            out.append((d, e))
        d += 1 if d == 2 else 2
    if n > 1:
        out.append((n, 1))
    return out


def _euler_phi(n):
    result = n
    for p, _ in factorize(n):
        result = result // p * (p - 1)
    return result


def _primitive_root_mod_prime_power(p, e):
    """A generator of (Z/p^e)^* for odd p."""
    pe = p ** e
    phi_p = p - 1
    prime_divs = [q for q, _ in factorize(phi_p)]
    g = None
    for cand in range(2, p):
        if all(pow(cand, phi_p // q, p) != 1 for q in prime_divs):
            g = cand
            break
    assert g is not None
    if e == 1:
        return g
    # lift: g stays primitive mod p^e unless g^(p-1) = 1 mod p^2
    if pow(g, p - 1, p * p) == 1:
        g += p
    return g % pe


@lru_cache(maxsize=None)
def unit_group_generators(q):
    """Generators (g_i, s_i) with (Z/q)^* the direct product of <g_i>, ord g_i = s_i."""
    if q == 1:
        return ()
    locals_ = []
    for p, e in factorize(q):
        pe = p ** e
        if p == 2:
            if e == 1:
                continue
            if e == 2:
                locals_.append((pe, [(3, 2)]))
            else:
                locals_.append((pe, [(pe - 1, 2), (5, 1 << (e - 2))]))
        else:
            locals_.append((pe, [(_primitive_root_mod_prime_power(p, e), _euler_phi(pe))]))
    gens = []
    for pe, gen_list in locals_:
        rest = q // pe
        for g, order in gen_list:
            if rest == 1:
                lifted = g % q
            else:
                # CRT: g mod pe, 1 mod rest
                inv = pow(pe, -1, rest)
                lifted = (g + pe * ((1 - g) * inv % rest)) % q
            gens.append((lifted, order))
    return tuple(gens)


@dataclass(frozen=True)
class DirichletCharacter:
    """A Dirichlet character mod q with exact root-of-unity values.

    ``exponents[a] = e`` means chi(a) = zeta_order^e for gcd(a, q) = 1.
    """

    modulus: int
    order: int
    exponents: dict = field(compare=False, repr=False)
    _exp_vector: tuple = field(default=(), compare=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "_key", (self.modulus, self.order,
                                          tuple(sorted(self.exponents.items()))))

    def __eq__(self, other):
        return isinstance(other, DirichletCharacter) and self._key == other._key

    def __hash__(self):
        return hash(self._key)

    def __repr__(self):
        return f"DirichletCharacter({self.label})"

    # -- construction -------------------------------------------------

    @classmethod
    def from_exponent_vector(cls, q, vector):
        gens = unit_group_generators(q)
        if len(vector) != len(gens):
            raise ValueError("exponent vector length mismatch")
        orders = [s for _, s in gens]
        base = lcm(1, *orders) if orders else 1
        table = {}
        # enumerate the unit group as products of generator powers
        def rec(idx, residue, expo):
            if idx == len(gens):
                table[residue] = expo % base
                return
            g, s = gens[idx]
            c = vector[idx]
            r, e = residue, expo
            for _ in range(s):
                rec(idx + 1, r, e)
                r = (r * g) % q
                e = e + c * (base // s)
        rec(0, 1 % q, 0)
        if q == 1:
            table = {0: 0}
        # reduce to the actual order of chi
        g_all = base
        for e in table.values():
            g_all = gcd(g_all, e)
            if g_all == 1:
                break
        order = base // gcd(base, g_all) if base > 1 else 1
        step = base // order
        table = {a: e // step for a, e in table.items()}
        return cls(q, order, table, tuple(vector))

    # -- basic data ----------------------------------------------------

    def value_exponent(self, a):
        """(order, e) with chi(a) = zeta_order^e, or None when gcd(a, q) > 1."""
        if self.modulus == 1:
            return (1, 0)
        a %= self.modulus
        if gcd(a, self.modulus) != 1:
            return None
        return (self.order, self.exponents[a])

    def value_numeric(self, a, dps=30):
        ve = self.value_exponent(a)
        if ve is None:
            return mpmath.mpc(0)
        order, e = ve
        with mpmath.workdps(dps + 5):
            return mpmath.expjpi(mpmath.mpf(2 * e) / order)

    @property
    def parity(self):
        """chi(-1) as +1 or -1."""
        ve = self.value_exponent(-1)
        order, e = ve
        if e == 0:
            return 1
        assert 2 * e == order, "chi(-1) must be a square root of unity"
        return -1

    @property
    def is_even(self):
        return self.parity == 1

    @property
    def is_odd(self):
        return self.parity == -1

    @property
    def is_principal(self):
        return self.order == 1

    @property
    def conductor(self):
        """Smallest c | q through which chi factors (brute force over divisors)."""
        q = self.modulus
        for c in sorted(_divisors(q)):
            if self._factors_through(c):
                return c
        return q

    def _factors_through(self, c):
        q = self.modulus
        for a in range(1, q + 1):
            if a % c == 1 % c and gcd(a, q) == 1:
                if self.exponents.get(a % q, 0) != 0:
                    return False
        return True

    # -- the deterministic CLI label ------------------------------------

    @property
    def index(self):
        """Position in the deterministic enumeration of characters mod q."""
        gens = unit_group_generators(self.modulus)
        if not gens:
            return 0
        vec = self._exponent_vector()
        idx = 0
        for (g, s), c in zip(gens, vec):
            idx = idx * s + c
        return idx

    def _exponent_vector(self):
        if self._exp_vector:
            return self._exp_vector
        gens = unit_group_generators(self.modulus)
        vec = []
        for g, s in gens:
            order, e = self.value_exponent(g)
            # chi(g) = zeta_order^e = zeta_s^c with c = e*s/order (exact)
            c = e * s // order
            assert c * order == e * s, "generator value not an s-th root of unity"
            vec.append(c % s)
        return tuple(vec)

    @property
    def label(self):
        if self.is_principal:
            return f"{self.modulus}.triv"
        return f"{self.modulus}.{self.index}"

    # -- operations ------------------------------------------------------

    def __mul__(self, other):
        if not isinstance(other, DirichletCharacter):
            return NotImplemented
        q = lcm(self.modulus, other.modulus)
        m = lcm(self.order, other.order)
        table = {}
        for a in range(1, q + 1):
            if gcd(a, q) != 1:
                continue
            _, e1 = self.value_exponent(a)
            _, e2 = other.value_exponent(a)
            table[a % q] = (e1 * (m // self.order) + e2 * (m // other.order)) % m
        g_all = m
        for e in table.values():
            g_all = gcd(g_all, e)
        order = m // gcd(m, g_all) if m > 1 else 1
        step = m // order
        if q == 1:
            table = {0: 0}
        return DirichletCharacter(q, order, {a: e // step for a, e in table.items()})

    def __pow__(self, n):
        result = trivial_character(self.modulus)
        base = self
        n %= self.order
        for _ in range(n):
            result = result * base
        return result

    def conjugate(self):
        table = {a: (-e) % self.order for a, e in self.exponents.items()}
        return DirichletCharacter(self.modulus, self.order, table)

    def to_json(self):
        return {
            "modulus": self.modulus,
            "order": self.order,
            "conductor": self.conductor,
            "parity": self.parity,
            "label": self.label,
        }


@lru_cache(maxsize=None)
def _divisors(n):
    out = [1]
    for p, e in factorize(n):
        out = [d * p ** i for d in out for i in range(e + 1)]
    return tuple(sorted(out))


def trivial_character(q=1):
    gens = unit_group_generators(q)
    return DirichletCharacter.from_exponent_vector(q, (0,) * len(gens))


def enumerate_characters(modulus, parity_filter=None):
    """All characters mod ``modulus`` in deterministic exponent-vector order.

    ``parity_filter`` is +1 (even only), -1 (odd only) or None.
    """
    if modulus < 1:
        raise ValueError("modulus must be positive")
    gens = unit_group_generators(modulus)
    orders = [s for _, s in gens]
    chars = []

    def rec(prefix):
        if len(prefix) == len(orders):
            chars.append(DirichletCharacter.from_exponent_vector(modulus, tuple(prefix)))
            return
        for c in range(orders[len(prefix)]):
            rec(prefix + [c])

    rec([])
    if parity_filter is not None:
        chars = [c for c in chars if c.parity == parity_filter]
    return chars


def character_by_label(label):
    """Resolve the CLI grammar ``q.i`` (deterministic index) or ``q.triv``."""
    mod_str, _, idx_str = label.partition(".")
    q = int(mod_str)
    if idx_str == "triv":
        return trivial_character(q)
    idx = int(idx_str)
    for chi in enumerate_characters(q):
        if chi.index == idx:
            return chi
    raise ValueError(f"no character with label {label}")


def primitivize(chi):
    """The primitive character inducing chi; idempotent."""
    c = chi.conductor
    if c == chi.modulus:
        return chi
    if c == 1:
        return trivial_character(1)
    q = chi.modulus
    table = {}
    for b in range(1, c + 1):
        if gcd(b, c) != 1:
            continue
        a = b
        while gcd(a, q) != 1:
            a += c
        _, e = chi.value_exponent(a)
        table[b % c] = e
    return DirichletCharacter(c, chi.order, table)


def gauss_sum(chi, precision=30):
    """Classical Gauss sum of the primitive character inducing chi.

    Direct c-term exponential sum at the requested precision; the conductor-1
    (principal) case is 1 by convention.
    """
    if precision < 10:
        raise ValueError("precision must be at least 10 digits")
    chi0 = primitivize(chi)
    c = chi0.modulus
    with mpmath.workdps(precision + 10):
        if c == 1:
            return mpmath.mpf(1)
        total = mpmath.mpc(0)
        order = chi0.order
        # chi0(a) * e(a/c) = zeta_{order*c}^{e(a)*c + a*order}; sum powers of one root
        for a in range(1, c):
            ve = chi0.value_exponent(a)
            if ve is None:
                continue
            _, e = ve
            total += mpmath.expjpi(mpmath.mpf(2) * (mpmath.mpf(e) / order + mpmath.mpf(a) / c))
        return +total


def gauss_sum_product_check(chi1, chi2, precision=30):
    """Residual of g(chi1*chi2) = chi1(c2) chi2(c1) g(chi1) g(chi2).

    Both characters must be primitive with coprime conductors; the identity
    fails in general otherwise and a NonCoprimeConductorError is raised.
    """
    c1, c2 = chi1.conductor, chi2.conductor
    if gcd(c1, c2) != 1:
        raise NonCoprimeConductorError(
            f"conductors {c1}, {c2} are not coprime; the product formula does not apply")
    chi1 = primitivize(chi1)
    chi2 = primitivize(chi2)
    with mpmath.workdps(precision + 10):
        lhs = gauss_sum(chi1 * chi2, precision + 5)
        rhs = (chi1.value_numeric(c2, precision + 5)
               * chi2.value_numeric(c1, precision + 5)
               * gauss_sum(chi1, precision + 5)
               * gauss_sum(chi2, precision + 5))
        return mpmath.mpf(abs(lhs - rhs))
