"""Satake parameters and exact local Euler factors of symmetric powers.

All symmetric-power and Rankin-Selberg factors are expanded through power
sums of the two Hecke roots reduced by Newton's identities against the trace
a_p and determinant omega(p) p^(k-1), so coefficients stay exact elements of
the coefficient field (never floating roots).  The tensor-product
factorization check is therefore an exact polynomial identity test.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import mpmath

from .fieldarith import CycloElement, FieldElement
from .modforms import Newform, primes_up_to


class BadPrimeError(ValueError):
    """Satake data requested at a ramified prime."""


class FunctorialityFlagError(ValueError):
    """Symmetric powers beyond the fourth need the explicit conditional flag."""


@dataclass
class SatakeData:
    """Hecke roots at a good prime: exact symmetric functions + numeric roots."""

    prime: int
    trace: object            # a_p, exact
    determinant: object      # omega(p) p^(k-1), exact
    alpha: object            # numeric root at `precision` digits
    beta: object
    precision: int
    embedding_index: int = 0

    def __repr__(self):
        return f"SatakeData(p={self.prime}, trace={self.trace})"


def satake(nf: Newform, p: int, precision: int = 30) -> SatakeData:
    """Roots of X^2 - a_p X + omega(p) p^(k-1) at a good prime p."""
    if nf.level % p == 0:
        raise BadPrimeError(
            f"p={p} divides the level {nf.level}; ramified local factors are "
            "excluded here (partial L-function policy)")
    ap = nf.a(p)
    det = nf.nebentypus_value_in_field(p) * (p ** (nf.weight - 1))
    with mpmath.workdps(precision + 10):
        t = ap.embed(precision + 10, nf.embedding_index)
        d = det.embed(precision + 10, nf.embedding_index)
        disc = t * t - 4 * d
        root = mpmath.sqrt(disc)
        alpha = (t + root) / 2
        beta = (t - root) / 2
    return SatakeData(p, ap, det, alpha, beta, precision, nf.embedding_index)


@dataclass
class SymPowerLocalData:
    """The Satake parameter multiset of Sym^r at one prime."""

    satake: SatakeData
    r: int

    @property
    def prime(self):
        return self.satake.prime

    @property
    def dimension(self):
        return self.r + 1


def sym_power_local_data(s: SatakeData, r: int) -> SymPowerLocalData:
    if r < 0:
        raise ValueError("symmetric power index must be >= 0")
    return SymPowerLocalData(s, r)


@dataclass
class EulerFactor:
    """Inverse local polynomial in X = p^(-s), exact coefficients.

    ``coefficients[j]`` is the X^j coefficient; the constant term is 1 and
    the parallel numeric form is produced on demand from the exact one.
    """

    prime: int
    coefficients: list
    embedding_index: int = 0

    @property
    def degree(self):
        return len(self.coefficients) - 1

    def numeric(self, dps=30):
        return [_embed(c, dps, self.embedding_index) for c in self.coefficients]

    def value(self, x, dps=30):
        """The polynomial evaluated at numeric x (so 1/local L-factor)."""
        with mpmath.workdps(dps):
            acc = mpmath.mpc(0)
            for c in reversed(self.numeric(dps)):
                acc = acc * x + c
            return acc


def _embed(c, dps, index):
    if isinstance(c, (FieldElement, CycloElement)):
        return c.embed(dps, index)
    c = Fraction(c)
    with mpmath.workdps(dps):
        return mpmath.mpf(c.numerator) / c.denominator


def _one_like(x):
    if isinstance(x, FieldElement):
        return x.field.one()
    if isinstance(x, CycloElement):
        return CycloElement.from_field(x.field, x.m, 1)
    return Fraction(1)


def _is_zero(x):
    if isinstance(x, (FieldElement, CycloElement)):
        return x.is_zero()
    return x == 0


def _trace_power_sums(s: SatakeData, m_max: int):
    """t_m = alpha^m + beta^m for m = 0..m_max via the Hecke recursion."""
    one = _one_like(s.trace)
    sums = [one + one, s.trace]
    for m in range(2, m_max + 1):
        sums.append(s.trace * sums[m - 1] - s.determinant * sums[m - 2])
    return sums[:m_max + 1]


def _sym_power_sum(s: SatakeData, r: int, m: int, tm_cache):
    """h_m(r) = sum_{i=0}^{r} alpha^((r-i)m) beta^(im)."""
    one = _one_like(s.trace)
    if r == 0:
        return one
    tm = tm_cache[m]
    dm = s.determinant ** m
    h_prev, h = one, tm
    for _ in range(2, r + 1):
        h_prev, h = h, tm * h - dm * h_prev
    return h


def _poly_from_power_sums(power_sums, degree):
    """Coefficients of prod (1 - gamma X) from P_m = sum gamma^m, Newton's identities."""
    one = _one_like(power_sums[1]) if degree >= 1 else Fraction(1)
    elem = [one]
    for j in range(1, degree + 1):
        acc = None
        sign = 1
        for i in range(1, j + 1):
            term = elem[j - i] * power_sums[i]
            if sign < 0:
                term = -term
            acc = term if acc is None else acc + term
            sign = -sign
        elem.append(acc * Fraction(1, j))
    coeffs = []
    for j, e in enumerate(elem):
        coeffs.append(-e if j % 2 else e)
    return coeffs


def sym_euler_factor(s: SatakeData, r: int, twist_value=1) -> EulerFactor:
    """Exact inverse polynomial of the Sym^r local factor, twisted.

    The roots are twist * alpha^(r-i) beta^i; ``twist_value`` is chi(p) for a
    character twist (an exact root of unity or zero) but any exact field
    element is accepted, which is what the tensor-product factorization needs
    for determinant twists.
    """
    p = s.prime
    if _is_zero(twist_value):
        return EulerFactor(p, [_one_like(s.trace)], s.embedding_index)
    one = _one_like(s.trace)
    if isinstance(twist_value, (int, Fraction)):
        twist = one * twist_value
    else:
        twist = twist_value
    if r == 0:
        return EulerFactor(p, [one, -twist], s.embedding_index)
    tm_cache = _trace_power_sums(s, r + 1)
    power_sums = [None]
    tw = one
    for m in range(1, r + 2):
        tw = tw * twist
        power_sums.append(tw * _sym_power_sum(s, r, m, tm_cache))
    coeffs = _poly_from_power_sums(power_sums, r + 1)
    return EulerFactor(p, coeffs, s.embedding_index)


def rankin_selberg_euler_factor(pi_data: SymPowerLocalData,
                                sigma_data: SymPowerLocalData) -> EulerFactor:
    """Exact tensor-product local factor prod_{i,j} (1 - alpha_i beta_j X)."""
    if pi_data.prime != sigma_data.prime:
        raise ValueError(
            f"mismatched primes {pi_data.prime} != {sigma_data.prime}")
    s = pi_data.satake
    degree = pi_data.dimension * sigma_data.dimension
    tm_cache = _trace_power_sums(s, max(1, degree))
    power_sums = [None]
    for m in range(1, degree + 1):
        power_sums.append(_sym_power_sum(s, pi_data.r, m, tm_cache)
                          * _sym_power_sum(sigma_data.satake, sigma_data.r, m, tm_cache))
    coeffs = _poly_from_power_sums(power_sums, degree)
    return EulerFactor(s.prime, coeffs, s.embedding_index)


def verify_clebsch_gordan(nf: Newform, n: int, prime_bound: int,
                          assume_functoriality: bool = False) -> dict:
    """Exact per-prime check of the tensor-product factorization.

    At every good prime p <= prime_bound, asserts the polynomial identity
    between the (Sym^n, Sym^(n-1)) tensor factor and the product of the odd
    symmetric power factors Sym^(2a-1) twisted by det^(n-a), a = 1..n.
    Returns a report; failures are report content, never exceptions.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if n > 4 and not assume_functoriality:
        raise FunctorialityFlagError(
            f"n={n} involves symmetric powers beyond the known transfers; "
            "pass assume_functoriality=True to proceed conditionally")
    records = []
    skipped = []
    for p in primes_up_to(prime_bound):
        if nf.level % p == 0:
            skipped.append(p)
            continue
        s = satake(nf, p, 20)
        lhs = rankin_selberg_euler_factor(sym_power_local_data(s, n),
                                          sym_power_local_data(s, n - 1))
        rhs_coeffs = [_one_like(s.trace)]
        for a in range(1, n + 1):
            factor = sym_euler_factor(s, 2 * a - 1, s.determinant ** (n - a))
            rhs_coeffs = _poly_mul_generic(rhs_coeffs, factor.coefficients)
        equal = len(lhs.coefficients) == len(rhs_coeffs)
        first_mismatch = None
        if equal:
            for idx, (x, y) in enumerate(zip(lhs.coefficients, rhs_coeffs)):
                if x != y:
                    equal = False
                    first_mismatch = idx
                    break
        records.append({
            "p": p,
            "degree_lhs": lhs.degree,
            "degree_rhs": len(rhs_coeffs) - 1,
            "equal": equal,
            "first_mismatch": first_mismatch,
        })
    return {
        "form": nf.label,
        "weight": nf.weight,
        "level": nf.level,
        "n": n,
        "prime_bound": prime_bound,
        "skipped_primes": skipped,
        "all_equal": all(r["equal"] for r in records),
        "primes_checked": len(records),
        "records": records,
    }


def _poly_mul_generic(a, b):
    out = [None] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if _is_zero(x):
            continue
        for j, y in enumerate(b):
            if _is_zero(y):
                continue
            t = x * y
            out[i + j] = t if out[i + j] is None else out[i + j] + t
    zero = _one_like(a[0]) * 0 if a else Fraction(0)
    return [zero if c is None else c for c in out]


def local_factor_value(nf: Newform, r: int, p: int, s_analytic, dps=30,
                       twist_value=1):
    """Numeric value of the analytic-normalization local factor L_p(s)^(-1).

    This is the exact motivic polynomial evaluated at X = p^(-s - r(k-1)/2),
    i.e. the unitary-normalization Euler factor; used for partial-vs-full
    bookkeeping of good primes.
    """
    sd = satake(nf, p, dps + 10)
    factor = sym_euler_factor(sd, r, twist_value)
    with mpmath.workdps(dps + 10):
        stot = mpmath.mpmathify(s_analytic) + mpmath.mpf(r * (nf.weight - 1)) / 2
        return factor.value(mpmath.power(p, -stot), dps + 10)
