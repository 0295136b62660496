"""Exact Fourier coefficients of level-one newforms, plus coefficient file I/O.

Level-one cusp form spaces are generated from E4/E6 q-expansions and
echelonized (the classical integral basis with leading terms q, q^2, ...).
Hecke eigenforms come from diagonalizing T_2 on that basis; eigenvalue fields
of degree up to 4 are supported exactly.  Forms of higher level are never
computed here, only ingested from coefficient files and re-verified.

Big-integer power series products go through Kronecker substitution so that
gmpy2/GMP does the heavy multiplication.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction

import gmpy2
import mpmath

from .characters import DirichletCharacter, character_by_label, trivial_character
from .fieldarith import NumberField, FieldElement, cyclotomic_polynomial

QQ_POLY = (0, 1)  # defining polynomial of the rationals as a trivial extension


class CoefficientFileError(ValueError):
    """Raised when a coefficient file is malformed or violates an invariant."""


class HeckeStructureError(ValueError):
    """A Hecke relation failed; the message names the relation and indices."""


class UnsupportedFieldDegreeError(ValueError):
    pass


# ---------------------------------------------------------------------------
# integer power series via Kronecker substitution


def _pack_nonneg(coeffs, width_bytes):
    buf = bytearray(len(coeffs) * width_bytes)
    for i, c in enumerate(coeffs):
        if c:
            nb = (c.bit_length() + 7) // 8
            off = i * width_bytes
            buf[off:off + nb] = c.to_bytes(nb, "little")
    return int.from_bytes(buf, "little")


def _unpack_nonneg(value, width_bytes, count):
    total = count * width_bytes
    data = int(value).to_bytes(max(total, (value.bit_length() + 7) // 8), "little")
    out = []
    for i in range(count):
        out.append(int.from_bytes(data[i * width_bytes:(i + 1) * width_bytes], "little"))
    return out


def series_mul(a, b, n_terms):
    """Product of integer power series (coefficient lists), truncated.

    Splits into nonnegative parts so each Kronecker pack has unsigned digits.
    """
    a = a[:n_terms]
    b = b[:n_terms]
    if not a or not b:
        return []
    max_a = max(max(a), -min(a), 1)
    max_b = max(max(b), -min(b), 1)
    bound = min(len(a), len(b)) * max_a * max_b
    width_bytes = (bound.bit_length() + 8) // 8 + 1
    ap = [c if c > 0 else 0 for c in a]
    an = [-c if c < 0 else 0 for c in a]
    bp = [c if c > 0 else 0 for c in b]
    bn = [-c if c < 0 else 0 for c in b]
    packs = {}
    for name, coeffs in (("ap", ap), ("an", an), ("bp", bp), ("bn", bn)):
        packs[name] = gmpy2.mpz(_pack_nonneg(coeffs, width_bytes))
    count = min(n_terms, len(a) + len(b) - 1)
    pos = _unpack_nonneg(packs["ap"] * packs["bp"] + packs["an"] * packs["bn"],
                         width_bytes, count)
    neg = _unpack_nonneg(packs["ap"] * packs["bn"] + packs["an"] * packs["bp"],
                         width_bytes, count)
    return [p - n for p, n in zip(pos, neg)]


def series_pow(a, e, n_terms):
    result = [1]
    base = a[:n_terms]
    while e:
        if e & 1:
            result = series_mul(result, base, n_terms)
        e >>= 1
        if e:
            base = series_mul(base, base, n_terms)
    return result


def sigma_series(power, n_terms):
    """[0, sigma_power(1), ..., sigma_power(n_terms-1)] via a divisor sieve."""
    out = [0] * n_terms
    for d in range(1, n_terms):
        dp = d ** power
        for m in range(d, n_terms, d):
            out[m] += dp
    return out


def eisenstein_qexp(weight, n_terms):
    """E_4 or E_6, normalized with constant term 1 (integer coefficients)."""
    if weight == 4:
        factor = 240
    elif weight == 6:
        factor = -504
    else:
        raise ValueError("only E4 and E6 are needed here")
    sig = sigma_series(weight - 1, n_terms)
    return [1] + [factor * s for s in sig[1:]]


def delta_qexp(n_terms):
    """Coefficients tau(0..n_terms-1) of the discriminant form, by eta powers."""
    if n_terms <= 1:
        return [0] * n_terms
    # eta^3 = sum (-1)^j (2j+1) q^(j(j+1)/2)
    eta3 = [0] * n_terms
    j = 0
    while j * (j + 1) // 2 < n_terms:
        eta3[j * (j + 1) // 2] = (1 - 2 * (j & 1)) * (2 * j + 1)
        j += 1
    eta6 = series_mul(eta3, eta3, n_terms)
    eta12 = series_mul(eta6, eta6, n_terms)
    eta24 = series_mul(eta12, eta12, n_terms)
    return [0] + eta24[:n_terms - 1]


def dim_cusp_forms(weight):
    """dim S_weight(SL_2(Z)); zero for odd or small weight."""
    k = weight
    if k < 12 or k % 2:
        return 0
    dim_mk = k // 12 + (0 if k % 12 == 2 else 1)
    return dim_mk - 1


def victor_miller_basis(weight, n_terms):
    """Echelonized integral basis of S_weight(SL_2(Z)) to n_terms coefficients.

    Returns a list of integer coefficient lists c with c[n] the q^n
    coefficient for 0 <= n <= n_terms; element i is q^(i+1) + O(q^(dim+1)).
    Odd or small weights give the empty list (dimension zero), not an error.
    """
    if n_terms < 1:
        raise ValueError("n_terms must be >= 1")
    d = dim_cusp_forms(weight)
    if d == 0:
        return []
    length = n_terms + 1
    delta = delta_qexp(length)
    e4 = eisenstein_qexp(4, length)
    e6 = eisenstein_qexp(6, length)
    rows = []
    for j in range(1, d + 1):
        w = weight - 12 * j
        b = 0 if w % 4 == 0 else 1
        a = (w - 6 * b) // 4
        if a < 0:
            raise ValueError(f"no E4^a E6^b of weight {w}")
        row = series_pow(delta, j, length)
        if a:
            row = series_mul(row, series_pow(e4, a, length), length)
        if b:
            row = series_mul(row, e6, length)
        row = row + [0] * (length - len(row))
        rows.append(row)
    # echelonize against the leading d x d block (leading coefficients are 1)
    for j in range(d):
        for i in range(d):
            if i != j:
                c = rows[i][j + 1]
                if c:
                    rows[i] = [x - c * y for x, y in zip(rows[i], rows[j])]
    return rows


def _hecke_operator_columns(rows, weight, p, dim):
    """Matrix of T_p on the echelon basis (columns = images), level one."""
    cols = []
    for row in rows:
        img = []
        for n in range(1, dim + 1):
            c = row[p * n] if p * n < len(row) else None
            if c is None:
                raise ValueError("basis too short for Hecke operator")
            if n % p == 0:
                c += p ** (weight - 1) * row[n // p]
            img.append(c)
        cols.append(img)
    # entry (i, j): coefficient of basis_i in T_p basis_j
    return [[cols[j][i] for j in range(dim)] for i in range(dim)]


def _charpoly(matrix):
    """Characteristic polynomial (ascending, monic) of a small integer matrix."""
    import sympy

    m = sympy.Matrix(matrix)
    poly = m.charpoly()
    coeffs = [int(c) for c in reversed(poly.all_coeffs())]
    return coeffs


def _factor_poly(coeffs):
    """Irreducible monic integer factors (ascending coefficients) with multiplicity."""
    import sympy

    x = sympy.Symbol("x")
    expr = sum(c * x ** i for i, c in enumerate(coeffs))
    _, factors = sympy.Poly(expr, x).factor_list()
    out = []
    for fac, mult in factors:
        fc = [int(c) for c in reversed(fac.all_coeffs())]
        out.append((fc, mult))
    return out


# ---------------------------------------------------------------------------
# newforms


@dataclass
class Newform:
    """A normalized Hecke eigenform with exact coefficients.

    ``coefficients[n]`` (1-based; index 0 unused) are elements of the
    coefficient field Q(phi).  ``embedding_index`` selects the complex
    embedding used when numeric values are requested.
    """

    weight: int
    level: int
    nebentypus: DirichletCharacter
    coeff_field: NumberField
    coefficients: list
    coefficient_count: int
    embedding_index: int = 0
    orbit_label: str = ""

    def __repr__(self):
        return (f"Newform(k={self.weight}, N={self.level}, "
                f"deg={self.coeff_field.degree}, emb={self.embedding_index}, "
                f"M={self.coefficient_count})")

    @property
    def label(self):
        return f"{self.weight}.{self.level}.{self.orbit_label}.{self.embedding_index}"

    def a(self, n):
        if not 1 <= n <= self.coefficient_count:
            raise IndexError(f"coefficient a_{n} not available (M={self.coefficient_count})")
        return self.coefficients[n]

    def a_numeric(self, n, dps=30):
        return self.a(n).embed(dps, self.embedding_index)

    def galois_conjugates(self):
        """All embeddings of this orbit as Newform views sharing exact data."""
        out = []
        for i in range(self.coeff_field.degree):
            out.append(Newform(self.weight, self.level, self.nebentypus,
                               self.coeff_field, self.coefficients,
                               self.coefficient_count, embedding_index=i,
                               orbit_label=self.orbit_label))
        return out

    def galois_conjugate(self):
        """The coefficientwise image under the field automorphism (quadratic only)."""
        if self.coeff_field.degree == 1:
            return self
        if self.coeff_field.degree != 2:
            raise UnsupportedFieldDegreeError(
                "exact conjugation map is available for quadratic orbits only")
        coeffs = [None] + [self.coeff_field.apply_automorphism(c)
                           for c in self.coefficients[1:]]
        return Newform(self.weight, self.level, self.nebentypus, self.coeff_field,
                       coeffs, self.coefficient_count,
                       embedding_index=1 - self.embedding_index,
                       orbit_label=self.orbit_label)

    def nebentypus_value_in_field(self, n):
        """omega(n) as an exact element of the coefficient field."""
        ve = self.nebentypus.value_exponent(n)
        if ve is None:
            return self.coeff_field.zero()
        order, e = ve
        if order == 1:
            return self.coeff_field.one()
        if order == 2:
            return self.coeff_field.element(1 if e == 0 else -1)
        zeta = _root_of_unity_in_field(self.coeff_field, order)
        return zeta ** e

    def verify(self):
        verify_newform(self)
        return self

    def ramanujan_check(self, dps=50):
        """Numeric |a_p| <= 2 p^((k-1)/2) at every embedding, all good p <= M.

        Returns the worst slack max(|a_p| - 2p^((k-1)/2)); contract is that it
        stays below 10^-(dps-10).
        """
        worst = mpmath.mpf("-inf")
        with mpmath.workdps(dps):
            for p in primes_up_to(self.coefficient_count):
                if self.level % p == 0:
                    continue
                bound = 2 * mpmath.power(p, Fraction(self.weight - 1, 2))
                for i in range(self.coeff_field.degree):
                    excess = abs(self.a(p).embed(dps, i)) - bound
                    if excess > worst:
                        worst = excess
        return worst


def _smallest_prime_factors(n_max):
    spf = list(range(n_max + 1))
    for p in range(2, int(n_max ** 0.5) + 1):
        if spf[p] == p:
            for m in range(p * p, n_max + 1, p):
                if spf[m] == m:
                    spf[m] = p
    return spf


def primes_up_to(n):
    spf = _smallest_prime_factors(n)
    return [p for p in range(2, n + 1) if spf[p] == p]


_ROOT_CACHE = {}


def _root_of_unity_in_field(K, order):
    """A primitive order-th root of unity inside K, if one exists.

    Candidates are reconstructed from embedding data (the images under the
    complex embeddings must be primitive order-th roots of unity) and then
    verified exactly, so a returned element is always correct.
    """
    key = (K.poly, order)
    if key in _ROOT_CACHE:
        return _ROOT_CACHE[key]
    from itertools import product
    from math import gcd as _gcd

    if K.degree == 1:
        raise CoefficientFileError(
            f"nebentypus has order {order} but the coefficient field is rational")
    dps = 60
    units = [j for j in range(1, order) if _gcd(j, order) == 1]
    with mpmath.workdps(dps):
        roots = K.embeddings(dps)
        d = K.degree
        vander = mpmath.matrix([[roots[i] ** j for j in range(d)] for i in range(d)])
        for exps in product(units, repeat=d):
            target = mpmath.matrix([mpmath.expjpi(mpmath.mpf(2 * j) / order) for j in exps])
            try:
                sol = mpmath.lu_solve(vander, target)
            except ZeroDivisionError:
                continue
            coords = []
            ok = True
            for c in sol:
                if abs(mpmath.im(c)) > mpmath.mpf(10) ** (-dps // 2):
                    ok = False
                    break
                frac = _nearest_fraction(mpmath.re(c), 10 ** 12)
                if frac is None:
                    ok = False
                    break
                coords.append(frac)
            if not ok:
                continue
            elem = K.element(coords)
            if (elem ** order) == K.one():
                primitive = all((elem ** (order // q)) != K.one()
                                for q in {f[0] for f in _int_factor(order)})
                if primitive:
                    _ROOT_CACHE[key] = elem
                    return elem
    raise CoefficientFileError(
        f"no primitive {order}-th root of unity in the coefficient field")


def _int_factor(n):
    from .characters import factorize

    return factorize(n)


def _nearest_fraction(x, max_den):
    """Continued-fraction rational reconstruction, or None if implausible."""
    scale = 10 ** 30
    approx = Fraction(int(mpmath.nint(x * scale)), scale)
    frac = approx.limit_denominator(max_den)
    if abs(approx - frac) < Fraction(1, 10 ** 20):
        return frac
    return None


def verify_newform(nf):
    """Re-verify all exact Hecke invariants; raises HeckeStructureError."""
    M = nf.coefficient_count
    K = nf.coeff_field
    if M < 1 or nf.a(1) != K.one():
        raise HeckeStructureError("not normalized: a_1 != 1")
    spf = _smallest_prime_factors(M)
    # multiplicativity via a_n = a_{p^e} a_{n/p^e}, smallest prime p
    for n in range(2, M + 1):
        p = spf[n]
        pe = p
        while (n // pe) % p == 0:
            pe *= p
        m = n // pe
        if m > 1:
            if nf.a(n) != nf.a(pe) * nf.a(m):
                raise HeckeStructureError(
                    f"multiplicativity fails at coprime pair ({pe}, {m}): "
                    f"a_{n} != a_{pe} * a_{m}")
    # prime power recursion at good primes
    for p in primes_up_to(M):
        if nf.level % p == 0:
            continue
        wp = nf.nebentypus_value_in_field(p) * (p ** (nf.weight - 1))
        ap = nf.a(p)
        j = 1
        while p ** (j + 1) <= M:
            lhs = nf.a(p ** (j + 1))
            rhs = ap * nf.a(p ** j) - wp * nf.a(p ** (j - 1))
            if lhs != rhs:
                raise HeckeStructureError(
                    f"prime power recursion fails at p={p}, j={j}: "
                    f"a_{p ** (j + 1)} != a_{p} a_{p ** j} - omega(p) p^(k-1) a_{p ** (j - 1)}")
            j += 1


def level_one_newforms(weight, n_terms, max_field_degree=4):
    """Newforms of level one and the given weight, with exact eigenvalue fields.

    Galois-conjugate forms of one orbit are returned together (consecutive
    entries sharing coefficient data, one per complex embedding).
    """
    if n_terms < 2:
        raise ValueError("n_terms must be >= 2 to pin down eigenforms")
    d = dim_cusp_forms(weight)
    if d == 0:
        return []
    basis_len = max(n_terms, 2 * d + 1)
    rows = victor_miller_basis(weight, basis_len)
    tmat = _hecke_operator_columns(rows, weight, 2, d)
    charpoly = _charpoly(tmat)
    factors = _factor_poly(charpoly)
    forms = []
    orbit_letters = "abcdefgh"
    for orbit_idx, (fac, mult) in enumerate(sorted(factors, key=lambda fm: fm[0])):
        if mult != 1:
            raise UnsupportedFieldDegreeError(
                "repeated T_2 eigenvalue factor; not supported at level one")
        deg = len(fac) - 1
        if deg > max_field_degree:
            raise UnsupportedFieldDegreeError(
                f"eigenvalue field degree {deg} exceeds the configured bound "
                f"{max_field_degree}")
        K = NumberField(fac, name=f"a2_{weight}") if deg > 1 else NumberField(QQ_POLY)
        t = K.gen() if deg > 1 else K.element(Fraction(-fac[0], fac[1]))
        # kernel of (T - t) over K
        mat = [[K.element(tmat[i][j]) for j in range(d)] for i in range(d)]
        for i in range(d):
            mat[i][i] = mat[i][i] - t
        v = _kernel_vector(mat, K)
        # eigenform coefficients: f = sum v_j basis_j, then normalize a_1 = 1
        a1 = v[0]
        if a1.is_zero():
            raise HeckeStructureError("eigenform with a_1 = 0 at level one")
        v = [x / a1 for x in v]
        coeffs = [None]
        for n in range(1, n_terms + 1):
            acc = K.zero()
            for j in range(d):
                c = rows[j][n]
                if c:
                    acc = acc + v[j] * c
            coeffs.append(acc)
        orbit = Newform(weight, 1, trivial_character(1), K, coeffs, n_terms,
                        orbit_label=orbit_letters[orbit_idx])
        forms.extend(orbit.galois_conjugates())
    return forms


def _kernel_vector(mat, K):
    """A nonzero kernel vector of a singular small matrix over K."""
    d = len(mat)
    m = [row[:] for row in mat]
    pivots = []
    row = 0
    for col in range(d):
        pivot = None
        for r in range(row, d):
            if not m[r][col].is_zero():
                pivot = r
                break
        if pivot is None:
            continue
        m[row], m[pivot] = m[pivot], m[row]
        inv = m[row][col].inverse()
        m[row] = [x * inv for x in m[row]]
        for r in range(d):
            if r != row and not m[r][col].is_zero():
                factor = m[r][col]
                m[r] = [x - factor * y for x, y in zip(m[r], m[row])]
        pivots.append(col)
        row += 1
    free = [c for c in range(d) if c not in pivots]
    if not free:
        raise ValueError("matrix is nonsingular; no kernel vector")
    fc = free[0]
    v = [K.zero()] * d
    v[fc] = K.one()
    for r, col in enumerate(pivots):
        v[col] = -m[r][fc]
    return v


# ---------------------------------------------------------------------------
# coefficient files (format: header MFCOEFF 1, k/N/chi/field lines, a_n rows)


def _format_fraction(x):
    x = Fraction(x)
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


def write_coefficients(nf, path):
    lines = [
        "MFCOEFF 1",
        f"k {nf.weight}",
        f"N {nf.level}",
        f"chi {'trivial' if nf.nebentypus.is_principal and nf.nebentypus.modulus == 1 else nf.nebentypus.label}",
        "field " + " ".join(str(int(c)) for c in nf.coeff_field.poly),
    ]
    for n in range(1, nf.coefficient_count + 1):
        co = nf.a(n).co
        lines.append(f"{n} " + " ".join(_format_fraction(c) for c in co))
    text = "\n".join(lines) + "\n"
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)
    return text


_FRACTION_RE = re.compile(r"^-?\d+(/\d+)?$")


def _parse_fraction(tok):
    if not _FRACTION_RE.match(tok):
        raise CoefficientFileError(f"bad rational token {tok!r}")
    if "/" in tok:
        num, den = tok.split("/")
        return Fraction(int(num), int(den))
    return Fraction(int(tok))


def load_coefficients(path):
    """Read a MFCOEFF 1 file and return a fully re-verified Newform."""
    with open(path, encoding="utf-8") as fh:
        raw_lines = [ln.strip() for ln in fh if ln.strip()]
    if not raw_lines or raw_lines[0].split() != ["MFCOEFF", "1"]:
        raise CoefficientFileError("missing MFCOEFF 1 header")
    header = {}
    idx = 1
    for key in ("k", "N", "chi", "field"):
        if idx >= len(raw_lines):
            raise CoefficientFileError(f"missing header line {key!r}")
        parts = raw_lines[idx].split()
        if parts[0] != key:
            raise CoefficientFileError(f"expected {key!r} line, got {raw_lines[idx]!r}")
        header[key] = parts[1:]
        idx += 1
    try:
        weight = int(header["k"][0])
        level = int(header["N"][0])
    except (IndexError, ValueError) as exc:
        raise CoefficientFileError(f"bad k/N header: {exc}") from None
    if weight < 1 or level < 1:
        raise CoefficientFileError("k and N must be positive")
    chi_tok = header["chi"][0]
    if chi_tok == "trivial":
        neb = trivial_character(1)
    else:
        neb = character_by_label(chi_tok)
    if neb.modulus > 1 and level % neb.modulus != 0:
        raise CoefficientFileError("nebentypus modulus must divide the level")
    try:
        field_poly = [int(tok) for tok in header["field"]]
    except ValueError:
        raise CoefficientFileError("field polynomial must have integer coefficients") from None
    if len(field_poly) < 2 or field_poly[-1] != 1:
        raise CoefficientFileError("field polynomial must be monic of degree >= 1")
    K = NumberField(field_poly)
    degree = K.degree
    entries = {}
    for ln in raw_lines[idx:]:
        toks = ln.split()
        try:
            n = int(toks[0])
        except ValueError:
            raise CoefficientFileError(f"bad coefficient line {ln!r}") from None
        if n < 1:
            raise CoefficientFileError(f"coefficient index {n} out of range")
        if len(toks) - 1 != degree:
            raise CoefficientFileError(
                f"coefficient a_{n} has {len(toks) - 1} coordinates, expected {degree}")
        if n in entries:
            raise CoefficientFileError(f"duplicate coefficient a_{n}")
        entries[n] = K.element([_parse_fraction(t) for t in toks[1:]])
    if not entries:
        raise CoefficientFileError("no coefficients present")
    M = max(entries)
    if set(entries) != set(range(1, M + 1)):
        missing = sorted(set(range(1, M + 1)) - set(entries))[:3]
        raise CoefficientFileError(f"coefficient list has gaps, first missing n={missing[0]}")
    coeffs = [None] + [entries[n] for n in range(1, M + 1)]
    nf = Newform(weight, level, neb, K, coeffs, M)
    try:
        verify_newform(nf)
    except HeckeStructureError as exc:
        raise CoefficientFileError(f"ingestion rejected: {exc}") from None
    return nf
