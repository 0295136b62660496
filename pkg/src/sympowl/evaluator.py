"""High-precision L-values via a smoothed approximate functional equation.

The completed function is assembled from gamma atoms ("R"/"C" shifts in the
unitary normalization), an integer conductor and unitarily normalized
Dirichlet coefficients built from exact Euler factors.  Values come from the
incomplete-Mellin identity

    Lambda(s) = I_A(s) + eps * I^dual_{1/A}(1-s) - (pole corrections),
    I_A(s)    = front(s) * sum_n  b_n n^(-s) H_s(u_n / A),

valid for every scaling A > 0; varying A gives a genuine consistency check
(the numerical content of the functional equation), and the reported
precision is certified a posteriori from that residual plus term doubling.

H_s(u) is computed by summing the residues of G(s+w) u^(-w) / w over the
poles of the gamma product.  Coinciding poles (shift differences in 2Z or Z)
produce log terms, handled through truncated Laurent series whose gamma data
is independent of s.  Large u costs guard digits, not a different algorithm:
the magnitude envelope of the residue terms fixes the working precision per
evaluation point; a Mellin-Barnes quadrature oracle cross-checks the series
in the crossover band where both regimes are affordable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dataclass_field
from fractions import Fraction

import mpmath

from .characters import DirichletCharacter, primitivize, trivial_character, _divisors
from .euler import satake, sym_euler_factor
from .fieldarith import CycloElement
from .modforms import Newform, primes_up_to, _smallest_prime_factors


class InsufficientTermsError(ValueError):
    def __init__(self, required, available):
        self.required = required
        self.available = available
        super().__init__(
            f"need at least M={required} coefficients for this point/precision, "
            f"spec carries {available}")


class GammaPoleError(ValueError):
    """Evaluation point sits on a pole of the assembled gamma factor."""


class RootNumberError(ValueError):
    pass


class KernelPrecisionError(ArithmeticError):
    """Kernel regimes disagree beyond tolerance; escalate precision."""


class CoefficientBoundError(ValueError):
    """A Dirichlet coefficient violates its Ramanujan-type bound."""


class FunctorialityFlagError(ValueError):
    pass


# ---------------------------------------------------------------------------
# s points: numeric value plus exact rational part when available


def _parse_s(s):
    """Return (mpc value, (Fraction re, Fraction im) or None)."""
    if isinstance(s, (int, Fraction)):
        fr = Fraction(s)
        return mpmath.mpf(fr.numerator) / fr.denominator, (fr, Fraction(0))
    if isinstance(s, tuple) and len(s) == 2:
        re, im = Fraction(s[0]), Fraction(s[1])
        return (mpmath.mpf(re.numerator) / re.denominator
                + mpmath.mpc(0, 1) * mpmath.mpf(im.numerator) / im.denominator), (re, im)
    val = mpmath.mpmathify(s)
    return mpmath.mpc(val), None


def _one_minus(s_val, s_exact):
    if s_exact is None:
        return 1 - s_val, None
    re, im = s_exact
    return 1 - s_val, (1 - re, -im)


# ---------------------------------------------------------------------------
# power series helpers (short truncated series as coefficient lists)


def _series_mul(a, b, order):
    out = [mpmath.mpc(0)] * order
    for i, x in enumerate(a):
        if i >= order:
            break
        for j, y in enumerate(b):
            if i + j >= order:
                break
            out[i + j] += x * y
    return out


def _series_exp(logs, order):
    """exp of a series with zero constant term, to the given order."""
    out = [mpmath.mpc(0)] * order
    out[0] = mpmath.mpc(1)
    for i in range(1, order):
        acc = mpmath.mpc(0)
        for r in range(1, i + 1):
            if r < len(logs) and logs[r] != 0:
                acc += r * logs[r] * out[i - r]
        out[i] = acc / i
    return out


# ---------------------------------------------------------------------------
# the kernel table


def atoms_canonical(atoms):
    return tuple(sorted((kind, Fraction(shift)) for kind, shift in atoms))


def atoms_degree(atoms):
    return sum(2 if kind == "C" else 1 for kind, _ in atoms)


class KernelTable:
    """Residue-series data for H_s(u) at fixed gamma atoms and s.

    Entries are (delta, [c_0..c_{m-1}]) meaning a contribution
    u^(s+delta) * sum_j c_j (ln u)^j; the w=0 residue G(s) is kept separately.
    The table extends on demand to cover larger u.
    """

    def __init__(self, atoms, s, base_dps, curvature_guard=10):
        self.atoms = atoms_canonical(atoms)
        self.s_val, self.s_exact = _parse_s(s)
        self.base_dps = base_dps
        self.build_dps = base_dps + 30
        self.poles = []            # list of (delta Fraction, coeff list)
        self._pole_logmag = []     # float log10 of dominant coefficient
        self._delta_next = {}      # per-class next k
        self._hull = None
        with mpmath.workdps(self.build_dps):
            self.s_hp = mpmath.mpc(self.s_val)
            self.g_value = self._gamma_product(self.s_hp)
        self._classes = self._pole_classes()
        self._enumerated = 0

    # -- gamma bookkeeping ------------------------------------------------

    def _gamma_product(self, z):
        acc = mpmath.mpc(1)
        for kind, shift in self.atoms:
            sh = mpmath.mpf(shift.numerator) / shift.denominator
            if kind == "C":
                acc *= mpmath.gamma(z + sh)
            else:
                acc *= mpmath.gamma((z + sh) / 2)
        return acc

    def gamma_value(self):
        return self.g_value

    def _pole_classes(self):
        """Pole offsets delta come in classes mod 1 or mod 2 per atom."""
        classes = {}
        for idx, (kind, shift) in enumerate(self.atoms):
            step = 1 if kind == "C" else 2
            key = (shift % step, step) if step == 2 else (shift % 1, 1)
            classes.setdefault(("all",), []).append((idx, kind, shift, step))
        return classes[("all",)]

    def _offsets_up_to(self, delta_max):
        """All pole offsets <= delta_max with their singular atom lists."""
        found = {}
        for idx, kind, shift, step in self._classes:
            k = 0
            while shift + k * step <= delta_max:
                found.setdefault(shift + k * step, []).append((idx, k))
                k += 1
        return sorted(found.items())

    # -- table construction -------------------------------------------------

    def extend(self, delta_max):
        if self.poles and self.poles[-1][0] >= delta_max:
            return
        with mpmath.workdps(self.build_dps):
            start = self.poles[-1][0] if self.poles else None
            for delta, singular in self._offsets_up_to(delta_max):
                if start is not None and delta <= start:
                    continue
                self._append_pole(delta, singular)
        self._hull = None

    def _append_pole(self, delta, singular):
        s = self.s_hp
        singular_idx = {idx for idx, _ in singular}
        # pole of 1/w merges in exactly when a = -s-delta = 0
        merged = (self.s_exact is not None
                  and self.s_exact[1] == 0
                  and self.s_exact[0] == -delta)
        m = len(singular) + (1 if merged else 0)
        order = m  # series terms needed: T_0..T_{m-1}
        # scalar prefactor and log-series of the gamma product at the pole
        prefactor = mpmath.mpc(1)
        logs = [mpmath.mpc(0)] * order
        for idx, k in singular:
            kind, shift = self.atoms[idx]
            sigma = mpmath.mpf(1) if kind == "C" else mpmath.mpf(0.5)
            # Gamma(sigma*eps - k) = (-1)^k/k! * 1/(sigma eps) * exp(series in sigma*eps)
            prefactor *= (-1) ** k / (mpmath.factorial(k) * sigma)
            if order > 1:
                harm = [mpmath.mpf(0)] * order
                for i in range(1, k + 1):
                    base = mpmath.mpf(1) / i
                    p = base
                    for r in range(1, order):
                        harm[r] += p
                        p *= base
                sp = sigma
                for r in range(1, order):
                    c = harm[r] / r
                    if r == 1:
                        c += -mpmath.euler
                    else:
                        c += (-1) ** r * mpmath.zeta(r) / r
                    logs[r] += c * sp
                    sp *= sigma
        for idx, (kind, shift) in enumerate(self.atoms):
            if idx in singular_idx:
                continue
            sigma = mpmath.mpf(1) if kind == "C" else mpmath.mpf(0.5)
            sh = mpmath.mpf(shift.numerator) / shift.denominator
            z0 = sigma * (sh - (mpmath.mpf(delta.numerator) / delta.denominator))
            prefactor *= mpmath.gamma(z0)
            if order > 1:
                sp = sigma
                fact = mpmath.mpf(1)
                for r in range(1, order):
                    fact *= r
                    logs[r] += mpmath.psi(r - 1, z0) * sp / fact if r > 1 else mpmath.psi(0, z0) * sp
                    sp *= sigma
        series = _series_exp(logs, order) if order > 1 else [mpmath.mpc(1)]
        # the 1/w factor
        a = -s - (mpmath.mpf(delta.numerator) / delta.denominator)
        if merged:
            pass  # contributes the extra 1/eps, series part is 1
        else:
            prefactor /= a
            if order > 1:
                inv = [mpmath.mpc(1)]
                for i in range(1, order):
                    inv.append(inv[-1] * (-1) / a)
                series = _series_mul(series, inv, order)
        # residue: u^(s+delta) * sum_j c_j (ln u)^j with
        # c_j = prefactor * series[m-1-j] * (-1)^j / j!
        coeffs = []
        factj = mpmath.mpf(1)
        for j in range(m):
            if j > 1:
                factj *= j
            elif j == 1:
                factj = mpmath.mpf(1)
            c = prefactor * series[m - 1 - j] * ((-1) ** j) / factj
            coeffs.append(c)
        self.poles.append((delta, coeffs))
        mag = max(abs(c) for c in coeffs)
        self._pole_logmag.append(
            float(mpmath.log10(mag)) if mag > 0 else -1e9)

    # -- magnitude envelope ---------------------------------------------------

    def _envelope(self):
        """Upper hull of log10 |term|(u) = logmag + (Re s + delta) log10 u."""
        if self._hull is None:
            re_s = float(mpmath.re(self.s_val))
            lines = [(re_s + float(d), lm)
                     for (d, _), lm in zip(self.poles, self._pole_logmag)]
            lines.sort()
            hull = []
            for slope, intercept in lines:
                while hull:
                    s0, i0 = hull[-1]
                    if s0 == slope:
                        if intercept <= i0:
                            break
                        hull.pop()
                        continue
                    if len(hull) >= 2:
                        s1, i1 = hull[-2]
                        # drop middle line if it never dominates
                        x_prev = (i0 - i1) / (s1 - s0)
                        x_new = (intercept - i0) / (s0 - slope)
                        if x_new <= x_prev:
                            hull.pop()
                            continue
                    break
                if not hull or hull[-1][0] != slope:
                    hull.append((slope, intercept))
            self._hull = hull
        return self._hull

    def max_term_log10(self, u):
        lu = math.log10(u) if u > 0 else -300.0
        best = -1e9
        for slope, intercept in self._envelope():
            val = intercept + slope * lu
            if val > best:
                best = val
        g = abs(self.g_value)
        g_log = float(mpmath.log10(g)) if g > 0 else -1e9
        return max(best, g_log)

    # -- evaluation ------------------------------------------------------------

    def ensure_for(self, u_max, abs_tol_log10):
        """Extend poles until the tail at u_max is below the absolute target."""
        delta = self.poles[-1][0] + 1 if self.poles else Fraction(0)
        lu = math.log10(u_max) if u_max > 0 else -300.0
        re_s = float(mpmath.re(self.s_val))
        chunk = Fraction(16)
        guard = 0
        while True:
            self.extend((self.poles[-1][0] if self.poles else Fraction(0)) + chunk)
            # check the last few pole magnitudes at u_max
            tail = [lm + (re_s + float(d)) * lu
                    for (d, _), lm in zip(self.poles[-12:], self._pole_logmag[-12:])]
            if tail and max(tail) < abs_tol_log10 - 8:
                return
            guard += 1
            if guard > 600:
                raise KernelPrecisionError(
                    f"kernel series did not converge below 1e{abs_tol_log10:+d} "
                    f"at u={u_max}")

    def eval(self, u, abs_tol_log10):
        """H_s(u) with absolute error below roughly 10^abs_tol_log10."""
        need_dps = self.base_dps + 12 + max(
            0, int(self.max_term_log10(u) - abs_tol_log10))
        if need_dps > self.build_dps - 8:
            self.build_dps = need_dps + 24
            old = self.poles
            self.poles, self._pole_logmag = [], []
            with mpmath.workdps(self.build_dps):
                self.s_hp = mpmath.mpc(self.s_val)
                self.g_value = self._gamma_product(self.s_hp)
            self.extend(old[-1][0] if old else Fraction(0))
            self._hull = None
        with mpmath.workprec(int(need_dps * 3.3322) + 8):
            uu = mpmath.mpf(u)
            lu = mpmath.log(uu)
            acc = mpmath.mpc(self.g_value)
            u_s = mpmath.power(uu, self.s_hp)
            step_powers = {}
            cur_delta = None
            cur_pow = None
            tol = mpmath.mpf(10) ** (abs_tol_log10 - 6)
            small_run = 0
            max_abs = mpmath.mpf(0)
            max_idx = 0
            for idx, (delta, coeffs) in enumerate(self.poles):
                if cur_delta is None:
                    cur_pow = u_s * mpmath.power(uu, mpmath.mpf(delta.numerator)
                                                 / delta.denominator)
                else:
                    step = delta - cur_delta
                    sp = step_powers.get(step)
                    if sp is None:
                        sp = mpmath.power(uu, mpmath.mpf(step.numerator)
                                          / step.denominator)
                        step_powers[step] = sp
                    cur_pow = cur_pow * sp
                cur_delta = delta
                if len(coeffs) == 1:
                    term = cur_pow * coeffs[0]
                else:
                    poly = mpmath.mpc(0)
                    for c in reversed(coeffs):
                        poly = poly * lu + c
                    term = cur_pow * poly
                acc += term
                a = abs(term)
                if a > max_abs:
                    max_abs = a
                    max_idx = idx
                if a < tol:
                    small_run += 1
                    if small_run >= 10 and idx > max_idx + 10:
                        break
                else:
                    small_run = 0
            return acc

    def cutoff_u(self, abs_tol_log10, u_hint=1.0):
        """Smallest u (by doubling + bisection) with |H| below the target."""
        lo, hi = None, None
        u = max(u_hint, 1e-3)
        for _ in range(200):
            self.ensure_for(u, abs_tol_log10)
            if abs(self.eval(u, abs_tol_log10)) < mpmath.mpf(10) ** abs_tol_log10:
                hi = u
                break
            lo = u
            u *= 2
        if hi is None:
            raise KernelPrecisionError("no kernel cutoff found")
        if lo is None:
            return hi
        for _ in range(20):
            mid = math.sqrt(lo * hi)
            if abs(self.eval(mid, abs_tol_log10)) < mpmath.mpf(10) ** abs_tol_log10:
                hi = mid
            else:
                lo = mid
        return hi


_TABLE_CACHE = {}


def kernel_table(atoms, s, base_dps):
    s_val, s_exact = _parse_s(s)
    if s_exact is not None:
        skey = ("exact", s_exact)
    else:
        skey = ("num", mpmath.nstr(s_val, 25))
    key = (atoms_canonical(atoms), skey, base_dps)
    tab = _TABLE_CACHE.get(key)
    if tab is None:
        if len(_TABLE_CACHE) > 64:
            _TABLE_CACHE.clear()
        tab = KernelTable(atoms, s if s_exact is None else s_exact, base_dps)
        _TABLE_CACHE[key] = tab
    return tab


def mellin_kernel(gamma_atoms, t, s, precision):
    """Value of the smoothing kernel H_s(t) by the residue series.

    The absolute error target is 10^(-precision-5) relative to the scale of
    the gamma product at s.
    """
    tab = kernel_table(gamma_atoms, s, precision)
    g = abs(tab.gamma_value())
    scale = float(mpmath.log10(g)) if g > 0 else 0.0
    target = -(precision + 5) + min(0.0, scale)
    tab.ensure_for(float(t), target)
    return tab.eval(float(t), target)


def mellin_kernel_quadrature(gamma_atoms, t, s, precision=20):
    """Slow oracle: direct numerical Mellin-Barnes contour integration."""
    atoms = atoms_canonical(gamma_atoms)
    s_val, _ = _parse_s(s)
    with mpmath.workdps(precision + 15):
        c = mpmath.mpf(1)
        for kind, shift in atoms:
            sh = mpmath.mpf(shift.numerator) / shift.denominator
            c = max(c, 1 - mpmath.re(s_val) - sh)
        c = c + mpmath.mpf(1)
        d = atoms_degree(atoms)
        rate = mpmath.pi * d / 4
        T = (precision + 12) * mpmath.log(10) / rate + 8

        def integrand(tau):
            w = c + mpmath.mpc(0, 1) * tau
            acc = mpmath.mpc(1)
            for kind, shift in atoms:
                sh = mpmath.mpf(shift.numerator) / shift.denominator
                z = s_val + w + sh
                acc *= mpmath.gamma(z if kind == "C" else z / 2)
            return acc * mpmath.power(mpmath.mpf(t), -w) / w

        val = mpmath.quad(integrand, [-T, 0, T], maxdegree=10)
        return val / (2 * mpmath.pi)


def kernel_crossover_check(gamma_atoms, s, t_values, precision=16):
    """Series vs quadrature across a t band; raises on disagreement."""
    worst = mpmath.mpf(0)
    for t in t_values:
        a = mellin_kernel(gamma_atoms, t, s, precision + 10)
        b = mellin_kernel_quadrature(gamma_atoms, t, s, precision)
        scale = max(abs(a), abs(b), mpmath.mpf(1) ** 1)
        diff = abs(a - b) / max(scale, mpmath.mpf(10) ** (-precision))
        worst = max(worst, diff)
    if worst > mpmath.mpf(10) ** (-precision + 6):
        raise KernelPrecisionError(
            f"kernel regimes disagree at relative level {mpmath.nstr(worst, 5)}; "
            "escalate precision")
    return worst


# ---------------------------------------------------------------------------
# the L-function spec


@dataclass
class LFunctionSpec:
    degree: int
    motivic_weight: int
    conductor: int
    gamma_atoms: tuple
    coefficients: list              # index 0 unused; mpc, unitary normalization
    terms: int
    precision: int
    self_dual: bool
    root_number: object = None
    conductor_heuristic: int = 1
    conductor_solved: bool = False
    omitted_primes: tuple = ()
    poles: tuple = ()               # (location Fraction, residue mpc) of Lambda
    provenance: str = ""
    newform: object = None
    sym_power: int = 0
    twist: object = None

    def __repr__(self):
        return (f"LFunctionSpec(d={self.degree}, q={self.conductor}, "
                f"w={self.motivic_weight}, M={self.terms}, {self.provenance!r})")

    @property
    def n_r(self):
        return sum(1 for kind, _ in self.gamma_atoms if kind == "R")

    @property
    def n_c(self):
        return sum(1 for kind, _ in self.gamma_atoms if kind == "C")

    def argument_scale(self, conductor=None):
        """B with u_n = n * B in the incomplete-Mellin sums."""
        q = self.conductor if conductor is None else conductor
        with mpmath.workdps(self.precision + 15):
            return (mpmath.power(mpmath.pi, mpmath.mpf(self.n_r) / 2)
                    * mpmath.power(2 * mpmath.pi, self.n_c) / mpmath.sqrt(q))

    def front_factor(self, s_val, conductor=None):
        q = self.conductor if conductor is None else conductor
        sum_e = sum(shift for kind, shift in self.gamma_atoms if kind == "R")
        sum_nu = sum(shift for kind, shift in self.gamma_atoms if kind == "C")
        se = mpmath.mpf(Fraction(sum_e).numerator) / Fraction(sum_e).denominator
        sn = mpmath.mpf(Fraction(sum_nu).numerator) / Fraction(sum_nu).denominator
        return (mpmath.power(q, s_val / 2)
                * mpmath.power(mpmath.pi, -(self.n_r * s_val + se) / 2)
                * (2 ** self.n_c)
                * mpmath.power(2 * mpmath.pi, -(self.n_c * s_val + sn)))

    def coefficient(self, n, dual=False):
        b = self.coefficients[n]
        return mpmath.conj(b) if dual and not self.self_dual else b

    def classical_shift(self):
        return Fraction(self.motivic_weight, 2)


def _divisor_count_bound(r_plus_1, n_max):
    """d_{r+1}(n) for n <= n_max (coefficient bound from Ramanujan)."""
    out = [1] * (n_max + 1)
    spf = _smallest_prime_factors(n_max)
    for n in range(2, n_max + 1):
        p = spf[n]
        a = 0
        m = n
        while m % p == 0:
            m //= p
            a += 1
        out[n] = out[m] * math.comb(a + r_plus_1 - 1, r_plus_1 - 1)
    return out


def build_lfunction(nf: Newform, r: int, xi: DirichletCharacter = None,
                    terms: int = None, precision: int = 50,
                    assume_functoriality: bool = False,
                    omit_primes=()) -> LFunctionSpec:
    """Assemble the analytic-normalization spec of the twisted symmetric power.

    Coefficients come from the exact Euler product over good primes; primes
    dividing the level or in ``omit_primes`` contribute factor 1 and are
    recorded.  Primes dividing the twist conductor are genuinely killed by
    the ramified twist (local factor 1), not an omission.
    """
    if r < 0:
        raise ValueError("r must be >= 0")
    if r >= 5 and not assume_functoriality:
        raise FunctorialityFlagError(
            f"Sym^{r} is conditional on functoriality for r >= 5; "
            "pass assume_functoriality=True to proceed")
    if xi is None:
        xi = trivial_character(1)
    xi0 = primitivize(xi)
    cond_xi = xi0.modulus
    k = nf.weight
    w = r * (k - 1)
    # archimedean data
    from .archimedean import gamma_shifts, sym_arch_parameter

    sign_twist = 0 if xi0.parity == 1 else 1
    atoms = gamma_shifts(sym_arch_parameter(k, r, 0, sign_twist))
    degree = atoms_degree(atoms)
    # heuristic conductor bound; exact c^(r+1) at level one
    q_heur = (cond_xi ** (r + 1)) * (nf.level ** (r + 1))
    q0 = cond_xi ** (r + 1) if nf.level == 1 else q_heur
    if terms is None:
        terms = _auto_terms(atoms, q0, precision)
    dps = precision + 15
    coeffs = [None] + [mpmath.mpc(0)] * terms
    coeffs[1] = mpmath.mpc(1)
    omitted = []
    with mpmath.workdps(dps):
        half_w = mpmath.mpf(w) / 2
        spf = _smallest_prime_factors(terms)
        for p in primes_up_to(terms):
            if nf.level % p == 0 or p in omit_primes:
                omitted.append(p)
                continue
            if cond_xi % p == 0:
                continue  # ramified twist kills the factor exactly
            sd = satake(nf, p, dps)
            tv = _twist_value_exact(nf, xi0, p)
            factor = sym_euler_factor(sd, r, tv)
            poly = [c.embed(dps, nf.embedding_index)
                    if hasattr(c, "embed") else mpmath.mpf(Fraction(c).numerator) / Fraction(c).denominator
                    for c in factor.coefficients]
            # unitary normalization: X -> X / p^(w/2)
            scale = mpmath.power(p, -half_w)
            sc = mpmath.mpc(1)
            for j in range(1, len(poly)):
                sc *= scale
                poly[j] *= sc
            # inverse power series gives b_{p^i}
            pmax = 0
            pe = p
            while pe <= terms:
                pmax += 1
                pe *= p
            inv = [mpmath.mpc(1)]
            for i in range(1, pmax + 1):
                acc = mpmath.mpc(0)
                for j in range(1, min(i, len(poly) - 1) + 1):
                    acc -= poly[j] * inv[i - j]
                inv.append(acc)
            pe = p
            for i in range(1, pmax + 1):
                coeffs[pe] = inv[i]
                pe *= p
        # multiplicative assembly
        for n in range(2, terms + 1):
            p = spf[n]
            pe = p
            while (n // pe) % p == 0:
                pe *= p
            m = n // pe
            if m > 1:
                coeffs[n] = coeffs[pe] * coeffs[m]
        # Ramanujan-type bound check
        bound = _divisor_count_bound(r + 1, terms)
        for n in range(1, terms + 1):
            if abs(coeffs[n]) > bound[n] + mpmath.mpf("1e-6"):
                raise CoefficientBoundError(
                    f"|b_{n}| = {mpmath.nstr(abs(coeffs[n]), 8)} exceeds "
                    f"d_{r + 1}({n}) = {bound[n]}")
        imag_max = max(abs(mpmath.im(coeffs[n])) for n in range(1, terms + 1))
        self_dual = imag_max < mpmath.mpf(10) ** (-(precision - 2))
    poles = ()
    if r == 0 and cond_xi == 1:
        # the shifted-zeta case; adjust residues by omitted local factors
        with mpmath.workdps(dps):
            res1 = mpmath.mpf(1)
            res0 = mpmath.mpf(-1)
            for p in omitted:
                res1 *= (1 - mpmath.mpf(1) / p)
                res0 *= (1 - mpmath.mpf(1))
        poles = ((Fraction(1), res1), (Fraction(0), res0))
    prov = (f"L(s, Sym^{r} {nf.label}, xi={xi0.label}) in the unitary "
            f"normalization; classical shift {w}/2; a_1-normalized eigenform")
    return LFunctionSpec(
        degree=degree, motivic_weight=w, conductor=q0, gamma_atoms=atoms,
        coefficients=coeffs, terms=terms, precision=precision,
        self_dual=self_dual, conductor_heuristic=q_heur,
        omitted_primes=tuple(omitted), poles=poles, provenance=prov,
        newform=nf, sym_power=r, twist=xi0)


def _twist_value_exact(nf, xi0, p):
    ve = xi0.value_exponent(p)
    if ve is None:
        return 0
    order, e = ve
    if order == 1:
        return 1
    if order == 2:
        return 1 if e == 0 else -1
    return CycloElement.root_of_unity(nf.coeff_field, order, e)


def _auto_terms(atoms, q, precision):
    tab = kernel_table(atoms, Fraction(3, 2), precision)
    g = abs(tab.gamma_value())
    target = -(precision + 12) + float(mpmath.log10(max(g, mpmath.mpf(1))))
    u_star = tab.cutoff_u(target)
    with mpmath.workdps(20):
        n_r = sum(1 for kind, _ in atoms if kind == "R")
        n_c = sum(1 for kind, _ in atoms if kind == "C")
        B = (mpmath.power(mpmath.pi, mpmath.mpf(n_r) / 2)
             * mpmath.power(2 * mpmath.pi, n_c) / mpmath.sqrt(q))
        return max(16, int(mpmath.ceil(u_star / B * mpmath.mpf("1.3"))) + 8)


# ---------------------------------------------------------------------------
# evaluation


@dataclass
class EvaluationResult:
    s: object
    completed: object
    finite: object
    certified_digits: float
    residual_scaling: object
    residual_doubling: object
    terms_used: int
    precision: int

    def to_json(self):
        return {
            "s": mpmath.nstr(self.s, self.precision),
            "value_re": mpmath.nstr(mpmath.re(self.finite), self.precision),
            "value_im": mpmath.nstr(mpmath.im(self.finite), self.precision),
            "completed_re": mpmath.nstr(mpmath.re(self.completed), self.precision),
            "completed_im": mpmath.nstr(mpmath.im(self.completed), self.precision),
            "certified_digits": round(self.certified_digits, 2),
            "residuals": {
                "scaling": mpmath.nstr(self.residual_scaling, 5),
                "doubling": mpmath.nstr(self.residual_doubling, 5),
            },
            "terms": self.terms_used,
            "precision": self.precision,
        }


def _pole_terms(spec, s_val, A):
    if not spec.poles:
        return mpmath.mpc(0)
    acc = mpmath.mpc(0)
    for loc, res in spec.poles:
        z0 = mpmath.mpf(loc.numerator) / loc.denominator
        acc += res * mpmath.power(A, z0 - s_val) / (z0 - s_val)
    return acc


def _half_sum(spec, s, table, conductor, A, dual, abs_target_log10, terms_cap=None):
    """sum_n b_n n^(-s) H_s(u_n / A); returns (full sum, half-terms sum)."""
    B = spec.argument_scale(conductor)
    s_val, _ = _parse_s(s)
    M = spec.terms if terms_cap is None else min(spec.terms, terms_cap)
    table.ensure_for(float(B * M / A), abs_target_log10)
    acc = mpmath.mpc(0)
    acc_half = None
    with mpmath.workdps(spec.precision + 18):
        for n in range(1, M + 1):
            b = spec.coefficient(n, dual)
            if b == 0:
                if n == M // 2:
                    acc_half = +acc
                continue
            u = float(B * n / A)
            h = table.eval(u, abs_target_log10)
            acc += b * mpmath.power(n, -s_val) * h
            if n == M // 2:
                acc_half = +acc
    return acc, (acc_half if acc_half is not None else acc)


def lambda_value(spec, s, A=1.0, conductor=None, terms_cap=None,
                 base_dps=None, return_halves=False):
    """Completed value via the scaled incomplete-Mellin identity."""
    if spec.root_number is None:
        raise RootNumberError("root number not determined; run solve_root_number")
    q = spec.conductor if conductor is None else conductor
    dps = spec.precision if base_dps is None else base_dps
    s_val, s_exact = _parse_s(s)
    one_minus_val, one_minus_exact = _one_minus(s_val, s_exact)
    tab_s = kernel_table(spec.gamma_atoms, s if s_exact is None else s_exact, dps)
    tab_d = kernel_table(spec.gamma_atoms,
                         one_minus_val if one_minus_exact is None else one_minus_exact,
                         dps)
    g_scale = max(abs(tab_s.gamma_value()), abs(tab_d.gamma_value()), mpmath.mpf(1))
    target = -(dps + 8 + int(math.log10(max(spec.terms, 2)))) + float(mpmath.log10(g_scale))
    with mpmath.workdps(dps + 18):
        S1, S1h = _half_sum(spec, s if s_exact is None else s_exact,
                            tab_s, q, mpmath.mpf(A), False, target, terms_cap)
        S2, S2h = _half_sum(spec,
                            one_minus_val if one_minus_exact is None else one_minus_exact,
                            tab_d, q, 1 / mpmath.mpf(A), True, target, terms_cap)
        f1 = spec.front_factor(s_val, q)
        f2 = spec.front_factor(one_minus_val, q)
        eps = spec.root_number
        lam = f1 * S1 + eps * f2 * S2 - _pole_terms(spec, s_val, mpmath.mpf(A))
        lam_half = f1 * S1h + eps * f2 * S2h - _pole_terms(spec, s_val, mpmath.mpf(A))
    if return_halves:
        return lam, lam_half
    return lam


def evaluate(spec: LFunctionSpec, s, precision: int = None,
             certify: bool = True) -> EvaluationResult:
    """Finite-part and completed values with a posteriori certification.

    Evaluates the identity at scalings A = 1 and A = 1.17; their agreement is
    the functional-equation consistency residual, and the first/half-term
    comparison is the doubling residual.  Raises when the requested point
    sits on a gamma pole or the coefficient supply is insufficient.
    """
    precision = precision or spec.precision
    s_val, s_exact = _parse_s(s)
    if s_exact is not None and s_exact[1] == 0:
        from .archimedean import gamma_atom_poles
        if gamma_atom_poles(spec.gamma_atoms, s_exact[0]):
            raise GammaPoleError(
                f"s={s_exact[0]} is a pole of the assembled gamma factor; "
                "the completed function is reported through its neighbors")
        if spec.poles and any(loc == s_exact[0] for loc, _ in spec.poles):
            raise GammaPoleError(f"s={s_exact[0]} is a pole of the L-function")
    # term sufficiency: the kernel cutoff at this precision
    tab = kernel_table(spec.gamma_atoms, s if s_exact is None else s_exact, precision)
    g_scale = max(abs(tab.gamma_value()), mpmath.mpf(1))
    target = -(precision + 8) + float(mpmath.log10(g_scale))
    u_star = tab.cutoff_u(target, u_hint=float(spec.argument_scale()))
    required = int(mpmath.ceil(u_star / spec.argument_scale() * mpmath.mpf("1.05")))
    if required > spec.terms:
        raise InsufficientTermsError(required, spec.terms)
    lam, lam_half = lambda_value(spec, s, 1.0, base_dps=precision,
                                 return_halves=True)
    if certify:
        lam_b = lambda_value(spec, s, 1.17, base_dps=precision)
    else:
        lam_b = lam
    with mpmath.workdps(precision + 10):
        scale = max(abs(lam), mpmath.mpf(10) ** (-precision))
        resid_scaling = abs(lam - lam_b) / scale
        resid_doubling = abs(lam - lam_half) / scale
        certified = float(-mpmath.log10(max(resid_scaling,
                                            mpmath.mpf(10) ** (-precision - 5))))
        front = spec.front_factor(s_val)
        gval = tab.gamma_value()
        finite = lam / (front * gval)
    return EvaluationResult(s_val, lam, finite, certified, resid_scaling,
                            resid_doubling, spec.terms, precision)


def evaluate_classical(spec, s_classical, precision=None, **kw):
    """Evaluate at a classical point (shifted by the motivic normalization)."""
    shift = spec.classical_shift()
    if isinstance(s_classical, (int, Fraction)):
        return evaluate(spec, Fraction(s_classical) - shift, precision, **kw)
    return evaluate(spec, mpmath.mpmathify(s_classical)
                    - mpmath.mpf(shift.numerator) / shift.denominator,
                    precision, **kw)


def dirichlet_series_value(spec, s, n_terms=None):
    """Direct-series oracle, valid in the absolute-convergence region."""
    n_terms = n_terms or spec.terms
    s_val, _ = _parse_s(s)
    with mpmath.workdps(spec.precision + 10):
        acc = mpmath.mpc(0)
        for n in range(1, min(n_terms, spec.terms) + 1):
            b = spec.coefficients[n]
            if b != 0:
                acc += b * mpmath.power(n, -s_val)
        return acc


# ---------------------------------------------------------------------------
# root number and effective conductor


def _probe_points(seed, count):
    import random

    rng = random.Random(seed)
    out = []
    for _ in range(count):
        re = Fraction(1, 2) + Fraction(rng.randint(200, 900), 1000)
        im = Fraction(rng.randint(300, 1100), 1000)
        out.append((re, im))
    return out


def solve_root_number(spec: LFunctionSpec, precision: int = None,
                      probes: int = 4, seed: int = 12345):
    """Numerically solve for (root number, effective conductor).

    Stage 1 scans divisors of the heuristic conductor bound at low precision
    using the scaling-variation identity; stage 2 re-solves and certifies the
    winner at full precision.  Self-dual specs get their sign snapped to +-1
    after a closeness check.  Returns (eps, conductor, diagnostics).
    """
    precision = precision or spec.precision
    cands = [d for d in _divisors(spec.conductor_heuristic)]
    if len(cands) > 240:
        # fall back to the (twist conductor, level) power grid
        r1 = spec.sym_power + 1
        c_xi = spec.twist.conductor if spec.twist is not None else 1
        n_lvl = spec.newform.level if spec.newform is not None else 1
        grid = {(c_xi ** a) * (n_lvl ** b)
                for a in range(r1 + 1) for b in range(r1 + 1)}
        cands = sorted(grid | {spec.conductor, 1})
    points = _probe_points(seed, max(probes, 3))
    diag = []
    stage1 = []
    low_dps = 16
    for q in cands:
        try:
            eps, resid = _solve_at(spec, q, points, low_dps)
        except (ZeroDivisionError, KernelPrecisionError):
            continue
        stage1.append((float(resid), q, eps))
        diag.append({"q": q, "residual": float(resid),
                     "abs_eps_minus_1": float(abs(abs(eps) - 1))})
    stage1.sort()
    stage1 = [row for row in stage1 if abs(abs(row[2]) - 1) < 1e-4]
    if not stage1 or stage1[0][0] > 1e-8:
        raise RootNumberError(
            "no consistent (eps, conductor) within tolerance; residual "
            f"landscape: {sorted(diag, key=lambda r: r['residual'])[:6]}")
    q_eff = stage1[0][1]
    eps, resid = _solve_at(spec, q_eff, points, precision)
    with mpmath.workdps(precision + 10):
        if abs(abs(eps) - 1) > mpmath.mpf(10) ** (-(precision - 8)):
            raise RootNumberError(
                f"|eps| = {mpmath.nstr(abs(eps), 10)} is not 1 within tolerance")
        if spec.self_dual:
            snapped = mpmath.mpf(1) if mpmath.re(eps) > 0 else mpmath.mpf(-1)
            if abs(eps - snapped) > mpmath.mpf(10) ** (-(precision - 10)):
                raise RootNumberError(
                    f"self-dual spec but eps = {mpmath.nstr(eps, 10)} is not +-1")
            eps = snapped
    spec.root_number = eps
    spec.conductor = q_eff
    spec.conductor_solved = True
    return eps, q_eff, {"stage1": diag, "residual": float(resid)}


def _is_power_like(d):
    if d == 1:
        return True
    from .characters import factorize

    exps = [e for _, e in factorize(d)]
    return len({e for e in exps}) == 1


def _solve_at(spec, q, points, dps):
    """Root number by scaling variation at the first probe; residual at the rest."""
    A1, A2 = mpmath.mpf("1.0"), mpmath.mpf("1.31")
    saved = spec.root_number
    spec.root_number = mpmath.mpf(1)  # placeholder so lambda_value runs
    try:
        cap = None if dps >= spec.precision else _stage_terms(spec, q, dps)
        parts = []
        for pt in points:
            p1 = _lambda_parts(spec, pt, A1, q, dps, cap)
            p2 = _lambda_parts(spec, pt, A2, q, dps, cap)
            parts.append((p1, p2))
        (i1a, i2a, pa), (i1b, i2b, pb) = parts[0]
        denom = i2b - i2a
        if abs(denom) < mpmath.mpf(10) ** (-dps):
            raise ZeroDivisionError("degenerate probe for the eps solve")
        eps = (i1a - i1b - pa + pb) / denom
        resid = mpmath.mpf(0)
        for (j1a, j2a, qa), (j1b, j2b, qb) in parts[1:]:
            lamA = j1a + eps * j2a - qa
            lamB = j1b + eps * j2b - qb
            resid = max(resid, abs(lamA - lamB) / max(abs(lamA), mpmath.mpf(1)))
        return eps, resid
    finally:
        spec.root_number = saved


def _stage_terms(spec, q, dps):
    tab = kernel_table(spec.gamma_atoms, Fraction(1, 2), dps)
    g = abs(tab.gamma_value())
    target = -(dps + 6) + float(mpmath.log10(max(g, mpmath.mpf(1))))
    u_star = tab.cutoff_u(target)
    B = spec.argument_scale(q)
    return max(8, int(mpmath.ceil(u_star / B * mpmath.mpf("1.2"))))


def _lambda_parts(spec, s, A, q, dps, cap):
    """(front(s) S1_A, front(1-s) S2_{1/A}, pole terms) at one probe."""
    s_val, s_exact = _parse_s(s)
    one_minus_val, one_minus_exact = _one_minus(s_val, s_exact)
    tab_s = kernel_table(spec.gamma_atoms, s if s_exact is None else s_exact, dps)
    tab_d = kernel_table(spec.gamma_atoms,
                         one_minus_val if one_minus_exact is None else one_minus_exact, dps)
    g_scale = max(abs(tab_s.gamma_value()), abs(tab_d.gamma_value()), mpmath.mpf(1))
    target = -(dps + 6) + float(mpmath.log10(g_scale))
    with mpmath.workdps(dps + 12):
        S1, _ = _half_sum(spec, s if s_exact is None else s_exact, tab_s, q,
                          mpmath.mpf(A), False, target, cap)
        S2, _ = _half_sum(spec,
                          one_minus_val if one_minus_exact is None else one_minus_exact,
                          tab_d, q, 1 / mpmath.mpf(A), True, target, cap)
        return (spec.front_factor(s_val, q) * S1,
                spec.front_factor(one_minus_val, q) * S2,
                _pole_terms(spec, s_val, mpmath.mpf(A)))
