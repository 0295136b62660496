"""Archimedean parameters of symmetric powers: gamma factors and critical sets.

A parameter is a multiset of Weil-group summands: two-dimensional inductions
I(chi_b) (the character z -> (z/|z|)^b of C^*) and one-dimensional sign
characters.  The gamma dictionary is the standard one in the unitary
normalization,

    I(chi_b)  ->  Gamma_C(s + b/2),      sign^e  ->  Gamma_R(s + e),

with Gamma_R(s) = pi^(-s/2) Gamma(s/2) and Gamma_C(s) = 2 (2 pi)^(-s) Gamma(s).
Norm twists ||.||^h shift every atom by h.  Critical-set enumeration is done
both from the tabulated lists and from first principles (gamma poles of the
pair and its dual), and the two are compared, never reconciled silently.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction


class UnsupportedWeightError(ValueError):
    """Weight below the k >= 4 (even case) or k >= 3 (odd case) assumption."""


class InterlacingError(ValueError):
    """The dominance/interlacing condition mu^vee > lambda fails."""


# ---------------------------------------------------------------------------
# parameters


@dataclass(frozen=True)
class ArchParameter:
    """Summands ("I", b) or ("eps", e), plus a rational norm-twist shift."""

    summands: tuple
    norm_shift: Fraction = Fraction(0)

    @property
    def total_degree(self):
        return sum(2 if kind == "I" else 1 for kind, _ in self.summands)

    def induced_indices(self):
        return tuple(b for kind, b in self.summands if kind == "I")

    def check(self):
        bs = self.induced_indices()
        if len(set(bs)) != len(bs) or any(b <= 0 for b in bs):
            raise ValueError(f"irregular parameter: induced indices {bs}")
        return self


def sym_arch_parameter(k: int, r: int, norm_shift=0, sign_twist: int = 0) -> ArchParameter:
    """Parameter of Sym^r of the weight-k discrete series, twisted.

    Even r:  sign^(r(k-1)/2 + sign_twist)  +  sum_{a=1..r/2} I(chi_{2a(k-1)}).
    Odd r:   sum_{a=1..(r+1)/2} I(chi_{(2a-1)(k-1)}), the unique regular
    parameter consistent with Sym^r of I(chi_{k-1}); sign_twist is absorbed
    (twisting an induction by the sign character leaves it unchanged).
    """
    if r < 0:
        raise ValueError("r must be >= 0")
    summands = []
    if r % 2 == 0:
        parity = (r * (k - 1) // 2 + sign_twist) % 2
        summands.append(("eps", parity))
        for a in range(1, r // 2 + 1):
            summands.append(("I", 2 * a * (k - 1)))
    else:
        for a in range(1, (r + 1) // 2 + 1):
            summands.append(("I", (2 * a - 1) * (k - 1)))
    return ArchParameter(tuple(summands), Fraction(norm_shift)).check()


def tensor_arch(p1: ArchParameter, p2: ArchParameter) -> ArchParameter:
    """Tensor product of Weil-group parameters (norm shifts add)."""
    out = []
    for kind1, v1 in p1.summands:
        for kind2, v2 in p2.summands:
            if kind1 == "I" and kind2 == "I":
                out.append(("I", v1 + v2))
                if v1 == v2:
                    # I(chi_b) (x) I(chi_b) = I(chi_2b) + 1 + sign
                    out.append(("eps", 0))
                    out.append(("eps", 1))
                else:
                    out.append(("I", abs(v1 - v2)))
            elif kind1 == "I":
                out.append(("I", v1))
            elif kind2 == "I":
                out.append(("I", v2))
            else:
                out.append(("eps", (v1 + v2) % 2))
    return ArchParameter(tuple(out), p1.norm_shift + p2.norm_shift)


def dual_arch(p: ArchParameter) -> ArchParameter:
    """The contragredient: inductions and signs are self-dual, shifts negate."""
    return ArchParameter(p.summands, -p.norm_shift)


def gamma_shifts(p: ArchParameter):
    """Gamma atoms ("C", shift) / ("R", shift) for the parameter's L-factor."""
    atoms = []
    for kind, v in p.summands:
        if kind == "I":
            atoms.append(("C", Fraction(v, 2) + p.norm_shift))
        else:
            atoms.append(("R", Fraction(v) + p.norm_shift))
    return tuple(atoms)


def atoms_degree(atoms):
    return sum(2 if kind == "C" else 1 for kind, _ in atoms)


def gamma_atom_poles(atoms, s):
    """True if some atom's gamma factor has a pole at s (s rational)."""
    s = Fraction(s)
    for kind, shift in atoms:
        z = s + shift
        if kind == "C":
            # Gamma(s + shift): poles at nonpositive integers
            if z.denominator == 1 and z <= 0:
                return True
        else:
            # Gamma((s + shift)/2): poles at nonpositive even integers
            if z.denominator == 1 and z <= 0 and z % 2 == 0:
                return True
    return False


# ---------------------------------------------------------------------------
# critical sets


def critical_set_table(k: int, n: int):
    """The tabulated critical set of the (Sym^n, Sym^(n-1)) pair L-function."""
    _require_weight(k)
    if n < 1:
        raise ValueError("n must be >= 1")
    if k % 2 == 0:
        start = Fraction(1 - k, 2)
    else:
        start = Fraction(2 - k, 2)
    return [start + j for j in range(k - 1)]


def critical_set_first_principles(pair_atoms, dual_atoms, window=None,
                                  lattice_offset=None):
    """Critical points from gamma-pole enumeration within the scan window.

    s is critical when no atom of the pair gamma has a pole at s and no atom
    of the dual gamma has a pole at 1 - s.  The scan runs over the motivic
    lattice (d-1)/2 + Z inferred from the pair degree unless an explicit
    offset is given.
    """
    import math

    if not pair_atoms or not dual_atoms:
        raise ValueError("empty gamma data")
    if lattice_offset is None:
        lattice_offset = Fraction(atoms_degree(pair_atoms) - 1, 2) % 1
    if window is None:
        spread = max(abs(shift) for _, shift in tuple(pair_atoms) + tuple(dual_atoms))
        window = (-spread - 5, spread + 5)
    lo, hi = Fraction(window[0]), Fraction(window[1])
    if lo > hi:
        raise ValueError(f"empty scan window ({lo}, {hi})")
    out = []
    s = lattice_offset + math.ceil(lo - lattice_offset)
    while s <= hi:
        if not gamma_atom_poles(pair_atoms, s) and not gamma_atom_poles(dual_atoms, 1 - s):
            out.append(s)
        s += 1
    return out


def classical_critical_point(k: int, n: int) -> Fraction:
    """The distinguished critical integer m for Sym^(2n-1) at weight k."""
    _require_weight(k)
    if n < 1:
        raise ValueError("n must be >= 1")
    if k % 2 == 0:
        return Fraction((2 * n - 1) * (k - 1) + 3, 2)
    return Fraction((2 * n - 1) * (k - 1) + 2, 2)


def _require_weight(k):
    if k % 2 == 0 and k < 4:
        raise UnsupportedWeightError(
            f"k={k}: even weights must satisfy k >= 4 for the dominance condition")
    if k % 2 == 1 and k < 3:
        raise UnsupportedWeightError(
            f"k={k}: odd weights must satisfy k >= 3 for the dominance condition")


def gauss_exponent(n: int, k: int, m) -> int:
    """Predicted Gauss-sum exponent for an even twist of Sym^n at critical m.

    ceil((n+1)/2) in general; n even with m on the odd side drops to n/2.
    """
    m = Fraction(m)
    if m.denominator != 1:
        raise ValueError("m must be an integer critical point")
    if n % 2 == 1:
        return (n + 1) // 2
    return (n + 1 + (1 if int(m) % 2 == 0 else -1)) // 2


# ---------------------------------------------------------------------------
# the four-case twist recipe


def rho_weight(n: int):
    """rho_n: half the sum of positive roots of GL_n, as a weight vector."""
    return tuple(Fraction(n - 1, 2) - j for j in range(n))


@dataclass(frozen=True)
class TwistDescriptor:
    """A formal twist: optional character power times a norm power."""

    character: str = ""          # "", "theta^j", "xi"
    norm_power: Fraction = Fraction(0)

    def __str__(self):
        parts = []
        if self.character:
            parts.append(self.character)
        if self.norm_power:
            parts.append(f"||.||^{self.norm_power}")
        return " * ".join(parts) if parts else "1"


@dataclass(frozen=True)
class CriticalDatum:
    """The (k, n)-indexed bundle: twists, weights, signs, critical data."""

    k: int
    n: int
    parity_case: str
    pi_twist: TwistDescriptor
    sigma_twist: TwistDescriptor
    mu: tuple
    lam: tuple
    epsilon: int
    eta: int
    critical_set: tuple
    classical_m: Fraction

    def to_json(self):
        return {
            "k": self.k,
            "n": self.n,
            "parity_case": self.parity_case,
            "pi_twist": str(self.pi_twist),
            "sigma_twist": str(self.sigma_twist),
            "mu": [str(c) for c in self.mu],
            "lambda": [str(c) for c in self.lam],
            "epsilon": self.epsilon,
            "eta": self.eta,
            "critical_set": [str(c) for c in self.critical_set],
            "classical_m": str(self.classical_m),
        }

    def table_text(self):
        """Fixed text layout used by the CLI and golden-file tests."""
        lines = [
            f"critical data k={self.k} n={self.n} case={self.parity_case}",
            f"  pi twist     : {self.pi_twist}",
            f"  sigma twist  : {self.sigma_twist}",
            f"  mu           : ({', '.join(str(c) for c in self.mu)})",
            f"  lambda       : ({', '.join(str(c) for c in self.lam)})",
            f"  epsilon      : {'+1' if self.epsilon > 0 else '-1'}",
            f"  eta          : {'+1' if self.eta > 0 else '-1'}",
            f"  critical set : {{{', '.join(str(c) for c in self.critical_set)}}}",
            f"  classical m  : {self.classical_m}",
        ]
        return "\n".join(lines)


def _interlace_check(mu, lam):
    """mu^vee > lam componentwise; mu has one more entry than lam."""
    mu_dual = tuple(-c for c in reversed(mu))
    seq = []
    for i, l in enumerate(lam):
        seq.append((f"mu^v_{i + 1} >= lambda_{i + 1}", mu_dual[i] >= l))
        seq.append((f"lambda_{i + 1} >= mu^v_{i + 2}", l >= mu_dual[i + 1]))
    for desc, ok in seq:
        if not ok:
            raise InterlacingError(
                f"interlacing mu^vee > lambda fails at {desc} "
                f"(mu^vee={tuple(str(c) for c in mu_dual)}, "
                f"lambda={tuple(str(c) for c in lam)})")


def twist_recipe(k: int, n: int, xi_parity: int = 1, theta_parity: int = -1) -> CriticalDatum:
    """Populate the critical bundle for the (Sym^n, Sym^(n-1)) pair at weight k.

    xi is an arbitrary Dirichlet twist (its parity is all that matters here),
    theta an odd quadratic character required by the even-even case.
    Weights below the bound (k >= 4 even, k >= 3 odd) fail the interlacing
    check, which raises with the violated inequality.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if theta_parity != -1:
        raise ValueError("theta must be an odd quadratic character")
    keven = k % 2 == 0
    neven = n % 2 == 0
    shift1 = Fraction(1) if keven else Fraction(1, 2)
    if neven:
        epsilon = (-1) ** ((n * (n + 1) // 2) % 2)
        eta = -epsilon
        pi_twist = TwistDescriptor(f"theta^{n // 2}" if keven and n // 2 else "",
                                   Fraction(0))
        sigma_twist = TwistDescriptor("xi", shift1)
        mu = tuple((k - 2) * c for c in rho_weight(n + 1))
        lam = tuple((k - 2) * c + shift1 for c in rho_weight(n))
        case = f"k-{'even' if keven else 'odd'}, n-even"
    else:
        eta = (-1) ** ((n * (n - 1) // 2) % 2)
        epsilon = eta
        pi_twist = TwistDescriptor("xi", shift1)
        sigma_twist = TwistDescriptor(
            f"theta^{(n - 1) // 2}" if keven and (n - 1) // 2 else "", Fraction(0))
        mu = tuple((k - 2) * c + shift1 for c in rho_weight(n + 1))
        lam = tuple((k - 2) * c for c in rho_weight(n))
        case = f"k-{'even' if keven else 'odd'}, n-odd"
    _interlace_check(mu, lam)
    crit = critical_set_table(k, n)
    assert Fraction(1, 2) in crit
    assert epsilon == (-1) ** (n + 1) * eta  # sign recipe for the GL_(n+1) pair
    return CriticalDatum(k, n, case, pi_twist, sigma_twist, mu, lam,
                         epsilon, eta, tuple(crit), classical_critical_point(k, n))


def pair_gamma_atoms(k: int, n: int, xi_parity: int = 1):
    """Gamma atoms of the twisted pair and of its dual, per the recipe."""
    datum = twist_recipe(k, n, xi_parity)
    keven = k % 2 == 0
    neven = n % 2 == 0
    xi_eps = 0 if xi_parity == 1 else 1
    shift1 = Fraction(1) if keven else Fraction(1, 2)
    if neven:
        pi_param = sym_arch_parameter(k, n, 0, (n // 2) % 2 if keven else 0)
        sigma_param = sym_arch_parameter(k, n - 1, shift1, xi_eps)
    else:
        pi_param = sym_arch_parameter(k, n, shift1, xi_eps)
        sigma_param = sym_arch_parameter(k, n - 1, 0,
                                         ((n - 1) // 2) % 2 if keven else 0)
    pair = gamma_shifts(tensor_arch(pi_param, sigma_param))
    dual = gamma_shifts(tensor_arch(dual_arch(pi_param), dual_arch(sigma_param)))
    return datum, pair, dual


def critical_set_consistency(k: int, n: int, xi_parity: int = 1):
    """Compare the tabulated critical set with the first-principles one.

    Returns (table, first_principles, equal); discrepancies are reported
    verbatim, never auto-reconciled.
    """
    datum, pair, dual = pair_gamma_atoms(k, n, xi_parity)
    table = list(datum.critical_set)
    lo, hi = table[0] - 3, table[-1] + 3
    fp = critical_set_first_principles(pair, dual, window=(lo, hi))
    return table, fp, table == fp


def format_critical_table(k_values, n_values):
    out = []
    for k in k_values:
        for n in n_values:
            out.append(twist_recipe(k, n).table_text())
    return "\n\n".join(out)


def critical_datum_json(datum: CriticalDatum) -> str:
    return json.dumps(datum.to_json(), indent=1, sort_keys=True)
