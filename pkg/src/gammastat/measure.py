"""Exact multiplicities, finite-n probabilities, limiting measures and moments."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import log, gcd

import numpy as np

from .config import DEFAULT_BUDGETS
from .errors import (InternalCheckFailed, NotAdmissible, PreconditionError,
                     UnverifiedFactorError)
from .extensions import ModuleRep, enumerate_h_extensions, irreducible_modules
from .gamma import (GammaGroup, LevelSet, chief_factor_pairs, count_surjections_from_free,
                    gamma_automorphisms, merge_pairs)
from .groups import prime_factors


# -- factor descriptors ------------------------------------------------------------

@dataclass
class Factor:
    """An irreducible relation factor G for a fixed H.

    Abelian factors are F_p[H x| Gamma]-modules; ``y_size`` is |Y(G)| for the
    underlying Gamma-group and ``h`` is |End_{H x| Gamma}(G)|.
    """
    kind: str
    module: ModuleRep | None
    y_size: int
    h: int
    order: int

    def describe(self):
        d = {"kind": self.kind, "order": self.order, "Y": self.y_size, "h": self.h}
        if self.module is not None:
            d.update(self.module.describe())
        return d


@dataclass
class ExtensionTerm:
    aut: int
    # (nu(D, E), |Y(D)|) over the sub-H-extensions D
    poset_terms: list
    E_order: int
    label: str = ""


@dataclass
class MultiplicityReport:
    level: LevelSet
    n: int
    H: GammaGroup
    G: Factor
    m: int
    mobius_sum: Fraction
    extensions: list = field(default_factory=list)

    def check(self):
        h = self.G.h
        if self.G.kind == "abelian":
            lhs = Fraction(h ** self.m - 1, h - 1)
        else:
            lhs = Fraction(self.m)
        if lhs != self.mobius_sum:
            raise InternalCheckFailed("multiplicity identity fails")
        return True


def _cache(C: LevelSet):
    if not hasattr(C, "_measure_cache"):
        C._measure_cache = {}
    return C._measure_cache


def level_chief_factors(C: LevelSet):
    cache = _cache(C)
    if "cf" not in cache:
        cache["cf"] = merge_pairs([chief_factor_pairs(M) for M in C.members])
    return cache["cf"]


def require_admissible_level(C, H):
    if not H.admissible:
        raise NotAdmissible("H is not admissible")
    if not C.contains(H):
        raise PreconditionError("H is not of level C")


def abelian_factors(C: LevelSet, H: GammaGroup, budgets=DEFAULT_BUDGETS):
    """Candidate abelian factors G in A_H: irreducible modules whose order
    matches an abelian chief factor of C (other modules cannot occur as
    kernels of level-C extensions)."""
    key = ("factors", id(H))
    cache = _cache(C)
    if key in cache:
        return cache[key][1]
    sizes = set()
    for pair in level_chief_factors(C):
        if pair.is_abelian:
            q = pair.order
            p = prime_factors(q)[0]
            k = round(log(q, p))
            while p ** k < q:
                k += 1
            if H.Gamma.order % p:
                sizes.add((p, k))
    B = H.semidirect
    out = []
    for p, k in sorted(sizes):
        for mod in irreducible_modules(B, p, k, budgets):
            out.append(Factor("abelian", mod, len(mod.gamma_group(H).y_image), mod.h, p ** k))
    cache[key] = (H, out)
    return out


def check_nonabelian_factors(C: LevelSet):
    """Nonabelian relation factors can only come from nonabelian chief factors
    of C; those are outside the exact engine."""
    bad = [pr for pr in level_chief_factors(C) if not pr.is_abelian]
    if bad:
        raise UnverifiedFactorError(
            f"level set has nonabelian chief factors of orders {[b.order for b in bad]}; "
            "nonabelian relation factors are not enumerated exactly")


def extension_terms(C: LevelSet, H: GammaGroup, G: Factor):
    key = ("ext", id(H), id(G))
    cache = _cache(C)
    if key in cache:
        return cache[key][2]
    exts = enumerate_h_extensions(H, G.module, level=C)
    terms = []
    for ext in exts:
        P = ext.poset()
        pt = [(nu, P.y_size(D)) for D, nu in P.mobius.items() if nu]
        terms.append(ExtensionTerm(ext.aut_count, pt, ext.E.order, ext.label))
    cache[key] = (H, G, terms)
    return terms


def mobius_sum(C, n, H, G):
    yH = len(H.y_image)
    total = Fraction(0)
    for t in extension_terms(C, H, G):
        s = sum(Fraction(nu * yD ** n, yH ** n) for nu, yD in t.poset_terms)
        total += s / t.aut
    return total


def _solve_m(S, h):
    if S == 0:
        return 0
    val = S * (h - 1) + 1
    if val.denominator != 1:
        raise InternalCheckFailed(f"Moebius sum {S} not of the form (h^m-1)/(h-1)")
    v = val.numerator
    m = 0
    while v % h == 0 and v > 1:
        v //= h
        m += 1
    if v != 1:
        raise InternalCheckFailed(f"Moebius sum {S} not of the form (h^m-1)/(h-1)")
    return m


def multiplicity(C: LevelSet, n: int, H: GammaGroup, G: Factor) -> MultiplicityReport:
    if n < 1:
        raise PreconditionError("n must be positive")
    require_admissible_level(C, H)
    S = mobius_sum(C, n, H, G)
    if G.kind == "abelian":
        m = _solve_m(S, G.h)
    else:
        if S.denominator != 1 or S < 0:
            raise InternalCheckFailed("nonabelian Moebius sum is not a non-negative integer")
        m = int(S)
    rep = MultiplicityReport(C, n, H, G, m, S, extension_terms(C, H, G))
    rep.check()
    return rep


def lambda_constant(C: LevelSet, H: GammaGroup, G: Factor) -> Fraction:
    require_admissible_level(C, H)
    s = sum((Fraction(1, t.aut) for t in extension_terms(C, H, G)), Fraction(0))
    return (G.h - 1) * s if G.kind == "abelian" else s


def lambda_limit_check(C, H, G, n_values=(3, 4)):
    """h^m |Y(G)|^-n at two values of n; returns the list of approximants."""
    out = []
    for n in n_values:
        m = multiplicity(C, n, H, G).m
        out.append(Fraction(G.h ** m, G.y_size ** n))
    return out


def aut_gamma_order(H: GammaGroup):
    if not hasattr(H, "_aut_gamma"):
        H._aut_gamma = len(gamma_automorphisms(H))
    return H._aut_gamma


def prob_level(C: LevelSet, n: int, u: int, H: GammaGroup, return_parts=False):
    """Exact Prob((X_{u,n})^C = H)."""
    if n < 1 or n + u < 1:
        raise PreconditionError("need n >= 1 and n + u >= 1")
    require_admissible_level(C, H)
    check_nonabelian_factors(C)
    yH = len(H.y_image)
    sur = count_surjections_from_free(H, n)
    base = Fraction(sur, aut_gamma_order(H) * yH ** (n + u))
    prob = base
    parts = []
    if sur:
        for G in abelian_factors(C, H):
            m = multiplicity(C, n, H, G).m
            f = Fraction(1)
            for k in range(m):
                f *= 1 - Fraction(G.h ** k, G.y_size ** (n + u))
            prob *= f
            parts.append({"G": G.describe(), "m": m})
    if return_parts:
        return prob, {"sur": sur, "aut": aut_gamma_order(H), "Y": yH, "factors": parts}
    return prob


# -- limiting measure ----------------------------------------------------------------

@dataclass
class MeasureValue:
    exact_prefix: Fraction
    tail_lower: Fraction
    tail_upper: Fraction
    float_estimate: float

    @property
    def lower(self):
        return self.exact_prefix * self.tail_lower

    @property
    def upper(self):
        return self.exact_prefix * self.tail_upper

    def contains(self, x):
        return self.lower <= x <= self.upper

    def within(self, other: "MeasureValue"):
        return other.lower <= self.lower and self.upper <= other.upper

    def to_dict(self):
        return {"prefix_num": self.exact_prefix.numerator, "prefix_den": self.exact_prefix.denominator,
                "tail_lo": [self.tail_lower.numerator, self.tail_lower.denominator],
                "tail_hi": [self.tail_upper.numerator, self.tail_upper.denominator],
                "lower": float(self.lower), "upper": float(self.upper),
                "estimate": self.float_estimate}


def geometric_product(const, terms, prefix_len):
    """prod_{i>=1} (1 - a_i) over factor families a_i = c * r^-i.

    ``terms`` is a list of (c, r) with Fraction c >= 0 and integer r >= 2;
    ``const`` multiplies the result.  Returns a MeasureValue with the first
    prefix_len factors of each family exact and the tail bounded by
    1 - sum_{i > L} a_i <= tail <= 1.
    """
    prefix = Fraction(const)
    lo = Fraction(1)
    est = float(const)
    for c, r in terms:
        c = Fraction(c)
        for i in range(1, prefix_len + 1):
            prefix *= 1 - c / r ** i
        tail = c / (r ** prefix_len * (r - 1))
        if tail >= 1:
            raise PreconditionError("prefix too short for a valid tail bound")
        lo *= 1 - tail
        fc = float(c)
        est_f = 1.0
        for i in range(1, prefix_len + 200):
            term = fc * float(r) ** (-i)
            if term < 1e-18:
                break
            est_f *= 1 - term
        est *= est_f
    val = MeasureValue(prefix, lo, Fraction(1), est)
    lo_f, hi_f = float(val.lower), float(val.upper)
    val.float_estimate = min(max(val.float_estimate, lo_f), hi_f)
    return val


def mu_basic_open(C: LevelSet, u: int, H: GammaGroup, prefix_len: int = 10) -> MeasureValue:
    if u < 0:
        raise PreconditionError("the limiting measure is a probability measure only for u >= 0")
    require_admissible_level(C, H)
    check_nonabelian_factors(C)
    yH = len(H.y_image)
    const = Fraction(1, aut_gamma_order(H) * yH ** u)
    terms = []
    for G in abelian_factors(C, H):
        lam = lambda_constant(C, H, G)
        if lam:
            terms.append((lam / Fraction(G.y_size) ** u, G.h))
    return geometric_product(const, terms, prefix_len)


# -- moments ------------------------------------------------------------------------

def moment(u: int, A: GammaGroup) -> Fraction:
    """Limiting moment E(|Sur_Gamma(X_u, A)|) = [A : A^Gamma]^-u."""
    if not A.admissible:
        raise NotAdmissible("A is not admissible")
    return Fraction(1, len(A.y_image)) ** u if u >= 0 else Fraction(len(A.y_image)) ** (-u)


def moment_level(C: LevelSet, n: int, u: int, A: GammaGroup) -> Fraction:
    """|Sur_Gamma((F_n)^C, A)| / |Y(A)|^(n+u) for A of level C."""
    if not A.admissible:
        raise NotAdmissible("A is not admissible")
    if not C.contains(A):
        raise PreconditionError("A is not of level C")
    return Fraction(count_surjections_from_free(A, n), len(A.y_image) ** (n + u))


def moment_gap_bound(A: GammaGroup, n: int) -> Fraction:
    """Upper bound on 1 - |Sur_Gamma(F_n, A)| / |Y(A)|^n from proper
    maximal Gamma-subgroups (each contributes (|Y(K)|/|Y(A)|)^n)."""
    subs = list(A.gamma_subgroups)
    top = frozenset(range(A.order))
    proper = [K for K in subs if K != top]
    maximal = [K for K in proper if not any(K < L for L in proper)]
    yA = len(A.y_image)
    s = Fraction(0)
    for K in maximal:
        yK = sum(1 for y in A.y_image if all(x in K for x in y))
        s += Fraction(yK, yA) ** n
    return s


# -- specializations -------------------------------------------------------------------

def gamma_irreducibles(Gamma, p, budgets=DEFAULT_BUDGETS):
    """Irreducible F_p[Gamma]-modules (p prime to |Gamma|), certified complete by
    the Wedderburn count sum dim^2 / e = |Gamma| with |End| = p^e."""
    if Gamma.order % p == 0:
        raise PreconditionError("p must be prime to |Gamma|")
    found = []
    total = Fraction(0)
    k = 1
    while total < Gamma.order:
        if k * k > Gamma.order:
            raise InternalCheckFailed("Wedderburn count incomplete")
        for mod in irreducible_modules(Gamma, p, k, budgets):
            found.append(mod)
            e = len(mod.endomorphism_basis)
            total += Fraction(k * k, e)
        k += 1
    if total != Gamma.order:
        raise InternalCheckFailed("Wedderburn count mismatch")
    return found


def clm_specialization(u: int, H: GammaGroup, prime_set, prefix_len=10) -> MeasureValue:
    """Cohen-Lenstra-Martinet value for abelian H with H^Gamma = 1, restricted
    to the primes in prime_set."""
    if not H.G.is_abelian:
        raise PreconditionError("H must be abelian")
    if gcd(H.order, H.Gamma.order) != 1:
        raise PreconditionError("|H| must be prime to |Gamma|")
    if len(H.fixed_points) != 1:
        raise NotAdmissible("H^Gamma is nontrivial")
    for q in prime_factors(H.order):
        if q not in prime_set:
            raise PreconditionError(f"prime {q} of |H| not in prime set")
    const = Fraction(1, aut_gamma_order(H) * H.order ** u)
    terms = []
    Gamma = H.Gamma
    for p in sorted(prime_set):
        for mod in gamma_irreducibles(Gamma, p):
            if all(np.array_equal(mod.mats[g], np.eye(mod.k, dtype=np.int64))
                   for g in range(Gamma.order)):
                continue   # trivial representation
            size = p ** mod.k
            terms.append((Fraction(1, size ** u), mod.h))
    return geometric_product(const, terms, prefix_len)


def elementary_abelian_ranks(H: GammaGroup, p):
    """(d, r) for H = (Z/p)^k: generator rank k and relation rank k(k+1)/2."""
    if not H.G.is_abelian or any(o not in (1, p) for o in set(H.G.orders)):
        raise PreconditionError("H is not elementary abelian of exponent p")
    k = round(log(H.order, p)) if H.order > 1 else 0
    return k, k * (k + 1) // 2


def bbh_specialization(u: int, p: int, H: GammaGroup, mode="pro-p", d=None, r=None, nu=None,
                       prefix_len=10) -> MeasureValue:
    """Boston-Bush-Hajir value 1/(|Aut_Gamma H| |Y(H)|^u) prod_{i >= 1+u+d-r(+nu)} (1-p^-i)."""
    if H.Gamma.order != 2:
        raise PreconditionError("this specialization needs Gamma = Z/2")
    if p % 2 == 0:
        raise PreconditionError("p must be odd")
    if d is None or r is None:
        d, r = elementary_abelian_ranks(H, p)
        if mode == "class-c" and nu is None:
            nu = r     # class 1: the nucleus is the whole p-multiplicator
    if mode not in ("pro-p", "class-c"):
        raise PreconditionError(f"unknown mode {mode}")
    shift = r - d - ((nu or 0) if mode == "class-c" else 0)
    start = 1 + u - shift
    const = Fraction(1, aut_gamma_order(H) * len(H.y_image) ** u)
    # prod_{i >= start} (1 - p^-i) = prod_{i >= 1} (1 - p^(1-start) p^-i)
    if start < 1:
        return MeasureValue(Fraction(0), Fraction(1), Fraction(1), 0.0)
    return geometric_product(const, [(Fraction(1, p ** (start - 1)), p)], prefix_len)


def bbh_multiplicity(n, d, r, nu=0):
    """m = r - nu - d + n."""
    return r - nu - d + n
