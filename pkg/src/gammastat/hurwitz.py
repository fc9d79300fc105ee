"""Braid orbits on Nielsen tuples, lifting invariants, the lattices Z^{c/G}_{=q}
and the Frobenius-fixed component count b(G, c, q, n)."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from math import factorial, gcd

from .config import DEFAULT_BUDGETS
from .errors import BudgetExceeded, InternalCheckFailed, PreconditionError
from .gamma import GammaGroup
from .groups import FiniteGroup, abelianization
from .schur import KGroupElement, ReducedSchurCover, build_reduced_cover, lifting_invariant


# -- braid moves -------------------------------------------------------------------

def sigma(G: FiniteGroup, t, i):
    """sigma_i: (.., g_i, g_{i+1}, ..) -> (.., g_i g_{i+1} g_i^-1, g_i, ..)."""
    t = list(t)
    a, b = t[i], t[i + 1]
    t[i], t[i + 1] = G.conj(a, b), a
    return tuple(t)


def sigma_inv(G: FiniteGroup, t, i):
    t = list(t)
    a, b = t[i], t[i + 1]
    t[i], t[i + 1] = b, G.conj(G.inverse(b), a)
    return tuple(t)


def tuple_product(G, t):
    x = G.identity
    for g in t:
        x = G.mul(x, g)
    return x


def braid_relations_hold(G: FiniteGroup, c, n, budgets=DEFAULT_BUDGETS):
    """Check the braid relations as permutations of c^n (all tuples)."""
    c = sorted(c)
    if len(c) ** n > budgets.tuple_space:
        raise BudgetExceeded("tuple space too large")
    for t in product(c, repeat=n):
        for i in range(n - 1):
            if sigma_inv(G, sigma(G, t, i), i) != t:
                return False
        for i in range(n - 2):
            lhs = sigma(G, sigma(G, sigma(G, t, i), i + 1), i)
            rhs = sigma(G, sigma(G, sigma(G, t, i + 1), i), i + 1)
            if lhs != rhs:
                return False
        for i in range(n - 1):
            for j in range(i + 2, n - 1):
                if sigma(G, sigma(G, t, i), j) != sigma(G, sigma(G, t, j), i):
                    return False
    return True


@dataclass
class Orbit:
    representative: tuple
    size: int
    class_vector: tuple
    lifting_invariant: KGroupElement | None = None
    invariant_constant: bool = True

    @property
    def min_multiplicity(self):
        return min(self.class_vector) if self.class_vector else 0


@dataclass
class OrbitCensus:
    n: int
    orbits: list
    total: int

    @property
    def stability_M(self):
        return [o.min_multiplicity for o in self.orbits]


def nielsen_tuples(G: FiniteGroup, c, n, generating=True, budgets=DEFAULT_BUDGETS):
    """All (g_1..g_n) in c^n with product 1 (and generating G if asked)."""
    c = sorted(c)
    cset = set(c)
    if n == 0:
        return [()] if (not generating or G.order == 1) else []
    if len(c) ** (n - 1) > budgets.tuple_space:
        raise BudgetExceeded("tuple space too large")
    out = []
    for head in product(c, repeat=n - 1):
        last = G.inverse(tuple_product(G, head))
        if last not in cset:
            continue
        t = head + (last,)
        if generating and len(G.closure(list(set(t)))) != G.order:
            continue
        out.append(t)
    return out


def class_vector(cover_or_classes, t):
    if isinstance(cover_or_classes, ReducedSchurCover):
        idx, k = cover_or_classes.class_index, len(cover_or_classes.classes)
    else:
        idx = {x: i for i, cl in enumerate(cover_or_classes) for x in cl}
        k = len(cover_or_classes)
    v = [0] * k
    for g in t:
        v[idx[g]] += 1
    return tuple(v)


def braid_orbits(G: FiniteGroup, c, n, class_vector_filter=None, cover: ReducedSchurCover | None = None,
                 budgets=DEFAULT_BUDGETS) -> OrbitCensus:
    from .schur import classes_in
    classes = cover.classes if cover is not None else classes_in(G, c)
    tuples = nielsen_tuples(G, c, n, budgets=budgets)
    if class_vector_filter is not None:
        tuples = [t for t in tuples if class_vector(classes, t) == tuple(class_vector_filter)]
    remaining = set(tuples)
    orbits = []
    for start in sorted(tuples):
        if start not in remaining:
            continue
        seen = {start}
        stack = [start]
        while stack:
            t = stack.pop()
            for i in range(n - 1):
                for s in (sigma(G, t, i), sigma_inv(G, t, i)):
                    if s not in seen:
                        seen.add(s)
                        stack.append(s)
        if not seen <= remaining:
            raise InternalCheckFailed("braid move left the tuple set")
        remaining -= seen
        orb = Orbit(min(seen), len(seen), class_vector(classes, start))
        if cover is not None:
            invs = {lifting_invariant(cover, t) for t in seen}
            orb.invariant_constant = len(invs) == 1
            orb.lifting_invariant = lifting_invariant(cover, orb.representative)
        orbits.append(orb)
    return OrbitCensus(n, orbits, len(tuples))


@dataclass
class ConwayParkerVerdict:
    n: int
    threshold: int | None
    per_M: dict = field(default_factory=dict)   # M -> (orbits, invariants, bijective)
    passed: bool = False


def conway_parker_check(G: FiniteGroup, c, n, M=None, cover=None, budgets=DEFAULT_BUDGETS):
    """Orbits vs lifting invariants on tuples with every class at least M times.

    With M given, ``passed`` reports the bijection at that M; otherwise the
    smallest M in 1..n where it holds is reported."""
    cover = cover or build_reduced_cover(G, c)
    census = braid_orbits(G, c, n, cover=cover, budgets=budgets)
    if not all(o.invariant_constant for o in census.orbits):
        raise InternalCheckFailed("lifting invariant not constant on a braid orbit")
    Ms = [M] if M is not None else list(range(1, n + 1)) or [1]
    verdict = ConwayParkerVerdict(n, None)
    for m in Ms:
        sel = [o for o in census.orbits if o.min_multiplicity >= m]
        invs = {o.lifting_invariant for o in sel}
        ok = len(invs) == len(sel)
        verdict.per_M[m] = (len(sel), len(invs), ok)
        if ok and verdict.threshold is None:
            verdict.threshold = m
    verdict.passed = verdict.per_M[Ms[0]][2] if M is not None else verdict.threshold is not None
    return verdict


# -- lattices and b(G, c, q, n) -------------------------------------------------------

@dataclass
class QLattice:
    cover: ReducedSchurCover
    q: int
    powering_orbits: list

    @property
    def dimension(self):
        return len(self.powering_orbits)


def q_lattice(cover: ReducedSchurCover, q: int) -> QLattice:
    if gcd(q, cover.base.order) != 1:
        raise PreconditionError("q must be prime to |G|")
    perm = cover.class_permutation(q)
    seen, orbits = set(), []
    for i in range(len(cover.classes)):
        if i in seen:
            continue
        orb, j = [], i
        while j not in orb:
            orb.append(j)
            j = perm[j]
        seen |= set(orb)
        orbits.append(sorted(orb))
    return QLattice(cover, q, orbits)


def enumerate_fixed_vectors(L: QLattice, n: int, min_mult: int = 0):
    """m in Z^{c/G}_{=q} with coordinates >= min_mult, sum n, trivial in G^ab."""
    cov = L.cover
    sizes = [len(o) for o in L.powering_orbits]
    out = []

    def rec(j, left, vals):
        if j == len(sizes):
            if left == 0:
                m = [0] * len(cov.classes)
                for o, v in zip(L.powering_orbits, vals):
                    for i in o:
                        m[i] = v
                if not any(cov.ab_image(m)):
                    out.append(tuple(m))
            return
        v = min_mult
        while v * sizes[j] <= left:
            rec(j + 1, left - v * sizes[j], vals + [v])
            v += 1

    rec(0, n, [])
    return out


def count_fixed_components(cover: ReducedSchurCover, q: int, n: int, L: QLattice | None = None):
    """b(G,c,q,n) = sum_m nr_{q-1}(W_{q^-1}(m))."""
    L = L or q_lattice(cover, q)
    qi = cover.inverse_unit(q)
    K = cover.kernel
    total = 0
    for m in enumerate_fixed_vectors(L, n):
        total += K.nr(q - 1, cover.w_alpha(qi, m))
    return total


def lattice_k_elements(cover: ReducedSchurCover, n: int):
    """All elements of K(G,c) with lattice part summing to n (coordinates >= 0)."""
    k = len(cover.classes)
    out = []
    for m in _compositions(n, k):
        if any(cover.ab_image(m)):
            continue
        for a in cover.kernel.elements():
            out.append(KGroupElement(tuple(a), m))
    return out


def _compositions(n, k):
    if k == 0:
        if n == 0:
            yield ()
        return
    if k == 1:
        yield (n,)
        return
    for a in range(n + 1):
        for rest in _compositions(n - a, k - 1):
            yield (a,) + rest


def frobenius_fixed_check(cover: ReducedSchurCover, q: int, n: int):
    """Exhaustive check over K(G,c)_n: q^-1 * k = k iff m in Z_{=q} and
    h^{q-1} = W_{q^-1}(m)^q.  Returns (fixed count, b) after verifying the
    equivalence pointwise."""
    qi = cover.inverse_unit(q)
    K = cover.kernel
    perm = cover.class_permutation(q)
    fixed = 0
    for k in lattice_k_elements(cover, n):
        act = cover.powering_action(qi, k)
        is_fixed = act == k
        m = k.lattice_part
        in_lattice = all(m[perm[i]] == m[i] for i in range(len(m)))
        crit = False
        if in_lattice:
            w = cover.w_alpha(qi, m)
            crit = K.scale(q - 1, k.cover_part) == K.scale(q, w)
        if is_fixed != crit:
            raise InternalCheckFailed("Frobenius fixed-point criterion fails")
        fixed += is_fixed
    b = count_fixed_components(cover, q, n)
    if fixed != b:
        raise InternalCheckFailed(f"fixed count {fixed} differs from b = {b}")
    return fixed, b


# -- semidirect comparison -------------------------------------------------------------

@dataclass
class SemidirectComparison:
    q: int
    counts: dict          # n -> (b1, b2)
    class_bijection: bool
    abelianization_iso: bool

    @property
    def equal(self):
        return all(a == b for a, b in self.counts.values())


def semidirect_class_set(H: GammaGroup):
    """c_1: elements of H x| Gamma whose order equals that of their Gamma-image,
    excluding those over the identity."""
    B = H.semidirect
    nN = H.order
    out = []
    for x in range(B.order):
        gam = x // nN
        if gam == H.Gamma.identity:
            continue
        if B.orders[x] == H.Gamma.orders[gam]:
            out.append(x)
    return out


def compare_semidirect(H: GammaGroup, q: int, n_range, covers=None):
    Gamma = H.Gamma
    if gcd(H.order, Gamma.order) != 1:
        raise PreconditionError("|H| and |Gamma| must be coprime")
    G1 = H.semidirect
    if gcd(q, G1.order) != 1:
        raise PreconditionError("q must be prime to |G|")
    if gcd(q - 1, H.order) != 1:
        raise PreconditionError("q - 1 must be prime to |H|")
    c1 = semidirect_class_set(H)
    c2 = [g for g in range(Gamma.order) if g != Gamma.identity]
    cov1, cov2 = covers or (build_reduced_cover(G1, c1), build_reduced_cover(Gamma, c2))
    nN = H.order
    # classes of c_1 map bijectively to classes of c_2
    img = [{x // nN for x in cl} for cl in cov1.classes]
    targets = [next(iter(s)) for s in img]
    bij = all(len(s) == 1 for s in img) and sorted(cov2.class_index[t] for t in targets) == \
        list(range(len(cov2.classes)))
    ab1, ab2 = cov1.ab, cov2.ab
    iso = ab1.form.cyclic_factors == ab2.form.cyclic_factors and _ab_map_iso(G1, Gamma, nN, ab1, ab2)
    L1, L2 = q_lattice(cov1, q), q_lattice(cov2, q)
    counts = {}
    for n in n_range:
        counts[n] = (count_fixed_components(cov1, q, n, L1), count_fixed_components(cov2, q, n, L2))
    return SemidirectComparison(q, counts, bij, iso)


def _ab_map_iso(G1, Gamma, nN, ab1, ab2):
    """The projection G_1 -> Gamma induces a bijection of abelianizations."""
    images = {}
    for x in range(G1.order):
        a, b = ab1.coords[x], ab2.coords[x // nN]
        if images.setdefault(a, b) != b:
            return False
    return len(set(images.values())) == ab2.form.order == len(images)


# -- asymptotics -------------------------------------------------------------------

@dataclass
class LatticeAsymptotics:
    period: int
    residues: list
    leading: dict        # residue -> Fraction coefficient of n^(d-1)
    degree: int
    max_residual: int
    periods_observed: int
    counts: dict


def lattice_asymptotics(L: QLattice, n_samples, weight="b", burn_in=None):
    """Detect the period M_a and residues E_a of n -> count(n), where count is
    b(G,c,q,n) (weight='b') or the number of fixed vectors.  Along each residue
    class the count is checked to be a polynomial of degree d-1 by exact
    finite differences."""
    ns = sorted(n_samples)
    if weight == "b":
        counts = {n: count_fixed_components(L.cover, L.q, n, L) for n in ns}
    else:
        counts = {n: len(enumerate_fixed_vectors(L, n)) for n in ns}
    d = L.dimension
    burn = burn_in if burn_in is not None else d * max(len(o) for o in L.powering_orbits)
    tail = [n for n in ns if n >= burn]
    for P in range(1, len(tail) // 3 + 1):
        ok, leading, resid = True, {}, 0
        for r in range(P):
            seq = [counts[n] for n in tail if n % P == r]
            if len(seq) < d + 2:
                ok = False
                break
            diffs = seq
            for _ in range(d):
                diffs = [b - a for a, b in zip(diffs, diffs[1:])]
            resid = max(resid, max(abs(x) for x in diffs))
            if any(diffs):
                ok = False
                break
            top = seq
            for _ in range(d - 1):
                top = [b - a for a, b in zip(top, top[1:])]
            # along n = r + kP: Delta_k^{d-1} = (d-1)! lc_k, and lc_n = lc_k / P^{d-1}
            leading[r] = Fraction(top[0], factorial(d - 1) * P ** (d - 1))
        if ok:
            residues = sorted(r for r, v in leading.items() if v != 0)
            return LatticeAsymptotics(P, residues, leading, d - 1, 0, len(tail) // P, counts)
    raise PreconditionError("range too short to determine the period")
