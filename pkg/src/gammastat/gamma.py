"""Gamma-groups: a finite group with an action of a fixed finite group Gamma.

Conventions.  ``act[c][g]`` is the image of g under the Gamma element c.
The fixed ordered generating set gamma_1..gamma_d of Gamma is part of the
value and defines the Y-map g -> (g^-1 gamma_1(g), ..., g^-1 gamma_d(g)).
"""

from __future__ import annotations

from functools import cached_property
from itertools import product
from math import gcd

import numpy as np

from .config import DEFAULT_BUDGETS
from .errors import BudgetExceeded, InvalidGroupSpec
from .groups import (FiniteGroup, GroupHom, all_subgroups, check_action, extend_action,
                     from_perms, group_invariants, iter_homs, mobius_top, quotient, semidirect)
from .product import CoordinateSpace


class GammaGroup:
    def __init__(self, G: FiniteGroup, Gamma: FiniteGroup, action, gamma_generators=None,
                 name=None, validate=True):
        self.G = G
        self.Gamma = Gamma
        if isinstance(action, dict):
            act = extend_action(Gamma, G, action)
        else:
            act = np.asarray(action, dtype=np.int64)
        if act.shape != (Gamma.order, G.order):
            raise InvalidGroupSpec("action array has the wrong shape")
        if validate:
            check_action(Gamma, G, act)
        self.act = act
        self._act = act.tolist()
        gg = tuple(Gamma.generators if gamma_generators is None else gamma_generators)
        if validate and len(Gamma.closure(gg)) != Gamma.order:
            raise InvalidGroupSpec("gamma_generators do not generate Gamma")
        self.gamma_generators = gg
        self.name = name

    def __repr__(self):
        return f"GammaGroup(|G|={self.G.order}, |Gamma|={self.Gamma.order}{', ' + self.name if self.name else ''})"

    @property
    def order(self):
        return self.G.order

    @property
    def d(self):
        return len(self.gamma_generators)

    def with_generators(self, gamma_generators):
        return GammaGroup(self.G, self.Gamma, self.act, gamma_generators, name=self.name,
                          validate=False)

    # -- Y-map -------------------------------------------------------------
    def y_map(self, g):
        t, inv = self.G._t, self.G._inv
        gi = inv[g]
        return tuple(t[gi][self._act[c][g]] for c in self.gamma_generators)

    @cached_property
    def y_values(self):
        """y_values[g] = Y(g)."""
        return [self.y_map(g) for g in range(self.G.order)]

    @cached_property
    def y_image(self):
        return frozenset(self.y_values)

    @cached_property
    def y_coordinates(self):
        return frozenset(x for y in self.y_image for x in y)

    @cached_property
    def fixed_points(self):
        e = self.G.identity
        return frozenset(g for g, y in enumerate(self.y_values) if all(x == e for x in y))

    # -- closures -----------------------------------------------------------
    def orbit(self, g):
        return {row[g] for row in self._act}

    def gamma_closure(self, S):
        """The Gamma-subgroup generated by S."""
        gens = []
        for s in S:
            gens.extend(self.orbit(s))
        return self.G.closure(gens)

    def normal_gamma_closure(self, S):
        gens = []
        for s in S:
            gens.extend(self.orbit(s))
        G = self.G
        K = G.closure(gens)
        gens = list(dict.fromkeys(gens))
        changed = True
        while changed:
            changed = False
            for x in list(gens):
                for g in G.generators:
                    y = G.conj(g, x)
                    if y not in K:
                        for z in self.orbit(y):
                            if z not in gens:
                                gens.append(z)
                        K = G.closure(gens)
                        changed = True
        return K

    def is_gamma_stable(self, S):
        S = frozenset(S)
        return all(self._act[c][x] in S for c in self.gamma_generators for x in S)

    def is_admissible(self):
        """(flag, witness) where the witness is the Gamma-subgroup generated
        by all Y-coordinates."""
        W = self.gamma_closure(self.y_coordinates)
        ok = gcd(self.G.order, self.Gamma.order) == 1 and len(W) == self.G.order
        return ok, W

    @property
    def admissible(self):
        return self.is_admissible()[0]

    def gamma_generating_set(self):
        order = self.G.orders
        gens, cur = [], frozenset([self.G.identity])
        for g in sorted(range(self.G.order), key=lambda x: (-order[x], x)):
            if len(cur) == self.G.order:
                break
            if g not in cur:
                gens.append(g)
                cur = self.gamma_closure(gens)
        return gens

    @cached_property
    def gamma_subgroups(self):
        """All Gamma-stable subgroups, as {frozenset: generating list}."""
        seeds = {}
        for g in range(self.G.order):
            seeds.setdefault(self.gamma_closure([g]), [g])
        return all_subgroups(self.G, closure=self.gamma_closure, seeds=seeds)

    @cached_property
    def normal_gamma_subgroups(self):
        seeds = {}
        for g in range(self.G.order):
            seeds.setdefault(self.normal_gamma_closure([g]), [g])
        return all_subgroups(self.G, closure=self.normal_gamma_closure, seeds=seeds)

    # -- derived Gamma-groups ------------------------------------------------
    def restrict(self, K):
        """The Gamma-subgroup K as a GammaGroup (K sorted and reindexed)."""
        K = frozenset(K)
        if not self.is_gamma_stable(K):
            raise InvalidGroupSpec("subgroup is not Gamma-stable")
        sub = self.G.subgroup(K)
        pos = sub.index_in
        act = np.array([[pos[row[x]] for x in sub.parent_index] for row in self._act])
        out = GammaGroup(sub, self.Gamma, act, self.gamma_generators, validate=False)
        out.parent_index = sub.parent_index
        return out

    def quotient(self, N):
        N = frozenset(N)
        if not self.is_gamma_stable(N):
            raise InvalidGroupSpec("kernel is not Gamma-stable")
        Q, proj = quotient(self.G, N)
        img = proj.images
        act = np.array([[img[row[r]] for r in Q.coset_reps] for row in self._act])
        return GammaGroup(Q, self.Gamma, act, self.gamma_generators, validate=False), proj

    @cached_property
    def semidirect(self) -> FiniteGroup:
        """G x| Gamma with Gamma acting through the action."""
        return semidirect(self.G, self.Gamma, self.act, validate_action=False)

    def invariants(self):
        inv = dict(group_invariants(self.G))
        inv["fixed"] = len(self.fixed_points)
        inv["Y"] = len(self.y_image)
        # sizes of Gamma-orbits, as a multiset
        orbit_sizes = sorted(len(self.orbit(g)) for g in range(self.G.order))
        inv["orbits"] = tuple(orbit_sizes)
        return inv


def trivial_gamma_group(Gamma, gamma_generators=None):
    from .groups import trivial_group
    return GammaGroup(trivial_group(), Gamma, np.zeros((Gamma.order, 1), dtype=np.int64),
                      gamma_generators, validate=False)


def gamma_group_from_matrices(p, Gamma, gen_matrices, gamma_generators=None, name=None):
    """F_p^k with Gamma acting linearly; ``gen_matrices`` maps Gamma generator
    indices to k x k matrices.  Vector v has index sum v_i p^i."""
    from .groups import abelian_group
    k = len(next(iter(gen_matrices.values())))
    V = abelian_group([p] * k)
    vecs = list(product(range(p), repeat=k))
    index = {}
    for v in vecs:
        index[v] = sum(x * p ** i for i, x in enumerate(v))
    # abelian_group builds iterated products with index a + p*(...), i.e. base p digits
    perms = {}
    for s, M in gen_matrices.items():
        perm = [0] * V.order
        for v in vecs:
            w = tuple(sum(M[i][j] * v[j] for j in range(k)) % p for i in range(k))
            perm[index[v]] = index[w]
        perms[s] = perm
    return GammaGroup(V, Gamma, perms, gamma_generators, name=name)


# -- equivariant maps -------------------------------------------------------------

def _equivariant_blocks(A: GammaGroup, B: GammaGroup):
    blocks = []
    for t in A.gamma_generating_set():
        blocks.append([(A._act[c][t], B.act[c]) for c in range(A.Gamma.order)])
    return blocks


def iter_equivariant_homs(A: GammaGroup, B: GammaGroup, surjective=False, injective=False,
                          candidates=None, budgets=DEFAULT_BUDGETS, blocks=None):
    if A.Gamma.order != B.Gamma.order:
        raise InvalidGroupSpec("Gamma-groups over different Gamma")
    if blocks is None:
        blocks = _equivariant_blocks(A, B)
    if candidates is not None and callable(candidates):
        candidates = [candidates(blk[0][0]) for blk in blocks]
    yield from iter_homs(A.G, B.G, blocks=blocks, candidates=candidates, surjective=surjective,
                         injective=injective, budgets=budgets)


def equivariant_homs(A, B, surjective_only=False, budgets=DEFAULT_BUDGETS):
    out = [GroupHom(A.G, B.G, f, validate=False)
           for f in iter_equivariant_homs(A, B, surjective=surjective_only, budgets=budgets)]
    out.sort(key=lambda h: h.images)
    return out


def count_equivariant_homs(A, B, surjective_only=False, budgets=DEFAULT_BUDGETS):
    return sum(1 for _ in iter_equivariant_homs(A, B, surjective=surjective_only, budgets=budgets))


def gamma_automorphisms(A, budgets=DEFAULT_BUDGETS):
    return [tuple(int(x) for x in f) for f in iter_equivariant_homs(A, A, injective=True,
                                                                    budgets=budgets)]


def gamma_isomorphism(A: GammaGroup, B: GammaGroup, budgets=DEFAULT_BUDGETS):
    """An equivariant isomorphism A -> B as an image array, or None."""
    if A.order != B.order or A.Gamma.order != B.Gamma.order:
        return None
    if A.invariants() != B.invariants():
        return None
    for f in iter_equivariant_homs(A, B, injective=True, budgets=budgets):
        return tuple(int(x) for x in f)
    return None


def is_equivariant(f, A: GammaGroup, B: GammaGroup):
    f = np.asarray(f)
    return bool(np.array_equal(f[A.act], B.act[:, f]))


def count_surjections_from_free(H: GammaGroup, n):
    """|Sur_Gamma(F_n, H)| by Moebius inversion over Gamma-subgroups:
    sum_K mu(K, H) |Y(K)|^n with Y(K) = Y(H) cap K^d."""
    subs = H.gamma_subgroups
    top = frozenset(range(H.order))
    mu = mobius_top(subs, top)
    total = 0
    for K, v in mu.items():
        if v:
            yK = sum(1 for y in H.y_image if all(x in K for x in y))
            total += v * yK ** n
    return total


def count_surjections_from_free_direct(H: GammaGroup, n):
    """Direct count of y in Y(H)^n whose coordinates Gamma-generate H."""
    ys = sorted(H.y_image)
    count = 0
    for tup in product(ys, repeat=n):
        coords = [x for y in tup for x in y]
        if len(H.gamma_closure(coords)) == H.order:
            count += 1
    return count


# -- level sets and their closure ----------------------------------------------------

class LevelSet:
    """A finite list C of Gamma-groups over a common Gamma.

    Membership in the closure C-bar (finite direct products, Gamma-subgroups,
    Gamma-quotients) is decided with relatively free groups: a Gamma-group Q
    Gamma-generated by k elements lies in C-bar iff it is an equivariant
    quotient of P_k, the image of the free Gamma-group on k generators in the
    product of all its C-valued evaluations.
    """

    def __init__(self, members, name=None, budgets=DEFAULT_BUDGETS):
        members = list(members)
        if not members:
            raise InvalidGroupSpec("level set must be non-empty")
        self.Gamma = members[0].Gamma
        gg = members[0].gamma_generators
        for M in members:
            if M.Gamma.order != self.Gamma.order or not np.array_equal(M.Gamma.table, self.Gamma.table):
                raise InvalidGroupSpec("level set members over different Gamma")
            if tuple(M.gamma_generators) != tuple(gg):
                raise InvalidGroupSpec("level set members use different Gamma generators")
        self.members = members
        self.gamma_generators = gg
        self.name = name
        self.budgets = budgets
        self._free = {}

    def __iter__(self):
        return iter(self.members)

    def __len__(self):
        return len(self.members)

    def relatively_free(self, k):
        """(space, elements, index, generator vectors) for P_k.

        Coordinates are indexed by (member M, tuple t in M^k); the generator
        x_{i,c} has value c(t_i) at (M, t)."""
        if k in self._free:
            return self._free[k]
        groups, counts = [], []
        for M in self.members:
            groups.append(M.G)
            counts.append(M.order ** k)
        total = sum(counts)
        if total > self.budgets.level_product:
            raise BudgetExceeded(f"relatively free group needs {total} coordinates")
        space = CoordinateSpace(groups, counts)
        gens = []
        for i in range(k):
            for c in range(self.Gamma.order):
                vec = []
                for M in self.members:
                    row = M._act[c]
                    for t in product(range(M.order), repeat=k):
                        vec.append(row[t[i]])
                gens.append(np.array(vec, dtype=np.int64))
        elems, index, _ = space.closure(gens, cap=self.budgets.model_order)
        self._free[k] = (space, elems, index, gens)
        return self._free[k]

    def contains(self, Q: GammaGroup):
        """True iff Q lies in the closure C-bar."""
        if Q.order == 1:
            return True
        if Q.Gamma.order != self.Gamma.order:
            return False
        for M in self.members:
            if M.order == Q.order and gamma_isomorphism(M, Q) is not None:
                return True
        qs = Q.gamma_generating_set()
        k = len(qs)
        space, elems, _, gens = self.relatively_free(k)
        # graph of x_{i,c} -> c(q_i) inside P_k x Q
        ext = CoordinateSpace(space.groups + [Q.G], space.counts + [1])
        ggens = []
        j = 0
        for i in range(k):
            for c in range(self.Gamma.order):
                ggens.append(np.concatenate([gens[j], [Q._act[c][qs[i]]]]))
                j += 1
        try:
            graph, _, _ = ext.closure(ggens, cap=len(elems) + 1)
        except BudgetExceeded:
            return False
        return len(graph) == len(elems)


def level_completion(G: GammaGroup, C: LevelSet):
    """(G^C, projection): the largest quotient of G lying in C-bar."""
    top = frozenset(range(G.order))
    if C.contains(G):
        return G, GroupHom(G.G, G.G, range(G.order), validate=False)
    M_min = top
    for M in sorted(G.normal_gamma_subgroups, key=len):
        if M_min <= M:
            continue
        Q, _ = G.quotient(M)
        if C.contains(Q):
            M_min = M_min & M
    return G.quotient(M_min)


def is_level(H: GammaGroup, C: LevelSet):
    return C.contains(H)


# -- chief factors -------------------------------------------------------------

class ChiefFactorPair:
    """(M, A): M an irreducible A-group with A acting faithfully, A <= Aut(M)."""

    def __init__(self, M: FiniteGroup, A_perms):
        self.M = M
        self.A = frozenset(tuple(p) for p in A_perms)

    @property
    def is_abelian(self):
        return self.M.is_abelian

    @property
    def order(self):
        return self.M.order

    def isomorphic(self, other: "ChiefFactorPair"):
        if self.M.order != other.M.order or len(self.A) != len(other.A):
            return False
        for f in iter_homs(self.M, other.M, injective=True):
            f = [int(x) for x in f]
            finv = [0] * len(f)
            for a, b in enumerate(f):
                finv[b] = a
            conj = {tuple(f[p[finv[x]]] for x in range(len(f))) for p in self.A}
            if conj == other.A:
                return True
        return False

    def __repr__(self):
        return f"ChiefFactorPair(|M|={self.M.order}, |A|={len(self.A)})"


def chief_series(G: GammaGroup, choice=0):
    """A maximal chain of normal Gamma-subgroups 1 = N_0 < ... < N_r = G.

    ``choice`` selects which minimal step to take when there are several
    (index modulo the number of options) so distinct series can be compared.
    """
    subs = list(G.normal_gamma_subgroups)
    cur = frozenset([G.G.identity])
    series = [cur]
    top = frozenset(range(G.order))
    while cur != top:
        above = [K for K in subs if cur < K]
        minimal = [K for K in above if not any(cur < L < K for L in above)]
        minimal.sort(key=lambda K: (len(K), sorted(K)))
        cur = minimal[choice % len(minimal)]
        series.append(cur)
    return series


def chief_factor_pairs(G: GammaGroup, choice=0):
    """CF_Gamma(G) as a list of pairwise non-isomorphic ChiefFactorPairs."""
    series = chief_series(G, choice)
    pairs = []
    for N, K in zip(series, series[1:]):
        Ksub = G.G.subgroup(K)
        Nloc = frozenset(Ksub.index_in[x] for x in N)
        M, proj = quotient(Ksub, Nloc)
        reps = [Ksub.parent_index[r] for r in M.coset_reps]
        img = proj.images

        def to_m(x):
            return img[Ksub.index_in[x]]
        perms = []
        for g in G.G.generators:
            perms.append(tuple(to_m(G.G.conj(g, r)) for r in reps))
        for c in G.Gamma.generators:
            perms.append(tuple(to_m(G._act[c][r]) for r in reps))
        A, elems = from_perms(perms) if perms else (None, [tuple(range(M.order))])
        pair = ChiefFactorPair(M, elems)
        if not any(pair.isomorphic(q) for q in pairs):
            pairs.append(pair)
    return pairs


def merge_pairs(pair_lists):
    out = []
    for lst in pair_lists:
        for p in lst:
            if not any(p.isomorphic(q) for q in out):
                out.append(p)
    return out
