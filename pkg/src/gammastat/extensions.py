"""Modules over H x| Gamma, second cohomology, and H-extensions.

An H-extension is a Gamma-group E with an equivariant surjection E -> H.
For an abelian kernel M (an irreducible F_p[B]-module, B = H x| Gamma) the
extensions are read off from H^2(B, M): every class gives an extension
E~ of B, and E is the preimage of H with Gamma acting through a complement
of M over Gamma (unique up to M-conjugacy by Schur-Zassenhaus).

H^2(B, M) is computed from the Cayley-graph presentation of B:
Hom_B(R^ab, M) modulo restrictions of derivations F -> M, where F is free
on the generators of B and R is free on the Schreier generators.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from itertools import product
from math import gcd

import numpy as np

from .config import DEFAULT_BUDGETS
from .errors import BudgetExceeded, InternalCheckFailed, InvalidGroupSpec, PreconditionError
from .gamma import (GammaGroup, LevelSet, gamma_isomorphism, iter_equivariant_homs)
from .groups import (FiniteGroup, automorphisms, general_linear, iter_homs, mobius_top,
                     from_perms)
from .linalg_fp import complement_basis, index_vec, nullspace, rank, row_space, solve, vec_index


# -- modules ----------------------------------------------------------------------

class ModuleRep:
    """F_p^k with B acting on the left through ``mats[b]``."""

    def __init__(self, B: FiniteGroup, p, mats, validate=True):
        self.B = B
        self.p = p
        self.mats = np.asarray(mats, dtype=np.int64) % p
        self.k = self.mats.shape[1]
        if validate:
            for a in range(B.order):
                for s in B.generators:
                    lhs = self.mats[B.mul(a, s)]
                    rhs = (self.mats[a] @ self.mats[s]) % p
                    if not np.array_equal(lhs, rhs):
                        raise InvalidGroupSpec("matrices do not define a representation")

    @classmethod
    def from_generators(cls, B, p, gen_mats):
        k = len(next(iter(gen_mats.values())))
        mats = np.full((B.order, k, k), -1, dtype=np.int64)
        mats[B.identity] = np.eye(k, dtype=np.int64)
        queue = deque([B.identity])
        gens = list(gen_mats)
        gm = {s: np.asarray(m, dtype=np.int64) % p for s, m in gen_mats.items()}
        while queue:
            a = queue.popleft()
            for s in gens:
                b = B.mul(a, s)
                m = (mats[a] @ gm[s]) % p
                if mats[b][0, 0] < 0:
                    mats[b] = m
                    queue.append(b)
                elif not np.array_equal(mats[b], m):
                    raise InvalidGroupSpec("generator matrices violate a relation")
        if (mats < 0).any():
            raise InvalidGroupSpec("generator set does not generate B")
        return cls(B, p, mats)

    @property
    def order(self):
        return self.p ** self.k

    def act(self, b, v):
        return (self.mats[b] @ np.asarray(v, dtype=np.int64)) % self.p

    def is_irreducible(self):
        p, k = self.p, self.k
        gens = [self.mats[s] for s in self.B.generators]
        seen_lines = set()
        for i in range(1, p ** k):
            v = np.array(index_vec(i, p, k), dtype=np.int64)
            lead = next(x for x in v if x)
            v = (v * pow(int(lead), -1, p)) % p
            key = tuple(v)
            if key in seen_lines:
                continue
            seen_lines.add(key)
            span = v[None, :]
            r = 1
            while True:
                new = np.vstack([span] + [(span @ g.T) % p for g in gens])
                span = row_space(new, p)
                if len(span) == r:
                    break
                r = len(span)
            if r < k:
                return False
        return True

    def hom_space(self, other: "ModuleRep"):
        """Basis of Hom_B(self, other) as (k_other x k_self) matrices."""
        p, k1, k2 = self.p, self.k, other.k
        rows = []
        for s in self.B.generators:
            A, C = self.mats[s], other.mats[s]
            # X A - C X = 0 with X of shape (k2, k1), unknown x[i*k1 + j]
            for i in range(k2):
                for j in range(k1):
                    row = np.zeros(k2 * k1, dtype=np.int64)
                    for t in range(k1):
                        row[i * k1 + t] += A[t, j]
                    for t in range(k2):
                        row[t * k1 + j] -= C[i, t]
                    rows.append(row % p)
        N = nullspace(np.array(rows), p) if rows else np.eye(k1 * k2, dtype=np.int64)
        return [v.reshape(k2, k1) for v in N]

    @cached_property
    def endomorphism_basis(self):
        return self.hom_space(self)

    @property
    def h(self):
        """|Hom_B(M, M)|."""
        return self.p ** len(self.endomorphism_basis)

    def automorphisms(self):
        """All invertible B-endomorphisms as matrices."""
        p = self.p
        basis = self.endomorphism_basis
        out = []
        for coeffs in product(range(p), repeat=len(basis)):
            X = sum((c * b for c, b in zip(coeffs, basis)), np.zeros((self.k, self.k), dtype=np.int64)) % p
            if rank(X, p) == self.k:
                out.append(X)
        return out

    def isomorphic(self, other: "ModuleRep"):
        if self.p != other.p or self.k != other.k:
            return False
        for X in self._hom_elements(other):
            if rank(X, self.p) == self.k:
                return True
        return False

    def _hom_elements(self, other):
        basis = self.hom_space(other)
        p = self.p
        for coeffs in product(range(p), repeat=len(basis)):
            if any(coeffs):
                yield sum((c * b for c, b in zip(coeffs, basis)), np.zeros((other.k, self.k), dtype=np.int64)) % p

    def vector_group(self):
        from .groups import abelian_group
        return abelian_group([self.p] * self.k)

    def element_perm(self, b):
        """Permutation of vector indices induced by b."""
        p, k = self.p, self.k
        M = self.mats[b]
        out = []
        for i in range(p ** k):
            v = np.array(index_vec(i, p, k), dtype=np.int64)
            out.append(vec_index((M @ v) % p, p))
        return out

    def gamma_group(self, H: GammaGroup) -> GammaGroup:
        """The underlying Gamma-group of the module (Gamma inside B = H x| Gamma)."""
        B = H.semidirect
        V = self.vector_group()
        act = np.array([self.element_perm(B.embed_Q[c]) for c in range(H.Gamma.order)])
        return GammaGroup(V, H.Gamma, act, H.gamma_generators, validate=False)

    def is_h_trivial(self, H: GammaGroup):
        B = H.semidirect
        return all(np.array_equal(self.mats[B.embed_N[x]], np.eye(self.k, dtype=np.int64))
                   for x in H.G.generators)

    def describe(self):
        return {"p": self.p, "k": self.k,
                "generator_matrices": {int(s): self.mats[s].tolist() for s in self.B.generators}}


def irreducible_modules(B: FiniteGroup, p, k, budgets=DEFAULT_BUDGETS):
    """Irreducible F_p[B]-modules of dimension k, one per isomorphism class."""
    GL, mats = general_linear(k, p, cap=budgets.max_group_order)
    found = []
    for f in iter_homs(B, GL, budgets=budgets):
        rep = ModuleRep(B, p, np.array([mats[int(x)] for x in f]), validate=False)
        if not rep.is_irreducible():
            continue
        if any(rep.isomorphic(q) for q in found):
            continue
        found.append(rep)
    return found


def trivial_module(B, p):
    return ModuleRep(B, p, np.ones((B.order, 1, 1), dtype=np.int64), validate=False)


# -- presentations and second cohomology ------------------------------------------------

class CayleyPresentation:
    """Schreier data for the presentation of B on its generators.

    Words are tuples of nonzero ints: +i+1 for generator i, -(i+1) for its inverse.
    """

    def __init__(self, B: FiniteGroup, gens=None):
        self.B = B
        self.gens = list(B.generators if gens is None else gens)
        words = {B.identity: ()}
        tree = set()
        queue = deque([B.identity])
        while queue:
            a = queue.popleft()
            for i, x in enumerate(self.gens):
                b = B.mul(a, x)
                if b not in words:
                    words[b] = words[a] + (i + 1,)
                    tree.add((a, i))
                    queue.append(b)
        if len(words) != B.order:
            raise InvalidGroupSpec("generators do not generate B")
        self.words = words
        self.schreier = [(a, i) for a in range(B.order) for i in range(len(self.gens))
                         if (a, i) not in tree]
        self.s_index = {s: j for j, s in enumerate(self.schreier)}

    @property
    def nschreier(self):
        return len(self.schreier)

    def inverse_word(self, w):
        return tuple(-x for x in reversed(w))

    def rewrite(self, word):
        """Abelianized Reidemeister-Schreier rewrite of a relator word (dict s -> coeff)."""
        B = self.B
        c = B.identity
        out = {}
        for letter in word:
            i = abs(letter) - 1
            x = self.gens[i]
            if letter > 0:
                j = self.s_index.get((c, i))
                if j is not None:
                    out[j] = out.get(j, 0) + 1
                c = B.mul(c, x)
            else:
                c = B.mul(c, B.inverse(x))
                j = self.s_index.get((c, i))
                if j is not None:
                    out[j] = out.get(j, 0) - 1
        if c != B.identity:
            raise InternalCheckFailed("rewritten word is not a relator")
        return out

    def schreier_word(self, j):
        a, i = self.schreier[j]
        b = self.B.mul(a, self.gens[i])
        return self.words[a] + (i + 1,) + self.inverse_word(self.words[b])

    def element_of(self, word):
        B = self.B
        c = B.identity
        for letter in word:
            x = self.gens[abs(letter) - 1]
            c = B.mul(c, x if letter > 0 else B.inverse(x))
        return c

    @cached_property
    def product_relators(self):
        """Rewrite vectors of w_g w_h w_{gh}^-1 for all g, h (dicts)."""
        B, W = self.B, self.words
        out = {}
        for g in range(B.order):
            for h in range(B.order):
                gh = B.mul(g, h)
                out[(g, h)] = self.rewrite(W[g] + W[h] + self.inverse_word(W[gh]))
        return out


class SecondCohomology:
    """H^2(B, M) for an F_p[B]-module M."""

    def __init__(self, module: ModuleRep, pres: CayleyPresentation | None = None):
        self.M = module
        B, p, k = module.B, module.p, module.k
        self.pres = pres or CayleyPresentation(B)
        P = self.pres
        nS, nX = P.nschreier, len(P.gens)
        dim = nS * k
        # Hom_B(R^ab, M): phi(x s x^-1) = rho(x) phi(s)
        rows = []
        for j in range(nS):
            w = P.schreier_word(j)
            for i, x in enumerate(P.gens):
                v = P.rewrite((i + 1,) + w + (-(i + 1),))
                block = np.zeros((k, dim), dtype=np.int64)
                for t, c in v.items():
                    block[:, t * k:(t + 1) * k] += c * np.eye(k, dtype=np.int64)
                block[:, j * k:(j + 1) * k] -= module.mats[x]
                rows.append(block % p)
        A = np.vstack(rows) if rows else np.zeros((0, dim), dtype=np.int64)
        self.Z = nullspace(A, p) if dim else np.zeros((0, 0), dtype=np.int64)
        # derivations d: delta(x_i) = d_i, restricted to Schreier generators
        D = np.zeros((dim, nX * k), dtype=np.int64)
        mats = module.mats
        for j in range(nS):
            w = P.schreier_word(j)
            c = B.identity
            for letter in w:
                i = abs(letter) - 1
                x = P.gens[i]
                if letter > 0:
                    D[j * k:(j + 1) * k, i * k:(i + 1) * k] += mats[c]
                    c = B.mul(c, x)
                else:
                    c = B.mul(c, B.inverse(x))
                    D[j * k:(j + 1) * k, i * k:(i + 1) * k] -= mats[c]
        D %= p
        self.Bd = row_space(D.T, p) if dim else np.zeros((0, 0), dtype=np.int64)
        # sanity: derivations land in the cocycle space
        if len(self.Bd) and rank(np.vstack([self.Z, self.Bd]), p) != len(self.Z):
            raise InternalCheckFailed("coboundaries outside the cocycle space")
        self.C = complement_basis(self.Bd, self.Z, p) if len(self.Z) else np.zeros((0, dim), dtype=np.int64)
        self.dim = len(self.C)

    @property
    def order(self):
        return self.M.p ** self.dim

    def representative(self, coords):
        p = self.M.p
        v = np.zeros(self.pres.nschreier * self.M.k, dtype=np.int64)
        for c, b in zip(coords, self.C):
            v = (v + c * b) % p
        return v

    def coordinates(self, phi):
        """Coordinates of the class of phi in the chosen complement basis."""
        p = self.M.p
        basis = np.vstack([self.C, self.Bd]) if len(self.Bd) else self.C
        if len(basis) == 0:
            return ()
        x = solve(basis.T, phi, p)
        if x is None:
            raise InternalCheckFailed("vector is not a cocycle")
        return tuple(int(c) for c in x[:self.dim])

    def classes(self):
        return list(product(range(self.M.p), repeat=self.dim))

    def act_by_module_aut(self, X, coords):
        """Class of X o phi."""
        k, p = self.M.k, self.M.p
        phi = self.representative(coords).reshape(-1, k)
        return self.coordinates(((phi @ X.T) % p).reshape(-1))

    def cocycle(self, phi):
        """f[g, h] in F_p^k with sigma(g) sigma(h) = f(g,h) sigma(gh)."""
        B, k, p = self.M.B, self.M.k, self.M.p
        phi = np.asarray(phi, dtype=np.int64).reshape(-1, k)
        f = np.zeros((B.order, B.order, k), dtype=np.int64)
        for (g, h), v in self.pres.product_relators.items():
            acc = np.zeros(k, dtype=np.int64)
            for t, c in v.items():
                acc += c * phi[t]
            f[g, h] = acc % p
        return f


def extension_group(module: ModuleRep, f):
    """The group M x B with (a,g)(b,h) = (a + g.b + f(g,h), gh); index a + |M| g."""
    B, p, k = module.B, module.p, module.k
    nM = p ** k
    vecs = np.array([index_vec(i, p, k) for i in range(nM)], dtype=np.int64).reshape(nM, k)
    weights = p ** np.arange(k)
    # g.b for all g, b as indices
    gb = np.einsum("gij,bj->gbi", module.mats, vecs) % p
    gb_idx = (gb * weights).sum(-1)                                   # (|B|, nM)
    n = nM * B.order
    idx = np.arange(n)
    a, g = idx % nM, idx // nM
    va = vecs[a]                                                       # (n, k)
    vb = vecs[gb_idx[g[:, None], a[None, :]]]                          # (n, n, k)
    fv = f[g[:, None], g[None, :]]                                     # (n, n, k)
    s = (va[:, None, :] + vb + fv) % p
    aidx = (s * weights).sum(-1)
    table = aidx + nM * B.table[g[:, None], g[None, :]]
    return FiniteGroup(table, identity=0 + nM * B.identity, validate=False)


# -- H-extensions ------------------------------------------------------------------

@dataclass
class HExtension:
    E: GammaGroup
    H: GammaGroup
    proj: tuple          # proj[e] in H
    kernel: frozenset
    module: ModuleRep | None = None
    label: str = ""

    def check(self):
        E, H = self.E, self.H
        # surjective, equivariant, homomorphism
        pr = np.asarray(self.proj)
        if len(set(self.proj)) != H.order:
            raise InternalCheckFailed("projection is not surjective")
        if not np.array_equal(pr[E.G.table], H.G.table[pr[:, None], pr[None, :]]):
            raise InternalCheckFailed("projection is not a homomorphism")
        if not np.array_equal(pr[E.act], H.act[:, pr]):
            raise InternalCheckFailed("projection is not equivariant")
        if not E.is_gamma_stable(self.kernel) or not E.G.is_normal(self.kernel):
            raise InternalCheckFailed("kernel is not a normal Gamma-subgroup")
        return True

    def fiber(self, h):
        return [e for e, x in enumerate(self.proj) if x == h]

    @cached_property
    def aut_count(self):
        """|Aut_{Gamma,H}(E, pi)|: equivariant automorphisms commuting with pi."""
        fibers = {}
        for e, x in enumerate(self.proj):
            fibers.setdefault(x, []).append(e)
        count = 0
        for _ in iter_equivariant_homs(self.E, self.E, injective=True,
                                       candidates=lambda t: fibers[self.proj[t]]):
            count += 1
        return count

    def poset(self):
        return mobius_poset(self)


@dataclass
class ExtensionPoset:
    top: HExtension
    nodes: list
    mobius: dict   # node -> nu(node, E)

    def y_size(self, D):
        E = self.top.E
        return sum(1 for y in E.y_image if all(x in D for x in y))


def mobius_poset(ext: HExtension) -> ExtensionPoset:
    E = ext.E
    H_order = ext.H.order
    nodes = [D for D in E.gamma_subgroups if len({ext.proj[x] for x in D}) == H_order]
    top = frozenset(range(E.order))
    mu = mobius_top(nodes, top)
    nodes.sort(key=lambda D: (len(D), sorted(D)))
    return ExtensionPoset(ext, nodes, mu)


def _complement_over_gamma(Et: FiniteGroup, nM, B, Gamma_embed, gamma_gens):
    """Elements over Gamma forming a complement to M: dict c -> element of Et."""
    orders = Et.orders
    lifts = []
    for c in gamma_gens:
        g = Gamma_embed[c]
        lifts.append([a + nM * g for a in range(nM)])
    Gorder = len(Gamma_embed)
    for choice in product(*lifts):
        S = Et.closure(list(choice))
        if len(S) == Gorder:
            over = {}
            for x in S:
                over[x // nM] = x
            return {c: over[Gamma_embed[c]] for c in range(Gorder)}
    raise InternalCheckFailed("no complement to the kernel over Gamma")


def extension_from_class(H: GammaGroup, module: ModuleRep, coh: SecondCohomology, coords):
    """The H-extension attached to a class of H^2(H x| Gamma, M)."""
    B = H.semidirect
    phi = coh.representative(coords)
    f = coh.cocycle(phi)
    Et = extension_group(module, f)
    nM = module.order
    comp = _complement_over_gamma(Et, nM, B, B.embed_Q, H.Gamma.generators)
    Hset = set(B.embed_N)
    elems = [x for x in range(Et.order) if (x // nM) in Hset]
    Esub = Et.subgroup(elems)
    pos = Esub.index_in
    act = np.array([[pos[Et.conj(comp[c], x)] for x in Esub.parent_index]
                    for c in range(H.Gamma.order)])
    E = GammaGroup(Esub, H.Gamma, act, H.gamma_generators, validate=True)
    Hpos = {b: i for i, b in enumerate(B.embed_N)}
    proj = tuple(Hpos[x // nM] for x in Esub.parent_index)
    kernel = frozenset(pos[a + nM * B.embed_N[H.G.identity]] for a in range(nM))
    ext = HExtension(E, H, proj, kernel, module, label=f"class{tuple(coords)}")
    ext.check()
    return ext


def enumerate_h_extensions(H: GammaGroup, kernel, level: LevelSet | None = None,
                           kernel_mode="abelian", require_admissible=True,
                           budgets=DEFAULT_BUDGETS):
    """Admissible H-extensions with the given kernel, up to isomorphism.

    Abelian mode: ``kernel`` is a ModuleRep over B = H x| Gamma; extensions
    are the orbits of Aut_B(M) on H^2(B, M).  Nonabelian mode: ``kernel``
    is a centerless Gamma-group and extensions come from the fiber product
    B x_{Out K} Aut(K).
    """
    if kernel_mode == "abelian":
        exts = _abelian_extensions(H, kernel)
    elif kernel_mode == "nonabelian":
        exts = _nonabelian_extensions(H, kernel, budgets)
    else:
        raise PreconditionError(f"unknown kernel mode {kernel_mode}")
    out = []
    for ext in exts:
        if require_admissible and not ext.E.admissible:
            continue
        if level is not None and not level.contains(ext.E):
            continue
        out.append(ext)
    return out


def _abelian_extensions(H, module):
    if module.B.order != H.semidirect.order:
        raise PreconditionError("module is not over H x| Gamma")
    if H.Gamma.order % module.p == 0:
        raise PreconditionError("kernel order must be prime to |Gamma|")
    coh = SecondCohomology(module)
    auts = module.automorphisms()
    seen = set()
    out = []
    for cls in coh.classes():
        if cls in seen:
            continue
        orbit = {coh.act_by_module_aut(X, cls) for X in auts}
        seen |= orbit
        out.append(extension_from_class(H, module, coh, min(orbit)))
    return out


def h_extensions_isomorphic(a: HExtension, b: HExtension):
    if a.E.order != b.E.order:
        return False
    fibers = {}
    for e, x in enumerate(b.proj):
        fibers.setdefault(x, []).append(e)
    for _ in iter_equivariant_homs(a.E, b.E, injective=True,
                                   candidates=lambda t: fibers[a.proj[t]]):
        return True
    return False


def _nonabelian_extensions(H: GammaGroup, K: GammaGroup, budgets):
    """Extensions of H by a centerless kernel K (with prescribed Gamma-structure)."""
    if len(K.G.center) != 1:
        raise PreconditionError("nonabelian mode needs a centerless kernel")
    from .groups import quotient as gquot
    B = H.semidirect
    auts = automorphisms(K.G, budgets)
    A, elems = from_perms(auts, cap=len(auts) + 1)
    perm_index = {tuple(e): i for i, e in enumerate(elems)}
    inner = frozenset(perm_index[tuple(K.G.conj(g, x) for x in range(K.order))]
                      for g in range(K.order))
    Out, q = gquot(A, inner)
    results = []
    for psi in iter_homs(B, Out, budgets=budgets):
        # fiber product F = {(b, a) : psi(b) = q(a)} as pairs of indices
        pairs = [(b, a) for b in range(B.order) for a in range(A.order)
                 if psi[b] == q.images[a]]
        index = {pr: i for i, pr in enumerate(pairs)}
        table = np.array([[index[(B.mul(b1, b2), A.mul(a1, a2))] for (b2, a2) in pairs]
                          for (b1, a1) in pairs])
        F = FiniteGroup(table, identity=index[(B.identity, A.identity)], validate=False)
        nK = K.order
        # Gamma-complement over the embedded Gamma
        over_gamma = {}
        for c in range(H.Gamma.order):
            over_gamma[c] = [i for i, (b, a) in enumerate(pairs) if b == B.embed_Q[c]]
        comp = None
        for choice in product(*(over_gamma[c] for c in H.Gamma.generators)):
            S = F.closure(list(choice))
            if len(S) == H.Gamma.order:
                comp = {pairs[x][0]: x for x in S}
                break
        if comp is None:
            continue
        Hset = set(B.embed_N)
        elems_E = [i for i, (b, a) in enumerate(pairs) if b in Hset]
        Esub = F.subgroup(elems_E)
        pos = Esub.index_in
        act = np.array([[pos[F.conj(comp[B.embed_Q[c]], x)] for x in Esub.parent_index]
                        for c in range(H.Gamma.order)])
        E = GammaGroup(Esub, H.Gamma, act, H.gamma_generators)
        Hpos = {b: i for i, b in enumerate(B.embed_N)}
        proj = tuple(Hpos[pairs[x][0]] for x in Esub.parent_index)
        kern = frozenset(pos[index[(B.identity, a)]] for a in inner)
        ext = HExtension(E, H, proj, kern, None, label="nonabelian")
        ext.check()
        Kimg = E.restrict(kern)
        if gamma_isomorphism(Kimg, K) is None:
            continue
        if any(h_extensions_isomorphic(ext, r) for r in results):
            continue
        results.append(ext)
    return results
