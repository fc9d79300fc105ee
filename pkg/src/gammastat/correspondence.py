"""Surjections G -> H x| Gamma versus quadruples (rho, N, s, phi), checked on
finite ambient groups."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .config import DEFAULT_BUDGETS
from .errors import InternalCheckFailed
from .gamma import GammaGroup, iter_equivariant_homs
from .groups import FiniteGroup, GroupHom, all_subgroups, enumerate_homs, iter_homs, quotient


@dataclass(frozen=True)
class Quadruple:
    rho: tuple            # images of G in Gamma
    N: frozenset
    s: tuple              # s[gamma] = least element of G in the coset
    phi: tuple            # sorted pairs (least element of a coset of ker rho / N, h)


@dataclass
class DecompositionRecord:
    ambient: FiniteGroup
    target: GammaGroup
    surjections: list
    quadruples: list
    independent_count: int = 0
    round_trip: bool = False

    @property
    def consistent(self):
        return self.round_trip and len(self.surjections) == len(self.quadruples) == self.independent_count


class _QuotientData:
    """G/N with coset labels by least element."""

    def __init__(self, G, N):
        self.G = G
        self.N = N
        self.Q, self.proj = quotient(G, N)
        imgs = self.proj.images
        least = {}
        for g in range(G.order):
            least.setdefault(imgs[g], g)
        self.least = least           # coset index -> least element
        self.coset = imgs


def _quadruple_of(psi: GroupHom, H: GammaGroup, B) -> Quadruple:
    G = psi.source
    nH = H.order
    img = psi.images
    rho = tuple(x // nH for x in img)
    N = frozenset(g for g in range(G.order) if img[g] == B.identity)
    qd = _QuotientData(G, N)
    s = []
    for gam in range(H.Gamma.order):
        target = B.embed_Q[gam]
        g = next(x for x in range(G.order) if img[x] == target)
        s.append(qd.least[qd.coset[g]])
    phi = []
    for ci, g in qd.least.items():
        if rho[g] == H.Gamma.identity:
            phi.append((g, img[g] % nH))
    return Quadruple(rho, N, tuple(s), tuple(sorted(phi)))


def _surjection_of(quad: Quadruple, G: FiniteGroup, H: GammaGroup, B):
    """Inverse map: g -> (phi(g s(rho g)^-1), rho g)."""
    qd = _QuotientData(G, quad.N)
    phi = dict(quad.phi)
    phi_by_coset = {qd.coset[g]: h for g, h in phi.items()}
    s_coset = [qd.coset[x] for x in quad.s]
    Q = qd.Q
    images = []
    for g in range(G.order):
        gam = quad.rho[g]
        k = Q.mul(qd.coset[g], Q.inverse(s_coset[gam]))
        h = phi_by_coset[k]
        images.append(B.mul(B.embed_N[h], B.embed_Q[gam]))
    return GroupHom(G, B, images)


def _check_quadruple(quad: Quadruple, G, H: GammaGroup):
    Gamma = H.Gamma
    rho = quad.rho
    if len(set(rho)) != Gamma.order:
        raise InternalCheckFailed("rho not surjective")
    GroupHom(G, Gamma, rho)   # validates the hom property
    if not G.is_normal(quad.N) or any(rho[x] != Gamma.identity for x in quad.N):
        raise InternalCheckFailed("N not normal inside ker rho")
    qd = _QuotientData(G, quad.N)
    Q = qd.Q
    sc = [qd.coset[x] for x in quad.s]
    for a in range(Gamma.order):
        if rho[quad.s[a]] != a:
            raise InternalCheckFailed("rho o s != id")
        for b in range(Gamma.order):
            if Q.mul(sc[a], sc[b]) != sc[Gamma.mul(a, b)]:
                raise InternalCheckFailed("s is not a homomorphism")
    phi = {qd.coset[g]: h for g, h in quad.phi}
    if sorted(phi.values()) != list(range(H.order)):
        raise InternalCheckFailed("phi is not a bijection")
    for k1, h1 in phi.items():
        for k2, h2 in phi.items():
            if phi[Q.mul(k1, k2)] != H.G.mul(h1, h2):
                raise InternalCheckFailed("phi is not a homomorphism")
        for a in range(Gamma.order):
            if phi[Q.conj(sc[a], k1)] != H._act[a][h1]:
                raise InternalCheckFailed("phi is not equivariant for the s-action")


def decompose_surjections(G: FiniteGroup, H: GammaGroup, budgets=DEFAULT_BUDGETS) -> DecompositionRecord:
    B = H.semidirect
    surj = enumerate_homs(G, B, surjective_only=True, budgets=budgets)
    quads = []
    for psi in surj:
        q = _quadruple_of(psi, H, B)
        _check_quadruple(q, G, H)
        back = _surjection_of(q, G, H, B)
        if back.images != psi.images:
            raise InternalCheckFailed("round trip failed")
        quads.append(q)
    rec = DecompositionRecord(G, H, surj, quads)
    rec.round_trip = len(set(quads)) == len(quads)
    direct = enumerate_quadruples(G, H, budgets)
    rec.independent_count = len(direct)
    if set(direct) != set(quads):
        raise InternalCheckFailed("independent quadruple enumeration disagrees")
    return rec


def _normal_subgroups(G):
    return [S for S in all_subgroups(G) if G.is_normal(S)]


def enumerate_quadruples(G: FiniteGroup, H: GammaGroup, budgets=DEFAULT_BUDGETS):
    """The quadruple set built directly from its defining conditions."""
    Gamma = H.Gamma
    out = []
    normals = _normal_subgroups(G)
    for rho_h in enumerate_homs(G, Gamma, surjective_only=True, budgets=budgets):
        rho = rho_h.images
        ker = frozenset(g for g in range(G.order) if rho[g] == Gamma.identity)
        for N in normals:
            if not N <= ker or len(ker) != len(N) * H.order:
                continue
            for sec, qd, K in _sections(G, rho, N, ker, Gamma):
                for phi in _isoms(qd, K, sec, H):
                    out.append(Quadruple(tuple(rho), N, tuple(qd.least[x] for x in sec), phi))
    return out


def _sections(G, rho, N, ker, Gamma):
    qd = _QuotientData(G, N)
    Q = qd.Q
    rho_q = [rho[qd.least[i]] for i in range(Q.order)]
    K = sorted({qd.coset[g] for g in ker})
    cands = {a: [i for i in range(Q.order) if rho_q[i] == a] for a in range(Gamma.order)}
    gens = Gamma.generators
    for f in iter_homs(Gamma, Q, candidates=[cands[a] for a in gens] if gens else None):
        yield tuple(int(x) for x in f), qd, K


def _isoms(qd: _QuotientData, K, sec, H: GammaGroup):
    """Gamma-isomorphisms ker rho / N -> H for the action through the section."""
    Q = qd.Q
    Ksub = Q.subgroup(K)
    pos = Ksub.index_in
    act = np.array([[pos[Q.conj(sec[a], x)] for x in Ksub.parent_index] for a in range(H.Gamma.order)])
    A = GammaGroup(Ksub, H.Gamma, act, H.gamma_generators, validate=False)
    for f in iter_equivariant_homs(A, H, injective=True):
        pairs = [(qd.least[Ksub.parent_index[i]], int(f[i])) for i in range(Ksub.order)]
        yield tuple(sorted(pairs))


@dataclass
class RenormalizationReport:
    per_pair: dict = field(default_factory=dict)   # (rho, N) -> (sections, phi counts per section)
    y_size: int = 0
    passed: bool = False
    surjections: int = 0
    renormalized_total: object = None


def section_renormalization_check(G: FiniteGroup, H: GammaGroup, record: DecompositionRecord | None = None):
    record = record or decompose_surjections(G, H)
    y = len(H.y_image)
    groups = {}
    for q in record.quadruples:
        groups.setdefault((q.rho, q.N), Counter())[q.s] += 1
    rep = RenormalizationReport(y_size=y, surjections=len(record.surjections))
    ok = True
    for key, cnt in groups.items():
        # every section of G/N -> Gamma, not only those carrying a phi
        rho, N = key
        ker = frozenset(g for g in range(G.order) if rho[g] == H.Gamma.identity)
        nsec = sum(1 for _ in _sections(G, rho, N, ker, H.Gamma))
        counts = sorted(cnt.values())
        rep.per_pair[key] = (nsec, counts)
        if nsec != y or len(cnt) != y or len(set(counts)) != 1:
            ok = False
    rep.renormalized_total = Fraction(len(record.surjections), y)
    rep.passed = ok
    return rep
