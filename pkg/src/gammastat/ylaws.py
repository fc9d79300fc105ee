"""Exhaustive checks of the Y-map laws on one finite Gamma-group of order
coprime to |Gamma|."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from math import gcd

from .errors import PreconditionError
from .gamma import GammaGroup


@dataclass
class YLawReport:
    name: str
    order: int
    laws: dict = field(default_factory=dict)     # law -> bool
    counts: dict = field(default_factory=dict)   # how many instances each law was tested on

    @property
    def passed(self):
        return all(self.laws.values())

    def to_dict(self):
        return {"name": self.name, "order": self.order, "passed": self.passed,
                "laws": self.laws, "counts": self.counts}


def _fixed_exact(A: GammaGroup, N, Q, proj):
    GF = A.fixed_points
    img = {proj.images[g] for g in GF}
    return img == set(Q.fixed_points) and (GF & N) == {g for g in N if g in GF}


def check_y_laws(A: GammaGroup, name="") -> YLawReport:
    G, Gamma = A.G, A.Gamma
    if gcd(G.order, Gamma.order) != 1:
        raise PreconditionError("Y-map laws need |G| coprime to |Gamma|")
    rep = YLawReport(name or repr(A), G.order)
    yv, Yg, F = A.y_values, A.y_image, A.fixed_points

    # fibers are right cosets F g
    ok = G.order == len(F) * len(Yg)
    fibers = {}
    for g, y in enumerate(yv):
        fibers.setdefault(y, set()).add(g)
    for y, fib in fibers.items():
        g = min(fib)
        ok &= fib == {G.mul(f, g) for f in F}
    rep.laws["fiber_cosets"] = bool(ok)
    rep.counts["fiber_cosets"] = len(fibers)

    exact = sizes = equi = True
    normals = A.normal_gamma_subgroups
    for N in normals:
        Q, proj = A.quotient(N)
        p = proj.images
        exact &= _fixed_exact(A, N, Q, proj)
        YN = {yv[g] for g in N}
        sizes &= len(YN) * len(Q.y_image) == len(Yg)
        over = Counter(tuple(p[x] for x in y) for y in Yg)
        equi &= set(over) == set(Q.y_image) and len(set(over.values())) == 1
    rep.laws["fixed_points_exact"] = bool(exact)
    rep.laws["y_size_multiplicative"] = bool(sizes)
    rep.laws["y_equidistributed"] = bool(equi)
    for k in ("fixed_points_exact", "y_size_multiplicative", "y_equidistributed"):
        rep.counts[k] = len(normals)

    # Y(E) = Y(G) meet E^d for every Gamma-subgroup E
    ok = True
    subs = A.gamma_subgroups
    for E in subs:
        YE = {yv[g] for g in E}
        ok &= YE == {y for y in Yg if all(x in E for x in y)}
    rep.laws["y_of_subgroup"] = bool(ok)
    rep.counts["y_of_subgroup"] = len(subs)

    # admissible: Y-coordinates Gamma-generate G, for any generating set of Gamma
    adm, _ = A.is_admissible()
    ok = True
    if adm:
        alts = [tuple(A.gamma_generators), tuple(g for g in range(Gamma.order) if g != Gamma.identity)]
        alts.append(tuple(Gamma.generators))
        for gg in alts:
            if not gg:
                continue
            B = A.with_generators(gg)
            ok &= len(B.gamma_closure(B.y_coordinates)) == G.order
        rep.counts["admissible_generation"] = len(alts)
    else:
        rep.counts["admissible_generation"] = 0
    rep.laws["admissible_generation"] = bool(ok)
    return rep


def battery():
    """(name, GammaGroup) pairs with |G x| Gamma| <= 200 and |G| coprime to
    |Gamma|, over Gamma = Z/2, Z/3 and S_3."""
    from . import groups as gr
    from .gamma import gamma_group_from_matrices

    out = []
    C2, C3, S3 = gr.cyclic(2), gr.cyclic(3), gr.symmetric(3)

    def power(G, Gamma, exps, label):
        gens = Gamma.generators
        perms = {s: [G.power(x, e % G.exponent) for x in range(G.order)] for s, e in zip(gens, exps)}
        out.append((label, GammaGroup(G, Gamma, perms)))

    s2 = C2.generators[0]
    power(gr.cyclic(3), C2, [-1], "Z3 inv / Z2")
    power(gr.cyclic(5), C2, [-1], "Z5 inv / Z2")
    power(gr.cyclic(9), C2, [-1], "Z9 inv / Z2")
    power(gr.cyclic(15), C2, [-1], "Z15 inv / Z2")
    power(gr.cyclic(3), C2, [1], "Z3 triv / Z2")
    power(gr.abelian_group([3, 3]), C2, [-1], "Z3^2 inv / Z2")
    out.append(("Z3^2 swap / Z2", gamma_group_from_matrices(3, C2, {s2: [[0, 1], [1, 0]]})))
    # Z/7 x| Z/3 with inversion on the normal part
    F21 = gr.semidirect(gr.cyclic(7), C3, {C3.generators[0]: [(2 * i) % 7 for i in range(7)]})
    inv = [((-(x % 7)) % 7) + 7 * (x // 7) for x in range(21)]
    out.append(("F21 / Z2", GammaGroup(F21, C2, {s2: inv})))

    s3 = C3.generators[0]
    out.append(("V4 / Z3", gamma_group_from_matrices(2, C3, {s3: [[0, 1], [1, 1]]})))
    out.append(("Z2^3 cyc / Z3", gamma_group_from_matrices(2, C3, {s3: [[0, 0, 1], [1, 0, 0], [0, 1, 0]]})))
    power(gr.cyclic(7), C3, [2], "Z7 / Z3")
    power(gr.cyclic(13), C3, [3], "Z13 / Z3")
    power(gr.cyclic(2), C3, [1], "Z2 triv / Z3")
    Q8 = gr.quaternion()
    auto = _quaternion_order3(Q8)
    out.append(("Q8 / Z3", GammaGroup(Q8, C3, {s3: auto})))

    # S3 through the sign, and F_5^2 standard representation
    sgn = [0 if _even(S3, g) else 1 for g in range(S3.order)]
    for n in (5, 7, 11):
        Z = gr.cyclic(n)
        perms = {s: [(x if sgn[s] == 0 else -x) % n for x in range(n)] for s in S3.generators}
        out.append((f"Z{n} sign / S3", GammaGroup(Z, S3, perms)))
    mats = {}
    for s in S3.generators:
        mats[s] = _standard_matrix(S3, s)
    out.append(("F5^2 std / S3", gamma_group_from_matrices(5, S3, mats)))
    return out


def _even(S3, g):
    return S3.orders[g] != 2


def _standard_matrix(S3, s):
    # generators are a transposition and a 3-cycle; extend_action rejects a bad pair
    if S3.orders[s] == 2:
        return [[0, 1], [1, 0]]
    return [[0, -1], [1, -1]]


def _quaternion_order3(Q8):
    """i -> j -> k -> i."""
    lab = Q8.labels
    pos = {l: i for i, l in enumerate(lab)}
    rot = {"1": "1", "i": "j", "j": "k", "k": "i"}
    out = []
    for l in lab:
        neg = l.startswith("-")
        u = rot[l.lstrip("-")]
        out.append(pos[("-" if neg else "") + u])
    return out
