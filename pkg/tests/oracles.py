"""Slow, obviously-correct reference computations for the test suite.

Nothing here imports the search / homology / sampling code it is used to
check; only the plain group tables are shared.
"""

from fractions import Fraction
from itertools import product


def table_homs(G, H):
    """All homomorphisms G -> H as image tuples, by brute force over the
    images of G.generators and a check on the whole table."""
    gens = list(G.generators)
    out = []
    for imgs in product(range(H.order), repeat=len(gens)):
        f = {G.identity: H.identity}
        frontier = [G.identity]
        ok = True
        while frontier and ok:
            nxt = []
            for a in frontier:
                for g, x in zip(gens, imgs):
                    b = G.mul(a, g)
                    y = H.mul(f[a], x)
                    if b in f:
                        if f[b] != y:
                            ok = False
                            break
                    else:
                        f[b] = y
                        nxt.append(b)
            frontier = nxt
        if not ok or len(f) != G.order or any(f[g] != x for g, x in zip(gens, imgs)):
            continue
        if all(f[G.mul(a, b)] == H.mul(f[a], f[b]) for a in range(G.order) for b in range(G.order)):
            out.append(tuple(f[g] for g in range(G.order)))
    return sorted(set(out))


def equivariant_homs(A, B, surjective=False):
    out = []
    for f in table_homs(A.G, B.G):
        if all(f[A.act[c][x]] == B.act[c][f[x]] for c in range(A.Gamma.order) for x in range(A.order)):
            if not surjective or len(set(f)) == B.order:
                out.append(f)
    return out


def fp_rank(rows, p):
    rows = [[x % p for x in r] for r in rows]
    rank, col = 0, 0
    ncols = len(rows[0]) if rows else 0
    while rank < len(rows) and col < ncols:
        piv = next((i for i in range(rank, len(rows)) if rows[i][col]), None)
        if piv is None:
            col += 1
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        inv = pow(rows[rank][col], -1, p)
        rows[rank] = [x * inv % p for x in rows[rank]]
        for i in range(len(rows)):
            if i != rank and rows[i][col]:
                c = rows[i][col]
                rows[i] = [(x - c * y) % p for x, y in zip(rows[i], rows[rank])]
        rank += 1
        col += 1
    return rank


def h2_fp_dimension(G, p):
    """dim H^2(G, F_p) from the raw cocycle identity on all of G x G x G."""
    n = G.order
    var = {(g, h): i for i, (g, h) in enumerate(product(range(n), repeat=2))}
    rows = []
    for g, h, k in product(range(n), repeat=3):
        r = [0] * len(var)
        # f(h,k) - f(gh,k) + f(g,hk) - f(g,h) = 0
        r[var[h, k]] += 1
        r[var[G.mul(g, h), k]] -= 1
        r[var[g, G.mul(h, k)]] += 1
        r[var[g, h]] -= 1
        rows.append(r)
    z2 = len(var) - fp_rank(rows, p)
    # coboundaries: image of C^1 = F_p^G, kernel = Hom(G, F_p)
    drows = []
    for a in range(n):
        r = [0] * len(var)
        for g, h in product(range(n), repeat=2):
            # (d e_a)(g,h) = e_a(h) - e_a(gh) + e_a(g)
            r[var[g, h]] += (h == a) - (G.mul(g, h) == a) + (g == a)
        drows.append(r)
    b2 = fp_rank(drows, p)
    return z2 - b2


def elementary_quotient_law(p, n, u):
    """For (Z/p)^n with Gamma acting by -1 (p odd): distribution of the
    F_p-codimension of the span of n+u uniform vectors."""
    counts = {}
    vecs = list(product(range(p), repeat=n))
    for rel in product(vecs, repeat=n + u):
        k = n - fp_rank([list(v) for v in rel], p) if rel else n
        counts[k] = counts.get(k, 0) + 1
    total = len(vecs) ** (n + u)
    return {k: Fraction(v, total) for k, v in counts.items()}


def braid_orbit_count(G, c, n):
    """Orbits of the sigma_i on product-one, generating tuples, by union-find."""
    c = sorted(c)
    tuples = []
    for t in product(c, repeat=n):
        acc = G.identity
        for x in t:
            acc = G.mul(acc, x)
        if acc == G.identity and len(G.closure(list(t))) == G.order:
            tuples.append(t)
    parent = {t: t for t in tuples}

    def find(t):
        while parent[t] != t:
            parent[t] = parent[parent[t]]
            t = parent[t]
        return t

    for t in tuples:
        for i in range(n - 1):
            a, b = t[i], t[i + 1]
            s = t[:i] + (G.mul(G.mul(a, b), G.inverse(a)), a) + t[i + 2:]
            ra, rb = find(t), find(s)
            if ra != rb:
                parent[ra] = rb
    return len({find(t) for t in tuples})
