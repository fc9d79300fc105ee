"""Finite groups as dense multiplication tables.

Elements are the integers 0..order-1.  Everything downstream (Gamma-groups,
extensions, covers, braid orbits) works with these indices and the table.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from functools import cached_property
from math import gcd

import numpy as np

from .abelian import AbelianNormalForm, AbelianPresentation
from .config import DEFAULT_BUDGETS, Budgets
from .errors import BudgetExceeded, InvalidGroupSpec, NotNormal


class FiniteGroup:
    """A finite group given by its Cayley table.

    ``table[a, b]`` is the index of a*b.  The table is validated on
    construction (latin square, identity, associativity; associativity is
    exhaustive up to ``budgets.assoc_exhaustive`` and sampled above).
    """

    def __init__(self, table, identity=0, generators=None, labels=None, name=None,
                 validate=True, budgets: Budgets = DEFAULT_BUDGETS):
        T = np.ascontiguousarray(np.asarray(table, dtype=np.int64))
        if T.ndim != 2 or T.shape[0] != T.shape[1] or T.shape[0] == 0:
            raise InvalidGroupSpec("table must be a non-empty square array")
        n = T.shape[0]
        if n > budgets.max_group_order:
            raise BudgetExceeded(f"group order {n} above cap {budgets.max_group_order}")
        self.order = n
        self.table = T
        self.identity = int(identity)
        self.name = name
        self.labels = list(labels) if labels is not None else None
        if validate:
            self._validate(budgets)
        e = self.identity
        inv = np.argmax(T == e, axis=1)
        self.inv = inv
        self._t = T.tolist()
        self._inv = inv.tolist()
        if generators is None:
            generators = self.small_generating_set()
        else:
            generators = [int(g) for g in generators]
            if validate and len(self.closure(generators)) != n:
                raise InvalidGroupSpec("generators do not generate the group")
        self.generators = tuple(generators)

    def _validate(self, budgets):
        T, n, e = self.table, self.order, self.identity
        if T.min() < 0 or T.max() >= n:
            raise InvalidGroupSpec("table entries out of range")
        ar = np.arange(n)
        if not (np.array_equal(T[e], ar) and np.array_equal(T[:, e], ar)):
            raise InvalidGroupSpec("identity is not two-sided")
        srt = np.sort(T, axis=1)
        if not (srt == ar).all():
            raise InvalidGroupSpec("table rows are not permutations")
        if not (np.sort(T, axis=0) == ar[:, None]).all():
            raise InvalidGroupSpec("table columns are not permutations")
        if n <= budgets.assoc_exhaustive:
            for a in range(n):
                if not np.array_equal(T[T[a]], T[a][T]):
                    raise InvalidGroupSpec("table is not associative")
        else:
            rng = np.random.default_rng(12345)
            a, b, c = rng.integers(0, n, size=(3, budgets.assoc_samples))
            if not np.array_equal(T[T[a, b], c], T[a, T[b, c]]):
                raise InvalidGroupSpec("table is not associative")

    # -- basic arithmetic ------------------------------------------------
    def mul(self, a, b):
        return self._t[a][b]

    def inverse(self, a):
        return self._inv[a]

    def prod(self, elems):
        t = self._t
        x = self.identity
        for g in elems:
            x = t[x][g]
        return x

    def power(self, a, k):
        if k < 0:
            a, k = self._inv[a], -k
        t = self._t
        r, base = self.identity, a
        while k:
            if k & 1:
                r = t[r][base]
            base = t[base][base]
            k >>= 1
        return r

    def conj(self, g, x):
        """g x g^-1."""
        return self._t[self._t[g][x]][self._inv[g]]

    def commutator(self, a, b):
        t, i = self._t, self._inv
        return t[t[t[a][b]][i[a]]][i[b]]

    def label(self, a):
        return self.labels[a] if self.labels else str(a)

    def __len__(self):
        return self.order

    def __repr__(self):
        return f"FiniteGroup(order={self.order}{', ' + self.name if self.name else ''})"

    # -- element invariants ----------------------------------------------
    @cached_property
    def orders(self):
        n, T, e = self.order, self.table, self.identity
        cur = np.arange(n)
        out = np.zeros(n, dtype=np.int64)
        k = 1
        while (out == 0).any():
            hit = (cur == e) & (out == 0)
            out[hit] = k
            cur = T[cur, np.arange(n)]
            k += 1
        return out.tolist()

    @cached_property
    def exponent(self):
        e = 1
        for o in set(self.orders):
            e = e * o // gcd(e, o)
        return e

    @cached_property
    def is_abelian(self):
        return bool(np.array_equal(self.table, self.table.T))

    @cached_property
    def center(self):
        T = self.table
        return frozenset(int(z) for z in np.nonzero((T == T.T).all(axis=1))[0])

    def conjugates(self, x):
        """Array of g x g^-1 over all g."""
        T = self.table
        return T[T[:, x], self.inv]

    @cached_property
    def conjugacy_classes(self):
        seen = np.zeros(self.order, dtype=bool)
        classes = []
        for x in range(self.order):
            if not seen[x]:
                cl = np.unique(self.conjugates(x))
                seen[cl] = True
                classes.append(tuple(int(c) for c in cl))
        classes.sort(key=lambda c: (len(c), c[0]))
        # identity class first, then by size and least element
        return tuple(classes)

    @cached_property
    def class_of(self):
        out = [0] * self.order
        for i, cl in enumerate(self.conjugacy_classes):
            for x in cl:
                out[x] = i
        return out

    def centralizer_order(self, x):
        return self.order // len(self.conjugacy_classes[self.class_of[x]])

    @cached_property
    def order_census(self):
        counts = {}
        for o in self.orders:
            counts[o] = counts.get(o, 0) + 1
        return tuple(sorted(counts.items()))

    # -- subgroups ------------------------------------------------------------
    def closure(self, gens):
        """Subgroup generated by ``gens`` as a frozenset of indices."""
        t, e = self._t, self.identity
        gens = [g for g in dict.fromkeys(gens) if g != e]
        seen = {e}
        elems = [e]
        i = 0
        while i < len(elems):
            row = t[elems[i]]
            for g in gens:
                b = row[g]
                if b not in seen:
                    seen.add(b)
                    elems.append(b)
            i += 1
        return frozenset(elems)

    def is_subgroup(self, S):
        S = frozenset(S)
        if self.identity not in S:
            return False
        t, i = self._t, self._inv
        return all(t[a][i[b]] in S for a in S for b in S)

    def is_normal(self, N):
        N = frozenset(N)
        return all(self.conj(g, x) in N for g in self.generators for x in N)

    def normal_closure(self, S):
        t = self._t
        gens = list(dict.fromkeys(S))
        K = self.closure(gens)
        changed = True
        while changed:
            changed = False
            for g in self.generators:
                for x in list(gens):
                    y = self.conj(g, x)
                    if y not in K:
                        gens.append(y)
                        K = self.closure(gens)
                        changed = True
        return K

    @cached_property
    def derived_subgroup(self):
        gs = self.generators
        return self.normal_closure([self.commutator(a, b) for a in gs for b in gs])

    @cached_property
    def derived_length(self):
        """Derived length, or -1 if the group is not solvable."""
        cur = frozenset(range(self.order))
        k = 0
        while len(cur) > 1:
            sub = self.subgroup(cur)
            nxt = sub.derived_subgroup
            if len(nxt) == len(cur):
                return -1
            cur = frozenset(sub.parent_index[x] for x in nxt)
            k += 1
        return k

    @property
    def is_solvable(self):
        return self.derived_length >= 0

    def small_generating_set(self, within=None):
        """Greedy generating set, preferring high-order elements."""
        target = frozenset(range(self.order)) if within is None else frozenset(within)
        order = self.orders
        cand = sorted(target, key=lambda g: (-order[g], g))
        gens = []
        cur = frozenset([self.identity])
        for g in cand:
            if len(cur) == len(target):
                break
            if g not in cur:
                gens.append(g)
                cur = self.closure(gens)
        return gens

    def subgroup(self, elems, generators=None):
        """The subgroup on ``elems`` as a new FiniteGroup (sorted reindexing).

        The returned group carries ``parent_index`` (new -> old) and
        ``index_in`` (old -> new) mappings.
        """
        elems = sorted(elems)
        pos = {g: i for i, g in enumerate(elems)}
        arr = np.array(elems)
        sub_t = self.table[np.ix_(arr, arr)]
        lut = np.full(self.order, -1, dtype=np.int64)
        lut[arr] = np.arange(len(elems))
        sub_t = lut[sub_t]
        if (sub_t < 0).any():
            raise InvalidGroupSpec("element set is not closed under multiplication")
        gens = None if generators is None else [pos[g] for g in generators]
        H = FiniteGroup(sub_t, identity=pos[self.identity], generators=gens, validate=False)
        H.parent_index = elems
        H.index_in = pos
        if self.labels:
            H.labels = [self.labels[g] for g in elems]
        return H


# -- constructors -------------------------------------------------------------

def from_right_actions(n, identity, gens, right, **kw):
    """Group table from right-multiplication permutations of the generators.

    ``right[k][x]`` is the index of x * gens[k].  Columns are filled by BFS
    over the Cayley graph: table[:, b*s] = right_s[table[:, b]].
    """
    right = [np.asarray(r, dtype=np.int64) for r in right]
    table = np.full((n, n), -1, dtype=np.int64)
    table[:, identity] = np.arange(n)
    queue = deque([identity])
    filled = {identity}
    while queue:
        b = queue.popleft()
        col = table[:, b]
        for k, s in enumerate(gens):
            bs = int(right[k][b])
            if bs not in filled:
                table[:, bs] = right[k][col]
                filled.add(bs)
                queue.append(bs)
    if len(filled) != n:
        raise InvalidGroupSpec("generators do not reach every element")
    return FiniteGroup(table, identity=identity, generators=gens, **kw)


def from_generators(gens, mul, identity, cap=None, key=None, labeler=None, **kw):
    """Close a generating set of hashable elements under ``mul``.

    Returns the group together with the element list (index -> element).
    """
    cap = cap or DEFAULT_BUDGETS.max_group_order
    key = key or (lambda x: x)
    elems = [identity]
    index = {key(identity): 0}
    right = [[] for _ in gens]
    i = 0
    while i < len(elems):
        x = elems[i]
        for k, s in enumerate(gens):
            y = mul(x, s)
            ky = key(y)
            j = index.get(ky)
            if j is None:
                j = len(elems)
                if j >= cap:
                    raise BudgetExceeded(f"closure exceeds {cap} elements")
                index[ky] = j
                elems.append(y)
            right[k].append(j)
        i += 1
    gen_idx = [index[key(s)] for s in gens]
    labels = [labeler(x) for x in elems] if labeler else None
    G = from_right_actions(len(elems), 0, gen_idx, right, labels=labels, **kw)
    return G, elems


def from_perms(perms, cap=None, **kw):
    """Permutation group; product is composition (x*y)(i) = x(y(i))."""
    perms = [tuple(int(v) for v in p) for p in perms]
    if not perms:
        return trivial_group(), [()]
    deg = max(len(p) for p in perms)
    perms = [p + tuple(range(len(p), deg)) for p in perms]
    for p in perms:
        if sorted(p) != list(range(deg)):
            raise InvalidGroupSpec(f"not a permutation: {p}")
    ident = tuple(range(deg))
    return from_generators(perms, lambda x, y: tuple(x[j] for j in y), ident, cap=cap, **kw)


def parse_cycles(s, degree=None):
    """'(1,2)(3,4,5)' with 1-based points -> 0-based image tuple."""
    s = s.replace(" ", "")
    cycles = []
    for chunk in s.split(")"):
        chunk = chunk.strip("(")
        if chunk:
            cycles.append([int(v) - 1 for v in chunk.split(",")])
    deg = max([degree or 0] + [max(c) + 1 for c in cycles])
    img = list(range(deg))
    for c in cycles:
        for a, b in zip(c, c[1:] + c[:1]):
            img[a] = b
    return tuple(img)


def trivial_group():
    return FiniteGroup([[0]], name="1")


def cyclic(n):
    ar = np.arange(n)
    return FiniteGroup((ar[:, None] + ar[None, :]) % n, generators=[1] if n > 1 else [],
                       name=f"C{n}", labels=[str(i) for i in range(n)])


def semidirect(N: FiniteGroup, Q: FiniteGroup, action, name=None, validate_action=True):
    """N x| Q with Q acting on N.  Element (a, q) has index a + |N| q.

    ``action`` is either a full array (|Q|, |N|) giving act[q][a], or a dict
    from the generator indices of Q to permutations of N, extended along the
    Cayley graph of Q.  Product: (a1,q1)(a2,q2) = (a1 act[q1](a2), q1 q2).
    """
    act = extend_action(Q, N, action) if isinstance(action, dict) else np.asarray(action, dtype=np.int64)
    if validate_action:
        check_action(Q, N, act)
    nN, nQ = N.order, Q.order
    idx = np.arange(nN * nQ)
    a, q = idx % nN, idx // nN
    na = N.table[a[:, None], act[q[:, None], a[None, :]]]
    nq = Q.table[q[:, None], q[None, :]]
    table = na + nN * nq
    G = FiniteGroup(table, identity=N.identity + nN * Q.identity, name=name, validate=False)
    G.semidirect_parts = (N, Q, act)
    G.embed_N = [x + nN * Q.identity for x in range(nN)]
    G.embed_Q = [N.identity + nN * x for x in range(nQ)]
    return G


def direct_product(G: FiniteGroup, H: FiniteGroup, name=None):
    act = np.tile(np.arange(G.order), (H.order, 1))
    return semidirect(G, H, act, name=name, validate_action=False)


def direct_power(G, k):
    out = trivial_group()
    for _ in range(k):
        out = direct_product(out, G)
    return out


def extend_action(Q: FiniteGroup, N: FiniteGroup, gen_action):
    """Extend {q_gen: perm of N} to an array act[q] by BFS on Q."""
    nN = N.order
    act = np.full((Q.order, nN), -1, dtype=np.int64)
    act[Q.identity] = np.arange(nN)
    gens = list(gen_action)
    perms = {s: np.asarray(gen_action[s], dtype=np.int64) for s in gens}
    if len(Q.closure(gens)) != Q.order:
        raise InvalidGroupSpec("action given on a set that does not generate Q")
    queue = deque([Q.identity])
    while queue:
        q = queue.popleft()
        for s in gens:
            qs = Q.mul(q, s)
            img = act[q][perms[s]]
            if act[qs][0] < 0:
                act[qs] = img
                queue.append(qs)
            elif not np.array_equal(act[qs], img):
                raise InvalidGroupSpec("action is not a homomorphism")
    return act


def check_action(Q: FiniteGroup, N: FiniteGroup, act):
    """act[q] must be automorphisms of N and q -> act[q] a homomorphism."""
    T = N.table
    ar = np.arange(N.order)
    for q in range(Q.order):
        p = act[q]
        if not np.array_equal(np.sort(p), ar):
            raise InvalidGroupSpec("action is not a permutation")
        if not np.array_equal(p[T], T[p[:, None], p[None, :]]):
            raise InvalidGroupSpec("action is not by automorphisms")
    for q1 in range(Q.order):
        for q2 in Q.generators:
            if not np.array_equal(act[Q.mul(q1, q2)], act[q1][act[q2]]):
                raise InvalidGroupSpec("action is not a homomorphism into Aut(N)")
    if not np.array_equal(act[Q.identity], ar):
        raise InvalidGroupSpec("identity acts nontrivially")


def abelian_group(orders):
    G = trivial_group()
    for d in orders:
        G = direct_product(G, cyclic(d))
    return G


def dihedral(n):
    """Dihedral group of order 2n as Z/n x| Z/2."""
    N, Q = cyclic(n), cyclic(2)
    act = np.array([np.arange(n), (-np.arange(n)) % n])
    return semidirect(N, Q, act, name=f"D{2*n}")


def quaternion():
    # units +-1, +-i, +-j, +-k as (sign, unit) pairs
    mult = {("1", u): (1, u) for u in "1ijk"}
    mult.update({(u, "1"): (1, u) for u in "1ijk"})
    mult.update({("i", "i"): (-1, "1"), ("j", "j"): (-1, "1"), ("k", "k"): (-1, "1"),
                 ("i", "j"): (1, "k"), ("j", "k"): (1, "i"), ("k", "i"): (1, "j"),
                 ("j", "i"): (-1, "k"), ("k", "j"): (-1, "i"), ("i", "k"): (-1, "j")})

    def mul(x, y):
        s, u = mult[(x[1], y[1])]
        return (x[0] * y[0] * s, u)

    G, elems = from_generators([(1, "i"), (1, "j")], mul, (1, "1"),
                               labeler=lambda x: ("-" if x[0] < 0 else "") + x[1])
    G.name = "Q8"
    return G


def symmetric(n):
    if n <= 1:
        return trivial_group()
    gens = [tuple([1, 0] + list(range(2, n)))]
    if n > 2:
        gens.append(tuple(list(range(1, n)) + [0]))
    G, _ = from_perms(gens)
    G.name = f"S{n}"
    return G


def alternating(n):
    if n <= 2:
        return trivial_group()
    gens = []
    for k in range(2, n):
        p = list(range(n))
        p[0], p[1], p[k] = 1, k, 0
        gens.append(tuple(p))
    G, _ = from_perms(gens)
    G.name = f"A{n}"
    return G


def matrix_group(mats, p, cap=None):
    """Group generated by invertible matrices over F_p."""
    mats = [tuple(tuple(int(v) % p for v in row) for row in m) for m in mats]
    k = len(mats[0])
    ident = tuple(tuple(int(i == j) for j in range(k)) for i in range(k))

    def mul(a, b):
        return tuple(tuple(sum(a[i][t] * b[t][j] for t in range(k)) % p for j in range(k))
                     for i in range(k))
    return from_generators(mats, mul, ident, cap=cap)


def general_linear(k, p, cap=None):
    """GL_k(F_p) as a FiniteGroup (only for small orders)."""
    order = 1
    for i in range(k):
        order *= p ** k - p ** i
    cap = cap or DEFAULT_BUDGETS.max_group_order
    if order > cap:
        raise BudgetExceeded(f"|GL_{k}(F_{p})| = {order} above cap {cap}")
    gens = []
    # a primitive-root diagonal element and elementary transvections
    g = next(x for x in range(1, p) if all(pow(x, (p - 1) // q, p) != 1 for q in _primes(p - 1))) if p > 2 else 1
    d = [[int(i == j) for j in range(k)] for i in range(k)]
    d[0][0] = g
    gens.append(d)
    for i in range(k):
        for j in range(k):
            if i != j:
                m = [[int(a == b) for b in range(k)] for a in range(k)]
                m[i][j] = 1
                gens.append(m)
    G, elems = matrix_group(gens, p, cap=cap)
    if G.order != order:
        raise InvalidGroupSpec("GL generation failed")
    G.name = f"GL{k}({p})"
    return G, elems


def _primes(n):
    out, d = [], 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


def prime_factors(n):
    return _primes(n)


# -- homomorphisms ------------------------------------------------------------

class GroupHom:
    """A homomorphism given by the full image array (validated)."""

    def __init__(self, source: FiniteGroup, target: FiniteGroup, images, validate=True):
        self.source = source
        self.target = target
        self.images = tuple(int(x) for x in images)
        if validate and not is_hom_array(source, target, np.asarray(self.images)):
            raise InvalidGroupSpec("map is not a homomorphism")

    def __call__(self, g):
        return self.images[g]

    @property
    def image_of(self):
        return {g: self.images[g] for g in self.source.generators}

    @cached_property
    def image(self):
        return frozenset(self.images)

    @cached_property
    def kernel(self):
        e = self.target.identity
        return frozenset(g for g, x in enumerate(self.images) if x == e)

    @property
    def is_surjective(self):
        return len(self.image) == self.target.order

    @property
    def is_injective(self):
        return len(self.kernel) == 1

    def compose(self, other: "GroupHom"):
        """self o other."""
        return GroupHom(other.source, self.target, [self.images[x] for x in other.images],
                        validate=False)

    def __eq__(self, other):
        return isinstance(other, GroupHom) and self.images == other.images

    def __hash__(self):
        return hash(self.images)


def is_hom_array(G, H, f):
    f = np.asarray(f, dtype=np.int64)
    return bool(np.array_equal(f[G.table], H.table[f[:, None], f[None, :]]))


def identity_hom(G):
    return GroupHom(G, G, range(G.order), validate=False)


class _Prefix:
    """BFS layers of the subgroup generated by a generator prefix."""

    def __init__(self, G, gens):
        self.gens = list(gens)
        t = G._t
        e = G.identity
        layers = []
        seen = {e}
        frontier = [e]
        while frontier:
            nodes, parents, via = [], [], []
            for a in frontier:
                row = t[a]
                for k, s in enumerate(self.gens):
                    b = row[s]
                    if b not in seen:
                        seen.add(b)
                        nodes.append(b)
                        parents.append(a)
                        via.append(k)
            if nodes:
                layers.append((np.array(nodes), np.array(parents), np.array(via)))
            frontier = nodes
        self.layers = layers
        self.elems = np.array(sorted(seen))
        # edge checks x -> x*s for all x in the subgroup
        self.edge_src = np.repeat(self.elems, len(self.gens))
        self.edge_gen = np.tile(np.arange(len(self.gens)), len(self.elems))
        gens_arr = np.array(self.gens, dtype=np.int64) if self.gens else np.zeros(0, dtype=np.int64)
        self.edge_dst = G.table[self.edge_src, gens_arr[self.edge_gen]] if self.gens else self.edge_src


def _evaluate(prefix, H, imgs, f):
    """Fill f on the prefix subgroup; return False on inconsistency."""
    imgs = np.asarray(imgs, dtype=np.int64)
    for nodes, parents, via in prefix.layers:
        f[nodes] = H.table[f[parents], imgs[via]]
    if len(prefix.gens):
        lhs = f[prefix.edge_dst]
        rhs = H.table[f[prefix.edge_src], imgs[prefix.edge_gen]]
        if not np.array_equal(lhs, rhs):
            return False
    return True


def iter_homs(G: FiniteGroup, H: FiniteGroup, blocks=None, candidates=None, surjective=False,
              injective=False, budgets: Budgets = DEFAULT_BUDGETS, extra_check=None):
    """Yield image arrays of homomorphisms G -> H.

    ``blocks`` is a list; block j is a list of (source_element, transform)
    where transform is None (identity) or an array acting on H.  One free
    choice c_j is made per block and the element source_element is sent to
    transform[c_j].  Plain homomorphisms use one singleton block per
    generator; Gamma-equivariant ones put a generator's Gamma-orbit in a
    block.  ``candidates[j]`` restricts the free choice of block j.
    """
    if blocks is None:
        blocks = [[(g, None)] for g in G.generators]
    nb = len(blocks)
    orders_G, orders_H = G.orders, H.orders
    if candidates is None:
        candidates = [None] * nb
    cand = []
    for j, blk in enumerate(blocks):
        src = blk[0][0]
        pool = range(H.order) if candidates[j] is None else candidates[j]
        if injective:
            c = [x for x in pool if orders_H[x] == orders_G[src]
                 and H.centralizer_order(x) == G.centralizer_order(src)]
        else:
            c = [x for x in pool if orders_G[src] % orders_H[x] == 0]
        cand.append(c)
    space = 1
    for c in cand:
        space *= max(1, len(c))
    # prefix structures
    prefixes = []
    flat = []
    owners = []
    for j, blk in enumerate(blocks):
        for (s, tr) in blk:
            flat.append((s, tr))
            owners.append(j)
        prefixes.append(_Prefix(G, [s for s, _ in flat]))
    if nb and len(prefixes[-1].elems) != G.order:
        raise InvalidGroupSpec("blocks do not generate the source group")
    if nb == 0:
        if G.order != 1:
            raise InvalidGroupSpec("blocks do not generate the source group")
        f = np.array([H.identity])
        if (not surjective or H.order == 1) and (extra_check is None or extra_check(f)):
            yield f
        return
    budget = budgets.hom_search
    visits = 0
    choice = [None] * nb
    f = np.full(G.order, -1, dtype=np.int64)
    f[G.identity] = H.identity

    def images_upto(j):
        out = []
        for jj in range(j + 1):
            for (s, tr) in blocks[jj]:
                c = choice[jj]
                out.append(c if tr is None else int(tr[c]))
        return out

    def rec(j):
        nonlocal visits
        for c in cand[j]:
            visits += 1
            if visits > budget:
                raise BudgetExceeded(f"hom search exceeded {budget} nodes (space {space})")
            choice[j] = c
            imgs = images_upto(j)
            # duplicates in the generator list must agree
            gens_here = prefixes[j].gens
            ok = True
            seen = {}
            for s, x in zip(gens_here, imgs):
                if seen.setdefault(s, x) != x:
                    ok = False
                    break
            if not ok or not _evaluate(prefixes[j], H, imgs, f):
                continue
            if j + 1 == nb:
                img = f.copy()
                if surjective and len(np.unique(img)) != H.order:
                    continue
                if injective and len(np.unique(img)) != G.order:
                    continue
                if extra_check is not None and not extra_check(img):
                    continue
                yield img
            else:
                yield from rec(j + 1)

    yield from rec(0)


def enumerate_homs(G, H, surjective_only=False, budgets=DEFAULT_BUDGETS):
    """All homomorphisms G -> H (surjections if requested), canonically sorted."""
    out = [GroupHom(G, H, f, validate=False) for f in
           iter_homs(G, H, surjective=surjective_only, budgets=budgets)]
    out.sort(key=lambda h: h.images)
    return out


def count_homs_bruteforce(G, H):
    """Independent count: filter every map on generators through the full table."""
    from itertools import product
    gens = list(G.generators)
    count = 0
    words = _words(G, gens)
    for imgs in product(range(H.order), repeat=len(gens)):
        f = np.empty(G.order, dtype=np.int64)
        for g, (k, w) in words.items():
            f[g] = H.prod([imgs[i] for i in w])
        if is_hom_array(G, H, f):
            count += 1
    return count


def _words(G, gens):
    words = {G.identity: (0, ())}
    queue = deque([G.identity])
    while queue:
        a = queue.popleft()
        for i, s in enumerate(gens):
            b = G.mul(a, s)
            if b not in words:
                words[b] = (0, words[a][1] + (i,))
                queue.append(b)
    return words


def word_map(G, gens):
    """Shortest word (tuple of generator positions) for each element."""
    return {g: w for g, (_, w) in _words(G, gens).items()}


@dataclass
class AutomorphismGroup:
    group: FiniteGroup
    perms: list          # perms[i] is the automorphism for element i of group
    inner: frozenset     # indices of inner automorphisms

    @property
    def order(self):
        return self.group.order


def automorphisms(G, budgets=DEFAULT_BUDGETS):
    """All automorphisms of G as image arrays (sorted)."""
    auts = [tuple(int(x) for x in f) for f in iter_homs(G, G, injective=True, budgets=budgets)]
    auts.sort()
    return auts


def automorphism_group(G, budgets=DEFAULT_BUDGETS):
    auts = automorphisms(G, budgets)
    A, elems = from_perms(auts, cap=len(auts) + 1)
    perms = [tuple(e) for e in elems]
    index = {p: i for i, p in enumerate(perms)}
    inner = set()
    for g in range(G.order):
        inner.add(index[tuple(G.conj(g, x) for x in range(G.order))])
    return AutomorphismGroup(A, perms, frozenset(inner))


def quotient(G: FiniteGroup, N):
    """G/N for normal N; returns (Q, projection)."""
    N = frozenset(N)
    if not G.is_normal(N):
        raise NotNormal("subgroup is not normal")
    coset = np.full(G.order, -1, dtype=np.int64)
    Narr = np.array(sorted(N))
    reps = []
    order = [G.identity] + [g for g in range(G.order) if g != G.identity]
    for g in order:
        if coset[g] < 0:
            coset[G.table[g, Narr]] = len(reps)
            reps.append(g)
    R = np.array(reps)
    QT = coset[G.table[np.ix_(R, R)]]
    Q = FiniteGroup(QT, identity=0, generators=None, validate=False)
    gens = sorted(set(int(coset[g]) for g in G.generators) - {0})
    Q.generators = tuple(gens)
    if G.labels:
        Q.labels = [G.labels[r] for r in reps]
    Q.coset_reps = reps
    return Q, GroupHom(G, Q, coset, validate=False)


@dataclass
class Abelianization:
    form: AbelianNormalForm
    group: FiniteGroup
    proj: GroupHom
    coords: list   # coords[g] = normal-form coordinates of the image of g


def abelianization(G: FiniteGroup):
    Q, proj = quotient(G, G.derived_subgroup)
    gens = list(Q.generators)
    # spanning-tree coordinates of each element of Q in Z^gens
    vec = {Q.identity: [0] * len(gens)}
    queue = deque([Q.identity])
    rels = []
    while queue:
        a = queue.popleft()
        for i, s in enumerate(gens):
            b = Q.mul(a, s)
            v = list(vec[a])
            v[i] += 1
            if b not in vec:
                vec[b] = v
                queue.append(b)
    for a in range(Q.order):
        for i, s in enumerate(gens):
            b = Q.mul(a, s)
            v = list(vec[a])
            v[i] += 1
            rels.append([x - y for x, y in zip(v, vec[b])])
    pres = AbelianPresentation(len(gens), rels)
    form = pres.torsion
    qcoords = [pres.coords(vec[a])[0] for a in range(Q.order)]
    # realize each basis vector by an element of G
    basis = []
    for j in range(form.rank):
        target = tuple(int(i == j) for i in range(form.rank))
        q = qcoords.index(target)
        basis.append(next(g for g in range(G.order) if proj.images[g] == q))
    form = AbelianNormalForm(form.cyclic_factors, tuple(basis))
    A = abelian_group(form.cyclic_factors)
    # index of a coordinate tuple inside the iterated direct product
    radix = form.cyclic_factors

    def idx(c):
        k, m = 0, 1
        for x, d in zip(c, radix):
            k += x * m
            m *= d
        return k
    coords = [qcoords[proj.images[g]] for g in range(G.order)]
    images = [idx(c) for c in coords]
    return Abelianization(form, A, GroupHom(G, A, images, validate=True), coords)


@dataclass
class IsoResult:
    iso: GroupHom | None
    reason: str

    def __bool__(self):
        return self.iso is not None


def group_invariants(G):
    return {
        "order": G.order,
        "abelian": G.is_abelian,
        "order_census": G.order_census,
        "center": len(G.center),
        "classes": len(G.conjugacy_classes),
        "derived_length": G.derived_length,
    }


def isomorphism_test(G, H, budgets=DEFAULT_BUDGETS):
    if G.order != H.order:
        return IsoResult(None, "order")
    ig, ih = group_invariants(G), group_invariants(H)
    for k in ("abelian", "order_census", "center", "classes", "derived_length"):
        if ig[k] != ih[k]:
            return IsoResult(None, k)
    for f in iter_homs(G, H, injective=True, budgets=budgets):
        return IsoResult(GroupHom(G, H, f, validate=False), "found")
    return IsoResult(None, "exhaustive search")


# -- subgroup lattices ------------------------------------------------------------

def all_subgroups(G, closure=None, seeds=None, cap=None):
    """All subgroups reachable as joins of the seed subgroups.

    With the default seeds (cyclic subgroups) and closure this is every
    subgroup of G.  Gamma-subgroups are obtained by passing the Gamma-closure
    and Gamma-closures of single elements as seeds.
    """
    cap = cap or DEFAULT_BUDGETS.max_subgroups
    closure = closure or G.closure
    gens_of = {}
    if seeds is None:
        seeds = {}
        for g in range(G.order):
            S = closure([g])
            seeds.setdefault(S, [g])
    base = list(seeds.items())
    trivial = closure([])
    gens_of[trivial] = []
    for S, gs in base:
        gens_of.setdefault(S, list(gs))
    frontier = [S for S, _ in base]
    while frontier:
        new = []
        for A in frontier:
            for C, gs in base:
                if C <= A:
                    continue
                J = closure(gens_of[A] + gs)
                if J not in gens_of:
                    gens_of[J] = gens_of[A] + list(gs)
                    new.append(J)
                    if len(gens_of) > cap:
                        raise BudgetExceeded(f"more than {cap} subgroups")
        frontier = new
    return gens_of


def mobius_top(subs, top):
    """Moebius values mu(K, top) for every K in ``subs`` below ``top``."""
    below = sorted((K for K in subs if K <= top), key=len, reverse=True)
    mu = {}
    for K in below:
        if K == top:
            mu[K] = 1
        else:
            mu[K] = -sum(v for K2, v in mu.items() if K < K2)
    return mu
