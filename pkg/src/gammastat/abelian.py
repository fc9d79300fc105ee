"""Integer Smith normal form and finitely generated abelian groups in normal form."""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product
from math import gcd, prod


def _identity(n):
    return [[int(i == j) for j in range(n)] for i in range(n)]


def smith_normal_form(A):
    """Return (D, P, Q) with P*A*Q = D diagonal and d_i | d_{i+1}.

    A is a list of integer rows (m x n).  P is m x m and Q is n x n, both
    unimodular.  D is returned as the full m x n matrix.
    """
    m = len(A)
    n = len(A[0]) if m else 0
    D = [list(map(int, row)) for row in A]
    P = _identity(m)
    Q = _identity(n)

    def swap_rows(i, j):
        D[i], D[j] = D[j], D[i]
        P[i], P[j] = P[j], P[i]

    def swap_cols(i, j):
        for row in D:
            row[i], row[j] = row[j], row[i]
        for row in Q:
            row[i], row[j] = row[j], row[i]

    def add_row(src, dst, k):  # row_dst += k row_src
        if k:
            rs, rd = D[src], D[dst]
            for c in range(n):
                rd[c] += k * rs[c]
            ps, pd = P[src], P[dst]
            for c in range(m):
                pd[c] += k * ps[c]

    def add_col(src, dst, k):
        if k:
            for row in D:
                row[dst] += k * row[src]
            for row in Q:
                row[dst] += k * row[src]

    t = 0
    while t < min(m, n):
        # pivot: smallest nonzero entry in the trailing block
        best = None
        for i in range(t, m):
            row = D[i]
            for j in range(t, n):
                v = row[j]
                if v and (best is None or abs(v) < best[0]):
                    best = (abs(v), i, j)
                    if best[0] == 1:
                        break
            if best is not None and best[0] == 1:
                break
        if best is None:
            break
        _, i, j = best
        swap_rows(t, i)
        swap_cols(t, j)
        while True:
            done = True
            piv = D[t][t]
            for i in range(t + 1, m):
                if D[i][t]:
                    add_row(t, i, -(D[i][t] // piv))
                    if D[i][t]:
                        done = False
            for j in range(t + 1, n):
                if D[t][j]:
                    add_col(t, j, -(D[t][j] // piv))
                    if D[t][j]:
                        done = False
            if done:
                # divisibility of the rest of the block
                bad = None
                for i in range(t + 1, m):
                    for j in range(t + 1, n):
                        if D[i][j] % piv:
                            bad = i
                            break
                    if bad is not None:
                        break
                if bad is None:
                    break
                add_row(bad, t, 1)
                continue
            # move the smallest remaining entry of row/col t to the pivot
            best = (abs(D[t][t]), t, t)
            for i in range(t + 1, m):
                if D[i][t] and abs(D[i][t]) < best[0]:
                    best = (abs(D[i][t]), i, t)
            for j in range(t + 1, n):
                if D[t][j] and abs(D[t][j]) < best[0]:
                    best = (abs(D[t][j]), t, j)
            _, i, j = best
            swap_rows(t, i)
            swap_cols(t, j)
        if D[t][t] < 0:
            D[t] = [-x for x in D[t]]
            P[t] = [-x for x in P[t]]
        t += 1
    return D, P, Q


def mat_mul(A, B):
    if not A:
        return []
    cols = list(zip(*B)) if B else []
    return [[sum(a * b for a, b in zip(row, col)) for col in cols] for row in A]


@dataclass(frozen=True)
class AbelianNormalForm:
    """A finite abelian group Z/d_1 x ... x Z/d_k with d_i | d_{i+1}, d_i > 1.

    Elements are tuples of residues.  ``basis`` optionally records ambient
    elements realizing the cyclic factors.
    """

    cyclic_factors: tuple
    basis: tuple = field(default=(), compare=False)

    def __post_init__(self):
        for a, b in zip(self.cyclic_factors, self.cyclic_factors[1:]):
            if b % a:
                raise ValueError(f"invariant factors must divide: {self.cyclic_factors}")
        if any(d <= 1 for d in self.cyclic_factors):
            raise ValueError("invariant factors must exceed 1")

    @property
    def order(self):
        return prod(self.cyclic_factors)

    @property
    def rank(self):
        return len(self.cyclic_factors)

    @property
    def exponent(self):
        return self.cyclic_factors[-1] if self.cyclic_factors else 1

    def zero(self):
        return (0,) * self.rank

    def add(self, a, b):
        return tuple((x + y) % d for x, y, d in zip(a, b, self.cyclic_factors))

    def neg(self, a):
        return tuple((-x) % d for x, d in zip(a, self.cyclic_factors))

    def scale(self, k, a):
        return tuple((k * x) % d for x, d in zip(a, self.cyclic_factors))

    def reduce(self, a):
        return tuple(x % d for x, d in zip(a, self.cyclic_factors))

    def element_order(self, a):
        o = 1
        for x, d in zip(a, self.cyclic_factors):
            o = o * (d // gcd(x, d)) // gcd(o, d // gcd(x, d))
        return o

    def elements(self):
        return product(*(range(d) for d in self.cyclic_factors))

    def nr(self, k, a):
        """Number of x with k*x = a (the k-th roots of a)."""
        total = 1
        for x, d in zip(a, self.cyclic_factors):
            g = gcd(k, d)
            if x % g:
                return 0
            total *= g
        return total

    def is_trivial(self):
        return not self.cyclic_factors


class AbelianPresentation:
    """Z^n modulo the row span of a relation matrix, in Smith normal form.

    ``coords(v)`` maps a vector of Z^n to its normal-form coordinates:
    the torsion part as an element of ``torsion`` and the free part as a
    tuple of integers.
    """

    def __init__(self, ngens, relations):
        self.ngens = ngens
        rel = [list(r) for r in relations] or [[0] * ngens]
        if ngens == 0:
            self.torsion = AbelianNormalForm(())
            self.free_rank = 0
            self._tors_cols = []
            self._free_cols = []
            self.Q = []
            return
        D, _, Q = smith_normal_form(rel)
        self.Q = Q
        diag = [D[i][i] if i < len(D) else 0 for i in range(ngens)]
        self._tors_cols = [j for j, d in enumerate(diag) if d > 1]
        self._free_cols = [j for j, d in enumerate(diag) if d == 0]
        self.torsion = AbelianNormalForm(tuple(diag[j] for j in self._tors_cols))
        self.free_rank = len(self._free_cols)

    def coords(self, v):
        """v is a list, or a sparse dict index -> coefficient."""
        items = v.items() if isinstance(v, dict) else [(i, x) for i, x in enumerate(v) if x]
        Q = self.Q
        tors = tuple(sum(x * Q[i][j] for i, x in items) % d
                     for j, d in zip(self._tors_cols, self.torsion.cyclic_factors))
        free = tuple(sum(x * Q[i][j] for i, x in items) for j in self._free_cols)
        return tors, free


def abelian_invariants(relations, ngens):
    """Invariant factors (with 0 for free summands) of Z^ngens / rows."""
    pres = AbelianPresentation(ngens, relations)
    return list(pres.torsion.cyclic_factors) + [0] * pres.free_rank
