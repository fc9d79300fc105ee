"""Dense linear algebra over F_p with numpy int64 arrays."""

from __future__ import annotations

import numpy as np


def rref(A, p):
    """Reduced row echelon form mod p; returns (R, pivot_columns)."""
    R = np.array(A, dtype=np.int64) % p
    if R.ndim != 2:
        R = R.reshape(0, 0) if R.size == 0 else R.reshape(1, -1)
    rows, cols = R.shape
    pivots = []
    r = 0
    for c in range(cols):
        if r >= rows:
            break
        nz = np.nonzero(R[r:, c])[0]
        if len(nz) == 0:
            continue
        i = r + nz[0]
        if i != r:
            R[[r, i]] = R[[i, r]]
        R[r] = (R[r] * pow(int(R[r, c]), -1, p)) % p
        col = R[:, c].copy()
        col[r] = 0
        nzr = np.nonzero(col)[0]
        if len(nzr):
            R[nzr] = (R[nzr] - np.outer(col[nzr], R[r])) % p
        pivots.append(c)
        r += 1
    return R[:r], pivots


def rank(A, p):
    A = np.asarray(A)
    if A.size == 0:
        return 0
    return len(rref(A, p)[1])


def nullspace(A, p):
    """Basis (rows) of {x : A x = 0} mod p."""
    A = np.asarray(A, dtype=np.int64)
    ncols = A.shape[1]
    if A.shape[0] == 0:
        return np.eye(ncols, dtype=np.int64)
    R, piv = rref(A, p)
    free = [c for c in range(ncols) if c not in set(piv)]
    basis = []
    for f in free:
        v = np.zeros(ncols, dtype=np.int64)
        v[f] = 1
        for i, c in enumerate(piv):
            v[c] = (-R[i, f]) % p
        basis.append(v)
    return np.array(basis, dtype=np.int64).reshape(len(basis), ncols)


def row_space(A, p):
    A = np.asarray(A, dtype=np.int64)
    if A.size == 0:
        return A.reshape(0, A.shape[1] if A.ndim == 2 else 0)
    return rref(A, p)[0]


def solve(A, b, p):
    """One solution x of A x = b mod p, or None."""
    A = np.asarray(A, dtype=np.int64)
    b = np.asarray(b, dtype=np.int64).reshape(-1, 1)
    aug = np.hstack([A, b])
    R, piv = rref(aug, p)
    n = A.shape[1]
    if n in piv:
        return None
    x = np.zeros(n, dtype=np.int64)
    for i, c in enumerate(piv):
        x[c] = R[i, n]
    return x


def complement_basis(sub, ambient, p):
    """Rows of ``ambient`` extending a basis of span(sub) to span(sub + ambient)."""
    sub = row_space(sub, p) if len(sub) else np.zeros((0, ambient.shape[1]), dtype=np.int64)
    cur = sub
    extra = []
    r = rank(cur, p) if len(cur) else 0
    for v in ambient:
        trial = np.vstack([cur, v[None, :]]) if len(cur) else v[None, :]
        r2 = rank(trial, p)
        if r2 > r:
            extra.append(v % p)
            cur, r = trial, r2
    return np.array(extra, dtype=np.int64).reshape(len(extra), ambient.shape[1])


def mat_inv(M, p):
    M = np.asarray(M, dtype=np.int64) % p
    k = M.shape[0]
    R, piv = rref(np.hstack([M, np.eye(k, dtype=np.int64)]), p)
    if piv[:k] != list(range(k)) or len(piv) < k or any(c >= k for c in piv[:k]):
        raise ValueError("matrix is singular mod p")
    return R[:, k:] % p


def is_invertible(M, p):
    return rank(M, p) == np.asarray(M).shape[0]


def vec_index(v, p):
    """Index of a vector in F_p^k under v -> sum v_i p^i."""
    out, m = 0, 1
    for x in v:
        out += int(x) * m
        m *= p
    return out


def index_vec(i, p, k):
    v = []
    for _ in range(k):
        v.append(i % p)
        i //= p
    return v
