"""Subgroups of products of small groups, stored as coordinate vectors.

Used for the free level models and for the relatively free groups that
decide membership in the closure of a level set.
"""

from __future__ import annotations

import numpy as np

from .config import DEFAULT_BUDGETS
from .errors import BudgetExceeded
from .groups import from_right_actions


class CoordinateSpace:
    """The product of ``counts[i]`` copies of ``groups[i]``."""

    def __init__(self, groups, counts):
        self.groups = list(groups)
        self.counts = list(counts)
        self.offsets = np.concatenate([[0], np.cumsum(self.counts)]).astype(np.int64)
        self.length = int(self.offsets[-1])
        # one stacked table: entry (i, a, b) with padding for smaller groups
        m = max((G.order for G in self.groups), default=1)
        self._tables = np.zeros((len(self.groups), m, m), dtype=np.int64)
        self._invs = np.zeros((len(self.groups), m), dtype=np.int64)
        for i, G in enumerate(self.groups):
            self._tables[i, :G.order, :G.order] = G.table
            self._invs[i, :G.order] = G.inv
        self.block_of = np.repeat(np.arange(len(self.groups)), self.counts)
        self.identity_vec = np.array([G.identity for G in self.groups], dtype=np.int64)[self.block_of] \
            if self.length else np.zeros(0, dtype=np.int64)

    def mul(self, a, b):
        """Row-wise product; a and b are (k, L) or (L,) arrays."""
        return self._tables[self.block_of, a, b]

    def inv(self, a):
        return self._invs[self.block_of, a]

    def closure(self, gens, cap=None):
        """Elements of the subgroup generated by the vectors ``gens``.

        Returns (elements array, index dict keyed by bytes, right-multiplication
        permutations for each generator).
        """
        cap = cap or DEFAULT_BUDGETS.model_order
        gens = [np.asarray(g, dtype=np.int64) for g in gens]
        e = self.identity_vec
        elems = [e]
        index = {e.tobytes(): 0}
        right = [[] for _ in gens]
        start = 0
        while start < len(elems):
            block = np.array(elems[start:])
            for k, s in enumerate(gens):
                prod = self.mul(block, s[None, :])
                col = right[k]
                for row in prod:
                    key = row.tobytes()
                    j = index.get(key)
                    if j is None:
                        j = len(elems)
                        if j >= cap:
                            raise BudgetExceeded(f"product closure exceeds {cap} elements")
                        index[key] = j
                        elems.append(row)
                    col.append(j)
            start += len(block)
        return np.array(elems), index, right

    def group_from(self, gens, cap=None):
        """A FiniteGroup for the generated subgroup plus its element vectors."""
        elems, index, right = self.closure(gens, cap)
        gen_idx = [index[np.asarray(g, dtype=np.int64).tobytes()] for g in gens]
        G = from_right_actions(len(elems), 0, gen_idx, right, validate=False)
        return G, elems, index
