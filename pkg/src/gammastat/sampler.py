"""Explicit (F_n)^C and (calF_n)^C, and Monte Carlo / exhaustive sampling of
X_{u,n} = calF_n / [Y(S)] at level C."""

from __future__ import annotations

import math
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product

import numpy as np

from .config import DEFAULT_BUDGETS
from .errors import BudgetExceeded, InternalCheckFailed, PreconditionError
from .gamma import (GammaGroup, LevelSet, count_equivariant_homs, gamma_isomorphism,
                    trivial_gamma_group)
from .product import CoordinateSpace

CHUNK = 4096


def _model_gamma_group(space: CoordinateSpace, members, gens, Gamma, gamma_generators, cap):
    G, elems, index = space.group_from(gens, cap=cap)
    m = max(M.order for M in members)
    stack = np.zeros((len(members), Gamma.order, m), dtype=np.int64)
    for i, M in enumerate(members):
        stack[i, :, :M.order] = M.act
    blk = space.block_of
    act = np.empty((Gamma.order, len(elems)), dtype=np.int64)
    for c in range(Gamma.order):
        moved = stack[blk, c, elems]
        act[c] = [index[row.tobytes()] for row in moved]
    return GammaGroup(G, Gamma, act, gamma_generators, validate=False), elems, index


@dataclass
class FreeLevelModel:
    level: LevelSet
    n: int
    space: CoordinateSpace | None
    free_image: GammaGroup
    admissible_image: GammaGroup
    free_vectors: np.ndarray | None = None
    admissible_vectors: np.ndarray | None = None
    generator_words: dict = field(default_factory=dict)

    @property
    def Gamma(self):
        return self.level.Gamma

    def evaluation(self, member_index, tup):
        """Coordinate column of the hom F_n -> C[member_index] with x_i -> tup[i]."""
        M = self.level.members[member_index]
        pos = sum(t * M.order ** (self.n - 1 - i) for i, t in enumerate(tup))
        return int(self.space.offsets[member_index]) + pos

    def check_hom_counts(self):
        """|Hom_Gamma((calF_n)^C, G)| = |Y(G)|^n for each G in C."""
        out = []
        for M in self.level.members:
            got = count_equivariant_homs(self.admissible_image, M)
            want = len(M.y_image) ** self.n
            out.append((got, want))
        return out

    # -- quotient classes ------------------------------------------------------
    def _setup_classes(self):
        if hasattr(self, "_classes"):
            return
        A = self.admissible_image
        reps, kernel_class = [], {}
        for N in sorted(A.normal_gamma_subgroups, key=lambda s: (-len(s), sorted(s))):
            Q, _ = A.quotient(N)
            for i, R in enumerate(reps):
                if R.order == Q.order and gamma_isomorphism(R, Q) is not None:
                    kernel_class[N] = i
                    break
            else:
                kernel_class[N] = len(reps)
                reps.append(Q)
        labels = []
        per_order = Counter()
        for R in reps:
            per_order[R.order] += 1
            labels.append(f"{R.order}.{per_order[R.order]}")
        for R, lab in zip(reps, labels):
            R.name = lab
        self._classes = reps
        self._labels = labels
        self._kernel_class = kernel_class
        self._closure_memo = {}

    @property
    def classes(self):
        """Isomorphism classes of Gamma-quotients of (calF_n)^C as {label: GammaGroup}."""
        self._setup_classes()
        return dict(zip(self._labels, self._classes))

    def classify_relations(self, rel):
        """Label of calF / [Y(rel)] for a sequence of element indices."""
        self._setup_classes()
        A = self.admissible_image
        yv = A.y_values
        coords = frozenset(x for s in rel for x in yv[s])
        lab = self._closure_memo.get(coords)
        if lab is None:
            N = A.normal_gamma_closure(coords)
            lab = self._labels[self._kernel_class[N]]
            self._closure_memo[coords] = lab
        return lab


def build_free_level_model(Gamma, C: LevelSet, n: int, budgets=DEFAULT_BUDGETS) -> FreeLevelModel:
    if n < 0:
        raise PreconditionError("n must be non-negative")
    if Gamma.order != C.Gamma.order:
        raise PreconditionError("level set is over a different Gamma")
    gg = C.gamma_generators
    if n == 0:
        T = trivial_gamma_group(C.Gamma, gg)
        return FreeLevelModel(C, 0, None, T, T)
    members = C.members
    total = sum(M.order ** n for M in members)
    if total > budgets.tuple_space:
        raise BudgetExceeded(f"model needs {total} coordinates")
    space = CoordinateSpace([M.G for M in members], [M.order ** n for M in members])
    tuples = {id(M): np.array(list(product(range(M.order), repeat=n)), dtype=np.int64)
              for M in members}
    xgens, ygens, words = [], [], {}
    for i in range(n):
        for c in range(C.Gamma.order):
            xgens.append(np.concatenate([M.act[c][tuples[id(M)][:, i]] for M in members]))
            words[("x", i, c)] = len(xgens) - 1
    for i in range(n):
        for c in range(C.Gamma.order):
            parts = []
            for M in members:
                t = tuples[id(M)][:, i]
                ct = M.act[c][t]
                block = []
                for j in gg:
                    # c(t^-1 gamma_j(t)) = c(t)^-1 (c gamma_j)(t)
                    cj = C.Gamma.table[c, j]
                    block.append(M.G.table[M.G.inv[ct], M.act[cj][t]])
                parts.append(block)
            for jj in range(len(gg)):
                ygens.append(np.concatenate([p[jj] for p in parts]))
            words[("y", i, c)] = list(range(len(ygens) - len(gg), len(ygens)))
    F, fv, _ = _model_gamma_group(space, members, xgens, C.Gamma, gg, budgets.model_order)
    A, av, _ = _model_gamma_group(space, members, ygens, C.Gamma, gg, budgets.model_order)
    ok, _ = A.is_admissible()
    if not ok:
        raise InternalCheckFailed("admissible image is not admissible")
    return FreeLevelModel(C, n, space, F, A, fv, av, words)


@dataclass
class SampleBatch:
    model: FreeLevelModel
    u: int
    seed: int
    count: int
    tally: dict
    exhaustive: bool = False

    def frequencies(self):
        return {k: Fraction(v, self.count) for k, v in self.tally.items()}

    def to_dict(self):
        return {"n": self.model.n, "u": self.u, "seed": self.seed, "count": self.count,
                "exhaustive": self.exhaustive, "tally": dict(sorted(self.tally.items()))}


def _chunk_tally(model, u, seed, chunk_id, size):
    rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(chunk_id,)))
    k = model.n + u
    draws = rng.integers(0, model.admissible_image.order, size=(size, k))
    tally = Counter()
    for row in draws.tolist():
        tally[model.classify_relations(row)] += 1
    return tally


def sample_batch(model: FreeLevelModel, u: int, count: int, seed: int, threads: int = 1,
                 exhaustive=False, budgets=DEFAULT_BUDGETS) -> SampleBatch:
    k = model.n + u
    if k < 1:
        raise PreconditionError("need n + u >= 1")
    model._setup_classes()
    if exhaustive:
        N = model.admissible_image.order
        total = N ** k
        if total > budgets.tuple_space:
            raise BudgetExceeded(f"{total} relation tuples")
        tally = Counter()
        for rel in product(range(N), repeat=k):
            tally[model.classify_relations(rel)] += 1
        return SampleBatch(model, u, seed, total, dict(tally), exhaustive=True)
    if count < 1:
        raise PreconditionError("count must be positive")
    if seed is None:
        raise PreconditionError("sampling needs a seed")
    nchunks = -(-count // CHUNK)
    sizes = [min(CHUNK, count - i * CHUNK) for i in range(nchunks)]
    tally = Counter()
    if threads <= 1:
        for i, s in enumerate(sizes):
            tally.update(_chunk_tally(model, u, seed, i, s))
    else:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            for t in ex.map(lambda a: _chunk_tally(model, u, seed, a[0], a[1]), enumerate(sizes)):
                tally.update(t)
    return SampleBatch(model, u, seed, count, dict(tally))


@dataclass
class ComparisonRow:
    label: str
    exact: Fraction
    observed: int
    frequency: float
    z: float


@dataclass
class ComparisonReport:
    rows: list
    tolerance_sigma: float
    passed: bool
    mass: Fraction

    def to_dict(self):
        return {"passed": self.passed, "tolerance_sigma": self.tolerance_sigma,
                "mass": [self.mass.numerator, self.mass.denominator],
                "classes": [{"label": r.label, "exact": [r.exact.numerator, r.exact.denominator],
                             "exact_float": float(r.exact), "count": r.observed,
                             "frequency": r.frequency, "z": r.z} for r in self.rows]}


def exact_class_probabilities(model: FreeLevelModel, u: int):
    from .measure import prob_level
    return {lab: prob_level(model.level, model.n, u, H) for lab, H in model.classes.items()}


def compare_to_exact(batch: SampleBatch, tolerance_sigma: float = 4.0, exact=None) -> ComparisonReport:
    exact = exact if exact is not None else exact_class_probabilities(batch.model, batch.u)
    rows = []
    ok = True
    for lab in sorted(set(exact) | set(batch.tally)):
        p = exact.get(lab, Fraction(0))
        c = batch.tally.get(lab, 0)
        if p == 0 and c:
            raise InternalCheckFailed(f"class {lab} observed but has exact probability 0")
        if batch.exhaustive:
            z = 0.0 if Fraction(c, batch.count) == p else math.inf
        else:
            pf = float(p)
            sd = math.sqrt(pf * (1 - pf) / batch.count) if 0 < pf < 1 else 0.0
            diff = c / batch.count - pf
            z = diff / sd if sd else (0.0 if diff == 0 else math.inf)
        if abs(z) >= tolerance_sigma:
            ok = False
        rows.append(ComparisonRow(lab, p, c, c / batch.count, z))
    return ComparisonReport(rows, tolerance_sigma, ok, sum(exact.values(), Fraction(0)))
