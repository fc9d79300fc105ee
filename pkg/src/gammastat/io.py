"""Group / Gamma-group / level specs from TOML, canonical JSON, and a small
versioned on-disk cache.

Group spec kinds::

    kind = "table"       table = [[...]], identity = 0
    kind = "perm"        generators = ["(1,2)", "(1,2,3)"]   (1-based cycles)
    kind = "semidirect"  N = {group}, Q = {group}, action = [[perm of N], ...]
                         one permutation per generator of Q, in Q.generators order
    kind = "named"       name = "cyclic" | "symmetric" | "alternating" |
                         "dihedral" | "quaternion" | "abelian" | "trivial",
                         n = ..., orders = [...]

A Gamma-group spec is a table with ``group`` (a group spec) and ``action``;
``gamma`` may be given inline or supplied by the caller.  Action kinds:
"perms" (one permutation of G per generator of Gamma), "power" (g -> g^e per
generator, abelian G only), "matrices" (F_p^k with ``p`` and one matrix per
generator; replaces ``group``) and "trivial".  A level spec lists Gamma-groups
under ``members``.
"""

from __future__ import annotations

import hashlib
import json
import os
from pathlib import Path

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # python < 3.11
    import tomli as tomllib

from . import groups as gr
from .errors import InternalCheckFailed, InvalidGroupSpec
from .gamma import GammaGroup, LevelSet, gamma_group_from_matrices

CACHE_VERSION = 1
CACHE_ENV = "GAMMASTAT_CACHE_DIR"


# -- reading specs -----------------------------------------------------------------

def load_toml(path):
    with open(path, "rb") as fh:
        return tomllib.load(fh)


def _need(spec, key, what):
    if key not in spec:
        raise InvalidGroupSpec(f"{what} spec is missing '{key}'")
    return spec[key]


def build_group(spec) -> gr.FiniteGroup:
    if not isinstance(spec, dict):
        raise InvalidGroupSpec("group spec must be a table")
    kind = spec.get("kind", "named")
    if kind == "table":
        G = gr.FiniteGroup(_need(spec, "table", "table"), identity=spec.get("identity", 0),
                           generators=spec.get("generators"))
    elif kind == "perm":
        gens = _need(spec, "generators", "perm")
        perms = [gr.parse_cycles(g, spec.get("degree")) if isinstance(g, str) else tuple(g) for g in gens]
        deg = max([spec.get("degree", 0)] + [len(p) for p in perms])
        perms = [tuple(p) + tuple(range(len(p), deg)) for p in perms]
        G, _ = gr.from_perms(perms)
    elif kind == "semidirect":
        N = build_group(_need(spec, "N", "semidirect"))
        Q = build_group(_need(spec, "Q", "semidirect"))
        act = _need(spec, "action", "semidirect")
        if len(act) != len(Q.generators):
            raise InvalidGroupSpec("semidirect action needs one permutation per generator of Q")
        G = gr.semidirect(N, Q, dict(zip(Q.generators, act)))
    elif kind == "named":
        G = _named(spec)
    else:
        raise InvalidGroupSpec(f"unknown group kind {kind!r}")
    if "label" in spec:
        G.name = spec["label"]
    return G


def _named(spec):
    name = _need(spec, "name", "named group")
    n = spec.get("n")
    makers = {"cyclic": gr.cyclic, "symmetric": gr.symmetric, "alternating": gr.alternating,
              "dihedral": gr.dihedral}
    if name in makers:
        if not isinstance(n, int) or n < 1:
            raise InvalidGroupSpec(f"{name} needs a positive integer n")
        return makers[name](n)
    if name == "quaternion":
        return gr.quaternion()
    if name == "abelian":
        return gr.abelian_group(_need(spec, "orders", "abelian"))
    if name == "trivial":
        return gr.trivial_group()
    raise InvalidGroupSpec(f"unknown named group {name!r}")


def build_gamma_group(spec, Gamma=None, gamma_generators=None) -> GammaGroup:
    if "gamma" in spec:
        Gamma = build_group(spec["gamma"])
    if Gamma is None:
        raise InvalidGroupSpec("Gamma-group spec needs a Gamma")
    gg = spec.get("gamma_generators", gamma_generators)
    gens = list(Gamma.generators)
    act = _need(spec, "action", "Gamma-group")
    if isinstance(act, str):
        act = {"kind": act}
    kind = act.get("kind")
    if kind == "matrices":
        mats = _need(act, "matrices", "matrix action")
        if len(mats) != len(gens):
            raise InvalidGroupSpec("need one matrix per generator of Gamma")
        return gamma_group_from_matrices(int(_need(act, "p", "matrix action")), Gamma,
                                         dict(zip(gens, mats)), gg, name=spec.get("label"))
    G = build_group(_need(spec, "group", "Gamma-group"))
    if kind == "trivial":
        perms = {s: list(range(G.order)) for s in gens}
    elif kind == "perms":
        plist = _need(act, "perms", "perm action")
        if len(plist) != len(gens):
            raise InvalidGroupSpec("need one permutation per generator of Gamma")
        perms = dict(zip(gens, plist))
    elif kind == "power":
        if not G.is_abelian:
            raise InvalidGroupSpec("power action needs an abelian group")
        exps = _need(act, "exponents", "power action")
        if len(exps) != len(gens):
            raise InvalidGroupSpec("need one exponent per generator of Gamma")
        perms = {s: [G.power(x, e % G.exponent) for x in range(G.order)] for s, e in zip(gens, exps)}
    else:
        raise InvalidGroupSpec(f"unknown action kind {kind!r}")
    if not gens:
        return GammaGroup(G, Gamma, np.arange(G.order)[None, :], gg, name=spec.get("label"))
    return GammaGroup(G, Gamma, perms, gg, name=spec.get("label"))


def build_level(spec, Gamma=None) -> LevelSet:
    if "gamma" in spec:
        Gamma = build_group(spec["gamma"])
    members = _need(spec, "members", "level")
    gg = spec.get("gamma_generators")
    return LevelSet([build_gamma_group(m, Gamma, gg) for m in members], name=spec.get("label"))


# -- canonical JSON ------------------------------------------------------------

def canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def digest(obj) -> str:
    return hashlib.sha256(canonical_json(obj).encode()).hexdigest()


def group_to_dict(G: gr.FiniteGroup):
    return {"kind": "table", "table": G.table.tolist(), "identity": int(G.identity),
            "generators": [int(g) for g in G.generators]}


def gamma_group_to_dict(A: GammaGroup):
    return {"gamma": group_to_dict(A.Gamma), "group": group_to_dict(A.G),
            "gamma_generators": [int(x) for x in A.gamma_generators],
            "action": {"kind": "perms", "perms": [A.act[s].tolist() for s in A.Gamma.generators]}}


def hom_to_dict(f: gr.GroupHom):
    return {"source": digest(group_to_dict(f.source)), "target": digest(group_to_dict(f.target)),
            "images": list(f.images)}


# -- cache ---------------------------------------------------------------------

def cache_dir(override=None) -> Path:
    d = override or os.environ.get(CACHE_ENV) or os.path.join(Path.home(), ".cache", "gammastat")
    p = Path(d)
    p.mkdir(parents=True, exist_ok=True)
    return p


class Cache:
    """Versioned JSON artifacts keyed by a canonical hash of their inputs.

    ``load`` returns None when the entry is missing, has another version, fails
    its checksum, or is rejected by the caller's ``validate``; callers then
    recompute.  Rejected entries are deleted."""

    def __init__(self, directory=None):
        self.dir = cache_dir(directory)

    def path(self, kind, key):
        return self.dir / f"{kind}-{key[:32]}.json"

    def store(self, kind, key_obj, payload):
        key = digest(key_obj)
        rec = {"version": CACHE_VERSION, "kind": kind, "key": key,
               "checksum": digest(payload), "payload": payload}
        p = self.path(kind, key)
        tmp = p.with_suffix(".tmp")
        tmp.write_text(canonical_json(rec))
        tmp.replace(p)
        return p

    def load(self, kind, key_obj, validate=None):
        key = digest(key_obj)
        p = self.path(kind, key)
        if not p.exists():
            return None
        try:
            rec = json.loads(p.read_text())
            if rec.get("version") != CACHE_VERSION or rec.get("key") != key or rec.get("kind") != kind:
                raise InternalCheckFailed("stale cache entry")
            if digest(rec["payload"]) != rec.get("checksum"):
                raise InternalCheckFailed("checksum mismatch")
            if validate is not None:
                return validate(rec["payload"])
            return rec["payload"]
        except (InternalCheckFailed, InvalidGroupSpec, ValueError, KeyError, TypeError):
            p.unlink(missing_ok=True)
            return None


def cover_key(G: gr.FiniteGroup, c):
    return {"group": group_to_dict(G), "c": sorted(int(x) for x in c)}


def cached_cover(G, c, cache: Cache | None = None, choice=0):
    """Reduced cover of (G, c), loaded from the cache when it validates."""
    from .schur import ReducedSchurCover, build_reduced_cover
    if cache is None:
        return build_reduced_cover(G, c, choice=choice)
    key = cover_key(G, c)
    key["choice"] = choice
    cov = cache.load("cover", key, validate=lambda d: ReducedSchurCover.from_dict(G, d))
    if cov is None:
        cov = build_reduced_cover(G, c, choice=choice)
        cache.store("cover", key, cov.to_dict())
    return cov
