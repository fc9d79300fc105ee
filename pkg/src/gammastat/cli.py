"""gammastat command line.

Every subcommand writes one JSON report (stdout or --output).  Exit codes:
0 ok, 1 computation failure, 2 usage / malformed input, 3 budget exceeded.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import asdict, replace
from fractions import Fraction

from . import __version__
from .config import Budgets, RunConfig
from .errors import BudgetExceeded, GammaStatError, InvalidGroupSpec, PreconditionError
from .io import Cache, build_gamma_group, build_group, build_level, cached_cover, digest, load_toml

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_BUDGET = 0, 1, 2, 3


class UsageError(Exception):
    pass


def _frac(x: Fraction):
    return {"num": x.numerator, "den": x.denominator}


def _load(path, what):
    try:
        return load_toml(path)
    except FileNotFoundError:
        raise UsageError(f"{what} file not found: {path}")
    except Exception as exc:   # TOML decode errors
        raise UsageError(f"cannot parse {what} file {path}: {exc}")


def _gamma(args):
    return build_group(_load(args.gamma, "gamma"))


def parse_class_set(G, spec: str):
    """'all', 'order:3', 'order:2,3' or explicit element indices '1,4,5'."""
    spec = spec.strip()
    if spec == "all":
        return [x for x in range(G.order) if x != G.identity]
    if spec.startswith("order:"):
        want = {int(v) for v in spec[6:].split(",")}
        return [x for x in range(G.order) if G.orders[x] in want]
    try:
        return [int(v) for v in spec.split(",") if v]
    except ValueError:
        raise UsageError(f"bad class set {spec!r}")


# -- subcommands ---------------------------------------------------------------------

def cmd_group(args, cfg):
    from .groups import abelianization, group_invariants
    G = build_group(_load(args.spec, "group"))
    inv = {k: (list(v) if isinstance(v, tuple) else v) for k, v in group_invariants(G).items()}
    out = {"order": G.order, "abelian": bool(G.is_abelian), "exponent": G.exponent,
           "abelianization": list(abelianization(G).form.cyclic_factors),
           "solvable": bool(G.is_solvable), "invariants": inv}
    if args.gamma_spec:
        A = build_gamma_group(_load(args.gamma_spec, "Gamma-group"), None)
        ok, _ = A.is_admissible()
        out["gamma_group"] = {"order": A.order, "Y": len(A.y_image), "fixed": len(A.fixed_points),
                              "admissible": ok}
    return out, True


def cmd_measure(args, cfg):
    from .measure import abelian_factors, lambda_constant, mu_basic_open, multiplicity, prob_level
    Gamma = _gamma(args)
    H = build_gamma_group(_load(args.h, "H"), Gamma)
    C = build_level(_load(args.level, "level"), Gamma)
    n = args.n
    out = {"level": C.name or args.level, "n": n, "u": args.u, "H": H.name or args.h, "factors": []}
    for G in abelian_factors(C, H):
        row = {"G": G.describe(), "h": G.h, "Y": G.y_size, "lambda": _frac(lambda_constant(C, H, G))}
        if n is not None:
            row["m"] = multiplicity(C, n, H, G).m
        out["factors"].append(row)
    if n is not None:
        out["probability"] = _frac(prob_level(C, n, args.u, H))
    if args.u >= 0:
        mv = mu_basic_open(C, args.u, H, prefix_len=args.prefix)
        out["measure"] = mv.to_dict()
    return out, True


def cmd_sample(args, cfg):
    from .sampler import build_free_level_model, compare_to_exact, sample_batch
    if cfg.seed is None and not args.exhaustive:
        raise UsageError("sampling needs --seed")
    Gamma = _gamma(args)
    C = build_level(_load(args.level, "level"), Gamma)
    M = build_free_level_model(Gamma, C, args.n, cfg.budgets)
    batch = sample_batch(M, args.u, args.count, cfg.seed if cfg.seed is not None else 0,
                         threads=cfg.threads, exhaustive=args.exhaustive, budgets=cfg.budgets)
    rep = compare_to_exact(batch, tolerance_sigma=args.sigma)
    out = batch.to_dict()
    out["comparison"] = rep.to_dict()
    out["model_order"] = M.admissible_image.order
    return out, rep.passed


def _cache(args, cfg):
    return None if args.no_cache else Cache(cfg.cache_dir)


def cmd_schur(args, cfg):
    from .schur import braid_identity_holds, compute_h2
    G = build_group(_load(args.group, "group"))
    h2 = compute_h2(G, cross_check=args.cross_check, budgets=cfg.budgets)
    out = {"order": G.order, "H2": list(h2.h2.cyclic_factors)}
    if args.cross_check:
        out["bar_complex"] = list(h2.bar_check)
    if args.c:
        cov = cached_cover(G, parse_class_set(G, args.c), _cache(args, cfg))
        out["cover"] = cov.to_dict() if args.full else {"kernel": list(cov.kernel.cyclic_factors),
                                                          "classes": len(cov.classes)}
        out["braid_identity"] = braid_identity_holds(cov)
    return out, True


def cmd_orbits(args, cfg):
    from .hurwitz import braid_orbits, conway_parker_check
    G = build_group(_load(args.group, "group"))
    c = parse_class_set(G, args.c)
    cov = cached_cover(G, c, _cache(args, cfg))
    census = braid_orbits(G, c, args.n, cover=cov, budgets=cfg.budgets)
    cp = conway_parker_check(G, c, args.n, cover=cov, budgets=cfg.budgets)
    out = {"n": args.n, "tuples": census.total,
           "orbits": [{"rep": list(o.representative), "size": o.size, "class_vector": list(o.class_vector),
                       "invariant": [list(o.lifting_invariant.cover_part), list(o.lifting_invariant.lattice_part)],
                       "invariant_constant": o.invariant_constant} for o in census.orbits],
           "conway_parker": {"threshold": cp.threshold,
                             "per_M": {str(k): list(v) for k, v in cp.per_M.items()}}}
    return out, all(o.invariant_constant for o in census.orbits)


def cmd_invariants(args, cfg):
    from .hurwitz import lattice_k_elements
    G = build_group(_load(args.group, "group"))
    cov = cached_cover(G, parse_class_set(G, args.c), _cache(args, cfg))
    els = lattice_k_elements(cov, args.n)
    out = {"n": args.n, "kernel": list(cov.kernel.cyclic_factors), "classes": len(cov.classes),
           "K_elements": [[list(k.cover_part), list(k.lattice_part)] for k in els]}
    return out, True


def cmd_count_components(args, cfg):
    from .hurwitz import count_fixed_components, frobenius_fixed_check
    G = build_group(_load(args.group, "group"))
    cov = cached_cover(G, parse_class_set(G, args.c), _cache(args, cfg))
    b = count_fixed_components(cov, args.q, args.n)
    out = {"q": args.q, "n": args.n, "b": b}
    if args.check:
        fixed, _ = frobenius_fixed_check(cov, args.q, args.n)
        out["fixed_count"] = fixed
    return out, True


def cmd_compare(args, cfg):
    from .hurwitz import compare_semidirect
    Gamma = _gamma(args)
    H = build_gamma_group(_load(args.h, "H"), Gamma)
    cmp = compare_semidirect(H, args.q, range(1, args.n_max + 1))
    out = {"q": args.q, "equal": cmp.equal, "class_bijection": cmp.class_bijection,
           "abelianization_iso": cmp.abelianization_iso,
           "counts": {str(n): list(v) for n, v in cmp.counts.items()}}
    return out, cmp.equal and cmp.class_bijection and cmp.abelianization_iso


def cmd_verify_correspondence(args, cfg):
    from .correspondence import decompose_surjections, section_renormalization_check
    G = build_group(_load(args.ambient, "ambient"))
    hspec = _load(args.h, "H")
    Gamma = _gamma(args) if args.gamma else None
    H = build_gamma_group(hspec, Gamma)
    rec = decompose_surjections(G, H, cfg.budgets)
    rep = section_renormalization_check(G, H, rec)
    out = {"surjections": len(rec.surjections), "quadruples": rec.independent_count,
           "round_trip": rec.round_trip, "Y": rep.y_size,
           "sections": [{"sections": s, "phi_counts": c} for s, c in rep.per_pair.values()],
           "renormalized": _frac(rep.renormalized_total), "passed": rec.consistent and rep.passed}
    return out, out["passed"]


def cmd_acceptance(args, cfg):
    from .acceptance import run_acceptance
    only = [int(v) for v in args.only.split(",")] if args.only else None
    res = run_acceptance(quick=args.quick, only=only)
    for r in res:
        print(r.line(), file=sys.stderr)
    ok = all(r.passed and r.in_time for r in res)
    # timings vary run to run, so they go to stderr only
    return {"criteria": [{k: v for k, v in r.to_dict().items() if k != "seconds"} for r in res],
            "passed": ok}, ok


COMMANDS = {
    "group": cmd_group, "measure": cmd_measure, "sample": cmd_sample, "schur": cmd_schur,
    "orbits": cmd_orbits, "invariants": cmd_invariants, "count-components": cmd_count_components,
    "compare": cmd_compare, "verify-correspondence": cmd_verify_correspondence,
    "acceptance": cmd_acceptance,
}


def build_parser():
    p = argparse.ArgumentParser(prog="gammastat", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int)
    common.add_argument("--threads", type=int, default=1)
    common.add_argument("--cache-dir")
    common.add_argument("--no-cache", action="store_true")
    common.add_argument("--output", "-o")
    common.add_argument("--config", help="TOML with a [budgets] table")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("group", parents=[common])
    s.add_argument("--spec", required=True)
    s.add_argument("--gamma-spec")

    s = sub.add_parser("measure", parents=[common])
    s.add_argument("--gamma", required=True)
    s.add_argument("--h", required=True)
    s.add_argument("--level", required=True)
    s.add_argument("-u", type=int, default=0)
    s.add_argument("-n", type=int)
    s.add_argument("--prefix", type=int, default=12)

    s = sub.add_parser("sample", parents=[common])
    s.add_argument("--gamma", required=True)
    s.add_argument("--level", required=True)
    s.add_argument("-n", type=int, required=True)
    s.add_argument("-u", type=int, default=0)
    s.add_argument("--count", type=int, default=10000)
    s.add_argument("--exhaustive", action="store_true")
    s.add_argument("--sigma", type=float, default=4.0)

    s = sub.add_parser("schur", parents=[common])
    s.add_argument("--group", required=True)
    s.add_argument("--c")
    s.add_argument("--cross-check", action="store_true")
    s.add_argument("--full", action="store_true")

    for name in ("orbits", "invariants", "count-components"):
        s = sub.add_parser(name, parents=[common])
        s.add_argument("--group", required=True)
        s.add_argument("--c", required=True)
        s.add_argument("-n", type=int, required=True)
        if name == "count-components":
            s.add_argument("--q", type=int, required=True)
            s.add_argument("--check", action="store_true")

    s = sub.add_parser("compare", parents=[common])
    s.add_argument("--gamma", required=True)
    s.add_argument("--h", required=True)
    s.add_argument("--q", type=int, required=True)
    s.add_argument("--n-max", type=int, required=True)

    s = sub.add_parser("verify-correspondence", parents=[common])
    s.add_argument("--ambient", required=True)
    s.add_argument("--h", required=True)
    s.add_argument("--gamma")

    s = sub.add_parser("acceptance", parents=[common])
    s.add_argument("--quick", action="store_true")
    s.add_argument("--only")
    return p


def make_config(args) -> RunConfig:
    budgets = Budgets()
    if args.config:
        data = _load(args.config, "config")
        try:
            budgets = replace(budgets, **data.get("budgets", {}))
        except (TypeError, ValueError) as exc:
            raise UsageError(f"bad budgets: {exc}")
        if args.seed is None and "seed" in data:
            args.seed = data["seed"]
    params = {k: v for k, v in vars(args).items()
              if k not in ("command", "seed", "threads", "cache_dir", "output", "config", "no_cache")}
    try:
        return RunConfig(args.command, params, args.seed, args.threads, budgets, args.cache_dir, args.output)
    except ValueError as exc:
        raise UsageError(str(exc))


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        cfg = make_config(args)
        body, ok = COMMANDS[args.command](args, cfg)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (InvalidGroupSpec, PreconditionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except BudgetExceeded as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except GammaStatError as exc:
        print(f"failed: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAIL
    cfg_dict = asdict(cfg)
    cfg_dict.pop("output")
    cfg_dict.pop("cache_dir")
    report = {"command": args.command, "version": __version__, "config_hash": digest(cfg_dict),
              "seed": cfg.seed, "ok": bool(ok), "result": body}
    text = json.dumps(report, sort_keys=True, indent=1, default=str)
    if cfg.output:
        with open(cfg.output, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    return EXIT_OK if ok else EXIT_FAIL


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
