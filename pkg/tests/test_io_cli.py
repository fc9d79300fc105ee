import json
from pathlib import Path

import pytest

from gammastat import groups as gr
from gammastat.cli import parse_class_set, run
from gammastat.errors import InvalidGroupSpec
from gammastat.io import (Cache, build_gamma_group, build_group, build_level, cached_cover, cover_key,
                          digest, load_toml)

CONFIGS = Path(__file__).resolve().parent.parent / "configs"


def cfg(name):
    return str(CONFIGS / name)


# -- spec builders ---------------------------------------------------------------

def test_group_specs():
    assert build_group({"kind": "perm", "generators": ["(1,2)", "(1,2,3)"]}).order == 6
    assert build_group({"kind": "named", "name": "dihedral", "n": 4}).order == 8
    assert build_group({"kind": "named", "name": "abelian", "orders": [2, 4]}).order == 8
    assert build_group({"kind": "table", "table": gr.cyclic(5).table.tolist()}).order == 5
    B = build_group({"kind": "semidirect", "N": {"name": "cyclic", "n": 3}, "Q": {"name": "cyclic", "n": 2},
                     "action": [[0, 2, 1]]})
    assert B.order == 6 and not B.is_abelian


@pytest.mark.parametrize("spec", [{"kind": "perm"}, {"kind": "named", "name": "monster"},
                                  {"kind": "table", "table": [[0, 1], [1, 1]]}, [1, 2], {"kind": "wat"}])
def test_bad_group_specs(spec):
    with pytest.raises(InvalidGroupSpec):
        build_group(spec)


def test_gamma_and_level_specs():
    Gamma = build_group(load_toml(cfg("z2.toml")))
    A = build_gamma_group(load_toml(cfg("z3inv.toml")), Gamma)
    assert A.admissible and len(A.y_image) == 3
    C = build_level(load_toml(cfg("abelian3.toml")), Gamma)
    assert C.contains(A)
    V = build_gamma_group(load_toml(cfg("v4.toml")), build_group(load_toml(cfg("z3.toml"))))
    assert V.order == 4 and V.admissible


def test_bad_action_rejected():
    Gamma = gr.cyclic(2)
    with pytest.raises(InvalidGroupSpec):
        build_gamma_group({"group": {"name": "cyclic", "n": 3}, "action": {"kind": "perms", "perms": [[0, 1, 1]]}},
                          Gamma)


def test_class_set_parsing():
    S3 = gr.symmetric(3)
    assert len(parse_class_set(S3, "all")) == 5
    assert len(parse_class_set(S3, "order:2")) == 3


# -- cache -----------------------------------------------------------------------

def test_cache_store_load(tmp_path):
    c = Cache(tmp_path)
    c.store("x", {"a": 1}, {"v": [1, 2]})
    assert c.load("x", {"a": 1}) == {"v": [1, 2]}
    assert c.load("x", {"a": 2}) is None


def test_cache_rejects_corruption(tmp_path):
    c = Cache(tmp_path)
    p = c.store("x", {"a": 1}, {"v": 1})
    rec = json.loads(p.read_text())
    rec["payload"]["v"] = 2
    p.write_text(json.dumps(rec))
    assert c.load("x", {"a": 1}) is None and not p.exists()
    p = c.store("x", {"a": 1}, {"v": 1})
    rec = json.loads(p.read_text())
    rec["version"] = 999
    p.write_text(json.dumps(rec))
    assert c.load("x", {"a": 1}) is None


def test_poisoned_cover_recomputed(tmp_path):
    A4 = gr.alternating(4)
    c = [x for x in range(12) if A4.orders[x] == 3]
    cache = Cache(tmp_path)
    good = cached_cover(A4, c, cache).to_dict()
    key = dict(cover_key(A4, c), choice=0)
    p = cache.path("cover", digest(key))
    rec = json.loads(p.read_text())
    rec["payload"]["cocycle"][1][2] ^= 1
    rec["checksum"] = digest(rec["payload"])       # checksum fixed up: only validation can catch it
    p.write_text(json.dumps(rec))
    again = cached_cover(A4, c, cache)
    assert again.to_dict() == good


# -- command line ---------------------------------------------------------------------

def cli(args, tmp_path, name="out.json"):
    out = tmp_path / name
    code = run(args + ["-o", str(out)])
    return code, (json.loads(out.read_text()) if out.exists() else None)


def test_cli_group(tmp_path):
    code, rep = cli(["group", "--spec", cfg("a4.toml")], tmp_path)
    assert code == 0 and rep["ok"] and rep["result"]["order"] == 12
    assert rep["result"]["abelianization"] == [3]


def test_cli_measure(tmp_path):
    code, rep = cli(["measure", "--gamma", cfg("z2.toml"), "--h", cfg("z3inv.toml"),
                     "--level", cfg("abelian3.toml"), "-n", "2", "-u", "1"], tmp_path)
    assert code == 0
    # three uniform vectors in F_3^2 spanning a line
    assert rep["result"]["probability"] == {"num": 104, "den": 729}


def test_cli_sample_exhaustive_and_budget(tmp_path):
    base = ["sample", "--gamma", cfg("z2.toml"), "--level", cfg("abelian3.toml"), "-n", "2", "-u", "1",
            "--exhaustive"]
    code, rep = cli(base, tmp_path)
    assert code == 0 and rep["result"]["count"] == 729
    code, _ = cli(base + ["--config", cfg("budgets_small.toml")], tmp_path, "b.json")
    assert code == 3


def test_cli_sample_needs_seed(tmp_path):
    code, _ = cli(["sample", "--gamma", cfg("z2.toml"), "--level", cfg("abelian3.toml"), "-n", "1"], tmp_path)
    assert code == 2


def test_cli_failed_check_exit_one(tmp_path):
    # an absurd tolerance makes the statistical comparison fail
    code, rep = cli(["sample", "--gamma", cfg("z2.toml"), "--level", cfg("abelian3.toml"), "-n", "2",
                     "--seed", "3", "--count", "2000", "--sigma", "1e-9"], tmp_path)
    assert code == 1 and rep["ok"] is False


def test_cli_usage_errors(tmp_path):
    assert run(["nonsense"]) == 2
    code, _ = cli(["group", "--spec", str(tmp_path / "missing.toml")], tmp_path)
    assert code == 2


def test_cli_seeded_runs_reproduce(tmp_path):
    args = ["sample", "--gamma", cfg("z2.toml"), "--level", cfg("abelian3.toml"), "-n", "2", "-u", "1",
            "--seed", "5", "--count", "3000"]
    cli(args, tmp_path, "a.json")
    cli(args + ["--threads", "3"], tmp_path, "b.json")
    a = json.loads((tmp_path / "a.json").read_text())
    b = json.loads((tmp_path / "b.json").read_text())
    assert a["result"]["tally"] == b["result"]["tally"]


def test_cli_cold_and_warm_cache_identical(tmp_path, monkeypatch):
    monkeypatch.setenv("GAMMASTAT_CACHE_DIR", str(tmp_path / "cache"))
    args = ["schur", "--group", cfg("a4.toml"), "--c", "order:3", "--full"]
    cli(args, tmp_path, "cold.json")
    assert any((tmp_path / "cache").iterdir())
    cli(args, tmp_path, "warm.json")
    assert (tmp_path / "cold.json").read_bytes() == (tmp_path / "warm.json").read_bytes()


def test_cli_correspondence_and_compare(tmp_path):
    code, rep = cli(["verify-correspondence", "--ambient", cfg("s3xz3.toml"), "--h", cfg("z3inv.toml"),
                     "--gamma", cfg("z2.toml")], tmp_path, "v.json")
    assert code == 0 and rep["result"]["surjections"] == 6
    code, rep = cli(["compare", "--gamma", cfg("z2.toml"), "--h", cfg("z3inv.toml"), "--q", "5",
                     "--n-max", "12"], tmp_path, "c.json")
    assert code == 0 and rep["result"]["equal"]


def test_cli_components(tmp_path):
    code, rep = cli(["count-components", "--group", cfg("s3.toml"), "--c", "order:2", "-n", "4", "--q", "5",
                     "--check", "--no-cache"], tmp_path)
    assert code == 0 and rep["result"]["b"] == rep["result"]["fixed_count"]
