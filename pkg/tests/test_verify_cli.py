import json
from pathlib import Path

import numpy as np
import pytest

from ellmirror import cli
from ellmirror import holo as ho
from ellmirror import mirror as mr
from ellmirror import verify as vf

DATA = Path(__file__).parent / "data"


def test_config_invariants():
    with pytest.raises(ValueError):
        vf.GeneratorConfig(max_rank=0)
    with pytest.raises(ValueError):
        vf.GeneratorConfig(max_denominator=13)
    with pytest.raises(ValueError):
        vf.GeneratorConfig(taus=())
    assert vf.GeneratorConfig().taus == vf.DEFAULT_TAUS


def test_report_pass_flag_matches_deviation():
    cfg = vf.GeneratorConfig(count=5)
    r = vf.run_check("dimension", cfg)
    assert r.passed == (r.deviation < r.tolerance)
    r = vf.run_check("associativity", vf.GeneratorConfig(count=3, tolerance=0.0))
    assert not r.passed


def test_generators_deterministic():
    cfg = vf.GeneratorConfig(seed=7)
    a = [vf.gen_object(cfg, cfg.rng(), summands=3) for _ in range(2)]
    assert ho.object_to_json(a[0]) == ho.object_to_json(a[1])
    rng = cfg.rng()
    for _ in range(40):
        (s, _), = vf.gen_object(cfg, rng).summands
        assert s.unipotent.cyclic if isinstance(s, ho.BundleDatum) else s.module.cyclic
        assert 1 <= s.dim <= cfg.max_rank


def test_generated_morphisms_fill_nonzero_homs():
    cfg = vf.GeneratorConfig(seed=3)
    rng = cfg.rng()
    A, B = vf.gen_object(cfg, rng, 2), vf.gen_object(cfg, rng, 2)
    f = vf.gen_morphism(cfg, A, B, 0.5j, rng)
    for key, vec in f.blocks.items():
        assert vec.size == f.block_dim(*key)
        if vec.size:
            assert np.any(vec != 0)


def test_json_byte_identical(tmp_path):
    paths = [tmp_path / "a.json", tmp_path / "b.json"]
    for p in paths:
        assert cli.main(["verify", "serre", "--count", "4", "--seed", "2", "--json", str(p)]) == 0
    assert paths[0].read_bytes() == paths[1].read_bytes()
    data = json.loads(paths[0].read_text())
    assert data[0]["check"] == "serre" and "seconds" not in data[0]


def test_every_check_invocable(capsys):
    for name in vf.CHECKS:
        assert cli.main(["verify", name, "--count", "1", "--tau", "0.2+0.9i"]) == 0
    out = capsys.readouterr().out
    assert out.count("PASS") == len(vf.CHECKS)


def test_failure_and_usage_exit_codes(capsys):
    assert cli.main(["verify", "no-such-check"]) == 2
    assert cli.main(["verify", "associativity", "--count", "2", "--tol", "0"]) == 1
    assert cli.main(["mirror", "/nonexistent.json"]) == 2
    with pytest.raises(SystemExit):
        cli.main(["verify", "serre", "--tau", "0.3-1i"])


def test_cli_mirror_and_inverse(capsys, tmp_path):
    assert cli.main(["mirror", str(DATA / "line_bundle.json")]) == 0
    fk_json = capsys.readouterr().out
    path = tmp_path / "x.json"
    path.write_text(fk_json)
    assert cli.main(["inverse", str(path)]) == 0
    back = ho.object_from_json(json.loads(capsys.readouterr().out))
    assert mr.is_isomorphic_db(back, ho.object_from_json(json.loads((DATA / "line_bundle.json").read_text())))


def test_cli_compose(capsys):
    assert cli.main(["compose", str(DATA / "f_theta.json"), str(DATA / "g_theta.json")]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["deviation"] < 1e-9
    assert set(out) == {"holomorphic", "mirror_of_composite", "composite_of_mirrors", "deviation"}
    assert cli.main(["compose", str(DATA / "g_theta.json"), str(DATA / "g_theta.json")]) == 2
