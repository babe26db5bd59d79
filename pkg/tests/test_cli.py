import json
import math
from fractions import Fraction as F

import pytest

from logperiods.chain_core import Chain, SimplicialComplex, Vertex, dump_bundle
from logperiods.cli import main
from logperiods.random_instances import triangulated_disk_box


@pytest.fixture
def prism_bundle(tmp_path):
    K, g = triangulated_disk_box(F(1), F(3))
    path = tmp_path / "prism.json"
    path.write_text(json.dumps(dump_bundle(K, {"prism": g})))
    return str(path)


@pytest.fixture
def winding_bundle(tmp_path):
    pts = [(F(2), F(1, 5)), (F(-1), F(2)), (F(-3, 2), F(-2)), (F(4), F(3)), (F(5), F(-1))]
    tris = [(0, 1, 2), (0, 1, 3), (0, 3, 4)]
    K = SimplicialComplex.from_maximal([Vertex(j, (p,)) for j, p in enumerate(pts)], tris,
                                       None, 1)
    path = tmp_path / "winding.json"
    path.write_text(json.dumps(dump_bundle(K, {"g": Chain.from_simplices(1, [(t, 1)
                                                                             for t in tris])})))
    return str(path)


def run(argv, tmp_path, name="out.json"):
    out = tmp_path / name
    code = main(argv + ["--json", str(out)])
    return code, (json.loads(out.read_text()) if out.exists() else None)


def test_disk_box_example(tmp_path):
    code, rep = run(["verify-cauchy", "--example", "disk-box", "--a", "1/2", "--b", "3"], tmp_path)
    assert code == 0 and rep["status"] == "pass"
    bd = rep["checks"][0]["detail"]["I_boundary"]
    assert abs(complex(*bd) - math.log(6) / (2j * math.pi)) < 1e-6


def test_bundle_verify_cauchy(prism_bundle, tmp_path):
    code, rep = run(["verify-cauchy", "--chains", prism_bundle], tmp_path)
    assert code == 0
    assert [c["name"] for c in rep["checks"]] == ["Cauchy on prism"]


def test_json_is_byte_identical_across_runs(tmp_path):
    argv = ["verify-cauchy", "--example", "disk-box", "--a", "1/4", "--b", "3/4"]
    main(argv + ["--json", str(tmp_path / "a.json")])
    main(argv + ["--json", str(tmp_path / "b.json")])
    assert (tmp_path / "a.json").read_bytes() == (tmp_path / "b.json").read_bytes()
    assert "seconds" not in (tmp_path / "a.json").read_text()
    main(argv + ["--json", str(tmp_path / "c.json"), "--timings"])
    assert "seconds" in (tmp_path / "c.json").read_text()


def test_dilog_periods(tmp_path, capsys):
    code, rep = run(["dilog-periods", "--a", "1/2"], tmp_path)
    assert code == 0
    deltas = rep["data"]["oracle_deltas"]
    assert deltas["Li2(a)"] < 1e-4 and deltas["Li1(a)"] < 1e-6 and deltas["log a"] < 1e-6
    assert rep["data"]["period_matrix"]["entries"][0][1]["symbolic"] == "0"
    assert "period matrix" in capsys.readouterr().out


def test_check_invariants_bar(tmp_path):
    code, rep = run(["check-invariants", "--suite", "bar"], tmp_path)
    assert code == 0 and all(c["status"] == "pass" for c in rep["checks"])


def test_thom_compare(winding_bundle, tmp_path):
    code, rep = run(["thom-compare", "--chains", winding_bundle], tmp_path)
    assert code == 0
    vals = {tuple(r["simplex"]): r["exact"] for r in rep["data"]["values"]}
    assert vals[(0, 1, 2)] == "1" and vals[(0, 1, 3)] == "0"


def test_inconclusive_run_exits_one(winding_bundle, tmp_path):
    # with a huge epsilon every simplex violates the support precondition
    code, rep = run(["thom-compare", "--chains", winding_bundle, "--epsilon", "10"], tmp_path)
    assert code == 1 and rep["status"] == "fail"
    assert rep["checks"][0]["detail"]["skipped"] == 3


@pytest.mark.parametrize("argv", [
    [],
    ["verify-cauchy"],
    ["verify-cauchy", "--example", "disk-box", "--a", "3", "--b", "2"],
    ["verify-cauchy", "--example", "dilog", "--a", "2"],
    ["dilog-periods", "--a", "x"],
    ["dilog-periods", "--a", "3/2"],
    ["check-invariants", "--suite", "nope"],
    ["thom-compare", "--chains", "/nonexistent.json"],
    ["check-invariants", "--suite", "bar", "--threads", "0"],
])
def test_usage_errors_exit_two(argv, capsys):
    assert main(argv) == 2


def test_malformed_bundle_exits_two(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text('{"n": 1, "vertices": [{"id": 0}]}')
    assert main(["verify-cauchy", "--chains", str(bad)]) == 2
    bad.write_text("not json")
    assert main(["thom-compare", "--chains", str(bad)]) == 2
    assert "error" in capsys.readouterr().err


def test_unknown_chain_name_exits_two(prism_bundle, capsys):
    assert main(["verify-cauchy", "--chains", prism_bundle, "--chain", "missing"]) == 2
