import json

import pytest

from landmms.cli import main


def run(*argv):
    return main([str(a) for a in argv])


@pytest.fixture
def uniform_half(tmp_path):
    path = tmp_path / "u.json"
    assert run("gen", "--kind", "uniform", "--n", 2, "--s", "1/2", "--out", path) == 0
    return path


def test_exact_share_of_uniform_instance(uniform_half, tmp_path):
    out = tmp_path / "m.json"
    assert run("mms", "--in", uniform_half, "--agent", "A", "--k", 2, "--exact", "--out", out) == 0
    assert json.loads(out.read_text())["value"] == "1/4"


def test_dp_share(uniform_half, tmp_path):
    out = tmp_path / "m.json"
    assert run("mms", "--in", uniform_half, "--agent", "B", "--k", 2, "--dp", "--eps", "1/10", "--out", out) == 0
    data = json.loads(out.read_text())
    assert data["method"] == "dp" and "tree" in data


def test_solve_then_verify(uniform_half, tmp_path):
    out = tmp_path / "a.json"
    assert run("solve", "--in", uniform_half, "--eps", "1/100", "--out", out) == 0
    assert run("verify", "--in", uniform_half, "--alloc", out, "--bound", "mms:3") == 0
    again = tmp_path / "b.json"
    run("solve", "--in", uniform_half, "--eps", "1/100", "--out", again)
    assert out.read_bytes() == again.read_bytes()


def test_verify_rejects_touching_pieces(uniform_half, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"assignments": {"A": {"x": ["0", "1/2"], "y": ["0", "1"]},
                                               "B": {"x": ["1/2", "1"], "y": ["0", "1"]}}}))
    assert run("verify", "--in", uniform_half, "--alloc", bad) == 2


def test_verify_rejects_missing_agent(uniform_half, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"assignments": {"A": {"x": ["0", "1/4"], "y": ["0", "1"]}}}))
    assert run("verify", "--in", uniform_half, "--alloc", bad) == 2


def test_input_errors(tmp_path, uniform_half):
    assert run("mms", "--in", tmp_path / "missing.json", "--agent", "A", "--k", 2, "--exact") == 3
    broken = tmp_path / "broken.json"
    broken.write_text('{"land": 3}')
    assert run("mms", "--in", broken, "--agent", "A", "--k", 2, "--exact") == 3
    assert run("mms", "--in", uniform_half, "--agent", "Z", "--k", 2, "--exact") == 3
    assert run("mms", "--in", uniform_half, "--agent", "A", "--k", 2, "--dp") == 3
    with pytest.raises(SystemExit) as info:
        run("gen", "--kind", "uniform", "--bogus")
    assert info.value.code == 3


def test_budget_exceeded(tmp_path):
    path = tmp_path / "r.json"
    run("gen", "--kind", "random", "--n", 1, "--seed", 3, "--out", path)
    code = run("mms", "--in", path, "--agent", "A", "--k", 6, "--exact", "--grid", 10, "--budget", 1000)
    assert code == 4


def test_infeasible_exit(uniform_half):
    assert run("mms", "--in", uniform_half, "--agent", "A", "--k", 9, "--exact", "--grid", 2) == 1


def test_gen_fixtures(tmp_path):
    for kind in ("crossing", "polygon", "random"):
        out = tmp_path / f"{kind}.json"
        assert run("gen", "--kind", kind, "--n", 2, "--s", "1/10", "--out", out) == 0
        assert json.loads(out.read_text())["agents"]
    crossing = json.loads((tmp_path / "crossing.json").read_text())
    assert crossing["shape"] == "square"


def test_solve_squares_with_and_without_partitions(tmp_path):
    inst = tmp_path / "sq.json"
    run("gen", "--kind", "uniform", "--n", 2, "--s", "1/10", "--shape", "square", "--out", inst)
    out = tmp_path / "a.json"
    assert run("solve", "--in", inst, "--eps", "1/10", "--out", out) == 0
    assert run("verify", "--in", inst, "--alloc", out, "--bound", "mms:3") == 0
    parts = [{"x": ["0", "3/10"], "y": ["0", "3/10"]}, {"x": ["7/10", "1"], "y": ["0", "3/10"]},
             {"x": ["0", "3/10"], "y": ["7/10", "1"]}]
    pfile = tmp_path / "p.json"
    pfile.write_text(json.dumps({"A": parts, "B": parts}))
    assert run("solve", "--in", inst, "--eps", "1/10", "--partitions", pfile, "--out", out) == 0
    assert run("verify", "--in", inst, "--alloc", out) == 0


def test_bench_writes_csv(tmp_path):
    suite = tmp_path / "suite.json"
    suite.write_text(json.dumps({"runs": [{"n": 2, "s": "1/10", "eps": "1/10", "seed": 1},
                                          {"kind": "uniform", "n": 2, "s": "0", "eps": "1/10", "name": "flat"}]}))
    out = tmp_path / "b.csv"
    assert run("bench", "--suite", suite, "--out", out) == 0
    lines = out.read_text().splitlines()
    assert lines[0].startswith("run,agent")
    assert len(lines) == 5
    assert lines[3].startswith("flat,A")
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"runs": [{"n": 2}]}))
    assert run("bench", "--suite", bad, "--out", out) == 3
