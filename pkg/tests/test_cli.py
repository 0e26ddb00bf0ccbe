import json

import pytest

from hypertree.cli import main


def run(tmp_path, *argv):
    return main([str(a) for a in argv])


def read_json(path):
    with open(path) as fh:
        return json.load(fh)


def test_kalai_check_ok(capsys):
    assert main(["kalai-check", "--n", "5", "--k", "2"]) == 0
    out = capsys.readouterr().out
    assert "125" in out and "equal" in out


def test_kalai_check_budget_refusal(capsys):
    assert main(["kalai-check", "--n", "9", "--k", "3"]) == 3
    err = json.loads(capsys.readouterr().out)
    assert err["error"]["type"] == "BudgetExceededError"


def test_budget_env_override(tmp_path, capsys, monkeypatch):
    monkeypatch.setenv("HYPERTREE_BUDGET", "10")
    # parser defaults are bound at build time, so rebuild through main
    assert main(["kalai-check", "--n", "4", "--k", "1"]) == 3
    monkeypatch.delenv("HYPERTREE_BUDGET")


def test_invalid_config_exit_code(capsys):
    assert main(["enumerate", "--n", "3", "--k", "3", "--out", "x.json"]) == 2
    err = json.loads(capsys.readouterr().out)
    assert err["error"]["type"] == "ValueError"


def test_enumerate_output_schema(tmp_path):
    out = tmp_path / "dist.json"
    assert main(["enumerate", "--n", "4", "--k", "1", "--out", str(out)]) == 0
    data = read_json(out)
    assert data["schema_version"] == "hypertree/1"
    assert data["n"] == 4 and data["k"] == 1
    assert data["total_weight"] == 16
    assert len(data["entries"]) == 16
    entry = data["entries"][0]
    assert set(entry) == {"faces", "homology_order"}
    assert all(isinstance(f, list) for f in entry["faces"])
    assert "config" in data and data["config"]["n"] == 4


def test_enumerate_csv(tmp_path):
    out = tmp_path / "dist.json"
    assert main(["enumerate", "--n", "4", "--k", "1", "--out", str(out), "--format", "csv"]) == 0
    lines = (tmp_path / "dist.csv").read_text().strip().splitlines()
    assert lines[0] == "faces,homology_order"
    assert len(lines) == 17


def test_sample_jsonl(tmp_path):
    out = tmp_path / "s.jsonl"
    assert main([
        "sample", "--n", "5", "--k", "2", "--trials", "4", "--seed", "9", "--out", str(out),
    ]) == 0
    lines = out.read_text().strip().splitlines()
    assert len(lines) == 4
    rec = json.loads(lines[0])
    assert set(rec) == {"trial", "faces", "homology_order"}
    assert len(rec["faces"]) == 6
    # determinism: identical run gives identical bytes
    out2 = tmp_path / "s2.jsonl"
    main(["sample", "--n", "5", "--k", "2", "--trials", "4", "--seed", "9", "--out", str(out2)])
    assert out.read_text() == out2.read_text()


def test_sample_rejects_wilson_for_k2(capsys):
    assert main([
        "sample", "--n", "6", "--k", "2", "--trials", "2", "--out", "/tmp/never.jsonl",
        "--method", "wilson",
    ]) == 2
    err = json.loads(capsys.readouterr().out)
    assert err["error"]["type"] == "ValueError"


def test_skeleton_output_and_figure(tmp_path):
    out = tmp_path / "hist.json"
    assert main([
        "skeleton", "--k", "2", "--depth", "2", "--trials", "500", "--seed", "7",
        "--out", str(out), "--threads", "1",
    ]) == 0
    data = read_json(out)
    assert data["histogram"]["total"] == 500
    assert (tmp_path / "hist.png").exists()


def test_skeleton_threads_identical(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    main(["skeleton", "--k", "1", "--depth", "2", "--trials", "400", "--seed", "3",
          "--out", str(a), "--threads", "1", "--no-figures"])
    main(["skeleton", "--k", "1", "--depth", "2", "--trials", "400", "--seed", "3",
          "--out", str(b), "--threads", "4", "--no-figures"])
    da, db = read_json(a), read_json(b)
    assert da["histogram"] == db["histogram"]


def test_limit_prob_star(tmp_path, capsys):
    tree = tmp_path / "star1.json"
    tree.write_text(json.dumps({"parents": [-1, 0, 1]}))
    assert main(["limit-prob", "--k", "1", "--tree", str(tree)]) == 0
    data = json.loads(capsys.readouterr().out)
    assert data["probability"] == pytest.approx(0.367879441)
    assert data["covering_matchings"] == 1
    assert data["odd_vertices"] == 1


def test_compare_report_files(tmp_path, capsys):
    out = tmp_path / "report.json"
    code = main([
        "compare", "--n", "40", "--k", "1", "--depth", "2", "--trials", "200",
        "--roots", "all", "--seed", "1", "--out", str(out), "--format", "csv",
        "--threads", "2",
    ])
    assert code == 0
    data = read_json(out)
    rep = data["report"]
    assert rep["observations"] == 200 * 40
    assert 0 <= rep["tv_distance"] <= 1
    assert (tmp_path / "report.csv").exists()
    assert (tmp_path / "report.png").exists()
    text = capsys.readouterr().out
    assert "TV distance" in text


def test_compare_threads_identical_json(tmp_path):
    outs = []
    for threads, name in [(1, "r1.json"), (3, "r3.json")]:
        out = tmp_path / name
        main([
            "compare", "--n", "30", "--k", "1", "--depth", "2", "--trials", "120",
            "--roots", "2", "--seed", "5", "--out", str(out), "--threads", str(threads),
            "--no-figures",
        ])
        data = read_json(out)
        del data["timestamp"]
        del data["config"]["out"]
        del data["config"]["threads"]
        outs.append(json.dumps(data, sort_keys=True))
    assert outs[0] == outs[1]


def test_compare_oracle_baseline(tmp_path):
    out = tmp_path / "r62.json"
    assert main([
        "compare", "--n", "6", "--k", "2", "--depth", "2", "--trials", "300",
        "--roots", "all", "--seed", "2", "--baseline", "oracle", "--method", "dpp",
        "--out", str(out), "--threads", "1", "--no-figures",
    ]) == 0
    rep = read_json(out)["report"]
    assert rep["baseline_mass"] == pytest.approx(1.0)


def test_quenched_files(tmp_path):
    out = tmp_path / "q.json"
    assert main([
        "quenched", "--n", "30", "--k", "1", "--depth", "2", "--trials", "20",
        "--seed", "3", "--target-star", "1", "--out", str(out), "--format", "csv",
    ]) == 0
    rep = read_json(out)["report"]
    assert len(rep["values"]) == 20
    assert 0.2 < rep["mean"] < 0.55
    assert (tmp_path / "q.csv").exists()
    assert (tmp_path / "q.png").exists()


def test_cohen_lenstra_files(tmp_path):
    out = tmp_path / "cl.json"
    assert main([
        "cohen-lenstra", "--n", "6", "--k", "2", "--p", "2", "--trials", "60",
        "--seed", "5", "--out", str(out), "--format", "csv",
    ]) == 0
    rep = read_json(out)["report"]
    assert rep["heuristic_trivial"] == pytest.approx(0.28879, abs=1e-5)
    assert (tmp_path / "cl.csv").exists()
    assert (tmp_path / "cl.png").exists()


def test_compare_kernel_baseline(tmp_path):
    out = tmp_path / "rk.json"
    assert main([
        "compare", "--n", "8", "--k", "2", "--depth", "2", "--trials", "300",
        "--roots", "1", "--seed", "4", "--baseline", "kernel", "--method", "dpp",
        "--mode", "float", "--out", str(out), "--threads", "1", "--no-figures",
    ]) == 0
    rep = read_json(out)["report"]
    assert rep["baseline_mass"] == pytest.approx(1.0)


def test_degeneracy_exit_code(monkeypatch, capsys):
    from hypertree import cli
    from hypertree.errors import NumericalDegeneracyError

    def boom(*args, **kwargs):
        raise NumericalDegeneracyError("pivot 1e-12 below tolerance")

    monkeypatch.setattr(cli, "cohen_lenstra_report", boom)
    code = main([
        "cohen-lenstra", "--n", "6", "--k", "2", "--p", "2", "--trials", "5",
        "--out", "/tmp/never.json",
    ])
    assert code == 4
    err = json.loads(capsys.readouterr().out)
    assert err["error"]["type"] == "NumericalDegeneracyError"


def test_dump_matrices(tmp_path):
    out = tmp_path / "red.csv"
    assert main(["dump", "--what", "reduced", "--n", "4", "--k", "1", "--out", str(out)]) == 0
    lines = out.read_text().strip().splitlines()
    assert lines[0] == "row,col,value"
    assert len(lines) == 1 + 9  # 3 rows x 6 cols, k+1 nonzeros per column within [n-1]
    out2 = tmp_path / "kern.csv"
    assert main(["dump", "--what", "kernel", "--n", "4", "--k", "1", "--out", str(out2)]) == 0
    assert "1/2" in (tmp_path / "kern.csv").read_text()


def test_version_flag(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["--version"])
    assert exc.value.code == 0
