import csv
import io
import json
import subprocess
import sys

import pytest

from subsetdesigns import cli


def run(capsys, *argv):
    try:
        code = cli.main(list(argv))
    except SystemExit as exc:  # argparse usage errors
        code = exc.code
    out = capsys.readouterr()
    return code, out.out, out.err


def rows_json(capsys, *argv):
    code, out, _ = run(capsys, *argv, "--format", "json")
    assert code == 0
    return json.loads(out)["rows"]


def test_count_examples(capsys):
    (r,) = rows_json(capsys, "count", "--group", "3,3", "--k", "3", "--x", "0,0")
    assert r["count"] == 12 and r["count_star"] == 8
    rows = rows_json(capsys, "count", "--group", "4", "--k", "2", "--x", "all-eclasses")
    assert [(r["e"], r["count"]) for r in rows] == [(4, 1), (1, 2), (2, 1)]
    (r,) = rows_json(capsys, "count", "--group", "2,2", "--k", "2", "--x", "0,0", "--verify-oracle")
    assert r["count"] == 0 and r["note"] == "empty-by-theorem" and r["oracle"] == "agree"


def test_check_examples(capsys):
    (r,) = rows_json(capsys, "check", "--group", "9", "--k", "3", "--x", "1", "--t", "1", "--verify-oracle")
    assert r["is_design"] and r["rule"] == "p-group:(ii)" and r["oracle"] == "agree"
    (r,) = rows_json(capsys, "check", "--group", "6", "--k", "2", "--x", "2", "--t", "1")
    assert not r["is_design"]
    (r,) = rows_json(capsys, "check", "--group", "3,3", "--k", "3", "--x", "0,0", "--t", "2")
    assert r["is_design"] and r["lambda"] == 1 and r["rule"] == "elementary-2design"
    (r,) = rows_json(capsys, "check", "--group", "4", "--k", "2", "--x", "0", "--t", "2")
    assert r["rule"] == "generic/oracle" and not r["is_design"]


def test_check_verify_all(capsys):
    rows = rows_json(capsys, "check", "--group", "2,6", "--t", "1", "--verify-oracle")
    assert len(rows) == 12 * 4 and all(r["oracle"] == "agree" for r in rows)


def test_scan_examples(capsys):
    code, out, _ = run(capsys, "scan-conjecture", "--orders", "4..16", "--format", "json")
    lines = [json.loads(l) for l in out.splitlines()]
    assert code == 0 and lines[0]["header"]["seed"] == 0
    summary = lines[-1]["summary"]
    assert summary["designs_found"] == 0 and summary["groups_scanned"] == 8
    assert summary["parameter_pairs"] == len(lines) - 2
    code, out, _ = run(capsys, "scan-conjecture", "--orders", "9..9", "--format", "json")
    assert {json.loads(l).get("group") for l in out.splitlines()[1:-1]} == {"9"}


def test_scan_partial_exit_code(capsys):
    code, out, _ = run(capsys, "scan-conjecture", "--orders", "4..32", "--format", "json")
    assert code == 2
    assert json.loads(out.splitlines()[-1])["summary"]["frontier"]


def test_scan_counterexample_exit_code(capsys, monkeypatch):
    from subsetdesigns import oracle

    real = oracle.design_from_coverage

    def fake(tsubsets, column, blocks, t):
        rep = real(tsubsets, column, blocks, t)
        return oracle.DesignCheckReport(t, True, lam=1, blocks=blocks)

    monkeypatch.setattr(oracle, "design_from_coverage", fake)
    code, out, _ = run(capsys, "scan-conjecture", "--orders", "4..4", "--format", "json")
    assert code == 3


def test_ec_examples(capsys):
    code, out, _ = run(capsys, "ec", "--curve", "p=43,a=0,b=3", "--k", "7", "--t", "1", "--format", "json")
    rep = json.loads(out)
    assert code == 0
    assert rep["curve"]["points"] == 49 and rep["curve"]["structure"] == "PRODUCT(7, 7)"
    (r,) = rep["rows"]
    assert (r["n"], r["k"], r["d"], r["mds_status"]) == (48, 7, 41, "NMDS")
    assert r["designs"][0]["is_design"] and r["certificate"]["weight"] == 41
    rows = rows_json(capsys, "ec", "--curve", "p=5,a=1,b=1", "--k", "1,2", "--verify-oracle")
    assert [(r["n"], r["k"], r["d"], r["mds_status"], r["oracle"]) for r in rows] == [
        (8, 1, 8, "MDS", "agree"),
        (8, 2, 6, "NMDS", "agree"),
    ]


def test_ec_matrix_export(capsys, tmp_path):
    path = tmp_path / "g.csv"
    code, _, _ = run(capsys, "ec", "--curve", "p=5,a=1,b=1", "--k", "2", "--matrix-csv", str(path))
    assert code == 0
    rows = list(csv.reader(path.open()))
    assert rows[0] == ["1"] * 8 and len(rows) == 2
    code, _, err = run(capsys, "ec", "--curve", "p=5,a=1,b=1", "--k", "1,2", "--matrix-csv", str(path))
    assert code == 1 and "single" in err


def test_usage_errors(capsys):
    assert run(capsys, "count", "--group", "0")[0] == 1
    assert run(capsys, "check", "--group", "4", "--bogus")[0] == 1
    assert run(capsys, "count", "--group", "4", "--k", "x")[0] == 1
    assert run(capsys, "ec", "--curve", "p=5,a=0,b=0")[0] == 1
    code, _, err = run(capsys, "ec", "--curve", "p=5,a=0,b=0")
    assert "singular" in err
    assert run(capsys, "count", "--group", "4", "--jobs", "0")[0] == 1
    with pytest.raises(SystemExit) as exc:
        cli.main([])
    assert exc.value.code == 1


def test_resource_exit(capsys):
    code, _, err = run(capsys, "check", "--group", "16", "--k", "8", "--x", "0", "--t", "2", "--subset-budget", "100")
    assert code == 2 and "budget" in err


def test_oracle_mismatch_exit(capsys, monkeypatch):
    monkeypatch.setattr(cli, "count_subsets", lambda G, k, x: 99)
    code, out, _ = run(capsys, "count", "--group", "4", "--k", "2", "--verify-oracle", "--format", "json")
    assert code == 3 and "MISMATCH" in out


def test_formats_and_determinism(capsys, tmp_path):
    args = ["count", "--group", "2,4", "--seed", "17"]
    outs = {}
    for fmt in ("json", "csv", "pretty"):
        a = run(capsys, *args, "--format", fmt)[1]
        b = run(capsys, *args, "--format", fmt)[1]
        assert a == b
        outs[fmt] = a
    assert json.loads(outs["json"])["header"]["seed"] == 17
    assert outs["csv"].startswith("# ") and "seed=17" in outs["csv"].splitlines()[0]
    table = list(csv.DictReader(io.StringIO("\n".join(outs["csv"].splitlines()[1:]))))
    assert len(table) == 9 * 3
    assert "seed=17" in outs["pretty"].splitlines()[0]
    path = tmp_path / "out.json"
    assert run(capsys, *args, "--format", "json", "--output", str(path))[0] == 0
    assert path.read_text() == outs["json"]


def test_jobs_merge_in_order(capsys):
    a = run(capsys, "check", "--group", "3,6", "--format", "json")[1]
    b = run(capsys, "check", "--group", "3,6", "--format", "json", "--jobs", "2")[1]
    assert a == b
    c = run(capsys, "scan-conjecture", "--orders", "4..16", "--format", "json", "--jobs", "2")[1]
    d = run(capsys, "scan-conjecture", "--orders", "4..16", "--format", "json")[1]
    assert c == d


def test_console_script():
    out = subprocess.run(
        [sys.executable, "-m", "subsetdesigns.cli", "count", "--group", "9", "--k", "2", "--x", "6", "--format", "csv"],
        capture_output=True,
        text=True,
        check=True,
    ).stdout
    assert out.splitlines()[-1] == "9,2,6,3,4,3,"
