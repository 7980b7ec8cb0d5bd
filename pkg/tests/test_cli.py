"""End-to-end command-line tests: subcommands, file formats, exit codes."""

import csv

import numpy as np
import pytest

from causalorder import read_graph
from causalorder.cli import EXIT_CAPACITY, EXIT_NUMERIC, EXIT_PARSE, main, read_csv, write_csv


def run(*argv):
    return main(list(argv))


def test_simulate_then_fit_then_eval(tmp_path, capsys):
    prefix = str(tmp_path / "inst")
    assert run("simulate", "--graph", "er:8,3", "--n", "2000", "--seed", "5",
               "--out-prefix", prefix) == 0
    out = capsys.readouterr().out
    assert "nodes: 8" in out

    learned = str(tmp_path / "learned.graph")
    assert run("fit", "--data", prefix + ".data.csv", "--out", learned,
               "--restarts", "2", "--seed", "0") == 0
    out = capsys.readouterr().out
    assert "bic:" in out and "restarts_executed: 2" in out

    assert run("eval", "--learned", learned, "--truth", prefix + ".truth-cpdag.graph",
               "--data", prefix + ".data.csv") == 0
    out = capsys.readouterr().out
    assert "shd:" in out
    assert "learned_bic:" in out and "truth_bic:" in out
    assert "learned_beats_truth:" in out


def test_fit_deterministic(tmp_path, capsys):
    prefix = str(tmp_path / "i")
    run("simulate", "--graph", "er:6,2", "--out-prefix", prefix)
    capsys.readouterr()
    outs = []
    for name in ("a.graph", "b.graph"):
        path = str(tmp_path / name)
        run("fit", "--data", prefix + ".data.csv", "--out", path, "--seed", "3")
        outs.append(read_graph(path))
    capsys.readouterr()
    assert outs[0] == outs[1]


def test_eval_self_is_zero(tmp_path, capsys):
    prefix = str(tmp_path / "i")
    run("simulate", "--graph", "path:6", "--out-prefix", prefix)
    capsys.readouterr()
    truth = prefix + ".truth-cpdag.graph"
    assert run("eval", "--learned", truth, "--truth", truth) == 0
    assert "shd: 0" in capsys.readouterr().out


def test_exact_command(tmp_path, capsys):
    prefix = str(tmp_path / "i")
    run("simulate", "--graph", "er:4,2", "--n", "5000", "--out-prefix", prefix)
    capsys.readouterr()
    out_path = str(tmp_path / "exact.graph")
    assert run("exact", "--data", prefix + ".data.csv", "--out", out_path) == 0
    out = capsys.readouterr().out
    assert "bic:" in out
    read_graph(out_path)  # parses back


def test_bench_command(tmp_path, capsys):
    report = str(tmp_path / "report.csv")
    assert run("bench", "--suite", "er:6,2", "--seeds", "3",
               "--algos", "ils:0,ils:2", "--out", report) == 0
    out = capsys.readouterr().out
    assert "rows: 6" in out
    assert "recovery_fraction:" in out
    with open(report) as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) == 6
    assert set(rows[0]) == {
        "seed", "algo", "shd", "recovered", "learned_bic", "truth_bic",
        "wall_time_s", "restarts_executed",
    }
    assert {r["algo"] for r in rows} == {"ils:0", "ils:2"}


def test_csv_round_trip(tmp_path):
    path = str(tmp_path / "d.csv")
    data = np.random.default_rng(0).standard_normal((20, 3))
    write_csv(path, ["a", "b", "c"], data)
    labels, back = read_csv(path)
    assert labels == ["a", "b", "c"]
    assert np.array_equal(back, data)  # %.17g round-trips doubles


def test_csv_no_header(tmp_path):
    path = str(tmp_path / "d.csv")
    path_obj = tmp_path / "d.csv"
    path_obj.write_text("1.0,2.0\n3.0,4.0\n")
    labels, data = read_csv(path, header=False)
    assert labels == ["x0", "x1"]
    assert data.shape == (2, 2)


def test_exit_code_parse_errors(tmp_path, capsys):
    bad = tmp_path / "bad.csv"
    bad.write_text("a,b\n1.0,oops\n")
    out = str(tmp_path / "o.graph")
    assert run("fit", "--data", str(bad), "--out", out) == EXIT_PARSE
    assert "error:" in capsys.readouterr().err

    bad.write_text("a,b\n1.0\n")
    assert run("fit", "--data", str(bad), "--out", out) == EXIT_PARSE
    capsys.readouterr()

    bad.write_text("a,b\n1.0,inf\n")
    assert run("fit", "--data", str(bad), "--out", out) == EXIT_PARSE
    capsys.readouterr()

    bad.write_text("")
    assert run("fit", "--data", str(bad), "--out", out) == EXIT_PARSE
    capsys.readouterr()

    assert run("simulate", "--graph", "ring:5", "--out-prefix", str(tmp_path / "x")) == EXIT_PARSE
    capsys.readouterr()

    assert run("bench", "--suite", "er:4,2", "--algos", "hillclimb",
               "--out", str(tmp_path / "r.csv")) == EXIT_PARSE
    capsys.readouterr()


def test_exit_code_numeric(tmp_path, capsys):
    bad = tmp_path / "const.csv"
    bad.write_text("a,b\n1.0,2.0\n1.0,3.0\n1.0,4.0\n")
    out = str(tmp_path / "o.graph")
    assert run("fit", "--data", str(bad), "--out", out) == EXIT_NUMERIC
    capsys.readouterr()


def test_exit_code_capacity(tmp_path, capsys):
    big = tmp_path / "big.csv"
    rng = np.random.default_rng(0)
    write_csv(str(big), [f"c{i}" for i in range(21)], rng.standard_normal((30, 21)))
    assert run("exact", "--data", str(big)) == EXIT_CAPACITY
    capsys.readouterr()


def test_eval_label_mismatch(tmp_path, capsys):
    a = tmp_path / "a.graph"
    b = tmp_path / "b.graph"
    a.write_text("nodes: x,y\nx -> y\n")
    b.write_text("nodes: p,q\np -> q\n")
    assert run("eval", "--learned", str(a), "--truth", str(b)) == EXIT_PARSE
    capsys.readouterr()


def test_fit_time_limit_flag(tmp_path, capsys):
    prefix = str(tmp_path / "i")
    run("simulate", "--graph", "er:6,2", "--out-prefix", prefix)
    capsys.readouterr()
    out = str(tmp_path / "o.graph")
    assert run("fit", "--data", prefix + ".data.csv", "--out", out,
               "--time-limit", "0.2") == 0
    assert "restarts_executed:" in capsys.readouterr().out
