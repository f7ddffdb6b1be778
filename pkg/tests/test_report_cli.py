import csv
import io
import json
import subprocess
import sys

import pytest

from influx.cli import main
from influx.influence import InfluenceConfig
from influx.network import load_fixture
from influx.report import AnalysisReport, analyze, build_report, graph_dot, heatmap_csv


def run_cli(*args, env=None):
    return subprocess.run([sys.executable, "-m", "influx.cli", *args], capture_output=True, text=True, env=env)


def test_report_round_trip():
    report = build_report(analyze(load_fixture("fig31"), InfluenceConfig(seed=1)))
    again = AnalysisReport.from_json(report.to_json())
    assert again == report
    with pytest.raises(ValueError):
        AnalysisReport.from_dict({**report.to_dict(), "schema": "v0"})


def test_heatmap_matches_report():
    report = build_report(analyze(load_fixture("tca_A"), InfluenceConfig(seed=1)))
    rows = list(csv.reader(io.StringIO(heatmap_csv(report))))
    assert rows[0][1:] == list(report.cols)
    for row, name, values in zip(rows[1:], report.rows, report.matrix):
        assert row[0] == name
        assert [int(v) for v in row[1:]] == [int(v) for v in values]


def test_square_heatmap_reaction_rows_are_zero():
    report = build_report(analyze(load_fixture("square")))
    rows = list(csv.reader(io.StringIO(heatmap_csv(report))))[1:]
    assert all(set(r[1:]) == {"0"} for r in rows[:2])
    assert all(set(r[1:]) == {"1"} for r in rows[2:])


def test_dot_output_for_fig31():
    dot = graph_dot(analyze(load_fixture("fig31"), InfluenceConfig(seed=1)))
    assert dot.startswith("digraph influence {")
    assert "&lang;<B>10</B>,<B>13</B>&rang;" in dot
    assert "<B>8</B>" in dot
    assert "⟨10,13⟩|{F}" in dot
    assert "rank=same" in dot


def test_analyze_is_byte_identical(tmp_path):
    outs = []
    for k in range(2):
        d = tmp_path / str(k)
        assert main(["analyze", "fig31.net", "--out-dir", str(d), "--seed", "42"]) == 0
        outs.append([(d / f).read_bytes() for f in ("report.json", "graph.dot", "heatmap.csv")])
    assert outs[0] == outs[1]
    data = json.loads(outs[0][0])
    assert data["config"]["seed"] == 42 and data["verdict"] == "regular"


def test_several_paths_get_subdirectories(tmp_path):
    assert main(["analyze", "fig31.net", "square.net", "--out-dir", str(tmp_path), "--format", "json"]) == 0
    assert (tmp_path / "fig31" / "report.json").exists()
    assert not (tmp_path / "square" / "graph.dot").exists()


def test_seed_from_environment(tmp_path):
    import os

    env = {**os.environ, "INFLUX_SEED": "0x2a"}
    proc = run_cli("analyze", "square.net", "--out-dir", str(tmp_path), "--format", "json", env=env)
    assert proc.returncode == 0, proc.stderr
    assert json.loads((tmp_path / "report.json").read_text())["config"]["seed"] == 42


def test_exit_codes(tmp_path, capsys):
    bad = tmp_path / "bad.net"
    bad.write_text("1: A -> B -> C\n")
    rank = tmp_path / "rank.net"
    rank.write_text("1: A -> B\n2: B -> A\n")
    degenerate = tmp_path / "deg.net"
    degenerate.write_text("x: A -> B\ny: A -> 2 B\n")
    assert main(["analyze", str(bad), "--out-dir", str(tmp_path)]) == 2
    assert main(["analyze", str(tmp_path / "missing.net"), "--out-dir", str(tmp_path)]) == 2
    assert main(["analyze", str(rank), "--out-dir", str(tmp_path)]) == 3
    assert main(["analyze", str(degenerate), "--out-dir", str(tmp_path)]) == 4
    assert main(["verify", "fig31.net", "--budget", "3"]) == 5
    assert main(["numcheck", "square.net", "--tol-zero", "1e-3"]) == 2


def test_verify_and_flip():
    assert main(["verify", "fig31.net"]) == 0
    assert main(["verify", "fig31.net", "--flip", "3", "1"]) == 1


def test_compare_and_okada(capsys):
    assert main(["compare", "tca_A.net", "tca_D.net"]) == 0
    out = capsys.readouterr().out
    assert "S1,7P->N2" in out and "status: ok" in out
    assert main(["okada", "fig31.net", "--reactions", "11,12", "--metabolites", "G,H"]) == 0
    assert main(["okada", "fig31.net", "--reactions", "5", "--metabolites", "C"]) == 1


def test_numcheck_command(tmp_path, capsys):
    path = tmp_path / "entries.csv"
    assert main(["numcheck", "fig31.net", "--models", "2", "--csv", str(path)]) == 0
    assert "hard violations: 0" in capsys.readouterr().out
    assert path.read_text().startswith("perturbed,kind,entry")
