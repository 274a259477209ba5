"""Command-line harness: subcommands, config handling, file outputs."""

import json

import numpy as np
import pytest

from gwolf.cli import main
from gwolf.dist import GridCurve


def test_dist_preset_writes_curves_and_metadata(tmp_path):
    out = tmp_path / "d"
    assert main(["dist", "--preset", "fig4a", "--out", str(out),
                 "--trials", "5000"]) == 0
    for name in ("fig4a_g1.csv", "fig4a_G1.csv", "fig4a_h.csv", "fig4a_H.csv",
                 "fig4a_hist_step.csv", "fig4a_hist_update.csv"):
        assert (out / name).exists(), name
    meta = json.loads((out / "fig4a_g1.json").read_text())
    assert meta["support"] == [-5.0, 7.0]
    assert meta["kind"] == "pdf"
    # written curves re-validate on load
    curve = GridCurve.from_csv(out / "fig4a_h.csv")
    assert curve.kind == "pdf"
    cdf = GridCurve.from_csv(out / "fig4a_H.csv")
    assert cdf.values[-1] == 1.0


def test_dist_preset_list_runs_table_rows(tmp_path):
    out = tmp_path / "rows"
    names = "fig6a,fig6g"
    assert main(["dist", "--preset", names, "--out", str(out),
                 "--trials", "2000"]) == 0
    assert (out / "fig6a_h.csv").exists()
    assert (out / "fig6g_h.csv").exists()


def test_dist_rejects_nonpositive_a(tmp_path, capsys):
    cfg = tmp_path / "bad.json"
    cfg.write_text(json.dumps({"a": -1.0, "p": [1, 1, 1], "x": 3.0}))
    code = main(["dist", "--config", str(cfg), "--out", str(tmp_path / "o")])
    assert code == 2
    assert "a" in capsys.readouterr().err


def test_dist_rejects_unknown_config_keys(tmp_path, capsys):
    cfg = tmp_path / "bad.json"
    cfg.write_text(json.dumps({"a": 2.0, "p": [1, 1, 1], "x": 3.0,
                               "bogus": 1}))
    code = main(["dist", "--config", str(cfg), "--out", str(tmp_path / "o")])
    assert code == 2
    assert "bogus" in capsys.readouterr().err


def test_dist_rejects_unknown_preset(tmp_path):
    assert main(["dist", "--preset", "fig99", "--out",
                 str(tmp_path / "o")]) == 2


def test_moments_default_gap_table(tmp_path):
    out = tmp_path / "m"
    assert main(["moments", "--p=-1,1.5,2.5", "--T", "50",
                 "--out", str(out)]) == 0
    table = (out / "moments_gaps.csv").read_text().splitlines()
    assert table[0] == "T,gap,bound_prop35"
    assert len(table) == 7
    gaps = [float(line.split(",")[1]) for line in table[1:]]
    assert all(gaps[i] > gaps[i + 1] for i in range(len(gaps) - 1))


def test_moments_zero_spread_attractor_column(tmp_path):
    out = tmp_path / "z"
    assert main(["moments", "--p", "0,0,0", "--T", "20", "--out",
                 str(out)]) == 0
    rows = (out / "moments_trajectory.csv").read_text().splitlines()[1:]
    d0 = [float(r.split(",")[3]) for r in rows]
    assert all(v == 0.0 for v in d0)


def test_moments_higher_order_adds_columns(tmp_path):
    out = tmp_path / "o4"
    assert main(["moments", "--preset", "fig11a", "--order", "4",
                 "--out", str(out)]) == 0
    header = (out / "fig11a_trajectory.csv").read_text().splitlines()[0]
    assert header == "t,sigma2,E,D0,bound_cor31,sigma4"


def test_moments_mc_trace(tmp_path):
    out = tmp_path / "mc"
    assert main(["moments", "--p=-1,1.5,2.5", "--T", "20",
                 "--mc-trials", "4000", "--out", str(out)]) == 0
    lines = (out / "moments_mc.csv").read_text().splitlines()
    assert lines[0] == "t,mean,var,se_mean,se_var"
    assert len(lines) == 21


def test_moments_preset_histograms(tmp_path):
    out = tmp_path / "h9"
    assert main(["moments", "--preset", "fig9", "--mc-trials", "3000",
                 "--out", str(out)]) == 0
    from gwolf.mcverify import Histogram
    hist = Histogram.from_csv(out / "fig9_hist_t10.csv")
    assert hist.counts.size == 80
    assert hist.total == 3000


def test_moments_rejects_hist_ts_out_of_range(tmp_path):
    assert main(["moments", "--p", "1,2,3", "--T", "10", "--mc-trials",
                 "100", "--hist-ts", "2,99", "--out",
                 str(tmp_path / "x")]) == 2


def test_moments_rejects_odd_order(tmp_path):
    assert main(["moments", "--p", "1,2,3", "--order", "3",
                 "--out", str(tmp_path / "x")]) == 2


def test_optimize_outputs_and_determinism(tmp_path):
    out1 = tmp_path / "r1"
    out2 = tmp_path / "r2"
    args = ["optimize", "--objective", "sphere", "--dim", "4", "--agents",
            "10", "--iters", "60", "--seed", "7"]
    assert main(args + ["--out", str(out1)]) == 0
    assert main(args + ["--out", str(out2)]) == 0
    t1 = (out1 / "sphere_trace.csv").read_text()
    assert t1 == (out2 / "sphere_trace.csv").read_text()
    rows = [float(line.split(",")[1]) for line in t1.splitlines()[1:]]
    assert all(rows[i] >= rows[i + 1] for i in range(len(rows) - 1))
    sol = json.loads((out1 / "sphere_solution.json").read_text())
    assert sol["best_fitness"] <= sol["initial_fitness"]
    assert len(sol["best_position"]) == 4


def test_optimize_rejects_two_agents(tmp_path):
    assert main(["optimize", "--objective", "sphere", "--agents", "2",
                 "--out", str(tmp_path / "x")]) == 2


def test_verify_low_power_smoke(tmp_path):
    out = tmp_path / "v"
    code = main(["verify", "--trials", "2000", "--out", str(out)])
    report = json.loads((out / "report.json").read_text())
    assert report["config"]["trials"] == 2000
    assert report["config"]["low_power"] is True
    assert len(report["checks"]) == 10
    assert code == (0 if report["all_passed"] else 1)


def test_verify_rejects_corrupted_config_before_running(tmp_path, capsys):
    bad = tmp_path / "cfg.json"
    bad.write_text("{not json")
    out = tmp_path / "v"
    assert main(["verify", "--config", str(bad), "--out", str(out)]) == 2
    assert not (out / "report.json").exists()
    bad.write_text(json.dumps({"trials": 100, "surprise": 1}))
    assert main(["verify", "--config", str(bad), "--out", str(out)]) == 2
    assert "surprise" in capsys.readouterr().err
    assert not (out / "report.json").exists()
