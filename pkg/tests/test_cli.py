"""Command-line front end: tables, figures, verification, exit codes."""

import csv
import filecmp
import json

from liqscreen.cli import main


def _rows(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def test_no_command_is_usage_error(capsys):
    assert main([]) == 2
    assert "usage" in capsys.readouterr().err.lower()


def test_unknown_names_are_usage_errors(tmp_path):
    assert main(["--out", str(tmp_path), "table", "nonsense"]) == 2
    assert main(["--out", str(tmp_path), "figure", "nonsense"]) == 2


def test_missing_config_is_usage_error(tmp_path, capsys):
    code = main(["--config", str(tmp_path / "gone.json"),
                 "--out", str(tmp_path), "verify"])
    assert code == 2
    assert capsys.readouterr().err


def test_corrupted_config_is_usage_error(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{ not json")
    assert main(["--config", str(bad), "--out", str(tmp_path), "verify"]) == 2


def test_sensitivity_table_reproduces_advance_column(tmp_path):
    assert main(["--out", str(tmp_path), "table", "sensitivity"]) == 0
    rows = _rows(tmp_path / "table_sensitivity_v2.csv")
    advances = [float(r["a_star"]) for r in rows]
    for got, cell in zip(advances, (0.17, 0.27, 0.38, 0.45, 0.54)):
        assert abs(got - cell) <= 0.005
    # both surplus panels share the advance column
    rows3 = _rows(tmp_path / "table_sensitivity_v3.csv")
    for r2, r3 in zip(rows, rows3):
        assert r2["a_star"] == r3["a_star"]


def test_menu_table_advance_share_depends_only_on_tightness(tmp_path):
    assert main(["--out", str(tmp_path), "table", "menu"]) == 0
    rows = _rows(tmp_path / "table_menu.csv")
    by_R = {}
    for r in rows:
        by_R.setdefault(r["R"], set()).add(r["a_share"])
    assert by_R
    for shares in by_R.values():
        assert len(shares) == 1, by_R


def test_contagion_table_threshold_increases(tmp_path):
    assert main(["--out", str(tmp_path), "table", "contagion"]) == 0
    rows = _rows(tmp_path / "table_contagion.csv")
    thr = [float(r["delta_star"]) for r in rows]
    assert all(b > a for a, b in zip(thr, thr[1:])), thr


def test_advance_figure_passes_through_anchor(tmp_path):
    assert main(["--out", str(tmp_path), "figure", "advance"]) == 0
    rows = _rows(tmp_path / "figure_advance.csv")
    at_one = [r for r in rows if abs(float(r["R"]) - 1.0) < 1e-9]
    assert len(at_one) == 1
    assert abs(float(at_one[0]["a_star"]) - 0.267949) < 5e-4


def test_dominance_figure_advance_value_constant(tmp_path):
    assert main(["--out", str(tmp_path), "figure", "dominance"]) == 0
    rows = _rows(tmp_path / "figure_dominance.csv")
    w_a = {r["W_A"] for r in rows}
    assert w_a == {"0.250000"}
    for r in rows:
        assert float(r["W_M"]) >= max(float(r["W_A"]), float(r["W_C"])) - 1e-6


def test_remaining_figures_emit(tmp_path):
    for name in ("payoff", "contagion_region", "hump"):
        assert main(["--out", str(tmp_path), "figure", name]) == 0
        assert (tmp_path / f"figure_{name}.csv").exists()


def test_csv_outputs_byte_identical_across_runs(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    for out in (a, b):
        assert main(["--out", str(out), "table", "sensitivity"]) == 0
    assert filecmp.cmp(a / "table_sensitivity_v2.csv",
                       b / "table_sensitivity_v2.csv", shallow=False)


def test_verify_default_config_passes(tmp_path):
    assert main(["--out", str(tmp_path), "verify"]) == 0
    report = json.loads((tmp_path / "verify_report.json").read_text())
    assert report["all_pass"]
    assert report["seed"] == 42
    names = {c["check"] for c in report["checks"]}
    assert {"grid_agreement", "rent_identity", "ic_solved_contract",
            "ic_counterexample_caught", "uninformative_corner"} <= names
    for check in report["checks"]:
        assert check["status"] == "pass", check


def test_verify_flat_signal_config_passes(tmp_path):
    cfg = tmp_path / "flat.json"
    cfg.write_text(json.dumps(
        {"economy": {"v": 2.0, "mu0": 0.0, "K": 1.0, "R": 1.0,
                     "signal": {"kind": "flat"}}}))
    assert main(["--config", str(cfg), "--out", str(tmp_path), "verify"]) == 0
    report = json.loads((tmp_path / "verify_report.json").read_text())
    corner = [c for c in report["checks"] if c["check"] == "uninformative_corner"]
    assert corner and corner[0]["status"] == "pass"
