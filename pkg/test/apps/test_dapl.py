import logging

import pandas as pd
import pytest

from src.apps.dapl import EXIT_CHECK
from src.apps.dapl import EXIT_CONFIG
from src.apps.dapl import EXIT_OK
from src.apps.dapl import build_parser
from src.apps.dapl import main
from src.report.summary import read_summary


def run(argv, caplog=None):
    if caplog is not None:
        caplog.set_level(logging.INFO)
    args = build_parser().parse_args(argv)
    return main(args, logging.getLogger("test_dapl_app"))


def write_config(tmp_path, text):
    path = tmp_path / "run.cfg"
    path.write_text(text, encoding="utf-8")
    return str(path)


LIGHT_CHECKS = ("check.random_draws = 40\ncheck.monotone_draws = 3\ncheck.v_samples = 40\n"
                "check.mms_alphas = 0, 0.5\ncheck.mms_sizes = 100, 200, 400\n")


def test_solve_two_solutions(tmp_path, caplog):
    out = tmp_path / "solve"
    assert run(["solve", "-m", "pl11", "--t", "-1", "-o", str(out)], caplog) == EXIT_OK
    table = pd.read_csv(out / "solutions.tsv", sep="\t")
    assert len(table) == 2
    assert list(table["index"]) == [1, -1]
    summary = read_summary(out / "summary.kv")
    assert summary["run.command"] == "solve"
    assert summary["solutions.count"] == "2"
    assert float(summary["solutions.max_defect"]) <= 1e-8
    assert "dapl solve finished" in caplog.text


def test_solve_beyond_the_fold(tmp_path, caplog):
    out = tmp_path / "solve"
    assert run(["solve", "-m", "pl11", "--t", "0.5", "-o", str(out)], caplog) == EXIT_OK
    table = pd.read_csv(out / "solutions.tsv", sep="\t")
    assert table.empty
    summary = read_summary(out / "summary.kv")
    assert summary["solutions.count"] == "0"
    assert float(summary["necessary_bound.value"]) == pytest.approx(0.0, abs=1e-12)
    assert summary["necessary_bound.t_exceeds"] == "true"
    assert "exceeds the necessary bound" in caplog.text


def test_bad_config_line(tmp_path, caplog):
    config = write_config(tmp_path, "model.name = pl11\nthis line is broken\n")
    assert run(["solve", "-c", config, "-o", str(tmp_path / "out")], caplog) == EXIT_CONFIG
    assert "line 2" in caplog.text


def test_alpha_out_of_range(tmp_path, caplog):
    config = write_config(tmp_path, "model.name = pl11\nproblem.alpha = 2.5\n")
    assert run(["solve", "-c", config, "-o", str(tmp_path / "out")], caplog) == EXIT_CONFIG
    assert "alpha" in caplog.text


def test_uncertified_table_is_a_config_error(tmp_path, caplog):
    config = write_config(tmp_path, "model.name = pl11\nnonlinearity.kind = table\nnonlinearity.table = -1:5, 0:0, 1:1\n"
                                      "nonlinearity.c_f = 1\nnonlinearity.c_1 = 1\nnonlinearity.c_2 = 0\n"
                                      "nonlinearity.c_3 = 2\nnonlinearity.c_4 = 0\n")
    assert run(["solve", "-c", config, "-o", str(tmp_path / "out")], caplog) == EXIT_CONFIG
    assert "linear_growth" in caplog.text
    assert "line 2, field 'nonlinearity.kind'" in caplog.text


def test_bad_t_range(tmp_path, caplog):
    assert run(["sweep", "-m", "pl11", "--t-range", "1:0:0.1", "-o", str(tmp_path)], caplog) == EXIT_CONFIG
    assert "Invalid --t-range" in caplog.text


def test_sweep_with_t_range(tmp_path):
    out = tmp_path / "sweep"
    assert run(["sweep", "-m", "pl11", "--t-range", "-1:0.5:0.5", "-o", str(out)]) == EXIT_OK
    sweep = pd.read_csv(out / "sweep.tsv", sep="\t")
    assert list(sweep["t"]) == pytest.approx([-1.0, -0.5, 0.0, 0.5])
    assert list(sweep["count"]) == [2, 2, 1, 0]
    summary = read_summary(out / "summary.kv")
    assert summary["sweep.counts"] == "2, 2, 1, 0"
    assert summary["t_lower_star.sweep_estimate"] == "-0.5"
    assert (out / "plot.gp").exists()


def test_branch_finds_the_fold(tmp_path):
    out = tmp_path / "branch"
    assert run(["branch", "-m", "pl11", "-o", str(out)]) == EXIT_OK
    summary = read_summary(out / "summary.kv")
    assert summary["fold.found"] == "true"
    assert float(summary["fold.t"]) == pytest.approx(0.0, abs=1e-6)
    assert len(pd.read_csv(out / "branch.tsv", sep="\t")) == int(summary["branch.points"])
    assert "set arrow" in (out / "plot.gp").read_text(encoding="utf-8")


def test_index_reports_degrees(tmp_path):
    out = tmp_path / "index"
    assert run(["index", "-m", "pl11", "--t", "-1", "-o", str(out)]) == EXIT_OK
    summary = read_summary(out / "summary.kv")
    assert summary["degree.G"] == "1"
    assert summary["degree.B"] == "0"
    assert summary["degree.B\\G"] == "-1"
    assert float(summary["region.rho_minus"]) > 1.0
    assert float(summary["spectrum.mu_1"]) > 1.0


def test_mms_table(tmp_path):
    out = tmp_path / "mms"
    config = write_config(tmp_path, "model.name = pl11\n" + LIGHT_CHECKS)
    assert run(["mms", "-c", config, "-o", str(out)]) == EXIT_OK
    table = pd.read_csv(out / "mms.tsv", sep="\t")
    assert sorted(set(table["alpha"])) == [0.0, 0.5]
    summary = read_summary(out / "summary.kv")
    assert float(summary["mms.rate.alpha_0"]) >= 1.9


def test_check_passes(tmp_path, caplog):
    out = tmp_path / "check"
    config = write_config(tmp_path, "model.name = pl11\n" + LIGHT_CHECKS)
    assert run(["check", "-c", config, "-o", str(out)], caplog) == EXIT_OK
    summary = read_summary(out / "summary.kv")
    assert summary["check.passed"] == "true"
    assert summary["degree.G"] == "1"


def test_check_failure_exit_code(tmp_path, caplog):
    out = tmp_path / "check"
    config = write_config(tmp_path, "model.name = pl11\nregion.rho_minus = 0.5\n" + LIGHT_CHECKS)
    assert run(["check", "-c", config, "-o", str(out)], caplog) == EXIT_CHECK
    summary = read_summary(out / "summary.kv")
    assert summary["check.passed"] == "false"
    assert "Check suite failed" in caplog.text


def test_debug_dump(tmp_path):
    out = tmp_path / "dump"
    assert run(["solve", "-m", "pl11", "--debug-dump", "-o", str(out)]) == EXIT_OK
    lines = (out / "stiffness.tsv").read_text(encoding="utf-8").splitlines()
    assert len(lines) > 400


def test_bracket_agrees_with_fold(tmp_path):
    out = tmp_path / "bracket"
    assert run(["bracket", "-m", "pl11", "-o", str(out)]) == EXIT_OK
    summary = read_summary(out / "summary.kv")
    assert float(summary["t_star.bracket_lo"]) <= 0.0 <= float(summary["t_star.bracket_hi"])
    assert summary["t_star.fold_agrees"] == "true"
