import logging

import numpy as np
import pandas as pd
import pytest

from src.report.checks import CheckSuite
from src.report.checks import constant_solution_roots
from src.report.checks import mms_rate_failures
from src.report.config import load_run_config
from src.report.sweep import SWEEP_COLUMNS
from src.report.sweep import max_sup_norm_by_interval
from src.report.sweep import run_sweep
from src.report.sweep import t_lower_star_estimate
from src.data_model.nonlinearity import Nonlinearity


@pytest.fixture(scope='module')
def pl11_sweep():
    config = load_run_config("pl11")
    return run_sweep(config, config.t_values())


def test_pl11_trichotomy(pl11_sweep):
    assert list(pl11_sweep.columns) == SWEEP_COLUMNS
    assert list(pl11_sweep["count"]) == [2, 2, 2, 2, 1, 0, 0]
    assert (pl11_sweep["error"] == "").all()
    assert pl11_sweep["max_defect"].max() <= 1e-8
    assert pl11_sweep.loc[0, "indices"] == "+1 -1"


def test_sweep_estimates(pl11_sweep):
    assert t_lower_star_estimate(pl11_sweep) == -0.1
    norms = max_sup_norm_by_interval(pl11_sweep)
    assert norms["[-2, -1]"] == pytest.approx(2.0)
    assert norms["[-0.1, 0]"] == pytest.approx(0.1)
    assert len(norms) == 4


def test_sweep_estimate_is_the_right_end_of_multiplicity():
    sweep = pd.DataFrame({"t": [-2.0, -1.0, -0.5, 0.0], "count": [2, 2, 2, 1], "max_sup_norm": [2.0, 1.0, 0.5, 0.0]})
    assert t_lower_star_estimate(sweep) == -0.5


def test_estimates_without_multiplicity():
    sweep = pd.DataFrame({"t": [0.0], "count": [1], "max_sup_norm": [0.0]})
    assert t_lower_star_estimate(sweep) is None
    assert max_sup_norm_by_interval(sweep) == {"[0]": 0.0}


def test_smooth_abs_sweep(caplog):
    caplog.set_level(logging.INFO)
    config = load_run_config("smoothabs")
    sweep = run_sweep(config, config.t_values(), logger=logging.getLogger("test_sweep"))
    assert list(sweep["count"]) == [2, 1, 0]
    assert "t=-3: 2 solution(s)" in caplog.text


def test_single_point_sweep_matches_solve():
    config = load_run_config("pl11")
    sweep = run_sweep(config, [-1.0])
    assert list(sweep["count"]) == [2]
    np.testing.assert_allclose([sweep.loc[0, "u_mean_min"], sweep.loc[0, "u_mean_max"]], [-1.0, 1.0], atol=1e-8)


def test_parallel_sweep_matches_serial(pl11_sweep):
    config = load_run_config("pl11")
    parallel = run_sweep(config, config.t_values(), jobs=2)
    pd.testing.assert_frame_equal(parallel, pl11_sweep)


def test_sweep_rejects_bad_grid():
    config = load_run_config("pl11")
    with pytest.raises(ValueError):
        run_sweep(config, [0.0, -1.0])
    with pytest.raises(ValueError):
        run_sweep(config, [])


def test_constant_roots():
    assert constant_solution_roots(Nonlinearity.piecewise_linear(1.0, 2.0), -2.0) == [-1.0, 2.0]
    assert constant_solution_roots(Nonlinearity.piecewise_linear(1.0, 1.0), 0.0) == [0.0]
    assert constant_solution_roots(Nonlinearity.smooth_abs(), 0.5) == []
    roots = constant_solution_roots(Nonlinearity.smooth_abs(), -1.0)
    np.testing.assert_allclose(roots, [-np.sqrt(3.0), np.sqrt(3.0)])


def test_mms_floor_applies_to_every_refinement():
    table = pd.DataFrame({"alpha": [0.0, 0.0, 0.0, 0.5, 0.5, 0.5], "n_cells": [100, 200, 400] * 2,
                          "rate": [np.nan, 1.2, 2.0, np.nan, 1.9, 1.8]})
    assert mms_rate_failures(table) == ["alpha=0 n=200: 1.200"]
    table.loc[4, "rate"] = 1.4
    assert mms_rate_failures(table) == ["alpha=0 n=200: 1.200", "alpha=0.5 n=200: 1.400"]


def _light(config):
    return config.with_entries(check__random_draws=40, check__monotone_draws=3, check__v_samples=40,
                               check__mms_alphas="0, 0.5", check__mms_sizes="100, 200, 400")


def test_check_suite_passes_on_pl11(caplog):
    caplog.set_level(logging.INFO)
    suite = CheckSuite(_light(load_run_config("pl11")), logging.getLogger("test_checks"))
    items = suite.run()
    failed = [(item.name, item.measured) for item in items if not item.passed]
    assert suite.passed, failed
    assert suite.degree_table == {"G": 1, "B": 0, "B\\G": -1}
    assert max(suite.defects) <= 1e-8
    assert "[PASS] hypothesis certification" in caplog.text


def test_check_suite_fails_on_wrong_region(caplog):
    config = _light(load_run_config("pl11")).with_entries(region__rho_minus=0.5)
    suite = CheckSuite(config, logging.getLogger("test_checks"))
    item = suite.check_degree()
    assert not item.passed
    assert suite.degree_table["G"] == 0
