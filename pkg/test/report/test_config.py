import logging

import numpy as np
import pytest

from src.data_model.nonlinearity import NonlinearityKind
from src.data_model.run_config import AUTO
from src.data_model.run_config import RunConfig
from src.data_model.run_config import parse_forcing
from src.data_model.run_config import parse_t_range
from src.exceptions import ConfigError
from src.report.config import BUILTIN_MODELS
from src.report.config import load_run_config
from src.report.config import parse_config_text


def test_parse_config_text():
    entries, lines = parse_config_text("# header\n\nmesh.n_cells = 200  # cells\nproblem.alpha=1.0\n")
    assert entries == {"mesh.n_cells": "200", "problem.alpha": "1.0"}
    assert lines == {"mesh.n_cells": 3, "problem.alpha": 4}


@pytest.mark.parametrize("text, line, field", [
    ("mesh.n_cells = 200\nnot a pair\n", 2, None),
    ("n_cells = 200\n", 1, "n_cells"),
    ("mesh.n_cells = 200\nmesh.n_cells = 100\n", 2, "mesh.n_cells"),
    ("mesh.n_cells =\n", 1, "mesh.n_cells"),
])
def test_parse_errors_carry_line_and_field(text, line, field):
    with pytest.raises(ConfigError) as excinfo:
        parse_config_text(text)
    assert excinfo.value.line == line
    assert excinfo.value.field == field
    assert f"line {line}" in str(excinfo.value)


def test_parse_t_range():
    np.testing.assert_allclose(parse_t_range("-1:1:0.5"), [-1.0, -0.5, 0.0, 0.5, 1.0])
    np.testing.assert_allclose(parse_t_range("0:0.3:0.1"), [0.0, 0.1, 0.2, 0.3])
    for bad in ("1:0:0.1", "0:1:0", "0:1"):
        with pytest.raises(ValueError):
            parse_t_range(bad)


def test_parse_forcing_forms(tmp_path):
    assert parse_forcing("2.5") == 2.5
    table = parse_forcing("table(-1:0, 0:1, 1:0)")
    np.testing.assert_allclose(table(np.array([-0.5, 0.0, 0.5])), [0.5, 1.0, 0.5])
    path = tmp_path / "phi.txt"
    path.write_text("# x value\n0 1\n1 3\n", encoding="utf-8")
    from_file = parse_forcing("file(phi.txt)", base_dir=tmp_path)
    np.testing.assert_allclose(from_file(np.array([0.5])), [2.0])
    with pytest.raises(ValueError):
        parse_forcing("table(1:2)")


def test_builtin_models_load(logger):
    for name in BUILTIN_MODELS:
        config = load_run_config(name, logger=logger)
        assert config.model_name == name
        assert config.n_cells == 400
        assert config.rho_minus == AUTO
    config = load_run_config("pl11")
    assert config.nonlinearity_kind == NonlinearityKind.PIECEWISE_LINEAR
    np.testing.assert_allclose(config.t_values(), [-2.0, -1.0, -0.5, -0.1, 0.0, 0.1, 0.5])


def test_file_overrides_model_and_cli_overrides_file(tmp_path):
    path = tmp_path / "run.cfg"
    path.write_text("model.name = pl11\nmesh.n_cells = 100\nrun.t = -0.5\n", encoding="utf-8")
    config = load_run_config(path=path, overrides={"run.t": -0.25, "run.seed": None})
    assert config.n_cells == 100
    assert config.t == -0.25
    assert config.alpha == 0.5
    assert config.base_dir == tmp_path


def test_unknown_model_and_missing_input():
    with pytest.raises(ConfigError, match="unknown model"):
        load_run_config("nope")
    with pytest.raises(ConfigError):
        load_run_config()


def test_unknown_key_reports_line(tmp_path):
    path = tmp_path / "run.cfg"
    path.write_text("mesh.n_cells = 100\nmesh.cells = 3\n", encoding="utf-8")
    with pytest.raises(ConfigError) as excinfo:
        load_run_config(path=path)
    assert excinfo.value.line == 2
    assert excinfo.value.field == "mesh.cells"


@pytest.mark.parametrize("key, value, message", [
    ("problem.alpha", "2.5", "alpha"),
    ("forcing.phi", "0", "phi"),
    ("mesh.n_cells", "many", "cannot read"),
    ("nonlinearity.kind", "cubic", "cannot read"),
])
def test_invalid_entries_are_rejected(key, value, message):
    entries = dict(BUILTIN_MODELS["pl11"])
    entries[key] = value
    with pytest.raises(ConfigError, match=message):
        RunConfig.object_hook(entries)


def test_object_hook_ignores_plain_dictionaries():
    assert RunConfig.object_hook({"name": "pl11"}) is None


def test_table_nonlinearity_needs_constants():
    entries = dict(BUILTIN_MODELS["pl11"], **{"nonlinearity.kind": "table",
                                              "nonlinearity.table": "-1:1, 0:0, 1:1"})
    with pytest.raises(ConfigError) as excinfo:
        RunConfig(entries)
    assert excinfo.value.field == "nonlinearity.c_f"
    entries.update({"nonlinearity.c_f": 1.0, "nonlinearity.c_1": 1.0, "nonlinearity.c_2": 0.0,
                    "nonlinearity.c_3": 0.5, "nonlinearity.c_4": 0.0})
    config = RunConfig(entries)
    assert config.build_nonlinearity().kind == NonlinearityKind.TABLE


def test_table_nonlinearity_is_certified_at_load():
    # f = 5|u| on u < 0 breaks |f(u)| <= C_f (1 + |u|) with C_f = 1
    entries = dict(BUILTIN_MODELS["pl11"], **{"nonlinearity.kind": "table", "nonlinearity.table": "-1:5, 0:0, 1:1",
                                              "nonlinearity.c_f": 1.0, "nonlinearity.c_1": 1.0, "nonlinearity.c_2": 0.0,
                                              "nonlinearity.c_3": 2.0, "nonlinearity.c_4": 0.0})
    with pytest.raises(ConfigError, match="linear_growth") as excinfo:
        RunConfig(entries)
    assert excinfo.value.field == "nonlinearity.kind"
    assert "c_3_range" in str(excinfo.value)


def test_solver_options_and_region():
    config = RunConfig(dict(BUILTIN_MODELS["pl11"], **{"solver.max_iters": "50", "solver.tol_residual": "1e-9"}))
    opts = config.solve_options()
    assert opts.max_iters == 50 and isinstance(opts.max_iters, int)
    assert opts.tol_residual == 1e-9
    region = config.region(3.0)
    assert (region.rho_plus, region.rho_minus, region.R) == (0.5, 3.0, 10.0)
    with pytest.raises(ConfigError):
        config.region()
    with pytest.raises(ConfigError, match="region.R"):
        config.with_entries(region__R=1.0).region(3.0)


def test_echo_is_sorted(caplog):
    caplog.set_level(logging.DEBUG)
    config = load_run_config("smoothabs", logger=logging.getLogger("test_config"))
    echo = config.echo()
    assert list(echo) == sorted(echo)
    assert echo["nonlinearity.kind"] == "smooth_abs"
    assert "Loaded embedded model smoothabs" in caplog.text


def test_t_range_replaces_model_grid(tmp_path):
    path = tmp_path / "run.cfg"
    path.write_text("model.name = pl11\nrun.t_range = -1:0:0.5\n", encoding="utf-8")
    np.testing.assert_allclose(load_run_config(path=path).t_values(), [-1.0, -0.5, 0.0])
    config = load_run_config("pl11", overrides={"run.t_range": "0:0.2:0.1"})
    np.testing.assert_allclose(config.t_values(), [0.0, 0.1, 0.2])
