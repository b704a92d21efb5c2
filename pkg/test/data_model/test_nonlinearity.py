import logging

import numpy as np
import pytest

from src.data_model.nonlinearity import Nonlinearity
from src.data_model.nonlinearity import NonlinearityKind
from src.exceptions import HypothesisError


def test_piecewise_linear_values_and_constants():
    f = Nonlinearity.piecewise_linear(2.0, 3.0)
    np.testing.assert_allclose(f.eval(np.array([-1.0, 0.0, 1.5])), [3.0, 0.0, 3.0])
    assert (f.c_f, f.c_1, f.c_2, f.c_3, f.c_4) == (3.0, 2.0, 0.0, 1.5, 0.0)
    assert f.kinks == (0.0,)


def test_piecewise_linear_one_sided_slopes():
    f = Nonlinearity.piecewise_linear(1.0, 2.0)
    u = np.array([-1.0, 0.0, 1.0])
    np.testing.assert_array_equal(f.slope(u), [-2.0, 1.0, 1.0])
    np.testing.assert_array_equal(f.slope(u, side="left"), [-2.0, -2.0, 1.0])
    with pytest.raises(ValueError):
        f.slope(u, side="up")


def test_piecewise_linear_requires_positive_slopes():
    with pytest.raises(HypothesisError):
        Nonlinearity.piecewise_linear(0.0, 1.0)


def test_smooth_abs_is_accurate_near_zero():
    f = Nonlinearity.smooth_abs()
    assert f.eval(np.array([1e-9]))[0] == pytest.approx(5e-19, rel=1e-12)
    assert f.eval(np.array([np.sqrt(3.0)]))[0] == pytest.approx(1.0, rel=1e-15)
    assert f.slope(np.array([0.0]))[0] == 0.0
    assert f.kinks == ()


@pytest.mark.parametrize("f", [Nonlinearity.piecewise_linear(1.0, 1.0), Nonlinearity.piecewise_linear(0.5, 2.0),
                               Nonlinearity.smooth_abs()], ids=["pl11", "pl_asym", "smoothabs"])
def test_builtin_families_certify(f, caplog):
    caplog.set_level(logging.DEBUG)
    report = f.certify(logging.getLogger("test_certify"))
    assert report.passed
    assert report.slacks["negative_ratio"] < 0.0 < report.slacks["positive_ratio"]
    assert "certified" in caplog.text


def test_table_nonlinearity_extrapolates_linearly():
    u = np.array([-1.0, 0.0, 1.0])
    values = np.array([1.0, 0.0, 1.0])
    constants = {"c_f": 1.0, "c_1": 1.0, "c_2": 0.0, "c_3": 0.5, "c_4": 0.0}
    f = Nonlinearity.from_table(u, values, constants)
    assert f.kind == NonlinearityKind.TABLE
    np.testing.assert_allclose(f.eval(np.array([-3.0, 0.5, 4.0])), [3.0, 0.5, 4.0])
    np.testing.assert_array_equal(f.slope(np.array([-5.0, 0.0, 5.0])), [-1.0, 1.0, 1.0])
    assert f.certify().passed


def test_table_with_wrong_constants_fails_certification(caplog):
    u = np.array([-1.0, 0.0, 1.0])
    values = np.array([1.0, 0.0, 1.0])
    constants = {"c_f": 0.5, "c_1": 1.0, "c_2": 0.0, "c_3": 0.25, "c_4": 0.0}
    f = Nonlinearity.from_table(u, values, constants)
    with pytest.raises(HypothesisError, match="linear_growth"):
        f.certify(logging.getLogger("test_certify_fail"))
    assert "fails certification" in caplog.text


def test_table_requires_constants():
    with pytest.raises(HypothesisError, match="certified constants"):
        Nonlinearity.from_table(np.array([0.0, 1.0]), np.array([0.0, 1.0]), {"c_f": 1.0})


def test_table_requires_increasing_abscissae():
    constants = {"c_f": 1.0, "c_1": 1.0, "c_2": 0.0, "c_3": 0.5, "c_4": 0.0}
    with pytest.raises(HypothesisError):
        Nonlinearity.from_table(np.array([1.0, 0.0]), np.array([0.0, 1.0]), constants)
