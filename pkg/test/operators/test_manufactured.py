import logging

import numpy as np
import pytest

from src.operators.manufactured import convergence_rates
from src.operators.manufactured import manufactured_rhs
from src.operators.manufactured import mms_study
from src.operators.manufactured import neumann_eigenvalue_check


def test_unweighted_rhs():
    u, v = manufactured_rhs(0.0, 1.0)
    x = np.array([-0.5, 0.0, 0.25])
    np.testing.assert_allclose(u(x), np.cos(np.pi * x), atol=1e-15)
    np.testing.assert_allclose(v(x), (np.pi ** 2 + 1.0) * np.cos(np.pi * x), rtol=1e-12)


def test_weighted_rhs_is_even_and_finite_at_zero():
    _, v = manufactured_rhs(0.5, 1.0)
    values = v(np.array([-0.3, 0.0, 0.3]))
    assert values[1] == pytest.approx(1.0)
    assert values[0] == pytest.approx(values[2])
    assert np.all(np.isfinite(values))


def test_convergence_rates():
    rates = convergence_rates([100, 200, 400], [1e-2, 2.5e-3, 6.25e-4])
    assert np.isnan(rates[0])
    np.testing.assert_allclose(rates[1:], 2.0)


def test_mms_study(caplog):
    caplog.set_level(logging.INFO)
    table = mms_study([0.0, 0.5], [100, 200, 400], grading=2.0, logger=logging.getLogger("test_mms"))
    assert list(table.columns) == ["alpha", "n_cells", "h_max", "l2_error", "rate"]
    assert len(table) == 6
    final = table.groupby("alpha")["rate"].last()
    assert final[0.0] >= 1.9
    assert final[0.5] >= 1.5
    assert np.all(np.diff(table.loc[table["alpha"] == 0.5, "l2_error"]) < 0.0)
    assert "MMS alpha=0.5" in caplog.text


def test_neumann_eigenvalue():
    mu, relative = neumann_eigenvalue_check()
    assert relative <= 1e-3
    assert mu == pytest.approx(np.pi ** 2, rel=1e-3)
