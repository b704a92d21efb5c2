import logging

import numpy as np
import pytest

from src.continuation.arclength import detect_fold
from src.continuation.arclength import trace_branch
from src.data_model.branch import BranchStatus


@pytest.fixture(scope='module')
def pl11_branch(pl11, op_400):
    return trace_branch(pl11, op_400, -2.0, np.full(op_400.size, -2.0), 0.05, 1.0)


def test_pl11_branch_is_the_s_diagram(pl11_branch):
    assert pl11_branch.status == BranchStatus.COMPLETED
    assert len(pl11_branch) > 40
    for point in pl11_branch.points:
        expected = point.t if point.tangent_dt > 0.0 else -point.t
        np.testing.assert_allclose(point.u, expected, atol=1e-8)
        assert point.residual_norm <= 1e-8
    assert pl11_branch.points[0].index == 1
    assert pl11_branch.points[-1].index == -1
    arclengths = [p.arclength for p in pl11_branch.points]
    assert np.all(np.diff(arclengths) > 0.0)


def test_pl11_fold(pl11_branch):
    assert pl11_branch.fold is not None
    t_fold, u_fold = pl11_branch.fold
    assert t_fold == pytest.approx(0.0, abs=1e-6)
    assert np.max(np.abs(u_fold)) <= 1e-6


def test_branch_table(pl11_branch):
    table = pl11_branch.to_table()
    assert table["t"].max() <= 1e-6
    assert set(table["index"]) <= {-1, 0, 1}


def test_smooth_abs_fold(smoothabs, op_400, caplog):
    caplog.set_level(logging.INFO)
    start = np.full(op_400.size, -np.sqrt(15.0))
    branch = trace_branch(smoothabs, op_400, -3.0, start, 0.05, 1.0, logger=logging.getLogger("test_branch"))
    assert branch.fold is not None
    assert branch.fold[0] == pytest.approx(0.0, abs=1e-6)
    assert "Fold at t=" in caplog.text


def test_no_fold_before_the_turn(pl11, op_400):
    branch = trace_branch(pl11, op_400, -2.0, np.full(op_400.size, -2.0), 0.05, -1.0)
    assert branch.fold is None
    assert branch.t_values.max() <= -1.0 + 1e-12
    assert detect_fold(branch, pl11, op_400) is None


def test_fold_detection_needs_three_points(pl11, op_400):
    branch = trace_branch(pl11, op_400, -2.0, np.full(op_400.size, -2.0), 0.05, -1.0)
    branch.points = branch.points[:2]
    with pytest.raises(ValueError):
        detect_fold(branch, pl11, op_400)


def test_max_points(pl11, op_400):
    branch = trace_branch(pl11, op_400, -2.0, np.full(op_400.size, -2.0), 0.05, 1.0, max_points=5)
    assert len(branch) == 5
    assert branch.status == BranchStatus.MAX_POINTS


@pytest.mark.parametrize("step, t_stop, start", [(0.0, 1.0, -2.0), (0.05, -2.0, -2.0), (0.05, 1.0, 0.0)])
def test_invalid_arguments(pl11, op_400, step, t_stop, start):
    with pytest.raises(ValueError):
        trace_branch(pl11, op_400, -2.0, np.full(op_400.size, start), step, t_stop)
