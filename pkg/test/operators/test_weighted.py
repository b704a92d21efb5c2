import numpy as np
import pandas as pd
import pytest
from scipy import linalg

from src.data_model.mesh import build_mesh
from src.exceptions import LinearSolveError
from src.operators.weighted import assemble
from src.operators.weighted import norm_alpha
from src.operators.weighted import smallest_nonzero_eigenvalue
from src.operators.weighted import solve_shifted


def test_unweighted_uniform_stiffness_is_the_laplacian():
    mesh = build_mesh((0.0, 1.0), 10, 1.0)
    op = assemble(mesh, 0.0)
    dense = op.stiffness.toarray()
    h = 0.1
    np.testing.assert_allclose(dense[4, 3:6], [-1.0 / h, 2.0 / h, -1.0 / h])
    np.testing.assert_allclose(op.mass, np.r_[h / 2, np.full(9, h), h / 2])


def test_cell_factor_at_the_degeneracy():
    h = 0.25
    op = assemble(build_mesh((0.0, 1.0), 4, 1.0), 1.0)
    assert op.cell_stiffness[0] == pytest.approx((h ** 2 / 2) / h ** 2)


@pytest.mark.parametrize("alpha", [0.0, 0.3, 0.5, 1.0, 1.7])
def test_constants_are_in_the_kernel(alpha):
    rng = np.random.default_rng(7)
    mesh = build_mesh((-1.0, 1.0), 60, 1.0 + rng.random())
    op = assemble(mesh, alpha)
    kernel = op.stiffness @ np.ones(op.size)
    assert np.max(np.abs(kernel)) <= 1e-14 * np.max(np.abs(op.stiffness.diagonal()))
    dense = op.stiffness.toarray()
    np.testing.assert_allclose(dense, dense.T)


def test_measure_and_integrate(op_400):
    assert op_400.measure == pytest.approx(1.0)
    assert op_400.integrate(np.ones(op_400.size)) == pytest.approx(1.0)
    assert op_400.inner(np.ones(op_400.size), np.ones(op_400.size)) == pytest.approx(1.0)


def test_radial_lumped_mass_measures_the_ball():
    op = assemble(build_mesh((0.0, 1.0), 100, 2.0, 3), 0.5)
    # int_0^1 r^2 dr
    assert op.measure == pytest.approx(1.0 / 3.0, rel=1e-12)


def test_constant_rhs(op_400):
    report = solve_shifted(op_400, 2.0, np.full(op_400.size, 3.0))
    np.testing.assert_allclose(report.solution, 1.5, atol=1e-12)
    assert report.residual_norm <= 1e-10


def test_factorization_is_cached(op_400):
    rhs = np.linspace(0.0, 1.0, op_400.size)
    solve_shifted(op_400, 7.25, rhs)
    assert solve_shifted(op_400, 7.25, rhs).factorization_reused


def test_positivity_of_the_solution_map(op_400):
    rng = np.random.default_rng(0)
    for _ in range(50):
        v = rng.random(op_400.size)
        assert np.min(solve_shifted(op_400, 1.0, v).solution) >= -1e-12


@pytest.mark.parametrize("shift", [0.0, -1.0])
def test_non_positive_shift_rejected(op_400, shift):
    with pytest.raises(LinearSolveError):
        solve_shifted(op_400, shift, np.ones(op_400.size))


def test_wrong_rhs_shape_rejected(op_400):
    with pytest.raises(LinearSolveError):
        solve_shifted(op_400, 1.0, np.ones(3))


def test_norm_alpha():
    op = assemble(build_mesh((0.0, 1.0), 200, 1.0), 1.0)
    assert norm_alpha(op, np.zeros(op.size)) == 0.0
    assert norm_alpha(op, np.ones(op.size)) == pytest.approx(1.0)
    # int_0^1 x dx + int_0^1 x^2 dx; the lumped mass only perturbs the second term by O(h^2)
    assert norm_alpha(op, op.mesh.nodes) == pytest.approx(np.sqrt(5.0 / 6.0), rel=1e-4)
    with pytest.raises(ValueError):
        norm_alpha(op, np.ones(3))


def test_first_eigenvalue_on_unit_interval(unit_interval_op):
    mu = smallest_nonzero_eigenvalue(unit_interval_op)
    assert mu == pytest.approx(np.pi ** 2, rel=1e-3)


def test_first_eigenvalue_on_symmetric_interval():
    op = assemble(build_mesh((-1.0, 1.0), 400, 1.0), 0.0)
    assert smallest_nonzero_eigenvalue(op) == pytest.approx(np.pi ** 2 / 4.0, rel=1e-3)


def test_first_eigenvalue_matches_dense_solve():
    op = assemble(build_mesh((0.0, 1.0), 300, 2.0), 1.0)
    values = linalg.eigh(op.stiffness.toarray(), np.diag(op.mass), eigvals_only=True)
    assert smallest_nonzero_eigenvalue(op) == pytest.approx(values[1], rel=1e-8)


def test_pl11_slope_below_first_eigenvalue(op_400):
    assert smallest_nonzero_eigenvalue(op_400) > 1.0


def test_dump_coordinates(op_400, tmp_path):
    path = op_400.dump_coordinates(tmp_path / "stiffness.tsv")
    frame = pd.read_csv(path, sep="\t")
    assert list(frame.columns) == ["row", "col", "value"]
    assert len(frame) == op_400.stiffness.nnz
    mass = pd.read_csv(tmp_path / "stiffness.mass.tsv", sep="\t")
    assert mass["value"].sum() == pytest.approx(1.0)
