import numpy as np
import pytest

from src.data_model.mesh import Mesh
from src.data_model.mesh import build_mesh
from src.data_model.mesh import weight_cell_integral
from src.data_model.mesh import weight_cell_integrals
from src.exceptions import MeshError


def test_uniform_mesh_has_zero_as_node():
    mesh = build_mesh((-1.0, 1.0), 4, 1.0, 1)
    np.testing.assert_allclose(mesh.nodes, [-1.0, -0.5, 0.0, 0.5, 1.0], atol=1e-15)
    assert mesh.n_cells == 4
    assert mesh.contains_degeneracy()


def test_quadratic_grading_of_unit_interval():
    mesh = build_mesh((0.0, 1.0), 2, 2.0, 1)
    np.testing.assert_allclose(mesh.nodes, [0.0, 0.25, 1.0])


def test_radial_mesh_accepted():
    mesh = build_mesh((0.0, 1.0), 100, 2.0, 3)
    assert mesh.radial_dimension == 3
    assert mesh.n_nodes == 101


def test_graded_mesh_refines_toward_zero(mesh_400):
    zero = int(np.flatnonzero(mesh_400.nodes == 0.0)[0])
    widths = mesh_400.widths
    assert widths[zero] < widths[-1]
    assert widths[zero - 1] < widths[0]
    assert mesh_400.interval == (-0.5, 0.5)


def test_asymmetric_interval_keeps_zero():
    mesh = build_mesh((-0.3, 2.0), 50, 2.0)
    assert np.any(mesh.nodes == 0.0)
    assert mesh.nodes[0] == -0.3 and mesh.nodes[-1] == 2.0


@pytest.mark.parametrize("interval, n_cells, gamma, dimension", [
    ((-1.0, 1.0), 1, 1.0, 1),
    ((1.0, -1.0), 10, 1.0, 1),
    ((-1.0, 1.0), 10, 1.0, 2),
    ((0.0, 1.0), 10, 0.5, 1),
])
def test_build_mesh_rejects_bad_arguments(interval, n_cells, gamma, dimension):
    with pytest.raises(MeshError):
        build_mesh(interval, n_cells, gamma, dimension)


def test_mesh_rejects_interior_point_without_zero():
    with pytest.raises(MeshError):
        Mesh(nodes=np.array([-1.0, -0.3, 0.4, 1.0]))


def test_mesh_equality_and_hash():
    first = build_mesh((-1.0, 1.0), 8, 2.0)
    second = build_mesh((-1.0, 1.0), 8, 2.0)
    assert first == second
    assert hash(first) == hash(second)
    assert first != build_mesh((-1.0, 1.0), 8, 1.0)


def test_nodes_are_read_only(mesh_400):
    with pytest.raises(ValueError):
        mesh_400.nodes[0] = 3.0


@pytest.mark.parametrize("cell, alpha, expected", [
    ((0.0, 1.0), 0.5, 2.0 / 3.0),
    ((-1.0, -0.5), 1.0, 0.375),
    ((0.0, 0.1), 1.5, 0.1 ** 2.5 / 2.5),
    ((0.2, 0.7), 0.0, 0.5),
])
def test_weight_cell_integral(cell, alpha, expected):
    assert weight_cell_integral(cell, alpha) == pytest.approx(expected, rel=1e-14)


def test_weight_cell_integral_radial():
    # int_0^1 x^0.5 x^2 dx = 1 / 3.5
    assert weight_cell_integral((0.0, 1.0), 0.5, 3) == pytest.approx(1.0 / 3.5)


@pytest.mark.parametrize("cell, alpha", [
    ((-0.5, 0.5), 0.5),
    ((0.5, 0.5), 0.5),
    ((0.0, 1.0), 2.0),
    ((0.0, 1.0), -0.1),
])
def test_weight_cell_integral_rejects(cell, alpha):
    with pytest.raises(MeshError):
        weight_cell_integral(cell, alpha)


def test_vectorized_integrals_match_scalar(mesh_400):
    vectorized = weight_cell_integrals(mesh_400, 0.5)
    scalar = [weight_cell_integral(tuple(cell), 0.5) for cell in mesh_400.cells]
    np.testing.assert_allclose(vectorized, scalar, rtol=1e-12)
    # the cell moments add up to int_{-1}^{1} |x|^0.5 dx = 4/3
    assert vectorized.sum() == pytest.approx(4.0 / 3.0, rel=1e-12)
