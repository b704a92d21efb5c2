#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
Graded one-dimensional meshes around the degeneracy point of the weight |x|^alpha.

This module defines:
- Mesh: immutable node set on an interval, optionally a radial reduction on a ball.
- build_mesh: graded mesh construction with 0 forced as a node.
- weight_cell_integral / weight_cell_integrals: exact cell moments of |x|^alpha |x|^(N-1).

The grading maps a uniform parameter xi onto x = sgn(xi)|xi|^gamma, so cells
accumulate toward 0 when gamma > 1 and the mesh is uniform when gamma = 1.
"""

from __future__ import annotations  # Needed to allow returning the type of enclosing class PEP 563

import math

import numpy as np
import pandas as pd

from src.data_model import ALPHA_UPPER
from src.exceptions import MeshError

from typing import Tuple
from typing import TypedDict
from typing_extensions import Unpack
from typing_extensions import NotRequired


class MeshParams(TypedDict):
    """
    Parameters accepted by the `Mesh` constructor.

    nodes : array_like
        Strictly increasing node coordinates.
    grading_exponent : float, optional
        Grading exponent gamma used to build the nodes (informative, default 1).
    radial_dimension : int, optional
        Dimension N of the ball for a radial reduction (default 1, flat interval).
    """
    nodes: np.ndarray
    grading_exponent: NotRequired[float]
    radial_dimension: NotRequired[int]


class Mesh:
    """
    Immutable 1D mesh housing Omega and the degeneracy point x = 0.

    Parameters
    ----------
    **kwargs : MeshParams
        Node coordinates and construction metadata.

    Attributes
    ----------
    nodes : numpy.ndarray
        Read-only node coordinates, length n + 1.
    interval : tuple of float
        (x_left, x_right).
    degeneracy_point : float
        Always 0.
    grading_exponent : float
        Grading exponent gamma >= 1.
    radial_dimension : int
        N = 1 for a flat interval, N > 1 for a radial reduction on a ball of radius x_right.

    Examples
    --------
    >>> mesh = build_mesh((-1.0, 1.0), 4, 1.0, 1)
    >>> mesh.nodes
    array([-1. , -0.5,  0. ,  0.5,  1. ])
    """
    __slots__ = ("nodes", "interval", "degeneracy_point", "grading_exponent", "radial_dimension")

    def __init__(self, **kwargs: Unpack[MeshParams]) -> None:
        nodes = np.array(kwargs.get("nodes"), dtype=float)
        grading_exponent = float(kwargs.get("grading_exponent", 1.0))
        radial_dimension = int(kwargs.get("radial_dimension", 1))

        if nodes.ndim != 1 or nodes.size < 3:
            raise MeshError("a mesh needs at least 2 cells")
        if not np.all(np.diff(nodes) > 0.0):
            raise MeshError("mesh nodes must be strictly increasing")
        if grading_exponent < 1.0:
            raise MeshError(f"grading exponent must be >= 1, got {grading_exponent}")
        if radial_dimension < 1:
            raise MeshError(f"radial dimension must be >= 1, got {radial_dimension}")
        if radial_dimension > 1 and nodes[0] != 0.0:
            raise MeshError("a radial mesh must be anchored at x_left = 0")
        if nodes[0] < 0.0 < nodes[-1] and not np.any(nodes == 0.0):
            raise MeshError("the degeneracy point 0 lies inside the interval but is not a node")

        nodes.setflags(write=False)
        self.nodes = nodes
        self.interval: Tuple[float, float] = (float(nodes[0]), float(nodes[-1]))
        self.degeneracy_point = 0.0
        self.grading_exponent = grading_exponent
        self.radial_dimension = radial_dimension

    @property
    def n_cells(self) -> int:
        return self.nodes.size - 1

    @property
    def n_nodes(self) -> int:
        return self.nodes.size

    @property
    def cells(self) -> np.ndarray:
        """
        Consecutive node pairs as an (n, 2) array.
        """
        return np.column_stack((self.nodes[:-1], self.nodes[1:]))

    @property
    def widths(self) -> np.ndarray:
        return np.diff(self.nodes)

    def contains_degeneracy(self) -> bool:
        return self.interval[0] <= 0.0 <= self.interval[1]

    def to_table(self) -> pd.DataFrame:
        """
        Plain table (node index, coordinate) used for plotting and exports.
        """
        return pd.DataFrame({"node": np.arange(self.n_nodes), "x": self.nodes})

    def __eq__(self, other):
        if not isinstance(other, Mesh):
            return NotImplemented
        return (self.radial_dimension == other.radial_dimension
                and np.array_equal(self.nodes, other.nodes))

    def __hash__(self):
        return hash((self.radial_dimension, self.nodes.tobytes()))

    def __repr__(self) -> str:
        return (f"Mesh(interval={self.interval}, n_cells={self.n_cells}, "
                f"grading_exponent={self.grading_exponent}, radial_dimension={self.radial_dimension})")


def _graded_side(xi_end: float, n: int, gamma: float) -> np.ndarray:
    xi = np.linspace(0.0, xi_end, n + 1)
    return np.sign(xi) * np.abs(xi) ** gamma


def build_mesh(interval: Tuple[float, float], n_cells: int, grading_exponent: float = 2.0,
               radial_dimension: int = 1) -> Mesh:
    """
    Build a mesh graded toward the degeneracy point 0.

    Parameters
    ----------
    interval : tuple of float
        (x_left, x_right) with x_left < x_right.
    n_cells : int
        Number of cells, at least 2.
    grading_exponent : float
        gamma >= 1; node positions are sgn(xi)|xi|^gamma of a uniform xi.
    radial_dimension : int
        N >= 1; N > 1 requires x_left = 0.

    Returns
    -------
    Mesh

    Raises
    ------
    MeshError
        On fewer than 2 cells, an inverted interval or a radial mesh not anchored at 0.
    """
    x_left, x_right = float(interval[0]), float(interval[1])
    if n_cells < 2:
        raise MeshError(f"n_cells must be >= 2, got {n_cells}")
    if not x_left < x_right:
        raise MeshError(f"interval ({x_left}, {x_right}) is empty or inverted")
    if radial_dimension > 1 and x_left != 0.0:
        raise MeshError("a radial mesh must be anchored at x_left = 0")
    if grading_exponent < 1.0:
        raise MeshError(f"grading exponent must be >= 1, got {grading_exponent}")

    inverse = 1.0 / grading_exponent
    xi_left = math.copysign(abs(x_left) ** inverse, x_left)
    xi_right = math.copysign(abs(x_right) ** inverse, x_right)

    if xi_left < 0.0 < xi_right:
        # 0 splits the parameter range; it becomes the shared node of both sides
        n_left = int(round(n_cells * (-xi_left) / (xi_right - xi_left)))
        n_left = min(max(n_left, 1), n_cells - 1)
        left = _graded_side(xi_left, n_left, grading_exponent)[::-1]
        right = _graded_side(xi_right, n_cells - n_left, grading_exponent)
        nodes = np.concatenate((left, right[1:]))
    else:
        xi = np.linspace(xi_left, xi_right, n_cells + 1)
        nodes = np.sign(xi) * np.abs(xi) ** grading_exponent

    # the end points are reproduced exactly, not through the power round trip
    nodes[0] = x_left
    nodes[-1] = x_right
    return Mesh(nodes=nodes, grading_exponent=grading_exponent, radial_dimension=radial_dimension)


def _check_alpha(alpha: float) -> None:
    if not 0.0 <= alpha < ALPHA_UPPER:
        raise MeshError(f"alpha must lie in [0, {ALPHA_UPPER}), got {alpha}")


def weight_cell_integral(cell: Tuple[float, float], alpha: float, radial_dimension: int = 1) -> float:
    """
    Exact integral of |x|^alpha |x|^(N-1) over a cell that does not straddle 0.

    Parameters
    ----------
    cell : tuple of float
        (a, b) with a < b and either 0 <= a or b <= 0.
    alpha : float
        Weight exponent in [0, 2).
    radial_dimension : int
        N, the radial measure exponent is N - 1.

    Returns
    -------
    float
        (b^(alpha+N) - a^(alpha+N)) / (alpha+N), mirrored for negative cells.

    Examples
    --------
    >>> weight_cell_integral((0.0, 1.0), 0.5)
    0.6666666666666666
    >>> weight_cell_integral((-1.0, -0.5), 1.0)
    0.375
    """
    a, b = float(cell[0]), float(cell[1])
    _check_alpha(alpha)
    if not a < b:
        raise MeshError(f"cell ({a}, {b}) is empty or inverted")
    if a < 0.0 < b:
        raise MeshError(f"cell ({a}, {b}) straddles the degeneracy point")
    p = alpha + radial_dimension
    if a >= 0.0:
        return (b ** p - a ** p) / p
    return ((-a) ** p - (-b) ** p) / p


def weight_cell_integrals(mesh: Mesh, alpha: float) -> np.ndarray:
    """
    Vectorized `weight_cell_integral` over every cell of a mesh.
    """
    _check_alpha(alpha)
    p = alpha + mesh.radial_dimension
    powered = np.abs(mesh.nodes) ** p
    # one-signed cells: |b|^p - |a|^p changes sign with the side of 0
    return np.abs(np.diff(powered)) / p
