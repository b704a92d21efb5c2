#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
Discrete weighted Neumann operator -div(|x|^alpha grad .) with P1 elements.

This module defines:
- WeightedOperator: stiffness K (exact cell weight integrals), lumped mass M and the
  cached banded Cholesky factors of K + cM.
- LinearSolveReport: result of one shifted solve.
- assemble, solve_shifted, norm_alpha, smallest_nonzero_eigenvalue.

K + cM is a symmetric M-matrix for c > 0, so w = T v, the solution of
(K + cM) w = M v, is nonnegative whenever v is.
"""

from __future__ import annotations

import logging
import threading
from dataclasses import dataclass
from logging import Logger
from pathlib import Path

import numpy as np
import pandas as pd
from scipy import linalg
from scipy import sparse

from src.data_model import NodalVector
from src.data_model.mesh import Mesh
from src.data_model.mesh import weight_cell_integrals
from src.exceptions import LinearSolveError
from src.exceptions import NonConvergenceError

from typing import Dict
from typing import Optional
from typing import Tuple

LINEAR_TOLERANCE = 1e-10
"""
Relative residual accepted for a shifted solve.
"""


@dataclass(frozen=True)
class LinearSolveReport:
    """
    Outcome of `solve_shifted`.

    Attributes
    ----------
    solution : numpy.ndarray
        Nodal vector w.
    residual_norm : float
        ||(K + cM) w - M v||_inf relative to max(||M v||_inf, 1).
    factorization_reused : bool
        True when the Cholesky factors came from the operator cache.
    """
    solution: NodalVector
    residual_norm: float
    factorization_reused: bool


class WeightedOperator:
    """
    Assembled weighted stiffness and lumped mass on a mesh.

    Attributes
    ----------
    mesh : Mesh
        Underlying mesh.
    alpha : float
        Weight exponent.
    stiffness : scipy.sparse.csr_matrix
        Symmetric positive semidefinite K with K 1 = 0.
    mass : numpy.ndarray
        Diagonal of the lumped mass M (strictly positive).
    cell_stiffness : numpy.ndarray
        Per cell factor (cell weight integral) / width^2.

    Notes
    -----
    Only the factorization cache mutates after construction; it is filled under a lock
    and entries are never replaced, so an operator can be shared by threads.
    """

    def __init__(self, mesh: Mesh, alpha: float, cell_stiffness: np.ndarray, mass: np.ndarray) -> None:
        self.mesh = mesh
        self.alpha = float(alpha)
        self.cell_stiffness = cell_stiffness
        self.mass = mass
        self.mass.setflags(write=False)
        n = mesh.n_nodes
        self.diagonal = np.zeros(n)
        self.diagonal[:-1] += cell_stiffness
        self.diagonal[1:] += cell_stiffness
        self.off_diagonal = -cell_stiffness
        self.stiffness = sparse.diags([self.off_diagonal, self.diagonal, self.off_diagonal], [-1, 0, 1],
                                      shape=(n, n), format="csr")
        self._factors: Dict[float, np.ndarray] = {}
        self._lock = threading.Lock()

    @property
    def size(self) -> int:
        return self.mesh.n_nodes

    @property
    def measure(self) -> float:
        """
        |Omega| in the (radial) measure, 1^T M 1.
        """
        return float(self.mass.sum())

    def mass_matrix(self) -> sparse.csr_matrix:
        return sparse.diags(self.mass, 0, format="csr")

    def shifted(self, c: float) -> sparse.csr_matrix:
        """
        Sparse K + cM.
        """
        return (self.stiffness + sparse.diags(c * self.mass, 0)).tocsr()

    def integrate(self, values: NodalVector) -> float:
        """
        1^T M v, the lumped integral of a nodal function.
        """
        return float(self.mass @ values)

    def inner(self, u: NodalVector, v: NodalVector) -> float:
        return float(u @ (self.mass * v))

    def factor(self, c: float) -> Tuple[np.ndarray, bool]:
        """
        Upper banded Cholesky factor of K + cM, cached per shift.

        Returns
        -------
        tuple
            (factor in LAPACK upper band storage, reused flag).

        Raises
        ------
        LinearSolveError
            If K + cM is not positive definite.
        """
        key = float(c)
        cached = self._factors.get(key)
        if cached is not None:
            return cached, True
        band = np.zeros((2, self.size))
        band[0, 1:] = self.off_diagonal
        band[1, :] = self.diagonal + key * self.mass
        try:
            upper = linalg.cholesky_banded(band, lower=False)
        except linalg.LinAlgError as xcpt:
            raise LinearSolveError(f"K + {key}M is not positive definite: {xcpt}") from xcpt
        with self._lock:
            self._factors.setdefault(key, upper)
        return upper, False

    def dump_coordinates(self, path: Path) -> Path:
        """
        Write K as (row, col, value) text plus the mass diagonal, for cross-checks with external tools.
        """
        coo = self.stiffness.tocoo()
        pd.DataFrame({"row": coo.row, "col": coo.col, "value": coo.data}).to_csv(
            path, sep="\t", index=False, float_format="%.17e")
        mass_path = Path(path).with_suffix(".mass.tsv")
        pd.DataFrame({"row": np.arange(self.size), "value": self.mass}).to_csv(
            mass_path, sep="\t", index=False, float_format="%.17e")
        return Path(path)


def _lumped_mass(mesh: Mesh) -> np.ndarray:
    # row-sum lumping of the P1 mass in the measure x^(N-1) dx
    a, b = mesh.nodes[:-1], mesh.nodes[1:]
    width = b - a
    if mesh.radial_dimension == 1:
        half = 0.5 * width
        mass = np.zeros(mesh.n_nodes)
        mass[:-1] += half
        mass[1:] += half
        return mass
    n = mesh.radial_dimension
    moment0 = (b ** n - a ** n) / n
    moment1 = (b ** (n + 1) - a ** (n + 1)) / (n + 1)
    to_left = (b * moment0 - moment1) / width
    to_right = (moment1 - a * moment0) / width
    mass = np.zeros(mesh.n_nodes)
    mass[:-1] += to_left
    mass[1:] += to_right
    return mass


def assemble(mesh: Mesh, alpha: float) -> WeightedOperator:
    """
    Assemble K and the lumped M for -div(|x|^alpha grad .) with natural Neumann conditions.

    Each cell contributes (weight_cell_integral / width^2) [[1, -1], [-1, 1]].

    Parameters
    ----------
    mesh : Mesh
        Mesh with 0 pinned to a node when it lies inside the interval.
    alpha : float
        Weight exponent in [0, 2).

    Returns
    -------
    WeightedOperator
    """
    cell_stiffness = weight_cell_integrals(mesh, alpha) / mesh.widths ** 2
    return WeightedOperator(mesh, alpha, cell_stiffness, _lumped_mass(mesh))


def solve_shifted(op: WeightedOperator, c: float, v: NodalVector,
                  tolerance: float = LINEAR_TOLERANCE) -> LinearSolveReport:
    """
    Solve (K + cM) w = M v, the discrete version of w = T v when c = C_f.

    Parameters
    ----------
    op : WeightedOperator
    c : float
        Shift, must be > 0.
    v : numpy.ndarray
        Right-hand side nodal values.
    tolerance : float
        Accepted relative residual.

    Returns
    -------
    LinearSolveReport

    Raises
    ------
    LinearSolveError
        On c <= 0, loss of positive definiteness or a residual above tolerance.
    """
    if not c > 0.0:
        raise LinearSolveError(f"the shift must be positive, got {c}")
    v = np.asarray(v, dtype=float)
    if v.shape != (op.size,):
        raise LinearSolveError(f"rhs has shape {v.shape}, expected ({op.size},)")
    upper, reused = op.factor(c)
    rhs = op.mass * v
    w = linalg.cho_solve_banded((upper, False), rhs, check_finite=False)
    scale = max(float(np.max(np.abs(rhs))), 1.0)
    residual = op.stiffness @ w + c * op.mass * w - rhs
    residual_norm = float(np.max(np.abs(residual))) / scale
    if residual_norm > tolerance:
        # one step of iterative refinement before giving up
        w = w - linalg.cho_solve_banded((upper, False), residual, check_finite=False)
        residual_norm = float(np.max(np.abs(op.stiffness @ w + c * op.mass * w - rhs))) / scale
    if not np.isfinite(residual_norm) or residual_norm > tolerance:
        raise LinearSolveError(f"shifted solve residual {residual_norm:.3e} above tolerance {tolerance:.1e}")
    return LinearSolveReport(solution=w, residual_norm=residual_norm, factorization_reused=reused)


def norm_alpha(op: WeightedOperator, u: NodalVector) -> float:
    """
    Discrete ||u||_alpha = sqrt(u^T K u + u^T M u).
    """
    u = np.asarray(u, dtype=float)
    if u.shape != (op.size,):
        raise ValueError(f"vector has shape {u.shape}, expected ({op.size},)")
    energy = float(u @ (op.stiffness @ u)) + op.inner(u, u)
    return float(np.sqrt(max(energy, 0.0)))


def smallest_nonzero_eigenvalue(op: WeightedOperator, shift: float = 1.0, tolerance: float = 1e-10,
                                max_iters: int = 500, logger: Optional[Logger] = None) -> float:
    """
    First nonzero eigenvalue mu_1 of K u = mu M u by shifted inverse iteration.

    The constant mode (mu_0 = 0) is removed by M-orthogonal projection after every
    solve, so the iteration converges to the lowest mode of the complement.

    Parameters
    ----------
    op : WeightedOperator
    shift : float
        Positive shift s; iterates solve (K + sM) y = M x with the cached factors.
    tolerance : float
        Relative change of the Rayleigh quotient accepted as converged.
    max_iters : int
        Iteration cap.
    logger : Logger, optional

    Returns
    -------
    float

    Raises
    ------
    NonConvergenceError
        When the cap is reached.
    """
    logger = logger or logging.getLogger(__name__)
    total = op.measure
    rng = np.random.default_rng(0)
    x = op.mesh.nodes + 0.1 * rng.standard_normal(op.size)
    mu_old = np.inf
    for iteration in range(1, max_iters + 1):
        x = x - op.integrate(x) / total
        x = x / np.sqrt(op.inner(x, x))
        mu = float(x @ (op.stiffness @ x))
        logger.debug(f"inverse iteration {iteration}: rayleigh quotient {mu:.15e}")
        if abs(mu - mu_old) <= tolerance * abs(mu):
            return mu
        mu_old = mu
        x = solve_shifted(op, shift, x).solution
    raise NonConvergenceError("max_iters", iterate=x, iterations=max_iters)
