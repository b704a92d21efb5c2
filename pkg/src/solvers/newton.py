#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
Damped (semismooth) Newton and deflated Newton for F(u; t) = 0.

Deflation multiplies the residual by prod_k (shift + ||u - u_k||^-p) so that the known
solutions u_k stop attracting the iteration. With du the undeflated Newton step and
g the gradient of the logarithm of the deflation factor, the deflated step is
du / (1 - g . du) (Sherman-Morrison on the rank-one update of the Jacobian).
"""

import logging
import warnings
from logging import Logger

import numpy as np
from scipy import sparse
from scipy.sparse.linalg import MatrixRankWarning
from scipy.sparse.linalg import spsolve

from src.data_model import NodalVector
from src.data_model.problem_spec import ProblemSpec
from src.data_model.solution import Solution
from src.data_model.solution import SolveMethod
from src.data_model.solution import SolveOptions
from src.exceptions import NonConvergenceError
from src.operators.nonlinear import converged
from src.operators.nonlinear import jacobian
from src.operators.nonlinear import make_solution
from src.operators.nonlinear import residual
from src.operators.weighted import WeightedOperator
from src.solvers import trace

from typing import List
from typing import Optional

MIN_STEP = 1e-10
DISTINCT_SOLUTIONS = 1e-4


def _newton_direction(matrix: sparse.csr_matrix, rhs: np.ndarray) -> Optional[np.ndarray]:
    with warnings.catch_warnings():
        warnings.simplefilter("error", MatrixRankWarning)
        try:
            direction = spsolve(matrix.tocsc(), rhs)
        except (MatrixRankWarning, RuntimeError):
            return None
    if not np.all(np.isfinite(direction)):
        return None
    return direction


def newton(spec: ProblemSpec, op: WeightedOperator, t: float, u0: NodalVector,
           opts: Optional[SolveOptions] = None, logger: Optional[Logger] = None) -> Solution:
    """
    Damped Newton with backtracking on ||F||_2.

    Parameters
    ----------
    spec, op : ProblemSpec, WeightedOperator
    t : float
    u0 : numpy.ndarray or float
        Initial guess; a constant is broadcast.
    opts : SolveOptions, optional
    logger : Logger, optional

    Returns
    -------
    Solution
        Tagged ``SolveMethod.NEWTON``; passes the `converged` test with tol_residual.

    Raises
    ------
    NonConvergenceError
        reason ``singular_jacobian`` (typical near a fold), ``line_search`` (stagnation)
        or ``max_iters``; the last iterate is attached.
    """
    logger = logger or logging.getLogger(__name__)
    opts = opts or SolveOptions()
    u = np.broadcast_to(np.asarray(u0, dtype=float), (op.size,)).copy()
    f_u = residual(spec, op, u, t)
    for iteration in range(opts.max_iters + 1):
        norm = float(np.max(np.abs(f_u)))
        if converged(f_u, opts.tol_residual):
            logger.debug(f"Newton converged at t={t} in {iteration} iterations, residual {norm:.3e}")
            return make_solution(spec, op, u, t, SolveMethod.NEWTON, iterations=iteration)
        if iteration == opts.max_iters:
            break
        du = _newton_direction(jacobian(spec, op, u, t), -f_u)
        if du is None:
            logger.debug(f"Newton met a singular Jacobian at t={t}, iteration {iteration}")
            raise NonConvergenceError("singular_jacobian", iterate=u, iterations=iteration)

        merit = float(np.linalg.norm(f_u))
        step = 1.0
        while True:
            candidate = u + step * du
            f_candidate = residual(spec, op, candidate, t)
            if np.linalg.norm(f_candidate) <= (1.0 - 1e-4 * step) * merit:
                break
            step *= opts.damping
            if step < MIN_STEP:
                logger.debug(f"Newton line search stagnated at t={t}, iteration {iteration}, residual {norm:.3e}")
                raise NonConvergenceError("line_search", iterate=u, iterations=iteration)
        trace("newton", t, iteration + 1, float(np.max(np.abs(f_candidate))), step)
        u, f_u = candidate, f_candidate

    raise NonConvergenceError("max_iters", iterate=u, iterations=opts.max_iters)


def _deflation_log_gradient(op: WeightedOperator, u: np.ndarray, known: List[Solution],
                            shift: float, power: float) -> Optional[np.ndarray]:
    gradient = np.zeros(op.size)
    for solution in known:
        error = u - solution.u
        distance = np.sqrt(op.inner(error, error))
        if distance < 1e-14:
            return None
        factor = shift + distance ** (-power)
        gradient += -power * distance ** (-power - 2.0) * (op.mass * error) / factor
    return gradient


def deflated_newton(spec: ProblemSpec, op: WeightedOperator, t: float, u0: NodalVector,
                    known: List[Solution], opts: Optional[SolveOptions] = None,
                    logger: Optional[Logger] = None) -> Solution:
    """
    Newton on the deflated residual prod_k (shift + ||u - u_k||_M^-p) F(u).

    Parameters
    ----------
    known : list of Solution
        Solutions to deflate, at least one.

    Returns
    -------
    Solution
        Tagged ``SolveMethod.DEFLATION``; its undeflated residual passes `converged` and
        it differs from every known solution by at least 1e-4 in ||.||_inf.

    Raises
    ------
    NonConvergenceError
        On iteration cap, singular Jacobian or deflation operator, or a limit equal to a
        known solution (reason ``known_solution``).
    """
    logger = logger or logging.getLogger(__name__)
    opts = opts or SolveOptions()
    if not known:
        raise ValueError("deflated_newton needs at least one known solution")
    u = np.broadcast_to(np.asarray(u0, dtype=float), (op.size,)).copy()
    for iteration in range(opts.max_iters + 1):
        f_u = residual(spec, op, u, t)
        norm = float(np.max(np.abs(f_u)))
        if not np.isfinite(norm):
            raise NonConvergenceError("non_finite", iterate=u, iterations=iteration)
        if converged(f_u, opts.tol_residual):
            distance = min(float(np.max(np.abs(u - s.u))) for s in known)
            if distance < DISTINCT_SOLUTIONS:
                raise NonConvergenceError("known_solution", iterate=u, iterations=iteration)
            logger.debug(f"Deflated Newton found a new solution at t={t} in {iteration} iterations")
            return make_solution(spec, op, u, t, SolveMethod.DEFLATION, iterations=iteration)
        if iteration == opts.max_iters:
            break
        du = _newton_direction(jacobian(spec, op, u, t), -f_u)
        gradient = _deflation_log_gradient(op, u, known, opts.deflation_shift, opts.deflation_power)
        if du is None or gradient is None:
            raise NonConvergenceError("singular_jacobian", iterate=u, iterations=iteration)
        denominator = 1.0 - float(gradient @ du)
        if abs(denominator) < 1e-14:
            raise NonConvergenceError("singular_deflation", iterate=u, iterations=iteration)
        step = 1.0 / denominator
        u = u + step * du
        trace("deflation", t, iteration + 1, norm, step)

    raise NonConvergenceError("max_iters", iterate=u, iterations=opts.max_iters)
