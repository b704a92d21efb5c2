#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
Monotone (lower and upper solution) iteration u_{k+1} = S_t(u_k).

g(u) = f(u) + C_f u is nondecreasing because f' >= -C_f, and T is positive, so the
sequence started from a subsolution is componentwise nondecreasing and its limit is
the minimal solution above the start.
"""

import logging
from logging import Logger

import numpy as np

from src.data_model import NodalVector
from src.data_model.problem_spec import ProblemSpec
from src.data_model.solution import Solution
from src.data_model.solution import SolveMethod
from src.data_model.solution import SolveOptions
from src.exceptions import DivergenceError
from src.exceptions import HypothesisError
from src.exceptions import NonConvergenceError
from src.operators.nonlinear import apply_S
from src.operators.nonlinear import constant_subsolution
from src.operators.nonlinear import converged
from src.operators.nonlinear import is_subsolution
from src.operators.nonlinear import is_supersolution
from src.operators.nonlinear import make_solution
from src.operators.nonlinear import residual
from src.operators.weighted import WeightedOperator
from src.solvers import trace

from typing import Optional
from typing import Union

MONOTONE_SLACK = 1e-12


def monotone_iterate(spec: ProblemSpec, op: WeightedOperator, t: float,
                     start: Union[None, float, NodalVector] = None,
                     supersolution: Optional[NodalVector] = None,
                     opts: Optional[SolveOptions] = None,
                     logger: Optional[Logger] = None) -> Solution:
    """
    Iterate S_t from a subsolution until the residual tolerance is met.

    Parameters
    ----------
    spec, op : ProblemSpec, WeightedOperator
    t : float
    start : float or numpy.ndarray, optional
        Subsolution to start from; a constant is broadcast. Defaults to `constant_subsolution`.
    supersolution : numpy.ndarray, optional
        Upper solution dominating `start`; the iterates are checked to stay below it.
    opts : SolveOptions, optional
        Uses tol_residual, monotone_ceiling and 10 * max_iters as iteration cap.
    logger : Logger, optional

    Returns
    -------
    Solution
        Tagged ``SolveMethod.MONOTONE``.

    Raises
    ------
    DivergenceError
        ||u_k||_inf exceeded the ceiling: evidence that no solution exists at t.
    NonConvergenceError
        Iteration cap reached.
    HypothesisError
        The start is not a subsolution, the pair is not ordered, or the sequence lost
        monotonicity (a violated hypothesis on f).
    """
    logger = logger or logging.getLogger(__name__)
    opts = opts or SolveOptions()
    if start is None:
        start = constant_subsolution(spec, t)
    u = np.broadcast_to(np.asarray(start, dtype=float), (op.size,)).copy()

    if not is_subsolution(spec, op, u, t):
        raise HypothesisError(f"the monotone start is not a subsolution at t={t}")
    if supersolution is not None:
        if not is_supersolution(spec, op, supersolution, t):
            raise HypothesisError(f"the upper function is not a supersolution at t={t}")
        if np.any(u > supersolution + MONOTONE_SLACK):
            raise HypothesisError("the subsolution does not lie below the supersolution")

    max_iters = 10 * opts.max_iters
    for iteration in range(1, max_iters + 1):
        u_next = apply_S(spec, op, u, t)
        slack = MONOTONE_SLACK * max(1.0, float(np.max(np.abs(u))))
        if np.any(u_next < u - slack):
            drop = float(np.max(u - u_next))
            logger.error(f"Monotone iteration decreased by {drop:.3e} at iteration {iteration}, t={t}")
            raise HypothesisError(f"non-monotone iterate sequence (drop {drop:.3e})")
        if supersolution is not None and np.any(u_next > supersolution + slack):
            raise HypothesisError("monotone iterate crossed the supersolution")

        amplitude = float(np.max(np.abs(u_next)))
        f_next = residual(spec, op, u_next, t)
        norm = float(np.max(np.abs(f_next)))
        step = float(np.max(np.abs(u_next - u)))
        trace("monotone", t, iteration, norm, step)
        u = u_next
        if amplitude > opts.monotone_ceiling:
            logger.debug(f"Monotone iteration diverged at t={t}: ||u||_inf={amplitude:.3e} after {iteration} steps")
            raise DivergenceError("divergence", iterate=u, iterations=iteration)
        if converged(f_next, opts.tol_residual):
            logger.debug(f"Monotone iteration converged at t={t} in {iteration} steps, residual {norm:.3e}")
            return make_solution(spec, op, u, t, SolveMethod.MONOTONE, iterations=iteration)
        if step == 0.0:
            raise NonConvergenceError("stagnation", iterate=u, iterations=iteration)

    raise NonConvergenceError("max_iters", iterate=u, iterations=max_iters)
