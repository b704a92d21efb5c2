#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
Enumeration of the solutions at a fixed parameter t.

Order of the search: monotone iteration from the constant subsolution, Newton from a
grid of constant starts, then deflated Newton started around every solution found.
"""

import logging
from logging import Logger

import numpy as np

from src.continuation.index import local_index
from src.data_model.problem_spec import ProblemSpec
from src.data_model.solution import Solution
from src.data_model.solution import SolveOptions
from src.exceptions import NonConvergenceError
from src.operators.nonlinear import constant_subsolution
from src.operators.nonlinear import residual_norm
from src.operators.weighted import WeightedOperator
from src.solvers.monotone import monotone_iterate
from src.solvers.newton import deflated_newton
from src.solvers.newton import newton

from typing import List
from typing import Optional

DEFLATION_OFFSET = 0.1


def constant_starts(spec: ProblemSpec, t: float, count: int) -> np.ndarray:
    """
    `count` constants spanning [-c, c] with c = max(|c_sub|, 1).
    """
    span = max(abs(constant_subsolution(spec, t)), 1.0)
    return np.linspace(-span, span, count)


def _same_solution(spec: ProblemSpec, op: WeightedOperator, first: Solution, second: Solution,
                   opts: SolveOptions) -> bool:
    """
    Closer than dedup_tolerance, or joined by a midpoint that also solves.

    Near a degenerate root Newton stops O(sqrt(tol)) away from it, so two starts can
    land further apart than dedup_tolerance on what is one solution.
    """
    if first.distance(second) < opts.dedup_tolerance:
        return True
    return residual_norm(spec, op, 0.5 * (first.u + second.u), first.t) <= opts.tol_residual


def find_all_solutions(spec: ProblemSpec, op: WeightedOperator, t: float, opts: Optional[SolveOptions] = None,
                       logger: Optional[Logger] = None) -> List[Solution]:
    """
    All solutions the three methods find at t, deduplicated and sorted by mean.

    Returns
    -------
    list of Solution
        Possibly empty; every entry carries its local index.

    Examples
    --------
    pl11 at t = -1 gives the constants -1 and +1, at t = 0 the constant 0 and at t = 1 nothing.
    """
    logger = logger or logging.getLogger(__name__)
    opts = opts or SolveOptions()
    found: List[Solution] = []

    def accept(candidate: Solution) -> bool:
        if not any(_same_solution(spec, op, candidate, s, opts) for s in found):
            found.append(candidate)
            return True
        return False

    try:
        accept(monotone_iterate(spec, op, t, opts=opts, logger=logger))
    except NonConvergenceError as e:
        logger.debug(f"Monotone iteration at t={t}: {e}")

    for c in constant_starts(spec, t, opts.multistart):
        try:
            accept(newton(spec, op, t, np.full(op.size, c), opts=opts, logger=logger))
        except NonConvergenceError as e:
            logger.debug(f"Newton from constant {c:.4g} at t={t}: {e}")

    # each new deflation hit is also used as a seed
    pending = list(found)
    while pending:
        seed = pending.pop(0)
        for offset in (DEFLATION_OFFSET, -DEFLATION_OFFSET):
            try:
                candidate = deflated_newton(spec, op, t, seed.u + offset, found, opts=opts, logger=logger)
            except NonConvergenceError as e:
                logger.debug(f"Deflation from mean {seed.u_mean:.4g}{offset:+.1f} at t={t}: {e.reason}")
                continue
            if accept(candidate):
                pending.append(candidate)

    solutions = sorted(s.with_index(local_index(spec, op, s, t)) for s in found)
    logger.info(f"t={t}: {len(solutions)} solution(s) found")
    return solutions


def is_solvable(spec: ProblemSpec, op: WeightedOperator, t: float, opts: Optional[SolveOptions] = None,
                logger: Optional[Logger] = None) -> bool:
    """
    Whether the enumerator would return a nonempty list at t, stopping at the first hit.
    """
    logger = logger or logging.getLogger(__name__)
    opts = opts or SolveOptions()
    try:
        monotone_iterate(spec, op, t, opts=opts, logger=logger)
        return True
    except NonConvergenceError as e:
        logger.debug(f"Solvability at t={t}: monotone iteration gave {e}")
    for c in constant_starts(spec, t, opts.multistart):
        try:
            newton(spec, op, t, np.full(op.size, c), opts=opts, logger=logger)
            return True
        except NonConvergenceError:
            continue
    return False
