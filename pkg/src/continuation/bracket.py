#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
Estimators of the thresholds of the multiplicity picture.

- bracket_t_star: bisection on solvability for t* = sup of the solvable parameters.
- t_star_lower_estimate: best certified parameter below which the positive face of G
  carries no fixed point of s S_t.
"""

import logging
from dataclasses import dataclass
from logging import Logger

import numpy as np

from src.data_model.problem_spec import ProblemSpec
from src.data_model.solution import SolveOptions
from src.exceptions import BracketError
from src.operators.nonlinear import homotopy_t_rho
from src.operators.nonlinear import necessary_upper_bound
from src.operators.weighted import WeightedOperator
from src.solvers.enumerate import is_solvable

from typing import Iterable
from typing import Optional


@dataclass(frozen=True)
class BracketResult:
    """
    Final bisection interval for t*.

    Attributes
    ----------
    t_lo, t_hi : float
        Solvable left end, unsolvable right end.
    evaluations : int
        Calls of the solvability predicate.
    fold_t : float or None
        Fold parameter used for the cross-check, when one was supplied.
    fold_agrees : bool or None
        |fold_t - midpoint| <= 10 tol, None without a fold.
    """
    t_lo: float
    t_hi: float
    evaluations: int
    fold_t: Optional[float] = None
    fold_agrees: Optional[bool] = None

    @property
    def midpoint(self) -> float:
        return 0.5 * (self.t_lo + self.t_hi)

    @property
    def width(self) -> float:
        return self.t_hi - self.t_lo


def bracket_t_star(spec: ProblemSpec, op: WeightedOperator, t_lo: float, t_hi: Optional[float] = None,
                   tol: float = 1e-4, opts: Optional[SolveOptions] = None, fold_t: Optional[float] = None,
                   logger: Optional[Logger] = None) -> BracketResult:
    """
    Bisection on the predicate "the enumerator finds a solution at t".

    Parameters
    ----------
    t_lo : float
        Parameter with a solution.
    t_hi : float, optional
        Parameter without a solution; defaults to necessary_upper_bound + 1.
    tol : float
        Final bracket width.
    fold_t : float, optional
        Fold of a traced branch, checked against the midpoint.

    Raises
    ------
    BracketError
        If t_lo is not solvable, t_hi is solvable, or t_lo >= t_hi.

    Examples
    --------
    pl11 on (-0.5, 0.5) with tol 1e-4 brackets 0; with h = -0.5 it brackets 0.5.
    """
    logger = logger or logging.getLogger(__name__)
    opts = opts or SolveOptions()
    if t_hi is None:
        t_hi = necessary_upper_bound(spec, op) + 1.0
    if not t_lo < t_hi:
        raise BracketError(f"empty bracket [{t_lo}, {t_hi}]")
    if not tol > 0.0:
        raise ValueError(f"tol must be positive, got {tol}")
    if not is_solvable(spec, op, t_lo, opts=opts, logger=logger):
        raise BracketError(f"no solution found at the left end t_lo={t_lo}")
    if is_solvable(spec, op, t_hi, opts=opts, logger=logger):
        raise BracketError(f"a solution exists at the right end t_hi={t_hi}")
    evaluations = 2
    lo, hi = float(t_lo), float(t_hi)
    while hi - lo > tol:
        middle = 0.5 * (lo + hi)
        evaluations += 1
        if is_solvable(spec, op, middle, opts=opts, logger=logger):
            lo = middle
        else:
            hi = middle
        logger.debug(f"t* bracket [{lo:.10g}, {hi:.10g}]")

    agrees = None
    if fold_t is not None:
        agrees = bool(abs(fold_t - 0.5 * (lo + hi)) <= 10.0 * tol)
        if not agrees:
            logger.warning(f"Fold t={fold_t:.10g} disagrees with the bisection bracket [{lo:.10g}, {hi:.10g}]")
    logger.info(f"t* in [{lo:.10g}, {hi:.10g}] after {evaluations} solvability tests")
    return BracketResult(t_lo=lo, t_hi=hi, evaluations=evaluations, fold_t=fold_t, fold_agrees=agrees)


def t_star_lower_estimate(spec: ProblemSpec, op: WeightedOperator,
                          rhos: Iterable[float] = tuple(np.geomspace(1e-3, 1e3, 25))) -> float:
    """
    Largest homotopy_t_rho over a grid of caps rho.

    Every t below this value admits a rho for which the positive-face a priori estimate holds,
    so it bounds t_* = sup over rho of t_rho from below. The sweep reports its own estimate,
    the largest grid t with two solutions (`src.report.sweep.t_lower_star_estimate`), next to it.
    """
    return max(homotopy_t_rho(spec, op, rho) for rho in rhos)
