#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
Pseudo-arclength continuation of F(u; t) = 0 and fold detection.

The arclength uses the weighted inner product
<(u, t), (v, s)> = theta <u, v>_M / |Omega| + (1 - theta) t s
with theta = 0.75 by default. With theta = 0.5 the corrector hyperplane is parallel to the
second branch of a piecewise-linear f at its corner fold, so it can never turn it.

The augmented system solved by the corrector is

    F(u; t) = 0
    <tangent, (u, t) - predictor> = 0

with Jacobian [[J(u), -M phi], [tangent row]], bordered and solved as one sparse system.
"""

import logging
import warnings
from dataclasses import dataclass
from logging import Logger

import numpy as np
from scipy import sparse
from scipy.sparse.linalg import MatrixRankWarning
from scipy.sparse.linalg import spsolve

from src.continuation.index import local_index
from src.data_model import NodalVector
from src.data_model.branch import Branch
from src.data_model.branch import BranchPoint
from src.data_model.branch import BranchStatus
from src.data_model.problem_spec import ProblemSpec
from src.data_model.solution import Solution
from src.data_model.solution import SolveOptions
from src.exceptions import NonConvergenceError
from src.operators.nonlinear import jacobian
from src.operators.nonlinear import residual
from src.operators.nonlinear import residual_norm
from src.operators.weighted import WeightedOperator
from src.solvers import trace

from typing import Optional
from typing import Tuple
from typing import Union

DEFAULT_THETA = 0.75
CORRECTOR_ITERS = 25
CLEAN_STEPS_BEFORE_GROWTH = 4
STALL_RATIO = 1e-10
FOLD_T_TOLERANCE = 1e-8
FOLD_MAX_BISECTIONS = 200


@dataclass(frozen=True)
class _Tangent:
    du: np.ndarray
    dt: float


class _ArclengthGeometry:
    """
    Weighted inner product and the bordered linear algebra shared by tracing and fold refinement.
    """

    def __init__(self, spec: ProblemSpec, op: WeightedOperator, theta: float) -> None:
        if not 0.0 < theta < 1.0:
            raise ValueError(f"theta must lie in (0, 1), got {theta}")
        self.spec = spec
        self.op = op
        self.theta = theta
        self.m_phi = op.mass * spec.phi

    def inner(self, du: np.ndarray, dt: float, dv: np.ndarray, ds: float) -> float:
        return self.theta * self.op.inner(du, dv) / self.op.measure + (1.0 - self.theta) * dt * ds

    def normalize(self, du: np.ndarray, dt: float) -> _Tangent:
        norm = np.sqrt(self.inner(du, dt, du, dt))
        return _Tangent(du / norm, dt / norm)

    def border_row(self, tangent: _Tangent) -> Tuple[np.ndarray, float]:
        return self.theta * self.op.mass * tangent.du / self.op.measure, (1.0 - self.theta) * tangent.dt

    def bordered_solve(self, u: np.ndarray, t: float, tangent: _Tangent,
                       rhs_u: np.ndarray, rhs_t: float) -> Optional[np.ndarray]:
        row, corner = self.border_row(tangent)
        matrix = sparse.bmat([[jacobian(self.spec, self.op, u, t), sparse.csr_matrix(-self.m_phi[:, None])],
                              [sparse.csr_matrix(row[None, :]), sparse.csr_matrix([[corner]])]], format="csc")
        with warnings.catch_warnings():
            warnings.simplefilter("error", MatrixRankWarning)
            try:
                solution = spsolve(matrix, np.concatenate((rhs_u, [rhs_t])))
            except (MatrixRankWarning, RuntimeError):
                return None
        return solution if np.all(np.isfinite(solution)) else None

    def initial_tangent(self, u: np.ndarray, t: float, direction: float) -> _Tangent:
        with warnings.catch_warnings():
            warnings.simplefilter("error", MatrixRankWarning)
            try:
                du = spsolve(jacobian(self.spec, self.op, u, t).tocsc(), self.m_phi)
            except (MatrixRankWarning, RuntimeError):
                raise NonConvergenceError("singular_jacobian", iterate=u) from None
        return self.normalize(direction * du, direction)

    def tangent_at(self, u: np.ndarray, t: float, previous: _Tangent) -> _Tangent:
        """
        Tangent at a converged point, oriented along `previous`.
        """
        solution = self.bordered_solve(u, t, previous, np.zeros(self.op.size), 1.0)
        if solution is None:
            return previous
        tangent = self.normalize(solution[:-1], float(solution[-1]))
        if self.inner(tangent.du, tangent.dt, previous.du, previous.dt) < 0.0:
            tangent = _Tangent(-tangent.du, -tangent.dt)
        return tangent

    def correct(self, u: np.ndarray, t: float, tangent: _Tangent, step: float,
                opts: SolveOptions) -> Optional[Tuple[np.ndarray, float]]:
        """
        Predictor along `tangent` followed by Newton on the augmented system.
        """
        u_pred = u + step * tangent.du
        t_pred = t + step * tangent.dt
        row, corner = self.border_row(tangent)
        v, s = u_pred.copy(), t_pred
        for iteration in range(CORRECTOR_ITERS):
            f_v = residual(self.spec, self.op, v, s)
            constraint = float(row @ (v - u_pred) + corner * (s - t_pred))
            norm = float(np.max(np.abs(f_v)))
            trace("arclength", s, iteration, norm, step)
            if norm <= opts.tol_residual and abs(constraint) <= opts.tol_residual:
                return v, s
            delta = self.bordered_solve(v, s, tangent, -f_v, -constraint)
            if delta is None:
                return None
            v = v + delta[:-1]
            s = s + float(delta[-1])
        return None


def _make_point(spec: ProblemSpec, op: WeightedOperator, u: np.ndarray, t: float,
                arclength: float, tangent: _Tangent) -> BranchPoint:
    return BranchPoint(t=t, u=u, arclength=arclength, index=local_index(spec, op, u, t),
                       tangent_dt=tangent.dt, residual_norm=residual_norm(spec, op, u, t),
                       u_mean=op.integrate(u) / op.measure)


def trace_branch(spec: ProblemSpec, op: WeightedOperator, t_start: float, u_start: Union[Solution, NodalVector],
                 step: float, t_stop: float, max_points: int = 500, theta: float = DEFAULT_THETA,
                 opts: Optional[SolveOptions] = None, detect: bool = True,
                 logger: Optional[Logger] = None) -> Branch:
    """
    Follow the branch through (t_start, u_start), initially toward t_stop.

    Parameters
    ----------
    spec, op : ProblemSpec, WeightedOperator
    t_start : float
    u_start : Solution or numpy.ndarray
        Solution at t_start.
    step : float
        Initial (and maximal) arclength step, > 0.
    t_stop : float
        The trace ends once t leaves the closed window spanned by t_start and t_stop.
    max_points : int
    theta : float
        Weight of the u part of the arclength inner product.
    opts : SolveOptions, optional
        Uses tol_residual for the corrector.
    detect : bool
        Run `detect_fold` on the result.
    logger : Logger, optional

    Returns
    -------
    Branch
        Status COMPLETED, MAX_POINTS, or STALLED when the step fell below 1e-10 of the
        initial one (the branch then ends at the last good point).

    Raises
    ------
    ValueError
        If u_start does not solve at t_start or the step is not positive.
    """
    logger = logger or logging.getLogger(__name__)
    opts = opts or SolveOptions()
    if not step > 0.0:
        raise ValueError(f"step must be positive, got {step}")
    if t_stop == t_start:
        raise ValueError("t_stop must differ from t_start")
    u = np.array(u_start.u if isinstance(u_start, Solution) else u_start, dtype=float)
    t = float(t_start)
    start_residual = residual_norm(spec, op, u, t)
    if start_residual > max(opts.tol_residual, 1e-8):
        raise ValueError(f"u_start does not solve at t_start={t} (residual {start_residual:.3e})")

    geometry = _ArclengthGeometry(spec, op, theta)
    t_low, t_high = min(t_start, t_stop), max(t_start, t_stop)
    tangent = geometry.initial_tangent(u, t, np.sign(t_stop - t_start))
    points = [_make_point(spec, op, u, t, 0.0, tangent)]
    arclength = 0.0
    h = step
    clean = 0
    status = BranchStatus.COMPLETED
    while True:
        if len(points) >= max_points:
            status = BranchStatus.MAX_POINTS
            break
        corrected = geometry.correct(u, t, tangent, h, opts)
        if corrected is None:
            h *= 0.5
            clean = 0
            logger.debug(f"Corrector failed at t={t:.6g}, step halved to {h:.3e}")
            if h < STALL_RATIO * step:
                status = BranchStatus.STALLED
                logger.warning(f"Branch stalled at t={t:.6g} after {len(points)} points")
                break
            continue
        v, s = corrected
        distance = np.sqrt(geometry.inner(v - u, s - t, v - u, s - t))
        if distance <= 0.0:
            h *= 0.5
            continue
        tangent = geometry.tangent_at(v, s, tangent)
        arclength += distance
        u, t = v, s
        if not t_low - 1e-12 <= t <= t_high + 1e-12:
            logger.debug(f"Branch left the window [{t_low}, {t_high}] at t={t:.6g}")
            break
        points.append(_make_point(spec, op, u, t, arclength, tangent))
        clean += 1
        if clean >= CLEAN_STEPS_BEFORE_GROWTH:
            h = min(2.0 * h, step)
            clean = 0

    branch = Branch(points, status=status)
    logger.info(f"Traced {len(points)} branch points from t={t_start} ({status.value})")
    if detect and len(points) >= 3:
        fold = detect_fold(branch, spec, op, theta=theta, opts=opts, logger=logger)
        branch = Branch(points, fold=fold, status=status)
    return branch


def detect_fold(branch: Branch, spec: ProblemSpec, op: WeightedOperator, theta: float = DEFAULT_THETA,
                opts: Optional[SolveOptions] = None,
                logger: Optional[Logger] = None) -> Optional[Tuple[float, NodalVector]]:
    """
    Locate the first sign change of dt/ds and refine it by bisection on arclength.

    Re-solves from the last point before the sign change with shrinking steps until the two
    bracketing points differ by at most 1e-8 in t, and returns the one with extremal t.

    Returns
    -------
    (float, numpy.ndarray) or None
        (t_fold, u_fold), or None when dt/ds keeps its sign over the traced range.

    Raises
    ------
    ValueError
        If the branch has fewer than 3 points.
    """
    logger = logger or logging.getLogger(__name__)
    opts = opts or SolveOptions()
    if len(branch) < 3:
        raise ValueError(f"fold detection needs at least 3 branch points, got {len(branch)}")
    signs = np.sign([p.tangent_dt for p in branch.points])
    changes = np.nonzero(signs[:-1] * signs[1:] < 0.0)[0]
    if len(changes) == 0:
        logger.debug("No fold in the traced range")
        return None
    i = int(changes[0])
    before, after = branch.points[i], branch.points[i + 1]
    is_maximum = before.tangent_dt > 0.0
    geometry = _ArclengthGeometry(spec, op, theta)
    if i == 0:
        orientation = geometry.initial_tangent(np.array(before.u), before.t, np.sign(before.tangent_dt))
    else:
        orientation = _tangent_from_points(geometry, branch, i)
    start_tangent = geometry.tangent_at(np.array(before.u), before.t, orientation)
    left = (np.array(before.u), before.t, 0.0)
    right = (np.array(after.u), after.t, after.arclength - before.arclength)
    for _ in range(FOLD_MAX_BISECTIONS):
        if abs(right[1] - left[1]) <= FOLD_T_TOLERANCE:
            break
        middle = 0.5 * (left[2] + right[2])
        corrected = geometry.correct(np.array(before.u), before.t, start_tangent, middle, opts)
        if corrected is None:
            logger.warning(f"Fold refinement corrector failed near t={before.t:.6g}")
            break
        v, s = corrected
        tangent = geometry.tangent_at(v, s, start_tangent)
        if np.sign(tangent.dt) == np.sign(before.tangent_dt):
            left = (v, s, middle)
        else:
            right = (v, s, middle)
    pick = max(left, right, key=lambda p: p[1]) if is_maximum else min(left, right, key=lambda p: p[1])
    logger.info(f"Fold at t={pick[1]:.10g}, u_mean={op.integrate(pick[0]) / op.measure:.6g}")
    return pick[1], pick[0]


def _tangent_from_points(geometry: _ArclengthGeometry, branch: Branch, i: int) -> _Tangent:
    """
    Secant from point i - 1 to point i, used to orient the tangent at point i.
    """
    previous, current = branch.points[i - 1], branch.points[i]
    return geometry.normalize(np.array(current.u) - np.array(previous.u), current.t - previous.t)
