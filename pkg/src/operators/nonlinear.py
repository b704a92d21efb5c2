#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
Nonlinear problem operators built on a `WeightedOperator`.

- residual F(u; t) = K u - M (f(u) + t phi + h); u solves the discrete problem iff F = 0.
- jacobian J(u) = K - M diag(f'(u)) with the right derivative at kinks.
- apply_S: S_t(v) = T(f(v) + C_f v + t phi + h), whose fixed points are the zeros of F.
- compatibility_defect, necessary_upper_bound: the integrated identity and the
  nonexistence bound it implies.
- constant_subsolution: the constant subsolution -(|t| ||phi|| + ||h|| + C_4) / C_3.
- homotopy_t_rho, a_priori_rho_minus: computable versions of the a priori radii used on
  the boundary of the degree region G.

Sign convention: u is a subsolution when F(u) <= 0 componentwise and a supersolution
when F(u) >= 0.
"""

import numpy as np
from scipy import sparse

from src.data_model import NodalVector
from src.data_model.problem_spec import ProblemSpec
from src.data_model.solution import Solution
from src.data_model.solution import SolveMethod
from src.operators.weighted import WeightedOperator
from src.operators.weighted import solve_shifted

from typing import Optional

COMPATIBILITY_TOLERANCE = 1e-9


def residual(spec: ProblemSpec, op: WeightedOperator, u: NodalVector, t: float) -> NodalVector:
    """
    F(u; t) = K u - M (f(u) + t phi + h).

    Examples
    --------
    With piecewise_linear(1, 1), phi = 1, h = 0, t = -1 and u = 1 (or u = -1), F = 0 exactly.
    """
    u = np.asarray(u, dtype=float)
    return op.stiffness @ u - op.mass * (spec.nonlinearity.eval(u) + spec.forcing(t))


def residual_norm(spec: ProblemSpec, op: WeightedOperator, u: NodalVector, t: float) -> float:
    return float(np.max(np.abs(residual(spec, op, u, t))))


def converged(values: NodalVector, tolerance: float) -> bool:
    """
    Stopping test of the solvers on a residual F: ||F||_inf <= tolerance and
    |1^T F| <= COMPATIBILITY_TOLERANCE, 1^T F being minus the compatibility defect.
    """
    return bool(np.max(np.abs(values)) <= tolerance and abs(float(np.sum(values))) <= COMPATIBILITY_TOLERANCE)


def jacobian(spec: ProblemSpec, op: WeightedOperator, u: NodalVector, t: float,
             side: str = "right") -> sparse.csr_matrix:
    """
    J(u) = K - M diag(f'(u)); `t` enters F only additively and is accepted for symmetry.
    """
    slopes = spec.nonlinearity.slope(np.asarray(u, dtype=float), side=side)
    return (op.stiffness - sparse.diags(op.mass * slopes, 0)).tocsr()


def apply_S(spec: ProblemSpec, op: WeightedOperator, v: NodalVector, t: float) -> NodalVector:
    """
    S_t(v) = T(f(v) + C_f v + t phi + h) with T the solution map of (K + C_f M) w = M v.

    Raises
    ------
    LinearSolveError
        Propagated from the shifted solve.
    """
    v = np.asarray(v, dtype=float)
    c_f = spec.nonlinearity.c_f
    rhs = spec.nonlinearity.eval(v) + c_f * v + spec.forcing(t)
    return solve_shifted(op, c_f, rhs).solution


def compatibility_defect(spec: ProblemSpec, op: WeightedOperator, u: NodalVector, t: float) -> float:
    """
    1^T M (f(u) + t phi + h); equals 1^T K u = 0 at an exact discrete solution.
    """
    return op.integrate(spec.nonlinearity.eval(np.asarray(u, dtype=float)) + spec.forcing(t))


def necessary_upper_bound(spec: ProblemSpec, op: WeightedOperator) -> float:
    """
    (C_2 |Omega| - int h) / int phi; no solution exists above this value of t.

    Integrating the equation gives 0 = int f(u) + t int phi + int h and f >= C_1|u| - C_2
    turns it into the bound.
    """
    return (spec.nonlinearity.c_2 * op.measure - op.integrate(spec.h)) / op.integrate(spec.phi)


def constant_subsolution(spec: ProblemSpec, t: float) -> float:
    """
    Constant subsolution c_sub = -(|t| ||phi||_inf + ||h||_inf + C_4) / C_3.

    Since f(u) >= -C_3 u - C_4, f(c_sub) + t phi + h >= 0, hence F(c_sub) <= 0.
    """
    f = spec.nonlinearity
    return -(abs(t) * spec.phi_sup + spec.h_sup + f.c_4) / f.c_3


def _order_slack(op: WeightedOperator) -> float:
    return 1e-12 * max(float(np.max(op.mass)), 1.0)


def is_subsolution(spec: ProblemSpec, op: WeightedOperator, u: NodalVector, t: float) -> bool:
    return bool(np.all(residual(spec, op, u, t) <= _order_slack(op)))


def is_supersolution(spec: ProblemSpec, op: WeightedOperator, u: NodalVector, t: float) -> bool:
    return bool(np.all(residual(spec, op, u, t) >= -_order_slack(op)))


def homotopy_t_rho(spec: ProblemSpec, op: WeightedOperator, rho: float) -> float:
    """
    Parameter t_rho below which v != s S_t(v) on the face ||v+||_inf = rho, for every s in [0, 1].

    Positivity of T gives v <= s T(C_f (1 + 2 rho) + t phi + h) for such a fixed point.
    Writing A = T(C_f (1 + 2 rho) + h) and B = T phi > 0, the bound is nonpositive as soon
    as t <= min_i (-A_i / B_i), which contradicts ||v+||_inf = rho > 0.

    Parameters
    ----------
    rho : float
        Cap on ||v+||_inf, > 0.
    """
    if not rho > 0.0:
        raise ValueError(f"rho must be positive, got {rho}")
    c_f = spec.nonlinearity.c_f
    a = solve_shifted(op, c_f, c_f * (1.0 + 2.0 * rho) + spec.h).solution
    b = solve_shifted(op, c_f, spec.phi).solution
    return float(np.min(-a / b))


def a_priori_rho_minus(spec: ProblemSpec, op: WeightedOperator, t: float, s_samples: int = 21) -> float:
    """
    rho_t = C_0(t) + 1 with C_0 = max over s of ||w(s)||_inf, where w(s) solves
    (K + (s C_3 + (1 - s) C_f) M) w = M s (t phi + h - C_4).

    Every fixed point of s S_t dominates w(s), so ||v-||_inf <= C_0 < rho_t.
    """
    f = spec.nonlinearity
    bound = 0.0
    for s in np.linspace(0.0, 1.0, s_samples)[1:]:
        shift = s * f.c_3 + (1.0 - s) * f.c_f
        w = solve_shifted(op, shift, s * (spec.forcing(t) - f.c_4)).solution
        bound = max(bound, float(np.max(np.abs(w))))
    return bound + 1.0


def make_solution(spec: ProblemSpec, op: WeightedOperator, u: NodalVector, t: float, method: SolveMethod,
                  iterations: int = 0, index: Optional[int] = None) -> Solution:
    """
    Wrap a converged nodal vector with its residual, defect and mean.
    """
    u = np.asarray(u, dtype=float)
    return Solution(u=u, t=t, residual_norm=residual_norm(spec, op, u, t),
                    compatibility_defect=compatibility_defect(spec, op, u, t),
                    u_mean=op.integrate(u) / op.measure, method=method,
                    iterations=iterations, index=index)
