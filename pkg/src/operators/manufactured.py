#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
Manufactured-solution convergence study of the shifted solve.

The exact solution u(x) = cos(pi x) on (-1, 1) satisfies the Neumann condition at both
ends; the right-hand side -(|x|^alpha u')' + c u is differentiated symbolically on x > 0
and mirrored, since u is even.
"""

import logging
from logging import Logger

import numpy as np
import pandas as pd
import sympy as sp

from src.data_model.mesh import build_mesh
from src.operators.weighted import assemble
from src.operators.weighted import smallest_nonzero_eigenvalue
from src.operators.weighted import solve_shifted

from typing import Callable
from typing import Iterable
from typing import Optional
from typing import Tuple

MMS_INTERVAL = (-1.0, 1.0)


def manufactured_rhs(alpha: float, shift: float) -> Tuple[Callable[[np.ndarray], np.ndarray],
                                                          Callable[[np.ndarray], np.ndarray]]:
    """
    Exact solution and right-hand side of -(|x|^alpha u')' + shift u = v for u = cos(pi x).

    Returns
    -------
    tuple of callable
        (u, v), both vectorized over numpy arrays.
    """
    x = sp.Symbol("x", positive=True)
    a = sp.nsimplify(alpha)
    exact = sp.cos(sp.pi * x)
    rhs = sp.simplify(-sp.diff(x ** a * sp.diff(exact, x), x) + shift * exact)
    at_zero = float(sp.limit(rhs, x, 0, "+"))
    u = sp.lambdify(x, exact, "numpy")
    v_positive = sp.lambdify(x, rhs, "numpy")

    def v(points: np.ndarray) -> np.ndarray:
        r = np.abs(np.asarray(points, dtype=float))
        values = np.full(r.shape, at_zero)
        inside = r > 0.0
        values[inside] = v_positive(r[inside])
        return values

    def u_even(points: np.ndarray) -> np.ndarray:
        return np.asarray(u(np.abs(np.asarray(points, dtype=float))), dtype=float)
    return u_even, v


def convergence_rates(sizes: Iterable[int], errors: Iterable[float]) -> np.ndarray:
    """
    rate_k = log(e_{k-1} / e_k) / log(n_k / n_{k-1}); the first entry is NaN.
    """
    sizes = np.asarray(list(sizes), dtype=float)
    errors = np.asarray(list(errors), dtype=float)
    rates = np.full(len(sizes), np.nan)
    rates[1:] = np.log(errors[:-1] / errors[1:]) / np.log(sizes[1:] / sizes[:-1])
    return rates


def mms_study(alphas: Iterable[float], sizes: Iterable[int], grading: float = 2.0, shift: float = 1.0,
              logger: Optional[Logger] = None) -> pd.DataFrame:
    """
    Discrete L2 error of the shifted solve against cos(pi x) on (-1, 1).

    Returns
    -------
    pandas.DataFrame
        Columns alpha, n_cells, h_max, l2_error, rate.
    """
    logger = logger or logging.getLogger(__name__)
    sizes = list(sizes)
    frames = []
    for alpha in alphas:
        exact, rhs = manufactured_rhs(alpha, shift)
        errors, widths = [], []
        for n in sizes:
            mesh = build_mesh(MMS_INTERVAL, n, grading)
            op = assemble(mesh, alpha)
            w = solve_shifted(op, shift, rhs(mesh.nodes)).solution
            error = w - exact(mesh.nodes)
            errors.append(float(np.sqrt(op.inner(error, error))))
            widths.append(float(np.max(mesh.widths)))
        rates = convergence_rates(sizes, errors)
        logger.info(f"MMS alpha={alpha}: errors {', '.join(f'{e:.3e}' for e in errors)}, "
                    f"final rate {rates[-1]:.3f}")
        frames.append(pd.DataFrame({"alpha": alpha, "n_cells": sizes, "h_max": widths,
                                    "l2_error": errors, "rate": rates}))
    return pd.concat(frames, ignore_index=True)


def neumann_eigenvalue_check(n_cells: int = 400, grading: float = 1.0) -> Tuple[float, float]:
    """
    mu_1 of the unweighted Neumann Laplacian on (0, 1) and its relative error against pi^2.
    """
    op = assemble(build_mesh((0.0, 1.0), n_cells, grading), 0.0)
    mu = smallest_nonzero_eigenvalue(op)
    return mu, abs(mu - np.pi ** 2) / np.pi ** 2
