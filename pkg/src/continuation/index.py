#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
Local fixed-point indices and degree bookkeeping by index summation.

I - DS_t(u) = (K + C_f M)^-1 (K - M diag(f'(u))) and det(K + C_f M) > 0, so the index of a
nondegenerate fixed point is the sign of det(K - M diag(f'(u))).
"""

import logging
from dataclasses import dataclass
from dataclasses import field
from logging import Logger

import numpy as np
from scipy.sparse import diags
from scipy.sparse.linalg import splu

from src.data_model import NodalVector
from src.data_model.problem_spec import ProblemSpec
from src.data_model.region import RegionPart
from src.data_model.region import RegionSpec
from src.data_model.solution import Solution
from src.exceptions import DegenerateIndexError
from src.operators.nonlinear import jacobian
from src.operators.weighted import WeightedOperator

from typing import Dict
from typing import List
from typing import Optional
from typing import Union

DEGENERATE_PIVOT_RATIO = 1e-10
KINK_PROXIMITY = 1e-6
EXHAUSTIVENESS_CAVEAT = ("index sums run over the solutions found by the enumerator; "
                         "the degree equals the sum only if that list is exhaustive in the region")


def _permutation_parity(permutation: np.ndarray) -> int:
    """
    +1 for an even permutation, -1 for an odd one.
    """
    seen = np.zeros(len(permutation), dtype=bool)
    transpositions = 0
    for start in range(len(permutation)):
        if seen[start]:
            continue
        length = 0
        j = start
        while not seen[j]:
            seen[j] = True
            j = permutation[j]
            length += 1
        transpositions += length - 1
    return -1 if transpositions % 2 else 1


def _determinant_sign(spec: ProblemSpec, op: WeightedOperator, u: np.ndarray, t: float, side: str) -> int:
    # M^-1/2 J M^-1/2 has the sign of det J and no node weights of order r^(N-1) in its pivots
    scale = diags(1.0 / np.sqrt(op.mass))
    matrix = (scale @ jacobian(spec, op, u, t, side=side) @ scale).tocsc()
    try:
        lu = splu(matrix)
    except RuntimeError:
        # exactly singular factor
        return 0
    pivots = lu.U.diagonal()
    magnitudes = np.abs(pivots)
    if magnitudes.min() < DEGENERATE_PIVOT_RATIO * magnitudes.max():
        return 0
    sign = -1 if np.count_nonzero(pivots < 0.0) % 2 else 1
    return sign * _permutation_parity(lu.perm_r) * _permutation_parity(lu.perm_c)


def local_index(spec: ProblemSpec, op: WeightedOperator, u: Union[Solution, NodalVector], t: float) -> int:
    """
    Sign of det(K - M diag(f'(u))) from an LU factorization with pivoting.

    When a nodal value lies within 1e-6 of a kink of f the sign is computed with both
    one-sided derivatives and disagreement is reported as degenerate.

    Parameters
    ----------
    spec, op : ProblemSpec, WeightedOperator
    u : Solution or numpy.ndarray
        Converged solution.
    t : float

    Returns
    -------
    int
        +1 or -1, or 0 when the smallest pivot magnitude of the mass-scaled Jacobian
        M^-1/2 J M^-1/2 is below 1e-10 of the largest.

    Examples
    --------
    piecewise_linear(1, 1), phi = 1, h = 0, t = -1: u = -1 has index +1, u = +1 has index -1,
    and the fold point u = 0, t = 0 has index 0.
    """
    values = np.asarray(u.u if isinstance(u, Solution) else u, dtype=float)
    right = _determinant_sign(spec, op, values, t, "right")
    kinks = spec.nonlinearity.kinks
    if kinks and np.min(np.abs(values[:, None] - np.asarray(kinks)[None, :])) <= KINK_PROXIMITY:
        if _determinant_sign(spec, op, values, t, "left") != right:
            return 0
    return right


@dataclass(frozen=True)
class DegreeReport:
    """
    Index sums over G, B(0, R) and B(0, R) minus G.

    Attributes
    ----------
    degrees : dict
        RegionPart -> sum of the local indices of the solutions inside it.
    memberships : list of dict
        Per solution: position, index, u_mean, in_g, in_ball, boundary_distance.
    caveat : str
        Exhaustiveness caveat, always attached.
    """
    degrees: Dict[RegionPart, int]
    memberships: List[dict] = field(default_factory=list)
    caveat: str = EXHAUSTIVENESS_CAVEAT

    def degree(self, part: RegionPart) -> int:
        return self.degrees[part]


def degree_over_region(spec: ProblemSpec, op: WeightedOperator, region: RegionSpec, t: float,
                       solutions: List[Solution], logger: Optional[Logger] = None) -> DegreeReport:
    """
    Sum the local indices of the solutions lying in G, in B(0, R) and in B(0, R) minus G.

    Solutions without an index get one computed here.

    Raises
    ------
    DegenerateIndexError
        If a solution has index 0; names its position in `solutions`.
    """
    logger = logger or logging.getLogger(__name__)
    degrees = {part: 0 for part in RegionPart}
    memberships = []
    for position, solution in enumerate(solutions):
        index = solution.index if solution.index is not None else local_index(spec, op, solution, t)
        if index == 0:
            logger.error(f"Degree over region refused: solution #{position} ({solution!r}) is degenerate")
            raise DegenerateIndexError(position)
        in_g = region.in_g(solution.u)
        in_ball = region.in_ball(solution.u)
        distance = region.boundary_distance(solution.u)
        if distance < 1e-8:
            logger.warning(f"Solution #{position} lies on a region boundary (distance {distance:.3e})")
        if in_g:
            degrees[RegionPart.G] += index
        if in_ball:
            degrees[RegionPart.BALL] += index
            if not in_g:
                degrees[RegionPart.BALL_MINUS_G] += index
        memberships.append({"position": position, "index": index, "u_mean": solution.u_mean,
                            "in_g": in_g, "in_ball": in_ball, "boundary_distance": distance})
    logger.debug(f"Degrees at t={t}: " + ", ".join(f"{k.value}={v}" for k, v in degrees.items()))
    return DegreeReport(degrees=degrees, memberships=memberships)
