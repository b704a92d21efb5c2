#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
Sampled check of the a priori estimates: v != s S_t(v) on the faces of G.

The positive face is {||v+||_inf = rho_plus, ||v-||_inf <= rho_minus} and the negative
face is {||v-||_inf = rho_minus, ||v+||_inf <= rho_plus}. A positive margin is consistency
evidence only.
"""

import logging
from dataclasses import dataclass
from logging import Logger

import numpy as np

from src.data_model.problem_spec import ProblemSpec
from src.data_model.region import RegionSpec
from src.operators.nonlinear import apply_S
from src.operators.weighted import WeightedOperator

from typing import Iterator
from typing import Optional

FIXED_POINT_EXCLUSION = 1e-12


@dataclass(frozen=True)
class HomotopyBoundaryReport:
    """
    Minimum of ||v - s S_t(v)||_inf over the samples.

    Attributes
    ----------
    margin : float
        Minimum over both faces.
    margin_plus, margin_minus : float
        Minimum over the positive and the negative face.
    samples : int
        Profiles evaluated (per face times two).
    excluded : int
        Profiles skipped because they are fixed points of S_t.
    """
    margin: float
    margin_plus: float
    margin_minus: float
    samples: int
    excluded: int

    @property
    def passed(self) -> bool:
        return self.margin > 0.0


def _face_profiles(x: np.ndarray, region: RegionSpec, positive: bool, count: int,
                   rng: np.random.Generator) -> Iterator[np.ndarray]:
    """
    Constant, random and cosine profiles clipped to closure(G) and pinned to one face.
    """
    lower, upper = -region.rho_minus, region.rho_plus
    length = x[-1] - x[0]
    for k in range(count):
        family = k % 3
        if k == 0:
            v = np.full(len(x), upper if positive else lower)
        elif family == 0:
            v = rng.uniform(lower, upper, len(x))
        elif family == 1:
            frequency = rng.integers(1, 6)
            v = rng.uniform(lower, upper) + rng.uniform(0.0, upper - lower) * np.cos(
                frequency * np.pi * (x - x[0]) / length)
        else:
            v = np.full(len(x), rng.uniform(lower, upper)) + rng.normal(0.0, 0.1 * (upper - lower), len(x))
        v = np.clip(v, lower, upper)
        if positive:
            v[int(np.argmax(v))] = upper
        else:
            v[int(np.argmin(v))] = lower
        yield v


def verify_homotopy_boundary(spec: ProblemSpec, op: WeightedOperator, t: float, region: RegionSpec,
                             s_samples: int = 11, v_samples: int = 200, seed: int = 0,
                             logger: Optional[Logger] = None) -> HomotopyBoundaryReport:
    """
    Sample s on a uniform grid of [0, 1] and v on both faces of G.

    Parameters
    ----------
    spec, op : ProblemSpec, WeightedOperator
    t : float
    region : RegionSpec
    s_samples : int
        Points of the uniform s grid, >= 2.
    v_samples : int
        Profiles per face.
    seed : int
        Seed of the profile generator.
    logger : Logger, optional

    Returns
    -------
    HomotopyBoundaryReport
        A zero margin is reported, never raised.
    """
    logger = logger or logging.getLogger(__name__)
    if s_samples < 2 or v_samples < 1:
        raise ValueError("s_samples must be >= 2 and v_samples >= 1")
    rng = np.random.default_rng(seed)
    s_grid = np.linspace(0.0, 1.0, s_samples)
    margins = {}
    excluded = 0
    for positive in (True, False):
        margin = np.inf
        for v in _face_profiles(op.mesh.nodes, region, positive, v_samples, rng):
            image = apply_S(spec, op, v, t)
            if np.max(np.abs(v - image)) <= FIXED_POINT_EXCLUSION:
                excluded += 1
                continue
            distances = np.max(np.abs(v[None, :] - s_grid[:, None] * image[None, :]), axis=1)
            margin = min(margin, float(np.min(distances)))
        margins[positive] = margin
    report = HomotopyBoundaryReport(margin=min(margins.values()), margin_plus=margins[True],
                                    margin_minus=margins[False], samples=2 * v_samples, excluded=excluded)
    logger.info(f"Homotopy boundary margin at t={t}: {report.margin:.6e} "
                f"(+ face {report.margin_plus:.6e}, - face {report.margin_minus:.6e})")
    return report
