#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
Regions of L-infinity used by the degree bookkeeping.

G = {v : ||v+||_inf < rho_plus, ||v-||_inf < rho_minus} and the ball B(0, R) that
contains its closure.
"""

from __future__ import annotations

import enum

import numpy as np

from src.data_model import NodalVector

from typing import TypedDict
from typing_extensions import Unpack


class RegionPart(enum.Enum):
    """
    Pieces of the ball over which degrees are reported.
    """
    G = "G"
    BALL = "B"
    BALL_MINUS_G = "B\\G"


class RegionSpecParams(TypedDict):
    rho_plus: float
    rho_minus: float
    R: float


class RegionSpec:
    """
    Caps defining G and the radius of the enclosing ball.

    Parameters
    ----------
    **kwargs : RegionSpecParams
        rho_plus, rho_minus and R, all positive with R > max(rho_plus, rho_minus).

    Raises
    ------
    ValueError
        If a cap is not positive or the ball does not contain the closure of G.
    """
    __slots__ = ("rho_plus", "rho_minus", "R")

    def __init__(self, **kwargs: Unpack[RegionSpecParams]) -> None:
        self.rho_plus = float(kwargs["rho_plus"])
        self.rho_minus = float(kwargs["rho_minus"])
        self.R = float(kwargs["R"])
        if min(self.rho_plus, self.rho_minus, self.R) <= 0.0:
            raise ValueError(f"region caps must be positive, got {self!r}")
        if self.R <= max(self.rho_plus, self.rho_minus):
            raise ValueError(f"R={self.R} must exceed both caps ({self.rho_plus}, {self.rho_minus})")

    def in_g(self, v: NodalVector) -> bool:
        v = np.asarray(v, dtype=float)
        return bool(np.max(np.maximum(v, 0.0)) < self.rho_plus and np.max(np.maximum(-v, 0.0)) < self.rho_minus)

    def in_ball(self, v: NodalVector) -> bool:
        return bool(np.max(np.abs(v)) < self.R)

    def boundary_distance(self, v: NodalVector) -> float:
        """
        Smallest distance in ||.||_inf of the positive and negative parts of v to the caps of G
        and of ||v||_inf to R; zero means v lies on a boundary where the degree is undefined.
        """
        v = np.asarray(v, dtype=float)
        plus = float(np.max(np.maximum(v, 0.0)))
        minus = float(np.max(np.maximum(-v, 0.0)))
        return min(abs(plus - self.rho_plus), abs(minus - self.rho_minus), abs(max(plus, minus) - self.R))

    def __eq__(self, other):
        if not isinstance(other, RegionSpec):
            return NotImplemented
        return (self.rho_plus, self.rho_minus, self.R) == (other.rho_plus, other.rho_minus, other.R)

    def __hash__(self):
        return hash((self.rho_plus, self.rho_minus, self.R))

    def __repr__(self) -> str:
        return f"RegionSpec(rho_plus={self.rho_plus}, rho_minus={self.rho_minus}, R={self.R})"
