#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
Discrete solutions and the options of the nonlinear solvers.
"""

from __future__ import annotations

import enum

import numpy as np

from src.data_model import NodalVector

from typing import Optional
from typing import TypedDict
from typing_extensions import Unpack
from typing_extensions import NotRequired


class SolveMethod(enum.Enum):
    """
    Provenance of a solution.
    """
    MONOTONE = "monotone"
    NEWTON = "newton"
    DEFLATION = "deflation"
    CONTINUATION = "continuation"


class SolutionParams(TypedDict):
    u: NodalVector
    t: float
    residual_norm: float
    compatibility_defect: float
    u_mean: float
    method: SolveMethod
    index: NotRequired[Optional[int]]
    iterations: NotRequired[int]


class Solution:
    """
    Nodal solution u of F(u; t) = 0 with its quality figures.

    Solutions order by their mean value, then by t, which is the order used by
    every listing.

    Attributes
    ----------
    u : numpy.ndarray
        Read-only nodal values.
    t : float
        Parameter value.
    residual_norm : float
        ||F(u; t)||_inf.
    compatibility_defect : float
        1^T M (f(u) + t phi + h).
    u_mean : float
        M-weighted mean of u.
    method : SolveMethod
        Provenance tag.
    index : int or None
        Local fixed-point index in {-1, 0, 1}, None while unknown.
    iterations : int
        Iterations spent by the producing method.
    """
    __slots__ = ("u", "t", "residual_norm", "compatibility_defect", "u_mean", "method", "index", "iterations")

    def __init__(self, **kwargs: Unpack[SolutionParams]) -> None:
        self.u = np.array(kwargs["u"], dtype=float)
        self.u.setflags(write=False)
        self.t = float(kwargs["t"])
        self.residual_norm = float(kwargs["residual_norm"])
        self.compatibility_defect = float(kwargs["compatibility_defect"])
        self.u_mean = float(kwargs["u_mean"])
        self.method: SolveMethod = kwargs["method"]
        self.index: Optional[int] = kwargs.get("index")
        self.iterations = int(kwargs.get("iterations", 0))

    @property
    def u_min(self) -> float:
        return float(np.min(self.u))

    @property
    def u_max(self) -> float:
        return float(np.max(self.u))

    @property
    def sup_norm(self) -> float:
        return float(np.max(np.abs(self.u)))

    def distance(self, other: Solution) -> float:
        """
        ||u - other.u||_inf.
        """
        return float(np.max(np.abs(self.u - other.u)))

    def with_index(self, index: Optional[int]) -> Solution:
        return Solution(u=self.u, t=self.t, residual_norm=self.residual_norm,
                        compatibility_defect=self.compatibility_defect, u_mean=self.u_mean,
                        method=self.method, index=index, iterations=self.iterations)

    def __eq__(self, other):
        if not isinstance(other, Solution):
            return NotImplemented
        return self.t == other.t and np.array_equal(self.u, other.u)

    def __lt__(self, other):
        if not isinstance(other, Solution):
            return NotImplemented
        if self.u_mean != other.u_mean:
            return self.u_mean < other.u_mean
        return self.t < other.t

    __hash__ = None

    def __repr__(self) -> str:
        return (f"Solution(t={self.t:.6g}, mean={self.u_mean:.6g}, min={self.u_min:.6g}, max={self.u_max:.6g}, "
                f"residual={self.residual_norm:.2e}, index={self.index}, method={self.method.value})")


class SolveOptionsParams(TypedDict):
    tol_residual: NotRequired[float]
    max_iters: NotRequired[int]
    damping: NotRequired[float]
    deflation_shift: NotRequired[float]
    deflation_power: NotRequired[float]
    monotone_ceiling: NotRequired[float]
    multistart: NotRequired[int]
    dedup_tolerance: NotRequired[float]


class SolveOptions:
    """
    Options shared by the nonlinear solvers.

    Attributes
    ----------
    tol_residual : float
        Accepted ||F||_inf (default 1e-10).
    max_iters : int
        Iteration cap of Newton type methods (default 200); the monotone iteration
        gets ten times this cap.
    damping : float
        Backtracking factor of the line search, in (0, 1) (default 0.5).
    deflation_shift : float
        Shift of the deflation operator (default 1).
    deflation_power : float
        Power of the deflation operator (default 2).
    monotone_ceiling : float
        ||u_k||_inf above which the monotone iteration reports divergence (default 1e8).
    multistart : int
        Number of constant Newton starts (default 9).
    dedup_tolerance : float
        Two solutions closer than this in ||.||_inf are the same (default 1e-6).
    """
    __slots__ = ("tol_residual", "max_iters", "damping", "deflation_shift", "deflation_power",
                 "monotone_ceiling", "multistart", "dedup_tolerance")

    def __init__(self, **kwargs: Unpack[SolveOptionsParams]) -> None:
        self.tol_residual = float(kwargs.get("tol_residual", 1e-10))
        self.max_iters = int(kwargs.get("max_iters", 200))
        self.damping = float(kwargs.get("damping", 0.5))
        self.deflation_shift = float(kwargs.get("deflation_shift", 1.0))
        self.deflation_power = float(kwargs.get("deflation_power", 2.0))
        self.monotone_ceiling = float(kwargs.get("monotone_ceiling", 1e8))
        self.multistart = int(kwargs.get("multistart", 9))
        self.dedup_tolerance = float(kwargs.get("dedup_tolerance", 1e-6))
        if not self.tol_residual > 0.0:
            raise ValueError(f"tol_residual must be positive, got {self.tol_residual}")
        if not 0.0 < self.damping < 1.0:
            raise ValueError(f"damping must lie in (0, 1), got {self.damping}")
        if self.max_iters < 1 or self.multistart < 1:
            raise ValueError("max_iters and multistart must be >= 1")

    def as_dict(self) -> dict:
        return {name: getattr(self, name) for name in self.__slots__}
