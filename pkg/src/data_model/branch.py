#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
Continuation output: points of a solution branch in (t, u) and the branch itself.
"""

from __future__ import annotations

import enum

import numpy as np
import pandas as pd

from src.data_model import NodalVector

from typing import List
from typing import Optional
from typing import Tuple
from typing import TypedDict
from typing_extensions import NotRequired
from typing_extensions import Unpack


class BranchStatus(enum.Enum):
    """
    Why `trace_branch` stopped.
    """
    COMPLETED = "completed"
    MAX_POINTS = "max_points"
    STALLED = "stalled"


class BranchPointParams(TypedDict):
    t: float
    u: NodalVector
    arclength: float
    index: int
    tangent_dt: float
    residual_norm: NotRequired[float]
    u_mean: NotRequired[float]


class BranchPoint:
    """
    Converged point of a branch.

    Attributes
    ----------
    t : float
    u : numpy.ndarray
        Read-only nodal values.
    arclength : float
        Accumulated (weighted) arclength from the start, >= 0.
    index : int
        Local index in {-1, 0, 1}.
    tangent_dt : float
        t component of the unit tangent; its sign is the sign of dt/ds.
    residual_norm : float
    u_mean : float
        M-weighted mean of u.
    """
    __slots__ = ("t", "u", "arclength", "index", "tangent_dt", "residual_norm", "u_mean")

    def __init__(self, **kwargs: Unpack[BranchPointParams]) -> None:
        self.t = float(kwargs["t"])
        self.u = np.array(kwargs["u"], dtype=float)
        self.u.setflags(write=False)
        self.arclength = float(kwargs["arclength"])
        self.index = int(kwargs["index"])
        self.tangent_dt = float(kwargs["tangent_dt"])
        self.residual_norm = float(kwargs.get("residual_norm", 0.0))
        self.u_mean = float(kwargs.get("u_mean", np.mean(self.u)))

    def __lt__(self, other):
        if not isinstance(other, BranchPoint):
            return NotImplemented
        return self.arclength < other.arclength

    def __repr__(self) -> str:
        return (f"BranchPoint(s={self.arclength:.6g}, t={self.t:.6g}, mean={self.u_mean:.6g}, "
                f"index={self.index}, dt={self.tangent_dt:+.3g})")


class Branch:
    """
    Ordered branch points with the fold, when one was detected.

    Parameters
    ----------
    points : list of BranchPoint
        Points with strictly increasing arclength.
    fold : (float, numpy.ndarray), optional
    status : BranchStatus

    Raises
    ------
    ValueError
        If the arclength is not strictly increasing.
    """
    __slots__ = ("points", "fold", "status")

    def __init__(self, points: List[BranchPoint], fold: Optional[Tuple[float, NodalVector]] = None,
                 status: BranchStatus = BranchStatus.COMPLETED) -> None:
        arclengths = np.array([p.arclength for p in points])
        if len(points) > 1 and np.any(np.diff(arclengths) <= 0.0):
            raise ValueError("branch arclength must be strictly increasing")
        self.points = list(points)
        self.fold = fold
        self.status = status

    def __len__(self) -> int:
        return len(self.points)

    @property
    def t_values(self) -> np.ndarray:
        return np.array([p.t for p in self.points])

    def to_table(self) -> pd.DataFrame:
        """
        One row per point: arclength, t, u_mean, u_min, u_max, index, tangent_dt.
        """
        return pd.DataFrame({
            "arclength": [p.arclength for p in self.points],
            "t": [p.t for p in self.points],
            "u_mean": [p.u_mean for p in self.points],
            "u_min": [float(np.min(p.u)) for p in self.points],
            "u_max": [float(np.max(p.u)) for p in self.points],
            "index": [p.index for p in self.points],
            "tangent_dt": [p.tangent_dt for p in self.points],
        })

    def __repr__(self) -> str:
        fold = f"{self.fold[0]:.6g}" if self.fold is not None else None
        return f"Branch(points={len(self.points)}, fold_t={fold}, status={self.status.value})"
