#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
Autonomous scalar nonlinearities f with their certified growth constants.

This module defines:
- NonlinearityKind: the built-in families and the user table mode.
- NonlinearityParams: TypedDict describing initialization parameters.
- Nonlinearity: evaluation, one-sided slopes, kinks and the sampled certification
  of the growth hypotheses.
- CertificationReport: measured slacks of every certified inequality.

The constants are stored, never inferred:

- C_f : |f(u)| <= C_f (1 + |u|)
- C_1, C_2 : f(u) >= C_1 |u| - C_2
- C_3, C_4 : f(u) >= -C_3 u - C_4 with 0 < C_3 < C_f
"""

from __future__ import annotations  # Needed to allow returning the type of enclosing class PEP 563

import enum
import logging
from dataclasses import dataclass
from dataclasses import field
from logging import Logger

import numpy as np

from src.exceptions import HypothesisError

from typing import Dict
from typing import List
from typing import Optional
from typing import Tuple
from typing import TypedDict
from typing_extensions import Unpack
from typing_extensions import NotRequired

DEFAULT_U_CHECK = 1e3
CERTIFICATION_SLACK = 1e-9


class NonlinearityKind(enum.Enum):
    """
    Families of nonlinearities.

    Attributes
    ----------
    PIECEWISE_LINEAR : int
        f(u) = a u+ + b u-, with a, b > 0.
    SMOOTH_ABS : int
        f(u) = sqrt(1 + u^2) - 1.
    TABLE : int
        Piecewise-linear interpolation of user (u, f(u)) points with linear extrapolation.
    """
    PIECEWISE_LINEAR = 0
    SMOOTH_ABS = 1
    TABLE = 2


class NonlinearityParams(TypedDict):
    """
    Parameters accepted by the `Nonlinearity` constructor.

    kind : NonlinearityKind
        Family.
    c_f, c_1, c_2, c_3, c_4 : float
        Certified constants.
    a, b : float, optional
        Slopes of the piecewise-linear family.
    table_u, table_f : array_like, optional
        Increasing abscissae and values of the table mode (at least 2 points).
    u_check : float, optional
        Amplitude beyond which the sign of f(u)/u is checked (default 1e3).
    """
    kind: NonlinearityKind
    c_f: float
    c_1: float
    c_2: float
    c_3: float
    c_4: float
    a: NotRequired[float]
    b: NotRequired[float]
    table_u: NotRequired[np.ndarray]
    table_f: NotRequired[np.ndarray]
    u_check: NotRequired[float]


@dataclass
class CertificationReport:
    """
    Minimum slack of every certified inequality over the sampling grid.

    A negative entry below -1e-9 (scaled by 1 + |u|) is a violation.
    """
    slacks: Dict[str, float] = field(default_factory=dict)
    violations: List[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.violations


class Nonlinearity:
    """
    Scalar nonlinearity f with certified constants.

    Parameters
    ----------
    **kwargs : NonlinearityParams

    Examples
    --------
    >>> f = Nonlinearity.piecewise_linear(1.0, 1.0)
    >>> f.eval(np.array([-2.0, 3.0]))
    array([2., 3.])
    >>> f.c_3
    0.5
    """
    __slots__ = ("kind", "c_f", "c_1", "c_2", "c_3", "c_4", "a", "b", "table_u", "table_f", "u_check")

    def __init__(self, **kwargs: Unpack[NonlinearityParams]) -> None:
        self.kind: NonlinearityKind = kwargs["kind"]
        self.c_f = float(kwargs["c_f"])
        self.c_1 = float(kwargs["c_1"])
        self.c_2 = float(kwargs["c_2"])
        self.c_3 = float(kwargs["c_3"])
        self.c_4 = float(kwargs["c_4"])
        self.a = float(kwargs.get("a", 0.0))
        self.b = float(kwargs.get("b", 0.0))
        self.u_check = float(kwargs.get("u_check", DEFAULT_U_CHECK))
        self.table_u: Optional[np.ndarray] = None
        self.table_f: Optional[np.ndarray] = None

        if self.kind == NonlinearityKind.PIECEWISE_LINEAR and not (self.a > 0.0 and self.b > 0.0):
            raise HypothesisError(f"piecewise_linear needs a, b > 0, got a={self.a}, b={self.b}")
        if self.kind == NonlinearityKind.TABLE:
            table_u = np.asarray(kwargs.get("table_u"), dtype=float)
            table_f = np.asarray(kwargs.get("table_f"), dtype=float)
            if table_u.ndim != 1 or table_u.size < 2 or table_u.shape != table_f.shape:
                raise HypothesisError("a table nonlinearity needs matching u and f columns with >= 2 rows")
            if not np.all(np.diff(table_u) > 0.0):
                raise HypothesisError("table abscissae must be strictly increasing")
            self.table_u = table_u
            self.table_f = table_f

    @staticmethod
    def piecewise_linear(a: float, b: float) -> Nonlinearity:
        """
        f(u) = a u+ + b u- with C_f = max(a, b), C_1 = min(a, b), C_2 = 0, C_3 = b / 2, C_4 = 0.
        """
        return Nonlinearity(kind=NonlinearityKind.PIECEWISE_LINEAR, a=a, b=b,
                            c_f=max(a, b), c_1=min(a, b), c_2=0.0, c_3=0.5 * b, c_4=0.0)

    @staticmethod
    def smooth_abs() -> Nonlinearity:
        """
        f(u) = sqrt(1 + u^2) - 1 with C_f = 1, C_1 = 1, C_2 = 1, C_3 = 1/2, C_4 = 1.
        """
        return Nonlinearity(kind=NonlinearityKind.SMOOTH_ABS,
                            c_f=1.0, c_1=1.0, c_2=1.0, c_3=0.5, c_4=1.0)

    @staticmethod
    def from_table(table_u: np.ndarray, table_f: np.ndarray, constants: Dict[str, float],
                   u_check: float = DEFAULT_U_CHECK) -> Nonlinearity:
        """
        User table nonlinearity; `constants` must carry c_f, c_1, c_2, c_3 and c_4.
        """
        missing = [k for k in ("c_f", "c_1", "c_2", "c_3", "c_4") if k not in constants]
        if missing:
            raise HypothesisError(f"table nonlinearity misses certified constants {missing}")
        return Nonlinearity(kind=NonlinearityKind.TABLE, table_u=table_u, table_f=table_f,
                            u_check=u_check, **{k: constants[k] for k in ("c_f", "c_1", "c_2", "c_3", "c_4")})

    @property
    def kinks(self) -> Tuple[float, ...]:
        """
        Points where f is not differentiable.
        """
        if self.kind == NonlinearityKind.PIECEWISE_LINEAR:
            return (0.0,)
        if self.kind == NonlinearityKind.TABLE:
            return tuple(float(u) for u in self.table_u)
        return ()

    def _table_end_slopes(self) -> Tuple[float, float]:
        left = (self.table_f[1] - self.table_f[0]) / (self.table_u[1] - self.table_u[0])
        right = (self.table_f[-1] - self.table_f[-2]) / (self.table_u[-1] - self.table_u[-2])
        return left, right

    def eval(self, u: np.ndarray) -> np.ndarray:
        """
        Componentwise f(u).
        """
        u = np.asarray(u, dtype=float)
        if self.kind == NonlinearityKind.PIECEWISE_LINEAR:
            return self.a * np.maximum(u, 0.0) + self.b * np.maximum(-u, 0.0)
        if self.kind == NonlinearityKind.SMOOTH_ABS:
            # u^2 / (sqrt(1 + u^2) + 1) avoids the cancellation of sqrt(1 + u^2) - 1 near 0
            return u * u / (np.sqrt(1.0 + u * u) + 1.0)
        left, right = self._table_end_slopes()
        values = np.interp(u, self.table_u, self.table_f)
        below = u < self.table_u[0]
        above = u > self.table_u[-1]
        values = np.where(below, self.table_f[0] + left * (u - self.table_u[0]), values)
        return np.where(above, self.table_f[-1] + right * (u - self.table_u[-1]), values)

    def slope(self, u: np.ndarray, side: str = "right") -> np.ndarray:
        """
        Componentwise one-sided derivative f'(u); the right derivative by convention.

        Parameters
        ----------
        u : numpy.ndarray
        side : {'right', 'left'}
        """
        if side not in ("right", "left"):
            raise ValueError(f"side must be 'right' or 'left', got {side!r}")
        u = np.asarray(u, dtype=float)
        if self.kind == NonlinearityKind.PIECEWISE_LINEAR:
            positive = u >= 0.0 if side == "right" else u > 0.0
            return np.where(positive, self.a, -self.b)
        if self.kind == NonlinearityKind.SMOOTH_ABS:
            return u / np.sqrt(1.0 + u * u)
        left, right = self._table_end_slopes()
        slopes = np.concatenate(([left], np.diff(self.table_f) / np.diff(self.table_u), [right]))
        where = np.searchsorted(self.table_u, u, side="right" if side == "right" else "left")
        return slopes[where]

    def certify(self, logger: Optional[Logger] = None) -> CertificationReport:
        """
        Sampled certification of the growth hypotheses on a logarithmic grid in [-1e6, 1e6].

        Checks the three inequalities behind C_f, (C_1, C_2) and (C_3, C_4), the ordering
        0 < C_3 < C_f, the sign of f(u)/u beyond u_check, and f' >= -C_f (which makes
        f(u) + C_f u nondecreasing).

        Returns
        -------
        CertificationReport

        Raises
        ------
        HypothesisError
            If any check fails.
        """
        logger = logger or logging.getLogger(__name__)
        magnitudes = np.logspace(-6.0, 6.0, 241)
        u = np.concatenate((-magnitudes[::-1], [0.0], magnitudes))
        if self.kind == NonlinearityKind.TABLE:
            u = np.union1d(u, self.table_u)
        f = self.eval(u)
        scale = CERTIFICATION_SLACK * (1.0 + np.abs(u))
        report = CertificationReport()

        slacks = {
            "linear_growth": self.c_f * (1.0 + np.abs(u)) - np.abs(f),
            "coercive_bound": f - (self.c_1 * np.abs(u) - self.c_2),
            "lower_linear_bound": f - (-self.c_3 * u - self.c_4),
            "monotone_shift": np.concatenate((self.slope(u, "right"), self.slope(u, "left"))) + self.c_f,
        }
        for name, values in slacks.items():
            report.slacks[name] = float(np.min(values))
            tolerance = np.concatenate((scale, scale)) if name == "monotone_shift" else scale
            if np.any(values < -tolerance):
                report.violations.append(name)

        if not self.c_f > 0.0:
            report.violations.append("c_f_positive")
        if not self.c_1 > 0.0:
            report.violations.append("c_1_positive")
        if not 0.0 < self.c_3 < self.c_f:
            report.violations.append("c_3_range")

        negative_side = u[u <= -self.u_check]
        positive_side = u[u >= self.u_check]
        report.slacks["negative_ratio"] = float(np.max(self.eval(negative_side) / negative_side))
        report.slacks["positive_ratio"] = float(np.min(self.eval(positive_side) / positive_side))
        if not report.slacks["negative_ratio"] < 0.0:
            report.violations.append("negative_ratio")
        if not report.slacks["positive_ratio"] > 0.0:
            report.violations.append("positive_ratio")

        if report.violations:
            logger.error(f"Nonlinearity {self.kind.name} fails certification: {report.violations}")
            raise HypothesisError(f"nonlinearity {self.kind.name} violates {', '.join(report.violations)}")
        logger.debug(f"Nonlinearity {self.kind.name} certified, slacks {report.slacks}")
        return report

    def __repr__(self) -> str:
        return (f"Nonlinearity({self.kind.name}, C_f={self.c_f}, C_1={self.c_1}, C_2={self.c_2}, "
                f"C_3={self.c_3}, C_4={self.c_4})")
