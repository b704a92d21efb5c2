#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
Exception hierarchy shared by the DAPL library and its command line programs.

The programs map these classes onto exit status codes (see ``src.apps.dapl``):

- ``ConfigError`` -> 2
- ``CheckFailure`` -> 3
- any other ``DAPLError`` -> 4
"""

from typing import Optional

import numpy as np


class DAPLError(Exception):
    """
    Base class of every error raised on purpose by the package.
    """
    pass


class ConfigError(DAPLError):
    """
    Invalid run configuration.

    Parameters
    ----------
    message : str
        Human readable description.
    line : int, optional
        1-based line of the offending entry in the configuration file.
    field : str, optional
        Dotted key of the offending entry, e.g. ``mesh.n_cells``.
    """

    def __init__(self, message: str, line: Optional[int] = None, field: Optional[str] = None) -> None:
        self.line = line
        self.field = field
        location = []
        if line is not None:
            location.append(f"line {line}")
        if field is not None:
            location.append(f"field '{field}'")
        prefix = f"[{', '.join(location)}] " if location else ""
        super().__init__(f"{prefix}{message}")


class MeshError(DAPLError, ValueError):
    """
    Mesh or cell arguments violating the mesh preconditions.
    """
    pass


class HypothesisError(DAPLError, ValueError):
    """
    Data violating the standing hypotheses: alpha range, (phi), or the certified
    constants of the nonlinearity.
    """
    pass


class LinearSolveError(DAPLError):
    """
    Factorization or solve of a linear system failed.
    """
    pass


class NonConvergenceError(DAPLError):
    """
    An iterative method stopped without meeting its tolerance.

    Parameters
    ----------
    reason : str
        Short description (``max_iters``, ``singular_jacobian``, ``line_search`` ...).
    iterate : numpy.ndarray, optional
        Last iterate reached.
    iterations : int
        Number of iterations performed.
    """

    def __init__(self, reason: str, iterate: Optional[np.ndarray] = None, iterations: int = 0) -> None:
        self.reason = reason
        self.iterate = iterate
        self.iterations = iterations
        super().__init__(f"{reason} after {iterations} iterations")


class DivergenceError(NonConvergenceError):
    """
    The monotone iteration exceeded its amplitude ceiling. Evidence of
    nonexistence at this parameter, consumed by the bracketing logic.
    """
    pass


class BracketError(DAPLError):
    """
    Bisection bracket with a wrong solvability pattern at its ends.
    """
    pass


class DegenerateIndexError(DAPLError):
    """
    A degree computation met a solution whose local index is 0.

    Parameters
    ----------
    position : int
        Position of the solution in the list handed to the degree computation.
    """

    def __init__(self, position: int) -> None:
        self.position = position
        super().__init__(f"solution #{position} has a degenerate local index")


class CheckFailure(DAPLError):
    """
    One or more hard items of the invariant suite failed.
    """
    pass
