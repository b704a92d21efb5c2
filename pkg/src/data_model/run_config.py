#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
Run configuration: every input of a DAPL command, built from flat dotted keys.

The same code path serves the embedded models and the configuration files:
both produce a ``{"mesh.n_cells": "400", ...}`` dictionary that `RunConfig.object_hook`
turns into a validated instance.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np
import pandas as pd

from src.data_model.mesh import Mesh
from src.data_model.mesh import build_mesh
from src.data_model.nonlinearity import Nonlinearity
from src.data_model.nonlinearity import NonlinearityKind
from src.data_model.problem_spec import Forcing
from src.data_model.problem_spec import ProblemSpec
from src.data_model.region import RegionSpec
from src.data_model.solution import SolveOptions
from src.exceptions import ConfigError
from src.exceptions import DAPLError
from src.exceptions import HypothesisError

from typing import Any
from typing import Callable
from typing import Dict
from typing import List
from typing import Optional
from typing import Union

AUTO = "auto"

KNOWN_KEYS = (
    "model.name",
    "mesh.interval", "mesh.n_cells", "mesh.grading", "mesh.radial_dimension",
    "problem.alpha",
    "nonlinearity.kind", "nonlinearity.a", "nonlinearity.b", "nonlinearity.table",
    "nonlinearity.c_f", "nonlinearity.c_1", "nonlinearity.c_2", "nonlinearity.c_3", "nonlinearity.c_4",
    "nonlinearity.u_check",
    "forcing.phi", "forcing.h",
    "run.t", "run.t_range", "run.t_grid", "run.seed", "run.out", "run.probe",
    "solver.tol_residual", "solver.max_iters", "solver.damping", "solver.deflation_shift",
    "solver.deflation_power", "solver.monotone_ceiling", "solver.multistart", "solver.dedup_tolerance",
    "region.rho_plus", "region.rho_minus", "region.R",
    "branch.t_start", "branch.step", "branch.t_stop", "branch.max_points", "branch.theta",
    "check.t_degree", "check.t_boundary", "check.s_samples", "check.v_samples", "check.random_draws",
    "check.monotone_draws", "check.bracket_tol", "check.mms_alphas", "check.mms_sizes",
)


def _floats(text: str) -> List[float]:
    return [float(item) for item in str(text).replace(";", ",").split(",") if item.strip()]


def parse_t_range(text: str) -> np.ndarray:
    """
    ``LO:HI:STEP`` into the grid LO, LO + STEP, ... <= HI (HI included up to rounding).
    """
    parts = str(text).split(":")
    if len(parts) != 3:
        raise ValueError(f"expected LO:HI:STEP, got {text!r}")
    lo, hi, step = (float(p) for p in parts)
    if not step > 0.0 or hi < lo:
        raise ValueError(f"t range {text!r} must have LO <= HI and STEP > 0")
    count = int(np.floor((hi - lo) / step + 1e-9)) + 1
    return np.round(lo + step * np.arange(count), 12)


def parse_forcing(text: Any, base_dir: Optional[Path] = None) -> Forcing:
    """
    Forcing entry: a number, ``table(x:v, x:v, ...)`` linearly interpolated at the nodes,
    or ``file(PATH)`` holding two whitespace separated columns x and value.
    """
    if isinstance(text, (int, float)):
        return float(text)
    text = str(text).strip()
    if text.startswith("table(") and text.endswith(")"):
        pairs = [item.split(":") for item in text[len("table("):-1].split(",") if item.strip()]
        if any(len(p) != 2 for p in pairs) or len(pairs) < 2:
            raise ValueError(f"table forcing needs at least two x:value pairs, got {text!r}")
        xs, values = np.array([[float(x), float(v)] for x, v in pairs]).T
        return _interpolator(xs, values)
    if text.startswith("file(") and text.endswith(")"):
        path = Path(text[len("file("):-1].strip())
        if base_dir is not None and not path.is_absolute():
            path = base_dir / path
        frame = pd.read_csv(path, sep=r"\s+", comment="#", header=None)
        if frame.shape[1] < 2:
            raise ValueError(f"forcing file {path} needs two columns")
        return _interpolator(frame.iloc[:, 0].to_numpy(float), frame.iloc[:, 1].to_numpy(float))
    return float(text)


def _interpolator(xs: np.ndarray, values: np.ndarray) -> Callable[[np.ndarray], np.ndarray]:
    order = np.argsort(xs)
    xs, values = xs[order], values[order]

    def sample(x: np.ndarray) -> np.ndarray:
        return np.interp(x, xs, values)
    return sample


class RunConfig:
    """
    Validated inputs of a run.

    Attributes mirror the dotted keys: ``mesh.n_cells`` is ``n_cells`` and so on; the raw
    entries stay available in `entries` for the summary echo.
    """

    def __init__(self, entries: Dict[str, Any], lines: Optional[Dict[str, int]] = None,
                 base_dir: Optional[Path] = None) -> None:
        self.entries = dict(entries)
        self._lines = lines or {}
        self.base_dir = base_dir
        for key in self.entries:
            if key not in KNOWN_KEYS:
                raise self._error(key, "unknown key")

        self.model_name = str(self.entries.get("model.name", "custom"))
        self.interval = self._field("mesh.interval", lambda v: tuple(_floats(v)), "-0.5, 0.5")
        if len(self.interval) != 2:
            raise self._error("mesh.interval", "expected two numbers 'x_left, x_right'")
        self.n_cells = self._field("mesh.n_cells", int, 400)
        self.grading = self._field("mesh.grading", float, 2.0)
        self.radial_dimension = self._field("mesh.radial_dimension", int, 1)
        self.alpha = self._field("problem.alpha", float, 0.5)

        self.nonlinearity_kind = self._field("nonlinearity.kind", lambda v: NonlinearityKind[str(v).upper()],
                                             "piecewise_linear")
        self.phi = self._field("forcing.phi", lambda v: parse_forcing(v, base_dir), 1.0)
        self.h = self._field("forcing.h", lambda v: parse_forcing(v, base_dir), 0.0)

        self.t = self._field("run.t", float, -1.0)
        self.t_grid = None
        if "run.t_grid" in self.entries:
            self.t_grid = self._field("run.t_grid", lambda v: np.array(_floats(v)), None)
        elif "run.t_range" in self.entries:
            self.t_grid = self._field("run.t_range", parse_t_range, None)
        if self.t_grid is not None and (len(self.t_grid) == 0 or np.any(np.diff(self.t_grid) <= 0.0)):
            raise self._error("run.t_grid" if "run.t_grid" in self.entries else "run.t_range",
                              "the t grid must be nonempty and increasing")
        self.seed = self._field("run.seed", int, 0)
        self.out = Path(str(self.entries.get("run.out", "out")))
        self.probe = self._field("run.probe", float, 0.0)

        self.rho_plus = self._field("region.rho_plus", float, 0.5)
        self.rho_minus = self._field("region.rho_minus", lambda v: AUTO if str(v).strip() == AUTO else float(v), AUTO)
        self.R = self._field("region.R", float, 10.0)

        self.branch_t_start = self._field("branch.t_start", float, -2.0)
        self.branch_step = self._field("branch.step", float, 0.05)
        self.branch_t_stop = self._field("branch.t_stop", float, 1.0)
        self.branch_max_points = self._field("branch.max_points", int, 500)
        self.branch_theta = self._field("branch.theta", float, 0.75)

        self.t_degree = self._field("check.t_degree", float, -1.0)
        self.t_boundary = self._field("check.t_boundary", float, -2.0)
        self.s_samples = self._field("check.s_samples", int, 11)
        self.v_samples = self._field("check.v_samples", int, 200)
        self.random_draws = self._field("check.random_draws", int, 1000)
        self.monotone_draws = self._field("check.monotone_draws", int, 50)
        self.bracket_tol = self._field("check.bracket_tol", float, 1e-4)
        self.mms_alphas = self._field("check.mms_alphas", _floats, "0, 0.5, 1.0, 1.5")
        self.mms_sizes = self._field("check.mms_sizes", lambda v: [int(x) for x in _floats(v)], "100, 200, 400, 800")

        # fail at load time on anything the problem objects reject
        try:
            self.solve_options()
            self.build_spec()
        except ConfigError:
            raise
        except (DAPLError, ValueError) as e:
            raise ConfigError(str(e)) from e

    def _error(self, key: str, message: str) -> ConfigError:
        return ConfigError(message, line=self._lines.get(key), field=key)

    def _field(self, key: str, convert: Callable[[Any], Any], default: Any) -> Any:
        raw = self.entries.get(key, default)
        if raw is None:
            return None
        try:
            return convert(raw)
        except (ValueError, KeyError, TypeError, OSError) as e:
            raise self._error(key, f"cannot read {raw!r}: {e}") from e

    @staticmethod
    def object_hook(dct: Dict[str, Any], lines: Optional[Dict[str, int]] = None,
                    base_dir: Optional[Path] = None) -> Union[RunConfig, None]:
        """
        Build a RunConfig from a flat dictionary of dotted keys.

        Parameters
        ----------
        dct : dict
            Entries such as ``{"mesh.n_cells": 400, "problem.alpha": 0.5}``.
        lines : dict, optional
            Line number of every key, used in error messages.
        base_dir : Path, optional
            Directory against which ``file(...)`` forcing entries are resolved.

        Returns
        -------
        RunConfig or None
            None when the dictionary does not look like a run configuration (no dotted key).

        Raises
        ------
        ConfigError
            On unknown keys, unreadable values or data violating the problem hypotheses.

        Examples
        --------
        >>> RunConfig.object_hook({"model.name": "pl11", "nonlinearity.kind": "piecewise_linear"})
        """
        if not any("." in str(k) for k in dct):
            return None
        return RunConfig(dct, lines=lines, base_dir=base_dir)

    def with_entries(self, **overrides: Any) -> RunConfig:
        """
        Copy with some dotted entries replaced; keys use ``__`` for the dot (``run__t=0.5``).
        """
        entries = dict(self.entries)
        entries.update({k.replace("__", "."): v for k, v in overrides.items()})
        return RunConfig(entries, lines=self._lines, base_dir=self.base_dir)

    def build_mesh(self) -> Mesh:
        return build_mesh(self.interval, self.n_cells, self.grading, self.radial_dimension)

    def build_nonlinearity(self) -> Nonlinearity:
        """
        The configured f, certified against its declared constants.

        Raises
        ------
        ConfigError
            If the entries do not describe an f or the sampled certification fails.
        """
        try:
            f = self._uncertified_nonlinearity()
            f.certify()
        except HypothesisError as e:
            raise self._error("nonlinearity.kind", f"invalid nonlinearity: {e}") from e
        return f

    def _uncertified_nonlinearity(self) -> Nonlinearity:
        u_check = self._field("nonlinearity.u_check", float, 1e3)
        if self.nonlinearity_kind == NonlinearityKind.PIECEWISE_LINEAR:
            a = self._field("nonlinearity.a", float, 1.0)
            b = self._field("nonlinearity.b", float, 1.0)
            f = Nonlinearity.piecewise_linear(a, b)
            f.u_check = u_check
            return f
        if self.nonlinearity_kind == NonlinearityKind.SMOOTH_ABS:
            f = Nonlinearity.smooth_abs()
            f.u_check = u_check
            return f
        if "nonlinearity.table" not in self.entries:
            raise self._error("nonlinearity.table", "table nonlinearity without 'nonlinearity.table'")
        pairs = self._field("nonlinearity.table", lambda v: [p.split(":") for p in str(v).split(",") if p.strip()], None)
        try:
            table = np.array([[float(u), float(value)] for u, value in pairs])
        except ValueError as e:
            raise self._error("nonlinearity.table", f"expected u:f pairs: {e}") from e
        constants = {}
        for name in ("c_f", "c_1", "c_2", "c_3", "c_4"):
            key = f"nonlinearity.{name}"
            if key not in self.entries:
                raise self._error(key, "table nonlinearities must ship their certified constants")
            constants[name] = self._field(key, float, None)
        return Nonlinearity.from_table(table[:, 0], table[:, 1], constants, u_check=u_check)

    def build_spec(self, mesh: Optional[Mesh] = None) -> ProblemSpec:
        return ProblemSpec(mesh=mesh or self.build_mesh(), alpha=self.alpha,
                           nonlinearity=self.build_nonlinearity(), phi=self.phi, h=self.h)

    def solve_options(self) -> SolveOptions:
        options = {}
        for key in KNOWN_KEYS:
            if key.startswith("solver.") and key in self.entries:
                name = key[len("solver."):]
                options[name] = self._field(key, float, None)
        for name in ("max_iters", "multistart"):
            if name in options:
                options[name] = int(options[name])
        return SolveOptions(**options)

    def region(self, rho_minus: Optional[float] = None) -> RegionSpec:
        """
        RegionSpec with the configured caps; `rho_minus` replaces an ``auto`` entry.
        """
        minus = self.rho_minus if self.rho_minus != AUTO else rho_minus
        if minus is None:
            raise self._error("region.rho_minus", "an 'auto' cap needs the computed value")
        try:
            return RegionSpec(rho_plus=self.rho_plus, rho_minus=minus, R=self.R)
        except ValueError as e:
            raise self._error("region.R", str(e)) from e

    def t_values(self) -> np.ndarray:
        return self.t_grid if self.t_grid is not None else np.array([self.t])

    def echo(self) -> Dict[str, str]:
        """
        Entries as strings, sorted by key, for the run summary.
        """
        return {key: str(self.entries[key]) for key in sorted(self.entries)}

    def __repr__(self) -> str:
        return f"RunConfig(model={self.model_name}, entries={len(self.entries)})"
