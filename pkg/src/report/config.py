#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
Flat sectioned key-value configuration files and the embedded models.

File format::

    # comment
    mesh.n_cells = 400
    problem.alpha = 0.5
    forcing.phi = table(-1:0, 0:1, 1:0)

Keys must be ``section.key``; a repeated key is an error. `load_run_config` applies, in
this order, an embedded model, a file, and command line overrides.
"""

import logging
from logging import Logger
from pathlib import Path

from src.data_model.run_config import RunConfig
from src.exceptions import ConfigError

from typing import Any
from typing import Dict
from typing import Optional
from typing import Tuple

BUILTIN_MODELS: Dict[str, Dict[str, Any]] = {
    "pl11": {
        "model.name": "pl11",
        "mesh.interval": "-0.5, 0.5",
        "mesh.n_cells": 400,
        "mesh.grading": 2.0,
        "mesh.radial_dimension": 1,
        "problem.alpha": 0.5,
        "nonlinearity.kind": "piecewise_linear",
        "nonlinearity.a": 1.0,
        "nonlinearity.b": 1.0,
        "forcing.phi": 1.0,
        "forcing.h": 0.0,
        "run.t": -1.0,
        "run.t_grid": "-2, -1, -0.5, -0.1, 0, 0.1, 0.5",
        "region.rho_plus": 0.5,
        "region.rho_minus": "auto",
        "region.R": 10.0,
        "branch.t_start": -2.0,
        "branch.step": 0.05,
        "branch.t_stop": 1.0,
        "check.t_degree": -1.0,
        "check.t_boundary": -2.0,
    },
    "smoothabs": {
        "model.name": "smoothabs",
        "mesh.interval": "-0.5, 0.5",
        "mesh.n_cells": 400,
        "mesh.grading": 2.0,
        "mesh.radial_dimension": 1,
        "problem.alpha": 0.5,
        "nonlinearity.kind": "smooth_abs",
        "forcing.phi": 1.0,
        "forcing.h": 0.0,
        "run.t": -1.0,
        "run.t_grid": "-3, 0, 0.5",
        "region.rho_plus": 0.5,
        "region.rho_minus": "auto",
        "region.R": 10.0,
        "branch.t_start": -3.0,
        "branch.step": 0.05,
        "branch.t_stop": 1.0,
        "check.t_degree": -1.0,
        "check.t_boundary": -2.0,
    },
}
"""
Embedded configurations reproducing every experiment with one command.
"""


def parse_config_text(text: str) -> Tuple[Dict[str, str], Dict[str, int]]:
    """
    Parse the flat key-value format.

    Returns
    -------
    tuple of dict
        (entries, line number of every key).

    Raises
    ------
    ConfigError
        On a line without ``=``, a key without section or a repeated key.
    """
    entries: Dict[str, str] = {}
    lines: Dict[str, int] = {}
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"expected 'section.key = value', got {raw.strip()!r}", line=number)
        key, value = (part.strip() for part in line.split("=", 1))
        if key.count(".") != 1 or not all(key.split(".")):
            raise ConfigError("keys must look like 'section.key'", line=number, field=key or None)
        if key in entries:
            raise ConfigError(f"repeated key (first on line {lines[key]})", line=number, field=key)
        if value == "":
            raise ConfigError("empty value", line=number, field=key)
        entries[key] = value
        lines[key] = number
    return entries, lines


def _merge(entries: Dict[str, Any], layer: Dict[str, Any]) -> None:
    # a t range set by a later layer replaces the grid of an earlier one
    if "run.t_range" in layer and "run.t_grid" not in layer:
        entries.pop("run.t_grid", None)
    entries.update(layer)


def load_run_config(model: Optional[str] = None, path: Optional[Path] = None,
                    overrides: Optional[Dict[str, Any]] = None, logger: Optional[Logger] = None) -> RunConfig:
    """
    Merge an embedded model, a configuration file and overrides into a RunConfig.

    Parameters
    ----------
    model : str, optional
        Name in `BUILTIN_MODELS`.
    path : Path, optional
        Configuration file.
    overrides : dict, optional
        Dotted keys set last (None values are ignored).
    logger : Logger, optional

    Raises
    ------
    ConfigError
        Unknown model, unreadable file, or any invalid entry.
    """
    logger = logger or logging.getLogger(__name__)
    entries: Dict[str, Any] = {}
    lines: Dict[str, int] = {}
    base_dir = None
    if model is not None:
        if model not in BUILTIN_MODELS:
            raise ConfigError(f"unknown model '{model}', choose from {sorted(BUILTIN_MODELS)}", field="model.name")
        entries.update(BUILTIN_MODELS[model])
        logger.debug(f"Loaded embedded model {model}")
    if path is not None:
        path = Path(path)
        try:
            text = path.read_text(encoding="utf-8")
        except OSError as e:
            raise ConfigError(f"cannot read configuration file {path}: {e}") from e
        file_entries, lines = parse_config_text(text)
        if "model.name" in file_entries and model is None and file_entries["model.name"] in BUILTIN_MODELS:
            entries.update(BUILTIN_MODELS[file_entries["model.name"]])
        _merge(entries, file_entries)
        base_dir = path.parent
        logger.debug(f"Loaded {len(file_entries)} entries from {path}")
    overrides = {k: v for k, v in (overrides or {}).items() if v is not None}
    _merge(entries, overrides)
    for key in overrides:
        lines.pop(key, None)
    if not entries:
        raise ConfigError("no model and no configuration file given")
    config = RunConfig.object_hook(entries, lines=lines, base_dir=base_dir)
    if config is None:
        raise ConfigError("configuration holds no 'section.key' entries")
    return config
