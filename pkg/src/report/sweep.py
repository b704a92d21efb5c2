#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
Solution counts over a grid of t, distributed over a process pool.

Workers rebuild mesh, operator and problem from the configuration entries, so nothing
but plain data crosses the process boundary; rows are merged sorted by t.
"""

import logging
from concurrent.futures import ProcessPoolExecutor
from logging import Logger
from pathlib import Path

import numpy as np
import pandas as pd

from src.data_model.run_config import RunConfig
from src.exceptions import DAPLError
from src.operators.weighted import assemble
from src.solvers.enumerate import find_all_solutions

from typing import Any
from typing import Dict
from typing import Iterable
from typing import Optional

SWEEP_COLUMNS = ["t", "count", "u_mean_min", "u_mean_max", "max_sup_norm", "max_defect", "indices", "error"]


def sweep_point(entries: Dict[str, Any], base_dir: Optional[Path], t: float) -> Dict[str, Any]:
    """
    Enumerate the solutions at one t; solver errors are recorded in the row.
    """
    logger = logging.getLogger(__name__)
    config = RunConfig(entries, base_dir=base_dir)
    spec = config.build_spec()
    op = assemble(spec.mesh, spec.alpha)
    row = {"t": float(t), "count": 0, "u_mean_min": np.nan, "u_mean_max": np.nan, "max_sup_norm": np.nan,
           "max_defect": np.nan, "indices": "", "error": ""}
    try:
        solutions = find_all_solutions(spec, op, float(t), opts=config.solve_options(), logger=logger)
    except DAPLError as e:
        row["error"] = f"{type(e).__name__}: {e}"
        return row
    row["count"] = len(solutions)
    if solutions:
        row["u_mean_min"] = min(s.u_mean for s in solutions)
        row["u_mean_max"] = max(s.u_mean for s in solutions)
        row["max_sup_norm"] = max(s.sup_norm for s in solutions)
        row["max_defect"] = max(abs(s.compatibility_defect) for s in solutions)
        row["indices"] = " ".join(f"{s.index:+d}" for s in solutions)
    return row


def run_sweep(config: RunConfig, t_grid: Iterable[float], jobs: int = 1,
              logger: Optional[Logger] = None) -> pd.DataFrame:
    """
    Sweep table, one row per t in increasing order.

    Parameters
    ----------
    config : RunConfig
    t_grid : iterable of float
        Nonempty, increasing.
    jobs : int
        Worker processes; 1 runs in the calling process.
    logger : Logger, optional
    """
    logger = logger or logging.getLogger(__name__)
    t_grid = [float(t) for t in t_grid]
    if not t_grid or np.any(np.diff(t_grid) <= 0.0):
        raise ValueError("the t grid must be nonempty and increasing")
    if jobs <= 1:
        rows = [sweep_point(config.entries, config.base_dir, t) for t in t_grid]
    else:
        with ProcessPoolExecutor(max_workers=jobs) as executor:
            rows = list(executor.map(sweep_point, [config.entries] * len(t_grid),
                                     [config.base_dir] * len(t_grid), t_grid))
    for row in rows:
        message = f"t={row['t']:g}: {row['count']} solution(s)"
        if row["error"]:
            logger.warning(f"{message}, {row['error']}")
        else:
            logger.info(message)
    return pd.DataFrame(sorted(rows, key=lambda r: r["t"]), columns=SWEEP_COLUMNS)


def t_lower_star_estimate(sweep: pd.DataFrame) -> Optional[float]:
    """
    Sweep estimate of t_*: the largest grid t with at least two distinct solutions.

    The multiplicity set is an interval (-inf, t_*] up to the fold, so its right end is the
    quantity to estimate. The grid value is a lower estimate, off by at most one grid step;
    `t_star_lower_estimate` gives the certified value from the a priori caps.

    Returns
    -------
    float or None
        None when no grid point has two solutions.
    """
    multiple = sweep.loc[sweep["count"] >= 2, "t"]
    return float(multiple.max()) if len(multiple) else None


def max_sup_norm_by_interval(sweep: pd.DataFrame) -> Dict[str, float]:
    """
    Observed max ||u||_inf on each interval between consecutive grid points with solutions.
    """
    result = {}
    solved = sweep.loc[sweep["count"] > 0]
    for (t0, m0), (t1, m1) in zip(solved[["t", "max_sup_norm"]].to_numpy()[:-1],
                                  solved[["t", "max_sup_norm"]].to_numpy()[1:]):
        result[f"[{t0:g}, {t1:g}]"] = float(max(m0, m1))
    if len(solved) == 1:
        result[f"[{solved['t'].iloc[0]:g}]"] = float(solved["max_sup_norm"].iloc[0])
    return result
