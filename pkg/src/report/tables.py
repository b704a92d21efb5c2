#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
Delimited text tables: solutions.tsv, sweep.tsv, branch.tsv and mms.tsv.

Tables carry a single header line and no timestamps, so identical inputs give
byte-identical files.
"""

from pathlib import Path

import numpy as np
import pandas as pd

from src.data_model.mesh import Mesh
from src.data_model.solution import Solution

from typing import List

FLOAT_FORMAT = "%.12e"

SOLUTION_COLUMNS = ["t", "u_min", "u_max", "u_at_probe", "u_mean", "residual_norm", "defect", "index", "method"]


def probe_node(mesh: Mesh, probe: float) -> int:
    """
    Node closest to the probe abscissa.
    """
    return int(np.argmin(np.abs(mesh.nodes - probe)))


def solutions_table(solutions: List[Solution], mesh: Mesh, probe: float = 0.0) -> pd.DataFrame:
    node = probe_node(mesh, probe)
    rows = [{
        "t": s.t,
        "u_min": s.u_min,
        "u_max": s.u_max,
        "u_at_probe": float(s.u[node]),
        "u_mean": s.u_mean,
        "residual_norm": s.residual_norm,
        "defect": s.compatibility_defect,
        "index": "" if s.index is None else int(s.index),
        "method": s.method.value,
    } for s in solutions]
    return pd.DataFrame(rows, columns=SOLUTION_COLUMNS)


def write_table(frame: pd.DataFrame, path: Path) -> Path:
    """
    Tab separated, one header line, floats as %.12e.
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(path, sep="\t", index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
    return path
