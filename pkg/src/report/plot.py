#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
gnuplot scripts rendering the tables written next to them.
"""

from pathlib import Path

from typing import Optional

_HEADER = """# generated by dapl; render with: gnuplot {name}
set terminal pngcairo size 900,600
set datafile separator "\\t"
set key autotitle columnhead
set grid
"""


def branch_script(table: str, fold: Optional[tuple] = None, title: str = "") -> str:
    """
    (t, u_mean) bifurcation diagram, with the fold marked when known.
    """
    script = _HEADER + f"""set output "branch.png"
set title "{title} branch"
set xlabel "t"
set ylabel "mean of u"
"""
    if fold is not None:
        script += f'set arrow from {fold[0]:.10g}, graph 0 to {fold[0]:.10g}, graph 1 nohead dashtype 2\n'
        script += f'set label "t* = {fold[0]:.6g}" at {fold[0]:.10g}, {fold[1]:.10g} offset 1,1\n'
    script += f'plot "{table}" using 2:3 with linespoints title "u_mean"\n'
    return script


def sweep_script(table: str, title: str = "") -> str:
    """
    Number of solutions against t.
    """
    return _HEADER + f"""set output "sweep.png"
set title "{title} solution count"
set xlabel "t"
set ylabel "solutions found"
set yrange [-0.5:*]
plot "{table}" using 1:2 with steps title "count", "" using 1:2 with points pt 7 notitle
"""


def mms_script(table: str, alphas: list) -> str:
    """
    log-log L2 error against mesh size, one curve per alpha.
    """
    names = " ".join(f"{x:g}" for x in alphas)
    return _HEADER + f"""set output "mms.png"
set title "manufactured solution convergence"
set logscale xy
set xlabel "n_cells"
set ylabel "L2 error"
plot for [a in "{names}"] "{table}" using ($1 == a+0 ? $2 : 1/0):4 with linespoints title "alpha=".a
"""


def write_script(script: str, path: Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(script.replace("{name}", path.name), encoding="utf-8")
    return path
