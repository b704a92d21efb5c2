#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
dapl: command line front end of the degenerate Ambrosetti-Prodi laboratory.

Subcommands: solve, sweep, branch, bracket, index, check, mms. Each one writes its
tables, a summary.kv and (when it has something to draw) a plot.gp under --out.

Exit status: 0 success, 1 unexpected error, 2 configuration error, 3 check failure,
4 numerical failure.
"""

import argparse
import logging
import sys
from logging.handlers import RotatingFileHandler
from pathlib import Path

from src.continuation.arclength import trace_branch
from src.continuation.bracket import bracket_t_star
from src.continuation.bracket import t_star_lower_estimate
from src.continuation.index import degree_over_region
from src.data_model.region import RegionPart
from src.data_model.run_config import AUTO
from src.data_model.run_config import RunConfig
from src.data_model.run_config import parse_t_range
from src.exceptions import CheckFailure
from src.exceptions import ConfigError
from src.exceptions import DAPLError
from src.operators.manufactured import mms_study
from src.operators.nonlinear import a_priori_rho_minus
from src.operators.nonlinear import necessary_upper_bound
from src.operators.weighted import assemble
from src.operators.weighted import smallest_nonzero_eigenvalue
from src.report.checks import CheckSuite
from src.report.config import load_run_config
from src.report.plot import branch_script
from src.report.plot import mms_script
from src.report.plot import sweep_script
from src.report.plot import write_script
from src.report.summary import RunReport
from src.report.sweep import max_sup_norm_by_interval
from src.report.sweep import run_sweep
from src.report.sweep import t_lower_star_estimate
from src.report.tables import solutions_table
from src.report.tables import write_table
from src.solvers import TRACE_LOGGER_NAME
from src.solvers.enumerate import find_all_solutions
from src.solvers.monotone import monotone_iterate

EXIT_OK = 0
EXIT_UNEXPECTED = 1
EXIT_CONFIG = 2
EXIT_CHECK = 3
EXIT_NUMERICAL = 4

COMMANDS = ("solve", "sweep", "branch", "bracket", "index", "check", "mms")


def _problem(config: RunConfig):
    spec = config.build_spec()
    return spec, assemble(spec.mesh, spec.alpha)


def cmd_solve(config: RunConfig, out: Path, logger: logging.Logger) -> RunReport:
    """
    Enumerate the solutions at run.t.
    """
    spec, op = _problem(config)
    t = config.t
    solutions = find_all_solutions(spec, op, t, opts=config.solve_options(), logger=logger)
    write_table(solutions_table(solutions, spec.mesh, config.probe), out / "solutions.tsv")
    bound = necessary_upper_bound(spec, op)
    report = RunReport("solve", config.echo())
    report.update("solutions", {"t": t, "count": len(solutions), "indices": [s.index for s in solutions],
                                "max_residual": max((s.residual_norm for s in solutions), default=None),
                                "max_defect": max((abs(s.compatibility_defect) for s in solutions), default=None),
                                "max_sup_norm": max((s.sup_norm for s in solutions), default=None)})
    report.update("necessary_bound", {"value": bound, "t_exceeds": t > bound})
    if t > bound:
        logger.info(f"t={t} exceeds the necessary bound {bound:.6g}: no solution can exist")
    return report


def cmd_sweep(config: RunConfig, out: Path, jobs: int, logger: logging.Logger) -> RunReport:
    """
    Solution counts over run.t_grid (or run.t_range).
    """
    spec, op = _problem(config)
    sweep = run_sweep(config, config.t_values(), jobs=jobs, logger=logger)
    write_table(sweep, out / "sweep.tsv")
    write_script(sweep_script("sweep.tsv", config.model_name), out / "plot.gp")
    report = RunReport("sweep", config.echo())
    report.update("sweep", {"t": list(sweep["t"]), "counts": [int(c) for c in sweep["count"]],
                            "errors": int((sweep["error"] != "").sum())})
    report.update("t_lower_star", {"sweep_estimate": t_lower_star_estimate(sweep),
                                   "certified_lower": t_star_lower_estimate(spec, op)})
    report.update("max_sup_norm", max_sup_norm_by_interval(sweep))
    report.add("necessary_bound.value", necessary_upper_bound(spec, op))
    return report


def _branch(config: RunConfig, spec, op, logger: logging.Logger):
    t_start = config.branch_t_start
    start = monotone_iterate(spec, op, t_start, opts=config.solve_options(), logger=logger)
    return trace_branch(spec, op, t_start, start, config.branch_step, config.branch_t_stop,
                        max_points=config.branch_max_points, theta=config.branch_theta,
                        opts=config.solve_options(), logger=logger)


def cmd_branch(config: RunConfig, out: Path, logger: logging.Logger) -> RunReport:
    """
    Trace the branch from the minimal solution at branch.t_start.
    """
    spec, op = _problem(config)
    branch = _branch(config, spec, op, logger)
    write_table(branch.to_table(), out / "branch.tsv")
    fold = None
    if branch.fold is not None:
        fold = (branch.fold[0], op.integrate(branch.fold[1]) / op.measure)
    write_script(branch_script("branch.tsv", fold, config.model_name), out / "plot.gp")
    report = RunReport("branch", config.echo())
    report.update("branch", {"points": len(branch), "status": branch.status.value,
                             "max_residual": max(p.residual_norm for p in branch.points)})
    report.update("fold", {"found": fold is not None, "t": fold[0] if fold else None,
                           "u_mean": fold[1] if fold else None})
    if fold is None:
        logger.info("No fold in the traced range")
    return report


def cmd_bracket(config: RunConfig, out: Path, logger: logging.Logger) -> RunReport:
    """
    Bisection bracket of t*, cross-checked with the fold of the traced branch.
    """
    spec, op = _problem(config)
    branch = _branch(config, spec, op, logger)
    fold_t = branch.fold[0] if branch.fold is not None else None
    bound = necessary_upper_bound(spec, op)
    bracket = bracket_t_star(spec, op, config.branch_t_start, bound + 1.0, config.bracket_tol,
                             opts=config.solve_options(), fold_t=fold_t, logger=logger)
    report = RunReport("bracket", config.echo())
    report.update("t_star", {"bracket_lo": bracket.t_lo, "bracket_hi": bracket.t_hi, "midpoint": bracket.midpoint,
                             "fold": fold_t, "fold_agrees": bracket.fold_agrees,
                             "evaluations": bracket.evaluations})
    report.add("necessary_bound.value", bound)
    return report


def cmd_index(config: RunConfig, out: Path, logger: logging.Logger) -> RunReport:
    """
    Local indices and degree table at run.t.
    """
    spec, op = _problem(config)
    t = config.t
    solutions = find_all_solutions(spec, op, t, opts=config.solve_options(), logger=logger)
    write_table(solutions_table(solutions, spec.mesh, config.probe), out / "solutions.tsv")
    minus = a_priori_rho_minus(spec, op, t) if config.rho_minus == AUTO else None
    region = config.region(minus)
    degree = degree_over_region(spec, op, region, t, solutions, logger=logger)
    report = RunReport("index", config.echo())
    report.update("region", {"rho_plus": region.rho_plus, "rho_minus": region.rho_minus, "R": region.R})
    report.update("degree", {part.value: degree.degree(part) for part in RegionPart})
    report.add("degree.caveat", degree.caveat)
    for membership in degree.memberships:
        report.update(f"solution.{membership['position']}", membership)
    report.add("spectrum.mu_1", smallest_nonzero_eigenvalue(op, logger=logger))
    return report


def cmd_check(config: RunConfig, out: Path, logger: logging.Logger) -> RunReport:
    """
    Invariant suite; raises CheckFailure after writing the summary when a hard item fails.
    """
    suite = CheckSuite(config, logger)
    items = suite.run()
    report = RunReport("check", config.echo())
    for number, item in enumerate(items):
        report.update(f"check.{number:02d}", {"name": item.name, "passed": item.passed,
                                               "hard": item.hard, "measured": item.measured})
    report.update("degree", suite.degree_table)
    report.add("check.passed", suite.passed)
    report.write(out / "summary.kv")
    if not suite.passed:
        failed = [item.name for item in items if item.hard and not item.passed]
        raise CheckFailure(f"failed checks: {', '.join(failed)}")
    return report


def cmd_mms(config: RunConfig, out: Path, logger: logging.Logger) -> RunReport:
    """
    Manufactured-solution convergence table.
    """
    table = mms_study(config.mms_alphas, config.mms_sizes, config.grading, logger=logger)
    write_table(table, out / "mms.tsv")
    write_script(mms_script("mms.tsv", config.mms_alphas), out / "plot.gp")
    report = RunReport("mms", config.echo())
    final = table.groupby("alpha")["rate"].last()
    report.update("mms.rate", {f"alpha_{alpha:g}": rate for alpha, rate in final.items()})
    return report


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dapl", description="Degenerate Ambrosetti-Prodi laboratory")
    parser.add_argument('command', choices=COMMANDS, help='Experiment to run')
    parser.add_argument('-c', '--config', type=Path, help='Flat key-value configuration file', required=False)
    parser.add_argument('-m', '--model', help='Embedded model (pl11, smoothabs)', required=False)
    parser.add_argument('-o', '--out', type=Path, help='Output directory (default run.out)', required=False)
    parser.add_argument('--t', type=float, help='Parameter value, overrides run.t', required=False)
    parser.add_argument('--t-range', help='Sweep grid LO:HI:STEP, overrides run.t_range', required=False)
    parser.add_argument('--seed', type=int, help='Seed of the randomized samplers', required=False)
    parser.add_argument('-j', '--jobs', type=int, default=1, help='Worker processes of the sweep')
    parser.add_argument('-v', '--verbose', action='store_true', help='Log at DEBUG level')
    parser.add_argument('-l', '--log-file', help='File to log progress or errors', required=False)
    parser.add_argument('--trace', type=Path, help='File receiving one delimited row per solver iteration',
                        required=False)
    parser.add_argument('--debug-dump', action='store_true', help='Write K and M in coordinate format under --out')
    return parser


def main(args: argparse.Namespace, logger: logging.Logger) -> int:
    """
    Run one subcommand.

    Returns
    -------
    int
        Exit status.
    """
    overrides = {"run.t": args.t, "run.seed": args.seed}
    if args.t_range is not None:
        try:
            parse_t_range(args.t_range)
        except ValueError as e:
            logger.error(f"Invalid --t-range: {e}")
            return EXIT_CONFIG
        overrides["run.t_range"] = args.t_range
    # noinspection PyBroadException
    try:
        config = load_run_config(args.model, args.config, overrides, logger=logger)
        out = args.out if args.out is not None else config.out
        out.mkdir(parents=True, exist_ok=True)
        logger.info(f"dapl {args.command} on model {config.model_name}, output in {out}")
        if args.debug_dump:
            _, op = _problem(config)
            op.dump_coordinates(out / "stiffness.tsv")
            logger.debug(f"Operator dumped to {out / 'stiffness.tsv'}")

        if args.command == "solve":
            report = cmd_solve(config, out, logger)
        elif args.command == "sweep":
            report = cmd_sweep(config, out, args.jobs, logger)
        elif args.command == "branch":
            report = cmd_branch(config, out, logger)
        elif args.command == "bracket":
            report = cmd_bracket(config, out, logger)
        elif args.command == "index":
            report = cmd_index(config, out, logger)
        elif args.command == "check":
            report = cmd_check(config, out, logger)
        else:
            report = cmd_mms(config, out, logger)
        report.write(out / "summary.kv")
    except ConfigError as e:
        logger.error(f"Configuration error: {e}")
        return EXIT_CONFIG
    except CheckFailure as e:
        logger.error(f"Check suite failed: {e}")
        return EXIT_CHECK
    except DAPLError as e:
        logger.error(f"Numerical failure: {type(e).__name__}: {e}")
        return EXIT_NUMERICAL
    except Exception:
        logger.exception(f"Unexpected error running {args.command}")
        return EXIT_UNEXPECTED
    logger.info(f"dapl {args.command} finished")
    return EXIT_OK


if __name__ == "__main__":  # pragma: no cover
    args_main = build_parser().parse_args()

    # Set up the Logger
    logger_main = logging.getLogger(__name__)
    level = logging.DEBUG if args_main.verbose else logging.INFO
    if args_main.log_file is not None:
        handler = RotatingFileHandler(args_main.log_file, mode='a', maxBytes=5*1024*1024, backupCount=15,
                                      encoding='utf-8', delay=False)
    else:
        handler = logging.StreamHandler()
    logging.basicConfig(
        format='%(asctime)s.%(msecs)03d [%(levelname)s] %(message)s',
        handlers=[handler],
        encoding='utf-8',
        level=level,
        datefmt="%Y-%m-%d %H:%M:%S"
    )

    # Solver traces go to their own file, one row per iteration
    if args_main.trace is not None:
        trace_handler = logging.FileHandler(args_main.trace, mode='w', encoding='utf-8')
        trace_handler.setFormatter(logging.Formatter('%(message)s'))
        trace_logger = logging.getLogger(TRACE_LOGGER_NAME)
        trace_logger.addHandler(trace_handler)
        trace_logger.setLevel(logging.DEBUG)
        trace_logger.propagate = False
        trace_handler.stream.write("method\tt\titeration\tresidual\tstep\n")

    sys.exit(main(args_main, logger_main))
