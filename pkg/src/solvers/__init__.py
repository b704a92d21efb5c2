#!/usr/bin/env python3
# -*- coding: utf-8 -*-

import logging

TRACE_LOGGER_NAME = "src.solvers.trace"
"""
Logger receiving one tab-delimited row per solver iteration: method, t, iteration,
residual norm, step size. The programs attach a file handler to it with ``--trace``.
"""

trace_logger = logging.getLogger(TRACE_LOGGER_NAME)


def trace(method: str, t: float, iteration: int, residual: float, step: float) -> None:
    trace_logger.debug(f"{method}\t{t:.12e}\t{iteration}\t{residual:.6e}\t{step:.6e}")
