#!/usr/bin/env python3
# -*- coding: utf-8 -*-

import logging

import numpy as np
import pytest

from src.data_model.mesh import build_mesh
from src.data_model.nonlinearity import Nonlinearity
from src.data_model.problem_spec import ProblemSpec
from src.data_model.solution import SolveOptions
from src.operators.weighted import assemble


"""
Configuration of the fixtures.

The two embedded models share Omega = (-0.5, 0.5), alpha = 0.5, phi = 1 and h = 0 on a graded
mesh of 400 cells; their discrete solutions at constant forcing are constants, so every
expected value below comes from the roots of f(c) + t = 0.
"""


@pytest.fixture(scope='session')
def mesh_400():
    return build_mesh((-0.5, 0.5), 400, 2.0)


@pytest.fixture(scope='session')
def pl11(mesh_400):
    """piecewise_linear(1, 1), the model with the corner fold at t = 0."""
    return ProblemSpec(mesh=mesh_400, alpha=0.5, nonlinearity=Nonlinearity.piecewise_linear(1.0, 1.0),
                       phi=1.0, h=0.0)


@pytest.fixture(scope='session')
def smoothabs(mesh_400):
    return ProblemSpec(mesh=mesh_400, alpha=0.5, nonlinearity=Nonlinearity.smooth_abs(), phi=1.0, h=0.0)


@pytest.fixture(scope='session')
def op_400(mesh_400):
    return assemble(mesh_400, 0.5)


@pytest.fixture(scope='session')
def unit_interval_op():
    """alpha = 0 on (0, 1) with 400 uniform cells."""
    return assemble(build_mesh((0.0, 1.0), 400, 1.0), 0.0)


@pytest.fixture
def opts():
    return SolveOptions()


@pytest.fixture
def logger():
    return logging.getLogger("test_dapl")


@pytest.fixture
def constant(op_400):
    def make(value: float) -> np.ndarray:
        return np.full(op_400.size, float(value))
    return make
