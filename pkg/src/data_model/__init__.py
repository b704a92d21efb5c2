#!/usr/bin/env python3
# -*- coding: utf-8 -*-

import numpy as np
from numpy.typing import NDArray

NodalVector = NDArray[np.float64]
"""
Values of a continuous piecewise-linear function, one entry per mesh node.
"""

ALPHA_UPPER = 2.0
"""
Exclusive upper bound of the weight exponent alpha.
"""
