"""Type definitions shared by the canceller simulator.

This module provides the numpy array aliases used across the numeric utilities so
signatures stay readable.
"""

import numpy as np
import numpy.typing as npt

# Complex baseband samples, unit sqrt-milliwatt so |s|^2 is instantaneous power in mW
ComplexArray = npt.NDArray[np.complex128]
RealArray = npt.NDArray[np.float64]
BoolArray = npt.NDArray[np.bool_]

# A frequency band [f_lo, f_hi] in Hz, baseband relative to the carrier
Band = tuple[float, float]
