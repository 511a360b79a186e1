"""Continuously measured Gaussian wave packets.

Thin Python layer over the C++ library: envelope integration, closed-form
packet fields, Bohmian trajectories and the residual and Fourier checks.
"""

from ._core import *  # noqa: F401,F403
from ._core import Error, __doc__  # noqa: F401
