"""Simulation and analysis toolkit for non-linear stochastic pantograph
differential equations: semi-implicit theta-Euler integration on refined
proportional-delay meshes, Brownian-bridge path refinement, and empirical
stability/convergence-order estimation."""

from ._core import *  # noqa: F401,F403
from ._core import __version__  # noqa: F401
