"""Hardcore-model toolkit: tree fixed points, moment exponents, rigorous
interval certification, random gadget graphs, exact partition functions,
broadcast reconstruction and the MAX-CUT reduction."""

__version__ = "0.1.0"

from .treegibbs import (ModelParams, TreeFixedPoints, critical_fugacity,
                        h_map, solve_fixed_points)

__all__ = [
    "ModelParams",
    "TreeFixedPoints",
    "critical_fugacity",
    "h_map",
    "solve_fixed_points",
    "__version__",
]
