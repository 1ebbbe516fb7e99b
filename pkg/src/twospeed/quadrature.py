"""Quadrature weights shared by the node- and cell-based function spaces."""

import numpy as np


def trapezoid_weights(npoints: int, spacing: float) -> np.ndarray:
    """Composite trapezoid weights for ``npoints`` uniformly spaced nodes."""
    if npoints < 2:
        raise ValueError("trapezoid rule needs at least two nodes")
    w = np.full(npoints, spacing)
    w[0] = 0.5 * spacing
    w[-1] = 0.5 * spacing
    return w


def midpoint_weights(ncells: int, spacing: float) -> np.ndarray:
    """Midpoint weights for ``ncells`` uniform cells (one value per cell)."""
    if ncells < 1:
        raise ValueError("midpoint rule needs at least one cell")
    return np.full(ncells, spacing)
