"""The weighted Hilbert-space structure built on a steady state.

States are complex pairs ``(p1, p2)`` sampled on a shared grid.  The
inner product weights each component by the reciprocal of the steady
profile,

    (p, q) = sum_i  int  p_i * conj(q_i) / p_i,inf  dx,

so that the squared norm of a perturbation is its quadratic relative
entropy.  Two concrete quadratures back the same algebra: trapezoid
weights on the node grid of an ODE steady state, and uniform weights on
the cell grid of an assembled generator.  All operations are pure; the
discrete identities (idempotence and self-adjointness of the
equilibrium projector) hold to rounding because every integral uses the
same weight vector.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ShapeError
from .quadrature import midpoint_weights, trapezoid_weights

__all__ = [
    "StateVector",
    "WeightedSpace",
    "inner",
    "norm",
    "total_mass",
    "project_equilibrium",
    "deflate_to_mean_zero",
]


@dataclass(frozen=True)
class StateVector:
    """Complex two-component state sampled on a grid."""

    x: np.ndarray
    p1: np.ndarray
    p2: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(self, "x", np.asarray(self.x, dtype=float))
        object.__setattr__(self, "p1", np.asarray(self.p1, dtype=complex))
        object.__setattr__(self, "p2", np.asarray(self.p2, dtype=complex))
        if len(self.p1) != len(self.x) or len(self.p2) != len(self.x):
            raise ShapeError("state components must match the grid")
        if not (np.all(np.isfinite(self.p1)) and np.all(np.isfinite(self.p2))):
            raise ShapeError("state contains non-finite entries")

    @property
    def stacked(self) -> np.ndarray:
        """Both components as one vector (p1 block then p2 block)."""
        return np.concatenate([self.p1, self.p2])

    @classmethod
    def from_stacked(cls, x: np.ndarray, vec: np.ndarray) -> "StateVector":
        m = len(x)
        if len(vec) != 2 * m:
            raise ShapeError("stacked vector length must be twice the grid size")
        return cls(x, vec[:m], vec[m:])


@dataclass(frozen=True)
class WeightedSpace:
    """Grid, quadrature weights and reciprocal-steady-state weights."""

    x: np.ndarray
    quad: np.ndarray
    steady1: np.ndarray
    steady2: np.ndarray

    def __post_init__(self) -> None:
        m = len(self.x)
        for name in ("quad", "steady1", "steady2"):
            if len(getattr(self, name)) != m:
                raise ShapeError(f"space array {name} does not match the grid")
        if min(self.steady1.min(), self.steady2.min()) <= 0.0:
            raise ShapeError("steady weights must be strictly positive")

    @classmethod
    def from_steady_state(cls, ss) -> "WeightedSpace":
        """Node-based space with trapezoid quadrature from a SteadyState."""
        n = len(ss.x) - 1
        return cls(ss.x, trapezoid_weights(n + 1, 1.0 / n), ss.p1, ss.p2)

    @classmethod
    def from_cells(cls, centers, h, steady1, steady2) -> "WeightedSpace":
        """Cell-based space with uniform (midpoint) quadrature."""
        return cls(
            np.asarray(centers, dtype=float),
            midpoint_weights(len(centers), h),
            np.asarray(steady1, dtype=float),
            np.asarray(steady2, dtype=float),
        )

    @property
    def w1(self) -> np.ndarray:
        """Reciprocal weights 1 / p1,inf."""
        return 1.0 / self.steady1

    @property
    def w2(self) -> np.ndarray:
        return 1.0 / self.steady2

    def steady_state_vector(self) -> StateVector:
        return StateVector(self.x, self.steady1, self.steady2)


def _check_grid(space: WeightedSpace, p: StateVector) -> None:
    if len(p.x) != len(space.x) or not np.array_equal(p.x, space.x):
        raise ShapeError("state grid does not match the space grid")


def inner(space: WeightedSpace, p: StateVector, q: StateVector) -> complex:
    """Weighted inner product, linear in ``p``, conjugate-linear in ``q``."""
    _check_grid(space, p)
    _check_grid(space, q)
    acc = space.quad * (p.p1 * np.conj(q.p1) / space.steady1)
    acc = acc + space.quad * (p.p2 * np.conj(q.p2) / space.steady2)
    return complex(acc.sum())


def norm(space: WeightedSpace, p: StateVector) -> float:
    """Weighted norm ``sqrt((p, p))``."""
    _check_grid(space, p)
    val = space.quad @ (np.abs(p.p1) ** 2 / space.steady1)
    val = val + space.quad @ (np.abs(p.p2) ** 2 / space.steady2)
    return float(np.sqrt(val))


def total_mass(space: WeightedSpace, p: StateVector) -> complex:
    """Quadrature of ``p1 + p2``; equals ``(p, p_inf)`` in this metric."""
    _check_grid(space, p)
    return complex(space.quad @ (p.p1 + p.p2))


def project_equilibrium(space: WeightedSpace, p: StateVector) -> StateVector:
    """Orthogonal projection onto the span of the steady state."""
    m = total_mass(space, p)
    return StateVector(space.x, m * space.steady1, m * space.steady2)


def deflate_to_mean_zero(space: WeightedSpace, p: StateVector) -> StateVector:
    """Remove the equilibrium component; the result has zero total mass."""
    m = total_mass(space, p)
    return StateVector(space.x, p.p1 - m * space.steady1, p.p2 - m * space.steady2)
