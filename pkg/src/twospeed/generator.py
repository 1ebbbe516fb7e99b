"""Mass-conservative upwind finite-volume discretisation of the generator.

The semigroup generator acts on stacked cell averages (the ``p1`` block
followed by the ``p2`` block) of a uniform grid of ``n`` cells.  The
transport part uses first-order upwind fluxes with the face ``x = 1``
identified with the face ``x = 0`` in the flux variable, which is the
discrete form of the flux-periodic boundary coupling; the reaction part
exchanges mass between the two components cellwise at rate
``sigma(x_k)``.  Every column of the matrix sums to zero (telescoping
conservative fluxes plus antisymmetric reaction), so the discrete total
mass is conserved exactly.

First order is a deliberate choice: the resulting matrix has
non-negative off-diagonal entries and a strictly positive null vector,
which makes the discrete quadratic form dissipative in the metric
weighted by that null vector - the structural property every diagnostic
downstream relies on.  Accuracy is recovered through grid-refinement
studies, not scheme order.

The canonical discrete steady state is the matrix's own null vector
(computed by inverse iteration), not the sampled ODE solution; the ODE
solution from :mod:`twospeed.steady_state` serves as an O(h)
cross-validation oracle and as the iteration's initial guess.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import (
    DefectiveGeneratorError,
    InvalidCrossSectionError,
    PositivityError,
    ShapeError,
    TwoSpeedError,
)
from .fields import DEGENERACY_FLOOR, FieldSpec, evaluate
from .space import StateVector, WeightedSpace
from . import steady_state as steady_mod

#: Relative tolerance deciding what counts as the null space.
RANK_TOL = 1e-8

#: Inverse-iteration controls for the null vector.
NULL_MAX_ITER = 50
NULL_CONV_TOL = 1e-13


@dataclass(frozen=True)
class Grid:
    """Uniform cell grid on the unit interval."""

    n: int

    def __post_init__(self) -> None:
        if self.n < 8:
            raise ValueError("grid needs at least 8 cells")

    @property
    def h(self) -> float:
        return 1.0 / self.n

    def centers(self) -> np.ndarray:
        return (np.arange(self.n) + 0.5) / self.n

    def faces(self) -> np.ndarray:
        return np.arange(self.n + 1) / self.n


@dataclass(frozen=True)
class GeneratorMatrix:
    """Assembled generator with its weighted-metric data.

    ``matrix`` is the dense ``2n x 2n`` real operator on stacked cell
    averages; ``steady`` is its positive null vector normalised to
    discrete total mass one, and the metric weights are the entrywise
    reciprocals of ``steady``.
    """

    grid: Grid
    matrix: np.ndarray
    face_b1: np.ndarray
    face_b2: np.ndarray
    sigma_cells: np.ndarray
    steady: np.ndarray

    @property
    def size(self) -> int:
        return 2 * self.grid.n

    @property
    def weights(self) -> np.ndarray:
        return 1.0 / self.steady

    @property
    def steady1(self) -> np.ndarray:
        return self.steady[: self.grid.n]

    @property
    def steady2(self) -> np.ndarray:
        return self.steady[self.grid.n :]

    def space(self) -> WeightedSpace:
        """Cell-based weighted space induced by the discrete steady state."""
        return WeightedSpace.from_cells(
            self.grid.centers(), self.grid.h, self.steady1, self.steady2
        )

    def state(self, p1, p2) -> StateVector:
        """Convenience constructor for a state on this grid's cells."""
        return StateVector(self.grid.centers(), p1, p2)

    def steady_state_vector(self) -> StateVector:
        return self.state(self.steady1, self.steady2)

    def max_speed(self) -> float:
        return float(max(np.abs(self.face_b1).max(), np.abs(self.face_b2).max()))

    def operator_scale(self) -> float:
        """Infinity norm of the matrix, used to scale rank tolerances."""
        return float(np.abs(self.matrix).sum(axis=1).max())


def _upwind_block(faces: np.ndarray, h: float) -> np.ndarray:
    """Upwind transport block ``-d(b p)/dx`` with flux-periodic seam.

    ``faces`` holds the speed at the ``n + 1`` face coordinates.  The
    upwind side at each interior face follows the sign of the speed
    there; the seam flux uses ``b(1)`` for rightward and ``b(0)`` for
    leftward transport, so a single-signed field reproduces the
    constant-sign upwinding exactly.
    """
    n = len(faces) - 1
    bp = np.maximum(faces, 0.0)
    bm = np.minimum(faces, 0.0)
    block = np.zeros((n, n))
    idx = np.arange(n)
    # Outflow through the cell's own faces.
    block[idx, idx] = (bm[:n] - bp[1:]) / h
    # Inflow from the left neighbour (rightward transport) ...
    block[idx[1:], idx[:-1]] = bp[1:n] / h
    block[0, n - 1] = bp[n] / h
    # ... and from the right neighbour (leftward transport).
    block[idx[:-1], idx[1:]] = -bm[1:n] / h
    block[n - 1, 0] = -bm[0] / h
    return block


def _ode_guess(b1: FieldSpec, b2: FieldSpec, sigma: FieldSpec, grid: Grid) -> np.ndarray:
    """Sampled ODE steady state averaged onto cells, or constants."""
    try:
        ss = steady_mod.solve_steady(b1, b2, sigma, grid.n, steps=max(256, grid.n))
    except TwoSpeedError:
        return np.ones(2 * grid.n)
    c1 = 0.5 * (ss.p1[:-1] + ss.p1[1:])
    c2 = 0.5 * (ss.p2[:-1] + ss.p2[1:])
    return np.concatenate([c1, c2])


def _null_vector(matrix: np.ndarray, guess: np.ndarray, h: float):
    """Positive-mass null vector by inverse iteration.

    The assembled matrix is singular by construction, so the factored
    system carries a tiny spectral shift that keeps the triangular
    solves finite; iterates are renormalised to discrete mass one and
    the loop stops when successive iterates agree to ``NULL_CONV_TOL``.
    Returns the vector together with the LU factorisation for reuse by
    the kernel-dimension probe.
    """
    m = matrix.shape[0]
    scale = np.abs(matrix).sum(axis=1).max()
    shift = 1e-13 * max(scale, 1.0)
    v = guess / (h * guess.sum())
    for _ in range(4):
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
            try:
                lu = scipy.linalg.lu_factor(matrix - shift * np.eye(m))
            except np.linalg.LinAlgError:
                shift *= 100.0
                continue
        trial = v.copy()
        for _ in range(NULL_MAX_ITER):
            with np.errstate(all="ignore"):
                new = scipy.linalg.lu_solve(lu, trial)
            if not np.all(np.isfinite(new)):
                break
            mass = h * new.sum()
            if mass == 0.0:
                break
            new = new / mass
            delta = np.abs(new - trial).max()
            trial = new
            if delta < NULL_CONV_TOL * max(np.abs(trial).max(), 1e-300):
                return trial, lu
        shift *= 100.0
    raise DefectiveGeneratorError("inverse iteration failed to converge to a null vector")


def _has_second_null_direction(matrix, lu, null_vec, tol_abs, probes: int = 8) -> bool:
    """Probe for a kernel direction orthogonal to the known null vector."""
    rng = np.random.default_rng(0)
    w = rng.standard_normal(matrix.shape[0])
    v = null_vec / np.linalg.norm(null_vec)
    for _ in range(probes):
        w = w - v * (v @ w)
        nw = np.linalg.norm(w)
        if nw == 0.0:
            return False
        w = w / nw
        if np.abs(matrix @ w).max() <= tol_abs:
            return True
        with np.errstate(all="ignore"):
            w = scipy.linalg.lu_solve(lu, w)
        if not np.all(np.isfinite(w)):
            return False
    return False


def assemble(
    b1: FieldSpec,
    b2: FieldSpec,
    sigma: FieldSpec,
    grid: Grid,
    floor: float = DEGENERACY_FLOOR,
    rank_tol: float = RANK_TOL,
) -> GeneratorMatrix:
    """Assemble the upwind generator and its discrete steady state.

    Admissibility of the velocity fields is not enforced here (the CLI
    gates on it; the library allows deliberately degenerate studies),
    but the cross-section must be non-negative at the cell centers and
    the null space must be simple and positive.

    Raises
    ------
    InvalidCrossSectionError
        If ``sigma`` is negative beyond ``floor`` at a cell center.
    DefectiveGeneratorError
        If the null space is empty-to-tolerance or has dimension >= 2.
    PositivityError
        If the null vector is not entrywise positive.
    """
    faces = grid.faces()
    centers = grid.centers()
    f1 = np.asarray(evaluate(b1, faces))
    f2 = np.asarray(evaluate(b2, faces))
    sg = np.asarray(evaluate(sigma, centers))
    if sg.min() < -floor:
        k = int(np.argmin(sg))
        raise InvalidCrossSectionError(
            f"cross-section is negative at cell center {centers[k]:.6f}: {sg[k]:.3e}"
        )
    sg = np.maximum(sg, 0.0)

    n = grid.n
    matrix = np.zeros((2 * n, 2 * n))
    matrix[:n, :n] = _upwind_block(f1, grid.h)
    matrix[n:, n:] = _upwind_block(f2, grid.h)
    idx = np.arange(n)
    matrix[idx, idx] -= sg
    matrix[n + idx, idx] += sg
    matrix[n + idx, n + idx] -= sg
    matrix[idx, n + idx] += sg

    guess = _ode_guess(b1, b2, sigma, grid)
    vec, lu = _null_vector(matrix, guess, grid.h)

    scale = np.abs(matrix).sum(axis=1).max()
    tol_abs = rank_tol * max(scale, 1.0) * max(np.abs(vec).max(), 1e-300)
    resid = np.abs(matrix @ vec).max()
    if resid > tol_abs:
        raise DefectiveGeneratorError(
            f"candidate null vector has residual {resid:.3e} > {tol_abs:.3e}"
        )
    if _has_second_null_direction(matrix, lu, vec, rank_tol * max(scale, 1.0)):
        raise DefectiveGeneratorError("null space has dimension >= 2 at rank tolerance")
    if vec.min() <= 0.0:
        raise PositivityError(f"discrete steady state is not positive: min = {vec.min():.3e}")
    vec = vec / (grid.h * vec.sum())

    return GeneratorMatrix(grid, matrix, f1, f2, sg, vec)


def apply(gen: GeneratorMatrix, p: StateVector) -> StateVector:
    """Matrix action of the generator on a cell state."""
    if len(p.p1) != gen.grid.n:
        raise ShapeError("state does not live on the generator's cell grid")
    out = gen.matrix @ p.stacked
    return StateVector.from_stacked(p.x, out)


def rayleigh_real_part(gen: GeneratorMatrix, stacked: np.ndarray) -> float:
    """``Re (A p, p) / (p, p)`` in the metric weighted by the null state."""
    w = gen.weights
    ap = gen.matrix @ stacked
    num = float(np.real(np.sum(ap * np.conj(stacked) * w)))
    den = float(np.sum(np.abs(stacked) ** 2 * w))
    return num / den


def dissipativity_check(gen: GeneratorMatrix, trials: int, seed: int) -> float:
    """Maximum weighted Rayleigh-quotient real part over random states.

    Draws ``trials`` complex standard-normal states from ``seed`` and
    returns the largest value of ``Re (A p, p) / (p, p)``.  For the
    upwind scheme with its own null-vector weights the exact value is
    non-positive for every state, so the result exceeds rounding noise
    only if the structure is broken.
    """
    if trials < 1:
        raise ValueError("trials must be positive")
    rng = np.random.default_rng(seed)
    m = gen.size
    worst = -np.inf
    for _ in range(trials):
        z = rng.standard_normal(m) + 1j * rng.standard_normal(m)
        worst = max(worst, rayleigh_real_part(gen, z))
    return float(worst)


def symmetrized(gen: GeneratorMatrix) -> np.ndarray:
    """Similarity transform ``D^{-1/2} A D^{1/2}`` with ``D = diag(steady)``.

    Shares the spectrum of the generator and turns the weighted metric
    into the Euclidean one, so symmetric-part eigenvalues and singular
    values computed from it are the weighted-space quantities.
    """
    d = np.sqrt(gen.steady)
    return (gen.matrix / d[:, None]) * d[None, :]


def hermitian_abscissa(gen: GeneratorMatrix) -> float:
    """Largest eigenvalue of the symmetric part of the similarity transform."""
    s = symmetrized(gen)
    return float(scipy.linalg.eigvalsh(0.5 * (s + s.T))[-1])
