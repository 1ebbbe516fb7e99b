"""Spectrum, resolvent gap and semigroup bound of the discrete generator.

All computations happen on the similarity transform
``S = D^{-1/2} A D^{1/2}`` with ``D = diag(v)``, ``v`` the discrete
steady state: ``S`` shares the spectrum of the generator and the
Euclidean geometry of ``S`` is the weighted geometry of ``A``, so
singular values and operator norms computed below are the
weighted-metric quantities.

The mean-zero subspace is the orthogonal complement of the unit vector
``z0 = sqrt(h * v)``; it is invariant under ``S`` because the columns of
the generator sum to zero.  Restricting to an orthonormal basis ``Q`` of
that complement deflates the zero mode exactly, and

    sigma_min( Q^T S Q - i lambda )

is the distance-to-singularity of the shifted generator on the
mean-zero subspace.  The resolvent gap estimate is the minimum of that
quantity over a sweep of real ``lambda`` (non-negative only; the value
is even in ``lambda`` for a real matrix), refined by golden-section
bracketing around the lowest coarse minima.  A positive gap ``psi``
feeds the semigroup bound

    || exp(t S) restricted to the mean-zero subspace ||
        <= exp(-t * psi + pi/2),

which :func:`semigroup_bound_check` verifies pointwise on a time grid
with the dense matrix exponential.

The sweep minimum is taken over finitely many evaluated points, so it
is an upper surrogate for the infimum over all of R; the default sweep
bound ``4 * max|b| * n * pi`` covers the discrete transport frequencies
with a wide margin, beyond which the smallest singular value grows
linearly in ``|lambda|``.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import pi, sqrt

import numpy as np
import scipy.linalg

from .errors import ConfigurationError, NumericalError
from .generator import GeneratorMatrix, symmetrized

#: Hard cap on the dense eigen/SVD problem size (matrix side 2n).
DENSE_CAP = 4096

#: Relative tolerance for identifying the zero mode.
RANK_TOL = 1e-8

#: Sweep defaults: coarse resolution and local refinement effort.
COARSE_POINTS = 512
REFINE_DEPTH = 40
REFINE_BRACKETS = 5


@dataclass(frozen=True)
class SpectrumReport:
    """Full spectrum with the zero mode and stability bookkeeping.

    ``eigenvalues`` are sorted by real part (imaginary part breaking
    ties); ``zero_mode_index`` points at the eigenvalue nearest zero,
    ``x0_abscissa`` is the largest real part over all other eigenvalues,
    and ``nonneg_violations`` lists non-zero-mode eigenvalues whose real
    part exceeds the rank tolerance (empty for an admissible model).
    ``zero_mode_vector`` is the corresponding eigenvector mapped back to
    density coordinates, normalised to unit Euclidean length.
    """

    eigenvalues: np.ndarray
    zero_mode_index: int
    x0_abscissa: float
    nonneg_violations: np.ndarray
    zero_mode_vector: np.ndarray


@dataclass(frozen=True)
class PsiEstimate:
    """Record of the resolvent-gap sweep and its refined minimum."""

    lambda_grid: np.ndarray
    sigma_min_values: np.ndarray
    psi_hat: float
    argmin_lambda: float
    lambda_max: float
    refinement_depth: int
    warnings: tuple = ()


@dataclass(frozen=True)
class SemigroupBoundReport:
    """Pointwise comparison of the semigroup norm with its certificate."""

    times: np.ndarray
    norms: np.ndarray
    bounds: np.ndarray
    margins: np.ndarray
    passed: bool


def _check_cap(gen: GeneratorMatrix, cap: int) -> None:
    if gen.size > cap:
        raise NumericalError(f"matrix side {gen.size} exceeds the dense solver cap {cap}")


def mean_zero_basis(gen: GeneratorMatrix) -> np.ndarray:
    """Orthonormal basis (columns) of the mean-zero subspace."""
    z0 = np.sqrt(gen.grid.h * gen.steady)
    return scipy.linalg.null_space(z0[None, :])


def restricted_operator(gen: GeneratorMatrix) -> np.ndarray:
    """The similarity transform compressed to the mean-zero subspace."""
    q = mean_zero_basis(gen)
    return q.T @ symmetrized(gen) @ q


def spectrum(gen: GeneratorMatrix, dense_cap: int = DENSE_CAP, rank_tol: float = RANK_TOL) -> SpectrumReport:
    """All eigenvalues of the generator in the weighted space.

    Eigenpairs come from a dense solve on the similarity transform; a
    sample of the reported pairs is verified against the residual bound
    ``||S u - mu u|| <= 1e-8 ||A||`` before the report is returned.
    """
    _check_cap(gen, dense_cap)
    s = symmetrized(gen)
    try:
        vals, vecs = scipy.linalg.eig(s)
    except scipy.linalg.LinAlgError as exc:  # pragma: no cover - LAPACK failure
        raise NumericalError(f"dense eigensolver failed: {exc}") from exc

    scale = gen.operator_scale()
    sample = np.linspace(0, len(vals) - 1, min(len(vals), 16)).astype(int)
    resid = np.abs(s @ vecs[:, sample] - vecs[:, sample] * vals[sample]).max()
    if resid > 1e-8 * max(scale, 1.0):
        raise NumericalError(f"eigenpair residual {resid:.3e} exceeds 1e-8 * ||A||")

    order = np.lexsort((vals.imag, vals.real))
    vals = vals[order]
    vecs = vecs[:, order]
    zero_idx = int(np.argmin(np.abs(vals)))

    others = np.ones(len(vals), dtype=bool)
    others[zero_idx] = False
    abscissa = float(vals.real[others].max())
    violations = vals[others & (vals.real > rank_tol * max(scale, 1.0))]

    zero_vec = np.sqrt(gen.steady) * vecs[:, zero_idx]
    zero_vec = zero_vec / np.linalg.norm(zero_vec)
    return SpectrumReport(vals, zero_idx, abscissa, violations, zero_vec)


def _golden_minimize(f, a: float, b: float, depth: int):
    """Deterministic golden-section minimisation; returns (value, argmin)."""
    inv_phi = (sqrt(5.0) - 1.0) / 2.0
    c = b - inv_phi * (b - a)
    d = a + inv_phi * (b - a)
    fc = f(c)
    fd = f(d)
    best_val, best_arg = (fc, c) if fc <= fd else (fd, d)
    for _ in range(depth):
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - inv_phi * (b - a)
            fc = f(c)
            cand = (fc, c)
        else:
            a, c, fc = c, d, fd
            d = a + inv_phi * (b - a)
            fd = f(d)
            cand = (fd, d)
        if cand[0] < best_val:
            best_val, best_arg = cand
    return best_val, best_arg


def default_lambda_max(gen: GeneratorMatrix) -> float:
    """Sweep bound covering the discrete transport frequency range."""
    return 4.0 * gen.max_speed() * gen.grid.n * pi


def psi_sweep(
    gen: GeneratorMatrix,
    lambda_max: float = 0.0,
    coarse_points: int = COARSE_POINTS,
    refine_depth: int = REFINE_DEPTH,
    brackets: int = REFINE_BRACKETS,
    dense_cap: int = DENSE_CAP,
) -> PsiEstimate:
    """Sweep the smallest singular value of the shifted restricted operator.

    Evaluates ``sigma_min`` on a uniform coarse grid over
    ``[0, lambda_max]`` (``lambda_max = 0`` selects the default bound),
    then refines around the lowest local minima by golden-section
    bracketing.  The estimate is the smallest value seen anywhere;
    ``sigma_min`` is 1-Lipschitz in ``lambda``, so bracketing converges
    reliably.
    """
    _check_cap(gen, dense_cap)
    if lambda_max == 0.0:
        lambda_max = default_lambda_max(gen)
    if lambda_max <= 0.0:
        raise ConfigurationError("lambda_max must be positive")
    if coarse_points < 16:
        raise ConfigurationError("coarse_points must be at least 16")

    s0 = restricted_operator(gen)
    eye = np.eye(s0.shape[0])

    def sig_min(lam: float) -> float:
        try:
            return float(scipy.linalg.svdvals(s0 - 1j * lam * eye)[-1])
        except scipy.linalg.LinAlgError as exc:  # pragma: no cover - LAPACK failure
            raise NumericalError(f"SVD failed at lambda = {lam}: {exc}") from exc

    grid = np.linspace(0.0, lambda_max, coarse_points)
    values = np.array([sig_min(lam) for lam in grid])

    candidates = []
    for i in range(len(grid)):
        left = values[i - 1] if i > 0 else np.inf
        right = values[i + 1] if i + 1 < len(grid) else np.inf
        if values[i] <= left and values[i] <= right:
            candidates.append((values[i], i))
    candidates.sort()

    best_val = float(values.min())
    best_arg = float(grid[int(np.argmin(values))])
    for _, i in candidates[:brackets]:
        a = grid[max(i - 1, 0)]
        b = grid[min(i + 1, len(grid) - 1)]
        if b <= a:
            continue
        val, arg = _golden_minimize(sig_min, a, b, refine_depth)
        if val < best_val:
            best_val, best_arg = float(val), float(arg)

    notes = []
    first_frequency = 2.0 * pi * gen.max_speed()
    if lambda_max < first_frequency:
        notes.append(
            f"lambda_max = {lambda_max:.3g} is below the first transport frequency "
            f"scale {first_frequency:.3g}; the sweep may miss the relevant minima"
        )
    return PsiEstimate(grid, values, best_val, best_arg, float(lambda_max), refine_depth, tuple(notes))


def semigroup_bound_check(
    gen: GeneratorMatrix,
    psi: PsiEstimate,
    t_grid,
    dense_cap: int = DENSE_CAP,
) -> SemigroupBoundReport:
    """Verify ``||exp(tA)|| <= exp(-t psi + pi/2)`` on the mean-zero subspace.

    The operator norm is the largest singular value of the dense matrix
    exponential of the restricted operator (scaling-and-squaring with a
    Pade rational core).  For a dissipative generator the norm is also
    non-increasing in ``t``; an overflow here signals a broken matrix.
    """
    _check_cap(gen, dense_cap)
    times = np.asarray(t_grid, dtype=float)
    if len(times) == 0 or np.any(times < 0.0) or np.any(np.diff(times) <= 0.0):
        raise ConfigurationError("t_grid must be non-negative and strictly increasing")

    s0 = restricted_operator(gen)
    norms = np.empty(len(times))
    for i, t in enumerate(times):
        propagator = scipy.linalg.expm(t * s0)
        if not np.all(np.isfinite(propagator)):
            raise NumericalError(f"matrix exponential overflowed at t = {t}")
        norms[i] = scipy.linalg.svdvals(propagator)[0]
    bounds = np.exp(-times * psi.psi_hat + 0.5 * pi)
    margins = bounds - norms
    return SemigroupBoundReport(times, norms, bounds, margins, bool(np.all(margins >= 0.0)))
