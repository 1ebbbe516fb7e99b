"""Oscillatory-integral diagnostics for high-frequency non-degeneracy.

For a real phase slope ``psi`` on ``[0, 1]`` define

    I(lambda) = int_0^1 exp( i * lambda * int_0^x psi(w) dw ) dx.

When ``psi`` is continuous, real and not identically zero, the modulus
``|I(lambda)|`` stays bounded away from one along any sequence
``lambda -> +infinity``: the oscillating part of the interval loses its
contribution (Riemann-Lebesgue), while only the measure of the set
where ``psi`` vanishes survives.  The specialisation
``psi = 1/b1 - 1/b2`` is exactly the quantity that controls whether the
two-speed model can degenerate along the imaginary axis at high
frequency, so sweeping ``|I(lambda)|`` provides numerical evidence for
a gap that no finite spectral computation can see.

The quadrature resolves every oscillation with at least eight
subintervals and uses composite Gauss-Legendre rules (eight nodes per
subinterval) both for the cumulative phase and the outer integral, so
constant-slope cases are accurate to well below 1e-10 at any swept
frequency.  A ``limsup`` over a sequence is replaced by the maximum
over the geometric tail of the sweep; it is reported with its margin,
never claimed as proof.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError
from .fields import FieldSpec, evaluate

#: Minimum number of outer subintervals.
DEFAULT_BASE_POINTS = 64

#: Subintervals per oscillation period of the integrand.
POINTS_PER_PERIOD = 8

#: Hard cap on the oscillation-resolving grid.
MAX_SUBINTERVALS = 10_000_000

#: Verdict margin: the tail maximum must stay below ``1 - margin``.
DEFAULT_MARGIN = 0.05

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(8)

#: Subintervals processed per vectorised chunk (memory guard).
_CHUNK = 32768


@dataclass(frozen=True)
class PhaseSweep:
    """Sweep record of ``|I(lambda)|`` over a geometric frequency grid."""

    psi: object
    lambdas: np.ndarray
    moduli: np.ndarray
    values: np.ndarray
    limsup_estimate: float
    lemma_consistent: bool
    margin: float
    warnings: tuple = ()


def _psi_values(psi, x: np.ndarray) -> np.ndarray:
    if isinstance(psi, FieldSpec):
        return np.asarray(evaluate(psi, x))
    return np.asarray(psi(x), dtype=float)


def _resolution(lam: float, psi_max: float, base_points: int) -> tuple:
    needed = math.ceil(POINTS_PER_PERIOD * abs(lam) * psi_max / (2.0 * math.pi))
    m = max(base_points, needed)
    capped = m > MAX_SUBINTERVALS
    return (MAX_SUBINTERVALS if capped else m), capped


def phase_integral(psi, lam: float, base_points: int = DEFAULT_BASE_POINTS) -> complex:
    """Compute ``I(lambda)`` with an oscillation-resolving grid.

    ``psi`` may be a :class:`~twospeed.fields.FieldSpec` or any callable
    mapping coordinates in ``[0, 1]`` to real values.  The number of
    subintervals grows linearly with ``|lambda| * max|psi|`` so that
    each period of the integrand is sampled at least eight times; above
    ten million subintervals the grid saturates and an accuracy warning
    is emitted.
    """
    if base_points < 16:
        raise ConfigurationError("base_points must be at least 16")
    probe = _psi_values(psi, np.linspace(0.0, 1.0, 2049))
    psi_max = float(np.abs(probe).max())
    m, capped = _resolution(lam, psi_max, base_points)
    if capped:
        warnings.warn(
            f"oscillation grid capped at {MAX_SUBINTERVALS} subintervals for "
            f"lambda = {lam:.3g}; modulus accuracy is degraded",
            RuntimeWarning,
            stacklevel=2,
        )

    edges = np.linspace(0.0, 1.0, m + 1)
    width = 1.0 / m
    offsets = 0.5 * width * (_GL_NODES + 1.0)  # node offsets within one subinterval

    total = 0.0 + 0.0j
    phase_at_edge = 0.0
    for start in range(0, m, _CHUNK):
        stop = min(start + _CHUNK, m)
        left = edges[start:stop, None]
        nodes = left + offsets[None, :]  # (chunk, 8)

        # Cumulative phase at the outer nodes: prefix sums of the
        # per-subinterval integrals plus an inner rule from the left edge
        # to each node.
        inner_len = nodes - left  # (chunk, 8)
        inner_nodes = left[:, :, None] + 0.5 * inner_len[:, :, None] * (_GL_NODES + 1.0)
        inner_vals = _psi_values(psi, inner_nodes.reshape(-1)).reshape(inner_nodes.shape)
        partial = 0.5 * inner_len * (inner_vals @ _GL_WEIGHTS)  # (chunk, 8)

        cell_integrals = 0.5 * width * (_psi_values(psi, nodes.reshape(-1)).reshape(nodes.shape) @ _GL_WEIGHTS)
        prefix = phase_at_edge + np.concatenate(([0.0], np.cumsum(cell_integrals)[:-1]))
        phases = prefix[:, None] + partial

        total += (np.exp(1j * lam * phases) @ _GL_WEIGHTS).sum() * 0.5 * width
        phase_at_edge = prefix[-1] + cell_integrals[-1]
    return complex(total)


def lemma_sweep(
    psi,
    lambda_min: float,
    lambda_max: float,
    points: int,
    base_points: int = DEFAULT_BASE_POINTS,
    margin: float = DEFAULT_MARGIN,
) -> PhaseSweep:
    """Sweep ``|I(lambda)|`` on a geometric grid and judge the tail.

    The surrogate for the limit superior is the maximum modulus over the
    largest half of the sweep; the verdict is consistent with
    high-frequency non-degeneracy when that maximum stays below
    ``1 - margin``.
    """
    if not 0.0 < lambda_min < lambda_max:
        raise ConfigurationError("need 0 < lambda_min < lambda_max")
    if points < 8:
        raise ConfigurationError("need at least 8 sweep points")
    lambdas = np.geomspace(lambda_min, lambda_max, points)
    notes = []
    values = np.empty(points, dtype=complex)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", RuntimeWarning)
        for i, lam in enumerate(lambdas):
            values[i] = phase_integral(psi, float(lam), base_points=base_points)
    for w in caught:
        notes.append(str(w.message))
    moduli = np.abs(values)
    tail = moduli[points // 2 :]
    limsup = float(tail.max())
    return PhaseSweep(
        psi=psi,
        lambdas=lambdas,
        moduli=moduli,
        values=values,
        limsup_estimate=limsup,
        lemma_consistent=bool(limsup < 1.0 - margin),
        margin=margin,
        warnings=tuple(notes),
    )
