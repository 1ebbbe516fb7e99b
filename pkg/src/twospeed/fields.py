"""Declarative scalar coefficient fields on the unit interval.

The model is driven by a handful of scalar functions on ``[0, 1]``: two
velocity fields ``b1``, ``b2``, an optional reaction cross-section
``sigma`` and, for the oscillatory-integral diagnostics, a phase slope
``psi``.  A :class:`FieldSpec` describes one such function declaratively
so that a run is reproducible from its configuration alone.  Supported
kinds:

``constant``
    ``value``
``affine``
    ``a + b*x``
``trigonometric``
    ``a + b*sin(2*pi*x) + c*cos(2*pi*x)``
``tabulated``
    monotone piecewise-cubic interpolation through sample points
    ``(x_k, v_k)`` with ``x_0 = 0`` and ``x_last = 1``

Evaluation is pure and deterministic: the same spec evaluated at the
same coordinate returns the same value bit for bit.  Tabulated fields
use shape-preserving cubics so that single-signed sample data cannot
acquire spurious zeros through interpolation overshoot.

The module also houses the admissibility checks used by every driver:
both velocity fields must stay away from zero with a fixed sign and
differ somewhere on the interval; with a variable cross-section, the
velocity difference and the cross-section must additionally be non-zero
at a common point.  The checks sample a declared grid resolution and
report quantitative margins instead of raising, so that deliberately
degenerate experiments remain expressible.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass

import numpy as np
from scipy.interpolate import PchipInterpolator

from .errors import DomainError, InvalidCrossSectionError

#: Margin below which a sampled quantity counts as degenerate (zero).
DEGENERACY_FLOOR = 1e-10

#: Default number of sample points for the admissibility checks.
DEFAULT_SAMPLES = 4097

_KINDS = ("constant", "affine", "trigonometric", "tabulated")

# Slack for endpoint coordinates produced by floating-point arithmetic.
_EDGE_TOL = 1e-12


@dataclass(frozen=True)
class FieldSpec:
    """Declarative description of one scalar coefficient function.

    Instances are immutable and hashable; use the class methods
    :meth:`constant`, :meth:`affine`, :meth:`trigonometric` and
    :meth:`tabulated` rather than the raw constructor.

    Attributes
    ----------
    kind:
        One of ``constant``, ``affine``, ``trigonometric``, ``tabulated``.
    coeffs:
        Kind-specific real coefficients (empty for tabulated fields).
    table:
        For tabulated fields, a pair ``(xs, vs)`` of equal-length tuples
        with ``xs`` strictly increasing from 0 to 1.
    """

    kind: str
    coeffs: tuple = ()
    table: tuple = ()

    def __post_init__(self) -> None:
        if self.kind not in _KINDS:
            raise ValueError(f"unknown field kind {self.kind!r}; expected one of {_KINDS}")
        arity = {"constant": 1, "affine": 2, "trigonometric": 3, "tabulated": 0}[self.kind]
        if len(self.coeffs) != arity:
            raise ValueError(f"{self.kind} field takes {arity} coefficients, got {len(self.coeffs)}")
        if self.kind == "tabulated":
            if len(self.table) != 2 or len(self.table[0]) != len(self.table[1]):
                raise ValueError("tabulated field needs matching abscissa and value tuples")
            xs = np.asarray(self.table[0], dtype=float)
            if xs.size < 2:
                raise ValueError("tabulated field needs at least two samples")
            if not np.all(np.diff(xs) > 0):
                raise ValueError("tabulated abscissae must be strictly increasing")
            if abs(xs[0]) > _EDGE_TOL or abs(xs[-1] - 1.0) > _EDGE_TOL:
                raise ValueError("tabulated abscissae must cover [0, 1] exactly")
        elif self.table:
            raise ValueError(f"{self.kind} field does not take a sample table")

    @classmethod
    def constant(cls, value: float) -> "FieldSpec":
        return cls("constant", (float(value),))

    @classmethod
    def affine(cls, a: float, b: float) -> "FieldSpec":
        """Field ``a + b*x``."""
        return cls("affine", (float(a), float(b)))

    @classmethod
    def trigonometric(cls, a: float, b: float, c: float = 0.0) -> "FieldSpec":
        """Field ``a + b*sin(2*pi*x) + c*cos(2*pi*x)``."""
        return cls("trigonometric", (float(a), float(b), float(c)))

    @classmethod
    def tabulated(cls, xs, vs) -> "FieldSpec":
        """Monotone piecewise-cubic interpolant through ``(xs, vs)``."""
        return cls(
            "tabulated",
            (),
            (tuple(float(x) for x in xs), tuple(float(v) for v in vs)),
        )

    def __call__(self, x):
        return evaluate(self, x)


@functools.lru_cache(maxsize=128)
def _interpolator(table: tuple) -> PchipInterpolator:
    xs = np.asarray(table[0], dtype=float)
    vs = np.asarray(table[1], dtype=float)
    return PchipInterpolator(xs, vs, extrapolate=False)


def evaluate(spec: FieldSpec, x):
    """Evaluate ``spec`` at ``x`` (scalar or array) inside ``[0, 1]``.

    Raises
    ------
    DomainError
        If any coordinate lies outside the unit interval (beyond a
        rounding-level slack at the endpoints).
    """
    arr = np.asarray(x, dtype=float)
    if arr.size:
        lo = arr.min()
        hi = arr.max()
        if lo < -_EDGE_TOL or hi > 1.0 + _EDGE_TOL:
            raise DomainError(f"coordinate outside [0, 1]: range [{lo}, {hi}]")
    arr = np.clip(arr, 0.0, 1.0)

    if spec.kind == "constant":
        out = np.full_like(arr, spec.coeffs[0])
    elif spec.kind == "affine":
        a, b = spec.coeffs
        out = a + b * arr
    elif spec.kind == "trigonometric":
        a, b, c = spec.coeffs
        arg = (2.0 * np.pi) * arr
        out = a + b * np.sin(arg) + c * np.cos(arg)
    else:
        out = _interpolator(spec.table)(arr)

    if np.ndim(x) == 0:
        return float(out)
    return out


@dataclass(frozen=True)
class ValidationReport:
    """Outcome of one sampled admissibility check.

    Attributes
    ----------
    passed:
        Whether the quantitative criterion in ``detail`` holds at the
        sampled resolution.
    min_abs_value:
        Smallest ``|b_i|`` seen over the sample grid (degeneracy margin).
    sign:
        ``+1`` if every checked velocity sample is positive, ``-1`` if
        every sample is negative, ``0`` when signs differ across or
        within the fields.
    witness_x:
        Sample coordinate where the distinguishing quantity (the
        velocity difference, or its product with the cross-section)
        attains its maximum.
    detail:
        Human-readable summary of the margins and the verdict.
    """

    passed: bool
    min_abs_value: float
    sign: int
    witness_x: float
    detail: str


def _sign_class(values: np.ndarray, floor: float) -> int:
    if np.all(values > floor):
        return 1
    if np.all(values < -floor):
        return -1
    return 0


def validate_transport_fields(
    b1: FieldSpec,
    b2: FieldSpec,
    samples: int = DEFAULT_SAMPLES,
    floor: float = DEGENERACY_FLOOR,
) -> ValidationReport:
    """Check that both velocity fields are non-degenerate and distinct.

    Passes iff, over a uniform grid of ``samples`` points, each field is
    single-signed with ``min |b_i|`` above ``floor`` and the two fields
    differ by more than ``floor`` somewhere.  Failure is reported, not
    raised.
    """
    if samples < 2:
        raise ValueError("need at least two sample points")
    xs = np.linspace(0.0, 1.0, samples)
    v1 = np.asarray(evaluate(b1, xs))
    v2 = np.asarray(evaluate(b2, xs))

    s1 = _sign_class(v1, floor)
    s2 = _sign_class(v2, floor)
    min_abs = float(min(np.abs(v1).min(), np.abs(v2).min()))
    diff = np.abs(v1 - v2)
    iw = int(np.argmax(diff))
    max_diff = float(diff[iw])

    problems = []
    if s1 == 0 or s2 == 0 or min_abs <= floor:
        problems.append(f"degenerate velocity: min |b_i| = {min_abs:.3e} (floor {floor:.1e})")
    if max_diff <= floor:
        problems.append(f"indistinguishable fields: max |b1 - b2| = {max_diff:.3e}")

    passed = not problems
    if passed:
        detail = (
            f"min |b_i| = {min_abs:.6e}, max |b1 - b2| = {max_diff:.6e} at x = {xs[iw]:.6f} "
            f"(floor {floor:.1e}, {samples} samples)"
        )
    else:
        detail = "; ".join(problems) + f" ({samples} samples)"
    sign = s1 if s1 == s2 else 0
    return ValidationReport(passed, min_abs, sign, float(xs[iw]), detail)


def validate_cross_section_overlap(
    b1: FieldSpec,
    b2: FieldSpec,
    sigma: FieldSpec,
    samples: int = DEFAULT_SAMPLES,
    floor: float = DEGENERACY_FLOOR,
) -> ValidationReport:
    """Check admissibility with a variable reaction cross-section.

    Passes iff both velocities are non-degenerate and single-signed, the
    cross-section is non-negative on the grid, and the product
    ``|b1 - b2| * sigma`` exceeds ``floor`` at some common sample point,
    i.e. the fields are distinguishable *where collisions happen*.

    Raises
    ------
    InvalidCrossSectionError
        If ``sigma`` falls below ``-floor`` at any sample.
    """
    if samples < 2:
        raise ValueError("need at least two sample points")
    xs = np.linspace(0.0, 1.0, samples)
    v1 = np.asarray(evaluate(b1, xs))
    v2 = np.asarray(evaluate(b2, xs))
    sg = np.asarray(evaluate(sigma, xs))

    if sg.min() < -floor:
        ix = int(np.argmin(sg))
        raise InvalidCrossSectionError(
            f"cross-section is negative: sigma({xs[ix]:.6f}) = {sg[ix]:.3e}"
        )
    sg = np.maximum(sg, 0.0)

    s1 = _sign_class(v1, floor)
    s2 = _sign_class(v2, floor)
    min_abs = float(min(np.abs(v1).min(), np.abs(v2).min()))
    product = np.abs(v1 - v2) * sg
    iw = int(np.argmax(product))
    max_product = float(product[iw])

    problems = []
    if s1 == 0 or s2 == 0 or min_abs <= floor:
        problems.append(f"degenerate velocity: min |b_i| = {min_abs:.3e} (floor {floor:.1e})")
    if max_product <= floor:
        problems.append(
            "velocity difference and cross-section are never simultaneously non-zero: "
            f"max |b1 - b2|*sigma = {max_product:.3e}"
        )

    passed = not problems
    if passed:
        detail = (
            f"min |b_i| = {min_abs:.6e}, max |b1 - b2|*sigma = {max_product:.6e} "
            f"at x = {xs[iw]:.6f} (floor {floor:.1e}, {samples} samples)"
        )
    else:
        detail = "; ".join(problems) + f" ({samples} samples)"
    sign = s1 if s1 == s2 else 0
    return ValidationReport(passed, min_abs, sign, float(xs[iw]), detail)
