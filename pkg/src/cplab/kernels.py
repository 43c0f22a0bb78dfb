r"""Numerical primitives: semi-infinite quadrature, series summation and
Richardson-extrapolated differentiation.

All routines are pure functions of their inputs.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable, Sequence

from scipy.integrate import IntegrationWarning, quad

from .errors import DegenerateStep, NonConvergence

__all__ = [
    "QuadratureSpec",
    "SeriesSpec",
    "QuadratureResult",
    "SeriesResult",
    "DerivativeEstimate",
    "integrate_semi_infinite",
    "sum_series",
    "derivative",
]

# QUADPACK refuses relative tolerances below 50 machine epsilons.
_EPS = 2.220446049250313e-16
_QUADPACK_MIN_REL = 50 * _EPS


@dataclass(frozen=True)
class QuadratureSpec:
    relative_tolerance: float = 1e-12
    absolute_floor: float = 1e-18
    max_refinements: int = 400

    def __post_init__(self):
        if not 0.0 < self.relative_tolerance <= 1e-2:
            raise ValueError("relative_tolerance must lie in (0, 1e-2]")
        if not 0.0 < self.absolute_floor < 1.0:
            raise ValueError("absolute_floor must lie in (0, 1)")
        if self.max_refinements < 1:
            raise ValueError("max_refinements must be >= 1")


@dataclass(frozen=True)
class SeriesSpec:
    relative_tail_tolerance: float = 1e-16
    max_terms: int = 1_000_000

    def __post_init__(self):
        if not 0.0 < self.relative_tail_tolerance <= 1e-6:
            raise ValueError("relative_tail_tolerance must lie in (0, 1e-6]")
        if self.max_terms < 16:
            raise ValueError("max_terms must be >= 16")


@dataclass(frozen=True)
class QuadratureResult:
    value: float
    error: float
    evaluations: int
    cutoff: float


@dataclass(frozen=True)
class SeriesResult:
    value: float
    terms_used: int
    truncation_estimate: float


@dataclass(frozen=True)
class DerivativeEstimate:
    value: float
    step: float
    error: float


def _tail_bound(f_b: float, b: float, degree: int) -> float:
    # int_b^inf C y^d e^{-y} dy with C fixed by f(b) = C b^d e^{-b}
    total, coeff = 1.0, 1.0
    for j in range(1, degree + 1):
        coeff *= (degree - j + 1) / b
        total += coeff
    return abs(f_b) * total


def integrate_semi_infinite(
    f: Callable[[float], float],
    lower: float,
    spec: QuadratureSpec = QuadratureSpec(),
    points: Sequence[float] | None = None,
    tail_degree: int = 2,
) -> QuadratureResult:
    r"""Integrate ``f`` over ``[lower, inf)`` for integrands with an
    :math:`e^{-y}\,\mathrm{poly}(y)` envelope.

    The finite window ``[lower, lower + L]`` with :math:`e^{-L}` below
    ``spec.absolute_floor`` is handled by adaptive Gauss-Kronrod
    subdivision (QUADPACK). The remainder is bounded analytically by
    assuming ``f`` behaves as :math:`C y^d e^{-y}` beyond the window, with
    ``d = tail_degree``; the window is doubled until this bound is below
    tolerance. When the value cancels to near zero the quadrature error
    is judged against the integral of ``|f|``.

    Parameters
    ----------
    f : callable
        scalar integrand
    lower : float
        non-negative lower limit
    spec : QuadratureSpec
        tolerances and subdivision budget
    points : sequence of float, optional
        interior break points (e.g. where the integrand varies rapidly)
    tail_degree : int
        polynomial degree of the assumed decay envelope

    Returns
    -------
    QuadratureResult
        value, combined error estimate (quadrature + tail), number of
        integrand evaluations and the window end actually used

    Raises
    ------
    NonConvergence
        if the error estimate exceeds the tolerance after the budget is
        spent
    """
    if lower < 0:
        raise ValueError("lower must be non-negative")
    epsrel = max(spec.relative_tolerance, _QUADPACK_MIN_REL)
    width = -math.log(spec.absolute_floor)
    evaluations = 0
    for _ in range(8):
        upper = lower + width
        brk = [p for p in (points or ()) if lower < p < upper]
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", IntegrationWarning)
            out = quad(
                f, lower, upper, epsabs=spec.absolute_floor, epsrel=epsrel,
                limit=spec.max_refinements, points=brk or None, full_output=1,
            )
        value, error, info = out[:3]
        # a fourth element is QUADPACK's warning message (ier > 0)
        issue = out[3] if len(out) > 3 else ""
        evaluations += info["neval"]
        tail = _tail_bound(f(upper), upper, tail_degree)
        allowed = max(spec.absolute_floor, spec.relative_tolerance * abs(value))
        # the dropped tail has a fixed sign, so it must sit at rounding
        # level or it accumulates coherently across a Matsubara sum
        if tail <= max(spec.absolute_floor, _EPS * abs(value)):
            break
        width *= 2.0
    else:
        raise NonConvergence(f"exponential tail {tail:.3g} not at rounding level")
    # ier 2 (roundoff) is normal near machine precision; accept it when
    # the estimate is still close to the request
    benign = not issue or "roundoff" in issue.lower()
    limit = max(allowed, _QUADPACK_MIN_REL * abs(value)) * (10.0 if benign else 1.0)
    if error > limit:
        # a value that cancels to near zero cannot meet a tolerance relative
        # to itself; measure against the integral of |f| instead
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", IntegrationWarning)
            magnitude = quad(lambda y: abs(f(y)), lower, upper, epsrel=1e-6,
                             limit=spec.max_refinements, points=brk or None)[0]
        limit = max(limit, spec.relative_tolerance * magnitude)
    if error > limit:
        raise NonConvergence(
            f"quadrature error {error:.3g} exceeds tolerance {allowed:.3g} "
            f"after {spec.max_refinements} subintervals"
        )
    return QuadratureResult(value, error + tail, evaluations, upper)


def sum_series(
    term: Callable[[int], float],
    spec: SeriesSpec = SeriesSpec(),
    halve_first: bool = False,
) -> SeriesResult:
    """Sum ``term(l)`` for ``l = 0, 1, ...`` until the geometric tail
    estimate stays below ``relative_tail_tolerance * |partial sum|`` for
    three consecutive terms.

    With ``halve_first`` the ``l = 0`` term is counted with weight 1/2.
    Terms are accumulated with ``math.fsum`` in index order, so the result
    does not depend on how the terms were produced.
    """
    terms = []
    passes = 0
    tail = math.inf
    running = 0.0  # only steers the stopping test
    for l in range(spec.max_terms):
        t = float(term(l))
        terms.append(t)
        running += t
        if l == 0:
            continue
        prev = abs(terms[-2])
        if t == 0.0 and prev == 0.0:
            tail = 0.0
        elif prev > 0.0 and abs(t) < prev:
            rho = abs(t) / prev
            tail = abs(t) * rho / (1.0 - rho)
        else:
            tail = math.inf
        if tail == 0.0 or tail <= spec.relative_tail_tolerance * abs(running):
            passes += 1
            if passes == 3:
                break
        else:
            passes = 0
    else:
        raise NonConvergence(f"series tail not below tolerance after {spec.max_terms} terms")
    total = math.fsum(terms)
    if halve_first:
        total -= 0.5 * terms[0]
    return SeriesResult(total, len(terms), tail)


def derivative(
    f: Callable[[float], float],
    x: float,
    initial_step: float,
) -> DerivativeEstimate:
    """Central-difference derivative with one level of Richardson
    extrapolation (steps ``h`` and ``h/2``).

    The step is first rounded so that ``x + h`` is exactly representable;
    the returned ``step`` is that value.
    """
    h = (x + initial_step) - x
    if h == 0.0 or h / 2 == 0.0 or (x != 0.0 and abs(h) < 4 * abs(x) * 2.220446049250313e-16):
        raise DegenerateStep(f"step {initial_step!r} underflows at x={x!r}")
    coarse = (f(x + h) - f(x - h)) / (2 * h)
    fine = (f(x + h / 2) - f(x - h / 2)) / h
    value = fine + (fine - coarse) / 3.0
    return DerivativeEstimate(value, h, abs(fine - coarse) / 3.0)
