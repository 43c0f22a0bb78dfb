"""Entropy from engine free energies, low-temperature coefficient
extraction and Nernst-theorem classification."""
from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from functools import partial
from typing import Sequence

import numpy as np
from scipy.optimize import minimize_scalar

from .asymptotics import entropy_low_temperature, residual_entropy
from .errors import DomainError, FitFailure
from .kernels import QuadratureSpec, SeriesSpec, derivative
from .lifshitz import _scale, thermal_correction
from .materials import (
    C_LIGHT, HBAR, K_B, AtomModel, Configuration, MaterialModel, temperature_for_tau,
)

__all__ = [
    "EntropyCurve",
    "NernstVerdict",
    "DEFAULT_STEP_FRACTION",
    "entropy_numeric",
    "entropy_curve",
    "nernst_check",
    "low_temperature_ratio",
    "extract_low_temperature_coefficient",
]

DEFAULT_STEP_FRACTION = 0.05
METHODS = ("analytic_asymptote", "finite_difference")


@dataclass(frozen=True)
class EntropyCurve:
    temperatures: tuple
    entropies: tuple
    method: str

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"method must be one of {METHODS}")
        if len(self.temperatures) != len(self.entropies):
            raise ValueError("temperatures and entropies differ in length")
        if any(b <= a for a, b in zip(self.temperatures, self.temperatures[1:])):
            raise ValueError("temperatures must be strictly ascending")


@dataclass(frozen=True)
class NernstVerdict:
    """Outcome of a Nernst-theorem check.

    ``fit_error`` is the standard error of ``extrapolated_s0``;
    ``degenerate`` marks an identically vanishing entropy curve, which is
    reported as satisfied without any fit.
    """

    classification: str
    fitted_exponent: float
    extrapolated_s0: float
    reference_s0: float
    fit_error: float = 0.0
    max_entropy: float = 0.0
    matches_reference: bool = True
    degenerate: bool = False


def entropy_numeric(
    atom: AtomModel,
    material: MaterialModel,
    config: Configuration,
    with_conductivity: bool = False,
    step_fraction: float = DEFAULT_STEP_FRACTION,
    series_spec: SeriesSpec = SeriesSpec(),
    quad_spec: QuadratureSpec = QuadratureSpec(),
) -> float:
    """Entropy ``-dF/dT`` (J/K) by Richardson-extrapolated central
    differences with step ``step_fraction * T``.

    The zero-temperature energy is subtracted before differencing; it does
    not depend on T, so the derivative is unchanged while the differenced
    values stay small.
    """
    if not config.temperature > 0:
        raise DomainError("entropy_numeric needs T > 0")
    if not 0 < step_fraction < 0.5:
        raise ValueError("step_fraction must lie in (0, 0.5)")

    def df(temperature):
        return thermal_correction(atom, material, config.at_temperature(temperature),
                                  series_spec, quad_spec, with_conductivity).value

    est = derivative(df, config.temperature, step_fraction * config.temperature)
    return -est.value


def _entropy_point(atom, material, with_conductivity, step_fraction,
                   series_spec, quad_spec, config):
    return entropy_numeric(atom, material, config, with_conductivity,
                           step_fraction, series_spec, quad_spec)


def _asymptotic_entropy(atom, material, config, with_conductivity):
    s = entropy_low_temperature(atom, material, config.temperature)
    if with_conductivity and material.conductivity.enabled:
        s += residual_entropy(atom, material, config)
    return s


def entropy_curve(
    atom: AtomModel,
    material: MaterialModel,
    configs: Sequence[Configuration],
    method: str = "finite_difference",
    with_conductivity: bool = False,
    step_fraction: float = DEFAULT_STEP_FRACTION,
    series_spec: SeriesSpec = SeriesSpec(),
    quad_spec: QuadratureSpec = QuadratureSpec(),
    jobs: int = 1,
) -> EntropyCurve:
    """Entropy on a temperature grid; points are independent, so ``jobs > 1``
    evaluates them in worker processes (results keep grid order)."""
    configs = sorted(configs, key=lambda c: c.temperature)
    temps = tuple(c.temperature for c in configs)
    if method == "analytic_asymptote":
        values = [_asymptotic_entropy(atom, material, c, with_conductivity) for c in configs]
    elif method == "finite_difference":
        point = partial(_entropy_point, atom, material, with_conductivity,
                        step_fraction, series_spec, quad_spec)
        if jobs > 1:
            with ProcessPoolExecutor(max_workers=jobs) as pool:
                values = list(pool.map(point, configs))
        else:
            values = [point(c) for c in configs]
    else:
        raise ValueError(f"method must be one of {METHODS}")
    return EntropyCurve(temps, tuple(float(v) for v in values), method)


def _log_slope(t, s):
    if np.all(s > 0) or np.all(s < 0):
        return float(np.polyfit(np.log(t), np.log(np.abs(s)), 1)[0])
    return math.nan


def _profile_fit(t, s, n_min=1.0, n_max=8.0):
    """Least squares for S = s0 + b (T/Tmax)^n; returns (s0, stderr, n)."""
    x = t / t.max()

    def solve(n):
        design = np.column_stack([np.ones_like(x), x ** n])
        coef, *_ = np.linalg.lstsq(design, s, rcond=None)
        resid = s - design @ coef
        return coef, resid, design

    best = minimize_scalar(lambda n: float(np.sum(solve(n)[1] ** 2)),
                           bounds=(n_min, n_max), method="bounded",
                           options={"xatol": 1e-6})
    n = float(best.x)
    coef, resid, design = solve(n)
    dof = max(len(s) - 3, 1)
    sigma2 = float(np.sum(resid ** 2)) / dof
    cov = sigma2 * np.linalg.inv(design.T @ design)
    return float(coef[0]), math.sqrt(max(cov[0, 0], 0.0)), n


def nernst_check(
    atom: AtomModel,
    material: MaterialModel,
    configs: Sequence[Configuration],
    with_conductivity: bool = False,
    step_fraction: float = DEFAULT_STEP_FRACTION,
    series_spec: SeriesSpec = SeriesSpec(),
    quad_spec: QuadratureSpec = QuadratureSpec(),
    jobs: int = 1,
    curve: EntropyCurve | None = None,
    zero_fraction: float = 0.05,
    reference_tolerance: float = 0.02,
) -> NernstVerdict:
    """Classify the T -> 0 behaviour of the entropy on a temperature grid.

    The exponent is the log-log least-squares slope; ``extrapolated_s0``
    is the intercept of ``S = s0 + b T^n`` with ``n`` fitted. The theorem
    counts as satisfied when ``|s0| < zero_fraction * max|S|``. A
    precomputed ``curve`` on the same grid skips the engine evaluations.

    Raises
    ------
    DomainError
        if the grid does not span one decade of tau inside [1e-3, 0.1] or
        mixes separations
    FitFailure
        if the entropy is non-monotonic beyond 1e-3 of its maximum
    """
    configs = sorted(configs, key=lambda c: c.temperature)
    if len(configs) < 3:
        raise DomainError("nernst_check needs at least 3 grid points")
    if len({c.separation for c in configs}) != 1:
        raise DomainError("nernst_check grid must share one separation")
    taus = [c.tau for c in configs]
    if taus[0] < 1e-3 * (1 - 1e-9) or taus[-1] > 0.1 * (1 + 1e-9):
        raise DomainError("grid tau values must lie within [1e-3, 0.1]")
    if taus[-1] < 10.0 * taus[0] * (1 - 1e-9):
        raise DomainError("grid must span at least one decade of tau")

    conducting = with_conductivity and material.conductivity.enabled
    reference = residual_entropy(atom, material, configs[0]) if conducting else 0.0
    if curve is None:
        curve = entropy_curve(atom, material, configs, "finite_difference",
                              with_conductivity, step_fraction, series_spec,
                              quad_spec, jobs)
    t = np.asarray(curve.temperatures)
    s = np.asarray(curve.entropies)
    peak = float(np.max(np.abs(s)))
    if peak == 0.0:
        return NernstVerdict("satisfied", math.nan, 0.0, reference, degenerate=True)

    steps = np.diff(s)
    direction = np.sign(s[-1] - s[0]) or 1.0
    if np.any(direction * steps < -1e-3 * peak):
        raise FitFailure("entropy curve is not monotonic within noise")

    exponent = _log_slope(t, s)
    s0, s0_err, _ = _profile_fit(t, s)
    satisfied = abs(s0) < zero_fraction * peak
    if reference > 0:
        matches = abs(s0 - reference) <= reference_tolerance * reference
    else:
        matches = satisfied
    return NernstVerdict(
        classification="satisfied" if satisfied else "violated",
        fitted_exponent=exponent,
        extrapolated_s0=s0,
        reference_s0=reference,
        fit_error=s0_err,
        max_entropy=peak,
        matches_reference=bool(matches),
    )


def low_temperature_ratio(atom: AtomModel, material: MaterialModel, config: Configuration,
                          series_spec: SeriesSpec = SeriesSpec(),
                          quad_spec: QuadratureSpec = QuadratureSpec()) -> float:
    """Engine thermal correction in units of ``-pi^3 (k_B T)^4 / (15 (hbar c)^3) * scale``,
    where ``scale`` is the largest polarizability (m^3). Tends to the
    bracket ``(alpha0 B_alpha + beta0 B_beta) / scale`` as tau -> 0."""
    df = thermal_correction(atom, material, config, series_spec, quad_spec).value
    kt = K_B * config.temperature
    unit = -math.pi ** 3 * kt ** 4 / (15.0 * (HBAR * C_LIGHT) ** 3) * _scale(atom)
    return df / unit


def extract_low_temperature_coefficient(
    atom: AtomModel,
    material: MaterialModel,
    separation: float,
    taus: Sequence[float] = (0.0125, 0.016, 0.02, 0.025, 0.032, 0.04, 0.05, 0.064, 0.08),
    degree: int = 3,
    series_spec: SeriesSpec = SeriesSpec(),
    quad_spec: QuadratureSpec = QuadratureSpec(),
):
    """Brute-force tau -> 0 limit of :func:`low_temperature_ratio`.

    The ratio is smooth in tau, so a polynomial of ``degree`` is fitted and
    its intercept returned. The error is the larger of the statistical
    intercept error and the change when the degree is lowered by one.

    Returns
    -------
    (float, float)
        coefficient and its error estimate
    """
    taus = np.asarray(sorted(taus), dtype=float)
    if len(taus) < degree + 2:
        raise DomainError("need at least degree + 2 tau values")
    y = np.array([
        low_temperature_ratio(
            atom, material,
            Configuration(separation, temperature_for_tau(t, separation)),
            series_spec, quad_spec)
        for t in taus
    ])

    def intercept(deg):
        design = np.vander(taus, deg + 1, increasing=True)
        coef, *_ = np.linalg.lstsq(design, y, rcond=None)
        resid = y - design @ coef
        dof = max(len(y) - deg - 1, 1)
        cov = float(np.sum(resid ** 2)) / dof * np.linalg.inv(design.T @ design)
        return float(coef[0]), math.sqrt(max(cov[0, 0], 0.0))

    value, stat = intercept(degree)
    lower, _ = intercept(degree - 1)
    return value, max(stat, abs(value - lower))
