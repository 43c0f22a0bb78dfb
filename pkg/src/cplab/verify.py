"""Built-in oracle suites behind ``cpl verify``.

Every suite returns a :class:`SuiteResult`; ``run_suites`` collects them.
The engine-backed suites take a few seconds each and can be skipped with
``include_engine=False``.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .asymptotics import (
    SEAM_WIDTH,
    _b_closed_form,
    antiderivative_oracle,
    b_alpha_nonmagnetic,
    b_alpha_quadrature,
    coeff_B_alpha,
    coeff_B_beta,
)
from .errors import CancellationWarning
from .kernels import derivative
from .lifshitz import free_energy, r_te, r_tm
from .materials import AtomModel, Configuration, MaterialModel, temperature_for_tau

__all__ = ["SuiteResult", "SUITES", "run_suites"]

ETA_GRID = (1.5, 2.0, 3.0, 10.0)
EPS_GRID = (1.5, 2.0, 4.0, 10.0)


@dataclass(frozen=True)
class SuiteResult:
    name: str
    passed: bool
    metric: float
    tolerance: float
    detail: str = ""

    def __post_init__(self):
        object.__setattr__(self, "passed", bool(self.passed))
        object.__setattr__(self, "metric", float(self.metric))


def _reflection(eta, z, gamma0):
    s = math.sqrt(z * z + gamma0)
    return (eta * z - s) / (eta * z + s)


def antiderivative_suite(tolerance=1e-7, points=39):
    """Differentiate both antiderivatives on z in [1, 20] and compare with
    their integrands.

    r(eta, z) changes sign inside the grid for some gamma0, so the error is
    taken relative to the integrand scale ``|r(eta, inf)| * weight``.
    """
    worst = 0.0
    for eta in ETA_GRID:
        r_inf = (eta - 1.0) / (eta + 1.0)
        for gamma0 in (0.5, 2.0, 9.0, 20.0):
            for z in np.linspace(1.0, 20.0, points):
                r = _reflection(eta, z, gamma0)
                for which, weight in (("plain", 1.0), ("z_squared", z * z)):
                    est = derivative(lambda u: antiderivative_oracle(u, eta, gamma0, which),
                                     z, 1e-2 * z)
                    scale = max(abs(r), r_inf) * weight
                    worst = max(worst, abs(est.value - r * weight) / scale)
    return SuiteResult("antiderivative", worst <= tolerance, worst, tolerance)


def nonmagnetic_limit_suite(tolerance=1e-5):
    worst = 0.0
    for e in EPS_GRID:
        limit = b_alpha_nonmagnetic(e)
        worst = max(worst, abs(coeff_B_alpha(e, 1.0 + 1e-6) - limit) / abs(limit))
    return SuiteResult("nonmagnetic-limit", worst <= tolerance, worst, tolerance)


def seam_suite(tolerance=1e-8):
    """Branch values on both sides of mu0 = 1 + SEAM_WIDTH must meet."""
    worst = 0.0
    for e in EPS_GRID:
        inside = coeff_B_alpha(e, 1.0 + SEAM_WIDTH * (1 - 1e-9))
        outside = _b_closed_form(e, 1.0 + SEAM_WIDTH * (1 + 1e-9))
        worst = max(worst, abs(inside - outside) / abs(outside))
    return SuiteResult("seam-continuity", worst <= tolerance, worst, tolerance)


def closed_form_suite(tolerance=1e-9):
    """Closed-form B_alpha against the one-dimensional quadrature oracle."""
    worst = 0.0
    for e in EPS_GRID + (3.0, 25.0):
        for m in (1.0, 1.0 + 1e-5, 1.5, 2.0, 4.0, 10.0):
            ref = b_alpha_quadrature(e, m)
            worst = max(worst, abs(coeff_B_alpha(e, m) - ref) / abs(ref))
    return SuiteResult("closed-form-vs-quadrature", worst <= tolerance, worst, tolerance)


def swap_suite(tolerance=1e-12):
    """B_beta is B_alpha with the roles exchanged; at mu0 = 1 the swapped
    argument is degenerate and is checked against quadrature instead."""
    worst = 0.0
    for e in EPS_GRID:
        for m in (1.5, 3.0, 10.0, e):
            worst = max(worst, abs(coeff_B_beta(e, m) - coeff_B_alpha(m, e)))
        worst = max(worst, abs(coeff_B_beta(e, e) - coeff_B_alpha(e, e)))
        ref = b_alpha_quadrature(1.0, e)
        worst = max(worst, abs(coeff_B_beta(e, 1.0) - ref) / ref)
    return SuiteResult("swap-symmetry", worst <= tolerance, worst, tolerance)


def reflection_bound_suite(samples=10_000, seed=12345):
    rng = np.random.default_rng(seed)
    eps = rng.uniform(1.0, 100.0, samples)
    mu = rng.uniform(1.0, 20.0, samples)
    y = rng.uniform(0.0, 50.0, samples)
    zeta = y * rng.uniform(0.0, 1.0, samples)
    bound = max(np.max(np.abs(r_tm(zeta, y, eps, mu))), np.max(np.abs(r_te(zeta, y, eps, mu))))
    dual = np.max(np.abs(r_tm(zeta, y, eps, mu) - r_te(zeta, y, mu, eps)))
    ok = bound <= 1.0 and dual == 0.0
    return SuiteResult("reflection-bounds", bool(ok), float(bound), 1.0,
                       f"duality residual {dual:.1e}")


def duality_suite(tolerance=1e-12, tau=0.1):
    a = 1e-6
    config = Configuration(a, temperature_for_tau(tau, a))
    alpha, beta = 1e-3 * a ** 3, 0.3e-3 * a ** 3
    worst = 0.0
    for e, m in ((4.0, 2.0), (3.0, 1.0), (1.5, 7.0)):
        one = free_energy(AtomModel(alpha, beta), MaterialModel(e, m), config).value
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            two = free_energy(AtomModel(beta, alpha), MaterialModel(m, e), config).value
        worst = max(worst, abs(one - two) / abs(one))
    return SuiteResult("free-energy-duality", worst <= tolerance, worst, tolerance)


def erratum_suite(separation=1e-6):
    """Engine extraction of the nonmagnetic coefficient must match the 2 eps0
    form within its error and reject the 3 eps0 form by more than 3 errors."""
    from .thermo import extract_low_temperature_coefficient

    worst_match, worst_reject = 0.0, math.inf
    for e in (2.0, 4.0):
        atom = AtomModel(1e-3 * separation ** 3)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", CancellationWarning)
            value, err = extract_low_temperature_coefficient(atom, MaterialModel(e), separation)
        worst_match = max(worst_match, abs(value - b_alpha_nonmagnetic(e)) / err)
        worst_reject = min(worst_reject, abs(value - b_alpha_nonmagnetic(e, 3.0)) / err)
    ok = worst_match <= 1.0 and worst_reject > 3.0
    return SuiteResult("erratum-adjudication", ok, worst_match, 1.0,
                       f"3eps0 variant off by {worst_reject:.1f} fit errors")


SUITES = {
    "antiderivative": antiderivative_suite,
    "nonmagnetic-limit": nonmagnetic_limit_suite,
    "seam-continuity": seam_suite,
    "closed-form-vs-quadrature": closed_form_suite,
    "swap-symmetry": swap_suite,
    "reflection-bounds": reflection_bound_suite,
    "free-energy-duality": duality_suite,
    "erratum-adjudication": erratum_suite,
}
ENGINE_SUITES = ("free-energy-duality", "erratum-adjudication")


def run_suites(names=None, include_engine=True):
    names = list(SUITES) if names is None else list(names)
    unknown = [n for n in names if n not in SUITES]
    if unknown:
        raise ValueError(f"unknown suites: {unknown}")
    return [SUITES[n]() for n in names if include_engine or n not in ENGINE_SUITES]
