r"""Closed-form low-temperature asymptotics for a static ferromagnetic
dielectric plate.

With frequency-independent :math:`\epsilon_0, \mu_0, \alpha_0, \beta_0`
the Lifshitz integrand admits the small-:math:`x` expansion

.. math::
    \Phi(x) = -\hat\alpha_0\left[4 r_\epsilon - A(\epsilon_0)x^2 + B_\alpha x^3\right]
              -\hat\beta_0\left[4 r_\mu - A(\mu_0)x^2 + B_\beta x^3\right],

with :math:`r_\eta = (\eta-1)/(\eta+1)`. Only the odd :math:`x^3` term
survives in the thermal correction, which is therefore
:math:`\propto T^4` and separation independent.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from scipy.integrate import quad

from .errors import DomainError, ModelMismatch
from .lifshitz import FreeEnergyResult
from .materials import C_LIGHT, HBAR, K_B, AtomModel, Configuration, MaterialModel

__all__ = [
    "AsymptoticCoefficients",
    "SEAM_WIDTH",
    "coeff_A",
    "coeff_B_alpha",
    "coeff_B_beta",
    "b_alpha_nonmagnetic",
    "b_alpha_quadrature",
    "asymptotic_coefficients",
    "phi_expansion",
    "i3_exact_and_expansion",
    "antiderivative_oracle",
    "delta_f_low_temperature",
    "entropy_low_temperature",
    "dc_shift",
    "dc_modified_free_energy",
    "residual_entropy",
]

#: width of the interpolation seam next to eta = 1
SEAM_WIDTH = 1e-4
# below this distance of the leading response from 1 the quadrature route is used
_FIRST_SEAM = 1e-2


@dataclass(frozen=True)
class AsymptoticCoefficients:
    a_eps: float
    a_mu: float
    b_alpha: float
    b_beta: float


def _static_r(eta):
    return (eta - 1.0) / (eta + 1.0)


def coeff_A(eta: float, epsilon0: float, mu0: float) -> float:
    """x^2 coefficient ``2 eta gamma0/(eta+1)^2 + r_eps + r_mu``."""
    gamma0 = epsilon0 * mu0 - 1.0
    return 2.0 * eta * gamma0 / (eta + 1.0) ** 2 + _static_r(epsilon0) + _static_r(mu0)


def _log_ratio(eta, gamma0, root_em):
    s = math.sqrt(eta * eta - 1.0)
    g = math.sqrt(gamma0)
    return math.log((g + s) / (eta * g + root_em * s))


def _b_closed_form(e: float, m: float) -> float:
    """x^3 coefficient of the alpha channel for e > 1, m > 1.

    The last logarithm carries m**2; see the degenerate-limit tests for the
    check against the nonmagnetic formula.
    """
    g = e * m - 1.0
    root_g = math.sqrt(g)
    root_em = math.sqrt(e * m)
    e2m1 = e * e - 1.0
    m2m1 = m * m - 1.0
    out = (m * m + 1.0) / m2m1
    out += (e ** 4 - 12.0 * e * e * g - 1.0) / (3.0 * e2m1 ** 2)
    out += (2.0 * e * e * root_g * (2.0 * e * m - 1.0 - e * e) / e2m1 ** 2.5
            * _log_ratio(e, g, root_em))
    out -= 2.0 * root_em * (e / (3.0 * e2m1) + m / m2m1
                            - 2.0 / 3.0 * e * (e * e + 2.0) * g / e2m1 ** 2)
    out -= 2.0 * m * m * root_g / m2m1 ** 1.5 * _log_ratio(m, g, root_em)
    return out


def _b_unit_first(m: float) -> float:
    """Limit of the alpha-channel coefficient when the coupled response
    (first argument) tends to 1, for m > 1."""
    g = m - 1.0
    root_g = math.sqrt(g)
    s = math.sqrt(m * m - 1.0)
    log = math.log((root_g + s) / (m * root_g + math.sqrt(m) * s))
    plain = ((m * m + 1.0) - 2.0 * m * math.sqrt(m) - 2.0 * m * m * root_g / s * log) / (m * m - 1.0)
    return plain + (8.0 / 15.0 * m ** 2.5 - 2.0 / 3.0 * m ** 1.5 - m / 3.0 + 7.0 / 15.0) / g


def b_alpha_nonmagnetic(epsilon0: float, erratum_factor: float = 2.0) -> float:
    """Nonmagnetic (mu0 = 1) limit of B_alpha.

    ``erratum_factor`` is the coefficient of ``eps0 (sqrt(eps0) - 1)`` in the
    last term; 2 is correct, 3 reproduces an earlier misprint and exists
    only so the two can be compared against the engine.
    """
    e = epsilon0
    if not e > 1:
        raise DomainError("b_alpha_nonmagnetic needs epsilon0 > 1")
    se = math.sqrt(e)
    sp = math.sqrt(e + 1.0)
    t1 = (e - 1.0) / (e + 1.0) * (7.0 * e + 1.0) / (3.0 * (e + 1.0))
    t2 = -2.0 * e * e / (e + 1.0) ** 2.5 * math.log((1.0 + sp) / (se * (se + sp)))
    t3 = ((se - 1.0) * ((3.0 * e * e + 1.0) * (2.0 * se + 1.0) + erratum_factor * e * (se - 1.0))
          / (3.0 * (se + 1.0) * (e + 1.0) ** 2))
    return t1 + t2 + t3


def _b(first: float, second: float) -> float:
    """Alpha-channel coefficient with ``first`` the response entering the
    leading reflection coefficient and ``second`` the other one."""
    d = SEAM_WIDTH
    if first <= 1.0 and second <= 1.0:
        return 0.0
    if first - 1.0 <= _FIRST_SEAM:
        # (first^2 - 1)^(5/2) denominators cancel badly here
        if first == 1.0 and second - 1.0 > d:
            return _b_unit_first(second)
        return b_alpha_quadrature(first, second)
    if second - 1.0 <= d:
        # blend linearly into the second = 1 limit across the seam
        limit = b_alpha_nonmagnetic(first)
        edge = _b_closed_form(first, 1.0 + d)
        return limit + (second - 1.0) / d * (edge - limit)
    return _b_closed_form(first, second)


def coeff_B_alpha(epsilon0: float, mu0: float) -> float:
    """x^3 coefficient of the electric channel.

    Within ``SEAM_WIDTH`` of mu0 = 1 the value is blended linearly into the
    nonmagnetic limit, which keeps it continuous and accurate there.
    """
    if not epsilon0 > 1:
        raise DomainError("coeff_B_alpha needs epsilon0 > 1")
    if not mu0 >= 1:
        raise DomainError("coeff_B_alpha needs mu0 >= 1")
    return _b(epsilon0, mu0)


def coeff_B_beta(epsilon0: float, mu0: float) -> float:
    """x^3 coefficient of the magnetic channel: B_alpha with eps0 <-> mu0."""
    if epsilon0 < 1 or mu0 < 1:
        raise DomainError("coeff_B_beta needs epsilon0 >= 1 and mu0 >= 1")
    if epsilon0 <= 1 and mu0 <= 1:
        raise DomainError("coeff_B_beta needs epsilon0 > 1 or mu0 > 1")
    return _b(mu0, epsilon0)


def _stable_dr(eta, z, gamma0):
    # r(eta, z) - r_inf without cancellation
    s = math.sqrt(z * z + gamma0)
    return -2.0 * eta * gamma0 / ((z + s) * (eta * z + s) * (eta + 1.0))


def _stable_q(eta, z, gamma0):
    # z^2 (r - r_inf) + eta gamma0/(eta+1)^2 without cancellation
    s = math.sqrt(z * z + gamma0)
    num = gamma0 + (1.0 + eta) * z * gamma0 / (s + z)
    return eta * gamma0 * num / ((eta + 1.0) ** 2 * (z + s) * (eta * z + s))


def b_alpha_quadrature(epsilon0: float, mu0: float) -> float:
    r"""B_alpha by direct quadrature, independent of the closed form.

    From :math:`\Phi(x) = x^3\int_1^\infty e^{-xz} h(z)\,dz` with
    :math:`h = h_2 z^2 + h_0 + O(z^{-2})`, the :math:`x^3` coefficient is
    :math:`-h_2/3 - h_0 + \int_1^\infty (h - h_2 z^2 - h_0)\,dz`.
    """
    e, m = epsilon0, mu0
    g = e * m - 1.0
    if g == 0:
        return 0.0
    re = _static_r(e)
    opts = dict(epsabs=0.0, epsrel=1e-13, limit=200)
    bulk = quad(lambda z: _stable_q(e, z, g), 1.0, math.inf, **opts)[0]
    edge = quad(lambda z: _stable_dr(e, z, g) + _stable_dr(m, z, g), 1.0, math.inf, **opts)[0]
    return -2.0 * re / 3.0 + coeff_A(e, e, m) + 2.0 * bulk - edge


def asymptotic_coefficients(material: MaterialModel) -> AsymptoticCoefficients:
    e, m = material.epsilon0, material.mu0
    return AsymptoticCoefficients(
        a_eps=coeff_A(e, e, m),
        a_mu=coeff_A(m, e, m),
        b_alpha=coeff_B_alpha(e, m),
        b_beta=coeff_B_beta(e, m),
    )


def _channel_coefficients(atom, material):
    """(A_eps, A_mu, B_alpha, B_beta) skipping channels with zero weight."""
    e, m = material.epsilon0, material.mu0
    if material.gamma0 == 0:
        return 0.0, 0.0, 0.0, 0.0
    b_alpha = coeff_B_alpha(e, m) if atom.alpha0 != 0 else 0.0
    b_beta = coeff_B_beta(e, m) if atom.beta0 != 0 else 0.0
    return coeff_A(e, e, m), coeff_A(m, e, m), b_alpha, b_beta


def phi_expansion(x: float, atom: AtomModel, material: MaterialModel,
                  config: Configuration) -> float:
    """Three-term small-x expansion of Phi with polarizabilities normalized
    by the separation cubed, matching :func:`cplab.lifshitz.phi`."""
    a3 = config.separation ** 3
    wa, wb = atom.alpha0 / a3, atom.beta0 / a3
    e, m = material.epsilon0, material.mu0
    a_eps, a_mu, b_alpha, b_beta = _channel_coefficients(atom, material)
    return (-wa * (4.0 * _static_r(e) - a_eps * x * x + b_alpha * x ** 3)
            - wb * (4.0 * _static_r(m) - a_mu * x * x + b_beta * x ** 3))


def i3_exact_and_expansion(x: float, eta: float, epsilon0: float, mu0: float):
    """(exact x^3 I_3, its three-term expansion) for the polynomial part of
    the subtracted integrand, ``int_1^inf e^{-xz} [2 z^2 r_eta - A(eta)] dz``."""
    if x < 0:
        raise ValueError("x must be non-negative")
    r = _static_r(eta)
    a = coeff_A(eta, epsilon0, mu0)
    # x^3 int_1^inf e^{-xz} z^2 dz = e^{-x}(x^2 + 2x + 2)
    exact = 2.0 * r * math.exp(-x) * (x * x + 2.0 * x + 2.0) - a * x * x * math.exp(-x)
    expansion = 4.0 * r - a * x * x + (3.0 * a - 2.0 * r) / 3.0 * x ** 3
    return exact, expansion


def antiderivative_oracle(z: float, eta: float, gamma0: float, which: str = "plain") -> float:
    """Closed-form antiderivatives (constant dropped) of ``r(eta, z)``
    (``which='plain'``) and ``z^2 r(eta, z)`` (``which='z_squared'``), with
    ``r = (eta z - sqrt(z^2+gamma0)) / (eta z + sqrt(z^2+gamma0))``."""
    if not eta > 1:
        raise DomainError("antiderivative_oracle needs eta > 1")
    if not gamma0 > 0:
        raise DomainError("antiderivative_oracle needs gamma0 > 0")
    e2 = eta * eta - 1.0
    se = math.sqrt(e2)
    g = math.sqrt(gamma0)
    s = math.sqrt(z * z + gamma0)
    log = math.log((g + z * se) / (eta * g + s * se))
    if which == "plain":
        return ((eta * eta + 1.0) * z - 2.0 * eta * s - 2.0 * eta * eta * g / se * log) / e2
    if which == "z_squared":
        return 2.0 / (3.0 * e2 * e2) * (
            3.0 * gamma0 * eta * eta * z + 0.5 * (eta ** 4 - 1.0) * z ** 3
            - eta * s * (e2 * z * z + gamma0 * (eta * eta + 2.0))
            - 3.0 * eta * eta * gamma0 * g / se * log
        )
    raise ValueError("which must be 'plain' or 'z_squared'")


def _thermal_bracket(atom, material):
    _, _, b_alpha, b_beta = _channel_coefficients(atom, material)
    return atom.alpha0 * b_alpha + atom.beta0 * b_beta


def delta_f_low_temperature(atom: AtomModel, material: MaterialModel,
                            config: Configuration) -> float:
    """Leading thermal correction (J), ``-pi^3 (k_B T)^4 / (15 (hbar c)^3)``
    times ``alpha0 B_alpha + beta0 B_beta``; no separation dependence."""
    kt = K_B * config.temperature
    return -math.pi ** 3 * kt ** 4 / (15.0 * (HBAR * C_LIGHT) ** 3) * _thermal_bracket(atom, material)


def entropy_low_temperature(atom: AtomModel, material: MaterialModel, temperature: float) -> float:
    """Leading low-temperature entropy (J/K); vanishes as T^3."""
    kt = K_B * temperature
    return (4.0 * math.pi ** 3 * K_B * kt ** 3 / (15.0 * (HBAR * C_LIGHT) ** 3)
            * _thermal_bracket(atom, material))


def dc_shift(atom: AtomModel, material: MaterialModel, config: Configuration) -> float:
    """Free-energy change (J) from the l = 0 TM coefficient jumping to 1."""
    e = material.epsilon0
    one_minus_r = 0.0 if math.isinf(e) else 1.0 - _static_r(e)
    return -K_B * config.temperature / (4.0 * config.separation ** 3) * one_minus_r * atom.alpha0


def dc_modified_free_energy(base, atom: AtomModel, material: MaterialModel,
                            config: Configuration) -> float:
    """Free energy with dc conductivity from the conductivity-free one.

    ``base`` is a :class:`FreeEnergyResult` or a value in joules. Terms
    with l >= 1 are left unchanged (their change is exponentially small
    for a dielectric whose conductivity freezes out).
    """
    if not material.conductivity.enabled:
        raise ModelMismatch("material has no dc conductivity")
    value = base.value if isinstance(base, FreeEnergyResult) else float(base)
    return value + dc_shift(atom, material, config)


def residual_entropy(atom: AtomModel, material: MaterialModel, config: Configuration) -> float:
    """Zero-temperature entropy (J/K) with dc conductivity included,
    ``k_B alpha0 / (2 a^3 (eps0 + 1))``."""
    if not material.epsilon0 > 1:
        raise DomainError("residual_entropy needs epsilon0 > 1")
    if not atom.alpha0 > 0:
        raise DomainError("residual_entropy needs alpha0 > 0")
    return K_B * atom.alpha0 / (2.0 * config.separation ** 3 * (material.epsilon0 + 1.0))
