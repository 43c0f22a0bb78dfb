r"""Brute-force Lifshitz theory for an atom above a magnetodielectric plate.

The free energy is the primed Matsubara sum

.. math::
    F(a, T) = \frac{k_B T}{8 a^3} {\sum_{l\ge0}}' \Phi(\zeta_l),
    \qquad \zeta_l = \tau l,

with :math:`\Phi = \Phi^{(\alpha)} + \Phi^{(\beta)}` given by
exponentially weighted integrals of the TM/TE reflection coefficients.
Internally polarizabilities are normalized as :math:`\hat\alpha = \alpha/a^3`
so :math:`\Phi` is dimensionless; joules appear only in the public results.

The thermal correction is computed as "Matsubara sum minus its continuum
limit", which is mathematically the Abel-Plana remainder.
"""
from __future__ import annotations

import dataclasses
import functools
import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.integrate import IntegrationWarning, quad

from .errors import CancellationWarning
from .kernels import (
    QuadratureSpec,
    SeriesSpec,
    integrate_semi_infinite,
    sum_series,
)
from .materials import (
    HBAR,
    C_LIGHT,
    K_B,
    AtomModel,
    ConductivityModel,
    Configuration,
    MaterialModel,
    epsilon_at,
    mu_at,
    polarizabilities_at,
)

__all__ = [
    "ReflectionInput",
    "FreeEnergyResult",
    "QuadratureDiagnostics",
    "ThermalCorrection",
    "r_tm",
    "r_te",
    "r_tm_static",
    "r_te_static",
    "phi",
    "free_energy",
    "zero_temperature_energy",
    "thermal_correction",
    "delta_free_energy",
]

_EPS = np.finfo(float).eps
_ZERO_T_REL = 2e-14


@dataclass(frozen=True)
class ReflectionInput:
    zeta: float
    y: float
    epsilon: float
    mu: float

    def __post_init__(self):
        if not (self.y >= self.zeta >= 0):
            raise ValueError("need y >= zeta >= 0")
        if not (self.epsilon >= 1 and self.mu >= 1):
            raise ValueError("need epsilon >= 1 and mu >= 1")

    def tm(self):
        return r_tm(self.zeta, self.y, self.epsilon, self.mu)

    def te(self):
        return r_te(self.zeta, self.y, self.epsilon, self.mu)


@dataclass(frozen=True)
class QuadratureDiagnostics:
    max_error: float
    rss_error: float
    evaluations: int


@dataclass(frozen=True)
class FreeEnergyResult:
    value: float
    terms_used: int
    truncation_estimate: float
    quadrature_diagnostics: QuadratureDiagnostics


@dataclass(frozen=True)
class ThermalCorrection:
    value: float
    error_estimate: float
    terms_used: int


def r_tm(zeta, y, epsilon, mu):
    r"""TM reflection coefficient at imaginary frequency.

    .. math::
        r_\mathrm{TM} = \frac{\epsilon y - \sqrt{y^2 + \zeta^2\gamma}}
                             {\epsilon y + \sqrt{y^2 + \zeta^2\gamma}},
        \qquad \gamma = \epsilon\mu - 1

    Accepts scalars or numpy arrays.
    """
    return _fresnel(zeta, y, epsilon, mu, epsilon)


def r_te(zeta, y, epsilon, mu):
    """TE reflection coefficient; same as :func:`r_tm` with epsilon -> mu
    in the prefactor."""
    return _fresnel(zeta, y, epsilon, mu, mu)


def _fresnel(zeta, y, epsilon, mu, lead):
    root = np.sqrt(np.square(y) + np.square(zeta) * (np.multiply(epsilon, mu) - 1.0))
    den = lead * np.asarray(y, dtype=float) + root
    with np.errstate(invalid="ignore", divide="ignore"):
        r = (lead * y - root) / den
    # y = zeta = 0 is the static limit (lead - 1)/(lead + 1)
    r = np.where(den == 0, (np.asarray(lead, dtype=float) - 1.0) / (np.asarray(lead) + 1.0), r)
    return float(r) if r.ndim == 0 else r


def r_tm_static(material: MaterialModel, with_conductivity: bool = False) -> float:
    """Zero-frequency TM coefficient; exactly 1 for a conducting plate."""
    if with_conductivity and material.conductivity.enabled:
        return 1.0
    eps = material.epsilon0
    if math.isinf(eps):
        return 1.0
    return (eps - 1.0) / (eps + 1.0)


def r_te_static(material: MaterialModel) -> float:
    mu = material.mu0
    if math.isinf(mu):
        return 1.0
    return (mu - 1.0) / (mu + 1.0)


def _phi_integral(zeta, eps, mu, wa, wb, spec):
    """Quadrature part of Phi for zeta > 0 with polarizability weights
    (wa, wb); returns the integral of the bracket, Phi = -integral."""
    gz = zeta * zeta * (eps * mu - 1.0)
    z2 = zeta * zeta
    wab = wa + wb
    exp = math.exp
    sqrt = math.sqrt

    def integrand(y):
        root = sqrt(y * y + gz)
        tm = (eps * y - root) / (eps * y + root)
        te = (mu * y - root) / (mu * y + root)
        return exp(-y) * (2.0 * y * y * (wa * tm + wb * te) - z2 * wab * (tm + te))

    # r depends on y/zeta only; break where it varies for small zeta
    points = [zeta * k for k in (1.5, 3.0, 10.0)]
    return integrate_semi_infinite(integrand, zeta, spec, points=points)


def _static_phi(material, wa, wb, with_conductivity):
    # constant coefficients: int_0^inf e^{-y} 2y^2 dy = 4
    tm0 = r_tm_static(material, with_conductivity)
    te0 = r_te_static(material)
    return -4.0 * (wa * tm0 + wb * te0)


def _without_conductivity(material: MaterialModel) -> MaterialModel:
    if material.conductivity.kind == "none":
        return material
    return dataclasses.replace(material, conductivity=ConductivityModel())


def phi(
    zeta_l: float,
    atom: AtomModel,
    material: MaterialModel,
    config: Configuration,
    spec: QuadratureSpec = QuadratureSpec(),
    with_conductivity: bool = False,
) -> float:
    r"""Dimensionless :math:`\Phi(\zeta_l)` with normalized polarizabilities
    :math:`\alpha/a^3`, :math:`\beta/a^3`.

    ``zeta_l = 0`` uses the closed-form static reflection coefficients.
    """
    if zeta_l < 0:
        raise ValueError("zeta_l must be non-negative")
    mat = material if with_conductivity else _without_conductivity(material)
    a3 = config.separation ** 3
    alpha, beta = polarizabilities_at(atom, zeta_l, config)
    if zeta_l == 0:
        return _static_phi(mat, alpha / a3, beta / a3, with_conductivity)
    eps = epsilon_at(mat, zeta_l, config)
    mu = mu_at(mat, zeta_l, config)
    scale = max(abs(alpha), abs(beta))
    if scale == 0 or (eps == 1.0 and mu == 1.0):
        return 0.0
    res = _phi_integral(zeta_l, eps, mu, alpha / scale, beta / scale, spec)
    return -res.value * scale / a3


def _scale(atom):
    # largest polarizability magnitude; keeps quadrature floors O(1)
    values = [abs(atom.alpha0), abs(atom.beta0)]
    for table in (atom.alpha_table, atom.beta_table):
        if table is not None:
            values.extend(abs(v) for v in table.values)
    return max(values)


def _matsubara(atom, material, config, series_spec, quad_spec, with_conductivity):
    """Primed sum of Phi in units of ``scale / a^3``.

    Returns (scale, SeriesResult, diagnostics, sum of |terms|).
    """
    if config.temperature <= 0:
        raise ValueError("the Matsubara sum needs T > 0")
    mat = material if with_conductivity else _without_conductivity(material)
    tau = config.tau
    scale = _scale(atom)
    errors = []
    evaluations = [0]
    magnitude = [0.0]

    def term(l):
        zeta = tau * l
        alpha, beta = polarizabilities_at(atom, zeta, config)
        wa, wb = alpha / scale, beta / scale
        if l == 0:
            value = _static_phi(mat, wa, wb, with_conductivity)
        else:
            eps = epsilon_at(mat, zeta, config)
            mu = mu_at(mat, zeta, config)
            res = _phi_integral(zeta, eps, mu, wa, wb, quad_spec)
            errors.append(res.error)
            evaluations[0] += res.evaluations
            value = -res.value
        magnitude[0] += abs(value)
        return value

    if scale == 0:
        series = sum_series(lambda l: 0.0, series_spec, halve_first=True)
    else:
        series = sum_series(term, series_spec, halve_first=True)
    errs = np.asarray(errors) if errors else np.zeros(1)
    diag = QuadratureDiagnostics(
        max_error=float(errs.max()),
        rss_error=float(math.sqrt(math.fsum(errs * errs))),
        evaluations=evaluations[0],
    )
    return scale, series, diag, magnitude[0]


def free_energy(
    atom: AtomModel,
    material: MaterialModel,
    config: Configuration,
    series_spec: SeriesSpec = SeriesSpec(),
    quad_spec: QuadratureSpec = QuadratureSpec(),
    with_conductivity: bool = False,
) -> FreeEnergyResult:
    """Casimir-Polder free energy (J) from the Matsubara sum.

    With ``with_conductivity`` the l = 0 TM coefficient is 1 and the
    l >= 1 terms use the conducting permittivity.
    """
    scale, series, diag, _ = _matsubara(
        atom, material, config, series_spec, quad_spec, with_conductivity)
    prefactor = K_B * config.temperature / 8.0 * scale / config.separation ** 3
    return FreeEnergyResult(
        value=prefactor * series.value,
        terms_used=series.terms_used,
        truncation_estimate=abs(prefactor) * series.truncation_estimate,
        quadrature_diagnostics=diag,
    )


def _h_static(z, eps, mu, wa, wb):
    # zeta^3-stripped integrand: Phi(zeta) = zeta^3 int_1^inf e^{-zeta z} h(z) dz
    root = math.sqrt(z * z + eps * mu - 1.0)
    tm = (eps * z - root) / (eps * z + root)
    te = (mu * z - root) / (mu * z + root)
    return -(2.0 * z * z * (wa * tm + wb * te) - (wa + wb) * (tm + te))


@functools.lru_cache(maxsize=256)
def _zero_t_integral(atom, material, separation, quad_spec):
    """int_0^inf Phi(zeta) d zeta in units of ``scale / a^3``.

    Returns (scale, value, error).
    """
    scale = _scale(atom)
    if scale == 0:
        return 0.0, 0.0, 0.0
    if not (material.dispersive or atom.dispersive):
        eps, mu = material.epsilon0, material.mu0
        if eps == 1.0 and mu == 1.0:
            return scale, 0.0, 0.0
        wa, wb = atom.alpha0 / scale, atom.beta0 / scale
        # Exchanging the zeta and z integrals gives 6 int_1^inf h(z)/z^4 dz;
        # with z = 1/u the integrand is smooth on [0, 1].
        with warnings.catch_warnings():
            # roundoff at the 1e-14 request is expected; the error is kept
            warnings.simplefilter("ignore", IntegrationWarning)
            value, error = quad(
                lambda u: 6.0 * u * u * _h_static(1.0 / u, eps, mu, wa, wb) if u > 0
                else -12.0 * (wa * (eps - 1) / (eps + 1) + wb * (mu - 1) / (mu + 1)),
                0.0, 1.0, epsabs=0.0, epsrel=_ZERO_T_REL, limit=200,
            )
        return scale, value, error
    config = Configuration(separation, 0.0)

    def phi_scaled(zeta):
        return phi(zeta, atom, material, config, quad_spec) * separation ** 3 / scale

    res = integrate_semi_infinite(phi_scaled, 0.0, quad_spec, tail_degree=3)
    return scale, res.value, res.error


def zero_temperature_energy(
    atom: AtomModel,
    material: MaterialModel,
    config: Configuration,
    quad_spec: QuadratureSpec = QuadratureSpec(),
) -> float:
    r"""Casimir-Polder energy at T = 0 (J):
    :math:`E(a) = \frac{\hbar c}{32\pi a^4}\int_0^\infty d\zeta\,\Phi(\zeta)`.

    The dc conductivity of the plate plays no role here.
    """
    mat = _without_conductivity(material)
    scale, value, _ = _zero_t_integral(atom, mat, config.separation, quad_spec)
    return HBAR * C_LIGHT / (32.0 * math.pi * config.separation ** 4) * scale * value


def thermal_correction(
    atom: AtomModel,
    material: MaterialModel,
    config: Configuration,
    series_spec: SeriesSpec = SeriesSpec(),
    quad_spec: QuadratureSpec = QuadratureSpec(),
    with_conductivity: bool = False,
) -> ThermalCorrection:
    """Free energy minus zero-temperature energy, with a combined error
    estimate. Emits :class:`CancellationWarning` when the result is below
    1000 times that estimate."""
    scale, series, diag, magnitude = _matsubara(
        atom, material, config, series_spec, quad_spec, with_conductivity)
    if scale == 0:
        return ThermalCorrection(0.0, 0.0, series.terms_used)
    _, integral, integral_err = _zero_t_integral(
        atom, _without_conductivity(material), config.separation, quad_spec)
    tau = config.tau
    reduced = series.value - integral / tau
    # independent per-term quadrature errors add in quadrature; the rest
    # are bounds on truncation, the continuum integral and rounding
    noise = (diag.rss_error + series.truncation_estimate + integral_err / tau
             + 4 * _EPS * (magnitude + abs(integral) / tau))
    prefactor = K_B * config.temperature / 8.0 * scale / config.separation ** 3
    value = prefactor * reduced
    error = abs(prefactor) * noise
    if abs(value) < 1e3 * error:
        warnings.warn(
            f"thermal correction {value:.3e} J within 1e3 x numeric error "
            f"{error:.3e} J (tau={tau:.3g})",
            CancellationWarning, stacklevel=2,
        )
    return ThermalCorrection(value, error, series.terms_used)


def delta_free_energy(
    atom: AtomModel,
    material: MaterialModel,
    config: Configuration,
    series_spec: SeriesSpec = SeriesSpec(),
    quad_spec: QuadratureSpec = QuadratureSpec(),
    with_conductivity: bool = False,
) -> float:
    """Temperature-dependent part of the free energy (J)."""
    return thermal_correction(
        atom, material, config, series_spec, quad_spec, with_conductivity).value
