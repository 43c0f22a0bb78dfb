"""Plate and atom response models and the geometry/temperature configuration.

Inputs are SI (metres, kelvin, m^3 polarizabilities in the Gaussian
convention, conductivity in s^-1). The engine works with the dimensionless
Matsubara variable ``zeta = xi / omega_c`` where ``omega_c = c / (2 a)``.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy.constants import Boltzmann as K_B
from scipy.constants import c as C_LIGHT
from scipy.constants import hbar as HBAR

from .errors import DivergentStaticLimit, PolarizabilityWarning

__all__ = [
    "K_B",
    "HBAR",
    "C_LIGHT",
    "DispersionTable",
    "ConductivityModel",
    "MaterialModel",
    "AtomModel",
    "Configuration",
    "dimensionless_tau",
    "temperature_for_tau",
    "grid",
    "epsilon_at",
    "mu_at",
    "polarizabilities_at",
]

CONDUCTIVITY_KINDS = ("none", "constant", "arrhenius")


@dataclass(frozen=True)
class DispersionTable:
    """Response tabulated on imaginary frequencies ``xi`` (rad/s), linearly
    interpolated and clamped to the end values outside the table."""

    frequencies: tuple
    values: tuple

    def __post_init__(self):
        xi = np.asarray(self.frequencies, dtype=float)
        if xi.ndim != 1 or xi.size < 2 or xi.size != len(self.values):
            raise ValueError("dispersion table needs >= 2 matching (xi, value) pairs")
        if np.any(np.diff(xi) <= 0):
            raise ValueError("dispersion table frequencies must be strictly ascending")
        object.__setattr__(self, "frequencies", tuple(float(v) for v in xi))
        object.__setattr__(self, "values", tuple(float(v) for v in self.values))

    def __call__(self, xi: float) -> float:
        return float(np.interp(xi, self.frequencies, self.values))


@dataclass(frozen=True)
class ConductivityModel:
    """dc conductivity ``sigma(T)`` in s^-1.

    ``constant``: ``sigma(T) = sigma0``.
    ``arrhenius``: ``sigma(T) = sigma0 * exp(-activation / (k_B T))``.
    """

    kind: str = "none"
    sigma0: float = 0.0
    activation: float = 0.0

    def __post_init__(self):
        if self.kind not in CONDUCTIVITY_KINDS:
            raise ValueError(f"conductivity kind must be one of {CONDUCTIVITY_KINDS}")
        if self.sigma0 < 0:
            raise ValueError("sigma0 must be non-negative")
        if self.kind == "none" and self.sigma0 != 0:
            raise ValueError("kind='none' requires sigma0 = 0")
        if self.activation < 0:
            raise ValueError("activation energy must be non-negative")

    @property
    def enabled(self) -> bool:
        return self.kind != "none" and self.sigma0 > 0

    def sigma(self, temperature: float) -> float:
        if not self.enabled:
            return 0.0
        if self.kind == "constant":
            return self.sigma0
        if temperature <= 0:
            return 0.0
        return self.sigma0 * math.exp(-self.activation / (K_B * temperature))


@dataclass(frozen=True)
class MaterialModel:
    epsilon0: float
    mu0: float = 1.0
    conductivity: ConductivityModel = field(default_factory=ConductivityModel)
    epsilon_table: Optional[DispersionTable] = None
    mu_table: Optional[DispersionTable] = None

    def __post_init__(self):
        # epsilon0 = 1 is admitted for the vacuum and pure-magnetic limits
        if not self.epsilon0 >= 1:
            raise ValueError("epsilon0 must be >= 1")
        if not self.mu0 >= 1:
            raise ValueError("mu0 must be >= 1")

    @property
    def gamma0(self) -> float:
        return self.epsilon0 * self.mu0 - 1.0

    @property
    def dispersive(self) -> bool:
        return self.epsilon_table is not None or self.mu_table is not None


@dataclass(frozen=True)
class AtomModel:
    alpha0: float
    beta0: float = 0.0
    alpha_table: Optional[DispersionTable] = None
    beta_table: Optional[DispersionTable] = None

    def __post_init__(self):
        if self.alpha0 < 0:
            raise ValueError("alpha0 must be non-negative")
        if abs(self.beta0) > self.alpha0:
            warnings.warn(
                "|beta0| exceeds alpha0, which is unusual for a real atom",
                PolarizabilityWarning, stacklevel=3,
            )

    @property
    def dispersive(self) -> bool:
        return self.alpha_table is not None or self.beta_table is not None


@dataclass(frozen=True)
class Configuration:
    separation: float
    temperature: float

    def __post_init__(self):
        if not self.separation > 0:
            raise ValueError("separation must be positive")
        if not self.temperature >= 0:
            raise ValueError("temperature must be non-negative")

    @property
    def omega_c(self) -> float:
        """Characteristic frequency c/(2a) in rad/s."""
        return C_LIGHT / (2.0 * self.separation)

    @property
    def tau(self) -> float:
        return dimensionless_tau(self)

    def at_temperature(self, temperature: float) -> "Configuration":
        return Configuration(self.separation, temperature)


def dimensionless_tau(config: Configuration) -> float:
    """Matsubara spacing ``tau = 4 pi a k_B T / (hbar c)``, so ``zeta_l = tau*l``."""
    return 4.0 * math.pi * config.separation * K_B * config.temperature / (HBAR * C_LIGHT)


def temperature_for_tau(tau: float, separation: float) -> float:
    """Inverse of :func:`dimensionless_tau` at fixed separation."""
    return tau * HBAR * C_LIGHT / (4.0 * math.pi * separation * K_B)


def epsilon_at(material: MaterialModel, zeta: float, config: Configuration) -> float:
    """Permittivity at dimensionless imaginary frequency ``zeta``.

    With dc conductivity the permittivity acquires the pole
    ``4 pi sigma~(T) / zeta`` with ``sigma~ = sigma(T) / omega_c``.
    """
    if material.epsilon_table is not None and zeta > 0:
        base = material.epsilon_table(zeta * config.omega_c)
    else:
        base = material.epsilon0
    if material.conductivity.kind == "none":
        return base
    if zeta == 0:
        raise DivergentStaticLimit("conducting permittivity diverges at zeta = 0")
    sigma_tilde = material.conductivity.sigma(config.temperature) / config.omega_c
    return base + 4.0 * math.pi * sigma_tilde / zeta


def mu_at(material: MaterialModel, zeta: float, config: Configuration) -> float:
    if material.mu_table is not None and zeta > 0:
        return material.mu_table(zeta * config.omega_c)
    return material.mu0


def polarizabilities_at(atom: AtomModel, zeta: float, config: Configuration) -> tuple:
    """(alpha, beta) in m^3 at ``zeta``; static values unless tabulated."""
    xi = zeta * config.omega_c
    alpha = atom.alpha_table(xi) if atom.alpha_table is not None and zeta > 0 else atom.alpha0
    beta = atom.beta_table(xi) if atom.beta_table is not None and zeta > 0 else atom.beta0
    return alpha, beta


def grid(start: float, stop: float, points: int, spacing: str = "linear") -> Sequence[float]:
    """Sweep grid helper shared by the CLI and the analysis layer."""
    if points < 1:
        raise ValueError("grid needs at least one point")
    if spacing == "log":
        if start <= 0 or stop <= 0:
            raise ValueError("log spacing needs positive end points")
        return [float(v) for v in np.geomspace(start, stop, points)]
    if spacing == "linear":
        return [float(v) for v in np.linspace(start, stop, points)]
    raise ValueError("spacing must be 'linear' or 'log'")
