"""Casimir-Polder free energy and entropy of an atom near a ferromagnetic
dielectric plate, with brute-force Lifshitz numerics and closed-form
low-temperature asymptotics."""

__version__ = "0.1.0"

from .asymptotics import (  # noqa: E402
    AsymptoticCoefficients,
    asymptotic_coefficients,
    b_alpha_nonmagnetic,
    coeff_A,
    coeff_B_alpha,
    coeff_B_beta,
    dc_modified_free_energy,
    delta_f_low_temperature,
    entropy_low_temperature,
    residual_entropy,
)
from .lifshitz import (  # noqa: E402
    FreeEnergyResult,
    delta_free_energy,
    free_energy,
    phi,
    thermal_correction,
    zero_temperature_energy,
)
from .materials import (  # noqa: E402
    AtomModel,
    Configuration,
    ConductivityModel,
    MaterialModel,
    dimensionless_tau,
    temperature_for_tau,
)
from .thermo import entropy_numeric, nernst_check  # noqa: E402
