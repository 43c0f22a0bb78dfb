import warnings

import pytest

from cplab.errors import PolarizabilityWarning
from cplab.materials import AtomModel, Configuration, MaterialModel, temperature_for_tau

SEPARATION = 1e-6


def at_tau(tau, separation=SEPARATION):
    return Configuration(separation, temperature_for_tau(tau, separation))


def atom(alpha_hat=1e-3, beta_ratio=0.0, separation=SEPARATION):
    """Atom with alpha0 = alpha_hat * a^3 and beta0 = beta_ratio * alpha0."""
    alpha = alpha_hat * separation ** 3
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", PolarizabilityWarning)
        return AtomModel(alpha, beta_ratio * alpha)


@pytest.fixture
def ferro():
    return MaterialModel(4.0, 2.0)


@pytest.fixture
def mixed_atom():
    return atom(1e-3, 0.3)
