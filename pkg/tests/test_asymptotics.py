import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cplab.asymptotics import (
    SEAM_WIDTH,
    _b_closed_form,
    antiderivative_oracle,
    asymptotic_coefficients,
    b_alpha_nonmagnetic,
    b_alpha_quadrature,
    coeff_A,
    coeff_B_alpha,
    coeff_B_beta,
    dc_modified_free_energy,
    dc_shift,
    delta_f_low_temperature,
    entropy_low_temperature,
    i3_exact_and_expansion,
    phi_expansion,
    residual_entropy,
)
from cplab.errors import DomainError, ModelMismatch
from cplab.kernels import QuadratureSpec, derivative
from cplab.lifshitz import free_energy, phi
from cplab.materials import K_B, Configuration, ConductivityModel, MaterialModel

from conftest import SEPARATION, at_tau, atom

PAIRS = [(4.0, 2.0), (2.0, 4.0), (3.0, 3.0), (10.0, 1.5), (1.5, 10.0), (25.0, 1.2)]


def slope(xs, ys):
    return np.polyfit(np.log(xs), np.log(ys), 1)[0]


class TestCoeffA:
    def test_vacuum(self):
        assert coeff_A(1.0, 1.0, 1.0) == 0.0

    def test_dielectric(self):
        assert coeff_A(3.0, 3.0, 1.0) == pytest.approx(1.25, rel=1e-15)

    def test_magnetic_channel(self):
        expected = 2 * 2 * 7 / 9 + 3 / 5 + 1 / 3
        assert coeff_A(2.0, 4.0, 2.0) == pytest.approx(expected, rel=1e-15)
        assert expected == pytest.approx(4.044444, abs=1e-6)


class TestCoeffB:
    @pytest.mark.parametrize("e,m", PAIRS)
    def test_closed_form_against_quadrature(self, e, m):
        assert coeff_B_alpha(e, m) == pytest.approx(b_alpha_quadrature(e, m), rel=1e-11)

    @pytest.mark.parametrize("e", [1.5, 2.0, 4.0, 10.0])
    def test_nonmagnetic_limit(self, e):
        assert coeff_B_alpha(e, 1.0) == b_alpha_nonmagnetic(e)
        assert coeff_B_alpha(e, 1.0 + 1e-6) == pytest.approx(b_alpha_nonmagnetic(e), rel=1e-5)

    def test_raw_formula_near_unit_mu(self):
        # the closed form evaluated just above mu0 = 1, away from any branch
        assert _b_closed_form(2.0, 1.0 + 1e-6) == pytest.approx(coeff_B_alpha(2.0, 1.0), rel=1e-5)

    @pytest.mark.parametrize("e", [1.5, 2.0, 4.0, 10.0])
    def test_limit_converges_linearly(self, e):
        limit = b_alpha_nonmagnetic(e)
        deltas = [1e-1, 3e-2, 1e-2, 3e-3]
        gaps = [abs(coeff_B_alpha(e, 1 + d) - limit) for d in deltas]
        assert all(b < a for a, b in zip(gaps, gaps[1:]))
        assert slope(deltas, gaps) >= 0.95

    @pytest.mark.parametrize("e", [1.5, 2.0, 4.0, 10.0])
    def test_seam_continuity(self, e):
        below = coeff_B_alpha(e, 1.0 + SEAM_WIDTH * (1 - 1e-12))
        above = coeff_B_alpha(e, 1.0 + SEAM_WIDTH * (1 + 1e-12))
        assert below == pytest.approx(above, rel=1e-8)

    def test_nonmagnetic_vanishes_at_vacuum(self):
        values = [b_alpha_nonmagnetic(1 + d) for d in (1e-2, 1e-4, 1e-6)]
        assert all(abs(v) < 10 * d for v, d in zip(values, (1e-2, 1e-4, 1e-6)))

    @pytest.mark.parametrize("e", [1.5, 2.0, 4.0, 10.0])
    def test_nonmagnetic_against_quadrature(self, e):
        assert b_alpha_nonmagnetic(e) == pytest.approx(b_alpha_quadrature(e, 1.0), rel=1e-12)

    def test_misprinted_variant_differs(self):
        for e in (2.0, 4.0):
            assert abs(b_alpha_nonmagnetic(e, 3.0) - b_alpha_nonmagnetic(e)) > 1e-3

    @pytest.mark.parametrize("e,m", PAIRS + [(4.0, 1.0), (1.0, 4.0)])
    def test_swap(self, e, m):
        if m > 1:
            assert coeff_B_beta(e, m) == coeff_B_alpha(m, e)
        else:
            assert coeff_B_beta(e, m) == pytest.approx(b_alpha_quadrature(1.0, e), rel=1e-12)

    def test_fixed_point(self):
        assert coeff_B_beta(3.0, 3.0) == coeff_B_alpha(3.0, 3.0)

    def test_pure_magnetic_degenerate_branch(self):
        # B_beta(eps0, 1) needs B_alpha with a unit leading response
        for e in (1.5, 2.0, 4.0, 10.0):
            assert coeff_B_beta(e, 1.0) == pytest.approx(b_alpha_quadrature(1.0, e), rel=1e-13)
            assert coeff_B_beta(1.0, e) == pytest.approx(b_alpha_quadrature(e, 1.0), rel=1e-12)

    def test_near_unit_leading_response(self):
        for d in (1e-7, 1e-5, 1e-3, 9.9e-3, 1.01e-2):
            assert coeff_B_beta(3.0, 1 + d) == pytest.approx(b_alpha_quadrature(1 + d, 3.0), rel=1e-10)

    def test_domain(self):
        with pytest.raises(DomainError):
            coeff_B_alpha(1.0, 2.0)
        with pytest.raises(DomainError):
            coeff_B_beta(1.0, 1.0)
        with pytest.raises(DomainError):
            b_alpha_nonmagnetic(1.0)

    def test_bundle(self):
        c = asymptotic_coefficients(MaterialModel(4.0, 2.0))
        assert c.a_eps == coeff_A(4.0, 4.0, 2.0)
        assert c.a_mu == coeff_A(2.0, 4.0, 2.0)
        assert c.b_beta == coeff_B_alpha(2.0, 4.0)

    @settings(max_examples=60, deadline=None)
    @given(st.floats(1.02, 50), st.floats(1.0, 20))
    def test_finite_and_positive(self, e, m):
        b = coeff_B_alpha(e, m)
        assert math.isfinite(b) and b > 0
        assert b == pytest.approx(b_alpha_quadrature(e, m), rel=1e-8)


class TestPhiExpansion:
    def test_leading_term(self):
        cfg = at_tau(0.1)
        at, mat = atom(1e-3, 0.3), MaterialModel(4.0, 2.0)
        expected = -4 * (1e-3 * 3 / 5 + 0.3e-3 * 1 / 3)
        assert phi_expansion(0.0, at, mat, cfg) == pytest.approx(expected, rel=1e-14)

    def test_vacuum(self):
        cfg = at_tau(0.1)
        for x in (0.0, 0.01, 0.1):
            assert phi_expansion(x, atom(1e-3, 0.3), MaterialModel(1.0, 1.0), cfg) == 0.0

    @pytest.mark.parametrize("e,m", [(4.0, 2.0), (3.0, 1.0), (2.0, 5.0)])
    def test_remainder_is_fourth_order(self, e, m):
        cfg = at_tau(0.1)
        at, mat = atom(1e-3, 0.3), MaterialModel(e, m)
        xs = np.geomspace(1e-3, 1e-1, 9)
        spec = QuadratureSpec(relative_tolerance=1e-14)
        gaps = [abs(phi_expansion(x, at, mat, cfg) - phi(x, at, mat, cfg, spec)) for x in xs]
        assert slope(xs, gaps) >= 3.5

    @pytest.mark.parametrize("e,m", PAIRS)
    def test_coefficient_structure(self, e, m):
        cfg = at_tau(0.1)
        at, mat = atom(1e-3, 0.3), MaterialModel(e, m)
        poly = np.polyfit([0.0, 0.5, 1.0, 2.0], [phi_expansion(x, at, mat, cfg) for x in (0.0, 0.5, 1.0, 2.0)], 3)
        wa, wb = 1e-3, 0.3e-3
        assert poly[0] == pytest.approx(-(wa * coeff_B_alpha(e, m) + wb * coeff_B_beta(e, m)), rel=1e-9)
        assert poly[1] == pytest.approx(wa * coeff_A(e, e, m) + wb * coeff_A(m, e, m), rel=1e-9)


class TestI3:
    def test_origin(self):
        exact, expansion = i3_exact_and_expansion(0.0, 3.0, 3.0, 2.0)
        assert exact == expansion == pytest.approx(4 * 2 / 4)

    def test_fourth_order(self):
        xs = np.geomspace(1e-3, 1e-1, 9)
        gaps = [abs(np.subtract(*i3_exact_and_expansion(x, 3.0, 3.0, 2.0))) for x in xs]
        assert slope(xs, gaps) >= 3.5

    def test_unit_eta(self):
        # eta = 1: only the -A x^2 part survives
        for x in (1e-3, 1e-2):
            exact, expansion = i3_exact_and_expansion(x, 1.0, 1.0, 3.0)
            a = coeff_A(1.0, 1.0, 3.0)
            assert expansion == pytest.approx(-a * x * x + a * x ** 3, rel=1e-14)
            assert exact == pytest.approx(expansion, abs=x ** 4)
        assert i3_exact_and_expansion(0.1, 1.0, 1.0, 1.0) == (0.0, 0.0)

    def test_exact_against_quadrature(self):
        from scipy.integrate import quad
        x, eta = 0.3, 2.5
        r = (eta - 1) / (eta + 1)
        a = coeff_A(eta, 2.5, 1.5)
        direct = x ** 3 * quad(lambda z: math.exp(-x * z) * (2 * z * z * r - a), 1, math.inf)[0]
        assert i3_exact_and_expansion(x, eta, 2.5, 1.5)[0] == pytest.approx(direct, rel=1e-10)


def reflection(eta, z, gamma0):
    s = math.sqrt(z * z + gamma0)
    return (eta * z - s) / (eta * z + s)


class TestAntiderivatives:
    def test_plain_derivative(self):
        est = derivative(lambda z: antiderivative_oracle(z, 3.0, 2.0, "plain"), 2.0, 1e-2)
        assert est.value == pytest.approx(reflection(3.0, 2.0, 2.0), rel=1e-7)

    def test_z_squared_derivative(self):
        est = derivative(lambda z: antiderivative_oracle(z, 2.0, 1.0, "z_squared"), 1.5, 1e-2)
        assert est.value == pytest.approx(1.5 ** 2 * reflection(2.0, 1.5, 1.0), rel=1e-7)

    def test_large_z_growth(self):
        eta = 3.0
        ratio = [antiderivative_oracle(z, eta, 2.0) / z for z in (1e4, 1e6)]
        lead = (eta ** 2 + 1) / (eta ** 2 - 1)
        # the ratio approaches the leading coefficient shifted by -2 eta/(eta^2-1)
        assert ratio[1] == pytest.approx(lead - 2 * eta / (eta ** 2 - 1), rel=1e-5)
        assert ratio[1] == pytest.approx((eta - 1) / (eta + 1), rel=1e-5)

    @pytest.mark.parametrize("eta", [1.5, 2.0, 3.0, 10.0])
    def test_grid(self, eta):
        r_inf = (eta - 1) / (eta + 1)
        for z in np.linspace(1, 20, 20):
            for which, w in (("plain", 1.0), ("z_squared", z * z)):
                est = derivative(lambda u: antiderivative_oracle(u, eta, 2.0, which), z, 1e-2 * z)
                target = reflection(eta, z, 2.0) * w
                assert abs(est.value - target) <= 1e-7 * max(abs(target), r_inf * w)

    def test_domain(self):
        with pytest.raises(DomainError):
            antiderivative_oracle(2.0, 1.0, 2.0)
        with pytest.raises(ValueError):
            antiderivative_oracle(2.0, 2.0, 2.0, "cubic")


class TestThermalAsymptotes:
    def test_zero_temperature(self, ferro, mixed_atom):
        assert delta_f_low_temperature(mixed_atom, ferro, Configuration(SEPARATION, 0.0)) == 0.0
        assert entropy_low_temperature(mixed_atom, ferro, 0.0) == 0.0

    def test_separation_independent(self, ferro, mixed_atom):
        one = delta_f_low_temperature(mixed_atom, ferro, Configuration(1e-6, 5.0))
        two = delta_f_low_temperature(mixed_atom, ferro, Configuration(2e-6, 5.0))
        assert one == two

    def test_engine_agreement(self, ferro, mixed_atom):
        from cplab.lifshitz import delta_free_energy
        cfg = at_tau(0.02)
        ratio = delta_free_energy(mixed_atom, ferro, cfg) / delta_f_low_temperature(mixed_atom, ferro, cfg)
        assert 0.95 <= ratio <= 1.05

    def test_cubic_entropy(self, ferro, mixed_atom):
        s1 = entropy_low_temperature(mixed_atom, ferro, 3.0)
        assert entropy_low_temperature(mixed_atom, ferro, 6.0) / s1 == pytest.approx(8.0, rel=1e-14)

    def test_entropy_is_minus_derivative(self, ferro, mixed_atom):
        t = 4.0
        est = derivative(lambda u: delta_f_low_temperature(mixed_atom, ferro, Configuration(SEPARATION, u)), t, 0.2)
        assert -est.value == pytest.approx(entropy_low_temperature(mixed_atom, ferro, t), rel=1e-8)

    def test_prefactor(self):
        from cplab.materials import C_LIGHT, HBAR
        at, mat = atom(1e-3), MaterialModel(2.0)
        cfg = Configuration(SEPARATION, 2.0)
        kt = K_B * 2.0
        expected = -math.pi ** 3 * kt ** 4 / (15 * (HBAR * C_LIGHT) ** 3) * at.alpha0 * b_alpha_nonmagnetic(2.0)
        assert delta_f_low_temperature(at, mat, cfg) == pytest.approx(expected, rel=1e-14)


def cond(eps, mu=1.0):
    return MaterialModel(eps, mu, ConductivityModel("constant", 1.0))


class TestConductivityCorrections:
    def test_shift_value(self):
        at, cfg = atom(1e-3), Configuration(SEPARATION, 3.0)
        expected = -K_B * 3.0 * at.alpha0 / (8 * SEPARATION ** 3)
        assert dc_shift(at, cond(3.0), cfg) == pytest.approx(expected, rel=1e-14)

    def test_shift_vanishes_for_ideal_conductor(self):
        at, cfg = atom(1e-3), Configuration(SEPARATION, 3.0)
        assert dc_shift(at, cond(math.inf), cfg) == 0.0
        assert abs(dc_shift(at, cond(1e12), cfg)) < 1e-11 * abs(dc_shift(at, cond(3.0), cfg))

    def test_modified_free_energy(self):
        at, cfg = atom(1e-3), at_tau(0.1)
        base = free_energy(at, MaterialModel(3.0), cfg)
        shifted = dc_modified_free_energy(base, at, cond(3.0), cfg)
        assert shifted == pytest.approx(base.value + dc_shift(at, cond(3.0), cfg), rel=1e-15)
        assert dc_modified_free_energy(base.value, at, cond(3.0), cfg) == shifted

    def test_requires_conductivity(self):
        cfg = at_tau(0.1)
        with pytest.raises(ModelMismatch):
            dc_modified_free_energy(0.0, atom(), MaterialModel(3.0), cfg)

    def test_residual_entropy_value(self):
        at = atom(8e-9)
        assert residual_entropy(at, cond(3.0), Configuration(SEPARATION, 1.0)) == pytest.approx(K_B * 1e-9, rel=1e-14)

    def test_residual_scaling(self):
        from cplab.materials import AtomModel
        at = AtomModel(1e-21)
        s1 = residual_entropy(at, cond(3.0), Configuration(2e-6, 1.0))
        s2 = residual_entropy(at, cond(3.0), Configuration(1e-6, 1.0))
        assert s2 / s1 == pytest.approx(8.0, rel=1e-14)

    def test_residual_independent_of_magnetic_response(self):
        cfg = Configuration(SEPARATION, 1.0)
        ref = residual_entropy(atom(1e-3), cond(3.0), cfg)
        assert residual_entropy(atom(1e-3, 0.7), cond(3.0, 5.0), cfg) == ref

    def test_residual_domain(self):
        cfg = Configuration(SEPARATION, 1.0)
        with pytest.raises(DomainError):
            residual_entropy(atom(0.0), cond(3.0), cfg)
        with pytest.raises(DomainError):
            residual_entropy(atom(1e-3), cond(1.0), cfg)
