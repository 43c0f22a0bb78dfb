"""Acceptance criteria 1 to 8, each at its stated tolerance.

Every test prints one ``[PASS]`` or ``[FAIL]`` line. The line bypasses
output capture, so it shows in a plain ``pytest`` run.
"""
import math
import time

import pytest

from cplab.asymptotics import (
    b_alpha_nonmagnetic,
    coeff_B_alpha,
    dc_shift,
    delta_f_low_temperature,
    entropy_low_temperature,
    residual_entropy,
)
from cplab.lifshitz import free_energy, thermal_correction
from cplab.materials import K_B, ConductivityModel, MaterialModel, grid
from cplab.thermo import entropy_numeric, extract_low_temperature_coefficient, nernst_check
from cplab.verify import SUITES

from conftest import SEPARATION, at_tau, atom

pytestmark = pytest.mark.slow

FERRO = MaterialModel(4.0, 2.0)
MIXED = atom(1e-3, 0.3)


@pytest.fixture
def report(capsys):
    def _report(label, ok, detail):
        with capsys.disabled():
            print(f"\n[{'PASS' if ok else 'FAIL'}] {label}: {detail}")
        assert ok, f"{label}: {detail}"
    return _report


def nernst_grid(points=6):
    return [at_tau(t) for t in grid(0.005, 0.05, points, "log")]


def test_c1_free_energy_asymptote(report):
    ratios, slowest = [], 0.0
    for tau in (0.05, 0.02, 0.01):
        config = at_tau(tau)
        start = time.perf_counter()
        engine = thermal_correction(MIXED, FERRO, config).value
        slowest = max(slowest, time.perf_counter() - start)
        ratios.append(engine / delta_f_low_temperature(MIXED, FERRO, config))
    gaps = [abs(r - 1) for r in ratios]
    ok = 0.95 <= ratios[1] <= 1.05 and gaps[0] > gaps[1] > gaps[2] and slowest < 120
    report("C1 asymptote vs engine", ok,
           "ratios " + ", ".join(f"{r:.4f}" for r in ratios) + f"; slowest point {slowest:.1f} s")


def test_c2_nonmagnetic_limit(report):
    gaps = []
    for e in (1.5, 2.0, 4.0, 10.0):
        limit = b_alpha_nonmagnetic(e)
        gaps.append(abs(coeff_B_alpha(e, 1 + 1e-6) - limit) / limit)
    report("C2 nonmagnetic limit", max(gaps) <= 1e-5, f"max relative gap {max(gaps):.2e}")


def test_c3_erratum_adjudication(report):
    lines, ok = [], True
    plain = atom(1e-3)
    for e in (2.0, 4.0):
        value, err = extract_low_temperature_coefficient(plain, MaterialModel(e), SEPARATION)
        match = abs(value - b_alpha_nonmagnetic(e)) / err
        reject = abs(value - b_alpha_nonmagnetic(e, 3.0)) / err
        ok &= match <= 1.0 and reject > 3.0
        lines.append(f"eps0={e:g}: 2eps0 off {match:.2f} err, 3eps0 off {reject:.0f} err")
    report("C3 erratum adjudication", ok, "; ".join(lines))


def test_c4_entropy_consistency(report):
    config = at_tau(0.02)
    temperature = config.temperature
    ratio = entropy_numeric(MIXED, FERRO, config) / entropy_low_temperature(MIXED, FERRO, temperature)
    doubling = (entropy_low_temperature(MIXED, FERRO, 2 * temperature)
                / entropy_low_temperature(MIXED, FERRO, temperature))
    numeric_doubling = (entropy_numeric(MIXED, FERRO, config)
                        / entropy_numeric(MIXED, FERRO, at_tau(0.01)))
    ok = 0.95 <= ratio <= 1.05 and abs(doubling - 8) <= 0.5 and abs(numeric_doubling - 8) <= 0.5
    report("C4 entropy consistency", ok,
           f"numeric/asymptotic {ratio:.4f}; S(2T)/S(T) asymptotic {doubling:.6f}, "
           f"engine {numeric_doubling:.4f}")


def test_c5_nernst_satisfied(report):
    verdict = nernst_check(MIXED, FERRO, nernst_grid())
    share = abs(verdict.extrapolated_s0) / verdict.max_entropy
    ok = (verdict.classification == "satisfied" and 2.8 <= verdict.fitted_exponent <= 3.2
          and share < 0.05)
    report("C5 Nernst satisfied", ok,
           f"exponent {verdict.fitted_exponent:.3f}, |S(0)|/max S {share:.2e}")


@pytest.mark.parametrize("beta_ratio,mu0", [(0.3, 2.0), (0.0, 2.0), (0.3, 5.0)])
def test_c6_nernst_violated(report, beta_ratio, mu0):
    material = MaterialModel(4.0, mu0, ConductivityModel("constant", 1e3))
    particle = atom(1e-3, beta_ratio)
    verdict = nernst_check(particle, material, nernst_grid(), with_conductivity=True)
    reference = residual_entropy(particle, material, at_tau(0.01))
    gap = abs(verdict.extrapolated_s0 - reference) / reference
    ok = verdict.classification == "violated" and gap <= 0.02
    report(f"C6 Nernst violated (beta0/alpha0={beta_ratio:g}, mu0={mu0:g})", ok,
           f"S(0) {verdict.extrapolated_s0:.4e} J/K vs {reference:.4e} J/K, gap {gap:.1e}")


def test_c7_dc_shift(report):
    material = MaterialModel(4.0, 2.0, ConductivityModel("arrhenius", 1.5e10, 30 * K_B))
    residues = []
    for tau in (0.05, 0.02, 0.01, 0.005):
        config = at_tau(tau)
        dc = free_energy(MIXED, material, config, with_conductivity=True).value
        plain = free_energy(MIXED, material, config).value
        shift = dc_shift(MIXED, material, config)
        residues.append(abs((dc - plain) - shift) / abs(shift))
    ok = all(r <= 1e-2 for r in residues) and all(b < a for a, b in zip(residues, residues[1:]))
    report("C7 dc shift", ok, "relative residues " + ", ".join(f"{r:.1e}" for r in residues))


@pytest.mark.parametrize("name,tolerance", [
    ("antiderivative", 1e-7),
    ("free-energy-duality", 1e-12),
    ("reflection-bounds", 1.0),
])
def test_c8_oracle_suite(report, name, tolerance):
    result = SUITES[name]()
    ok = result.passed and result.metric <= tolerance and math.isfinite(result.metric)
    report(f"C8 {name}", ok, f"metric {result.metric:.2e} (limit {tolerance:g}) {result.detail}".strip())
