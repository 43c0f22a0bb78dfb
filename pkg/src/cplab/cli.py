"""Command-line front end: ``cpl <subcommand> --config <path>``.

The configuration is an INI file with the sections ``material``, ``atom``,
``geometry``, ``numerics`` and ``output``; unknown sections or keys are
rejected. Results are emitted as CSV (fixed column order, 17 significant
digits) or JSON.
"""
from __future__ import annotations

import argparse
import configparser
import csv
import io
import json
import math
import sys
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from functools import partial
from itertools import product
from typing import Optional

from . import __version__
from .asymptotics import (
    coeff_A,
    coeff_B_alpha,
    coeff_B_beta,
    dc_shift,
    delta_f_low_temperature,
    entropy_low_temperature,
    residual_entropy,
)
from .errors import CancellationWarning, ConfigError, CplError, DomainError, PolarizabilityWarning
from .kernels import QuadratureSpec, SeriesSpec
from .lifshitz import thermal_correction, zero_temperature_energy
from .materials import AtomModel, Configuration, ConductivityModel, MaterialModel, grid
from .thermo import entropy_curve, entropy_numeric, nernst_check
from .verify import run_suites

__all__ = ["RunConfig", "load_config", "parse_config", "evaluate_point", "main", "CSV_COLUMNS"]

CSV_COLUMNS = ("tau", "T_K", "a_m", "F_J", "dF_J", "dF_asym_J", "S_num_JK", "S_asym_JK",
               "S_residual_JK", "terms_used", "warnings")

SCHEMA = {
    "material": ("epsilon0", "mu0", "conductivity.kind", "conductivity.sigma0",
                 "conductivity.activation"),
    "atom": ("alpha0_m3", "beta0_m3"),
    "geometry": ("separation_m", "temperature_K", "temperature_sweep", "separation_sweep"),
    "numerics": ("quad_rel_tol", "series_tail_tol", "max_terms"),
    "output": ("format", "path"),
}
FORMATS = ("csv", "json")


@dataclass(frozen=True)
class Sweep:
    start: float
    stop: float
    points: int
    spacing: str = "linear"

    def values(self):
        return grid(self.start, self.stop, self.points, self.spacing)


@dataclass(frozen=True)
class RunConfig:
    material: MaterialModel
    atom: AtomModel
    separation: Optional[float] = None
    temperature: Optional[float] = None
    temperature_sweep: Optional[Sweep] = None
    separation_sweep: Optional[Sweep] = None
    quad: QuadratureSpec = QuadratureSpec()
    series: SeriesSpec = SeriesSpec()
    output_format: str = "csv"
    output_path: Optional[str] = None
    echo: dict = field(default_factory=dict)

    @property
    def conducting(self) -> bool:
        return self.material.conductivity.enabled

    def temperatures(self):
        if self.temperature_sweep is not None:
            return self.temperature_sweep.values()
        return [self.temperature]

    def separations(self):
        if self.separation_sweep is not None:
            return self.separation_sweep.values()
        return [self.separation]


def _float(section, key, raw):
    try:
        value = float(raw)
    except ValueError:
        raise ConfigError(f"{section}.{key}", f"not a number: {raw!r}") from None
    if not math.isfinite(value):
        raise ConfigError(f"{section}.{key}", "must be finite")
    return value


def _int(section, key, raw):
    try:
        return int(raw)
    except ValueError:
        raise ConfigError(f"{section}.{key}", f"not an integer: {raw!r}") from None


def _sweep(section, key, raw):
    parts = raw.split()
    name = f"{section}.{key}"
    if len(parts) not in (3, 4):
        raise ConfigError(name, "expected 'start stop points [linear|log]'")
    start, stop = _float(section, key, parts[0]), _float(section, key, parts[1])
    points = _int(section, key, parts[2])
    spacing = parts[3] if len(parts) == 4 else "linear"
    if spacing not in ("linear", "log"):
        raise ConfigError(name, "spacing must be linear or log")
    if points < 1:
        raise ConfigError(name, "sweep grid must be non-empty")
    if spacing == "log" and (start <= 0 or stop <= 0):
        raise ConfigError(name, "log spacing needs positive end points")
    return Sweep(start, stop, points, spacing)


def _require(section, key, values):
    if key not in values:
        raise ConfigError(f"{section}.{key}", "required key missing")
    return values[key]


def _build(name, factory, *args):
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", PolarizabilityWarning)
            return factory(*args)
    except ValueError as exc:
        raise ConfigError(name, str(exc)) from None


def parse_config(text: str) -> RunConfig:
    """Parse and validate configuration text."""
    parser = configparser.ConfigParser(interpolation=None)
    parser.optionxform = str
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise ConfigError("config", str(exc).splitlines()[0]) from None
    sections = {}
    for section in parser.sections():
        if section not in SCHEMA:
            raise ConfigError(section, "unknown section")
        for key in parser[section]:
            if key not in SCHEMA[section]:
                raise ConfigError(f"{section}.{key}", "unknown key")
        sections[section] = dict(parser[section])

    mat = sections.get("material", {})
    epsilon0 = _float("material", "epsilon0", _require("material", "epsilon0", mat))
    mu0 = _float("material", "mu0", mat.get("mu0", "1"))
    if epsilon0 < 1:
        raise ConfigError("material.epsilon0", "must be >= 1")
    if mu0 < 1:
        raise ConfigError("material.mu0", "must be >= 1")
    kind = mat.get("conductivity.kind", "none").strip()
    sigma0 = _float("material", "conductivity.sigma0", mat.get("conductivity.sigma0", "0"))
    activation = _float("material", "conductivity.activation",
                        mat.get("conductivity.activation", "0"))
    conductivity = _build("material.conductivity", ConductivityModel, kind, sigma0, activation)
    material = _build("material", MaterialModel, epsilon0, mu0, conductivity)

    at = sections.get("atom", {})
    alpha0 = _float("atom", "alpha0_m3", _require("atom", "alpha0_m3", at))
    beta0 = _float("atom", "beta0_m3", at.get("beta0_m3", "0"))
    if alpha0 < 0:
        raise ConfigError("atom.alpha0_m3", "must be non-negative")
    atom = _build("atom", AtomModel, alpha0, beta0)

    geo = sections.get("geometry", {})
    separation = temperature = t_sweep = a_sweep = None
    if "separation_m" in geo:
        separation = _float("geometry", "separation_m", geo["separation_m"])
        if separation <= 0:
            raise ConfigError("geometry.separation_m", "must be positive")
    if "separation_sweep" in geo:
        a_sweep = _sweep("geometry", "separation_sweep", geo["separation_sweep"])
        if min(a_sweep.start, a_sweep.stop) <= 0:
            raise ConfigError("geometry.separation_sweep", "separations must be positive")
    if separation is None and a_sweep is None:
        raise ConfigError("geometry.separation_m", "required key missing")
    if "temperature_K" in geo:
        temperature = _float("geometry", "temperature_K", geo["temperature_K"])
        if temperature < 0:
            raise ConfigError("geometry.temperature_K", "must be non-negative")
    if "temperature_sweep" in geo:
        t_sweep = _sweep("geometry", "temperature_sweep", geo["temperature_sweep"])
        if min(t_sweep.start, t_sweep.stop) < 0:
            raise ConfigError("geometry.temperature_sweep", "temperatures must be non-negative")
    if temperature is None and t_sweep is None:
        raise ConfigError("geometry.temperature_K", "required key missing")

    num = sections.get("numerics", {})
    quad_kwargs, series_kwargs = {}, {}
    if "quad_rel_tol" in num:
        quad_kwargs["relative_tolerance"] = _float("numerics", "quad_rel_tol", num["quad_rel_tol"])
    if "series_tail_tol" in num:
        series_kwargs["relative_tail_tolerance"] = _float(
            "numerics", "series_tail_tol", num["series_tail_tol"])
    if "max_terms" in num:
        series_kwargs["max_terms"] = _int("numerics", "max_terms", num["max_terms"])
    quad = _build("numerics.quad_rel_tol", lambda: QuadratureSpec(**quad_kwargs))
    series = _build("numerics.series", lambda: SeriesSpec(**series_kwargs))

    out = sections.get("output", {})
    fmt = out.get("format", "csv").strip().lower()
    if fmt not in FORMATS:
        raise ConfigError("output.format", f"must be one of {FORMATS}")
    path = out.get("path", "").strip() or None

    echo = {
        "material": {"epsilon0": epsilon0, "mu0": mu0, "conductivity.kind": kind,
                     "conductivity.sigma0": sigma0, "conductivity.activation": activation},
        "atom": {"alpha0_m3": alpha0, "beta0_m3": beta0},
        "geometry": {k: v for k, v in (
            ("separation_m", separation), ("temperature_K", temperature),
            ("temperature_sweep", asdict(t_sweep) if t_sweep else None),
            ("separation_sweep", asdict(a_sweep) if a_sweep else None)) if v is not None},
        "numerics": {"quad_rel_tol": quad.relative_tolerance,
                     "series_tail_tol": series.relative_tail_tolerance,
                     "max_terms": series.max_terms},
    }
    return RunConfig(material, atom, separation, temperature, t_sweep, a_sweep,
                     quad, series, fmt, path, echo)


def load_config(path: str) -> RunConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError("config", f"cannot read {path}: {exc.strerror}") from None
    return parse_config(text)


_WARNING_CODES = {CancellationWarning: "cancellation", PolarizabilityWarning: "polarizability"}


def _codes(caught):
    codes = []
    for w in caught:
        code = _WARNING_CODES.get(w.category, w.category.__name__)
        if code not in codes:
            codes.append(code)
    return codes


def _asymptotes(run, config):
    """(dF_asym, S_asym, S_residual, codes) with undefined values as None."""
    codes = []
    try:
        df = delta_f_low_temperature(run.atom, run.material, config)
        s = entropy_low_temperature(run.atom, run.material, config.temperature)
    except DomainError:
        df = s = None
        codes.append("asymptote_undefined")
    residual = None
    if run.conducting:
        try:
            residual = residual_entropy(run.atom, run.material, config)
            if df is not None:
                df += dc_shift(run.atom, run.material, config)
                s += residual
        except DomainError:
            codes.append("residual_undefined")
    return df, s, residual, codes


def evaluate_point(run: RunConfig, separation: float, temperature: float) -> dict:
    """One output record for the point (a, T)."""
    config = Configuration(separation, temperature)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        if temperature > 0:
            tc = thermal_correction(run.atom, run.material, config, run.series, run.quad,
                                    run.conducting)
            energy = zero_temperature_energy(run.atom, run.material, config, run.quad)
            free = energy + tc.value
            delta = tc.value
            terms = tc.terms_used
            s_num = entropy_numeric(run.atom, run.material, config, run.conducting,
                                    series_spec=run.series, quad_spec=run.quad)
        else:
            free = zero_temperature_energy(run.atom, run.material, config, run.quad)
            delta, terms, s_num = 0.0, 0, None
    codes = _codes(caught)
    if s_num is None:
        codes.append("entropy_needs_positive_T")
    df_asym, s_asym, residual, more = _asymptotes(run, config)
    codes.extend(more)
    return {
        "tau": config.tau, "T_K": temperature, "a_m": separation,
        "F_J": free, "dF_J": delta, "dF_asym_J": df_asym,
        "S_num_JK": s_num, "S_asym_JK": s_asym, "S_residual_JK": residual,
        "terms_used": terms, "warnings": ";".join(codes),
    }


def _points(run):
    return list(product(run.separations(), run.temperatures()))


def _evaluate_all(run, points, jobs):
    if jobs > 1 and len(points) > 1:
        work = partial(_evaluate_pair, run)
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(work, points))
    return [evaluate_point(run, a, t) for a, t in points]


def _evaluate_pair(run, pair):
    return evaluate_point(run, *pair)


def _fmt(value):
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return format(value, ".17g")
    return str(value)


def _echo_value(value):
    # shortest round-trip form; still reproduces the input exactly
    if isinstance(value, dict):
        return " ".join(_echo_value(v) for v in value.values())
    return repr(value) if isinstance(value, float) else str(value)


def _echo_lines(run):
    lines = [f"# cplab {__version__}"]
    for section, values in run.echo.items():
        for key, value in values.items():
            lines.append(f"# {section}.{key} = {_echo_value(value)}")
    return lines


def _render(run, fmt, header, rows, extra=None):
    if fmt == "json":
        doc = {"inputs": run.echo, "records": rows}
        if extra:
            doc.update(extra)
        return json.dumps(doc, indent=2, allow_nan=False, default=_json_default) + "\n"
    buf = io.StringIO()
    for line in _echo_lines(run):
        buf.write(line + "\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_fmt(row.get(col)) for col in header])
    return buf.getvalue()


def _json_default(obj):
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def _nan_to_none(value):
    return None if isinstance(value, float) and not math.isfinite(value) else value


def cmd_free_energy(run, args):
    if run.temperature is None:
        raise ConfigError("geometry.temperature_K", "free-energy needs a single temperature")
    if run.separation is None:
        raise ConfigError("geometry.separation_m", "free-energy needs a single separation")
    row = evaluate_point(run, run.separation, run.temperature)
    return _render(run, args.format, CSV_COLUMNS, [row])


def cmd_sweep(run, args):
    rows = _evaluate_all(run, _points(run), args.jobs)
    return _render(run, args.format, CSV_COLUMNS, rows)


def cmd_coefficients(run, args):
    e, m = run.material.epsilon0, run.material.mu0
    row = {"epsilon0": e, "mu0": m, "a_eps": coeff_A(e, e, m), "a_mu": coeff_A(m, e, m)}
    codes = []
    for key, fn in (("b_alpha", coeff_B_alpha), ("b_beta", coeff_B_beta)):
        try:
            row[key] = fn(e, m)
        except DomainError:
            row[key] = None
            codes.append(f"{key}_undefined")
    row["warnings"] = ";".join(codes)
    header = ("epsilon0", "mu0", "a_eps", "a_mu", "b_alpha", "b_beta", "warnings")
    return _render(run, args.format, header, [row])


def cmd_nernst(run, args):
    if run.temperature_sweep is None:
        raise ConfigError("geometry.temperature_sweep", "nernst-check needs a temperature sweep")
    if run.separation is None:
        raise ConfigError("geometry.separation_m", "nernst-check needs a single separation")
    configs = [Configuration(run.separation, t) for t in run.temperatures()]
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        curve = entropy_curve(run.atom, run.material, configs, "finite_difference",
                              run.conducting, series_spec=run.series, quad_spec=run.quad,
                              jobs=args.jobs)
        verdict = nernst_check(run.atom, run.material, configs, run.conducting, curve=curve)
    row = {k: _nan_to_none(v) for k, v in asdict(verdict).items()}
    row["warnings"] = ";".join(_codes(caught))
    header = tuple(row)
    extra = {"curve": {"T_K": list(curve.temperatures), "S_num_JK": list(curve.entropies)}}
    return _render(run, args.format, header, [row], extra)


def cmd_verify(run, args):
    results = run_suites(include_engine=not args.quick)
    rows = [asdict(r) for r in results]
    header = ("name", "passed", "metric", "tolerance", "detail")
    if args.format == "json":
        text = json.dumps({"suites": rows}, indent=2) + "\n"
    else:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(row[h]) for h in header])
        text = buf.getvalue()
    return text, all(r.passed for r in results)


COMMANDS = {
    "free-energy": cmd_free_energy,
    "sweep": cmd_sweep,
    "coefficients": cmd_coefficients,
    "nernst-check": cmd_nernst,
}


def build_parser():
    parser = argparse.ArgumentParser(
        prog="cpl",
        description="Casimir-Polder free energy and entropy near a magnetodielectric plate.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in list(COMMANDS) + ["verify"]:
        p = sub.add_parser(name)
        p.add_argument("--config", required=name != "verify", help="INI configuration file")
        p.add_argument("--out", help="output file (default: [output] path or stdout)")
        p.add_argument("--format", choices=FORMATS, help="output format")
        p.add_argument("--jobs", type=int, default=1, help="worker processes for grid points")
        if name == "verify":
            p.add_argument("--quick", action="store_true", help="skip engine-backed suites")
    return parser


def _write(text, path):
    if path:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.jobs < 1:
            raise ConfigError("--jobs", "must be >= 1")
        run = load_config(args.config) if args.config else None
        if args.format is None:
            args.format = run.output_format if run else "csv"
        out = args.out or (run.output_path if run else None)
        if args.command == "verify":
            text, ok = cmd_verify(run, args)
            _write(text, out)
            return 0 if ok else 3
        _write(COMMANDS[args.command](run, args), out)
        return 0
    except CplError as exc:
        print(f"cpl: error: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"cpl: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
