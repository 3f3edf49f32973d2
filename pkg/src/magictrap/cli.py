"""magictrap command line: parse config, dispatch to the physics modules,
emit machine-readable tables and a one-screen summary.

Every dimensioned flag value carries a mandatory unit suffix (700nm,
34e6hz, 0.5s, 1e-4t, ...). Exit codes: 0 success, 1 validation/usage
error, 2 numerical failure. Data outputs are byte-identical for identical
inputs; run metadata goes to a sidecar <out>.meta.json.
"""

from __future__ import annotations

import argparse
import configparser
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .atomdata import data_dir, load_species
from .constants import PLANCK
from .cavityqed import (CavitySystem, blockade_detuning, g2_zero, jc_ladder,
                        vacuum_rabi_spectrum)
from .clockspec import (ClockTransition, NU0_OFFSET_HZ, aggregate_measurements,
                        nbar_from_asymmetry, quality_factor, rabi_lineshape,
                        read_measurement_ledger, sideband_spectrum,
                        zeeman_multiplet)
from .errors import NumericalError, ValidationError
from .fieldtrap import (FieldConfig, GaussianBeam, Lattice1D, lamb_dicke,
                        peak_intensity, recoil, site_offset, trap_frequencies)
from .polarizability import (alpha_scalar, find_magic, scan_delta_alpha,
                             stark_shift)

TWO_PI = 2.0 * math.pi

# unit suffix -> SI factor, per dimension
UNITS = {
    "length": {"nm": 1e-9, "um": 1e-6, "mm": 1e-3, "m": 1.0},
    "frequency": {"hz": 1.0, "khz": 1e3, "mhz": 1e6, "ghz": 1e9, "thz": 1e12},
    "time": {"s": 1.0, "ms": 1e-3, "us": 1e-6},
    "power": {"w": 1.0, "mw": 1e-3, "uw": 1e-6, "kw": 1e3},
    "intensity": {"w_m2": 1.0, "kw_m2": 1e3, "w_cm2": 1e4, "kw_cm2": 1e7},
    "bfield": {"t": 1.0, "mt": 1e-3, "ut": 1e-6, "gauss": 1e-4},
    "accel": {"mps2": 1.0},
}


class UsageError(ValidationError):
    pass


def parse_quantity(text: str, dimension: str) -> float:
    """'813.428nm' -> 8.13428e-07. The unit suffix is mandatory."""
    table = UNITS[dimension]
    lowered = text.strip().lower()
    for suffix in sorted(table, key=len, reverse=True):
        if lowered.endswith(suffix):
            head = lowered[: -len(suffix)]
            try:
                return float(head) * table[suffix]
            except ValueError:
                continue
    raise ValidationError(
        f"'{text}' needs a {dimension} unit suffix (one of: "
        f"{', '.join(sorted(table))})")


def _quantity(dimension):
    def convert(text):
        return parse_quantity(text, dimension)
    convert.__name__ = dimension
    return convert


def _half_integer(text: str) -> float:
    if "/" in text:
        num, den = text.split("/")
        return float(int(num)) / float(int(den))
    return float(text)


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, str):
        return value
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return f"{float(value):.17g}"


def _json_value(value) -> str:
    if value is None:
        return "null"
    if isinstance(value, str):
        return json.dumps(value)
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return f"{float(value):.17g}"


def emit(columns, rows, fmt: str, path: Path, meta: dict | None = None,
         argv: list[str] | None = None) -> None:
    """Write a table as CSV or JSON with 17-significant-digit numbers.

    CSV starts with a '# magictrap v<version>' comment and a header row; an
    empty table is header-only. JSON is {meta, columns, rows}. Output bytes
    depend only on the data; run metadata lands in <path>.meta.json.
    """
    path = Path(path)
    meta = dict(meta or {})
    meta.setdefault("tool", "magictrap")
    meta.setdefault("version", __version__)
    if fmt == "csv":
        lines = [f"# magictrap v{__version__}", ",".join(columns)]
        for row in rows:
            lines.append(",".join(_fmt(v) for v in row))
        path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    elif fmt == "json":
        meta_text = ",".join(f"{json.dumps(k)}:{_json_value(v)}"
                             for k, v in sorted(meta.items()))
        row_text = ",".join(
            "[" + ",".join(_json_value(v) for v in row) + "]" for row in rows)
        col_text = ",".join(json.dumps(c) for c in columns)
        path.write_text(
            "{" + f'"meta":{{{meta_text}}},"columns":[{col_text}],"rows":[{row_text}]'
            + "}\n", encoding="utf-8")
    else:
        raise ValidationError(f"unknown output format '{fmt}'")
    sidecar = {"command": argv or [], "tool": "magictrap", "version": __version__}
    sidecar.update(meta)
    Path(str(path) + ".meta.json").write_text(
        json.dumps(sidecar, sort_keys=True, indent=1) + "\n", encoding="utf-8")


def emit_magic_points(points, path: Path, meta: dict | None = None,
                      argv: list[str] | None = None) -> None:
    """Magic crossings as JSON records {lambda_nm, residual_au, bracket_nm}."""
    path = Path(path)
    meta = dict(meta or {})
    meta.setdefault("tool", "magictrap")
    meta.setdefault("version", __version__)
    meta_text = ",".join(f"{json.dumps(k)}:{_json_value(v)}"
                         for k, v in sorted(meta.items()))
    recs = []
    for p in points:
        recs.append(
            "{" + f'"lambda_nm":{_json_value(p.wavelength_m * 1e9)},'
            f'"residual_au":{_json_value(p.residual_au)},'
            f'"bracket_nm":[{_json_value(p.bracket_m[0] * 1e9)},'
            f'{_json_value(p.bracket_m[1] * 1e9)}]' + "}")
    path.write_text(
        "{" + f'"meta":{{{meta_text}}},"points":[{",".join(recs)}]' + "}\n",
        encoding="utf-8")
    sidecar = {"command": argv or [], "tool": "magictrap", "version": __version__}
    sidecar.update(meta)
    Path(str(path) + ".meta.json").write_text(
        json.dumps(sidecar, sort_keys=True, indent=1) + "\n", encoding="utf-8")


def resolve_species(name: str) -> Path:
    """Literal path first, then the bundled data directory."""
    p = Path(name)
    if p.exists():
        return p
    stem = name[:-6] if name.endswith(".lines") else name
    candidate = data_dir() / f"{stem}.lines"
    if candidate.exists():
        return candidate
    raise ValidationError(
        f"species '{name}' is neither a file nor bundled data in {data_dir()}")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{message}\n{self.format_usage()}")


CONFIG_SECTION = {
    "polarizability": "scan", "magic": "scan",
    "trap": "trap",
    "clock-line": "clock", "zeeman": "clock", "sidebands": "clock",
    "aggregate": "clock",
    "cavity-spectrum": "cavity", "blockade": "cavity", "ladder": "cavity",
}


def _apply_config(args: argparse.Namespace, command: str) -> None:
    """Fill flags left at None from the [section] of --config, if any."""
    if not getattr(args, "config", None):
        return
    cfg = configparser.ConfigParser()
    read = cfg.read(args.config)
    if not read:
        raise ValidationError(f"config file not found: {args.config}")
    section = CONFIG_SECTION.get(command)
    if section is None or not cfg.has_section(section):
        return
    for key, raw in cfg.items(section):
        attr = key.replace("-", "_")
        if attr.endswith("_hz") and not hasattr(args, attr):
            attr = attr[:-3]  # accept g0_hz/kappa_hz/... aliases
        if hasattr(args, attr) and getattr(args, attr) is None:
            setattr(args, attr, raw)


def _coerce(args, attr, converter, default=None):
    """Convert a flag that may have arrived as raw config text."""
    value = getattr(args, attr, None)
    if value is None:
        return default
    if isinstance(value, str):
        return converter(value)
    return value


def build_parser() -> _Parser:
    top = _Parser(prog="magictrap",
                  description="State-insensitive trap toolkit: polarizabilities, "
                              "magic wavelengths, clock spectra, cavity QED.")
    top.add_argument("--version", action="version", version=f"magictrap {__version__}")
    sub = top.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--out", default=None, help="output file path")
        p.add_argument("--format", default=None, choices=("csv", "json"),
                       help="output format (csv or json)")
        p.add_argument("--config", default=None,
                       help="INI config file with [trap]/[clock]/[cavity]/[scan] sections")
        p.add_argument("--verbose", action="store_true", help="chattier summary")

    p = sub.add_parser("polarizability", help="scan two states' polarizabilities")
    p.add_argument("--species", default=None, help="species file or bundled name (e.g. sr87)")
    p.add_argument("--state1", default=None, help="first level label (e.g. 1S0)")
    p.add_argument("--state2", default=None, help="second level label (e.g. 3P0)")
    p.add_argument("--from", dest="lo", default=None, help="scan start (length, e.g. 700nm)")
    p.add_argument("--to", dest="hi", default=None, help="scan end (length, e.g. 900nm)")
    p.add_argument("--points", default=None, help="grid points (dimensionless, default 200)")
    p.add_argument("--jobs", default=None, help="worker count; results independent of it (default 1)")
    p.add_argument("--calibrated", action="store_true",
                   help="apply the catalog's documented calibration multiplier")
    common(p)

    p = sub.add_parser("magic", help="find magic wavelengths (polarizability crossings)")
    p.add_argument("--species", default=None, help="species file or bundled name (e.g. sr87)")
    p.add_argument("--state1", default=None, help="first level label (e.g. 1S0)")
    p.add_argument("--state2", default=None, help="second level label (e.g. 3P0)")
    p.add_argument("--from", dest="lo", default=None, help="search start (length, e.g. 700nm)")
    p.add_argument("--to", dest="hi", default=None, help="search end (length, e.g. 900nm)")
    p.add_argument("--points", default=None, help="scan grid points (dimensionless, default 2000)")
    p.add_argument("--jobs", default=None, help="worker count; results independent of it (default 1)")
    p.add_argument("--calibrated", action="store_true",
                   help="apply the catalog's documented calibration multiplier")
    p.add_argument("--scan-out", dest="scan_out", default=None,
                   help="also write the delta-alpha scan table (CSV) to this path")
    common(p)

    p = sub.add_parser("trap", help="trap depth, frequencies, Lamb-Dicke parameter")
    p.add_argument("--species", default=None, help="species file or bundled name")
    p.add_argument("--state", default=None, help="level label (default: ground level)")
    p.add_argument("--lattice-lambda", dest="lam", required=True,
                   help="trap light wavelength (length, e.g. 813.428nm)")
    p.add_argument("--waist", default=None, help="beam waist w0 (length, e.g. 30um)")
    p.add_argument("--power", default=None, help="single-beam power (power, e.g. 0.5w)")
    p.add_argument("--intensity", default=None,
                   help="single-beam peak intensity (intensity, e.g. 10kw_cm2)")
    p.add_argument("--depth-erec", default=None,
                   help="trap depth in photon recoils (dimensionless); bypasses power")
    p.add_argument("--gaussian", action="store_true",
                   help="single focused beam instead of the default 1D lattice")
    p.add_argument("--probe", default=None,
                   help="probe wavelength for the Lamb-Dicke parameter (length, default: trap wavelength)")
    p.add_argument("--gravity", default=None,
                   help="local gravity for the site offset (accel, e.g. 9.80665mps2; default 0mps2)")
    common(p)

    p = sub.add_parser("clock-line", help="Rabi lineshape of the clock transition")
    p.add_argument("--duration", default=None, help="pulse duration (time, e.g. 0.5s)")
    p.add_argument("--rabi", default=None,
                   help="Rabi frequency as ordinary frequency (frequency, e.g. 1hz); omit with --pi")
    p.add_argument("--pi", action="store_true", help="use a resonant pi pulse (Omega = pi/T)")
    p.add_argument("--span", default=None, help="detuning half-span (frequency, default 10hz)")
    p.add_argument("--points", default=None, help="grid points (dimensionless, default 801)")
    p.add_argument("--saturation", default=None, help="saturation scale s, P clamped at 1 (dimensionless, default 1)")
    p.add_argument("--observed-width", default=None,
                   help="optional measured linewidth for the Q report (frequency, e.g. 1.8hz)")
    common(p)

    p = sub.add_parser("zeeman", help="pi-transition Zeeman multiplet")
    p.add_argument("--spin", default=None, help="nuclear spin I (half-integer, e.g. 9/2)")
    p.add_argument("--dg", required=True,
                   help="differential g splitting per field per m_F (frequency per tesla, e.g. 108.4hz)")
    p.add_argument("--field", default=None, help="bias field (bfield, e.g. 0.3mt)")
    p.add_argument("--linewidth", default=None, help="natural linewidth (frequency, default 0.001hz)")
    common(p)

    p = sub.add_parser("sidebands", help="carrier and motional sidebands")
    p.add_argument("--eta", default=None, help="Lamb-Dicke parameter (dimensionless)")
    p.add_argument("--nu-z", dest="nu_z", default=None, help="axial trap frequency (frequency, e.g. 49khz)")
    p.add_argument("--nbar", default=None, help="mean motional occupation (dimensionless)")
    p.add_argument("--width", default=None, help="feature FWHM (frequency, e.g. 2khz)")
    p.add_argument("--span", default=None, help="detuning half-span (frequency, default 1.6x nu_z)")
    p.add_argument("--points", default=None, help="grid points (dimensionless, default 1001)")
    common(p)

    p = sub.add_parser("aggregate", help="weighted mean of absolute-frequency measurements")
    p.add_argument("ledger", help="CSV ledger: site,value_hz_minus_nu0,stat_hz,sys_hz")
    common(p)

    p = sub.add_parser("cavity-spectrum", help="vacuum-Rabi transmission spectrum")
    p.add_argument("--g0", default=None, help="coupling g0 (frequency, e.g. 34e6hz)")
    p.add_argument("--kappa", default=None, help="cavity HWHM decay (frequency, e.g. 4.1e6hz)")
    p.add_argument("--gamma", default=None, help="atomic HWHM decay (frequency, e.g. 2.6e6hz)")
    p.add_argument("--delta-b", dest="delta_b", default=None,
                   help="FORT shift of the ground level (frequency, default 0hz)")
    p.add_argument("--delta-e", dest="delta_e", default=None,
                   help="FORT shift of the excited level (frequency, default 0hz)")
    p.add_argument("--nmax", default=None, help="Fock truncation (dimensionless, default 5)")
    p.add_argument("--drive", default=None,
                   help="cavity drive amplitude (frequency; default 1e-3 x kappa)")
    p.add_argument("--from", dest="lo", default=None,
                   help="probe offset start from bare resonance (frequency, default -2 g0)")
    p.add_argument("--to", dest="hi", default=None,
                   help="probe offset end (frequency, default +2 g0)")
    p.add_argument("--points", default=None, help="grid points (dimensionless, default 200)")
    p.add_argument("--g2", action="store_true", help="also compute g2(0) per point")
    p.add_argument("--jobs", default=None, help="worker count; results independent of it (default 1)")
    common(p)

    p = sub.add_parser("blockade", help="photon blockade g2(0) at the canonical probe points")
    p.add_argument("--g0", default=None, help="coupling g0 (frequency, e.g. 34e6hz)")
    p.add_argument("--kappa", default=None, help="cavity HWHM decay (frequency)")
    p.add_argument("--gamma", default=None, help="atomic HWHM decay (frequency)")
    p.add_argument("--nmax", default=None, help="Fock truncation (dimensionless, default 8)")
    p.add_argument("--drive", default=None, help="cavity drive amplitude (frequency; default 0.1 x kappa)")
    common(p)

    p = sub.add_parser("ladder", help="Jaynes-Cummings manifold eigenvalues")
    p.add_argument("--g0", default=None, help="coupling g0 (frequency, e.g. 1e6hz)")
    p.add_argument("--n", default=None, help="manifold quanta n >= 1 (dimensionless)")
    p.add_argument("--delta-b", dest="delta_b", default=None,
                   help="FORT shift of the ground level (frequency, default 0hz)")
    p.add_argument("--delta-e", dest="delta_e", default=None,
                   help="FORT shift of the excited level (frequency, default 0hz)")
    common(p)

    return top



def _required(args, attr: str, flag: str):
    value = getattr(args, attr, None)
    if value is None:
        raise ValidationError(f"missing required --{flag} (flag or config entry)")
    return value

def _out_path(args, default_name: str) -> Path:
    return Path(args.out) if args.out else Path(default_name)


def _freq(args, attr, default=None):
    return _coerce(args, attr, _quantity("frequency"), default)


def _run_polarizability(args, argv):
    species = load_species(resolve_species(_required(args, "species", "species")),
                           use_calibration=args.calibrated)
    lo = parse_quantity(_required(args, "lo", "from"), "length")
    hi = parse_quantity(_required(args, "hi", "to"), "length")
    points = int(_coerce(args, "points", float, 200))
    jobs = int(_coerce(args, "jobs", float, 1))
    lams, a1, a2, d = scan_delta_alpha(species, args.state1, args.state2,
                                       lo, hi, points, jobs=jobs)
    rows = [[lam * 1e9, x1, x2, dd] for lam, x1, x2, dd in zip(lams, a1, a2, d)]
    fmt = args.format or "csv"
    out = _out_path(args, f"polarizability.{fmt}")
    emit(["lambda_nm", "alpha_au_state1", "alpha_au_state2", "delta_alpha_au"],
         rows, fmt, out,
         meta={"species": species.name, "state1": args.state1,
               "state2": args.state2, "calibrated": args.calibrated}, argv=argv)
    print(f"polarizability scan {args.state1}/{args.state2}: {len(rows)} points "
          f"over {lo*1e9:g}-{hi*1e9:g} nm -> {out}")
    return 0


def _run_magic(args, argv):
    species = load_species(resolve_species(_required(args, "species", "species")),
                           use_calibration=args.calibrated)
    lo = parse_quantity(_required(args, "lo", "from"), "length")
    hi = parse_quantity(_required(args, "hi", "to"), "length")
    points = int(_coerce(args, "points", float, 2000))
    jobs = int(_coerce(args, "jobs", float, 1))
    found = find_magic(species, args.state1, args.state2, (lo, hi),
                       grid_points=points, jobs=jobs)
    if args.scan_out:
        lams, a1, a2, d = scan_delta_alpha(species, args.state1, args.state2,
                                           lo, hi, points, jobs=jobs)
        emit(["lambda_nm", "alpha_au_state1", "alpha_au_state2", "delta_alpha_au"],
             [[lam * 1e9, x1, x2, dd] for lam, x1, x2, dd in zip(lams, a1, a2, d)],
             "csv", Path(args.scan_out),
             meta={"species": species.name, "state1": args.state1,
                   "state2": args.state2, "calibrated": args.calibrated}, argv=argv)
    out = _out_path(args, "magic.json")
    emit_magic_points(found, out,
                      meta={"species": species.name, "state1": args.state1,
                            "state2": args.state2, "calibrated": args.calibrated},
                      argv=argv)
    if found:
        for pt in found:
            print(f"magic {args.state1}/{args.state2}: lambda_L = "
                  f"{pt.wavelength_m*1e9:.4f} nm (residual {pt.residual_au:.2e} au)")
    else:
        print(f"magic {args.state1}/{args.state2}: no crossing in "
              f"{lo*1e9:g}-{hi*1e9:g} nm")
    print(f"wrote {out}")
    return 0


def _run_trap(args, argv):
    species = load_species(resolve_species(_required(args, "species", "species")))
    state = args.state
    if state is None:
        state = next(lv.label for lv in species.levels if lv.energy_hz == 0.0)
    lam = parse_quantity(_required(args, "lam", "lattice-lambda"), "length")
    waist = parse_quantity(_required(args, "waist", "waist"), "length")
    probe = _coerce(args, "probe", _quantity("length"), lam)
    gravity = _coerce(args, "gravity", _quantity("accel"), 0.0)
    geom = GaussianBeam(waist) if args.gaussian else Lattice1D(waist)

    e_rec, nu_rec = recoil(species.mass_kg, lam)
    alpha = alpha_scalar(species, state, lam)
    depth_erec = _coerce(args, "depth_erec", float)
    power = _coerce(args, "power", _quantity("power"))
    intensity = _coerce(args, "intensity", _quantity("intensity"))
    given = sum(v is not None for v in (depth_erec, power, intensity))
    if given != 1:
        raise ValidationError(
            "give exactly one of --power, --intensity, or --depth-erec")
    anti_trapped = False
    if depth_erec is not None:
        depth_j = depth_erec * e_rec
    else:
        field = FieldConfig(lam, power_w=power, intensity_w_m2=intensity)
        i_peak = peak_intensity(field, geom)
        if isinstance(geom, Lattice1D):
            i_peak *= 4.0 * geom.mirror_loss
        shift = stark_shift(alpha, i_peak)
        anti_trapped = shift.potential_j > 0
        depth_j = abs(shift.potential_j)
    nu_ax, nu_rad = trap_frequencies(depth_j, geom, lam, species.mass_kg)
    eta = lamb_dicke(probe, nu_ax, species.mass_kg) if nu_ax > 0 else 0.0
    offset = site_offset(species.mass_kg, lam, gravity)

    rows = [
        ["state", state, ""],
        ["alpha_scalar_au", alpha.alpha_scalar_au, "a.u."],
        ["depth", depth_j, "J"],
        ["depth_rec", depth_j / e_rec, "E_rec"],
        ["depth_hz", depth_j / PLANCK, "Hz"],
        ["nu_axial_hz", nu_ax, "Hz"],
        ["nu_radial_hz", nu_rad, "Hz"],
        ["recoil_hz", nu_rec, "Hz"],
        ["eta", eta, ""],
        ["site_offset_hz", offset, "Hz"],
    ]
    fmt = args.format or "csv"
    out = _out_path(args, f"trap.{fmt}")
    emit(["quantity", "value", "unit"], rows, fmt, out,
         meta={"species": species.name, "state": state}, argv=argv)
    print(f"trap at {lam*1e9:g} nm: depth {depth_j/e_rec:.2f} E_rec, "
          f"nu_z {nu_ax/1e3:.2f} kHz, nu_r {nu_rad:.1f} Hz, eta {eta:.3f}")
    if anti_trapped:
        print(f"note: alpha({state}) < 0 here; the state is anti-trapped "
              "(depth shown is the potential magnitude)")
    print(f"wrote {out}")
    return 0


def _run_clock_line(args, argv):
    duration = parse_quantity(_required(args, "duration", "duration"), "time")
    rabi_hz = _freq(args, "rabi")
    if args.pi == (rabi_hz is not None):
        raise ValidationError("give exactly one of --rabi or --pi")
    omega = math.pi / duration if args.pi else TWO_PI * rabi_hz
    span = _freq(args, "span", 10.0)
    points = int(_coerce(args, "points", float, 801))
    saturation = _coerce(args, "saturation", float, 1.0)
    grid = np.linspace(-span, span, points)
    trace = rabi_lineshape(omega, duration, grid, saturation)
    rows = [[d, r] for d, r in zip(trace.detuning_hz, trace.response)]
    fmt = args.format or "csv"
    out = _out_path(args, f"clock_line.{fmt}")
    emit(["detuning_hz", "excitation"], rows, fmt, out,
         meta={"omega_rad_s": omega, "duration_s": duration}, argv=argv)
    print(f"Rabi line, T = {duration:g} s: numeric FWHM = {trace.fwhm_hz:.4f} Hz")
    nu_clock = float(NU0_OFFSET_HZ)
    print(f"Q at Fourier width: {quality_factor(nu_clock, trace.fwhm_hz):.3e}")
    observed = _freq(args, "observed_width")
    if observed:
        print(f"Q at observed width {observed:g} Hz: "
              f"{quality_factor(nu_clock, observed):.3e}")
    print(f"wrote {out}")
    return 0


def _run_zeeman(args, argv):
    spin = _coerce(args, "spin", _half_integer, 4.5)
    dg = parse_quantity(_required(args, "dg", "dg"), "frequency")
    field = parse_quantity(_required(args, "field", "field"), "bfield")
    linewidth = _freq(args, "linewidth", 1e-3)
    transition = ClockTransition(nuclear_spin=spin, linewidth_hz=linewidth,
                                 dg_hz_per_t=dg)
    multiplet = zeeman_multiplet(transition, field, "pi")
    rows = [[m, off] for m, off in multiplet]
    fmt = args.format or "csv"
    out = _out_path(args, f"zeeman.{fmt}")
    emit(["m_f", "offset_hz"], rows, fmt, out,
         meta={"field_t": field, "dg_hz_per_t": dg}, argv=argv)
    gap = dg * field
    print(f"pi multiplet: {len(multiplet)} lines, adjacent gap {gap:g} Hz")
    print(f"wrote {out}")
    return 0


def _run_sidebands(args, argv):
    eta = float(_required(args, "eta", "eta"))
    nu_z = parse_quantity(_required(args, "nu_z", "nu-z"), "frequency")
    nbar = float(_required(args, "nbar", "nbar"))
    width = parse_quantity(_required(args, "width", "width"), "frequency")
    span = _freq(args, "span", 1.6 * nu_z)
    points = int(_coerce(args, "points", float, 1001))
    grid = np.linspace(-span, span, points)
    trace = sideband_spectrum(eta, nu_z, nbar, width, grid)
    rows = [[d, r] for d, r in zip(trace.detuning_hz, trace.response)]
    fmt = args.format or "csv"
    out = _out_path(args, f"sidebands.{fmt}")
    emit(["detuning_hz", "amplitude"], rows, fmt, out,
         meta={"eta": eta, "nbar": nbar, "nu_z_hz": nu_z}, argv=argv)
    weights = {f.name: f.weight for f in trace.labels}
    ratio = (weights["red_sideband"] / weights["blue_sideband"]
             if weights["blue_sideband"] > 0 else 0.0)
    print("features: " + ", ".join(
        f"{f.name}@{f.offset_hz:+g} Hz (w={f.weight:.4g})" for f in trace.labels))
    print(f"red/blue ratio = {ratio:.6f} -> nbar = {nbar_from_asymmetry(ratio):.6f}")
    print(f"wrote {out}")
    return 0


def _run_aggregate(args, argv):
    measurements = read_measurement_ledger(args.ledger)
    result = aggregate_measurements(measurements)
    rows = [[result.n, result.mean_hz, result.sigma_mean_hz,
             result.chi2_reduced, int(result.chi2_valid)]]
    fmt = args.format or "csv"
    out = _out_path(args, f"aggregate.{fmt}")
    emit(["n", "mean_hz_minus_nu0", "sigma_mean_hz", "chi2_reduced", "chi2_valid"],
         rows, fmt, out, meta={"ledger": str(args.ledger)}, argv=argv)
    print("nu0 offset: 429228004229800 Hz")
    print(f"{result.n} measurements: mean = nu0 + {result.mean_hz:.3f} Hz "
          f"(sigma {result.sigma_mean_hz:.3f} Hz)")
    if result.chi2_valid:
        print(f"reduced chi^2 = {result.chi2_reduced:.3f}")
    else:
        print("reduced chi^2 undefined for a single measurement (reported 0)")
    print(f"wrote {out}")
    return 0


def _cavity_system(args, nmax_default: int) -> CavitySystem:
    return CavitySystem(
        g0=TWO_PI * parse_quantity(_required(args, "g0", "g0"), "frequency"),
        kappa=TWO_PI * parse_quantity(_required(args, "kappa", "kappa"), "frequency"),
        gamma=TWO_PI * parse_quantity(_required(args, "gamma", "gamma"), "frequency"),
        delta_b=TWO_PI * _freq(args, "delta_b", 0.0),
        delta_e=TWO_PI * _freq(args, "delta_e", 0.0),
        n_max=int(_coerce(args, "nmax", float, nmax_default)))


def _run_cavity_spectrum(args, argv):
    sys_ = _cavity_system(args, 5)
    drive_hz = _freq(args, "drive")
    drive = TWO_PI * drive_hz if drive_hz is not None else 1e-3 * sys_.kappa
    lo = _freq(args, "lo")
    hi = _freq(args, "hi")
    lo = TWO_PI * lo if lo is not None else -2.0 * sys_.g0
    hi = TWO_PI * hi if hi is not None else +2.0 * sys_.g0
    points = int(_coerce(args, "points", float, 200))
    jobs = int(_coerce(args, "jobs", float, 1))
    grid = np.linspace(lo, hi, points)
    result = vacuum_rabi_spectrum(sys_, drive, grid, with_g2=args.g2, jobs=jobs)
    rows = []
    for i in range(points):
        g2v = result.g2[i] if result.g2 is not None else None
        rows.append([result.omega_p[i] / TWO_PI, result.transmission[i],
                     result.mean_n[i], g2v])
    fmt = args.format or "csv"
    out = _out_path(args, f"cavity_spectrum.{fmt}")
    emit(["omega_p_over_2pi_hz", "transmission", "mean_n", "g2"], rows, fmt, out,
         meta={"g0_rad_s": sys_.g0, "kappa_rad_s": sys_.kappa,
               "gamma_rad_s": sys_.gamma, "drive_rad_s": drive,
               "nmax": sys_.n_max}, argv=argv)
    peaks = ", ".join(f"{p/TWO_PI/1e6:+.3f} MHz" for p in result.peak_omegas)
    print(f"vacuum-Rabi spectrum: {points} points, peaks at [{peaks}]")
    print(f"wrote {out}")
    return 0


def _run_blockade(args, argv):
    sys_ = _cavity_system(args, 8)
    drive_hz = _freq(args, "drive")
    drive = TWO_PI * drive_hz if drive_hz is not None else 0.1 * sys_.kappa
    lower = -sys_.g0
    two_photon = -sys_.g0 / math.sqrt(2.0)
    g2_lower = g2_zero(sys_, drive, lower)
    g2_two = g2_zero(sys_, drive, two_photon)
    detuning = blockade_detuning(sys_.g0)
    rows = [
        ["lower_polariton", lower / TWO_PI, g2_lower],
        ["two_photon_resonance", two_photon / TWO_PI, g2_two],
    ]
    fmt = args.format or "csv"
    out = _out_path(args, f"blockade.{fmt}")
    emit(["probe", "omega_p_over_2pi_hz", "g2"], rows, fmt, out,
         meta={"g0_rad_s": sys_.g0, "blockade_detuning_rad_s": detuning,
               "nmax": sys_.n_max}, argv=argv)
    print(f"g2(0) on the lower polariton: {g2_lower:.4f} "
          f"({'blockade' if g2_lower < 1 else 'no blockade'})")
    print(f"g2(0) at the two-photon resonance: {g2_two:.4f}")
    print(f"n=1->2 step detuning: {detuning/TWO_PI/1e6:.4f} MHz "
          f"= (sqrt(2)-1) g0")
    print(f"wrote {out}")
    return 0


def _run_ladder(args, argv):
    g0 = TWO_PI * parse_quantity(_required(args, "g0", "g0"), "frequency")
    n = int(float(_required(args, "n", "n")))
    if n < 1:
        raise ValidationError("--n must be >= 1")
    sys_ = CavitySystem(g0=g0, kappa=1.0, gamma=1.0,  # decay does not enter the ladder
                        delta_b=TWO_PI * _freq(args, "delta_b", 0.0),
                        delta_e=TWO_PI * _freq(args, "delta_e", 0.0),
                        n_max=max(n, 2))
    eigs = jc_ladder(sys_, n)
    rows = [["lower", eigs[0] / TWO_PI], ["upper", eigs[1] / TWO_PI]]
    fmt = args.format or "csv"
    out = _out_path(args, f"ladder.{fmt}")
    emit(["branch", "offset_hz"], rows, fmt, out,
         meta={"g0_rad_s": g0, "n": n}, argv=argv)
    print(f"manifold n={n}: offsets {eigs[0]/TWO_PI:+.6g} Hz, "
          f"{eigs[1]/TWO_PI:+.6g} Hz relative to n*omega_0")
    print(f"wrote {out}")
    return 0


_RUNNERS = {
    "polarizability": _run_polarizability,
    "magic": _run_magic,
    "trap": _run_trap,
    "clock-line": _run_clock_line,
    "zeeman": _run_zeeman,
    "sidebands": _run_sidebands,
    "aggregate": _run_aggregate,
    "cavity-spectrum": _run_cavity_spectrum,
    "blockade": _run_blockade,
    "ladder": _run_ladder,
}


def run(argv: list[str]) -> int:
    """Parse argv and execute one subcommand; returns the exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        _apply_config(args, args.command)
        if getattr(args, "verbose", False):
            print(f"# magictrap {__version__}: {args.command} "
                  + " ".join(argv[1:]))
            print(f"# data dir: {data_dir()}")
        return _RUNNERS[args.command](args, argv)
    except SystemExit as exc:  # argparse --help/--version
        return int(exc.code or 0)
    except UsageError as exc:
        print(f"magictrap: {exc}", file=sys.stderr)
        return 1
    except NumericalError as exc:
        print(f"magictrap: numerical failure: {exc}", file=sys.stderr)
        return 2
    except (ValidationError, ValueError, OSError) as exc:
        print(f"magictrap: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
