"""Command-line interface: configuration, sweeps, persistence.

Subcommands: mie, resonances, focus, force, trap, recoil, thermal, sweep,
compare. Sweeps write one CSV per requested output plus a JSON manifest;
rows are deterministic functions of the configuration, cached by config
hash, and failures are recorded per row in the flags column rather than
aborting the sweep.

Config files are INI-style (key = value under [beam], [material], [sweep]);
command-line flags override file values. Lengths accept nm/um/mm suffixes,
powers accept mW/uW; bare numbers are SI.
"""

from __future__ import annotations

import argparse
import configparser
import csv
import hashlib
import json
import math
import multiprocessing
import os
import sys
import time
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from . import __version__
from .beam import FAMILIES, GAUSSIAN, BeamSpec, focal_fields, focus
from .constants import HBAR, KT_REF
from .dynamics import build_engine, potential_profile, trap_report
from .errors import (
    ConsistencyError,
    ConvergenceError,
    DomainError,
    NkParseError,
    StepSizeError,
)
from .mie import (
    SILICA,
    SILICON,
    Material,
    SizeParameter,
    locate_resonances,
    mass_of,
    mie_coefficients,
)
from .recoil import RecoilCalculator, counterprop_energy_rates
from .thermal import BlackbodySpectrum, absorbed_power, material_nk, solve_temperature

RESULT_HEADER = ("kR,R_nm,z_eq_um,dUx_kT,dUy_kT,dUz_kT,fx_kHz,fy_kHz,fz_kHz,"
                 "Gx_per_s,Gy_per_s,Gz_per_s,T_K,flags")
ANNOTATION_HEADER = "family,order,kR"
PROFILE_HEADER = "position_um,U_kT,axis,kR,wavelength_nm"
CACHE_ENV_VAR = "VORTEXLEV_CACHE"

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_DATA = 3
EXIT_NUMERICAL = 4

MATERIAL_PRESETS = {"Si": SILICON, "SiO2": SILICA}

_LENGTH_SUFFIX = {"nm": 1e-9, "um": 1e-6, "µm": 1e-6, "mm": 1e-3, "m": 1.0}
_POWER_SUFFIX = {"uw": 1e-6, "mw": 1e-3, "w": 1.0}


class ConfigError(ValueError):
    pass


def parse_length(text) -> float:
    if isinstance(text, (int, float)):
        return float(text)
    parts = str(text).split()
    try:
        if len(parts) == 2:
            return float(parts[0]) * _LENGTH_SUFFIX[parts[1]]
        if len(parts) == 1:
            for suffix, scale in _LENGTH_SUFFIX.items():
                if parts[0].endswith(suffix) and parts[0] != suffix:
                    head = parts[0][: -len(suffix)]
                    if head and not head[-1].isalpha():
                        return float(head) * scale
            return float(parts[0])
    except (ValueError, KeyError):
        pass
    raise ConfigError(f"cannot parse length {text!r}")


def parse_power(text) -> float:
    if isinstance(text, (int, float)):
        return float(text)
    parts = str(text).lower().split()
    try:
        if len(parts) == 2:
            return float(parts[0]) * _POWER_SUFFIX[parts[1]]
        token = parts[0]
        for suffix, scale in _POWER_SUFFIX.items():
            if token.endswith(suffix) and len(token) > len(suffix):
                head = token[: -len(suffix)]
                if head and not head[-1].isalpha():
                    return float(head) * scale
        return float(token)
    except (ValueError, KeyError):
        pass
    raise ConfigError(f"cannot parse power {text!r}")


@dataclass(frozen=True)
class SweepConfig:
    family: str = GAUSSIAN
    counterpropagating: bool = False
    power: float = 0.5
    wavelength: float = 1550e-9
    numerical_aperture: float = 0.8
    fill_factor: float | None = None
    material_name: str = "Si"
    refractive_index: complex = SILICON.refractive_index
    density: float = SILICON.density
    nk_table: str | None = "si_nk.csv"
    kr_min: float = 0.1
    kr_max: float = 2.2
    kr_step: float = 0.01
    outputs: tuple[str, ...] = ("trap",)
    wavelength_list: tuple[float, ...] = ()
    radius: float | None = None
    output_dir: str = "out"
    cache: bool = True
    jobs: int = 0

    def material(self) -> Material:
        return Material(self.material_name, self.refractive_index, self.density,
                        self.nk_table)

    def beam(self, wavelength: float | None = None) -> BeamSpec:
        return BeamSpec(self.family, self.power,
                        wavelength if wavelength else self.wavelength,
                        self.numerical_aperture)

    def validate(self):
        if self.family not in FAMILIES:
            raise ConfigError(f"unknown beam family {self.family!r}")
        if self.kr_step <= 0:
            raise ConfigError("kr_step must be positive")
        if not self.kr_min < self.kr_max:
            raise ConfigError("kr_min must be below kr_max")
        unknown = set(self.outputs) - {"trap", "recoil", "thermal",
                                       "resonances", "potential_profile"}
        if unknown:
            raise ConfigError(f"unknown outputs: {sorted(unknown)}")
        if "potential_profile" in self.outputs and self.wavelength_list and \
                self.radius is None:
            raise ConfigError("wavelength_list mode needs an explicit radius")

    def canonical(self) -> dict:
        d = asdict(self)
        d["refractive_index"] = [self.refractive_index.real, self.refractive_index.imag]
        d.pop("output_dir")
        d.pop("cache")
        d.pop("jobs")
        d["code_version"] = __version__
        return d

    def digest(self) -> str:
        blob = json.dumps(self.canonical(), sort_keys=True)
        return hashlib.sha256(blob.encode()).hexdigest()[:16]


def load_config(path: str | None, overrides: dict | None = None) -> SweepConfig:
    values: dict = {}
    if path:
        parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
        read = parser.read(path)
        if not read:
            raise ConfigError(f"config file not found: {path}")
        if parser.has_section("beam"):
            b = parser["beam"]
            if "family" in b:
                values["family"] = b["family"].strip()
            if "power" in b:
                values["power"] = parse_power(b["power"])
            if "wavelength" in b:
                values["wavelength"] = parse_length(b["wavelength"])
            if "numerical_aperture" in b:
                values["numerical_aperture"] = float(b["numerical_aperture"])
            if "fill_factor" in b:
                values["fill_factor"] = float(b["fill_factor"])
            if "counterpropagating" in b:
                values["counterpropagating"] = b.getboolean("counterpropagating")
        if parser.has_section("material"):
            m = parser["material"]
            name = m.get("name", "Si").strip()
            preset = MATERIAL_PRESETS.get(name)
            values["material_name"] = name
            if preset is not None:
                values["refractive_index"] = preset.refractive_index
                values["density"] = preset.density
                values["nk_table"] = preset.nk_table_path
            if "refractive_index" in m:
                values["refractive_index"] = complex(m["refractive_index"].replace(" ", ""))
            if "density" in m:
                values["density"] = float(m["density"])
            if "nk_table" in m:
                values["nk_table"] = m["nk_table"].strip()
        if parser.has_section("sweep"):
            s = parser["sweep"]
            if "kr_min" in s:
                values["kr_min"] = float(s["kr_min"])
            if "kr_max" in s:
                values["kr_max"] = float(s["kr_max"])
            if "kr_step" in s:
                values["kr_step"] = float(s["kr_step"])
            if "outputs" in s:
                values["outputs"] = tuple(t.strip() for t in s["outputs"].split(",") if t.strip())
            if "wavelength_list" in s:
                values["wavelength_list"] = tuple(
                    parse_length(t.strip()) for t in s["wavelength_list"].split(",") if t.strip())
            if "radius" in s:
                values["radius"] = parse_length(s["radius"])
            if "output_dir" in s:
                values["output_dir"] = s["output_dir"].strip()
            if "cache" in s:
                values["cache"] = s.getboolean("cache")
    if overrides:
        values.update({k: v for k, v in overrides.items() if v is not None})
    try:
        config = SweepConfig(**values)
    except TypeError as err:
        raise ConfigError(str(err)) from None
    config.validate()
    return config


def material_from_args(args) -> Material:
    preset = MATERIAL_PRESETS.get(args.material)
    if preset is None:
        raise ConfigError(f"unknown material {args.material!r} "
                          f"(presets: {sorted(MATERIAL_PRESETS)})")
    return preset


def fmt(value) -> str:
    if value is None:
        return "nan"
    if isinstance(value, float) and math.isnan(value):
        return "nan"
    return format(value, ".10g")


# --- per-row physics -------------------------------------------------------

_SPECTRUM_CACHE: dict = {}
_PROJECTOR_CACHE: dict = {}


def _cached_spectrum(beam: BeamSpec, fill: float | None):
    key = (beam.family, beam.power, beam.wavelength_vacuum,
           beam.numerical_aperture, beam.propagation_sign, fill)
    if key not in _SPECTRUM_CACHE:
        _SPECTRUM_CACHE[key] = focus(beam, fill_factor=fill)
    return _SPECTRUM_CACHE[key]


def compute_row(config: SweepConfig, kr: float) -> dict:
    """All requested quantities for one size parameter, as a flat dict."""
    material = config.material()
    spectrum = _cached_spectrum(config.beam(), config.fill_factor)
    sp = SizeParameter.from_kr(kr, config.wavelength)
    flags: list[str] = []
    row = {name: float("nan") for name in RESULT_HEADER.split(",")[:-1]}
    row["kR"] = kr
    row["R_nm"] = sp.radius * 1e9
    try:
        table = mie_coefficients(sp, material.refractive_index)
        engine = build_engine(spectrum, table, config.counterpropagating)
        rep = trap_report(engine, material.name, material.density)
        z_ref = rep.z_eq if rep.z_eq is not None else 0.0
        if rep.z_eq is not None:
            row["z_eq_um"] = rep.z_eq * 1e6
        row["dUx_kT"] = rep.depth[0] / KT_REF
        row["dUy_kT"] = rep.depth[1] / KT_REF
        row["dUz_kT"] = rep.depth[2] / KT_REF
        for name, om in zip(("fx_kHz", "fy_kHz", "fz_kHz"), rep.frequencies):
            row[name] = om / (2 * math.pi) / 1e3
        if not rep.trapped_3d:
            flags.append("untrapped")

        if "recoil" in config.outputs:
            mass = mass_of(sp.radius, material.density)
            calc = RecoilCalculator(spectrum, table)
            if config.counterpropagating:
                edot = counterprop_energy_rates(
                    calc, (0, 0, z_ref), mass, config.wavelength / 2000,
                    focus_offset=engine.focus_offset)
            else:
                edot = calc.energy_rates((0, 0, z_ref), mass,
                                         config.wavelength / 2000)
            for name, e, om in zip(("Gx_per_s", "Gy_per_s", "Gz_per_s"),
                                   edot, rep.frequencies):
                row[name] = e / (HBAR * om) if om > 0 else float("nan")

        if "thermal" in config.outputs:
            if config.counterpropagating:
                arm_a, arm_b = engine.arm_positions((0, 0, z_ref))
                p_abs = (absorbed_power(spectrum, table, material, arm_a).value
                         + absorbed_power(spectrum, table, material, arm_b).value)
            else:
                p_abs = absorbed_power(spectrum, table, material,
                                       (0, 0, z_ref)).value
            bb = BlackbodySpectrum(material_nk(material), sp.radius, n_nodes=800)
            trep = solve_temperature(max(p_abs, 0.0), bb, material.name,
                                     config.family, kr)
            row["T_K"] = trep.T_solution
            if trep.runaway:
                flags.append("runaway")
            if trep.melting_exceeded:
                flags.append("melting")
    except (ConvergenceError, ConsistencyError, StepSizeError) as err:
        flags.append(f"numerical-error:{type(err).__name__}")
    except DomainError as err:
        flags.append(f"domain-error:{err}")
    row["flags"] = ";".join(flags) if flags else "ok"
    return row


def _row_cache_dir(config: SweepConfig) -> Path | None:
    if not config.cache:
        return None
    base = os.environ.get(CACHE_ENV_VAR)
    root = Path(base) if base else Path(config.output_dir) / ".cache"
    d = root / config.digest()
    d.mkdir(parents=True, exist_ok=True)
    return d


def run_sweep(config: SweepConfig) -> dict[str, Path]:
    """Run the configured sweep; returns the written file paths by kind."""
    config.validate()
    out_dir = Path(config.output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    cache_dir = _row_cache_dir(config)
    t_start = time.time()
    timings: dict[str, float] = {}

    kr_values = [round(float(kr), 12)
                 for kr in np.arange(config.kr_min,
                                     config.kr_max + config.kr_step / 2,
                                     config.kr_step)]
    rows = []
    pending = []
    for kr in kr_values:
        cache_file = cache_dir / f"kr_{kr:.6f}.json" if cache_dir else None
        if cache_file and cache_file.exists():
            rows.append(json.loads(cache_file.read_text()))
        else:
            pending.append((kr, cache_file))

    jobs = config.jobs or (os.cpu_count() or 1)
    if jobs > 1 and len(pending) > 1:
        with multiprocessing.Pool(jobs) as pool:
            fresh = pool.starmap(compute_row,
                                 [(config, kr) for kr, _ in pending])
    else:
        fresh = []
        for kr, _ in pending:
            t0 = time.time()
            fresh.append(compute_row(config, kr))
            timings[f"{kr:.6f}"] = time.time() - t0
    for (kr, cache_file), row in zip(pending, fresh):
        if cache_file:
            cache_file.write_text(json.dumps(row))
        rows.append(row)
    rows.sort(key=lambda r: r["kR"])

    written: dict[str, Path] = {}
    columns = RESULT_HEADER.split(",")
    for kind in ("trap", "recoil", "thermal"):
        if kind not in config.outputs:
            continue
        path = out_dir / f"{kind}.csv"
        with open(path, "w", newline="") as f:
            f.write(RESULT_HEADER + "\n")
            for row in rows:
                f.write(",".join(fmt(row[c]) if c != "flags" else str(row[c])
                                 for c in columns) + "\n")
        written[kind] = path

    if "resonances" in config.outputs:
        path = out_dir / "resonances.csv"
        emit_resonance_annotations(config.material(),
                                   (config.kr_min, config.kr_max), path)
        written["resonances"] = path

    if "potential_profile" in config.outputs:
        path = out_dir / "profiles.csv"
        _write_profiles(config, path)
        written["potential_profile"] = path

    manifest = {
        "config": config.canonical(),
        "config_hash": config.digest(),
        "versions": {
            "vortexlev": __version__,
            "numpy": np.__version__,
            "python": sys.version.split()[0],
        },
        "row_count": len(rows),
        "elapsed_s": time.time() - t_start,
        "row_timings_s": timings,
    }
    manifest_path = out_dir / "manifest.json"
    manifest_path.write_text(json.dumps(manifest, indent=2, sort_keys=True))
    written["manifest"] = manifest_path
    return written


def _write_profiles(config: SweepConfig, path: Path):
    """Transverse potential profiles, one per configured wavelength."""
    wavelengths = config.wavelength_list or (config.wavelength,)
    material = config.material()
    with open(path, "w", newline="") as f:
        f.write(PROFILE_HEADER + "\n")
        for lam in wavelengths:
            beam = config.beam(lam)
            spectrum = _cached_spectrum(beam, config.fill_factor)
            if config.radius is not None:
                sp = SizeParameter.from_radius(config.radius, lam)
            else:
                sp = SizeParameter.from_kr(config.kr_min, lam)
            table = mie_coefficients(sp, material.refractive_index)
            engine = build_engine(spectrum, table, config.counterpropagating)
            rep = trap_report(engine, material.name, material.density)
            z_ref = rep.z_eq if rep.z_eq is not None else 0.0
            window = 2.0 * lam
            ell, u = potential_profile(engine, "x", (0, 0, z_ref),
                                       (-window, window), 401)
            for pos, val in zip(ell, u):
                f.write(",".join([fmt(pos * 1e6), fmt(val / KT_REF), "x",
                                  fmt(sp.value), fmt(lam * 1e9)]) + "\n")


def emit_resonance_annotations(material: Material, kr_range, path) -> Path:
    """CSV of (family, order, kR) rows for figure overlays."""
    res = locate_resonances(material.refractive_index, kr_range)
    path = Path(path)
    with open(path, "w", newline="") as f:
        f.write(ANNOTATION_HEADER + "\n")
        for entry in res.entries:
            f.write(f"{entry.family},{entry.multipole_order},{fmt(entry.kR_peak)}\n")
    return path


def compare_sweeps(path_a: Path, path_b: Path, out_path: Path) -> Path:
    """Ratio table (a over b) of frequencies and recoil rates, joined on kR."""
    rows_a = _read_result_csv(path_a)
    rows_b = {row["kR"]: row for row in _read_result_csv(path_b)}
    cols = ["fx_kHz", "fy_kHz", "fz_kHz", "Gx_per_s", "Gy_per_s", "Gz_per_s"]
    with open(out_path, "w", newline="") as f:
        f.write("kR," + ",".join(c + "_ratio" for c in cols) + "\n")
        for row in rows_a:
            other = rows_b.get(row["kR"])
            if other is None:
                continue
            vals = []
            for c in cols:
                denom = other[c]
                num = row[c]
                if denom and not math.isnan(denom) and denom != 0 \
                        and not math.isnan(num):
                    vals.append(fmt(num / denom))
                else:
                    vals.append("nan")
            f.write(fmt(row["kR"]) + "," + ",".join(vals) + "\n")
    return out_path


def _read_result_csv(path) -> list[dict]:
    rows = []
    with open(path, newline="") as f:
        reader = csv.DictReader(f)
        if reader.fieldnames != RESULT_HEADER.split(","):
            raise NkParseError(f"unexpected header in {path}")
        for rec in reader:
            row = {}
            for key, value in rec.items():
                if key == "flags":
                    row[key] = value
                else:
                    row[key] = float(value)
            rows.append(row)
    return rows


# --- subcommands -----------------------------------------------------------

def _add_common_beam_args(p):
    p.add_argument("--family", choices=FAMILIES, default=GAUSSIAN)
    p.add_argument("--material", default="Si")
    p.add_argument("--power", type=parse_power, default=0.5)
    p.add_argument("--wavelength", type=parse_length, default=1550e-9)
    p.add_argument("--na", type=float, default=0.8)
    p.add_argument("--fill-factor", type=float, default=None)
    p.add_argument("--counterpropagating", action="store_true")


def cmd_mie(args) -> int:
    material = material_from_args(args)
    sp = SizeParameter.from_kr(args.kr, args.wavelength)
    table = mie_coefficients(sp, material.refractive_index)
    out = {
        "kR": sp.value, "radius_m": sp.radius,
        "Q_sca": table.Q_sca, "Q_ext": table.Q_ext, "Q_abs": table.Q_abs,
        "sigma_sca_m2": table.sigma_sca, "sigma_ext_m2": table.sigma_ext,
        "sigma_abs_m2": table.sigma_abs, "n_max": table.n_max,
        "a": [[c.real, c.imag] for c in table.a[1:]],
        "b": [[c.real, c.imag] for c in table.b[1:]],
    }
    print(json.dumps(out, indent=2))
    return EXIT_OK


def cmd_resonances(args) -> int:
    material = material_from_args(args)
    path = Path(args.out) if args.out else Path("resonances.csv")
    emit_resonance_annotations(material, (args.kr_min, args.kr_max), path)
    print(path)
    return EXIT_OK


def cmd_focus(args) -> int:
    beam = BeamSpec(args.family, args.power, args.wavelength, args.na)
    spectrum = _cached_spectrum(beam, args.fill_factor)
    span = 2.0 * args.wavelength
    path = Path(args.out) if args.out else Path("focus.csv")
    with open(path, "w", newline="") as f:
        f.write("position_um,axis,Ix_rel,Iy_rel,Iz_rel,I_rel\n")
        for axis, index in (("x", 0), ("z", 2)):
            pos = np.linspace(-span, span, 201)
            pts = np.zeros((201, 3))
            pts[:, index] = pos
            e, _ = focal_fields(spectrum, pts)
            comps = np.abs(e) ** 2
            total = comps.sum(axis=1)
            peak = total.max()
            for p, c, t in zip(pos, comps, total):
                f.write(",".join([fmt(p * 1e6), axis, fmt(c[0] / peak),
                                  fmt(c[1] / peak), fmt(c[2] / peak),
                                  fmt(t / peak)]) + "\n")
    print(path)
    return EXIT_OK


def cmd_force(args) -> int:
    material = material_from_args(args)
    beam = BeamSpec(args.family, args.power, args.wavelength, args.na)
    spectrum = _cached_spectrum(beam, args.fill_factor)
    sp = SizeParameter.from_kr(args.kr, args.wavelength)
    table = mie_coefficients(sp, material.refractive_index)
    engine = build_engine(spectrum, table, args.counterpropagating)
    pos = [parse_length(t) for t in args.position.split(",")]
    f = engine.force(pos)
    print(json.dumps({"position_m": pos, "force_N": list(f)}))
    return EXIT_OK


def _single_point_report(args):
    material = material_from_args(args)
    beam = BeamSpec(args.family, args.power, args.wavelength, args.na)
    spectrum = _cached_spectrum(beam, args.fill_factor)
    sp = SizeParameter.from_kr(args.kr, args.wavelength)
    table = mie_coefficients(sp, material.refractive_index)
    engine = build_engine(spectrum, table, args.counterpropagating)
    rep = trap_report(engine, material.name, material.density)
    return material, spectrum, sp, table, engine, rep


def cmd_trap(args) -> int:
    _, _, _, _, _, rep = _single_point_report(args)
    out = {
        "kR": rep.kR, "radius_m": rep.radius,
        "z_eq_m": rep.z_eq, "trapped_3d": rep.trapped_3d,
        "depth_J": list(rep.depth),
        "depth_kT": [d / KT_REF for d in rep.depth],
        "stiffness_N_per_m": list(rep.stiffness),
        "frequency_Hz": [om / (2 * math.pi) for om in rep.frequencies],
    }
    print(json.dumps(out, indent=2))
    return EXIT_OK


def cmd_recoil(args) -> int:
    material, spectrum, sp, table, _, rep = _single_point_report(args)
    z_ref = rep.z_eq if rep.z_eq is not None else 0.0
    mass = mass_of(sp.radius, material.density)
    calc = RecoilCalculator(spectrum, table)
    edot = calc.energy_rates((0, 0, z_ref), mass, args.wavelength / 2000)
    if args.counterpropagating:
        edot = edot + calc.energy_rates((0, 0, -z_ref), mass,
                                        args.wavelength / 2000)
    from .constants import HBAR
    gammas = [e / (HBAR * om) if om > 0 else float("nan")
              for e, om in zip(edot, rep.frequencies)]
    print(json.dumps({"kR": sp.value, "Edot_W": list(edot),
                      "Gamma_per_s": gammas, "trapped_3d": rep.trapped_3d}))
    return EXIT_OK


def cmd_thermal(args) -> int:
    material, spectrum, sp, table, _, rep = _single_point_report(args)
    z_ref = rep.z_eq if rep.z_eq is not None else 0.0
    ap = absorbed_power(spectrum, table, material, (0, 0, z_ref))
    bb = BlackbodySpectrum(material_nk(material), sp.radius, n_nodes=800)
    trep = solve_temperature(ap.value, bb, material.name, args.family, sp.value)
    print(json.dumps({
        "kR": sp.value, "P_abs_W": trep.P_abs, "T_K": trep.T_solution,
        "balance_residual_W": trep.balance_residual,
        "melting_exceeded": trep.melting_exceeded, "runaway": trep.runaway,
    }))
    return EXIT_OK


def cmd_sweep(args) -> int:
    overrides = {
        "family": args.family,
        "output_dir": args.out,
        "cache": False if args.no_cache else None,
        "jobs": args.jobs,
    }
    config = load_config(args.config, overrides)
    written = run_sweep(config)
    for kind, path in sorted(written.items()):
        print(f"{kind}: {path}")
    return EXIT_OK


def cmd_compare(args) -> int:
    out = Path(args.out) if args.out else Path("compare.csv")
    compare_sweeps(Path(args.a), Path(args.b), out)
    print(out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="vortexlev",
        description="Optical levitation traps from Gaussian and vector vortex beams")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("mie", help="Mie coefficients and cross sections")
    p.add_argument("--kr", type=float, required=True)
    p.add_argument("--material", default="Si")
    p.add_argument("--wavelength", type=parse_length, default=1550e-9)
    p.set_defaults(func=cmd_mie)

    p = sub.add_parser("resonances", help="locate TE/TM resonances")
    p.add_argument("--material", default="Si")
    p.add_argument("--kr-min", type=float, default=0.2)
    p.add_argument("--kr-max", type=float, default=2.2)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_resonances)

    p = sub.add_parser("focus", help="focal intensity profiles")
    _add_common_beam_args(p)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_focus)

    p = sub.add_parser("force", help="optical force at a position")
    _add_common_beam_args(p)
    p.add_argument("--kr", type=float, required=True)
    p.add_argument("--position", default="0,0,0",
                   help="comma-separated lengths, e.g. '0,0,100 nm'")
    p.set_defaults(func=cmd_force)

    for name, fn in (("trap", cmd_trap), ("recoil", cmd_recoil),
                     ("thermal", cmd_thermal)):
        p = sub.add_parser(name, help=f"single-point {name} report")
        _add_common_beam_args(p)
        p.add_argument("--kr", type=float, required=True)
        p.set_defaults(func=fn)

    p = sub.add_parser("sweep", help="run a configured size-parameter sweep")
    p.add_argument("--config", default=None)
    p.add_argument("--family", choices=FAMILIES, default=None)
    p.add_argument("--out", default=None)
    p.add_argument("--no-cache", action="store_true")
    p.add_argument("--jobs", type=int, default=None,
                   help="parallel row workers (default: available cores)")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("compare", help="ratio table between two sweep CSVs")
    p.add_argument("a")
    p.add_argument("b")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_compare)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as err:
        print(f"config error: {err}", file=sys.stderr)
        return EXIT_CONFIG
    except (NkParseError, FileNotFoundError) as err:
        print(f"data error: {err}", file=sys.stderr)
        return EXIT_DATA
    except (ConsistencyError, ConvergenceError, StepSizeError) as err:
        print(f"numerical-consistency error: {err}", file=sys.stderr)
        return EXIT_NUMERICAL
    except DomainError as err:
        print(f"config error: {err}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
