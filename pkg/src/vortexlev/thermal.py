"""Bulk-temperature estimation from the steady-state power balance.

The particle absorbs trap-laser power P_abs plus ambient blackbody power at
T0 = 293 K and radiates blackbody power at its own temperature T; the
steady-state T solves

    P_abs + P_bb(T0) = P_bb(T),        P_gas = 0 (high vacuum)

with the blackbody exchange computed from Planck's law weighted by the
full-Mie absorption cross section at every wavelength (Kirchhoff: the same
sigma_abs(omega) describes absorption and emission). Optical constants come
from bundled or user-supplied n,k tables.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np
from scipy.optimize import brentq

from .beam import AngularSpectrum
from .constants import C0, HBAR, KB, MELTING_POINTS, T_AMBIENT
from .errors import ConsistencyError, DomainError, NkParseError
from .mie import Material, MieTable, SizeParameter, mie_coefficients
from .vswf import (
    FarFieldEvaluator,
    beam_shape_coefficients,
    extinction_power,
    scatter,
    scattered_power,
)

BB_WAVELENGTH_RANGE = (0.5e-6, 200e-6)
BB_NODES = 2000
T_SOLVER_MAX = 5000.0


@dataclass(frozen=True)
class NkTable:
    """Tabulated optical constants, interpolated linearly in log-wavelength."""

    wavelength: np.ndarray          # m, strictly increasing
    n: np.ndarray
    k: np.ndarray
    source: str = ""

    def refractive_index(self, wavelength_m) -> np.ndarray | complex:
        """n + ik at the query wavelength; endpoints held outside the range."""
        lam = np.asarray(wavelength_m, dtype=float)
        logl = np.log(np.clip(lam, self.wavelength[0], self.wavelength[-1]))
        grid = np.log(self.wavelength)
        n = np.interp(logl, grid, self.n)
        k = np.interp(logl, grid, self.k)
        out = n + 1j * k
        return complex(out) if np.isscalar(wavelength_m) else out

    def in_range(self, wavelength_m) -> np.ndarray | bool:
        lam = np.asarray(wavelength_m, dtype=float)
        ok = (lam >= self.wavelength[0]) & (lam <= self.wavelength[-1])
        return bool(ok) if np.isscalar(wavelength_m) else ok


def load_nk(path) -> NkTable:
    """Parse an n,k file: '#' comments, rows 'wavelength_um,n,k', increasing.

    Raises NkParseError (with the offending line number) on malformed rows,
    non-monotonic wavelengths, or negative k.
    """
    path = Path(path)
    if not path.exists():
        raise NkParseError(f"file not found: {path}")
    wl, ns, ks = [], [], []
    source = str(path)
    for lineno, raw in enumerate(path.read_text().splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split(",")
        if len(parts) != 3:
            raise NkParseError("expected 'wavelength_um,n,k'", lineno)
        try:
            lam_um, n, k = (float(p) for p in parts)
        except ValueError:
            raise NkParseError(f"non-numeric field in {line!r}", lineno) from None
        if wl and lam_um * 1e-6 <= wl[-1]:
            raise NkParseError("wavelengths must be strictly increasing", lineno)
        if n <= 0:
            raise NkParseError("n must be positive", lineno)
        if k < 0:
            raise NkParseError("k must be nonnegative", lineno)
        wl.append(lam_um * 1e-6)
        ns.append(n)
        ks.append(k)
    if len(wl) < 2:
        raise NkParseError("need at least two data rows")
    return NkTable(np.array(wl), np.array(ns), np.array(ks), source)


def bundled_nk(name: str) -> NkTable:
    """Load one of the data files shipped with the package (by file name)."""
    ref = resources.files("vortexlev").joinpath("data").joinpath(name)
    with resources.as_file(ref) as path:
        return load_nk(path)


def material_nk(material: Material) -> NkTable:
    if material.nk_table_path is None:
        raise DomainError(f"material {material.name} has no n,k table")
    path = Path(material.nk_table_path)
    if path.exists():
        return load_nk(path)
    return bundled_nk(material.nk_table_path)


@dataclass(frozen=True)
class AbsorbedPower:
    """Absorbed trap power by two routes (they must agree to 1%)."""

    flux_route: float           # Poynting-flux difference over a far sphere
    coefficient_route: float    # extinction minus scattering, coefficient space

    @property
    def value(self) -> float:
        return self.coefficient_route


def absorbed_power(
    spectrum: AngularSpectrum,
    mie: MieTable,
    material: Material,
    equilibrium,
    n_max: int | None = None,
) -> AbsorbedPower:
    """Absorbed laser power at the equilibrium position, computed two ways.

    Route (a) integrates the far-field radial Poynting balance (incoming
    minus outgoing) over a full sphere; route (b) is the coefficient-space
    extinction-minus-scattering sum. Disagreement beyond 1% raises
    ConsistencyError.
    """
    if n_max is None:
        n_max = mie.n_max + 2
    table = mie if mie.n_max >= n_max else mie_coefficients(mie.x, mie.m, n_max=n_max)
    coeffs = beam_shape_coefficients(spectrum, equilibrium, n_max, check=False)
    sc = scatter(coeffs, table)

    p_coeff = extinction_power(sc) - scattered_power(sc)

    grid_eval = FarFieldEvaluator(n_max, _far_grid(n_max))
    w_in = grid_eval.incident_incoming(sc.g_e, sc.g_m)
    s_th, s_ph = grid_eval.scattered(sc.p, sc.q)
    o_th, o_ph = grid_eval.incident_outgoing(sc.g_e, sc.g_m)
    out_th, out_ph = o_th + s_th, o_ph + s_ph
    dens_in = np.abs(w_in[0]) ** 2 + np.abs(w_in[1]) ** 2
    dens_out = np.abs(out_th) ** 2 + np.abs(out_ph) ** 2
    from .constants import ETA0
    k = spectrum.wavenumber
    p_flux = float(grid_eval.grid.integrate(dens_in - dens_out).real) / (2 * ETA0 * k**2)

    scale = max(abs(p_coeff), abs(p_flux))
    if scale > 1e-12 * spectrum.beam.power and abs(p_flux - p_coeff) > 0.01 * scale:
        raise ConsistencyError(
            f"absorbed-power routes disagree: flux {p_flux:.6e} vs "
            f"coefficients {p_coeff:.6e}")
    return AbsorbedPower(p_flux, p_coeff)


def _far_grid(n_max: int):
    from .specfun import sphere_quadrature
    return sphere_quadrature(2 * n_max + 4, 2 * n_max + 8)


class BlackbodySpectrum:
    """Planck-weighted Mie absorption for one (nk table, radius) pair.

    Precomputes sigma_abs on a fixed log-spaced wavelength grid so repeated
    temperature evaluations (the balance solver) are cheap.
    """

    def __init__(self, nk: NkTable, radius: float,
                 n_nodes: int = BB_NODES,
                 wavelength_range: tuple[float, float] = BB_WAVELENGTH_RANGE):
        if radius <= 0:
            raise DomainError("radius must be positive")
        self.nk = nk
        self.radius = radius
        lam = np.geomspace(wavelength_range[0], wavelength_range[1], n_nodes)
        self.omega = (2 * math.pi * C0 / lam)[::-1]          # ascending
        lam = lam[::-1]
        m = nk.refractive_index(lam)
        sigma = np.empty(n_nodes)
        for i, (lam_i, m_i) in enumerate(zip(lam, m)):
            x = SizeParameter.from_radius(radius, lam_i)
            sigma[i] = mie_coefficients(x, complex(m_i)).sigma_abs
        self.sigma_abs = sigma
        self._lam = lam

    def coverage(self, temperature: float) -> float:
        """Planck-weighted fraction of the band covered by the nk table."""
        w = self._planck_weight(temperature)
        total = np.trapezoid(w, self.omega)
        inside = np.trapezoid(np.where(self.nk.in_range(self._lam), w, 0.0), self.omega)
        return float(inside / total) if total > 0 else 1.0

    def _planck_weight(self, temperature: float) -> np.ndarray:
        x = HBAR * self.omega / (KB * temperature)
        with np.errstate(over="ignore"):
            occ = 1.0 / np.expm1(np.clip(x, 1e-12, 700.0))
        return HBAR * self.omega**3 / (math.pi**2 * C0**2) * occ

    def power(self, temperature: float) -> float:
        """Radiated (or absorbed-from-ambient) blackbody power at T, in W."""
        if temperature < 0:
            raise DomainError("temperature must be nonnegative")
        if temperature == 0:
            return 0.0
        integrand = self._planck_weight(temperature) * self.sigma_abs
        return float(np.trapezoid(integrand, self.omega))


def blackbody_power(nk: NkTable, radius: float, temperature: float,
                    n_nodes: int = BB_NODES) -> float:
    """One-shot Planck integral with full-Mie sigma_abs(omega).

    Emits a coverage warning when the nk table misses more than half of the
    thermally weighted band.
    """
    spec = BlackbodySpectrum(nk, radius, n_nodes=n_nodes)
    if temperature > 0 and spec.coverage(temperature) < 0.5:
        warnings.warn("n,k table covers less than half of the thermal band",
                      stacklevel=2)
    return spec.power(temperature)


@dataclass(frozen=True)
class ThermalReport:
    material_name: str
    beam_family: str
    kR: float
    radius: float
    P_abs: float
    T_solution: float
    balance_residual: float
    resonance_flag: bool
    melting_exceeded: bool
    runaway: bool


def solve_temperature(
    p_abs: float,
    bb: BlackbodySpectrum,
    material_name: str = "",
    beam_family: str = "",
    kR: float = float("nan"),
    resonance_flag: bool = False,
) -> ThermalReport:
    """Steady-state particle temperature from the power balance.

    Bracketing (brentq) on [T_ambient, 5000 K]; no root below 5000 K sets
    the runaway flag instead of raising.
    """
    if p_abs < 0:
        raise DomainError("absorbed power must be nonnegative")
    ambient_in = bb.power(T_AMBIENT)

    def balance(t):
        return p_abs + ambient_in - bb.power(t)

    melting = MELTING_POINTS.get(material_name, math.inf)
    if p_abs == 0:
        return ThermalReport(material_name, beam_family, kR, bb.radius,
                             0.0, T_AMBIENT, 0.0, resonance_flag,
                             T_AMBIENT >= melting, False)
    if balance(T_SOLVER_MAX) > 0:
        return ThermalReport(material_name, beam_family, kR, bb.radius,
                             p_abs, float("nan"), float("nan"),
                             resonance_flag, True, True)
    t_sol = brentq(balance, T_AMBIENT, T_SOLVER_MAX, xtol=1e-6, rtol=1e-14)
    residual = balance(t_sol)
    return ThermalReport(material_name, beam_family, kR, bb.radius,
                         p_abs, float(t_sol), float(residual),
                         resonance_flag, t_sol >= melting, False)
