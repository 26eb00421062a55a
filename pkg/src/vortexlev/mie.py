"""Plane-wave Mie coefficients, cross sections, and resonance location.

Homogeneous spheres only. Coefficients follow the Bohren-Huffman convention
(a_n electric, b_n magnetic, lossless unitarity circle |a - 1/2| = 1/2),
computed with the logarithmic-derivative formulation so complex relative
indices are handled stably.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .constants import MEDIUM_INDEX
from .errors import DomainError, UnsupportedRangeError
from .specfun import riccati_bessel

# The paper labels resonance families TM/TE; this artifact computes electric
# (a_n) and magnetic (b_n) multipoles. An azimuthally polarized field couples
# to magnetic multipoles, which the paper calls TM. Flip here if ever needed.
PAPER_FAMILY_MAP = {"paper-TM": "magnetic", "paper-TE": "electric"}


@dataclass(frozen=True)
class Material:
    """Sphere material at the trapping wavelength."""

    name: str
    refractive_index: complex
    density: float                      # kg/m^3
    nk_table_path: str | None = None

    def __post_init__(self):
        if self.refractive_index.imag < 0:
            raise DomainError("Im(refractive_index) must be >= 0")
        if self.density <= 0:
            raise DomainError("density must be positive")


# Simulation-default materials (trapping wavelength 1550 nm).
SILICON = Material("Si", 3.48 + 5.3e-11j, 2200.0, "si_nk.csv")
SILICA = Material("SiO2", 1.46 + 5e-9j, 1850.0, "sio2_nk.csv")


@dataclass(frozen=True)
class SizeParameter:
    """Dimensionless sphere size kR = 2 pi n_medium R / lambda."""

    value: float
    radius: float
    wavelength_vacuum: float
    medium_index: float = MEDIUM_INDEX

    def __post_init__(self):
        if self.value <= 0:
            raise DomainError("size parameter must be positive")
        expect = 2 * math.pi * self.medium_index * self.radius / self.wavelength_vacuum
        if not math.isclose(self.value, expect, rel_tol=1e-12):
            raise DomainError("size parameter inconsistent with radius/wavelength")

    @classmethod
    def from_radius(cls, radius: float, wavelength_vacuum: float,
                    medium_index: float = MEDIUM_INDEX) -> "SizeParameter":
        if radius <= 0 or wavelength_vacuum <= 0:
            raise DomainError("radius and wavelength must be positive")
        value = 2 * math.pi * medium_index * radius / wavelength_vacuum
        return cls(value, radius, wavelength_vacuum, medium_index)

    @classmethod
    def from_kr(cls, kr: float, wavelength_vacuum: float,
                medium_index: float = MEDIUM_INDEX) -> "SizeParameter":
        if kr <= 0 or wavelength_vacuum <= 0:
            raise DomainError("kR and wavelength must be positive")
        radius = kr * wavelength_vacuum / (2 * math.pi * medium_index)
        return cls(kr, radius, wavelength_vacuum, medium_index)


@dataclass(frozen=True)
class MieTable:
    """Multipole coefficients and cross sections for one (x, m) pair.

    a and b are indexed 1..n_max (slot 0 unused, kept zero).
    """

    x: SizeParameter
    m: complex
    n_max: int
    a: np.ndarray
    b: np.ndarray
    Q_sca: float
    Q_ext: float
    Q_abs: float
    sigma_sca: float
    sigma_ext: float
    sigma_abs: float


def default_n_max(x: float) -> int:
    """Standard convergence cutoff for the Mie series."""
    return math.ceil(x + 4.05 * x ** (1.0 / 3.0) + 2.0)


def mie_coefficients(x: SizeParameter, m: complex, n_max: int | None = None) -> MieTable:
    """Mie a_n, b_n and efficiencies for relative index m at size parameter x.

    Uses Riccati-Bessel rows at x and the logarithmic derivative
    D_n = psi'_n(mx)/psi_n(mx) so complex m x stays stable.
    """
    xv = x.value
    if xv <= 0:
        raise DomainError("size parameter must be positive")
    if xv > 200:
        raise UnsupportedRangeError("size parameter above validated range (x <= 200)")
    if m == 0:
        raise DomainError("relative index must be nonzero")
    if n_max is None:
        n_max = default_n_max(xv)

    row = riccati_bessel(n_max, xv)
    psi, psi_m1 = row.psi[1:], row.psi[:-1]
    xi, xi_m1 = row.xi[1:], row.xi[:-1]

    rim = riccati_bessel(n_max, m * xv)
    d = (rim.psi_prime / rim.psi)[1:]

    n = np.arange(1, n_max + 1)
    ax = d / m + n / xv
    bx = d * m + n / xv
    a_n = (ax * psi - psi_m1) / (ax * xi - xi_m1)
    b_n = (bx * psi - psi_m1) / (bx * xi - xi_m1)

    w = 2 * n + 1
    q_sca = (2.0 / xv**2) * float(np.sum(w * (np.abs(a_n) ** 2 + np.abs(b_n) ** 2)))
    q_ext = (2.0 / xv**2) * float(np.sum(w * (a_n + b_n).real))
    q_abs = q_ext - q_sca

    geom = math.pi * x.radius**2
    a = np.concatenate([[0.0 + 0.0j], a_n])
    b = np.concatenate([[0.0 + 0.0j], b_n])
    return MieTable(x, m, n_max, a, b, q_sca, q_ext, q_abs,
                    q_sca * geom, q_ext * geom, q_abs * geom)


def forward_amplitude(table: MieTable) -> complex:
    """Forward-scattering amplitude S(0) = 1/2 sum (2n+1)(a_n + b_n)."""
    n = np.arange(1, table.n_max + 1)
    return 0.5 * complex(np.sum((2 * n + 1) * (table.a[1:] + table.b[1:])))


def mass_of(radius: float, density: float) -> float:
    """Sphere mass (4/3) pi R^3 rho in kg."""
    if radius <= 0:
        raise DomainError("radius must be positive")
    if density <= 0:
        raise DomainError("density must be positive")
    return 4.0 / 3.0 * math.pi * radius**3 * density


@dataclass(frozen=True)
class Resonance:
    family: str            # "paper-TM" or "paper-TE"
    multipole_order: int
    kR_peak: float
    width: float


@dataclass(frozen=True)
class ResonanceList:
    entries: list[Resonance] = field(default_factory=list)

    def for_family(self, family: str) -> list[Resonance]:
        return [e for e in self.entries if e.family == family]


def _golden_max(f, lo: float, hi: float, tol: float = 1e-4) -> float:
    """Golden-section search for the maximum of f on [lo, hi]."""
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc > fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = f(d)
    return 0.5 * (a + b)


def locate_resonances(
    m: complex,
    kR_range: tuple[float, float],
    families: set[str] | None = None,
    grid_step: float = 0.002,
    min_height: float = 0.25,
) -> ResonanceList:
    """Locate multipole resonances of |a_n|^2 / |b_n|^2 over a kR scan.

    Scans every multipole order relevant to the range, keeps strict local
    maxima above min_height, refines each peak position by golden section
    to 1e-4 in kR and estimates the full width at half maximum from the
    scan grid. Family labels follow PAPER_FAMILY_MAP.
    """
    lo, hi = kR_range
    if not 0 < lo < hi <= 200:
        raise DomainError("kR_range must satisfy 0 < lo < hi <= 200")
    if grid_step > 0.002:
        raise DomainError("grid_step must be <= 0.002")
    if families is None:
        families = set(PAPER_FAMILY_MAP)
    unknown = families - set(PAPER_FAMILY_MAP)
    if unknown:
        raise DomainError(f"unknown resonance families: {sorted(unknown)}")

    kr = np.arange(lo, hi + grid_step / 2, grid_step)
    n_orders = default_n_max(hi)
    # one Mie evaluation per grid point covers every order
    tables = [mie_coefficients(SizeParameter.from_kr(float(k), 1.0), m, n_max=n_orders)
              for k in kr]

    entries: list[Resonance] = []
    for family in sorted(families):
        kind = PAPER_FAMILY_MAP[family]
        for order in range(1, n_orders + 1):
            if kind == "magnetic":
                curve = np.array([abs(t.b[order]) ** 2 for t in tables])
            else:
                curve = np.array([abs(t.a[order]) ** 2 for t in tables])
            peak_max = curve.max(initial=0.0)
            if peak_max < min_height:
                continue
            interior = np.flatnonzero(
                (curve[1:-1] > curve[:-2]) & (curve[1:-1] > curve[2:])
            ) + 1
            for i in interior:
                if curve[i] < min_height:
                    continue

                def f(k, _order=order, _kind=kind):
                    t = mie_coefficients(SizeParameter.from_kr(k, 1.0), m,
                                         n_max=max(_order, n_orders))
                    c = t.b[_order] if _kind == "magnetic" else t.a[_order]
                    return abs(c) ** 2

                peak = _golden_max(f, float(kr[i - 1]), float(kr[i + 1]))
                width = _fwhm(kr, curve, i)
                entries.append(Resonance(family, order, peak, width))

    entries.sort(key=lambda e: e.kR_peak)
    return ResonanceList(entries)


def _fwhm(kr: np.ndarray, curve: np.ndarray, i_peak: int) -> float:
    """Full width at half maximum around grid index i_peak (edge-clipped)."""
    half = 0.5 * curve[i_peak]
    left = kr[0]
    for j in range(i_peak, 0, -1):
        if curve[j - 1] < half:
            frac = (curve[j] - half) / (curve[j] - curve[j - 1])
            left = kr[j] - frac * (kr[j] - kr[j - 1])
            break
    right = kr[-1]
    for j in range(i_peak, len(kr) - 1):
        if curve[j + 1] < half:
            frac = (curve[j] - half) / (curve[j] - curve[j + 1])
            right = kr[j] + frac * (kr[j + 1] - kr[j])
            break
    return float(right - left)
