"""Optical levitation traps from Gaussian and cylindrically polarized vortex beams.

Numerical library and CLI for designing optical levitation traps across the
Rayleigh-to-Mie size range: Mie response and resonances, Richards-Wolf
focusing, vector spherical wavefunction expansion, optical forces and trap
characterization, photon-recoil heating, and bulk-temperature balance.
"""

__version__ = "0.1.0"

from .beam import AZIMUTHAL, GAUSSIAN, RADIAL, BeamSpec, focal_field, focus, paraxial_field
from .dynamics import (
    ForceCalculator,
    MirroredForceCalculator,
    ScanConfig,
    TrapReport,
    counterprop_force,
    optical_force,
    potential_profile,
    trap_report,
)
from .mie import (
    SILICA,
    SILICON,
    Material,
    MieTable,
    SizeParameter,
    locate_resonances,
    mass_of,
    mie_coefficients,
)
from .recoil import RecoilReport, mie_recoil, rayleigh_recoil, recoil_ratio
from .thermal import (
    BlackbodySpectrum,
    NkTable,
    ThermalReport,
    absorbed_power,
    blackbody_power,
    bundled_nk,
    load_nk,
    solve_temperature,
)
from .vswf import VswfCoefficients, beam_shape_coefficients, far_field, scatter

__all__ = [
    "AZIMUTHAL", "GAUSSIAN", "RADIAL", "BeamSpec", "focal_field", "focus",
    "paraxial_field", "ForceCalculator", "MirroredForceCalculator",
    "ScanConfig", "TrapReport", "counterprop_force", "optical_force",
    "potential_profile", "trap_report", "SILICA", "SILICON", "Material",
    "MieTable", "SizeParameter", "locate_resonances", "mass_of",
    "mie_coefficients", "RecoilReport", "mie_recoil", "rayleigh_recoil",
    "recoil_ratio", "BlackbodySpectrum", "NkTable", "ThermalReport",
    "absorbed_power", "blackbody_power", "bundled_nk", "load_nk",
    "solve_temperature", "VswfCoefficients", "beam_shape_coefficients",
    "far_field", "scatter",
]
