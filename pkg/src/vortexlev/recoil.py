"""Photon-recoil heating rates, from the Rayleigh limit to the Mie regime.

Rayleigh: a scattered photon transfers recoil energy eps = hbar^2 k^2 / 2m;
the per-direction partition is the dipole radiation pattern weighted by the
squared momentum-transfer projection (k_i,j - k_s,j)^2, and the heating rate
is the photon scattering rate I0 sigma_sca / (hbar omega0) times that.

Mie regime: the rate generalizes to the sensitivity of the lab-frame far
scattering amplitude to particle displacement,

    Edot_j = (eps0 c hbar / 4 m omega0) integral |d E_amp / d x_j|^2 dOmega

with E_amp(k_hat) = F_sca(k_hat) e^{-i k k_hat . r_p} / k (volts). The
displacement derivative of the phase factor carries the momentum-transfer
projection, so this expression reduces exactly to the Rayleigh formula for a
point dipole in a plane wave. The derivative is evaluated by central finite
difference of the displaced-particle scattering solution, with a step
robustness check at delta and delta/2.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .beam import AngularSpectrum
from .constants import C0, EPS0, HBAR
from .errors import DomainError, StepSizeError
from .mie import MieTable
from .specfun import sphere_quadrature
from .vswf import BeamProjector, FarFieldEvaluator, mode_indices

RAYLEIGH_KR_BOUND = 0.5
DEFAULT_STEP_FRACTION = 1.0 / 2000.0


@dataclass(frozen=True)
class RecoilReport:
    beam_family: str
    material_name: str
    kR: float
    wavelength: float
    epsilon: float                      # single-photon recoil energy, J
    edot: tuple[float, float, float]    # W per direction
    gamma: tuple[float, float, float]   # quanta/s per direction
    frequencies: tuple[float, float, float]  # rad/s used for gamma
    regime: str


def _gamma_from_edot(edot, frequencies):
    out = []
    for e, om in zip(edot, frequencies):
        if om and om > 0 and math.isfinite(om):
            out.append(e / (HBAR * om))
        else:
            out.append(float("nan"))
    return tuple(out)


def rayleigh_partition(polarization_axis) -> np.ndarray:
    """<Delta E_j>/eps for a dipole along `polarization_axis`, beam along z.

    Quadrature of the dipole pattern with the (k_i - k_s)^2 weight; exact
    for this low-degree integrand. Components sum to 2.
    """
    e_hat = np.asarray(polarization_axis, dtype=float)
    e_hat = e_hat / np.linalg.norm(e_hat)
    grid = sphere_quadrature(8, 8)
    r_hat, _, _ = grid.unit_vectors()
    pattern = 3.0 / (8.0 * math.pi) * (1.0 - (r_hat @ e_hat) ** 2)
    k_i = np.array([0.0, 0.0, 1.0])
    out = []
    for j in range(3):
        w = (k_i[j] - r_hat[:, j]) ** 2
        out.append(float(grid.integrate(pattern * w).real))
    return np.array(out)


def rayleigh_recoil(
    intensity_at_particle: float,
    mie: MieTable,
    mass: float,
    polarization_axis=(1.0, 0.0, 0.0),
    frequencies=(float("nan"),) * 3,
    material_name: str = "",
    beam_family: str = "gaussian_linear_x",
) -> RecoilReport:
    """Dipole-limit recoil heating for a linearly polarized illuminating wave.

    Warns (does not fail) outside the advisory Rayleigh bound kR <= 0.5.
    """
    if mass <= 0:
        raise DomainError("mass must be positive")
    if intensity_at_particle < 0:
        raise DomainError("intensity must be nonnegative")
    kr = mie.x.value
    if kr > RAYLEIGH_KR_BOUND:
        warnings.warn(f"Rayleigh recoil used at kR = {kr:.3g} > {RAYLEIGH_KR_BOUND}",
                      stacklevel=2)
    lam = mie.x.wavelength_vacuum
    k = 2 * math.pi * mie.x.medium_index / lam
    omega0 = 2 * math.pi * C0 / lam
    eps = HBAR**2 * k**2 / (2 * mass)
    partition = rayleigh_partition(polarization_axis)
    rate = intensity_at_particle * mie.sigma_sca / (HBAR * omega0)
    edot = tuple(float(rate * eps * p) for p in partition)
    return RecoilReport(
        beam_family=beam_family,
        material_name=material_name,
        kR=kr,
        wavelength=lam,
        epsilon=eps,
        edot=edot,
        gamma=_gamma_from_edot(edot, frequencies),
        frequencies=tuple(float(f) for f in frequencies),
        regime="rayleigh",
    )


class RecoilCalculator:
    """Displacement-derivative recoil engine for one (spectrum, Mie) pair."""

    def __init__(self, spectrum: AngularSpectrum, mie: MieTable,
                 n_max: int | None = None):
        if n_max is None:
            n_max = mie.n_max + 2
        if mie.n_max < n_max:
            a = np.concatenate([mie.a, np.zeros(n_max - mie.n_max, complex)])
            b = np.concatenate([mie.b, np.zeros(n_max - mie.n_max, complex)])
        else:
            a, b = mie.a, mie.b
        self.spectrum = spectrum
        self.mie = mie
        self.n_max = n_max
        self.k = spectrum.wavenumber
        self.projector = BeamProjector(spectrum, n_max)
        n_idx, _ = mode_indices(n_max)
        self._a_n = a[n_idx]
        self._b_n = b[n_idx]
        self.grid = sphere_quadrature(2 * n_max + 4, 2 * n_max + 8)
        self.far = FarFieldEvaluator(n_max, self.grid)
        self._k_hat = self.grid.unit_vectors()[0]

    def lab_amplitudes(self, positions: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Lab-frame scattered far-field amplitude (volts) at each grid node.

        Shape (nodes, P): the particle-frame amplitude re-phased by
        exp(-i k k_hat . r_p) and scaled by 1/k.
        """
        positions = np.atleast_2d(np.asarray(positions, dtype=float))
        g_e, g_m = self.projector.coefficient_arrays(positions)
        f_th, f_ph = self.far.scattered(self._a_n[:, None] * g_e,
                                        self._b_n[:, None] * g_m)
        phase = np.exp(-1j * self.k * (self._k_hat @ positions.T))
        return f_th * phase / self.k, f_ph * phase / self.k

    def energy_rates(self, equilibrium, mass: float, delta: float) -> np.ndarray:
        """Edot_(x,y,z) in W by central differencing at step `delta`."""
        r0 = np.asarray(equilibrium, dtype=float).reshape(3)
        offsets = []
        for j in range(3):
            e_j = np.zeros(3)
            e_j[j] = delta
            offsets.extend([r0 + e_j, r0 - e_j])
        f_th, f_ph = self.lab_amplitudes(np.array(offsets))
        omega0 = self.spectrum.beam.omega
        pref = EPS0 * C0 * HBAR / (4 * mass * omega0)
        out = np.zeros(3)
        for j in range(3):
            d_th = (f_th[:, 2 * j] - f_th[:, 2 * j + 1]) / (2 * delta)
            d_ph = (f_ph[:, 2 * j] - f_ph[:, 2 * j + 1]) / (2 * delta)
            dens = np.abs(d_th) ** 2 + np.abs(d_ph) ** 2
            out[j] = pref * float(self.grid.integrate(dens).real)
        return out


def mie_recoil(
    spectrum: AngularSpectrum,
    mie: MieTable,
    equilibrium,
    mass: float,
    frequencies,
    material_name: str = "",
    delta: float | None = None,
    step_check: bool = True,
) -> RecoilReport:
    """Full-Mie recoil heating at a trap equilibrium.

    Raises StepSizeError when the delta and delta/2 central differences
    disagree by more than 1% on any axis (step_check=False skips the
    half-step evaluation).
    """
    if mass <= 0:
        raise DomainError("mass must be positive")
    lam = spectrum.beam.wavelength_vacuum
    if delta is None:
        delta = DEFAULT_STEP_FRACTION * lam
    calc = RecoilCalculator(spectrum, mie)
    edot = calc.energy_rates(equilibrium, mass, delta)
    if step_check:
        edot_half = calc.energy_rates(equilibrium, mass, delta / 2)
        scale = np.maximum(np.abs(edot_half), np.max(np.abs(edot_half)) * 1e-12)
        if np.any(np.abs(edot - edot_half) > 0.01 * scale):
            raise StepSizeError(
                f"recoil finite-difference not converged: {edot} vs {edot_half}")
    k = spectrum.wavenumber
    eps = HBAR**2 * k**2 / (2 * mass)
    edot_t = tuple(float(e) for e in edot)
    return RecoilReport(
        beam_family=spectrum.beam.family,
        material_name=material_name,
        kR=mie.x.value,
        wavelength=lam,
        epsilon=eps,
        edot=edot_t,
        gamma=_gamma_from_edot(edot_t, frequencies),
        frequencies=tuple(float(f) for f in frequencies),
        regime="mie",
    )


def counterprop_energy_rates(calc: RecoilCalculator, position, mass: float,
                             delta: float, focus_offset: float = 0.0) -> np.ndarray:
    """Edot of a counterpropagating pair: shot noise of the two arms adds.

    Each arm sees the particle at its own frame position (the mirror image
    for the backward arm, shifted by the focus offset of the dual-beam
    geometry); the per-axis rates are mirror-invariant componentwise.
    """
    r = np.asarray(position, dtype=float).reshape(3)
    shift = np.array([0.0, 0.0, focus_offset])
    mirror = np.array([1.0, 1.0, -1.0])
    return (calc.energy_rates(r + shift, mass, delta)
            + calc.energy_rates(r * mirror + shift, mass, delta))


def recoil_ratio(report_a: RecoilReport, report_b: RecoilReport) -> tuple[float, float, float]:
    """Componentwise Gamma_a / Gamma_b; nan marks undefined (zero denominator)."""
    if not math.isclose(report_a.wavelength, report_b.wavelength, rel_tol=1e-12):
        raise DomainError("recoil reports use different wavelengths")
    out = []
    for ga, gb in zip(report_a.gamma, report_b.gamma):
        if not (math.isfinite(ga) and math.isfinite(gb)) or gb == 0:
            out.append(float("nan"))
        else:
            out.append(ga / gb)
    return tuple(out)
