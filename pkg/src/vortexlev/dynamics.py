"""Optical forces, potentials, equilibria, trap depths and frequencies.

The force on the sphere is the net momentum outflow of the total (incident +
scattered) far field through a large sphere, decomposed into the
incident-scattered interference term and the scattered-scattered term (the
pure incident term carries no net momentum through a closed surface):

    F = -(eps0 / 2 k^2) integral r_hat [ 2 Re(W_inc . conj(F_sca)) + |F_sca|^2 ] dOmega

with W_inc the outgoing part of the incident far field and F_sca the
scattered amplitude, both band-limited to the same multipole cutoff (the
pairing is then exact: dropped incident orders are orthogonal to every
scattered order present).

Everything is batched over particle positions: a full axial scan is a couple
of BLAS matmuls.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import cumulative_trapezoid

from .beam import AngularSpectrum
from .constants import EPS0
from .errors import DomainError, PropagationError
from .mie import MieTable, mass_of
from .specfun import sphere_quadrature
from .vswf import BeamProjector, FarFieldEvaluator, mode_indices

AXIS_INDEX = {"x": 0, "y": 1, "z": 2}


@dataclass(frozen=True)
class ForceVector:
    F: np.ndarray
    position: np.ndarray
    beam_id: str


class ForceCalculator:
    """Batched optical-force engine for one (spectrum, Mie table) pair."""

    def __init__(self, spectrum: AngularSpectrum, mie: MieTable,
                 n_max: int | None = None):
        if n_max is None:
            n_max = mie.n_max + 2
        if mie.n_max < n_max:
            # extend diagonal response with zeros: high orders do not scatter
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
        self.far_grid = sphere_quadrature(2 * n_max + 4, 2 * n_max + 8)
        self.far = FarFieldEvaluator(n_max, self.far_grid)
        r_hat, _, _ = self.far_grid.unit_vectors()
        self._wr = r_hat * self.far_grid.weight[:, None]      # (nodes, 3)
        self._k_hat_far = r_hat

    def coefficient_arrays(self, positions: np.ndarray):
        """(g_e, g_m, p, q) of shape (M, P) about each position."""
        g_e, g_m = self.projector.coefficient_arrays(positions)
        return g_e, g_m, self._a_n[:, None] * g_e, self._b_n[:, None] * g_m

    def forces(self, positions: np.ndarray) -> np.ndarray:
        """Force vectors (P, 3) in N for positions (P, 3) in m."""
        positions = np.atleast_2d(np.asarray(positions, dtype=float))
        g_e, g_m, p, q = self.coefficient_arrays(positions)
        s_th, s_ph = self.far.scattered(p, q)
        w_th, w_ph = self.far.incident_outgoing(g_e, g_m)
        flux = (2.0 * (w_th * np.conj(s_th) + w_ph * np.conj(s_ph)).real
                + np.abs(s_th) ** 2 + np.abs(s_ph) ** 2)       # (nodes, P)
        pref = -EPS0 / (2.0 * self.k**2)
        return pref * (flux.T @ self._wr)

    def force(self, position) -> np.ndarray:
        return self.forces(np.asarray(position, dtype=float)[None, :])[0]


class MirroredForceCalculator:
    """Counterpropagating pair: F(r) = F_arm(r) + M F_arm(M r).

    Interference between the arms is neglected (the arms are offset in
    frequency by a few MHz); each arm carries the full configured power.
    With focus_offset = d the arm is the beam focused at z = -d, so the
    pair is the classic dual-beam geometry with foci 2d apart and the trap
    centered on their midpoint; d = 0 collapses both foci onto the center.
    """

    MIRROR = np.array([1.0, 1.0, -1.0])

    def __init__(self, single: ForceCalculator, focus_offset: float = 0.0):
        self.single = single
        self.spectrum = single.spectrum
        self.mie = single.mie
        self.k = single.k
        self.focus_offset = focus_offset
        self._shift = np.array([0.0, 0.0, focus_offset])

    def forces(self, positions: np.ndarray) -> np.ndarray:
        positions = np.atleast_2d(np.asarray(positions, dtype=float))
        direct = self.single.forces(positions + self._shift)
        mirrored = self.single.forces(positions * self.MIRROR + self._shift) * self.MIRROR
        return direct + mirrored

    def force(self, position) -> np.ndarray:
        return self.forces(np.asarray(position, dtype=float)[None, :])[0]

    def arm_positions(self, position) -> np.ndarray:
        """Particle position in each arm's own frame (for recoil sums)."""
        r = np.asarray(position, dtype=float).reshape(3)
        return np.stack([r + self._shift, r * self.MIRROR + self._shift])


def optical_force(spectrum: AngularSpectrum, mie: MieTable, position) -> ForceVector:
    """Total time-averaged optical force on a sphere at `position`."""
    pos = np.asarray(position, dtype=float).reshape(3)
    f = ForceCalculator(spectrum, mie).force(pos)
    return ForceVector(f, pos, spectrum.beam.family)


def counterprop_force(spectrum: AngularSpectrum, mie: MieTable, position) -> ForceVector:
    """Force from a counterpropagating pair of the given beam (power P each)."""
    pos = np.asarray(position, dtype=float).reshape(3)
    f = MirroredForceCalculator(ForceCalculator(spectrum, mie)).force(pos)
    return ForceVector(f, pos, f"counterprop-{spectrum.beam.family}")


def potential_profile(force_field, axis: str, through, window: tuple[float, float],
                      samples: int = 401) -> tuple[np.ndarray, np.ndarray]:
    """Potential U(l) along an axis line by trapezoidal integration of -F dl.

    force_field is any callable mapping (P, 3) positions to (P, 3) forces
    (a ForceCalculator works directly). U is referenced to zero at its
    minimum. Requires samples >= 201.
    """
    if samples < 201:
        raise DomainError("samples must be >= 201")
    if axis not in AXIS_INDEX:
        raise DomainError("axis must be one of x, y, z")
    through = np.asarray(through, dtype=float).reshape(3)
    ell = np.linspace(window[0], window[1], samples)
    pts = np.tile(through, (samples, 1))
    pts[:, AXIS_INDEX[axis]] = through[AXIS_INDEX[axis]] + ell
    f = force_field.forces(pts) if hasattr(force_field, "forces") else force_field(pts)
    f_axis = f[:, AXIS_INDEX[axis]]
    if not np.all(np.isfinite(f_axis)):
        raise PropagationError("non-finite force sample in potential profile")
    u = -cumulative_trapezoid(f_axis, ell, initial=0.0)
    return ell, u - u.min()


@dataclass(frozen=True)
class ScanConfig:
    """Scan windows and numerical steps for trap characterization."""

    axial_halfwidth_wl: float = 6.0        # window in units of wavelength
    transverse_halfwidth_wl: float = 2.0
    samples: int = 401
    root_tol_wl: float = 1e-4
    stiffness_step_wl: float = 1.0 / 200.0


@dataclass(frozen=True)
class TrapReport:
    material_name: str
    beam_family: str
    counterpropagating: bool
    kR: float
    radius: float
    wavelength: float
    z_eq: float | None
    depth: tuple[float, float, float]          # (x, y, z), J, signed
    stiffness: tuple[float, float, float]      # N/m
    frequencies: tuple[float, float, float]    # rad/s (nan where untrapped)
    trapped_3d: bool
    scan: ScanConfig = field(default_factory=ScanConfig)

    @property
    def omega(self) -> tuple[float, float, float]:
        return self.frequencies


def _axial_roots(z: np.ndarray, fz: np.ndarray, engine, tol: float) -> list[float]:
    """Stable roots of F_z on the sampled axis (sign change with negative slope).

    A root sitting exactly on a grid node (F = 0 within noise, as at the
    symmetry point of a counterpropagating pair) is detected from the signs
    of its neighbors.
    """
    roots = []
    scale = np.max(np.abs(fz))
    tiny = 1e-9 * scale
    for i in range(len(fz) - 1):
        a, b = fz[i], fz[i + 1]
        if abs(a) <= tiny:
            # node root: stable when the neighbors bracket it downward
            if 0 < i and fz[i - 1] > tiny and b < -tiny:
                roots.append(float(z[i]))
            continue
        if a > 0 and b < -tiny:              # downward crossing: restoring
            lo, hi = z[i], z[i + 1]
            flo = a
            while hi - lo > tol:
                mid = 0.5 * (lo + hi)
                fm = engine.forces(np.array([[0.0, 0.0, mid]]))[0, 2]
                if (fm > 0) == (flo > 0):
                    lo, flo = mid, fm
                else:
                    hi = mid
            roots.append(0.5 * (lo + hi))
    return roots


def _barriers(ell: np.ndarray, u: np.ndarray, center: float) -> tuple[float, float]:
    """(left, right) barrier heights of U relative to U(center)."""
    u_c = float(np.interp(center, ell, u))
    left = u[ell < center]
    right = u[ell > center]
    left_max = left.max() if left.size else u_c
    right_max = right.max() if right.size else u_c
    return left_max - u_c, right_max - u_c


def _transverse_depth(ell: np.ndarray, u: np.ndarray, stiffness: float) -> float:
    """Signed transverse depth at the on-axis point (negative when unstable)."""
    u0 = float(np.interp(0.0, ell, u))
    if stiffness > 0:
        lb, rb = _barriers(ell, u, 0.0)
        return min(lb, rb)
    return -(u0 - u.min())


def trap_report(
    engine,
    material_name: str,
    density: float,
    scan: ScanConfig | None = None,
) -> TrapReport:
    """Characterize the trap of `engine` (a ForceCalculator or mirrored pair).

    Finds the stable axial equilibrium (largest-depth one when several),
    axial depth from the lower flanking barrier, transverse depths and
    stiffnesses at the equilibrium, and oscillation frequencies from the
    particle mass. With no axial equilibrium the transverse quantities are
    evaluated at the focus and the axial depth is reported as the negative
    downstream escape drop.
    """
    if scan is None:
        scan = ScanConfig()
    spectrum = engine.spectrum
    beam = spectrum.beam
    lam = beam.wavelength_vacuum
    radius = engine.mie.x.radius
    k_r = engine.mie.x.value
    counterprop = isinstance(engine, MirroredForceCalculator)

    zw = scan.axial_halfwidth_wl * lam
    z = np.linspace(-zw, zw, scan.samples)
    pts = np.zeros((scan.samples, 3))
    pts[:, 2] = z
    fz = engine.forces(pts)[:, 2]
    if not np.all(np.isfinite(fz)):
        raise PropagationError("non-finite axial force sample")
    u_z = -cumulative_trapezoid(fz, z, initial=0.0)
    u_z -= u_z.min()

    roots = _axial_roots(z, fz, engine, scan.root_tol_wl * lam)
    z_eq = None
    axial_depth = float("nan")
    if roots:
        best = None
        for r in roots:
            lb, rb = _barriers(z, u_z, r)
            depth = min(lb, rb)
            if best is None or depth > best[1]:
                best = (r, depth)
        z_eq, axial_depth = best

    if z_eq is None:
        z_ref = 0.0
        downstream = u_z[z >= 0.0]
        u0 = float(np.interp(0.0, z, u_z))
        axial_depth = -(u0 - downstream.min())
    else:
        z_ref = z_eq

    # stiffness by central difference at the reference point
    h = scan.stiffness_step_wl * lam
    probe = np.array([
        [h, 0, z_ref], [-h, 0, z_ref],
        [0, h, z_ref], [0, -h, z_ref],
        [0, 0, z_ref + h], [0, 0, z_ref - h],
    ])
    f_probe = engine.forces(probe)
    k_x = -(f_probe[0, 0] - f_probe[1, 0]) / (2 * h)
    k_y = -(f_probe[2, 1] - f_probe[3, 1]) / (2 * h)
    k_z = -(f_probe[4, 2] - f_probe[5, 2]) / (2 * h)

    tw = scan.transverse_halfwidth_wl * lam
    x_ax, u_x = potential_profile(engine, "x", (0, 0, z_ref), (-tw, tw), scan.samples)
    y_ax, u_y = potential_profile(engine, "y", (0, 0, z_ref), (-tw, tw), scan.samples)
    depth_x = _transverse_depth(x_ax, u_x, k_x)
    depth_y = _transverse_depth(y_ax, u_y, k_y)

    mass = mass_of(radius, density)
    freqs = tuple(math.sqrt(k_j / mass) if k_j > 0 else float("nan")
                  for k_j in (k_x, k_y, k_z))
    trapped = (z_eq is not None and axial_depth > 0 and depth_x > 0 and depth_y > 0
               and k_x > 0 and k_y > 0 and k_z > 0)

    return TrapReport(
        material_name=material_name,
        beam_family=beam.family,
        counterpropagating=counterprop,
        kR=k_r,
        radius=radius,
        wavelength=lam,
        z_eq=z_eq,
        depth=(float(depth_x), float(depth_y), float(axial_depth)),
        stiffness=(float(k_x), float(k_y), float(k_z)),
        frequencies=tuple(float(f) for f in freqs),
        trapped_3d=bool(trapped),
        scan=scan,
    )


def build_engine(spectrum: AngularSpectrum, mie: MieTable,
                 counterpropagating: bool = False,
                 focus_offset: float | None = None):
    """Convenience factory used by the CLI and the reports.

    Counterpropagating traps default to the dual-beam geometry with the arm
    foci one Rayleigh range either side of the trap center (slope trapping:
    the axial restoring force scales with the scattering force, so the
    axial confinement peaks at the Mie resonances and the axial well stays
    attractive over the whole size range).
    """
    engine = ForceCalculator(spectrum, mie)
    if counterpropagating:
        if focus_offset is None:
            focus_offset = spectrum.beam.rayleigh_range_zR
        return MirroredForceCalculator(engine, focus_offset)
    return engine
