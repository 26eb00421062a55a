import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from helpers import dipole_force, dipole_polarizability
from vortexlev.beam import AZIMUTHAL, GAUSSIAN, RADIAL, BeamSpec, focus
from vortexlev.dynamics import (
    ForceCalculator,
    MirroredForceCalculator,
    ScanConfig,
    counterprop_force,
    optical_force,
    potential_profile,
    trap_report,
)
from vortexlev.errors import DomainError
from vortexlev.mie import SILICA, SILICON, SizeParameter, mie_coefficients

WL = 1550e-9


def make_engine(family, kr, material, na=0.8, counter=False, power=0.5):
    spectrum = focus(BeamSpec(family, power, WL, na))
    table = mie_coefficients(SizeParameter.from_kr(kr, WL), material.refractive_index)
    engine = ForceCalculator(spectrum, table)
    return MirroredForceCalculator(engine) if counter else engine


class TestOpticalForce:
    def test_rayleigh_dipole_oracle(self):
        spectrum = focus(BeamSpec(GAUSSIAN, 0.5, WL, 0.8))
        sp = SizeParameter.from_kr(0.1, WL)
        table = mie_coefficients(sp, SILICA.refractive_index)
        calc = ForceCalculator(spectrum, table)
        alpha = dipole_polarizability(sp.radius, SILICA.refractive_index,
                                      spectrum.wavenumber)
        rng = np.random.default_rng(1)
        pts = rng.uniform(-0.5, 0.5, (15, 3)) * spectrum.beam.waist_w0
        f_mie = calc.forces(pts)
        f_dip = dipole_force(spectrum, alpha, pts)
        scale = np.linalg.norm(f_dip, axis=1, keepdims=True)
        assert np.max(np.abs(f_mie - f_dip) / (np.abs(f_dip) + 0.01 * scale)) < 0.02

    def test_avb_axial_symmetry(self):
        engine = make_engine(AZIMUTHAL, 1.0, SILICON)
        f = engine.forces(np.array([[0.0, 0.0, 0.5e-6], [0.0, 0.0, -1.0e-6]]))
        scale = np.max(np.abs(f))
        assert np.max(np.abs(f[:, :2])) < 1e-4 * scale

    def test_gb_silicon_expelled_beyond_mie_threshold(self):
        # downstream axial force stays positive at kR = 0.9: no equilibrium
        engine = make_engine(GAUSSIAN, 0.9, SILICON)
        z = np.linspace(0.0, 6 * WL, 60)
        pts = np.zeros((60, 3))
        pts[:, 2] = z
        fz = engine.forces(pts)[:, 2]
        assert np.all(fz > 0)

    def test_force_vector_wrapper(self):
        spectrum = focus(BeamSpec(GAUSSIAN, 0.5, WL, 0.8))
        table = mie_coefficients(SizeParameter.from_kr(0.3, WL), SILICA.refractive_index)
        fv = optical_force(spectrum, table, (0, 0, 0.2e-6))
        assert fv.F.shape == (3,)
        assert np.all(np.isfinite(fv.F))

    def test_cylindrical_symmetry_x_vs_y(self):
        engine = make_engine(RADIAL, 0.8, SILICON)
        x = 0.3e-6
        z = 0.4e-6
        f = engine.forces(np.array([[x, 0, z], [0, x, z]]))
        assert abs(f[0, 0] - f[1, 1]) < 1e-6 * abs(f[0, 0])
        assert abs(f[0, 2] - f[1, 2]) < 1e-6 * max(abs(f[0, 2]), 1e-30)

    def test_gb_transverse_asymmetry(self):
        # linear polarization breaks x/y symmetry at Mie sizes
        engine = make_engine(GAUSSIAN, 1.0, SILICON)
        x = 0.3e-6
        f = engine.forces(np.array([[x, 0, 0], [0, x, 0]]))
        assert abs(f[0, 0] - f[1, 1]) > 0.05 * max(abs(f[0, 0]), abs(f[1, 1]))


class TestCounterprop:
    def test_axial_force_vanishes_at_origin(self):
        engine = make_engine(AZIMUTHAL, 0.9, SILICON, na=0.4, counter=True)
        f = engine.force(np.zeros(3))
        single = engine.single.force(np.zeros(3))
        assert abs(f[2]) < 1e-10 * abs(single[2])

    def test_transverse_force_doubles_at_z0(self):
        engine = make_engine(AZIMUTHAL, 0.9, SILICON, na=0.4, counter=True)
        pt = np.array([[0.3e-6, 0.0, 0.0]])
        f_pair = engine.forces(pt)
        f_single = engine.single.forces(pt)
        assert_allclose(f_pair[0, 0], 2 * f_single[0, 0], rtol=1e-10)

    def test_axial_stiffness_doubles_gradient_part(self):
        # oracle: finite difference of the summed forces vs the odd part of
        # the single-beam force (its gradient component) for a Rayleigh sphere
        engine = make_engine(GAUSSIAN, 0.2, SILICA, counter=True)
        h = WL / 400
        pts = np.array([[0, 0, h], [0, 0, -h]])
        f_pair = engine.forces(pts)
        f_single = engine.single.forces(pts)
        k_pair = -(f_pair[0, 2] - f_pair[1, 2]) / (2 * h)
        grad_part = 0.5 * (f_single[0, 2] - f_single[1, 2])   # odd component
        k_grad = -grad_part / h
        assert_allclose(k_pair, 2 * k_grad, rtol=1e-8)

    def test_transverse_sign_flips_across_first_tm(self):
        below = make_engine(AZIMUTHAL, 0.6, SILICON, na=0.4, counter=True)
        above = make_engine(AZIMUTHAL, 1.0, SILICON, na=0.4, counter=True)
        h = WL / 200
        pts = np.array([[h, 0, 0], [-h, 0, 0]])
        k_below = -(below.forces(pts)[0, 0] - below.forces(pts)[1, 0]) / (2 * h)
        k_above = -(above.forces(pts)[0, 0] - above.forces(pts)[1, 0]) / (2 * h)
        assert k_below < 0
        assert k_above > 0

    def test_wrapper(self):
        spectrum = focus(BeamSpec(AZIMUTHAL, 0.5, WL, 0.4))
        table = mie_coefficients(SizeParameter.from_kr(0.9, WL), SILICON.refractive_index)
        fv = counterprop_force(spectrum, table, (0, 0, 0.1e-6))
        assert np.all(np.isfinite(fv.F))

    def test_dual_beam_axial_depth_positive_with_resonant_maxima(self):
        # dual-beam AVB at low NA: the axial well is attractive over the
        # whole range and deepest at the paper-TM (magnetic) modes
        from vortexlev.dynamics import build_engine

        spectrum = focus(BeamSpec(AZIMUTHAL, 0.5, WL, 0.4))
        depths = {}
        for kr in (0.70, 0.866, 0.93, 1.25, 1.35):
            table = mie_coefficients(SizeParameter.from_kr(kr, WL),
                                     SILICON.refractive_index)
            engine = build_engine(spectrum, table, counterpropagating=True)
            rep = trap_report(engine, "Si", SILICON.density)
            depths[kr] = rep.depth[2]
        assert all(d > 0 for d in depths.values())
        assert depths[0.866] > depths[0.70] and depths[0.866] > depths[0.93]
        assert depths[1.25] > depths[0.93] and depths[1.25] > depths[1.35]


class TestPotentialProfile:
    def test_zero_force_zero_potential(self):
        ell, u = potential_profile(lambda pts: np.zeros_like(pts), "z",
                                   (0, 0, 0), (-1e-6, 1e-6), 201)
        assert np.all(u == 0)

    def test_harmonic_region_quadratic(self):
        engine = make_engine(GAUSSIAN, 0.4, SILICA)
        rep = trap_report(engine, "SiO2", SILICA.density)
        w0 = engine.spectrum.beam.waist_w0
        ell, u = potential_profile(engine, "x", (0, 0, rep.z_eq),
                                   (-w0 / 4, w0 / 4), 201)
        k_x = rep.stiffness[0]
        resid = u - (u[100] + 0.5 * k_x * ell**2)
        assert np.max(np.abs(resid)) < 0.02 * np.max(u)

    def test_minimum_referenced_to_zero(self):
        engine = make_engine(GAUSSIAN, 0.4, SILICA)
        _, u = potential_profile(engine, "z", (0, 0, 0), (-6 * WL, 6 * WL), 301)
        assert u.min() == 0.0

    def test_preconditions(self):
        with pytest.raises(DomainError):
            potential_profile(lambda p: np.zeros_like(p), "z", (0, 0, 0),
                              (-1e-6, 1e-6), 100)
        with pytest.raises(DomainError):
            potential_profile(lambda p: np.zeros_like(p), "w", (0, 0, 0),
                              (-1e-6, 1e-6), 201)


class TestTrapReport:
    def test_rayleigh_gaussian_trap(self):
        rep = trap_report(make_engine(GAUSSIAN, 0.4, SILICA), "SiO2", SILICA.density)
        assert rep.trapped_3d
        assert rep.z_eq is not None and 0 < rep.z_eq < 1e-6
        assert all(d > 0 for d in rep.depth)
        assert all(k > 0 for k in rep.stiffness)

    def test_frequency_from_stiffness(self):
        rep = trap_report(make_engine(GAUSSIAN, 0.4, SILICA), "SiO2", SILICA.density)
        from vortexlev.mie import mass_of
        mass = mass_of(rep.radius, SILICA.density)
        for k_j, om in zip(rep.stiffness, rep.frequencies):
            assert_allclose(om, math.sqrt(k_j / mass), rtol=1e-12)

    def test_stiffness_consistency_with_potential_curvature(self):
        engine = make_engine(GAUSSIAN, 0.4, SILICA)
        rep = trap_report(engine, "SiO2", SILICA.density)
        ell, u = potential_profile(engine, "z", (0, 0, 0),
                                   (rep.z_eq - 0.2e-6, rep.z_eq + 0.2e-6), 401)
        coeffs = np.polyfit(ell - rep.z_eq, u, 2)
        assert_allclose(2 * coeffs[0], rep.stiffness[2], rtol=0.02)

    def test_untrapped_gb_silicon_reports_negative_axial_depth(self):
        rep = trap_report(make_engine(GAUSSIAN, 0.9, SILICON), "Si", SILICON.density)
        assert rep.z_eq is None
        assert rep.depth[2] < 0
        assert not rep.trapped_3d

    def test_avb_dark_trap_at_window(self):
        rep = trap_report(make_engine(AZIMUTHAL, 1.56, SILICON), "Si", SILICON.density)
        assert rep.trapped_3d
        assert -1.5e-6 < rep.z_eq < -1.1e-6

    def test_scan_config_dataclass(self):
        scan = ScanConfig(samples=201)
        rep = trap_report(make_engine(GAUSSIAN, 0.4, SILICA), "SiO2",
                          SILICA.density, scan=scan)
        assert rep.scan.samples == 201
