import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from vortexlev.beam import AZIMUTHAL, GAUSSIAN, BeamSpec, focal_field, focus
from vortexlev.constants import C0, EPS0, HBAR, KB, T_AMBIENT
from vortexlev.errors import NkParseError
from vortexlev.mie import SILICA, SILICON, SizeParameter, mie_coefficients
from vortexlev.thermal import (
    BlackbodySpectrum,
    absorbed_power,
    blackbody_power,
    bundled_nk,
    load_nk,
    solve_temperature,
)

WL = 1550e-9


class TestLoadNk:
    def test_two_row_interpolation(self, tmp_path):
        p = tmp_path / "t.csv"
        p.write_text("# comment\n1.0,1.5,0.1\n2.0,2.5,0.3\n")
        nk = load_nk(p)
        mid = nk.refractive_index(math.sqrt(2.0) * 1e-6)   # log midpoint
        assert_allclose(mid.real, 2.0, rtol=1e-12)
        assert_allclose(mid.imag, 0.2, rtol=1e-12)

    def test_below_range_holds_endpoint(self, tmp_path):
        p = tmp_path / "t.csv"
        p.write_text("1.0,1.5,0.1\n2.0,2.5,0.3\n")
        nk = load_nk(p)
        assert nk.refractive_index(0.5e-6) == 1.5 + 0.1j
        assert not nk.in_range(0.5e-6)
        assert nk.in_range(1.5e-6)

    def test_bundled_silicon_pins_trap_wavelength(self):
        nk = bundled_nk("si_nk.csv")
        m = nk.refractive_index(1550e-9)
        assert_allclose(m.real, 3.48, rtol=1e-3)
        assert_allclose(m.imag, 5.3e-11, rtol=0.05)

    def test_bundled_silica_pins_trap_wavelength(self):
        nk = bundled_nk("sio2_nk.csv")
        m = nk.refractive_index(1550e-9)
        assert_allclose(m.real, 1.46, rtol=1e-3)
        assert_allclose(m.imag, 5e-9, rtol=0.05)

    def test_malformed_row_reports_line(self, tmp_path):
        p = tmp_path / "t.csv"
        p.write_text("1.0,1.5,0.1\nbogus line\n")
        with pytest.raises(NkParseError) as err:
            load_nk(p)
        assert err.value.line_number == 2

    def test_nonmonotonic_rejected(self, tmp_path):
        p = tmp_path / "t.csv"
        p.write_text("1.0,1.5,0.1\n0.9,1.5,0.1\n")
        with pytest.raises(NkParseError):
            load_nk(p)

    def test_negative_k_rejected(self, tmp_path):
        p = tmp_path / "t.csv"
        p.write_text("1.0,1.5,-0.1\n2.0,1.5,0.1\n")
        with pytest.raises(NkParseError):
            load_nk(p)


class TestAbsorbedPower:
    def test_lossless_sphere_absorbs_nothing(self):
        s = focus(BeamSpec(GAUSSIAN, 0.5, WL, 0.8))
        t = mie_coefficients(SizeParameter.from_kr(0.8, WL), 3.48)
        ap = absorbed_power(s, t, SILICON, (0, 0, 0))
        assert abs(ap.value) < 1e-9 * 0.5

    def test_rayleigh_limit_matches_dipole_absorption(self):
        s = focus(BeamSpec(GAUSSIAN, 0.5, WL, 0.8))
        # absorbing test index so sigma_abs is well above roundoff
        m = 1.46 + 1e-4j
        sp = SizeParameter.from_kr(0.08, WL)
        t = mie_coefficients(sp, m)
        rep_point = (0, 0, 0)
        e, _ = focal_field(s, rep_point)
        i0 = 0.5 * EPS0 * C0 * float(np.sum(np.abs(e) ** 2))
        ap = absorbed_power(s, t, SILICA, rep_point)
        assert abs(ap.value - i0 * t.sigma_abs) < 0.03 * i0 * t.sigma_abs

    def test_bounded_by_beam_power(self):
        s = focus(BeamSpec(AZIMUTHAL, 0.5, WL, 0.8))
        t = mie_coefficients(SizeParameter.from_kr(0.9, WL), SILICON.refractive_index)
        ap = absorbed_power(s, t, SILICON, (0, 0, 0))
        assert 0 <= ap.value <= 0.5

    def test_routes_agree(self):
        s = focus(BeamSpec(AZIMUTHAL, 0.5, WL, 0.8))
        t = mie_coefficients(SizeParameter.from_kr(0.9, WL), SILICON.refractive_index)
        ap = absorbed_power(s, t, SILICON, (0.1e-6, 0, 0.2e-6))
        assert abs(ap.flux_route - ap.coefficient_route) < 0.01 * abs(ap.value)


class TestBlackbodyPower:
    def test_zero_temperature_zero_power(self):
        bb = BlackbodySpectrum(bundled_nk("si_nk.csv"), 100e-9, n_nodes=400)
        assert bb.power(0.0) == 0.0

    def test_constant_sigma_stefan_boltzmann(self):
        bb = BlackbodySpectrum(bundled_nk("si_nk.csv"), 100e-9, n_nodes=2000)
        bb.sigma_abs = np.full_like(bb.sigma_abs, 1e-14)
        t = 900.0
        analytic = 1e-14 * math.pi**2 * KB**4 * t**4 / (15 * HBAR**3 * C0**2)
        assert abs(bb.power(t) - analytic) < 0.005 * analytic

    def test_monotone_in_temperature(self):
        bb = BlackbodySpectrum(bundled_nk("sio2_nk.csv"), 150e-9, n_nodes=600)
        powers = [bb.power(t) for t in (300, 600, 1200, 2400)]
        assert all(a < b for a, b in zip(powers, powers[1:]))

    def test_node_doubling_stable(self):
        nk = bundled_nk("sio2_nk.csv")
        p1 = blackbody_power(nk, 150e-9, 800.0, n_nodes=2000)
        p2 = blackbody_power(nk, 150e-9, 800.0, n_nodes=4000)
        assert abs(p1 - p2) < 1e-3 * p2

    def test_coverage_warning(self, tmp_path):
        p = tmp_path / "narrow.csv"
        p.write_text("1.0,1.5,0.1\n1.1,1.5,0.1\n")
        with pytest.warns(UserWarning):
            blackbody_power(load_nk(p), 100e-9, 800.0, n_nodes=400)


class TestSolveTemperature:
    @pytest.fixture(scope="class")
    def bb_si(self):
        return BlackbodySpectrum(bundled_nk("si_nk.csv"), 200e-9, n_nodes=800)

    def test_no_absorption_ambient_temperature(self, bb_si):
        rep = solve_temperature(0.0, bb_si, "Si")
        assert rep.T_solution == T_AMBIENT
        assert not rep.runaway

    def test_monotone_in_absorbed_power(self, bb_si):
        temps = [solve_temperature(p, bb_si, "Si").T_solution
                 for p in (1e-12, 1e-11, 1e-10)]
        assert all(a < b for a, b in zip(temps, temps[1:]))

    def test_residual_invariant(self, bb_si):
        rep = solve_temperature(1e-11, bb_si, "Si")
        bound = 1e-6 * max(rep.P_abs, bb_si.power(rep.T_solution))
        assert abs(rep.balance_residual) < bound
        assert rep.T_solution >= T_AMBIENT

    def test_runaway_flag(self, bb_si):
        rep = solve_temperature(1.0, bb_si, "Si")
        assert rep.runaway
        assert math.isnan(rep.T_solution)

    def test_melting_flag(self, bb_si):
        # pick an absorbed power that lands above 1680 K but below runaway
        lo, hi = 1e-12, 1e-6
        for _ in range(40):
            mid = math.sqrt(lo * hi)
            rep = solve_temperature(mid, bb_si, "Si")
            if rep.runaway:
                hi = mid
            elif rep.T_solution < 1800:
                lo = mid
            else:
                hi = mid
            if not rep.runaway and 1700 < rep.T_solution < 3000:
                break
        assert rep.melting_exceeded
        assert not rep.runaway

    def test_silica_cooler_in_radial_beam(self):
        from vortexlev.beam import RADIAL
        from vortexlev.dynamics import ForceCalculator, trap_report

        temps = {}
        for family in (GAUSSIAN, RADIAL):
            s = focus(BeamSpec(family, 0.5, WL, 0.8))
            sp = SizeParameter.from_kr(0.5, WL)
            t = mie_coefficients(sp, SILICA.refractive_index)
            rep = trap_report(ForceCalculator(s, t), "SiO2", SILICA.density)
            z = rep.z_eq if rep.z_eq is not None else 0.0
            ap = absorbed_power(s, t, SILICA, (0, 0, z))
            bb = BlackbodySpectrum(bundled_nk("sio2_nk.csv"), sp.radius, n_nodes=600)
            temps[family] = solve_temperature(ap.value, bb, "SiO2").T_solution
        assert temps[RADIAL] < temps[GAUSSIAN]

    def test_resonance_alignment_lightweight(self):
        # silicon temperature peaks at the first magnetic-dipole resonance
        s = focus(BeamSpec(AZIMUTHAL, 0.5, WL, 0.8))
        temps = {}
        for kr in (0.80, 0.866, 0.93):
            sp = SizeParameter.from_kr(kr, WL)
            t = mie_coefficients(sp, SILICON.refractive_index)
            ap = absorbed_power(s, t, SILICON, (0, 0, 0))
            bb = BlackbodySpectrum(bundled_nk("si_nk.csv"), sp.radius, n_nodes=600)
            temps[kr] = solve_temperature(ap.value, bb, "Si").T_solution
        assert temps[0.866] > temps[0.80]
        assert temps[0.866] > temps[0.93]
