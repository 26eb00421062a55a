import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from vortexlev.errors import DomainError, UnsupportedRangeError
from vortexlev.mie import (
    Material,
    SILICA,
    SILICON,
    SizeParameter,
    default_n_max,
    forward_amplitude,
    locate_resonances,
    mass_of,
    mie_coefficients,
)

WL = 1550e-9


def bhmie_reference(x, m, n_max):
    """Independent classic Mie implementation (upward psi, scalar loop)."""
    mx = m * x
    # downward log-derivative
    nmx = int(max(n_max, abs(mx)) + 16)
    d = np.zeros(nmx + 1, dtype=complex)
    for n in range(nmx, 0, -1):
        d[n - 1] = n / mx - 1.0 / (d[n] + n / mx)
    psi0, psi1 = math.cos(x), math.sin(x)
    chi0, chi1 = -math.sin(x), math.cos(x)
    xi1 = psi1 - 1j * chi1
    qext = qsca = 0.0
    a = np.zeros(n_max + 1, dtype=complex)
    b = np.zeros(n_max + 1, dtype=complex)
    for n in range(1, n_max + 1):
        psi = (2 * n - 1) * psi1 / x - psi0
        chi = (2 * n - 1) * chi1 / x - chi0
        xi = psi - 1j * chi
        ta = d[n] / m + n / x
        tb = d[n] * m + n / x
        a[n] = (ta * psi - psi1) / (ta * xi - xi1)
        b[n] = (tb * psi - psi1) / (tb * xi - xi1)
        qext += (2 * n + 1) * (a[n] + b[n]).real
        qsca += (2 * n + 1) * (abs(a[n]) ** 2 + abs(b[n]) ** 2)
        psi0, psi1, chi0, chi1 = psi1, psi, chi1, chi
        xi1 = psi1 - 1j * chi1
    return a, b, 2 / x**2 * qsca, 2 / x**2 * qext


class TestMieCoefficients:
    def test_dipole_limit(self):
        x = SizeParameter.from_kr(0.01, WL)
        t = mie_coefficients(x, 1.5)
        a1 = -2j / 3 * 0.01**3 * (1.5**2 - 1) / (1.5**2 + 2)
        assert_allclose(t.a[1], a1, rtol=1e-5)

    def test_index_matched_is_transparent(self):
        t = mie_coefficients(SizeParameter.from_kr(1.0, WL), 1.0)
        assert np.max(np.abs(t.a)) < 1e-15
        assert np.max(np.abs(t.b)) < 1e-15
        assert abs(t.Q_ext) < 1e-14

    def test_silicon_energy_identity(self):
        t = mie_coefficients(SizeParameter.from_kr(0.9, WL), SILICON.refractive_index)
        assert abs(t.Q_ext - (t.Q_sca + t.Q_abs)) <= 1e-10 * t.Q_ext
        assert t.Q_abs > 0

    def test_lossless_unitarity_circle(self):
        for kr in (0.3, 0.9, 1.56, 5.0):
            t = mie_coefficients(SizeParameter.from_kr(kr, WL), 3.48)
            circ = np.abs(t.a[1:] - 0.5) ** 2 + np.abs(t.b[1:] - 0.5) ** 2
            assert np.max(np.abs(circ - 0.5)) < 1e-10
            assert abs(t.Q_abs) < 1e-10 * max(t.Q_ext, 1.0)

    def test_against_independent_bhmie(self):
        rng = np.random.default_rng(3)
        for _ in range(20):
            x = rng.uniform(0.1, 20.0)
            m = rng.uniform(1.05, 3.9) + 1j * rng.uniform(0.0, 0.1)
            n_max = default_n_max(x)
            t = mie_coefficients(SizeParameter.from_kr(x, WL), m, n_max=n_max)
            a, b, qsca, qext = bhmie_reference(x, m, n_max)
            # the upward-recurrence reference loses accuracy on deep-tail
            # coefficients, hence the floor relative to the leading scale
            floor_a = 1e-10 * np.max(np.abs(a))
            floor_b = 1e-10 * np.max(np.abs(b))
            assert_allclose(t.a[1:], a[1:], rtol=1e-7, atol=floor_a)
            assert_allclose(t.b[1:], b[1:], rtol=1e-7, atol=floor_b)
            assert_allclose(t.Q_sca, qsca, rtol=1e-7)
            assert_allclose(t.Q_ext, qext, rtol=1e-7)

    def test_optical_theorem(self):
        rng = np.random.default_rng(11)
        for _ in range(50):
            x = rng.uniform(0.05, 20.0)
            m = rng.uniform(1.05, 3.9) + 1j * rng.uniform(0.0, 0.1)
            t = mie_coefficients(SizeParameter.from_kr(x, WL), m)
            q_fwd = 4.0 / x**2 * forward_amplitude(t).real
            assert_allclose(q_fwd, t.Q_ext, rtol=1e-8)

    def test_n_max_sufficiency(self):
        for x, m in ((2.2, 3.48), (10.0, 1.46 + 5e-9j)):
            sp = SizeParameter.from_kr(x, WL)
            q1 = mie_coefficients(sp, m).Q_sca
            q2 = mie_coefficients(sp, m, n_max=default_n_max(x) + 5).Q_sca
            assert abs(q2 - q1) < 1e-10 * q1

    def test_sigma_is_q_times_area(self):
        t = mie_coefficients(SizeParameter.from_kr(0.5, WL), 1.46)
        assert_allclose(t.sigma_sca, t.Q_sca * math.pi * t.x.radius**2, rtol=1e-14)

    def test_unsupported_range(self):
        with pytest.raises(UnsupportedRangeError):
            mie_coefficients(SizeParameter.from_kr(201.0, WL), 1.5)


class TestResonances:
    def test_magnetic_dipole_below_electric_dipole(self):
        res = locate_resonances(3.48, (0.5, 1.4))
        tm1 = min(e.kR_peak for e in res.for_family("paper-TM") if e.multipole_order == 1)
        te1 = min(e.kR_peak for e in res.for_family("paper-TE") if e.multipole_order == 1)
        assert tm1 < te1
        # dense-scan oracle for the two first-order peaks
        kr = np.arange(0.5, 1.4, 5e-4)
        b1 = [abs(mie_coefficients(SizeParameter.from_kr(k, WL), 3.48, n_max=8).b[1]) ** 2
              for k in kr]
        a1 = [abs(mie_coefficients(SizeParameter.from_kr(k, WL), 3.48, n_max=8).a[1]) ** 2
              for k in kr]
        assert abs(tm1 - kr[int(np.argmax(b1))]) < 1e-3
        assert abs(te1 - kr[int(np.argmax(a1))]) < 1e-3

    def test_first_tm_mode_near_paper_anchor(self):
        # the counterpropagating-trap discussion places the first paper-TM
        # mode near kR = 0.9 for silicon
        res = locate_resonances(SILICON.refractive_index, (0.5, 1.1))
        tm1 = min(e.kR_peak for e in res.for_family("paper-TM"))
        assert abs(tm1 - 0.9) < 0.05

    def test_index_matched_has_no_resonances(self):
        res = locate_resonances(1.0, (0.5, 1.5))
        assert res.entries == []

    def test_sorted_by_peak(self):
        res = locate_resonances(3.48, (0.5, 2.2))
        peaks = [e.kR_peak for e in res.entries]
        assert peaks == sorted(peaks)

    def test_empty_range_rejected(self):
        with pytest.raises(DomainError):
            locate_resonances(3.48, (1.0, 1.0))
        with pytest.raises(DomainError):
            locate_resonances(3.48, (0.5, 1.0), grid_step=0.01)


class TestMass:
    def test_worked_example(self):
        assert_allclose(mass_of(74e-9, 2200.0), 3.734e-18, rtol=1e-3)

    def test_zero_radius_rejected(self):
        with pytest.raises(DomainError):
            mass_of(0.0, 2200.0)

    def test_cubic_scaling(self):
        assert_allclose(mass_of(2e-7, 1850.0), 8 * mass_of(1e-7, 1850.0), rtol=1e-14)


class TestTypes:
    def test_size_parameter_consistency(self):
        sp = SizeParameter.from_radius(100e-9, WL)
        assert_allclose(sp.value, 2 * math.pi * 100e-9 / WL, rtol=1e-14)
        with pytest.raises(DomainError):
            SizeParameter(1.0, 100e-9, WL)  # inconsistent triple

    def test_material_validation(self):
        with pytest.raises(DomainError):
            Material("bad", 1.5 - 0.1j, 1000.0)
        with pytest.raises(DomainError):
            Material("bad", 1.5, -1.0)
        assert SILICA.density == 1850.0
