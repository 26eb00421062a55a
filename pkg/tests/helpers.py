"""Shared oracle helpers for the test suite (kept independent of package internals)."""

import math

import numpy as np

from vortexlev.specfun import legendre_pi_tau
from vortexlev.vswf import VswfCoefficients, mode_indices


def plane_wave_coefficients(n_max: int, wavenumber: float) -> VswfCoefficients:
    """Regular VSWF coefficients of a unit-amplitude x-polarized plane wave e^{ikz}.

    Built from the delta-spectrum overlap g = 4 pi i^n (x_hat . pattern*(z_hat)),
    evaluating the patterns just off the pole for numerical stability.
    """
    th0 = 1e-6
    ct0 = np.array([math.cos(th0)])
    n_idx, m_idx = mode_indices(n_max)
    g_e = np.zeros(n_idx.size, complex)
    g_m = np.zeros(n_idx.size, complex)
    pi_r, tau_r = legendre_pi_tau(n_max, 1, ct0)
    for n in range(1, n_max + 1):
        for mm in (1, -1):
            tau = tau_r[n][0] * (1 if mm == 1 else -1)
            pi = pi_r[n][0]
            norm = 1 / math.sqrt(n * (n + 1))
            bx = norm * tau          # B_nm . x_hat at the pole (phi = 0)
            cx = norm * 1j * pi      # C_nm . x_hat
            i = int(np.flatnonzero((n_idx == n) & (m_idx == mm))[0])
            g_m[i] = 4 * np.pi * (1j ** n) * np.conj(cx)
            g_e[i] = 4 * np.pi * (1j ** (n - 1)) * np.conj(bx)
    return VswfCoefficients(np.zeros(3), n_max, wavenumber, g_e, g_m)


def dipole_polarizability(radius: float, m_rel: complex, wavenumber: float) -> complex:
    """Radiation-corrected Clausius-Mossotti polarizability (SI, C m^2/V)."""
    from vortexlev.constants import EPS0

    a0 = 4 * math.pi * EPS0 * radius**3 * (m_rel**2 - 1) / (m_rel**2 + 2)
    return a0 / (1 - 1j * wavenumber**3 * a0 / (6 * math.pi * EPS0))


def dipole_force(spectrum, alpha: complex, points: np.ndarray) -> np.ndarray:
    """Analytic point-dipole force F_i = (1/2) Re[alpha sum_j E_j d_i E_j*]."""
    from vortexlev.beam import focal_field_gradient, focal_fields

    pts = np.atleast_2d(points)
    e, _ = focal_fields(spectrum, pts)
    grad = focal_field_gradient(spectrum, pts)     # (P, i, j) = d_i E_j
    return 0.5 * np.real(alpha * np.einsum("pj,pij->pi", e, np.conj(grad)))
