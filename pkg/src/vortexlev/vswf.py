"""Vector spherical wavefunction (VSWF) expansion machinery.

A focused beam given as an angular spectrum A(k_hat) on the aperture cone is
expanded into regular VSWFs about an arbitrary origin by far-field overlap:

    g_m[n,m] = 4 pi i^n     integral A . C*_nm dOmega
    g_e[n,m] = 4 pi i^(n-1) integral A . B*_nm dOmega

where A carries the displacement phase exp(i k k_hat . origin) and B_nm /
C_nm are the orthonormal electric / magnetic vector spherical harmonics

    B_nm = (tau_nm theta_hat + i pi_nm phi_hat) e^{im phi} / sqrt(n(n+1))
    C_nm = (i pi_nm theta_hat - tau_nm phi_hat) e^{im phi} / sqrt(n(n+1)).

The sphere response is diagonal, p = a_n g_e and q = b_n g_m (Mie
coefficients in the Bohren-Huffman convention). With that contract the total
outgoing far-field amplitude is sum (g/2 - p) x pattern, so the scattered
far field carries an explicit minus sign:

    F_sca(k_hat) = - sum_nm [ p_nm (-i)^n B_nm + q_nm (-i)^{n+1} C_nm ]

and the physical scattered field is E_sca = F_sca e^{ikr}/(kr).

Modes are flattened n = 1..n_max, m = -n..n (n-major), M = n_max(n_max+2)
entries. Everything is batched over particle positions where it matters.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .beam import AngularSpectrum
from .constants import ETA0
from .errors import ConvergenceError, DomainError
from .mie import MieTable
from .specfun import SphereQuadrature, legendre_pi_tau, riccati_bessel

BSC_TAIL_TOLERANCE = 1e-8


def mode_indices(n_max: int) -> tuple[np.ndarray, np.ndarray]:
    """Flattened (n, m) index arrays for n = 1..n_max, m = -n..n."""
    ns, ms = [], []
    for n in range(1, n_max + 1):
        for m in range(-n, n + 1):
            ns.append(n)
            ms.append(m)
    return np.array(ns), np.array(ms)


def vsh_patterns(n_max: int, grid: SphereQuadrature) -> tuple[np.ndarray, np.ndarray]:
    """(B, C) tangential patterns on the grid, each (M, n_nodes, 2).

    Component 0 is theta_hat, component 1 is phi_hat. Exploits the
    theta x phi product structure of the grid.
    """
    n_the = grid.order_theta
    n_phi = grid.order_phi
    theta_1d = grid.theta[::n_phi]
    phi_1d = grid.phi[:n_phi]
    x = np.cos(theta_1d)

    n_idx, m_idx = mode_indices(n_max)
    n_modes = n_idx.size
    b = np.zeros((n_modes, n_the * n_phi, 2), dtype=complex)
    c = np.zeros_like(b)

    # position of mode (n, m) in the flattened layout
    def slot(n, m):
        return (n - 1) * (n + 1) + n + m

    expmphi = {m: np.exp(1j * m * phi_1d) for m in range(-n_max, n_max + 1)}
    for m_abs in range(0, n_max + 1):
        pi_r, tau_r = legendre_pi_tau(n_max, m_abs, x)
        for n in range(max(m_abs, 1), n_max + 1):
            norm = 1.0 / math.sqrt(n * (n + 1))
            for sign in ((1,) if m_abs == 0 else (1, -1)):
                m = sign * m_abs
                # Pbar_n^{-m} = (-1)^m Pbar_n^m: tau keeps the parity factor,
                # pi flips an extra sign through its explicit m factor
                par = 1.0 if sign == 1 else (-1.0) ** m_abs
                tau = par * tau_r[n]
                pi = (par if sign == 1 else -par) * pi_r[n]
                ph = expmphi[m]
                bt = norm * np.outer(tau, ph)
                bp = 1j * norm * np.outer(pi, ph)
                i = slot(n, m)
                b[i, :, 0] = bt.ravel()
                b[i, :, 1] = bp.ravel()
                c[i, :, 0] = 1j * norm * np.outer(pi, ph).ravel()
                c[i, :, 1] = -norm * np.outer(tau, ph).ravel()
    return b, c


@dataclass(frozen=True)
class VswfCoefficients:
    """Incident (g) and scattered (p, q) multipole amplitudes about one origin."""

    origin: np.ndarray
    n_max: int
    wavenumber: float
    g_e: np.ndarray
    g_m: np.ndarray
    p: np.ndarray | None = None
    q: np.ndarray | None = None

    @property
    def n_modes(self) -> int:
        return self.g_e.size


def incident_power(coeffs: VswfCoefficients) -> float:
    """Beam power funneling through a large sphere, from coefficients."""
    k = coeffs.wavenumber
    total = np.sum(np.abs(coeffs.g_e) ** 2 + np.abs(coeffs.g_m) ** 2)
    return float(total) / (8 * ETA0 * k**2)


def scattered_power(coeffs: VswfCoefficients) -> float:
    k = coeffs.wavenumber
    total = np.sum(np.abs(coeffs.p) ** 2 + np.abs(coeffs.q) ** 2)
    return float(total) / (2 * ETA0 * k**2)


def extinction_power(coeffs: VswfCoefficients) -> float:
    k = coeffs.wavenumber
    total = np.sum((np.conj(coeffs.g_e) * coeffs.p
                    + np.conj(coeffs.g_m) * coeffs.q).real)
    return float(total) / (2 * ETA0 * k**2)


class BeamProjector:
    """Precomputed cone-overlap projector: coefficients for many origins fast.

    Contracting the conjugated VSH patterns, quadrature weights and the beam
    spectrum once leaves g(origin) = (projector) @ exp(i k k_hat . origin),
    a single matrix-vector product per origin.
    """

    def __init__(self, spectrum: AngularSpectrum, n_max: int):
        if n_max < 1:
            raise DomainError("n_max must be >= 1")
        self.spectrum = spectrum
        self.n_max = n_max
        self.k = spectrum.wavenumber
        self.n_idx, self.m_idx = mode_indices(n_max)

        grid = spectrum.grid
        b, c = vsh_patterns(n_max, grid)
        _, th_hat, ph_hat = grid.unit_vectors()
        a_th = np.sum(spectrum.e_far * th_hat, axis=1)
        a_ph = np.sum(spectrum.e_far * ph_hat, axis=1)
        w = grid.weight
        # overlap rows: integrand (A . conj(pattern)) * weight per node
        over_b = (np.conj(b[:, :, 0]) * a_th + np.conj(b[:, :, 1]) * a_ph) * w
        over_c = (np.conj(c[:, :, 0]) * a_th + np.conj(c[:, :, 1]) * a_ph) * w
        phase_e = 4 * np.pi * 1j ** (self.n_idx - 1)
        phase_m = 4 * np.pi * 1j ** (self.n_idx)
        self._proj_e = phase_e[:, None] * over_b
        self._proj_m = phase_m[:, None] * over_c
        self._k_hat = grid.unit_vectors()[0]

    def coefficient_arrays(self, origins: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """(g_e, g_m) of shape (M, P) for origins of shape (P, 3)."""
        origins = np.atleast_2d(np.asarray(origins, dtype=float))
        phases = np.exp(1j * self.k * (self._k_hat @ origins.T))
        return self._proj_e @ phases, self._proj_m @ phases

    def coefficients(self, origin, check: bool = True) -> VswfCoefficients:
        origin = np.asarray(origin, dtype=float).reshape(3)
        g_e, g_m = self.coefficient_arrays(origin[None, :])
        coeffs = VswfCoefficients(origin, self.n_max, self.k, g_e[:, 0], g_m[:, 0])
        if check:
            _check_tail(coeffs)
        return coeffs


def _check_tail(coeffs: VswfCoefficients) -> None:
    n_idx, _ = mode_indices(coeffs.n_max)
    power = np.abs(coeffs.g_e) ** 2 + np.abs(coeffs.g_m) ** 2
    total = power.sum()
    if total == 0:
        return
    tail = power[n_idx >= coeffs.n_max - 1].sum()
    if tail > BSC_TAIL_TOLERANCE * total:
        raise ConvergenceError(
            f"beam-shape expansion not converged at n_max={coeffs.n_max}: "
            f"tail fraction {tail / total:.2e}"
        )


def beam_shape_coefficients(
    spectrum: AngularSpectrum,
    origin,
    n_max: int,
    check: bool = True,
) -> VswfCoefficients:
    """Expand the focused beam into regular VSWFs about `origin`.

    Raises ConvergenceError when the top two multipole shells still hold
    more than 1e-8 of the expansion power (insufficient n_max), unless
    check=False (used internally where only low orders matter).
    """
    return BeamProjector(spectrum, n_max).coefficients(origin, check=check)


def scatter(incident: VswfCoefficients, mie: MieTable) -> VswfCoefficients:
    """Apply the sphere's diagonal Mie response: p = a_n g_e, q = b_n g_m."""
    if mie.n_max < incident.n_max:
        raise DomainError("Mie table order below expansion order")
    n_idx, _ = mode_indices(incident.n_max)
    a_n = mie.a[n_idx]
    b_n = mie.b[n_idx]
    return VswfCoefficients(
        incident.origin, incident.n_max, incident.wavenumber,
        incident.g_e, incident.g_m,
        p=a_n * incident.g_e, q=b_n * incident.g_m,
    )


@dataclass(frozen=True)
class FarScatteringAmplitude:
    """Scattered far-field amplitude on a full-sphere grid (radial part zero)."""

    grid: SphereQuadrature
    e_theta: np.ndarray
    e_phi: np.ndarray

    def integrated_power(self, wavenumber: float) -> float:
        dens = np.abs(self.e_theta) ** 2 + np.abs(self.e_phi) ** 2
        return float(self.grid.integrate(dens).real) / (2 * ETA0 * wavenumber**2)


class FarFieldEvaluator:
    """Far-field pattern sums on a fixed grid, batched over coefficient sets."""

    def __init__(self, n_max: int, grid: SphereQuadrature):
        if grid.order_theta < 2 * n_max + 2:
            raise DomainError("far grid under-resolved: need order_theta >= 2 n_max + 2")
        self.n_max = n_max
        self.grid = grid
        self.n_idx, self.m_idx = mode_indices(n_max)
        b, c = vsh_patterns(n_max, grid)
        # stored as (nodes, modes) for column-batched matmuls
        self._b_th = np.ascontiguousarray(b[:, :, 0].T)
        self._b_ph = np.ascontiguousarray(b[:, :, 1].T)
        self._c_th = np.ascontiguousarray(c[:, :, 0].T)
        self._c_ph = np.ascontiguousarray(c[:, :, 1].T)
        self._ph_e = (-1j) ** self.n_idx          # electric-mode radiation phase
        self._ph_m = (-1j) ** (self.n_idx + 1)    # magnetic-mode radiation phase

    def scattered(self, p: np.ndarray, q: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """F_sca (theta, phi components), batched: p, q of shape (M,) or (M, P)."""
        ce = -(self._ph_e * p.T).T
        cm = -(self._ph_m * q.T).T
        f_th = self._b_th @ ce + self._c_th @ cm
        f_ph = self._b_ph @ ce + self._c_ph @ cm
        return f_th, f_ph

    def incident_outgoing(self, g_e: np.ndarray, g_m: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Outgoing part of the incident field, per-mode coefficient g/2."""
        ce = (self._ph_e * (0.5 * g_e).T).T
        cm = (self._ph_m * (0.5 * g_m).T).T
        return (self._b_th @ ce + self._c_th @ cm,
                self._b_ph @ ce + self._c_ph @ cm)

    def incident_incoming(self, g_e: np.ndarray, g_m: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        ce = (np.conj(self._ph_e) * (0.5 * g_e).T).T
        cm = (np.conj(self._ph_m) * (0.5 * g_m).T).T
        return (self._b_th @ ce + self._c_th @ cm,
                self._b_ph @ ce + self._c_ph @ cm)


def far_field(scattered_coeffs: VswfCoefficients, grid: SphereQuadrature) -> FarScatteringAmplitude:
    """Far-field scattering amplitude of the scattered coefficients on `grid`."""
    if scattered_coeffs.p is None or scattered_coeffs.q is None:
        raise DomainError("coefficients carry no scattered part; call scatter() first")
    ev = FarFieldEvaluator(scattered_coeffs.n_max, grid)
    f_th, f_ph = ev.scattered(scattered_coeffs.p, scattered_coeffs.q)
    return FarScatteringAmplitude(grid, f_th, f_ph)


def reconstruct_incident(coeffs: VswfCoefficients, points: np.ndarray) -> np.ndarray:
    """Incident E field at lab-frame points from the regular expansion.

    E(r) = sum g_m j_n(rho) C_nm + g_e [ sqrt(n(n+1)) (j_n/rho) Ybar r_hat
                                         + (psi'_n/rho) B_nm ],
    rho = k |r - origin|. Points must not coincide with the origin.
    """
    pts = np.atleast_2d(np.asarray(points, dtype=float)) - coeffs.origin
    k = coeffs.wavenumber
    r = np.linalg.norm(pts, axis=1)
    if np.any(r == 0):
        raise DomainError("reconstruction point coincides with expansion origin")
    theta = np.arccos(np.clip(pts[:, 2] / r, -1, 1))
    phi = np.arctan2(pts[:, 1], pts[:, 0])
    rho = k * r

    n_max = coeffs.n_max
    out = np.zeros((pts.shape[0], 3), dtype=complex)
    st, ct = np.sin(theta), np.cos(theta)
    sp, cp = np.sin(phi), np.cos(phi)
    r_hat = np.stack([st * cp, st * sp, ct], axis=1)
    th_hat = np.stack([ct * cp, ct * sp, -st], axis=1)
    ph_hat = np.stack([-sp, cp, np.zeros_like(sp)], axis=1)

    rows = [riccati_bessel(n_max, complex(x)) for x in rho]
    jn = np.array([row.psi.real / x for row, x in zip(rows, rho)])      # j_n(rho)
    dpsi = np.array([row.psi_prime.real for row, x in zip(rows, rho)])  # psi'_n

    x = np.cos(theta)

    def slot(n, m):
        return (n - 1) * (n + 1) + n + m

    for m_abs in range(0, n_max + 1):
        pi_r, tau_r = legendre_pi_tau(n_max, m_abs, x)
        # Pbar reconstructed from pi (m>0) or by recurrence value tau-free (m=0)
        if m_abs > 0:
            pbar = pi_r * st / m_abs
        else:
            pbar = _pbar_m0(n_max, x)
        for n in range(max(m_abs, 1), n_max + 1):
            norm = 1.0 / math.sqrt(n * (n + 1))
            for sign in ((1,) if m_abs == 0 else (1, -1)):
                m = sign * m_abs
                par = 1.0 if sign == 1 else (-1.0) ** m_abs
                tau = par * tau_r[n]
                pi = (par if sign == 1 else -par) * pi_r[n]
                pb = par * pbar[n]
                ph = np.exp(1j * m * phi)
                i = slot(n, m)
                b_vec = norm * (tau[:, None] * th_hat + 1j * pi[:, None] * ph_hat) * ph[:, None]
                c_vec = norm * (1j * pi[:, None] * th_hat - tau[:, None] * ph_hat) * ph[:, None]
                rad = math.sqrt(n * (n + 1)) * (jn[:, n] / rho) * pb * ph
                out += coeffs.g_m[i] * jn[:, n, None] * c_vec
                out += coeffs.g_e[i] * ((dpsi[:, n] / rho)[:, None] * b_vec
                                        + rad[:, None] * r_hat)
    return out


def _pbar_m0(n_max: int, x: np.ndarray) -> np.ndarray:
    """Orthonormal Legendre Pbar_n^0(x), rows 0..n_max."""
    p = np.zeros((n_max + 1, x.size))
    p[0] = 1.0 / math.sqrt(4 * math.pi)
    if n_max >= 1:
        p[1] = math.sqrt(3.0) * x * p[0]
    for n in range(2, n_max + 1):
        a = math.sqrt((4.0 * n * n - 1.0) / (n * n))
        b = math.sqrt(((n - 1.0) ** 2) / (4.0 * (n - 1.0) ** 2 - 1.0))
        p[n] = a * (x * p[n - 1] - b * p[n - 2])
    return p
