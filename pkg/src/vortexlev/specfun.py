"""Spherical special functions and quadrature grids.

Riccati-Bessel rows (psi, xi and derivatives), the classic m=1 angular
functions pi_n/tau_n, fully normalized associated-Legendre angular functions
for arbitrary order, and Gauss-Legendre x uniform-phi quadratures on the
sphere or on a polar cone. Everything is plain numpy, vectorized where it
pays off, and pure (no module state).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import roots_legendre

from .errors import DomainError

_RESCALE_LIMIT = 1e250


@dataclass(frozen=True)
class RiccatiBesselRow:
    """psi_n, xi_n and derivatives for n = 0..order_max at one argument."""

    order_max: int
    argument: complex
    psi: np.ndarray
    psi_prime: np.ndarray
    xi: np.ndarray
    xi_prime: np.ndarray

    def wronskian(self) -> np.ndarray:
        """psi_n xi'_n - psi'_n xi_n; equals -1j identically for real arguments."""
        return self.psi * self.xi_prime - self.psi_prime * self.xi


def _lentz_psi_ratio(n: int, z: complex, tol: float = 1e-16, max_iter: int = 10000) -> complex:
    """Continued fraction for psi_n(z)/psi_{n-1}(z) by the modified Lentz method.

    From the downward recurrence 1/r_n = (2n+1)/z - r_{n+1} with
    r_n = psi_n/psi_{n-1}.
    """
    tiny = 1e-280
    f = tiny
    c = f
    d = 0.0 + 0.0j
    k = 0
    while k < max_iter:
        # CF in canonical form: r_n = 1/(b0 + a1/(b1 + a2/(b2 + ...)))
        # with b_j = (2(n+j)+1)/z and a_j = -1.
        b = (2 * (n + k) + 1) / z
        a = 1.0 if k == 0 else -1.0
        d = b + a * d
        if d == 0:
            d = tiny
        c = b + a / c
        if c == 0:
            c = tiny
        d = 1.0 / d
        delta = c * d
        f = f * delta
        k += 1
        if abs(delta - 1.0) < tol:
            break
    return f


def riccati_bessel(order_max: int, argument: complex) -> RiccatiBesselRow:
    """Riccati-Bessel psi_n = z j_n(z) and xi_n = z h^(1)_n(z) with derivatives.

    psi is generated by downward recurrence seeded from a continued-fraction
    ratio at N_start = order_max + max(15, ceil(4 sqrt(|z|))) and normalized
    against psi_0 = sin z; xi runs upward from xi_0 = -i e^{iz}. Valid for
    complex arguments (no overflow up to |z| ~ 50, order_max ~ 80).

    Raises DomainError for zero or non-finite argument or order_max < 1.
    """
    if order_max < 1:
        raise DomainError("order_max must be >= 1")
    z = complex(argument)
    if z == 0:
        raise DomainError("argument must be nonzero")
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise DomainError("argument must be finite")

    n_start = order_max + max(15, math.ceil(4.0 * math.sqrt(abs(z))))

    # Downward pass: unnormalized psi~ plus the logarithmic derivative
    # D_n = psi'_n/psi_n, carried exactly through the descent.
    psi_u = np.zeros(n_start + 1, dtype=complex)
    ratio = _lentz_psi_ratio(n_start, z)     # psi_N / psi_{N-1}
    d_n = -n_start / z + 1.0 / ratio          # D_N from psi_{N-1}/psi_N
    d = np.zeros(order_max + 1, dtype=complex)
    psi_u[n_start] = 1.0
    for n in range(n_start, 0, -1):
        psi_u[n - 1] = psi_u[n] * (d_n + n / z)
        d_n = n / z - 1.0 / (n / z + d_n)
        if n - 1 <= order_max:
            d[n - 1] = d_n
        if abs(psi_u[n - 1]) > _RESCALE_LIMIT:
            psi_u[n - 1:] /= _RESCALE_LIMIT

    scale = np.sin(z) / psi_u[0]
    psi = psi_u[: order_max + 1] * scale
    psi_prime = d * psi
    psi_prime[0] = np.cos(z)

    # Upward pass for xi (dominant solution grows with n: stable upward).
    xi = np.zeros(order_max + 1, dtype=complex)
    xi_prime = np.zeros(order_max + 1, dtype=complex)
    xi[0] = -1j * np.exp(1j * z)
    xi[1] = xi[0] * (1.0 / z - 1j)
    for n in range(1, order_max):
        xi[n + 1] = (2 * n + 1) / z * xi[n] - xi[n - 1]
    xi_prime[0] = np.exp(1j * z)
    ns = np.arange(1, order_max + 1)
    xi_prime[1:] = xi[:-1] - ns / z * xi[1:]

    return RiccatiBesselRow(order_max, z, psi, psi_prime, xi, xi_prime)


@dataclass(frozen=True)
class AngularFunctionRow:
    """pi_n(cos theta), tau_n(cos theta) for n = 1..order_max (index 0 unused)."""

    order_max: int
    cos_theta: float
    pi_n: np.ndarray
    tau_n: np.ndarray


def angular_functions(order_max: int, cos_theta: float) -> AngularFunctionRow:
    """Mie angular functions pi_n = P_n^1/sin(theta), tau_n = dP_n^1/dtheta.

    Standard upward recurrence; exact at the poles (pi_n = tau_n = n(n+1)/2
    at cos theta = 1). Raises DomainError for |cos_theta| > 1.
    """
    if order_max < 1:
        raise DomainError("order_max must be >= 1")
    mu = float(cos_theta)
    if abs(mu) > 1.0:
        raise DomainError("|cos_theta| must be <= 1")

    pi_n = np.zeros(order_max + 1)
    tau_n = np.zeros(order_max + 1)
    pi_n[1] = 1.0
    tau_n[1] = mu
    if order_max >= 2:
        pi_n[2] = 3.0 * mu
        tau_n[2] = 2.0 * mu * pi_n[2] - 3.0
    for n in range(3, order_max + 1):
        pi_n[n] = ((2 * n - 1) * mu * pi_n[n - 1] - n * pi_n[n - 2]) / (n - 1)
        tau_n[n] = n * mu * pi_n[n] - (n + 1) * pi_n[n - 1]
    return AngularFunctionRow(order_max, mu, pi_n, tau_n)


@dataclass(frozen=True)
class SphereQuadrature:
    """Product quadrature on (a patch of) the unit sphere.

    Gauss-Legendre nodes in cos(theta) over cos_range, uniform nodes in phi.
    Node arrays are flattened (theta outer, phi inner); weights are in
    steradians and sum to 2 pi (cos_range[1] - cos_range[0]).
    """

    order_theta: int
    order_phi: int
    cos_range: tuple[float, float]
    theta: np.ndarray
    phi: np.ndarray
    weight: np.ndarray

    @property
    def n_nodes(self) -> int:
        return self.theta.size

    def unit_vectors(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """(r_hat, theta_hat, phi_hat) at every node, each of shape (N, 3)."""
        st, ct = np.sin(self.theta), np.cos(self.theta)
        sp, cp = np.sin(self.phi), np.cos(self.phi)
        r_hat = np.stack([st * cp, st * sp, ct], axis=1)
        th_hat = np.stack([ct * cp, ct * sp, -st], axis=1)
        ph_hat = np.stack([-sp, cp, np.zeros_like(sp)], axis=1)
        return r_hat, th_hat, ph_hat

    def integrate(self, values: np.ndarray) -> complex:
        """Weighted sum over nodes; `values` may have extra leading axes."""
        return np.tensordot(values, self.weight, axes=([-1], [0]))


def sphere_quadrature(
    order_theta: int,
    order_phi: int,
    cos_range: tuple[float, float] = (-1.0, 1.0),
) -> SphereQuadrature:
    """Gauss-Legendre x uniform-phi quadrature over theta in [acos b, acos a].

    order_theta >= 2 Gauss nodes in cos(theta), order_phi >= 4 equispaced
    phi nodes with weight 2 pi / order_phi. Exact for spherical-harmonic
    products up to the Gauss degree (2 order_theta - 1 in cos theta,
    |m| < order_phi in phi).
    """
    if order_theta < 2:
        raise DomainError("order_theta must be >= 2")
    if order_phi < 4:
        raise DomainError("order_phi must be >= 4")
    a, b = cos_range
    if not -1.0 <= a < b <= 1.0:
        raise DomainError("cos_range must satisfy -1 <= a < b <= 1")

    x, w = roots_legendre(order_theta)
    ct = 0.5 * (b - a) * x + 0.5 * (a + b)
    w_ct = 0.5 * (b - a) * w
    theta_1d = np.arccos(ct)
    phi_1d = 2.0 * np.pi * np.arange(order_phi) / order_phi
    w_phi = 2.0 * np.pi / order_phi

    theta = np.repeat(theta_1d, order_phi)
    phi = np.tile(phi_1d, order_theta)
    weight = np.repeat(w_ct * w_phi, order_phi)
    return SphereQuadrature(order_theta, order_phi, (a, b), theta, phi, weight)


def legendre_pi_tau(n_max: int, m: int, cos_theta: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Normalized angular functions for one azimuthal order m >= 0.

    Returns (pi, tau) of shape (n_max + 1, len(cos_theta)) where
    pi[n] = m * Pbar_n^m / sin(theta) and tau[n] = d Pbar_n^m / d theta,
    Pbar being the orthonormal (4pi-normalized, Condon-Shortley) associated
    Legendre function. Rows n < max(m, 1) are zero. Interior nodes only
    (|cos_theta| < 1): the pi functions divide by sin(theta).
    """
    if m < 0:
        raise DomainError("m must be >= 0")
    x = np.asarray(cos_theta, dtype=float)
    s = np.sqrt(np.maximum(1.0 - x * x, 0.0))
    if np.any(s == 0.0):
        raise DomainError("pi/tau need interior nodes (|cos_theta| < 1)")

    p = np.zeros((n_max + 1, x.size))
    # Diagonal start Pbar_m^m, then one-step and general upward recurrences.
    pmm = np.full(x.size, 1.0 / math.sqrt(4.0 * math.pi))
    for k in range(1, m + 1):
        pmm = -math.sqrt((2 * k + 1) / (2.0 * k)) * s * pmm
    if m <= n_max:
        p[m] = pmm
    if m + 1 <= n_max:
        p[m + 1] = math.sqrt(2 * m + 3.0) * x * pmm
    for n in range(m + 2, n_max + 1):
        a = math.sqrt((4.0 * n * n - 1.0) / (n * n - m * m))
        b = math.sqrt(((n - 1.0) ** 2 - m * m) / (4.0 * (n - 1.0) ** 2 - 1.0))
        p[n] = a * (x * p[n - 1] - b * p[n - 2])

    pi = np.zeros_like(p)
    tau = np.zeros_like(p)
    with np.errstate(divide="ignore", invalid="ignore"):
        for n in range(max(m, 1), n_max + 1):
            if m > 0:
                pi[n] = m * p[n] / s
            c = math.sqrt((2.0 * n + 1.0) / (2.0 * n - 1.0) * (n * n - m * m))
            prev = p[n - 1] if n - 1 >= m else 0.0
            tau[n] = (n * x * p[n] - c * prev) / s
    return pi, tau
