"""Physical constants and package-wide configuration values (SI units)."""

import scipy.constants as _sc

C0 = _sc.c                      # vacuum speed of light, m/s
EPS0 = _sc.epsilon_0            # vacuum permittivity, F/m
MU0 = _sc.mu_0                  # vacuum permeability, H/m
ETA0 = (_sc.mu_0 / _sc.epsilon_0) ** 0.5   # vacuum impedance, ohm
HBAR = _sc.hbar                 # reduced Planck constant, J s
KB = _sc.k                      # Boltzmann constant, J/K

# All traps are in vacuum; kept as a named constant so a medium could be
# introduced without touching formulas.
MEDIUM_INDEX = 1.0

# Ambient (blackbody) temperature used throughout, K.
T_AMBIENT = 293.0

# Trap depths in output tables are normalized by kB * T_AMBIENT.
KT_REF = KB * T_AMBIENT

# Melting points for the bulk-temperature flag, K.
MELTING_POINTS = {"Si": 1680.0}
