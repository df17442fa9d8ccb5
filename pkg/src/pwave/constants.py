"""Physical constants and unit conversions.

Internal unit system: energies are temperatures in microkelvin (k_B divided
out), magnetic fields in gauss, time in seconds, lengths in centimeters,
angular frequencies in rad/s.  Conversions to SI happen only where a formula
genuinely needs them (densities, Fermi energy).

Values are CODATA 2018 recommended values; k_B is exact by SI definition.
"""

import math

# J s, reduced Planck constant (exact since 2019 SI)
HBAR = 1.054571817e-34

# J/K, Boltzmann constant (exact)
K_B = 1.380649e-23

# kg, unified atomic mass unit
ATOMIC_MASS_KG = 1.66053906660e-27

# 6Li atomic mass in u (AME2020)
LI6_MASS_AMU = 6.0151228874

# kg, default atomic mass used throughout
LI6_MASS_KG = LI6_MASS_AMU * ATOMIC_MASS_KG

# conversion helpers
UK_TO_K = 1e-6
M3_DENSITY_TO_CM3 = 1e-6  # n [m^-3] -> n [cm^-3]

TWO_PI = 2.0 * math.pi


def uk_to_joule(t_uk: float) -> float:
    """Energy of temperature `t_uk` (microkelvin) in joules."""
    return K_B * t_uk * UK_TO_K
