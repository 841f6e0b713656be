"""
Named parameter sets used by the examples, the acceptance suite and the CLI.

Values are given as ordinary frequencies and converted with :func:`mhz` /
:func:`ghz`; everything stored is in rad/s or SI units.
"""

import math

from .circuitq import CircuitParams
from .hamiltonians import SystemParams

TWO_PI = 2.0 * math.pi


def khz(f):
    return TWO_PI * 1e3 * f


def mhz(f):
    return TWO_PI * 1e6 * f


def ghz(f):
    return TWO_PI * 1e9 * f


def dispersive_shift(g, omega_q, omega_r, alpha):
    """``chi = g^2 alpha / (2 Delta (Delta + alpha))`` with ``Delta = omega_q - omega_r``."""
    delta = omega_q - omega_r
    return g * g * alpha / (2.0 * delta * (delta + alpha))


_WQ = ghz(4.343)
_WR = ghz(5.439)
_ALPHA = mhz(-188.0)

# Device for stabilizing any point on the Bloch sphere: weak dc coupling, small chi.
STABILIZE_SYSTEM = SystemParams(
    omega_q=_WQ,
    omega_r=_WR,
    chi=dispersive_shift(mhz(12.0), _WQ, _WR, _ALPHA),
    alpha=_ALPHA,
    kappa=mhz(1.6),
    gamma=khz(7.6),
    gamma_phi=khz(3.0),
    n_fock=4,
)
STABILIZE_OMEGA_X = mhz(9.0)
STABILIZE_OMEGA_B = mhz(0.5)

# Generic dressed-frame model for the weak/strong coupling asymptotes.
ASYMPTOTE_SYSTEM = SystemParams(
    omega_q=_WQ, omega_r=_WR, kappa=mhz(1.0), gamma=mhz(0.1), gamma_phi=mhz(0.1), n_fock=5
)

# Interaction-type comparison: fast Rabi drive and equal couplings.
COMPARE_SYSTEM = SystemParams(
    omega_q=_WQ, omega_r=_WR, kappa=mhz(1.0), gamma=mhz(0.1), gamma_phi=mhz(0.1), n_fock=4
)
COMPARE_OMEGA_R = mhz(100.0)
COMPARE_COUPLING = mhz(1.0)

# Blue-sideband spectroscopy with a resolvable chi and a narrow cavity.
SPECTROSCOPY_SYSTEM = SystemParams(
    omega_q=_WQ,
    omega_r=_WR,
    chi=mhz(-2.0),
    alpha=_ALPHA,
    kappa=mhz(0.4),
    gamma=mhz(0.02),
    gamma_phi=mhz(0.01),
    n_fock=4,
)
SPECTROSCOPY_OMEGA_B = mhz(0.6)
SPECTROSCOPY_PROBE_EPS = mhz(0.01)

VACUUM_RABI_G = mhz(40.0)

# Lumped-element devices calibrated to w_q/2pi = 4.343 GHz, w_r/2pi = 5.439 GHz
# at zero flux.  The second one has enough coupling capacitance for g_r to
# change sign between phi_ext = 0.2 and 0.3.
REFERENCE_DEVICE = CircuitParams(
    L_q=16.63393654e-9, L_r=2.08812667e-9, L_g0=0.05e-9, C_q=80e-15, C_r=400e-15, C_g=0.5e-15
)
G_R_CROSSING_DEVICE = CircuitParams(
    L_q=15.89978392e-9, L_r=2.02106306e-9, L_g0=0.1e-9, C_q=80e-15, C_r=400e-15, C_g=4e-15
)
