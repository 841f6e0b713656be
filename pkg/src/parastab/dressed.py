"""
Dressed (rotating-frame) qubit basis, dressed dissipation rates and the
closed-form stabilization fidelities.

The Rabi-driven qubit ``H_q = (Omega_R/2)(sin(theta)(cos(phi) s_x +
sin(phi) s_y) + cos(theta) s_z)`` has ground and excited eigenstates

    |g~> = cos(theta/2)|g> - e^{-i phi} sin(theta/2)|e>
    |e~> = sin(theta/2)|g> + e^{-i phi} cos(theta/2)|e>

so ``theta = 0`` targets ``|g>`` and ``theta = pi`` targets ``|e>``.
"""

import math
from dataclasses import dataclass

import numpy as np

from .qop import qeye, qubit_cavity_ket, tensor


@dataclass(frozen=True)
class StabilizationAxis:
    theta: float
    phi: float = 0.0

    @classmethod
    def from_drive(cls, drv):
        return cls(theta=theta_from_drive(drv.omega_x, drv.omega_z), phi=drv.phase_phi)


@dataclass(frozen=True)
class DressedRates:
    gamma_minus: float
    gamma_plus: float
    gamma_phi_tilde: float

    @property
    def total(self):
        return self.gamma_minus + self.gamma_plus


def theta_from_drive(omega_x, omega_z):
    """Polar angle ``arccos(Omega_z / Omega_R)`` for ``Omega_x >= 0``."""
    return math.atan2(abs(omega_x), omega_z)


def dressing_unitary(theta, phi=0.0):
    """Columns are ``|g~>`` and ``|e~>`` in the bare ``(|g>, |e>)`` basis."""
    c, s = math.cos(theta / 2), math.sin(theta / 2)
    ph = np.exp(-1j * phi)
    return np.array([[c, s], [-ph * s, ph * c]], dtype=complex)


def dressed_states(theta, phi=0.0):
    u = dressing_unitary(theta, phi)
    return u[:, 0].copy(), u[:, 1].copy()


def dressed_qubit_operators(theta, phi=0.0):
    """``(s~-, s~+, s~z)`` as 2x2 matrices in the bare basis."""
    g, e = dressed_states(theta, phi)
    sm = np.outer(g, e.conj())
    sz = np.outer(e, e.conj()) - np.outer(g, g.conj())
    return sm, sm.conj().T, sz


def dressed_ket(qubit, n, n_fock, theta, phi=0.0):
    """``|g~ n>`` or ``|e~ n>`` on the composite space."""
    g, e = dressed_states(theta, phi)
    q = g if qubit in ("g", 0) else e
    return np.kron(q, qubit_cavity_ket("g", n, n_fock)[:n_fock])


def dressed_projector(theta, phi, n_fock):
    """``|g~><g~| (x) 1`` on the composite space."""
    g, _ = dressed_states(theta, phi)
    return tensor(np.outer(g, g.conj()), qeye(n_fock))


def interaction_matrix_element(h_int, theta, phi, n_fock):
    """``<e~0| h_int |g~1>`` for a composite-space operator."""
    bra = dressed_ket("e", 0, n_fock, theta, phi)
    ket = dressed_ket("g", 1, n_fock, theta, phi)
    return complex(np.vdot(bra, h_int @ ket))


def interaction_strength(kind, theta, strength):
    """Magnitude of the resonant ``|e~0> <-> |g~1>`` coupling per interaction type."""
    s2 = math.sin(theta / 2) ** 2
    factor = {
        "blue": s2,
        "red": 1.0 - s2,
        "longitudinal": abs(math.sin(theta)),
        "purple": 1.0,
    }[kind]
    return abs(strength) * factor


def dressed_rates(gamma, gamma_phi, theta):
    if gamma < 0 or gamma_phi < 0:
        raise ValueError("rates must be non-negative")
    c2, s2 = math.cos(theta / 2) ** 2, math.sin(theta / 2) ** 2
    sin2 = math.sin(theta) ** 2
    return DressedRates(
        gamma_minus=gamma * c2 * c2 + 0.5 * gamma_phi * sin2,
        gamma_plus=gamma * s2 * s2 + 0.5 * gamma_phi * sin2,
        gamma_phi_tilde=0.5 * gamma * sin2 + gamma_phi * math.cos(theta) ** 2,
    )


def golden_rule_rate(g, kappa, delta, omega):
    """Cavity-assisted ``|e~0> -> |g~0>`` rate in two forms.

    Returns
    -------
    lorentzian : float
        ``g^2 kappa / ((kappa/2)^2 + (delta - omega)^2)``, valid for ``g << kappa``.
    saturating : float
        ``4 g^2 kappa / (kappa^2 + 4 g^2)``, the resonant form bounded by ``kappa``.
    """
    if kappa <= 0:
        raise ValueError("kappa must be positive")
    lorentzian = g * g * kappa / ((kappa / 2) ** 2 + (delta - omega) ** 2)
    saturating = 4 * g * g * kappa / (kappa * kappa + 4 * g * g)
    return lorentzian, saturating


def pop_weak_coupling(rates, g, kappa):
    gm, gp = rates.gamma_minus, rates.gamma_plus
    k2 = kappa * kappa
    g2 = 4 * g * g
    num = gm * (gm + gp + kappa) * k2 + g2 * (gm + kappa) * (gp + kappa)
    den = (gm + gp) * (gm + gp + kappa) * k2 + g2 * ((gm + gp) * (gp + kappa) + k2)
    if den == 0:
        raise ValueError("population undefined: all rates vanish")
    return num / den


def pop_strong_coupling(rates, kappa):
    gm, gp = rates.gamma_minus, rates.gamma_plus
    den = gm + gp + kappa
    if den == 0:
        raise ValueError("population undefined: all rates vanish")
    return (gm + kappa) / den


def pop_main_text(rates, g, kappa):
    gm, gp = rates.gamma_minus, rates.gamma_plus
    big_gamma = golden_rule_rate(g, kappa, 0.0, 0.0)[1] if kappa > 0 else 0.0
    den = gm + gp + big_gamma
    if den == 0:
        raise ValueError("population undefined: all rates vanish")
    return (gm + big_gamma) / den


def baseline_population(rates):
    """Dressed ground-state population with no qubit-cavity interaction."""
    if rates.total == 0:
        raise ValueError("population undefined: all rates vanish")
    return rates.gamma_minus / rates.total


def corrected_angle(theta, chi, n_bar, omega_x, omega_z):
    """Stabilization angle including the mean dispersive shift ``2 chi n_bar``.

    ``theta`` is accepted for signature symmetry and returned unchanged when
    there is no shift.
    """
    shifted = omega_z + 2 * chi * n_bar
    if omega_x == 0 and shifted == 0:
        raise ValueError("stabilization axis undefined for a vanishing Rabi drive")
    if chi == 0 or n_bar == 0:
        return theta
    return theta_from_drive(omega_x, shifted)


def nbar_max(rates, kappa):
    return rates.gamma_plus / (rates.total + kappa)


def coupling_regime(g, kappa, weak=0.1, strong=10.0):
    ratio = abs(g) / kappa
    if ratio < weak:
        return "weak"
    if ratio > strong:
        return "strong"
    return "intermediate"
