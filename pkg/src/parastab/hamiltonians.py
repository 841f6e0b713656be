"""
Lab-frame and rotating-frame Hamiltonians for the driven qubit-cavity system.

Every builder returns a dense Hermitian matrix on the ``2 * n_fock``
composite space (qubit first, see :mod:`parastab.qop`).  Energies are in
rad/s.

The rotating-frame builders share a common "dressing" part

    H_0 = (Omega_x/2)(cos(phi) s_x + sin(phi) s_y) + (Omega_z/2) s_z
          + chi a'a s_z + delta a'a

to which a single qubit-cavity interaction is added.  ``phi`` is the phase
of the Rabi drive; it sets the azimuth of the stabilization axis.
"""

import math
import warnings
from dataclasses import dataclass, replace

import numpy as np

from .qop import eig_hermitian, qubit_cavity_ket, qubit_cavity_ops

INTERACTIONS = ("blue", "red", "longitudinal", "purple")


@dataclass(frozen=True)
class SystemParams:
    """Two-mode model parameters, all rates and frequencies in rad/s.

    ``chi`` is signed and enters the Hamiltonian as ``+chi a'a s_z``; a
    transmon below its cavity has ``chi < 0``.  ``alpha`` is informational
    (it only enters through ``chi``).  ``gamma_phi`` is the lab-frame pure
    dephasing rate of the qubit coherence, i.e. the dissipator is
    ``(gamma_phi/2) D[s_z]``.
    """

    omega_q: float
    omega_r: float
    chi: float = 0.0
    alpha: float = 0.0
    kappa: float = 0.0
    gamma: float = 0.0
    gamma_phi: float = 0.0
    n_fock: int = 4

    def __post_init__(self):
        if min(self.kappa, self.gamma, self.gamma_phi) < 0:
            raise ValueError("dissipation rates must be non-negative")
        if self.n_fock < 2:
            raise ValueError("n_fock must be at least 2")

    def replace(self, **changes):
        return replace(self, **changes)


@dataclass(frozen=True)
class DriveSettings:
    """Drive amplitudes and detunings in rad/s; ``phase_phi`` in rad."""

    omega_x: float = 0.0
    omega_z: float = 0.0
    phase_phi: float = 0.0
    omega_b: float = 0.0
    omega_r_sb: float = 0.0
    omega_p_sb: float = 0.0
    delta: float = 0.0
    probe_eps: float = 0.0
    probe_detuning: float = 0.0

    @property
    def omega_R(self):
        return math.hypot(self.omega_x, self.omega_z)

    @property
    def theta(self):
        if self.omega_R == 0:
            raise ValueError("stabilization axis undefined for a vanishing Rabi drive")
        return math.acos(max(-1.0, min(1.0, self.omega_z / self.omega_R)))

    def replace(self, **changes):
        return replace(self, **changes)


def drive_for_angle(theta, omega_R, **kwargs):
    """DriveSettings whose Rabi vector has length ``omega_R`` and polar angle ``theta``."""
    return DriveSettings(
        omega_x=omega_R * math.sin(theta), omega_z=omega_R * math.cos(theta), **kwargs
    )


def _check_rwa(sys, *amplitudes):
    limit = 0.05 * min(sys.omega_q, sys.omega_r)
    if limit > 0 and any(abs(x) > limit for x in amplitudes):
        warnings.warn("drive amplitude exceeds 5% of the mode frequencies; RWA is suspect",
                      stacklevel=3)


def h_static(sys, g_r, g_b):
    o = qubit_cavity_ops(sys.n_fock)
    return (
        sys.omega_r * o.n
        + 0.5 * sys.omega_q * o.sz
        - g_r * (o.adag @ o.sm + o.a @ o.sp)
        - g_b * (o.adag @ o.sp + o.a @ o.sm)
    )


def dressed_mode_frequencies(sys, g_r, g_b):
    """Dressed qubit and cavity frequencies and dispersive shift from ``h_static``.

    Eigenstates are labelled by their largest overlap with the bare
    ``|g0>, |e0>, |g1>, |e1>`` states.

    Returns
    -------
    omega_q_dressed, omega_r_dressed, chi_dressed : float
        ``chi_dressed`` is half the difference between the cavity frequency
        with the qubit in ``|e>`` and in ``|g>``.
    """
    evals, evecs = eig_hermitian(h_static(sys, g_r, g_b))
    energy = {}
    for label in ("g0", "e0", "g1", "e1"):
        ket = qubit_cavity_ket(label[0], int(label[1]), sys.n_fock)
        energy[label] = evals[np.argmax(np.abs(ket.conj() @ evecs))]
    wq = energy["e0"] - energy["g0"]
    wr = energy["g1"] - energy["g0"]
    chi = 0.5 * ((energy["e1"] - energy["e0"]) - wr)
    return wq, wr, chi


def h_red_rotating(sys, g_r_eff, detuning=0.0):
    """Red-sideband Hamiltonian in the frame co-rotating with the modulation.

    ``H = detuning a'a + chi a'a s_z - g (a' s- + a s+)``.  ``detuning`` is
    the energy of ``|g1>`` relative to ``|e0>`` at ``chi = 0``; exact
    resonance of that pair requires ``detuning = chi``.
    """
    o = qubit_cavity_ops(sys.n_fock)
    return (
        detuning * o.n
        + sys.chi * o.n @ o.sz
        - g_r_eff * (o.adag @ o.sm + o.a @ o.sp)
    )


def _dressing(sys, drv, o):
    phi = drv.phase_phi
    return (
        0.5 * drv.omega_x * (math.cos(phi) * o.sx + math.sin(phi) * o.sy)
        + 0.5 * drv.omega_z * o.sz
        + sys.chi * o.n @ o.sz
        + drv.delta * o.n
    )


def interaction_operator(kind, n_fock):
    """Unit-strength qubit-cavity coupling operator for each interaction type."""
    o = qubit_cavity_ops(n_fock)
    x = o.adag + o.a
    if kind == "blue":
        return o.adag @ o.sp + o.a @ o.sm
    if kind == "red":
        return o.adag @ o.sm + o.a @ o.sp
    if kind == "longitudinal":
        return x @ o.sz
    if kind == "purple":
        return x @ o.sy
    raise ValueError(f"unknown interaction {kind!r}; expected one of {INTERACTIONS}")


def h_dressed_interaction(sys, drv, kind, strength):
    """Dressing terms plus ``strength`` times the chosen interaction."""
    o = qubit_cavity_ops(sys.n_fock)
    return _dressing(sys, drv, o) + strength * interaction_operator(kind, sys.n_fock)


def h_blue_rotating(sys, drv):
    _check_rwa(sys, drv.omega_b, drv.omega_x)
    return h_dressed_interaction(sys, drv, "blue", drv.omega_b)


def h_red_dressed(sys, drv):
    _check_rwa(sys, drv.omega_r_sb, drv.omega_x)
    return h_dressed_interaction(sys, drv, "red", drv.omega_r_sb)


def h_purple_rotating(sys, drv):
    """Equal red + blue drive: ``Omega_P (a' + a) s_y``."""
    _check_rwa(sys, drv.omega_p_sb, drv.omega_x)
    return h_dressed_interaction(sys, drv, "purple", drv.omega_p_sb)


def h_longitudinal(sys, omega_l, drv):
    return h_dressed_interaction(sys, drv, "longitudinal", omega_l)


def h_blue_spectroscopy(sys, omega_b, mod_freq, probe_freq, probe_eps):
    """Blue-sideband modulation plus a weak cavity probe, no Rabi drive.

    Works in the frame where the cavity rotates at the probe frequency and
    the qubit at ``mod_freq - probe_freq``; the blue sideband and the probe
    are then both static:

        H = (w_q - w_mod + w_p)/2 s_z + (w_r - w_p) a'a + chi a'a s_z
            + Omega_b (a' s+ + a s-) + eps (a + a')
    """
    o = qubit_cavity_ops(sys.n_fock)
    qubit_detuning = sys.omega_q - (mod_freq - probe_freq)
    cavity_detuning = sys.omega_r - probe_freq
    return (
        0.5 * qubit_detuning * o.sz
        + cavity_detuning * o.n
        + sys.chi * o.n @ o.sz
        + omega_b * (o.adag @ o.sp + o.a @ o.sm)
        + probe_eps * (o.a + o.adag)
    )


def optimal_detunings(sys, drv, theta):
    """Drive frequencies that bring ``|e~0>`` and ``|g~1>`` into resonance.

    Returns
    -------
    omega_1 : Rabi drive frequency, ``w_q - Omega_z``
    omega_2 : sideband modulation frequency, ``w_q + w_r - Omega_R - Omega_z``
    delta : rotating-frame cavity detuning, ``Omega_R + chi cos(theta)``

    The ``chi cos(theta)`` term is the first-order dispersive shift of
    ``|g~1>`` under ``+chi a'a s_z``.
    """
    omega_R = drv.omega_R
    if omega_R <= 0:
        raise ValueError("optimal detunings need a non-zero Rabi drive")
    omega_1 = sys.omega_q - drv.omega_z
    omega_2 = sys.omega_q + sys.omega_r - omega_R - drv.omega_z
    delta = omega_R + sys.chi * math.cos(theta)
    return omega_1, omega_2, delta
