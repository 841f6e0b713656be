"""
Linear quantization of the SQUID-grounded qubit/resonator circuit.

The transmon junction and the coupler SQUID are both treated as linear
inductors.  The shared coupler node flux is eliminated by minimising the
circuit energy, leaving two oscillators coupled inductively (``g_L``) and
capacitively (``g_C``):

    H/hbar = w_q a1'a1 + w_r a2'a2 + g_L (a1' + a1)(a2' + a2)
             + g_C (a1' - a1)(a2' - a2)

Regrouping the interaction in the rotating-wave sense gives the red
(exchange) and blue (pair-creation) couplings

    g_r = -(g_L - g_C),    g_b = -(g_L + g_C)

which multiply ``-(a' s- + a s+)`` and ``-(a' s+ + a s-)`` respectively.
All frequencies are returned in rad/s; hbar never appears.
"""

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import DivergentCoupler

# |cos(pi phi)| below this is treated as the divergent half-flux point
_COS_FLOOR = 1e-6


@dataclass(frozen=True)
class CircuitParams:
    """Lumped-element values (SI units) and coupler flux in units of Phi_0."""

    L_q: float
    L_r: float
    L_g0: float
    C_q: float
    C_r: float
    C_g: float
    phi_ext: float = 0.0

    def __post_init__(self):
        for name in ("L_q", "L_r", "L_g0", "C_q", "C_r"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be strictly positive")
        if not self.C_g >= 0:
            raise ValueError("C_g must be non-negative")
        if self.L_g0 >= 0.1 * min(self.L_q, self.L_r):
            warnings.warn(
                "L_g0 is not small compared to L_q, L_r; the coupler mode "
                "elimination becomes questionable",
                stacklevel=2,
            )

    def with_flux(self, phi_ext):
        return CircuitParams(self.L_q, self.L_r, self.L_g0, self.C_q, self.C_r, self.C_g, phi_ext)


@dataclass(frozen=True)
class TwoModeModel:
    omega_q: float
    omega_r: float
    g_L: float
    g_C: float
    g_r: float
    g_b: float
    Z1: float
    Z2: float
    L_g: float

    def normal_mode_frequencies(self):
        """Exact eigenfrequencies of the coupled quadratic Hamiltonian, ascending.

        With ``x = (a' + a)/sqrt2`` and ``p = i(a' - a)/sqrt2`` the
        Hamiltonian is ``x.A.x/2 + p.B.p/2``; its normal modes are the
        square roots of the eigenvalues of ``A @ B``.
        """
        a = np.array([[self.omega_q, 2 * self.g_L], [2 * self.g_L, self.omega_r]])
        b = np.array([[self.omega_q, -2 * self.g_C], [-2 * self.g_C, self.omega_r]])
        w2 = np.linalg.eigvals(a @ b)
        return np.sort(np.sqrt(w2.real))


def coupler_inductance(L_g0, phi_ext):
    c = abs(math.cos(math.pi * phi_ext))
    if c <= _COS_FLOOR:
        raise DivergentCoupler(f"coupler inductance diverges at phi_ext={phi_ext}")
    return L_g0 / c


def quantize(p):
    L_g = coupler_inductance(p.L_g0, p.phi_ext)
    L_s2 = p.L_r * p.L_q + p.L_r * L_g + p.L_q * L_g
    C_s2 = p.C_r * p.C_q + p.C_r * p.C_g + p.C_q * p.C_g
    # inductive dressing left on each mode after eliminating the coupler node
    f_q = 1.0 - p.L_r * L_g / L_s2
    f_r = 1.0 - p.L_q * L_g / L_s2

    Z1 = math.sqrt(p.L_q * (p.C_r + p.C_g) / (C_s2 * f_q))
    Z2 = math.sqrt(p.L_r * (p.C_q + p.C_g) / (C_s2 * f_r))
    omega_q = math.sqrt(f_q * (p.C_r + p.C_g) / (p.L_q * C_s2))
    omega_r = math.sqrt(f_r * (p.C_q + p.C_g) / (p.L_r * C_s2))

    g_L = -(L_g / (2.0 * L_s2)) * math.sqrt(Z1 * Z2)
    g_C = -(p.C_g / (2.0 * C_s2)) / math.sqrt(Z1 * Z2)
    return TwoModeModel(
        omega_q=omega_q,
        omega_r=omega_r,
        g_L=g_L,
        g_C=g_C,
        g_r=-(g_L - g_C),
        g_b=-(g_L + g_C),
        Z1=Z1,
        Z2=Z2,
        L_g=L_g,
    )


def approximate_couplings(p, omega_q=None, omega_r=None):
    """Weak-coupling closed form for ``(g_r, g_b)``.

    Uses ``L_g/2 sqrt(w_r w_q / L_r L_q) -/+ C_g/2 sqrt(w_r w_q / C_r C_q)``
    with the bare LC frequencies unless mode frequencies are supplied.
    Agrees with :func:`quantize` to first order in ``L_g0`` and ``C_g``.
    """
    L_g = coupler_inductance(p.L_g0, p.phi_ext)
    if omega_q is None:
        omega_q = 1.0 / math.sqrt(p.L_q * p.C_q)
    if omega_r is None:
        omega_r = 1.0 / math.sqrt(p.L_r * p.C_r)
    w = omega_q * omega_r
    ind = 0.5 * L_g * math.sqrt(w / (p.L_r * p.L_q))
    cap = 0.5 * p.C_g * math.sqrt(w / (p.C_r * p.C_q))
    return ind - cap, ind + cap


def coupling_vs_flux(p, flux_grid):
    rows = []
    for phi in flux_grid:
        m = quantize(p.with_flux(float(phi)))
        rows.append((float(phi), m.g_r, m.g_b))
    return rows


def modulation_harmonics(p, phi_dc, phi_ac, n_harmonics, n_samples=4096):
    """Fourier cosine coefficients of ``g_r(t)`` and ``g_b(t)`` under flux modulation.

    The flux is ``phi_dc + phi_ac cos(w t)``.  Coefficients follow
    ``g(t) = g0 + sum_k g_k cos(k w t)``.  The couplings are sampled on a
    uniform periodic grid, for which the trapezoid rule reduces to a plain
    mean and converges exponentially for smooth periodic integrands.

    Returns
    -------
    g_r, g_b : ndarray, shape (n_harmonics + 1,)
    """
    if abs(phi_dc) + abs(phi_ac) >= 0.5:
        raise DivergentCoupler("flux excursion reaches half a flux quantum")
    if n_samples < 4096:
        raise ValueError("use at least 4096 samples per period")
    tau = 2.0 * np.pi * np.arange(n_samples) / n_samples
    flux = phi_dc + phi_ac * np.cos(tau)
    g_r = np.empty(n_samples)
    g_b = np.empty(n_samples)
    for i, phi in enumerate(flux):
        m = quantize(p.with_flux(phi))
        g_r[i], g_b[i] = m.g_r, m.g_b

    k = np.arange(n_harmonics + 1)
    basis = np.cos(np.outer(k, tau))
    weights = np.where(k == 0, 1.0, 2.0)[:, None] / n_samples
    return (weights * basis) @ g_r, (weights * basis) @ g_b
