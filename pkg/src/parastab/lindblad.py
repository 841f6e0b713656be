"""
Dense Lindblad master-equation engine.

Density matrices are vectorized by stacking columns (Fortran order), so
``vec(A rho B) = (B^T kron A) vec(rho)``.  The superoperator of

    d rho/dt = -i[H, rho] + sum_k r_k (C_k rho C_k' - {C_k' C_k, rho}/2)

is assembled once and reused for steady-state solves and propagation.
"""

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp

from .dressed import dressed_qubit_operators, dressed_rates
from .errors import DegenerateSteadyState, DimensionMismatch, StepSizeUnderflow
from .qop import partial_trace_cavity, qeye, qubit_cavity_ops, sigma_x, sigma_y, sigma_z, tensor

RTOL = 1e-8
ATOL = 1e-10
UNIQUENESS_RATIO = 1e3


@dataclass(frozen=True)
class Liouvillian:
    """Superoperator on ``vec(rho)`` for a ``dim``-dimensional Hilbert space."""

    dim: int
    matrix: np.ndarray

    @property
    def norm(self):
        return float(np.linalg.norm(self.matrix, ord=2))

    def apply(self, rho):
        return unvec(self.matrix @ vec(rho), self.dim)

    def trace_row(self):
        return vec(np.eye(self.dim)).conj()


@dataclass(frozen=True)
class EvolutionResult:
    times: np.ndarray
    states: np.ndarray
    bloch: np.ndarray
    n_photon: np.ndarray
    populations: np.ndarray
    trace_drift: float


def vec(rho):
    return np.asarray(rho).reshape(-1, order="F")


def unvec(v, dim):
    return np.asarray(v).reshape(dim, dim, order="F")


def _spre(a):
    return np.kron(np.eye(a.shape[0]), a)


def _spost(a):
    return np.kron(a.T, np.eye(a.shape[0]))


def build_liouvillian(h, collapse=()):
    """Superoperator for Hamiltonian ``h`` and ``collapse = [(rate, C), ...]``."""
    h = np.asarray(h, dtype=complex)
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise DimensionMismatch(f"Hamiltonian must be square, got {h.shape}")
    d = h.shape[0]
    lv = -1j * (_spre(h) - _spost(h))
    for rate, c in collapse:
        if rate < 0:
            raise ValueError("collapse rates must be non-negative")
        if rate == 0:
            continue
        c = np.asarray(c, dtype=complex)
        if c.shape != h.shape:
            raise DimensionMismatch(f"collapse operator shape {c.shape} != {h.shape}")
        cdc = c.conj().T @ c
        lv += rate * (np.kron(c.conj(), c) - 0.5 * _spre(cdc) - 0.5 * _spost(cdc))
    lv.setflags(write=False)
    return Liouvillian(dim=d, matrix=lv)


def dissipator(rate, c, rho):
    """Direct (non-vectorized) evaluation of ``rate * D[c] rho``."""
    cdc = c.conj().T @ c
    return rate * (c @ rho @ c.conj().T - 0.5 * (cdc @ rho + rho @ cdc))


def liouvillian_spectrum(lv):
    """Eigenvalues sorted by ascending ``|Re|``."""
    ev = np.linalg.eigvals(lv.matrix)
    return ev[np.argsort(np.abs(ev.real))]


def liouvillian_gap(lv):
    """Slowest non-zero relaxation rate, ``|Re|`` of the second eigenvalue."""
    return float(abs(liouvillian_spectrum(lv)[1].real))


def check_unique_steady_state(lv):
    ev = liouvillian_spectrum(lv)
    smallest, second = abs(ev[0].real), abs(ev[1].real)
    floor = 1e-12 * max(lv.norm, 1.0)
    if second <= UNIQUENESS_RATIO * smallest or second <= floor:
        raise DegenerateSteadyState(
            f"steady state not unique: |Re l1|={smallest:.3e}, |Re l2|={second:.3e}"
        )
    return second


def steady_state(lv, check=True):
    """Unique fixed point of ``lv``, solved as a bordered least-squares problem.

    The trace condition is appended as an extra row scaled to the size of
    the superoperator so that it is not swamped by round-off.
    """
    if check:
        check_unique_steady_state(lv)
    m = lv.matrix
    scale = float(np.abs(m).max()) or 1.0
    a = np.vstack([m, scale * lv.trace_row()[None, :]])
    b = np.zeros(a.shape[0], dtype=complex)
    b[-1] = scale
    x, *_ = np.linalg.lstsq(a, b, rcond=None)
    rho = unvec(x, lv.dim)
    rho = 0.5 * (rho + rho.conj().T)
    rho /= np.trace(rho).real

    resid = np.linalg.norm(m @ vec(rho))
    if resid > 1e-10 * max(lv.norm, 1.0):
        raise DegenerateSteadyState(f"steady-state residual {resid:.3e} too large")
    if np.linalg.eigvalsh(rho).min() < -1e-8:
        raise DegenerateSteadyState("steady state is not positive semidefinite")
    return rho


def propagate(lv, rho0, times, rtol=RTOL, atol=ATOL):
    """Integrate the master equation with an embedded 5(4) Runge-Kutta pair.

    ``times`` must be sorted and non-negative; the integration starts at
    ``times[0]`` from ``rho0`` and returns the state at each requested time.
    """
    times = np.asarray(times, dtype=float)
    if times.ndim != 1 or times.size == 0:
        raise ValueError("times must be a non-empty 1D sequence")
    if times[0] < 0 or np.any(np.diff(times) < 0):
        raise ValueError("times must be sorted and non-negative")
    rho0 = np.asarray(rho0, dtype=complex)
    if rho0.shape != (lv.dim, lv.dim):
        raise DimensionMismatch(f"initial state shape {rho0.shape} != ({lv.dim}, {lv.dim})")

    m = lv.matrix
    y0 = vec(rho0).copy()
    if times[-1] == times[0]:
        ys = np.repeat(y0[:, None], times.size, axis=1)
    else:
        sol = solve_ivp(
            lambda _t, y: m @ y,
            (times[0], times[-1]),
            y0,
            method="RK45",
            t_eval=times,
            rtol=rtol,
            atol=atol,
        )
        if sol.status != 0:
            raise StepSizeUnderflow(sol.message)
        ys = sol.y
    states = np.stack([unvec(ys[:, k], lv.dim) for k in range(times.size)])
    return _result(times, states, float(np.trace(rho0).real))


def propagate_expm(lv, rho0, times):
    """Exact propagation ``exp(L t) rho0`` for independent cross-checks."""
    from scipy.linalg import expm

    times = np.asarray(times, dtype=float)
    y0 = vec(np.asarray(rho0, dtype=complex))
    states = np.stack(
        [unvec(expm(lv.matrix * (t - times[0])) @ y0, lv.dim) for t in times]
    )
    return _result(times, states, float(np.trace(rho0).real))


def _result(times, states, trace0):
    dim = states.shape[1]
    traces = np.einsum("kii->k", states).real
    drift = float(np.abs(traces - trace0).max())
    populations = np.einsum("kii->ki", states).real
    if dim % 2 == 0:
        n_fock = dim // 2
        bloch = np.array([bloch_vector(r, n_fock)[:3] for r in states])
        n_op = qubit_cavity_ops(n_fock).n if n_fock >= 2 else np.zeros((dim, dim))
        n_photon = np.einsum("ij,kji->k", n_op, states).real
    else:
        bloch = np.full((times.size, 3), np.nan)
        n_photon = np.full(times.size, np.nan)
    return EvolutionResult(times, states, bloch, n_photon, populations, drift)


def bloch_vector(rho, n_fock=None):
    """Qubit Bloch vector ``(x, y, z)`` and its length after tracing out the cavity."""
    rho = np.asarray(rho)
    if n_fock is None:
        n_fock = rho.shape[0] // 2
    if rho.shape[0] != 2 * n_fock:
        raise DimensionMismatch(f"state dim {rho.shape[0]} != 2 * {n_fock}")
    rq = partial_trace_cavity(rho, n_fock)
    x = float(np.einsum("ij,ji->", sigma_x(), rq).real)
    y = float(np.einsum("ij,ji->", sigma_y(), rq).real)
    z = float(np.einsum("ij,ji->", sigma_z(), rq).real)
    return x, y, z, math.sqrt(x * x + y * y + z * z)


def measured_angle(x, y, z):
    """Polar angle of the Bloch vector measured from ``|g>`` (the ``-z`` pole)."""
    r = math.sqrt(x * x + y * y + z * z)
    if r == 0:
        return float("nan")
    return math.acos(max(-1.0, min(1.0, -z / r)))


def lab_collapse_operators(sys):
    o = qubit_cavity_ops(sys.n_fock)
    return [(sys.kappa, o.a), (sys.gamma, o.sm), (0.5 * sys.gamma_phi, o.sz)]


def dressed_collapse_operators(sys, theta, phi=0.0, omega_R=None):
    """Cavity loss plus qubit dissipators rewritten in the dressed basis.

    The dressed rates are only meaningful when the Rabi splitting exceeds
    the bare rates; a warning is raised when ``omega_R`` is given and is
    below twenty times the larger of ``gamma`` and ``gamma_phi``.
    """
    if omega_R is not None and omega_R < 20 * max(sys.gamma, sys.gamma_phi):
        warnings.warn("Rabi splitting is not large compared to the qubit rates; "
                      "the dressed-frame dissipators are unreliable", stacklevel=2)
    rates = dressed_rates(sys.gamma, sys.gamma_phi, theta)
    sm, sp, sz = dressed_qubit_operators(theta, phi)
    i_c = qeye(sys.n_fock)
    o = qubit_cavity_ops(sys.n_fock)
    return [
        (sys.kappa, o.a),
        (rates.gamma_minus, tensor(sm, i_c)),
        (rates.gamma_plus, tensor(sp, i_c)),
        (0.5 * rates.gamma_phi_tilde, tensor(sz, i_c)),
    ]
