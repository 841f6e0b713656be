"""
Simulation protocols built on top of the Hamiltonians and the master-equation
engine: stabilization sweeps over the polar angle, interaction-type
comparisons, blue-sideband transmission maps, vacuum-Rabi traces and the
calibration inversions.

Grid points are independent; when ``workers > 1`` they are evaluated on a
thread pool (the heavy lifting is LAPACK, which releases the GIL).  Rows
always come back in grid order.
"""

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.signal import find_peaks

from . import dressed as dr
from .errors import InvalidDispersiveRegime, ParastabError, RankDeficientFit
from .hamiltonians import (
    DriveSettings,
    h_blue_rotating,
    h_blue_spectroscopy,
    h_dressed_interaction,
    h_red_rotating,
    optimal_detunings,
)
from .lindblad import (
    bloch_vector,
    build_liouvillian,
    dressed_collapse_operators,
    lab_collapse_operators,
    measured_angle,
    propagate,
    steady_state,
)
from .qop import ket2dm, qubit_cavity_ket, qubit_cavity_ops

_ANGLE_EPS = 1e-12


@dataclass
class SweepResult:
    """Rows of named values, one per grid point, in grid order.

    A row that failed has ``None`` in every computed column and a message in
    ``error``; successful rows have ``error == ""``.
    """

    columns: list
    rows: list
    units: dict = field(default_factory=dict)

    def column(self, name):
        return np.array([np.nan if r[name] is None else r[name] for r in self.rows], dtype=float)

    def __len__(self):
        return len(self.rows)

    @property
    def ok(self):
        return all(r["error"] == "" for r in self.rows)


def _probability(rho, proj):
    """Projector expectation, with round-off just outside ``[0, 1]`` clipped."""
    p = float(np.real(np.trace(proj @ rho)))
    if -1e-9 < p < 0.0:
        return 0.0
    if 1.0 < p < 1.0 + 1e-9:
        return 1.0
    return p


def _map(fn, items, workers):
    items = list(items)
    if workers is None or workers <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def _guarded(columns, fn, key_cols):
    """Wrap ``fn`` so a solver failure becomes an error row instead of an exception."""

    def run(arg):
        try:
            row = fn(arg)
            row["error"] = ""
        except (ParastabError, np.linalg.LinAlgError, ValueError) as exc:
            row = {c: None for c in columns}
            row.update(key_cols(arg))
            row["error"] = f"{type(exc).__name__}: {exc}"
        return row

    return run


# --------------------------------------------------------------------------
# stabilization sweep


SWEEP_COLUMNS = [
    "theta", "omega_x", "omega_z", "omega_R", "delta", "g", "gamma_minus", "gamma_plus",
    "P_gtilde_ME", "P_weak", "P_strong", "P_main", "purity_ME", "purity_main",
    "theta_measured", "theta_prime", "n_bar", "n_bar_max", "regime",
]
SWEEP_UNITS = {
    "theta": "rad", "omega_x": "rad/s", "omega_z": "rad/s", "omega_R": "rad/s",
    "delta": "rad/s", "g": "rad/s", "gamma_minus": "rad/s", "gamma_plus": "rad/s",
    "theta_measured": "rad", "theta_prime": "rad",
}


def sweep_drive(base_drv, theta):
    """Rabi-drive and sideband settings used at polar angle ``theta``.

    Interior angles keep ``omega_x`` fixed and set ``omega_z = omega_x cot(theta)``.
    The poles use a purely longitudinal drive of magnitude ``omega_x``; at
    ``theta = 0`` the sideband is switched off because its dressed-frame
    matrix element vanishes there anyway.
    """
    ox = base_drv.omega_x
    if ox <= 0:
        raise ValueError("the sweep needs a positive omega_x")
    if not -_ANGLE_EPS <= theta <= math.pi + _ANGLE_EPS:
        raise ValueError(f"theta={theta} outside [0, pi]")
    if theta < _ANGLE_EPS:
        return base_drv.replace(omega_x=0.0, omega_z=ox, omega_b=0.0)
    if theta > math.pi - _ANGLE_EPS:
        return base_drv.replace(omega_x=0.0, omega_z=-ox)
    return base_drv.replace(omega_z=ox / math.tan(theta))


def stabilization_point(sys, base_drv, theta):
    drv = sweep_drive(base_drv, theta)
    theta = min(max(theta, 0.0), math.pi)
    _, _, delta = optimal_detunings(sys, drv, theta)
    drv = drv.replace(delta=delta)
    phi = drv.phase_phi

    h = h_blue_rotating(sys, drv)
    lv = build_liouvillian(h, dressed_collapse_operators(sys, theta, phi, drv.omega_R))
    rho = steady_state(lv)

    o = qubit_cavity_ops(sys.n_fock)
    p_me = _probability(rho, dr.dressed_projector(theta, phi, sys.n_fock))
    x, y, z, purity = bloch_vector(rho, sys.n_fock)
    n_bar = float(np.real(np.trace(o.n @ rho)))

    rates = dr.dressed_rates(sys.gamma, sys.gamma_phi, theta)
    g = dr.interaction_strength("blue", theta, drv.omega_b)
    p_main = dr.pop_main_text(rates, g, sys.kappa)
    return {
        "theta": theta,
        "omega_x": drv.omega_x,
        "omega_z": drv.omega_z,
        "omega_R": drv.omega_R,
        "delta": delta,
        "g": g,
        "gamma_minus": rates.gamma_minus,
        "gamma_plus": rates.gamma_plus,
        "P_gtilde_ME": p_me,
        "P_weak": dr.pop_weak_coupling(rates, g, sys.kappa),
        "P_strong": dr.pop_strong_coupling(rates, sys.kappa),
        "P_main": p_main,
        "purity_ME": purity,
        "purity_main": 2.0 * p_main - 1.0,
        "theta_measured": measured_angle(x, y, z),
        "theta_prime": dr.corrected_angle(theta, sys.chi, n_bar, drv.omega_x, drv.omega_z),
        "n_bar": n_bar,
        "n_bar_max": dr.nbar_max(rates, sys.kappa),
        "regime": dr.coupling_regime(g, sys.kappa),
    }


def stabilization_sweep(sys, base_drv, thetas, workers=1):
    cols = SWEEP_COLUMNS + ["error"]
    fn = _guarded(cols, lambda th: stabilization_point(sys, base_drv, float(th)),
                  lambda th: {"theta": float(th)})
    return SweepResult(cols, _map(fn, thetas, workers), dict(SWEEP_UNITS))


def interior_local_minima(values):
    """Indices ``i`` (not endpoints) with ``values[i]`` strictly below both neighbours."""
    v = np.asarray(values, dtype=float)
    return [i for i in range(1, len(v) - 1) if v[i] < v[i - 1] and v[i] < v[i + 1]]


# --------------------------------------------------------------------------
# interaction comparison


INTERACTION_COLUMNS = {
    "blue": "P_blue",
    "red": "P_red",
    "longitudinal": "P_longitudinal",
    "purple": "P_purple",
}


def comparison_point(sys, omega_R, coupling, theta, interactions, phi=0.0):
    drv = DriveSettings(
        omega_x=omega_R * math.sin(theta),
        omega_z=omega_R * math.cos(theta),
        phase_phi=phi,
        delta=omega_R + sys.chi * math.cos(theta),
    )
    collapse = dressed_collapse_operators(sys, theta, phi, omega_R)
    proj = dr.dressed_projector(theta, phi, sys.n_fock)
    rates = dr.dressed_rates(sys.gamma, sys.gamma_phi, theta)
    row = {"theta": theta, "baseline": dr.baseline_population(rates)}
    for kind in interactions:
        h = h_dressed_interaction(sys, drv, kind, coupling)
        rho = steady_state(build_liouvillian(h, collapse))
        row[INTERACTION_COLUMNS[kind]] = _probability(rho, proj)
    return row


def interaction_comparison(sys, omega_R, coupling, thetas,
                           interactions=("blue", "red", "longitudinal", "purple"),
                           phi=0.0, workers=1):
    """Dressed ground-state population for each interaction at equal strength."""
    unknown = set(interactions) - set(INTERACTION_COLUMNS)
    if unknown:
        raise ValueError(f"unknown interactions {sorted(unknown)}")
    cols = ["theta", "baseline"] + [INTERACTION_COLUMNS[k] for k in interactions] + ["error"]
    fn = _guarded(
        cols,
        lambda th: comparison_point(sys, omega_R, coupling, float(th), interactions, phi),
        lambda th: {"theta": float(th)},
    )
    return SweepResult(cols, _map(fn, thetas, workers), {"theta": "rad"})


# --------------------------------------------------------------------------
# blue-sideband spectroscopy


@dataclass
class SpectroscopyMap:
    """``amplitude[i, j]`` is ``|<a>|`` at ``mod_freqs[i]``, ``probe_freqs[j]``."""

    probe_freqs: np.ndarray
    mod_freqs: np.ndarray
    amplitude: np.ndarray
    errors: list

    def to_sweep(self):
        cols = ["mod_freq", "probe_freq", "amplitude", "error"]
        rows = []
        for i, wm in enumerate(self.mod_freqs):
            for j, wp in enumerate(self.probe_freqs):
                err = self.errors[i][j]
                amp = None if err else float(self.amplitude[i, j])
                rows.append({"mod_freq": float(wm), "probe_freq": float(wp),
                             "amplitude": amp, "error": err})
        return SweepResult(cols, rows, {"mod_freq": "rad/s", "probe_freq": "rad/s"})


def _spectroscopy_cell(sys, omega_b, probe_eps, method, wm, wp):
    h = h_blue_spectroscopy(sys, omega_b, wm, wp, probe_eps)
    lv = build_liouvillian(h, lab_collapse_operators(sys))
    a = qubit_cavity_ops(sys.n_fock).a
    if method == "steady":
        return abs(np.trace(a @ steady_state(lv)))
    return _windowed_amplitude(lv, a, sys, wp)


def _windowed_amplitude(lv, a, sys, wp, settle=15.0, rel_tol=1e-3, max_chunks=40):
    """Propagate from ``|g0>`` in chunks of ``settle/kappa`` until two windows agree.

    After each chunk the mean ``|<a>|`` over two successive windows is
    compared.  The window length is one period of the slowest beat the probe
    can produce against the cavity, ``2 pi / max(|w_r - w_p|, kappa)``.
    Slow qubit relaxation can need many chunks; the cell is flagged when
    ``max_chunks`` are used up.
    """
    if sys.kappa <= 0:
        raise ValueError("windowed spectroscopy needs kappa > 0")
    chunk = settle / sys.kappa
    window = 2 * math.pi / max(abs(sys.omega_r - wp), sys.kappa)
    t = np.concatenate([[0.0], chunk + np.linspace(0.0, 2 * window, 33)])
    rho = ket2dm(qubit_cavity_ket("g", 0, sys.n_fock))
    for _ in range(max_chunks):
        res = propagate(lv, rho, t)
        amps = np.abs(np.einsum("ij,kji->k", a, res.states[1:]))
        first, second = amps[:17].mean(), amps[16:].mean()
        if abs(second - first) <= rel_tol * max(abs(second), 1e-300):
            return second
        rho = res.states[-1]
    raise ParastabError("transmission did not settle within the integration window")


def spectroscopy_map(sys, omega_b, probe_freqs, mod_freqs, probe_eps, method="steady", workers=1):
    """Cavity response ``|<a>|`` on a (modulation, probe) frequency grid.

    ``method='steady'`` solves for the fixed point directly, which is exact
    because the probe and the sideband are both static in the working frame.
    ``method='propagate'`` integrates from ``|g0>`` and checks that the
    response has settled, flagging cells that have not.
    """
    if method not in ("steady", "propagate"):
        raise ValueError("method must be 'steady' or 'propagate'")
    if probe_eps >= sys.kappa:
        raise ValueError("probe amplitude must be weak compared to kappa")
    probe_freqs = np.asarray(probe_freqs, dtype=float)
    mod_freqs = np.asarray(mod_freqs, dtype=float)
    cells = [(wm, wp) for wm in mod_freqs for wp in probe_freqs]

    def run(cell):
        try:
            return _spectroscopy_cell(sys, omega_b, probe_eps, method, *cell), ""
        except (ParastabError, np.linalg.LinAlgError) as exc:
            return 0.0, f"{type(exc).__name__}: {exc}"

    out = _map(run, cells, workers)
    shape = (mod_freqs.size, probe_freqs.size)
    amp = np.array([v for v, _ in out]).reshape(shape)
    errs = [[out[i * shape[1] + j][1] for j in range(shape[1])] for i in range(shape[0])]
    return SpectroscopyMap(probe_freqs, mod_freqs, amp, errs)


def row_peaks(freqs, amplitude, rel_height=0.2):
    """Frequencies of the local maxima above ``rel_height`` of the row maximum.

    The grid ends count as peaks when they exceed their single neighbour.
    """
    amp = np.asarray(amplitude, dtype=float)
    padded = np.concatenate([[-np.inf], amp, [-np.inf]])
    idx, _ = find_peaks(padded, height=rel_height * amp.max())
    return [float(freqs[i - 1]) for i in idx]


def transmission_lines(sys, omega_b, mod_freq, min_weight=1e-3):
    """Probe frequencies of the cavity transitions, weighted by occupation.

    The blue sideband conserves ``K = n - q`` (photons minus qubit
    excitations), so in the frame used by :func:`h_blue_spectroscopy` the
    probe frequency only shifts each ``K`` block rigidly.  A line sits at
    ``E_j - E_i`` for an eigenstate ``i`` of block ``K`` and ``j`` of block
    ``K + 1``.  Its weight is ``p_i |<j|a'|i>|^2``, where ``p_i`` is the
    occupation of ``i`` in the unprobed steady state.  Coherences between
    eigenstates are ignored, which is accurate once the level splittings
    exceed the linewidths.

    Returns
    -------
    list of (frequency, weight), strongest first
    """
    n_fock = sys.n_fock
    o = qubit_cavity_ops(n_fock)
    # K is diagonal in the bare basis; subtracting w_r K removes the GHz offset
    k_diag = np.real(np.diag(o.n - 0.5 * (o.sz + o.identity)))
    h = h_blue_spectroscopy(sys, omega_b, mod_freq, 0.0, 0.0) - sys.omega_r * np.diag(k_diag)
    rho = steady_state(build_liouvillian(h, lab_collapse_operators(sys)))

    def block(k):
        idx = np.where(np.abs(k_diag - k) < 0.5)[0]
        evals, vecs = np.linalg.eigh(h[np.ix_(idx, idx)])
        full = np.zeros((h.shape[0], idx.size), dtype=complex)
        full[idx, :] = vecs
        return evals, full

    lines = []
    for k in range(-1, n_fock - 1):
        e_lo, v_lo = block(k)
        e_hi, v_hi = block(k + 1)
        for i in range(e_lo.size):
            p_i = float(np.real(np.vdot(v_lo[:, i], rho @ v_lo[:, i])))
            for j in range(e_hi.size):
                w = p_i * abs(np.vdot(v_hi[:, j], o.adag @ v_lo[:, i])) ** 2
                if w > min_weight:
                    lines.append((float(e_hi[j] - e_lo[i] + sys.omega_r), w))
    return sorted(lines, key=lambda x: -x[1])


# --------------------------------------------------------------------------
# vacuum Rabi


def vacuum_rabi_trace(sys, g_eff, times):
    """Red-sideband swap from ``|e0>`` with the lab-frame dissipators on.

    The cavity detuning is set to ``chi`` so that ``|e0>`` and ``|g1>`` are
    degenerate.
    """
    h = h_red_rotating(sys, g_eff, detuning=sys.chi)
    lv = build_liouvillian(h, lab_collapse_operators(sys))
    return propagate(lv, ket2dm(qubit_cavity_ket("e", 0, sys.n_fock)), times)


def fft_peak_frequency(times, signal, pad_factor=8):
    """Dominant angular frequency of a uniformly sampled real signal.

    The mean is removed, the FFT is zero-padded to ``pad_factor`` times the
    record length and the peak is refined by a parabola through the three
    largest neighbouring bins.
    """
    t = np.asarray(times, dtype=float)
    y = np.asarray(signal, dtype=float)
    if t.size < 4:
        raise ValueError("need at least 4 samples")
    dt = t[1] - t[0]
    if not np.allclose(np.diff(t), dt, rtol=1e-9, atol=0.0):
        raise ValueError("samples must be uniformly spaced")
    n = pad_factor * t.size
    spec = np.abs(np.fft.rfft(y - y.mean(), n=n))
    k = int(np.argmax(spec[1:])) + 1
    shift = 0.0
    if 0 < k < spec.size - 1:
        a, b, c = spec[k - 1], spec[k], spec[k + 1]
        denom = a - 2 * b + c
        if denom != 0:
            shift = 0.5 * (a - c) / denom
    return 2 * math.pi * (k + shift) / (n * dt)


def fit_decay_envelope(times, signal):
    """Exponential decay rate of the oscillation maxima (log-linear least squares)."""
    t = np.asarray(times, dtype=float)
    y = np.asarray(signal, dtype=float)
    idx, _ = find_peaks(y)
    idx = idx[y[idx] > 0]
    if idx.size < 2:
        raise RankDeficientFit("fewer than two maxima to fit")
    slope, _ = np.polyfit(t[idx], np.log(y[idx]), 1)
    return -slope


# --------------------------------------------------------------------------
# calibration


def chi_from_coupling(g, delta, alpha):
    """Dispersive shift ``g^2 alpha / (2 Delta (Delta + alpha))``."""
    den = 2.0 * delta * (delta + alpha)
    if den == 0:
        raise InvalidDispersiveRegime("qubit is resonant with the cavity or its 1-2 transition")
    return g * g * alpha / den


def g_from_number_splitting(chi, delta, alpha):
    """Invert :func:`chi_from_coupling` for ``|g|``."""
    if alpha == 0:
        raise InvalidDispersiveRegime("anharmonicity must be non-zero")
    radicand = 2.0 * chi * delta * (delta + alpha) / alpha
    if radicand < 0:
        raise InvalidDispersiveRegime(
            f"chi={chi:.4g} has the wrong sign for delta={delta:.4g}, alpha={alpha:.4g}"
        )
    return math.sqrt(radicand)


@dataclass(frozen=True)
class RabiCalibration:
    eps_d: float
    omega_0: float
    residual_rms: float


def rabi_rate_calibration(samples):
    """Fit ``Omega_R = 2 eps_d |g/Delta| + Omega_0`` to ``(g/Delta, Omega_R)`` pairs."""
    data = np.asarray(samples, dtype=float)
    if data.ndim != 2 or data.shape[1] != 2:
        raise ValueError("samples must be (g_over_delta, omega_R) pairs")
    x = np.abs(data[:, 0])
    if data.shape[0] < 2 or np.unique(x).size < 2:
        raise RankDeficientFit("need at least two distinct |g/Delta| values")
    design = np.column_stack([x, np.ones_like(x)])
    (slope, intercept), *_ = np.linalg.lstsq(design, data[:, 1], rcond=None)
    resid = data[:, 1] - design @ np.array([slope, intercept])
    return RabiCalibration(slope / 2.0, intercept, float(np.sqrt(np.mean(resid ** 2))))


# --------------------------------------------------------------------------
# misc


def rates_table(gamma, gamma_phi, thetas):
    rows = []
    for th in thetas:
        r = dr.dressed_rates(gamma, gamma_phi, float(th))
        rows.append({"theta": float(th), "gamma_minus": r.gamma_minus,
                     "gamma_plus": r.gamma_plus, "gamma_phi_tilde": r.gamma_phi_tilde,
                     "error": ""})
    cols = ["theta", "gamma_minus", "gamma_plus", "gamma_phi_tilde", "error"]
    units = {"theta": "rad", "gamma_minus": "rad/s", "gamma_plus": "rad/s",
             "gamma_phi_tilde": "rad/s"}
    return SweepResult(cols, rows, units)


def fock_converged(observable, sys, tol=1e-4, step=2):
    """True when ``observable(sys)`` changes by less than ``tol`` on adding ``step`` Fock levels."""
    a = observable(sys)
    b = observable(sys.replace(n_fock=sys.n_fock + step))
    return abs(a - b) < tol, abs(a - b)
