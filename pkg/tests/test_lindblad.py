import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from parastab import lindblad as lb
from parastab.experiments import fft_peak_frequency
from parastab.dressed import dressed_projector, dressed_rates
from parastab.errors import DegenerateSteadyState, DimensionMismatch
from parastab.hamiltonians import SystemParams, drive_for_angle, h_blue_rotating
from parastab.presets import STABILIZE_OMEGA_B, STABILIZE_OMEGA_X, STABILIZE_SYSTEM
from parastab.qop import destroy, ket2dm, qubit_cavity_ket, qubit_cavity_ops, sigma_x, sigma_z


def random_density(dim, rng):
    m = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    rho = m @ m.conj().T
    return rho / np.trace(rho)


def random_hermitian(dim, rng):
    m = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return m + m.conj().T


def test_vec_roundtrip_is_column_stacking():
    rho = np.arange(9).reshape(3, 3)
    assert np.array_equal(lb.vec(rho), [0, 3, 6, 1, 4, 7, 2, 5, 8])
    assert np.array_equal(lb.unvec(lb.vec(rho), 3), rho)


@settings(max_examples=25, deadline=None)
@given(st.integers(2, 5), st.integers(0, 2**31 - 1))
def test_superoperator_matches_direct_formula(dim, seed):
    rng = np.random.default_rng(seed)
    h = random_hermitian(dim, rng)
    cs = [(float(rng.uniform(0, 2)), rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim)))
          for _ in range(2)]
    rho = random_density(dim, rng)
    lv = lb.build_liouvillian(h, cs)
    direct = -1j * (h @ rho - rho @ h) + sum(lb.dissipator(r, c, rho) for r, c in cs)
    scale = np.abs(direct).max()
    assert np.allclose(lv.apply(rho), direct, rtol=0, atol=1e-12 * scale)
    # trace preservation: the trace row annihilates every column
    assert np.abs(lv.trace_row() @ lv.matrix).max() <= 1e-12 * lv.norm


def test_liouvillian_is_read_only():
    lv = lb.build_liouvillian(sigma_z())
    with pytest.raises(ValueError):
        lv.matrix[0, 0] = 1.0


def test_cavity_decay_is_exponential():
    kappa, n = 2.0, 3
    a = destroy(n)
    lv = lb.build_liouvillian(np.zeros((n, n)), [(kappa, a)])
    rho0 = np.zeros((n, n), dtype=complex)
    rho0[1, 1] = 1.0
    times = np.linspace(0, 3, 31)
    res = lb.propagate(lv, rho0, times, rtol=1e-10, atol=1e-12)
    assert np.allclose(res.populations[:, 1], np.exp(-kappa * times), rtol=0, atol=1e-9)
    assert np.allclose(res.populations[:, 0], 1 - np.exp(-kappa * times), rtol=0, atol=1e-9)
    assert res.trace_drift < 1e-9
    assert np.isnan(res.n_photon).all()


def test_closed_system_matches_unitary():
    rng = np.random.default_rng(5)
    h = random_hermitian(4, rng)
    psi = rng.normal(size=4) + 1j * rng.normal(size=4)
    rho0 = ket2dm(psi / np.linalg.norm(psi))
    lv = lb.build_liouvillian(h)
    times = np.linspace(0, 2, 9)
    res = lb.propagate(lv, rho0, times, rtol=1e-10, atol=1e-12)
    w, v = np.linalg.eigh(h)
    for t, rho in zip(times, res.states):
        u = v @ np.diag(np.exp(-1j * w * t)) @ v.conj().T
        assert np.allclose(rho, u @ rho0 @ u.conj().T, atol=1e-8)


def test_propagate_matches_expm_and_tightens():
    rng = np.random.default_rng(9)
    h = random_hermitian(4, rng)
    lv = lb.build_liouvillian(h, [(0.4, rng.normal(size=(4, 4)))])
    rho0 = random_density(4, rng)
    times = np.linspace(0, 3, 7)
    exact = lb.propagate_expm(lv, rho0, times).states
    errs = []
    for rtol in (1e-6, 5e-7, 1e-10):
        res = lb.propagate(lv, rho0, times, rtol=rtol, atol=rtol * 1e-2)
        errs.append(np.abs(res.states - exact).max())
    assert errs[-1] < 1e-8
    assert errs[-1] < errs[0]
    # halving the tolerance keeps the answer within the looser tolerance
    assert errs[1] < 1e-5


def test_propagate_rejects_bad_inputs():
    lv = lb.build_liouvillian(sigma_z())
    with pytest.raises(DimensionMismatch):
        lb.propagate(lv, np.eye(3), [0, 1])
    with pytest.raises(ValueError):
        lb.propagate(lv, np.eye(2) / 2, [1, 0])
    res = lb.propagate(lv, np.eye(2) / 2, [0.5, 0.5])
    assert np.array_equal(res.states[0], np.eye(2) / 2)


def test_steady_state_vacuum_and_ground():
    sys = SystemParams(omega_q=1.0, omega_r=1.0, kappa=1.0, gamma=0.5, gamma_phi=0.2, n_fock=3)
    lv = lb.build_liouvillian(np.zeros((6, 6)), lb.lab_collapse_operators(sys))
    rho = lb.steady_state(lv)
    assert np.allclose(rho, ket2dm(qubit_cavity_ket("g", 0, 3)), atol=1e-12)
    x, y, z, r = lb.bloch_vector(rho)
    assert (x, y, z, r) == pytest.approx((0, 0, -1, 1), abs=1e-12)


def test_steady_state_driven_qubit_closed_form():
    # resonantly driven qubit with decay: standard optical Bloch result
    omega, gamma = 0.7, 1.3
    h = 0.5 * omega * sigma_x()
    lv = lb.build_liouvillian(h, [(gamma, np.array([[0, 1], [0, 0]], dtype=complex))])
    rho = lb.steady_state(lv)
    s = omega**2 / (gamma**2 + 2 * omega**2)
    assert rho[1, 1].real == pytest.approx(s, rel=1e-10)


def test_degenerate_steady_state_detected():
    lv = lb.build_liouvillian(sigma_z())
    with pytest.raises(DegenerateSteadyState):
        lb.steady_state(lv)
    lv = lb.build_liouvillian(np.zeros((2, 2)), [(1.0, sigma_z())])
    with pytest.raises(DegenerateSteadyState):
        lb.check_unique_steady_state(lv)


def test_unique_steady_state_gap():
    lv = lb.build_liouvillian(np.zeros((2, 2)), [(2.0, np.array([[0, 1], [0, 0]]))])
    assert lb.liouvillian_gap(lv) == pytest.approx(1.0, rel=1e-12)
    assert lb.check_unique_steady_state(lv) == pytest.approx(1.0, rel=1e-12)


def _stabilize_liouvillian(theta):
    sys = STABILIZE_SYSTEM
    drv = drive_for_angle(theta, STABILIZE_OMEGA_X, omega_b=STABILIZE_OMEGA_B, phase_phi=math.pi)
    drv = drv.replace(delta=drv.omega_R + sys.chi * math.cos(theta))
    return sys, lb.build_liouvillian(h_blue_rotating(sys, drv),
                                     lb.dressed_collapse_operators(sys, theta, math.pi))


def test_steady_state_independent_of_initial_state():
    sys, lv = _stabilize_liouvillian(math.pi)
    rho_ss = lb.steady_state(lv)
    gap = lb.liouvillian_gap(lv)
    t_long = 40 / gap
    for label in ("g", "e"):
        rho0 = ket2dm(qubit_cavity_ket(label, 0, sys.n_fock))
        final = lb.propagate_expm(lv, rho0, [0.0, t_long]).states[-1]
        assert np.abs(final - rho_ss).max() < 1e-9


def test_steady_state_matches_long_propagation():
    sys, lv = _stabilize_liouvillian(math.pi)
    r = dressed_rates(sys.gamma, sys.gamma_phi, math.pi)
    rates = [sys.kappa, r.gamma_minus, r.gamma_plus, r.gamma_phi_tilde]
    slowest = min(x for x in rates if x > 1e-9 * max(rates))
    proj = dressed_projector(math.pi, math.pi, sys.n_fock)
    rho0 = ket2dm(qubit_cavity_ket("g", 0, sys.n_fock))
    final = lb.propagate_expm(lv, rho0, [0.0, 20 / slowest]).states[-1]
    p_long = np.trace(proj @ final).real
    assert p_long == pytest.approx(np.trace(proj @ lb.steady_state(lv)).real, abs=1e-4)


def test_steady_state_is_mostly_dressed_ground_at_pi():
    sys, lv = _stabilize_liouvillian(math.pi)
    rho = lb.steady_state(lv)
    p = np.trace(dressed_projector(math.pi, math.pi, sys.n_fock) @ rho).real
    assert p > 0.95
    x, y, z, r = lb.bloch_vector(rho)
    # the dressed ground state at theta = pi is the bare excited state
    assert lb.measured_angle(x, y, z) == pytest.approx(math.pi, abs=1e-6)


def test_transient_spirals_around_axis():
    theta = 3 * math.pi / 4
    sys, lv = _stabilize_liouvillian(theta)
    rho0 = ket2dm(qubit_cavity_ket("g", 0, sys.n_fock))
    times = np.linspace(0, 0.5e-6, 401)
    res = lb.propagate(lv, rho0, times)
    assert res.trace_drift < 1e-7
    x, y = res.bloch[:, 0], res.bloch[:, 1]
    # the transverse component rotates at the Rabi frequency about the axis
    angle = np.unwrap(np.arctan2(y, x))
    assert abs(angle[-1] - angle[0]) > 2 * math.pi
    assert np.all(res.n_photon >= -1e-9)
    rho_ss = lb.steady_state(lv)
    # precession frequency, read off the component transverse to the steady-state axis
    axis = np.array(lb.bloch_vector(rho_ss)[:3])
    e1 = np.cross(axis, [0.0, 0.0, 1.0])
    e1 /= np.linalg.norm(e1)
    long_times = np.linspace(0, 1e-6, 2001)
    bloch = lb.propagate(lv, rho0, long_times).bloch[:, :3]
    assert fft_peak_frequency(long_times, bloch @ e1) == pytest.approx(STABILIZE_OMEGA_X, rel=0.01)
    late = lb.propagate_expm(lv, rho0, [0.0, 20e-6]).states[-1]
    assert np.abs(late - rho_ss).max() < 1e-6


def test_bloch_vector_examples():
    n = 2
    plus = (qubit_cavity_ket("g", 0, n) + qubit_cavity_ket("e", 0, n)) / math.sqrt(2)
    assert lb.bloch_vector(ket2dm(plus)) == pytest.approx((1, 0, 0, 1), abs=1e-15)
    mixed = np.eye(4) / 4
    assert lb.bloch_vector(mixed) == pytest.approx((0, 0, 0, 0), abs=1e-15)
    assert math.isnan(lb.measured_angle(0, 0, 0))
    assert lb.measured_angle(0, 0, -0.5) == 0.0
    assert lb.measured_angle(1, 0, 0) == pytest.approx(math.pi / 2)
    with pytest.raises(DimensionMismatch):
        lb.bloch_vector(np.eye(6), 2)


def test_dressed_collapse_reduces_to_lab_at_zero_angle():
    sys = SystemParams(omega_q=1.0, omega_r=1.0, kappa=1.0, gamma=0.5, gamma_phi=0.2, n_fock=3)
    lab = lb.build_liouvillian(np.zeros((6, 6)), lb.lab_collapse_operators(sys))
    dressed = lb.build_liouvillian(np.zeros((6, 6)), lb.dressed_collapse_operators(sys, 0.0))
    assert np.allclose(lab.matrix, dressed.matrix, atol=1e-15)


def test_dressed_collapse_warns_for_small_splitting():
    sys = SystemParams(omega_q=1.0, omega_r=1.0, gamma=1.0, n_fock=2)
    with pytest.warns(UserWarning):
        lb.dressed_collapse_operators(sys, 1.0, omega_R=5.0)


def test_photon_number_observable():
    o = qubit_cavity_ops(3)
    rho = ket2dm(qubit_cavity_ket("e", 2, 3))
    lv = lb.build_liouvillian(np.zeros((6, 6)), [(1.0, o.a)])
    res = lb.propagate_expm(lv, rho, [0.0, math.log(2)])
    assert res.n_photon[0] == pytest.approx(2.0)
    assert res.n_photon[1] == pytest.approx(1.0, rel=1e-12)
