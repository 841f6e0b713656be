import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.optimize import brentq

from parastab import circuitq as cq
from parastab.errors import DivergentCoupler
from parastab.presets import G_R_CROSSING_DEVICE, REFERENCE_DEVICE
from oracles import classical_modes

TWO_PI = 2 * math.pi


circuit_params = st.builds(
    lambda lq, lr, frac, cq_, cr, cg, phi: cq.CircuitParams(
        lq, lr, frac * min(lq, lr), cq_, cr, cg, phi
    ),
    st.floats(1e-9, 30e-9),
    st.floats(0.5e-9, 10e-9),
    st.floats(1e-4, 0.099),
    st.floats(20e-15, 200e-15),
    st.floats(100e-15, 800e-15),
    st.one_of(st.just(0.0), st.floats(1e-17, 10e-15)),
    st.floats(-0.45, 0.45),
)


def test_coupler_inductance():
    assert cq.coupler_inductance(1e-9, 0.0) == pytest.approx(1e-9, rel=1e-15)
    assert cq.coupler_inductance(1e-9, 1 / 3) == pytest.approx(2e-9, rel=1e-12)
    assert cq.coupler_inductance(1e-9, 0.49) == pytest.approx(1e-9 / math.cos(0.49 * math.pi),
                                                              rel=1e-15)
    with pytest.raises(DivergentCoupler):
        cq.coupler_inductance(1e-9, 0.5)
    with pytest.raises(DivergentCoupler):
        cq.coupler_inductance(1e-9, -1.5)


def test_params_validation():
    with pytest.raises(ValueError):
        cq.CircuitParams(0.0, 1e-9, 1e-11, 1e-13, 1e-13, 0.0)
    with pytest.warns(UserWarning):
        cq.CircuitParams(10e-9, 2e-9, 0.5e-9, 80e-15, 400e-15, 0.0)


def test_decoupled_limit():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        p = cq.CircuitParams(10e-9, 2e-9, 1e-22, 80e-15, 400e-15, 0.0)
    m = cq.quantize(p)
    assert m.g_L == pytest.approx(0.0, abs=1e-3)
    assert m.g_C == 0.0
    assert m.omega_q == pytest.approx(1 / math.sqrt(p.L_q * p.C_q), rel=1e-12)
    assert m.omega_r == pytest.approx(1 / math.sqrt(p.L_r * p.C_r), rel=1e-12)


def test_swap_symmetry():
    p = REFERENCE_DEVICE
    q = cq.CircuitParams(p.L_r, p.L_q, p.L_g0, p.C_r, p.C_q, p.C_g)
    a, b = cq.quantize(p), cq.quantize(q)
    assert a.omega_q == pytest.approx(b.omega_r, rel=1e-14)
    assert a.omega_r == pytest.approx(b.omega_q, rel=1e-14)
    assert a.g_L == pytest.approx(b.g_L, rel=1e-14)
    assert a.g_C == pytest.approx(b.g_C, rel=1e-14)


def test_reference_device_frequencies():
    m = cq.quantize(REFERENCE_DEVICE)
    assert m.omega_q / TWO_PI / 1e9 == pytest.approx(4.343, abs=1e-6)
    assert m.omega_r / TWO_PI / 1e9 == pytest.approx(5.439, abs=1e-6)
    # frozen values for this device at zero flux
    assert m.g_r / TWO_PI / 1e6 == pytest.approx(13.5766, abs=1e-3)
    assert m.g_b / TWO_PI / 1e6 == pytest.approx(27.1106, abs=1e-3)


def test_regrouping_identities():
    m = cq.quantize(REFERENCE_DEVICE)
    assert m.g_r == -(m.g_L - m.g_C)
    assert m.g_b == -(m.g_L + m.g_C)
    # both couplings negative in this circuit, hence a positive g_b
    assert m.g_L < 0 and m.g_C < 0 and m.g_b > 0


@settings(max_examples=50, deadline=None)
@given(circuit_params)
def test_normal_modes_match_classical_oracle(p):
    m = cq.quantize(p)
    assert np.allclose(m.normal_mode_frequencies(), classical_modes(p), rtol=1e-9, atol=0)


@settings(max_examples=30, deadline=None)
@given(circuit_params)
def test_back_substitution(p):
    m = cq.quantize(p)
    L_g = m.L_g
    L_s2 = p.L_r * p.L_q + p.L_r * L_g + p.L_q * L_g
    C_s2 = p.C_r * p.C_q + p.C_r * p.C_g + p.C_q * p.C_g
    # omega*Z and omega/Z isolate the capacitive and inductive diagonal terms
    assert m.omega_q * m.Z1 == pytest.approx((p.C_r + p.C_g) / C_s2, rel=1e-12)
    assert m.omega_q / m.Z1 == pytest.approx((p.L_r + L_g) / L_s2, rel=1e-12)
    assert m.omega_r * m.Z2 == pytest.approx((p.C_q + p.C_g) / C_s2, rel=1e-12)
    assert m.omega_r / m.Z2 == pytest.approx((p.L_q + L_g) / L_s2, rel=1e-12)
    assert m.g_L * m.g_C * 4 == pytest.approx(L_g * p.C_g / (L_s2 * C_s2), rel=1e-12, abs=0)


def test_approximate_matches_exact_for_small_coupling():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        base = REFERENCE_DEVICE
        for scale in (1e-1, 1e-2):
            p = cq.CircuitParams(base.L_q, base.L_r, base.L_g0 * scale, base.C_q, base.C_r,
                                 base.C_g * scale)
            m = cq.quantize(p)
            g_r, g_b = cq.approximate_couplings(p, m.omega_q, m.omega_r)
            assert g_r == pytest.approx(m.g_r, rel=5 * scale)
            assert g_b == pytest.approx(m.g_b, rel=5 * scale)


def test_flux_dependence():
    grid = np.linspace(-0.45, 0.45, 19)
    rows = cq.coupling_vs_flux(REFERENCE_DEVICE, grid)
    g_r = np.array([r[1] for r in rows])
    assert np.argmin(np.abs(g_r)) == 9
    assert np.allclose(g_r, g_r[::-1], rtol=1e-12)
    g_L = [abs(cq.quantize(REFERENCE_DEVICE.with_flux(f)).g_L) for f in grid[9:]]
    assert np.all(np.diff(g_L) > 0)


def test_g_r_zero_crossing():
    def g_r(phi):
        return cq.quantize(G_R_CROSSING_DEVICE.with_flux(phi)).g_r

    g_b = [cq.quantize(G_R_CROSSING_DEVICE.with_flux(f)).g_b for f in np.linspace(0, 0.45, 46)]
    assert g_r(0.0) < 0 < g_r(0.3)
    root = brentq(g_r, 0.0, 0.3, xtol=1e-12)
    assert 0.2 < root < 0.3
    assert min(g_b) > 0


def test_vanishing_coupler_is_continuous():
    base = REFERENCE_DEVICE
    prev = None
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        for lg in np.geomspace(1e-11, 1e-16, 11):
            m = cq.quantize(cq.CircuitParams(base.L_q, base.L_r, lg, base.C_q, base.C_r, base.C_g))
            if prev is not None:
                assert abs(m.g_C - prev.g_C) < 1e-3 * abs(prev.g_C)
            prev = m


def test_harmonics_static_and_parity():
    p = REFERENCE_DEVICE
    g_r, g_b = cq.modulation_harmonics(p, 0.1, 0.0, 3)
    m = cq.quantize(p.with_flux(0.1))
    assert g_r[0] == pytest.approx(m.g_r, rel=1e-13)
    assert np.allclose(g_r[1:], 0.0, atol=1e-9 * abs(m.g_r))
    _, g_b = cq.modulation_harmonics(p, 0.0, 0.2, 5)
    assert np.allclose(g_b[1::2], 0.0, atol=1e-9 * abs(g_b[0]))
    assert abs(g_b[2]) > 1e-4 * abs(g_b[0])


def test_harmonics_converged_and_first_order():
    p = REFERENCE_DEVICE
    coarse = cq.modulation_harmonics(p, 0.25, 0.05, 4)
    fine = cq.modulation_harmonics(p, 0.25, 0.05, 4, n_samples=40960)
    for c, f in zip(coarse, fine):
        assert np.allclose(c, f, rtol=0, atol=1e-11 * abs(f[0]))
    h = 1e-6
    slope = (cq.quantize(p.with_flux(0.25 + h)).g_b - cq.quantize(p.with_flux(0.25 - h)).g_b) / (2 * h)
    # the first harmonic approaches slope * phi_ac for shallow modulation
    small = cq.modulation_harmonics(p, 0.25, 0.005, 1)
    assert small[1][1] == pytest.approx(slope * 0.005, rel=1e-3)


def test_harmonics_guard():
    with pytest.raises(DivergentCoupler):
        cq.modulation_harmonics(REFERENCE_DEVICE, 0.3, 0.2, 2)
    with pytest.raises(ValueError):
        cq.modulation_harmonics(REFERENCE_DEVICE, 0.0, 0.1, 2, n_samples=100)
