import dataclasses

import numpy as np
import pytest

from omit_ring import (PhysicalParams, UnsettledTrajectoryError,
                       ValidationError, derive_rates, solve_fixed_point)
from omit_ring.oracle import (Trajectory, demodulate, integrate_mean_field,
                              integrate_rates, verify_against_linear)

P0 = PhysicalParams()


def _synthetic_trajectory(signal_fn, eta=2e8, n=20000, span=300):
    times = np.linspace(0.0, span * 2 * np.pi / eta, n)
    sig = signal_fn(times)
    zeros = np.zeros_like(sig)
    return Trajectory(times=times, a=sig, b=zeros, sigma=zeros,
                      x=np.zeros(n), v=np.zeros(n), p_theta=0.0)


def test_demodulate_recovers_exact_model():
    eta = 2e8
    tr = _synthetic_trajectory(lambda t: 2.0 + 0.1 * np.exp(-1j * eta * t))
    out = demodulate(tr, eta)
    assert out["a"].dc == pytest.approx(2.0, abs=1e-12)
    assert out["a"].minus == pytest.approx(0.1, abs=1e-12)
    assert out["a"].plus == pytest.approx(0.0, abs=1e-12)


def test_demodulate_pure_dc():
    tr = _synthetic_trajectory(lambda t: np.full(t.shape, 3.5 + 0j))
    out = demodulate(tr, 2e8)
    assert out["a"].dc == pytest.approx(3.5, abs=1e-12)
    assert abs(out["a"].minus) < 1e-12 and abs(out["a"].plus) < 1e-12


def test_demodulate_flags_unsettled_signal():
    eta = 2e8
    tr = _synthetic_trajectory(
        lambda t: 1.0 + 0.5 * np.exp(-1j * 0.37 * eta * t))
    with pytest.raises(UnsettledTrajectoryError):
        demodulate(tr, eta)


def test_demodulate_input_guards():
    tr = _synthetic_trajectory(lambda t: np.ones_like(t, dtype=complex))
    with pytest.raises(ValidationError):
        demodulate(tr, 0.0)
    with pytest.raises(ValidationError):
        demodulate(tr, 2e8, n_periods=0)


def test_sample_spacing_uniform_and_p_theta_stored():
    p = P0.with_(spin_rate=40e3, pump_power_w=0.0, probe_power_w=0.0)
    r = derive_rates(p)
    tr = integrate_rates(r, 1e-6, 5e-11, eta=r.omega_m,
                         y0=np.zeros(5, dtype=complex))
    steps = np.diff(tr.times)
    assert np.allclose(steps, steps[0], rtol=1e-12)
    assert tr.p_theta == pytest.approx(p.mass_kg * p.radius_m**2 * 40e3)


def test_dt_precondition_enforced():
    r = derive_rates(P0)
    with pytest.raises(ValidationError):
        integrate_rates(r, 1e-6, 1e-9, eta=r.omega_m)


def test_free_mechanical_ringdown_frequency_and_decay():
    p = P0.with_(pump_power_w=0.0, probe_power_w=0.0)
    r = derive_rates(p)
    x0 = 1e-15
    n_periods = 100
    t_end = n_periods * 2 * np.pi / r.omega_m
    tr = integrate_rates(
        r, t_end, 5e-11, eta=r.omega_m,
        y0=np.array([0, 0, 0, x0, 0], dtype=complex))
    # with the optics dark the mechanics is a damped oscillator; read the
    # instantaneous frequency and decay off the (x, v) phase portrait
    omega_d = np.sqrt(r.omega_m**2 - r.gamma_m**2 / 4)
    u = tr.x + 1j * (tr.v + 0.5 * r.gamma_m * tr.x) / omega_d
    phase = np.unwrap(np.angle(u))
    freq = -np.polyfit(tr.times, phase, 1)[0]
    decay = -np.polyfit(tr.times, np.log(np.abs(u)), 1)[0]
    assert freq == pytest.approx(omega_d, rel=1e-2)
    assert decay == pytest.approx(r.gamma_m / 2, rel=1e-2)


def test_dark_driven_cavity_matches_closed_form():
    r = dataclasses.replace(derive_rates(P0), g=0.0, j_coupling=0.0)
    t_end = 1e-6
    tr = integrate_rates(r, t_end, 5e-11, eta=r.omega_m, probe_scale=0.0,
                         y0=np.zeros(5, dtype=complex))
    pole = r.beta + 1j * r.delta_ca
    expected = (np.sqrt(r.kappa_ex) * r.eps_l / pole
                * (1 - np.exp(-pole * tr.times)))
    np.testing.assert_allclose(tr.a, expected, rtol=1e-7, atol=1e-3)


def test_energy_conserved_without_damping():
    r = dataclasses.replace(
        derive_rates(P0.with_(pump_power_w=0.0, probe_power_w=0.0)),
        beta=0.0, gamma_m=0.0, gamma_star=0.0, j_coupling=0.0)
    x0 = 1e-15
    t_end = 100 * 2 * np.pi / r.omega_m
    tr = integrate_rates(r, t_end, 5e-11, eta=r.omega_m,
                         y0=np.array([0, 0, 0, x0, 0], dtype=complex),
                         rtol=1e-10)
    energy = 0.5 * r.mass_kg * (tr.v**2 + r.omega_m**2 * tr.x**2)
    drift = np.abs(energy - energy[0]).max() / energy[0]
    assert drift <= 1e-6


def test_probe_off_trajectory_stays_on_fixed_point():
    r = derive_rates(P0)
    ss = solve_fixed_point(r)
    t_end = 20.0 / r.gamma_m
    tr = integrate_rates(
        r, t_end, 5e-11, eta=r.omega_m, probe_scale=0.0,
        sample_start=t_end * 0.999)
    assert abs(tr.a[-1] - ss.a_mean) <= 1e-6 * abs(ss.a_mean)
    assert abs(tr.b[-1] - ss.b_mean) <= 1e-6 * abs(ss.b_mean)
    assert abs(tr.x[-1] - ss.x_mean) <= 1e-6 * abs(ss.x_mean)
    assert abs(tr.sigma[-1] - ss.sigma_mean) <= 1e-6 * abs(ss.sigma_mean)


def test_wrapper_uses_params():
    tr = integrate_mean_field(
        P0.with_(pump_power_w=0.0, probe_power_w=0.0), 1e-7, 5e-11,
        eta=P0.omega_m, y0=np.zeros(5, dtype=complex))
    assert np.allclose(tr.a, 0.0) and np.allclose(tr.x, 0.0)


def test_unreachable_tolerance_gives_fail_verdict():
    report = verify_against_linear(
        P0, [P0.omega_m + 3e6], 0.0,
        settle_factor=15.0, n_periods=50, rtol=1e-7)
    assert not report.passed
    entry = report.entries[0]
    assert np.isfinite([entry.dev_da, entry.dev_db, entry.dev_dx]).all()
    assert entry.dev_da > 0


def test_verify_requires_etas():
    with pytest.raises(ValidationError):
        verify_against_linear(P0, [], 1e-4)


def test_demodulation_linearity_in_probe():
    r = derive_rates(P0)
    ss = solve_fixed_point(r)
    y0 = np.array([ss.a_mean, ss.b_mean, ss.sigma_mean, ss.x_mean, 0.0],
                  dtype=complex)
    eta = r.omega_m + 1e6
    settle = 20.0 / r.gamma_m
    window = 100 * 2 * np.pi / eta
    coeffs = []
    for scale in (1e-3, 2e-3):
        tr = integrate_rates(
            r, settle + window, 5e-11, eta=eta, sample_start=settle,
            probe_scale=scale, y0=y0, rtol=1e-8)
        coeffs.append(demodulate(tr, eta, 100)["a"].minus)
    assert coeffs[1] / coeffs[0] == pytest.approx(2.0, rel=1e-3)
