"""Integrators, period detection, experienced intensity, Boltzmann averaging."""

import math

import numpy as np
import pytest

from siba import dynamics, experiments, trap
from siba.model import NumericsError, ValidationError


def bound_config(eta=2.0, x_r=math.pi / 4):
    return experiments.resonant_config(eta, x_r)


def test_stationary_trajectory():
    cfg = bound_config()
    traj = dynamics.integrate_adiabatic(cfg, 0.0, 0.0, 1e-3, 2000)
    assert np.all(traj.x == traj.x[0])
    assert np.all(traj.p == 0.0)
    with pytest.raises(NumericsError, match="no period"):
        dynamics.oscillation_period(traj)


def test_harmonic_period_oracle():
    # small oscillations: T = 2*pi*sqrt(m/k)
    cfg = bound_config(eta=0.2)
    depth = trap.trap_metrics(cfg, 0.0).depth
    e_kin = 1e-4 * depth
    k = trap.spring_constant_numeric(cfg, 0.0)
    t_expected = 2.0 * math.pi * math.sqrt(cfg.particle.mass / k)
    dt = t_expected / 4000
    traj = dynamics.integrate_adiabatic(cfg, 0.0, e_kin, dt, int(6 * t_expected / dt))
    period, spread = dynamics.oscillation_period(traj)
    assert period == pytest.approx(t_expected, rel=5e-3)
    assert spread < 1e-6


def test_square_well_period_estimate():
    # eta >> 1 at half depth: T ~ 4 x_t / v_max
    cfg = bound_config(eta=100.0)
    depth = trap.trap_metrics(cfg, 0.0).depth
    e_kin = 0.5 * depth
    m = trap.trap_metrics(cfg, e_kin)
    x_t = m.turning_points[1]
    v_max = math.sqrt(2.0 * e_kin / cfg.particle.mass)
    res = experiments.simulate_intensity(cfg, e_kin, n_periods=6)
    assert res["period"] == pytest.approx(4.0 * x_t / v_max, rel=0.05)


def test_crossing_spacings_symmetric():
    cfg = bound_config()
    depth = trap.trap_metrics(cfg, 0.0).depth
    t_est, _ = dynamics.estimate_period(cfg, 0.3 * depth)
    dt = t_est / 3000
    traj = dynamics.integrate_adiabatic(cfg, 0.0, 0.3 * depth, dt,
                                        int(8 * t_est / dt))
    tc = dynamics.momentum_zero_crossings(traj)
    gaps = np.diff(tc)
    assert np.std(gaps) / np.mean(gaps) < 1e-6


def test_time_reversal_retraces():
    cfg = bound_config()
    depth = trap.trap_metrics(cfg, 0.0).depth
    e_kin = 0.3 * depth
    t_est, _ = dynamics.estimate_period(cfg, e_kin)
    dt = t_est / 4000
    n = int(1.0 * t_est / dt)
    fwd = dynamics.integrate_adiabatic(cfg, 0.0, e_kin, dt, n)
    # restart from the endpoint with reversed momentum; positions must retrace
    x_end, p_end = fwd.x[-1], -fwd.p[-1]
    back = dynamics._verlet_generic(cfg, x_end, p_end, 1.0, dt, n, 1)
    xs_back = back[0]
    assert np.max(np.abs(xs_back - fwd.x[::-1])) < 1e-6


def test_energy_drift_secular_bound():
    cfg = bound_config(eta=1.5)
    depth = trap.trap_metrics(cfg, 0.0).depth
    e_kin = 0.3 * depth
    t_est, _ = dynamics.estimate_period(cfg, e_kin)
    dt = t_est / 500
    traj = dynamics.integrate_adiabatic(cfg, 0.0, e_kin, dt,
                                        int(105 * t_est / dt))
    assert dynamics.energy_drift(traj) < 1e-8


def test_dt_precondition_rejected():
    cfg = bound_config()
    depth = trap.trap_metrics(cfg, 0.0).depth
    t_est, _ = dynamics.estimate_period(cfg, 0.3 * depth)
    with pytest.raises(ValidationError, match="dt too coarse"):
        dynamics.integrate_adiabatic(cfg, 0.0, 0.3 * depth, t_est / 50, 100)


def test_unbound_rejected():
    cfg = bound_config()
    depth = trap.trap_metrics(cfg, 0.0).depth
    with pytest.raises(NumericsError, match="unbound"):
        dynamics.integrate_adiabatic(cfg, 0.0, 2.0 * depth, 1e-4, 100)


def test_full_field_relaxes_to_steady_state():
    # frozen particle (heavy-mass sentinel): |beta|^2 -> n(x0) within 1e-6
    # (residual transient decays as exp(-kappa t/2); settled well after 20/kappa)
    import dataclasses
    cfg = bound_config(eta=5.0)
    heavy = dataclasses.replace(
        cfg, particle=dataclasses.replace(cfg.particle, mass=1e30))
    x0 = 0.3
    kappa = 20.0  # in units of omega0 ~ 1e-15 for the heavy particle
    k_over_w0 = kappa / heavy.units.omega0
    dt = 0.1 / kappa
    n_steps = int(32.0 / kappa / dt)
    traj = dynamics.integrate_full(heavy, x0, 0.0, dt, n_steps, k_over_w0,
                                   beta0=np.array([0.0 + 0.0j]))
    mode = cfg.modes[0]
    g = mode.eta * mode.profile.value(x0) + mode.detuning_tilde
    n_ss = (2.0 * mode.u0 / kappa) / (1.0 + g * g)
    n_end = abs(traj.beta[-1, 0]) ** 2
    assert abs(n_end - n_ss) / n_ss < 1e-6
    assert np.all(traj.x == x0)


def test_full_dt_stability_precheck():
    cfg = bound_config()
    with pytest.raises(ValidationError, match="dt too coarse for kappa"):
        dynamics.integrate_full(cfg, 0.0, 0.1, 1.0, 100, 100.0)


def full_vs_adiabatic_deviation(kappa_over_omega0, n_periods=3):
    cfg = bound_config(eta=1.0)
    depth = trap.trap_metrics(cfg, 0.0).depth
    e_kin = 0.1 * depth
    t_est, _ = dynamics.estimate_period(cfg, e_kin)
    dt = 0.1 / (kappa_over_omega0 * cfg.units.omega0)
    n = int(n_periods * t_est / dt)
    stride = max(1, n // 100_000)
    full = dynamics.integrate_full(cfg, 0.0, e_kin, dt, n, kappa_over_omega0,
                                   stride=stride)
    adia = dynamics.integrate_adiabatic(cfg, 0.0, e_kin, dt * stride,
                                        full.n_samples - 1)
    amp = np.max(np.abs(adia.x))
    return float(np.max(np.abs(full.x - adia.x[:full.n_samples])) / amp)


def test_full_model_adiabatic_limit_and_breakdown():
    # kappa/omega0 = 1e3: agreement; = 10: documented breakdown (> 1%)
    assert full_vs_adiabatic_deviation(1e3, n_periods=3) < 0.01
    assert full_vs_adiabatic_deviation(10.0, n_periods=3) > 0.01


def test_full_vs_adiabatic_convergence_monotone():
    devs = [full_vs_adiabatic_deviation(k) for k in (10.0, 100.0, 1000.0)]
    assert devs[0] > devs[1] > devs[2]


def test_experienced_intensity_tweezer_identity():
    # tightly trapped, eta << 1: J equals the tweezer depth within 2%
    cfg = experiments.tweezer_config(depth=5.0)
    res = experiments.simulate_intensity(cfg, 0.01 * 5.0)
    assert res["j"] == pytest.approx(5.0, rel=0.02)


def test_experienced_intensity_linear_in_e_kin():
    # high back-action: doubling the kinetic energy ~doubles the average
    cfg = experiments.resonant_config(300.0, math.pi / 4)
    depth = trap.trap_metrics(cfg, 0.0).depth
    j1 = experiments.simulate_intensity(cfg, 0.2 * depth)["j"]
    j2 = experiments.simulate_intensity(cfg, 0.4 * depth)["j"]
    assert j2 / j1 == pytest.approx(2.0, rel=0.2)


def test_high_ba_intensity_closed_form():
    mode = experiments.resonant_config(100.0, math.pi / 4).modes[0]
    e_kin = 0.7
    # f = 1/2 and |f'| = 1 at the quarter-wave point: J = (4/pi) e_kin
    val = dynamics.experienced_intensity_high_ba(mode, math.pi / 4, e_kin)
    assert val == pytest.approx(4.0 * e_kin / math.pi, rel=1e-12)
    assert dynamics.experienced_intensity_high_ba(mode, math.pi / 4, 0.0) == 0.0
    with pytest.raises(NumericsError, match="extremum"):
        dynamics.experienced_intensity_high_ba(mode, 0.0, e_kin)


def test_s17_consistency_at_large_eta():
    # simulated ratio tracks the square-well form at the true turning point
    for x_r, tol in ((math.pi / 4, 0.05), (math.pi / 10, 0.05)):
        cfg = experiments.resonant_config(100.0, x_r)
        depth = trap.trap_metrics(cfg, 0.0).depth
        e_kin = 0.1 * depth
        res = experiments.simulate_intensity(cfg, e_kin)
        x_t = res["metrics"].turning_points[1]
        mode = cfg.modes[0]
        s17 = (2.0 / x_t) * (mode.profile.value(x_t)
                             / abs(mode.profile.deriv(x_t))) * 0.1
        assert res["j"] / depth == pytest.approx(s17, rel=tol)


def test_boltzmann_average_limits():
    cfg = experiments.tweezer_config(depth=100.0)
    # kT = 0: the E -> 0+ limit
    assert dynamics.boltzmann_average(cfg, lambda e: 3.0 + e, 0.0) == 3.0
    # constant observable unchanged
    assert dynamics.boltzmann_average(cfg, lambda e: 2.5, 1.0) \
        == pytest.approx(2.5, rel=1e-12)
    # linear observable: first moment of the exponential weight is kT
    val = dynamics.boltzmann_average(cfg, lambda e: 4.0 * e, 0.5, n_samples=24)
    assert val == pytest.approx(4.0 * 0.5, rel=0.01)


def test_trajectory_state_accessor():
    cfg = bound_config()
    traj = dynamics.integrate_adiabatic(cfg, 0.0, 0.0, 1e-3, 50)
    s = traj.state(3)
    assert s.x_p == traj.x[3] and s.p == traj.p[3] and s.beta is None
    assert s.t == pytest.approx(3e-3)
