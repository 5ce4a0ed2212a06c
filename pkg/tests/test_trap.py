"""Photon number, force, potential and trap characterization."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from siba import experiments, trap
from siba.model import NumericsError
from siba.trap import (mode_intensity_j, photon_number, potential, force,
                       resonant_positions, spring_constant_analytic,
                       spring_constant_assembled, spring_constant_numeric,
                       trap_metrics, tweezer_potential, scale_drive)


def test_photon_number_resonance_maximum():
    cfg = experiments.resonant_config(10.0, math.pi / 4)
    mode = cfg.modes[0]
    assert photon_number(mode, math.pi / 4) == pytest.approx(mode.n_peak)
    # at the antinode (eta f + dtil)^2 = 25
    assert photon_number(mode, 0.0) == pytest.approx(mode.n_peak / 26.0)


def test_photon_number_flat_for_empty_cavity():
    cfg = experiments.single_mode_config(0.0, 0.0)
    mode = cfg.modes[0]
    xs = np.linspace(-1.5, 1.5, 7)
    assert np.allclose(photon_number(mode, xs), mode.n_peak)


def test_force_zero_at_antinode_and_on_resonance_value():
    cfg = experiments.resonant_config(10.0, math.pi / 4)
    assert force(cfg, 0.0) == pytest.approx(0.0, abs=1e-14)
    # on resonance: F = n_peak * (kappa/2) * eta * f' = u0 * eta * |f'|
    f_val = force(cfg, math.pi / 4)
    assert abs(f_val) == pytest.approx(cfg.modes[0].u0 * 10.0)
    assert f_val < 0  # points back toward the antinode


def test_two_mode_minimum_has_zero_force():
    x0 = experiments.eq13_trap_position(100.0)
    cfg = experiments.harmonic_config(100.0, x0)
    assert abs(force(cfg, x0)) < 1e-9 * trap.spring_constant_numeric(cfg, x0)


def test_potential_depth_closed_form():
    cfg = experiments.resonant_config(10.0, math.pi / 4)
    u0 = cfg.units.u0
    assert potential(cfg, 0.0) == pytest.approx(-u0 * math.atan(5.0))
    assert potential(cfg, math.pi / 2) == pytest.approx(u0 * math.atan(5.0))
    depth = trap_metrics(cfg, 0.0).depth
    assert depth == pytest.approx(2.746801533890032 * u0, rel=1e-12)


def test_arctan_bound_per_mode():
    rng = np.random.default_rng(7)
    for _ in range(20):
        eta = 10.0 ** rng.uniform(-2, 2.3)
        dtil = rng.uniform(-1.2 * eta, 0.5)
        cfg = experiments.single_mode_config(eta, dtil)
        xs = np.linspace(-math.pi / 2, math.pi / 2, 501)
        u = np.abs(np.asarray(potential(cfg, xs)))
        assert np.all(u <= (math.pi / 2) * cfg.units.u0 * (1 + 1e-12))


@given(st.floats(min_value=-2.0, max_value=2.0),
       st.floats(min_value=-1.5, max_value=1.5))
@settings(max_examples=60, deadline=None)
def test_force_is_negative_potential_gradient(log_eta, x):
    eta = 10.0 ** log_eta
    cfg = experiments.resonant_config(eta, math.pi / 4)
    if not (-math.pi / 2 + 0.01 < x < math.pi / 2 - 0.01):
        return
    h = 1e-5
    fd = -(potential(cfg, x + h) - potential(cfg, x - h)) / (2.0 * h)
    scale = max(1e-3, abs(fd))
    assert abs(force(cfg, x) - fd) < 1e-7 * scale


def test_tweezer_potential_values():
    cfg = experiments.single_mode_config(0.01, 0.0)
    mode = cfg.modes[0]
    assert tweezer_potential(mode, math.pi / 2) == pytest.approx(0.0)
    assert tweezer_potential(mode, 0.0) == pytest.approx(-0.01 * mode.u0)


def test_tweezer_limit_small_eta_agreement():
    cfg = experiments.resonant_config(0.01, math.pi / 4)
    mode = cfg.modes[0]
    xs = np.linspace(-math.pi / 2, math.pi / 2, 801)
    du = np.asarray(potential(cfg, xs)) - potential(cfg, 0.0)
    dut = np.asarray(tweezer_potential(mode, xs)) - tweezer_potential(mode, 0.0)
    assert np.max(np.abs(du - dut)) < 0.01 * trap.tweezer_depth(mode)


def test_resonant_positions_quarter_wave():
    cfg = experiments.resonant_config(10.0, math.pi / 4)
    roots, degenerate = resonant_positions(cfg.modes[0])
    assert not degenerate
    assert len(roots) == 2
    assert roots[0] == pytest.approx(-math.pi / 4, abs=1e-12)
    assert roots[1] == pytest.approx(math.pi / 4, abs=1e-12)
    mode = cfg.modes[0]
    for r in roots:
        assert abs(mode.eta * mode.profile.value(r)
                   + mode.detuning_tilde) < 1e-12


def test_resonant_positions_empty_when_blue():
    cfg = experiments.single_mode_config(10.0, 1.0)
    roots, degenerate = resonant_positions(cfg.modes[0])
    assert roots == [] and not degenerate


def test_resonant_positions_degenerate_at_antinode():
    cfg = experiments.single_mode_config(10.0, -10.0)
    roots, degenerate = resonant_positions(cfg.modes[0])
    assert degenerate
    assert len(roots) == 1
    assert roots[0] == pytest.approx(0.0, abs=1e-6)


def test_trap_metrics_zero_energy():
    cfg = experiments.resonant_config(10.0, math.pi / 4)
    m = trap_metrics(cfg, 0.0)
    assert m.turning_points[0] == m.turning_points[1] == m.minimum_position
    assert m.confinement == 0.0


def test_trap_metrics_unbound_error():
    cfg = experiments.resonant_config(10.0, math.pi / 4)
    depth = trap_metrics(cfg, 0.0).depth
    with pytest.raises(NumericsError, match="unbound"):
        trap_metrics(cfg, 1.1 * depth)


def test_square_well_confinement_approaches_walls():
    cfg = experiments.resonant_config(100.0, math.pi / 4)
    depth = trap_metrics(cfg, 0.0).depth
    m = trap_metrics(cfg, 0.5 * depth)
    assert m.wall_separation == pytest.approx(math.pi / 2, rel=1e-9)
    assert m.confinement / m.wall_separation >= 0.9


def test_harmonic_confinement_estimate():
    cfg = experiments.resonant_config(0.1, math.pi / 4)
    depth = trap_metrics(cfg, 0.0).depth
    e_kin = 0.01 * depth
    m = trap_metrics(cfg, e_kin)
    k = m.spring_numeric
    harmonic = 2.0 * math.sqrt(2.0 * e_kin / k)
    assert m.confinement == pytest.approx(harmonic, rel=0.05)


def test_depth_monotone_in_eta_and_saturates():
    etas = np.logspace(-1, 2.3, 24)
    depths = []
    for eta in etas:
        cfg = experiments.resonant_config(eta, math.pi / 4)
        depths.append(trap_metrics(cfg, 0.0).depth / cfg.units.u0)
    assert np.all(np.diff(depths) > 0)
    cfg200 = experiments.resonant_config(200.0, math.pi / 4)
    gap = 1.0 - trap_metrics(cfg200, 0.0).depth / (math.pi * cfg200.units.u0)
    assert gap < 0.01


def test_drive_scaling_leaves_geometry_bit_identical():
    cfg = experiments.resonant_config(50.0, math.pi / 4)
    scaled = scale_drive(cfg, 7.3)
    m1 = trap_metrics(cfg, 0.0)
    m2 = trap_metrics(scaled, 0.0)
    assert m1.minimum_position == m2.minimum_position
    assert m1.resonant_positions == m2.resonant_positions
    assert m1.wall_separation == m2.wall_separation
    assert m2.depth == pytest.approx(7.3 * m1.depth, rel=1e-12)


def test_spring_numeric_matches_assembled_form():
    for eta, x_r in ((0.5, math.pi / 4), (20.0, 0.6), (100.0, math.pi / 4)):
        cfg = experiments.resonant_config(eta, x_r)
        x0 = trap_metrics(cfg, 0.0).minimum_position
        k_fd = spring_constant_numeric(cfg, x0)
        k_exact = spring_constant_assembled(cfg, x0)
        assert k_fd == pytest.approx(k_exact, rel=1e-6)


def test_spring_linear_in_drive_power():
    cfg = experiments.resonant_config(30.0, math.pi / 4)
    k1 = spring_constant_numeric(cfg, 0.0)
    k2 = spring_constant_numeric(scale_drive(cfg, 2.0), 0.0)
    assert k2 == pytest.approx(2.0 * k1, rel=1e-9)


def test_spring_not_a_minimum_error():
    cfg = experiments.resonant_config(10.0, math.pi / 4)
    with pytest.raises(NumericsError, match="not a minimum"):
        spring_constant_numeric(cfg, math.pi / 2 - 0.05)


def test_spring_tweezer_limit():
    cfg = experiments.resonant_config(0.001, math.pi / 4)
    mode = cfg.modes[0]
    k = spring_constant_numeric(cfg, 0.0)
    k_tweezer = -mode.u0 * mode.eta * mode.profile.second_deriv(0.0) \
        / (1.0 + mode.detuning_tilde ** 2)
    assert k == pytest.approx(k_tweezer, rel=2e-2)


def test_spring_analytic_bracket_structure():
    mode = experiments.resonant_config(100.0, math.pi / 4).modes[0]
    x0 = 0.55
    x_r = x0 + 1.0 / (mode.eta * abs(mode.profile.deriv(x0)))
    j = mode_intensity_j(mode, x0)
    total, ba, tw = spring_constant_analytic(mode, x0, x_r, j)
    assert total == pytest.approx(ba + tw)
    # back-action term is ~eta f'(x_r)^2/|f''(x0)| times the tweezer term
    r = abs(mode.eta * mode.profile.deriv(x_r) * (x_r - x0))
    expected = (2 * r / (1 + r * r)) * mode.eta * mode.profile.deriv(x_r) ** 2 \
        / abs(mode.profile.second_deriv(x0))
    assert ba / tw == pytest.approx(expected, rel=1e-9)
    assert r == pytest.approx(1.0, abs=0.02)
    assert ba / tw > 0.8 * mode.eta * mode.profile.deriv(x_r) ** 2 \
        / abs(mode.profile.second_deriv(x0))

    # moving the wall away suppresses the back-action term as 2r/(1+r^2)
    x_far = x0 + 0.3
    _, ba_far, _ = spring_constant_analytic(mode, x0, x_far, j)
    r_far = abs(mode.eta * mode.profile.deriv(x_far) * (x_far - x0))
    expected = ((2 * r_far / (1 + r_far ** 2)) * mode.profile.deriv(x_far) ** 2) \
        / ((2 * r / (1 + r * r)) * mode.profile.deriv(x_r) ** 2)
    assert ba_far / ba == pytest.approx(expected, rel=1e-9)
    assert ba_far < ba


def test_back_action_factor_peaks_at_unit_r():
    r = np.linspace(0.05, 5.0, 301)
    factor = 2 * r / (1 + r ** 2)
    assert r[np.argmax(factor)] == pytest.approx(1.0, abs=0.02)
    assert np.all(factor <= 2 * 1.0 / (1 + 1.0 ** 2))


def test_photon_peak_width():
    for eta in (50.0, 100.0, 200.0):
        cfg = experiments.resonant_config(eta, math.pi / 4)
        mode = cfg.modes[0]
        from scipy.optimize import brentq
        half = 0.5 * mode.n_peak
        left = brentq(lambda x: photon_number(mode, x) - half, 0.05, math.pi / 4)
        right = brentq(lambda x: photon_number(mode, x) - half,
                       math.pi / 4, math.pi / 2 - 1e-9)
        expected = 2.0 / (eta * abs(mode.profile.deriv(math.pi / 4)))
        assert (right - left) == pytest.approx(expected, rel=0.10)
