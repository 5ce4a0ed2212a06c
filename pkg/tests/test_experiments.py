"""Sweep protocols: regimes, fixed-depth curves, two-mode optimization."""

import math

import numpy as np
import pytest

from siba import experiments as ex
from siba import trap
from siba.model import NumericsError


def test_fig2_low_eta_intensity_tracks_profile():
    table = ex.sweep_regimes(eta_values=(0.1, 50.0), grid=801)
    x = table.column("x")
    f = np.cos(x) ** 2
    iseen = table.column("iseen_eta0.1")
    corr = np.corrcoef(iseen, f)[0, 1]
    assert corr > 0.999


def test_fig2_high_eta_peaks_at_resonant_positions():
    table = ex.sweep_regimes(eta_values=(50.0,), grid=1601)
    x = table.column("x")
    iseen = table.column("iseen_eta50")
    dx = x[1] - x[0]
    pos = x[x > 0]
    peak_right = pos[np.argmax(iseen[x > 0])]
    assert abs(peak_right - math.pi / 4) <= dx


def test_fig2_high_eta_square_well_floor():
    table = ex.sweep_regimes(eta_values=(50.0,), grid=1601)
    x = table.column("x")
    u = table.column("u_eta50")
    depth = u.max() - u.min()
    central = np.abs(x) <= 0.6 * (math.pi / 4)
    assert (u[central].max() - u[central].min()) / depth < 0.05


def test_fig3_normalization_at_small_eta():
    table = ex.sweep_eta_fixed_depth(math.pi / 4, ekin_fracs=(0.1,),
                                     eta_grid=np.array([0.01, 2.0, 100.0]))
    ratio = table.column("ratio")
    assert abs(ratio[0] - 1.0) < 0.02
    assert ratio[2] < ratio[1] < ratio[0]


def test_fig3_rejects_onesided_eta_grid():
    from siba.model import ValidationError
    with pytest.raises(ValidationError, match="span"):
        ex.sweep_eta_fixed_depth(math.pi / 4, eta_grid=np.array([2.0, 100.0]))


def test_eq13_placement_algebra():
    eta = 100.0
    x0 = ex.eq13_trap_position(eta)
    cfg = ex.two_mode_config(eta, 0.0, 0.0)
    assert ex.two_mode_ratio_s19(cfg, x0) * eta == pytest.approx(4.0, abs=1e-9)


def test_eq13_placement_requires_large_eta():
    with pytest.raises(NumericsError, match="eta too small"):
        ex.eq13_trap_position(5.0)


def test_optimize_harmonic_settings():
    eta = 100.0
    x0 = ex.eq13_trap_position(eta)
    settings = ex.optimize_harmonic(ex.two_mode_config(eta, 0.0, 0.0), x0)
    assert settings.ratio_predicted == 4.0 / eta
    # realized trap: zero force at x0 and the predicted spring constant
    cfg = ex.harmonic_config(eta, x0)
    assert abs(trap.force(cfg, x0)) < 1e-10 * settings.k_predicted
    k_num = trap.spring_constant_numeric(cfg, x0)
    assert k_num == pytest.approx(settings.k_predicted, rel=1e-6)
    # the fundamental-mode wall has negligible profile curvature: r_1 ~ 1
    assert settings.r_realized[0] == pytest.approx(1.0, abs=0.01)
    assert all(r > 0 for r in settings.r_realized)
    # walls bracket the minimum
    assert min(settings.resonant_positions) < x0 < max(settings.resonant_positions)


def test_optimize_harmonic_rejects_dead_points():
    cfg = ex.two_mode_config(100.0, 0.0, 0.0)
    with pytest.raises(NumericsError, match="vanishes"):
        ex.optimize_harmonic(cfg, math.pi / 4)  # second-harmonic antinode


def test_constant_geometry_walls_hold_wall_factor():
    eta = 100.0
    d_values = np.geomspace(8 * 2 / eta, 20 * 2 / eta, 6)
    pairs, sigma = ex.constant_geometry_walls(eta, d_values)
    for x_r2, x_r1 in pairs:
        t1 = math.cos(x_r1) ** 2 / abs(math.sin(2 * x_r1))
        t2 = math.sin(2 * x_r2) ** 2 / abs(2 * math.sin(4 * x_r2))
        assert t1 + t2 == pytest.approx(sigma, rel=1e-9)
        assert (x_r1 - x_r2) == pytest.approx(
            d_values[pairs.index((x_r2, x_r1))], rel=1e-9)


def test_two_mode_sweep_labels_partition_and_rerun_identical():
    eta = 100.0
    pairs, _ = ex.constant_geometry_walls(
        eta, np.geomspace(8 * 2 / eta, 12 * 2 / eta, 3))
    t1 = ex.sweep_two_mode(eta, [ex._harmonic_power_grid(eta, 1.0, 2)[0]],
                           pairs, e_kin=1.0, n_periods=4)
    t2 = ex.sweep_two_mode(eta, [ex._harmonic_power_grid(eta, 1.0, 2)[0]],
                           pairs, e_kin=1.0, n_periods=4)
    np.testing.assert_array_equal(t1.rows, t2.rows)
    regimes = set(t1.column("regime"))
    assert regimes <= {ex.REGIME_TWEEZER, ex.REGIME_HARMONIC_BA,
                       ex.REGIME_HIGH_BA}
    assert not np.any(np.isnan(t1.column("regime")))


def test_two_mode_sweep_threads_match_serial():
    eta = 100.0
    pairs, _ = ex.constant_geometry_walls(
        eta, np.geomspace(8 * 2 / eta, 12 * 2 / eta, 3))
    serial = ex.sweep_two_mode(eta, [], pairs, e_kin=1.0, threads=1)
    threaded = ex.sweep_two_mode(eta, [], pairs, e_kin=1.0, threads=3)
    np.testing.assert_array_equal(serial.rows, threaded.rows)


def test_migration_points_return_toward_tweezer_line():
    # kd << 2/eta washes out back-action: the suppression relative to the
    # tweezer line shrinks monotonically as kd decreases, and the innermost
    # point has lost most of its back-action advantage
    table = ex.sweep_fig5(eta=100.0, n_walls=4, n_powers=4, n_migrate=2)
    regime = table.column("regime")
    etas = table.column("eta")
    kdx = table.column("kdx")
    kd = table.column("kd")
    y = table.column("j_over_ekin")
    ref = (regime == ex.REGIME_TWEEZER) & (etas < 1.0)
    slope, intercept, _ = ex.fit_loglog(kdx[ref], y[ref])
    migr = (regime == ex.REGIME_TWEEZER) & (etas > 1.0)
    assert np.count_nonzero(migr) == 2
    rel = {}
    for xd, xm, ym in zip(kd[migr], kdx[migr], y[migr]):
        y_line = 10.0 ** (intercept + slope * math.log10(xm))
        rel[xd] = ym / y_line
    small, large = sorted(rel)
    assert rel[small] > rel[large]          # closer to the line as kd shrinks
    assert rel[small] > 0.1                  # advantage mostly gone
    assert rel[large] < rel[small]


def test_eta_size_sweep_optima():
    table = ex.sweep_eta_vs_size(q_list=(1e4, 1e6), points=200)
    kr = table.column("kr")
    eta6 = table.column("eta_Q1e+06")
    assert eta6.max() == pytest.approx(389.8484006168381, rel=1e-3)
    assert kr[np.argmax(eta6)] == pytest.approx(0.17937514029727025, abs=5e-3)
    eta4 = table.column("eta_Q10000")
    assert eta4.max() == pytest.approx(38.984840061683805, rel=1e-3)
    # Q-ordering below the smaller optimum
    sel = kr < 0.15
    assert np.all(eta6[sel][1:] >= eta4[sel][1:])


def test_sweep_table_requires_rectangular_rows():
    from siba.model import ValidationError
    with pytest.raises(ValidationError, match="rectangular"):
        ex.SweepTable("x", ("a", "b"), np.zeros((3, 3)), {})
