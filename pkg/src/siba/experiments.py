"""Named, reproducible parameter sweeps behind the figure-level results.

Every sweep is a pure function of its arguments; the provenance dict stored
on the :class:`SweepTable` is sufficient to re-run it bit-identically.  Sweep
points are independent and may run on a thread pool (``threads`` argument);
rows are always assembled in grid order.

Regime labels in two-mode tables are numeric codes:
0 = tweezer (kd < 2/eta), 1 = harmonic back-action (kd within [1, 5) * 2/eta),
2 = high back-action (kd >= 5 * 2/eta).
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from . import __version__, cavity, dynamics, trap
from .model import (CavityMode, ModeProfile, NumericsError, ParticleSpec,
                    TrapConfiguration, ValidationError, config_hash,
                    PROFILE_FUNDAMENTAL, PROFILE_SECOND_HARMONIC,
                    validate_configuration)

REGIME_TWEEZER = 0
REGIME_HARMONIC_BA = 1
REGIME_HIGH_BA = 2

_HARMONIC_BAND = (1.0, 4.0)   # kd / (2/eta) window labeled harmonic-BA

TWEEZER_ETA = 1e-3            # reference back-action parameter for eta << 1


@dataclass(frozen=True)
class SweepTable:
    """Rectangular numeric table with column labels and provenance."""

    name: str
    columns: tuple
    rows: np.ndarray
    provenance: dict

    def __post_init__(self):
        rows = np.asarray(self.rows, dtype=float)
        if rows.ndim != 2 or rows.shape[1] != len(self.columns):
            raise ValidationError("rows must be rectangular matching columns")
        object.__setattr__(self, "rows", rows)

    def column(self, name: str) -> np.ndarray:
        return self.rows[:, self.columns.index(name)]


def _threads(threads=None) -> int:
    if threads is None:
        threads = int(os.environ.get("SIBA_THREADS", "1"))
    return max(1, threads)


def _map(fn, items, threads):
    n = _threads(threads)
    if n == 1:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items))


def _provenance(name, **params):
    import numpy
    from . import kernels
    return {"name": name, "params": params, "package_version": __version__,
            "numpy_version": numpy.__version__,
            "kernel_path": "numba" if kernels.USE_NUMBA else "numpy"}


# ---------------------------------------------------------------------------
# Configuration builders
# ---------------------------------------------------------------------------

def single_mode_config(eta, detuning_tilde, power=1.0,
                       kind=PROFILE_FUNDAMENTAL) -> TrapConfiguration:
    """One driven mode with kappa_ex = kappa_in and u0 = power."""
    mode = CavityMode(profile=ModeProfile(kind=kind), kappa_ex=0.5,
                      kappa_in=0.5, drive_flux_sq=power,
                      detuning_tilde=detuning_tilde, eta=eta)
    return validate_configuration(
        TrapConfiguration(modes=(mode,), particle=ParticleSpec()))


def resonant_config(eta, x_r, power=1.0) -> TrapConfiguration:
    """Single cos^2 mode with the detuning placing resonant positions at +-x_r."""
    f_r = math.cos(x_r) ** 2
    return single_mode_config(eta, -eta * f_r, power)


def tweezer_config(depth, e_ref_eta=TWEEZER_ETA) -> TrapConfiguration:
    """eta << 1 reference trap at the cos^2 antinode with the given depth."""
    power = depth * (1.0) / math.atan(e_ref_eta)  # depth = u0 * arctan(eta)
    return single_mode_config(e_ref_eta, 0.0, power)


def two_mode_config(eta, dtil_1, dtil_2, power_1=1.0, power_2=1.0,
                    ) -> TrapConfiguration:
    """First plus second harmonic, independently driven and detuned."""
    m1 = CavityMode(profile=ModeProfile(kind=PROFILE_FUNDAMENTAL),
                    kappa_ex=0.5, kappa_in=0.5, drive_flux_sq=power_1,
                    detuning_tilde=dtil_1, eta=eta)
    m2 = CavityMode(profile=ModeProfile(kind=PROFILE_SECOND_HARMONIC),
                    kappa_ex=0.5, kappa_in=0.5, drive_flux_sq=power_2,
                    detuning_tilde=dtil_2, eta=eta)
    return validate_configuration(
        TrapConfiguration(modes=(m1, m2), particle=ParticleSpec()))


# ---------------------------------------------------------------------------
# One simulated point: period-averaged experienced intensity
# ---------------------------------------------------------------------------

def simulate_intensity(config, e_kin, n_periods=8, steps_per_period=1500,
                       window=None, x0=None):
    """Integrate the adiabatic dynamics and average the seen intensity.

    Returns a dict with the alpha-scaled intensity ``j``, measured period,
    turning span ``dx`` and the metrics used.  ``window`` restricts the trap
    search for multi-well landscapes.
    """
    metrics = trap.trap_metrics(config, e_kin, window=window)
    start = metrics.minimum_position if x0 is None else x0
    t_est, _ = dynamics.estimate_period(config, e_kin, x0=start)
    dt = t_est / steps_per_period
    dt = min(dt, _wall_dt(config, e_kin))
    n_steps = int(math.ceil(1.4 * n_periods * t_est / dt))
    traj = dynamics.integrate_adiabatic(config, start, e_kin, dt, n_steps)
    period, spread = dynamics.oscillation_period(traj)
    j, j_modes, j_over = dynamics.experienced_intensity(traj, config)
    i0, i1 = dynamics._whole_period_window(traj)
    dx = float(traj.x[i0:i1 + 1].max() - traj.x[i0:i1 + 1].min())
    return {"j": j, "j_per_mode": j_modes, "j_over_ekin": j_over,
            "period": period, "period_spread": spread, "dx": dx,
            "metrics": metrics, "traj": traj}


def _wall_dt(config, e_kin, substeps=25):
    """dt small enough to resolve the narrow intensity peaks at the walls."""
    v = math.sqrt(2.0 * e_kin / config.particle.mass) if e_kin > 0 else 0.0
    if v == 0.0:
        return math.inf
    dt = math.inf
    for m in config.modes:
        res, _ = trap.resonant_positions(m)
        for x_r in res:
            fp = abs(m.profile.deriv(x_r))
            if fp > 0:
                width = 2.0 / (m.eta * fp)
                dt = min(dt, width / v / substeps)
    return dt


# ---------------------------------------------------------------------------
# Fig. 2: single-mode regimes
# ---------------------------------------------------------------------------

def sweep_regimes(eta_values=(0.1, 10.0, 50.0), grid=1001,
                  threads=None) -> SweepTable:
    """Potential and seen intensity across the back-action regimes.

    For each eta the detuning pins the resonant positions to kx_r = pi/4.
    Columns: x, then per eta the potential u_{eta} and the seen local
    intensity iseen_{eta} = n(x) f(x).
    """
    xs = np.linspace(-math.pi / 2, math.pi / 2, grid)
    cols = ["x"]
    data = [xs]
    for eta in eta_values:
        config = resonant_config(eta, math.pi / 4)
        mode = config.modes[0]
        u = trap.potential(config, xs)
        iseen = trap.photon_number(mode, xs) * mode.profile.value(xs)
        cols += [f"u_eta{eta:g}", f"iseen_eta{eta:g}"]
        data += [u, iseen]
    rows = np.column_stack(data)
    return SweepTable("fig2", tuple(cols), rows,
                      _provenance("fig2", eta_values=list(eta_values),
                                  grid=grid))


# ---------------------------------------------------------------------------
# Fig. 3 / Fig. S3: experienced intensity vs back-action at fixed depth
# ---------------------------------------------------------------------------

def sweep_eta_fixed_depth(kx_r, ekin_fracs=(0.1,), eta_grid=None,
                          depth_target=3.0, n_periods=8, threads=None
                          ) -> SweepTable:
    """Normalized experienced intensity vs eta at equal trap depth.

    For each eta the drive power is solved so the depth equals
    ``depth_target`` (depth is strictly proportional to E0^2, so the solve is
    a single division), then the adiabatic dynamics is averaged over whole
    periods.  The tweezer normalization runs the same protocol at
    eta = 1e-3.  Columns per row: eta, frac, ratio (to the simulated tweezer
    value), j, j_tweezer, s17_oracle, depth, e_kin, dx.

    The square-well oracle s17 = (2/x_t)(f(x_t)/|f'(x_t)|)(e_kin/depth) is
    evaluated at the classical turning point of the same potential.
    """
    if eta_grid is None:
        eta_grid = np.logspace(-2, 2, 9)
    eta_grid = np.asarray(eta_grid, dtype=float)
    if eta_grid.min() >= 1.0 or eta_grid.max() <= 1.0:
        raise ValidationError("eta_grid should span both eta << 1 and eta >> 1")

    tweezer_j = {}
    for frac in ekin_fracs:
        res = _fixed_depth_point(TWEEZER_ETA, kx_r, frac, depth_target,
                                 n_periods)
        tweezer_j[frac] = res["j"]

    points = [(eta, frac) for frac in ekin_fracs for eta in eta_grid]

    def solve(point):
        eta, frac = point
        return _fixed_depth_point(eta, kx_r, frac, depth_target, n_periods)

    results = _map(solve, points, threads)
    rows = []
    for (eta, frac), res in zip(points, results):
        rows.append([eta, frac, res["j"] / tweezer_j[frac], res["j"],
                     tweezer_j[frac], res["s17"], res["depth"], res["e_kin"],
                     res["dx"]])
    cols = ("eta", "frac", "ratio", "j", "j_tweezer", "s17_oracle",
            "depth", "e_kin", "dx")
    return SweepTable("fig3", cols, np.asarray(rows),
                      _provenance("fig3", kx_r=kx_r,
                                  ekin_fracs=list(ekin_fracs),
                                  eta_grid=eta_grid.tolist(),
                                  depth_target=depth_target,
                                  n_periods=n_periods))


def _fixed_depth_point(eta, kx_r, frac, depth_target, n_periods):
    config = resonant_config(eta, kx_r)
    base_depth = trap.trap_metrics(config, 0.0).depth
    config = trap.scale_drive(config, depth_target / base_depth)
    e_kin = frac * depth_target
    res = simulate_intensity(config, e_kin, n_periods=n_periods)
    x_t = res["metrics"].turning_points[1]
    mode = config.modes[0]
    fp = abs(mode.profile.deriv(x_t))
    s17 = ((2.0 / x_t) * (mode.profile.value(x_t) / fp) * frac
           if fp > 0 and x_t > 0 else float("nan"))
    return {"j": res["j"], "s17": s17, "depth": depth_target,
            "e_kin": e_kin, "dx": res["dx"]}


# ---------------------------------------------------------------------------
# Two-mode harmonic optimization (Eqs. 12/13 algebra)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class HarmonicSettings:
    """Detunings and drive weights realizing the optimized two-mode trap."""

    x0: float
    detunings: tuple
    drive_weights: tuple      # relative drive powers balancing the forces
    k_predicted: float        # optimized-spring prediction at unit power_1
    ratio_predicted: float    # 4/eta
    r_realized: tuple         # |eta f'(x_r) (x_r - x0)| per mode
    resonant_positions: tuple


def two_mode_ratio_s19(config, x0: float) -> float:
    """Linearized two-mode intensity ratio <I_hb>/<I_T> from the spring algebra.

    Each mode sits half a linewidth off resonance at x0 (the optimized-spring
    working point), drives are balanced for zero net force, and the tweezer
    reference is the cos^2 antinode trap with the same spring constant and
    kinetic energy.  The ratio evaluates to

        2 * (f1 + w*f2) / (b1 + w*b2),   b_i = eta*f_i'^2 - f_i'',
        w = |f1'/f2'|,

    all profile factors at x0.
    """
    m1, m2 = config.modes
    f1, f2 = m1.profile.value(x0), m2.profile.value(x0)
    p1, p2 = m1.profile.deriv(x0), m2.profile.deriv(x0)
    if abs(p1) < 1e-9 or abs(p2) < 1e-9:
        raise NumericsError("back-action vanishes: f'(x0) = 0 for a mode")
    if math.copysign(1.0, p1) == math.copysign(1.0, p2):
        raise NumericsError("no force balance: mode slopes share a sign at x0")
    b1 = m1.eta * p1 * p1 - m1.profile.second_deriv(x0)
    b2 = m2.eta * p2 * p2 - m2.profile.second_deriv(x0)
    w = abs(p1 / p2)
    return 2.0 * (f1 + w * f2) / (b1 + w * b2)


def eq13_trap_position(eta: float) -> float:
    """Trap position where the two-mode spring algebra yields exactly 4/eta.

    Solved on the force-balance branch between the two antinodes; needs
    eta >> 1 (the bracket fails below eta ~ 20, where the optimized ratio
    cannot reach 4/eta).
    """
    config = two_mode_config(eta, 0.0, 0.0)

    def gap(x):
        return two_mode_ratio_s19(config, x) * eta - 4.0

    lo, hi = 0.45, math.pi / 4 - 0.01
    if gap(lo) * gap(hi) > 0:
        raise NumericsError("eq13 placement: no solution (eta too small?)")
    return brentq(gap, lo, hi, xtol=1e-14)


def optimize_harmonic(config, x0: float) -> HarmonicSettings:
    """Choose detunings and drive balance for the optimized harmonic trap.

    Each mode's detuning puts it half a linewidth off resonance at ``x0``
    (equivalently r_i = 1 up to profile curvature; the realized r_i from the
    resonant positions is reported).  Drive weights cancel the net force at
    x0.  Also returns the optimized-spring prediction and the 4/eta intensity
    ratio.
    """
    if len(config.modes) != 2:
        raise ValidationError("optimize_harmonic needs a two-mode configuration")
    m1, m2 = config.modes
    p1, p2 = m1.profile.deriv(x0), m2.profile.deriv(x0)
    if abs(p1) < 1e-9 or abs(p2) < 1e-9:
        raise NumericsError("back-action vanishes: f'(x0) = 0 for a mode")
    if math.copysign(1.0, p1) == math.copysign(1.0, p2):
        raise NumericsError("no force balance: mode slopes share a sign at x0")
    detunings = (1.0 - m1.eta * m1.profile.value(x0),
                 1.0 - m2.eta * m2.profile.value(x0))
    weights = (1.0, abs(p1 / p2))
    k_pred = 0.0
    for mode, dtil, w, p in zip(config.modes, detunings, weights, (p1, p2)):
        b = mode.eta * p * p - mode.profile.second_deriv(x0)
        k_pred += 0.5 * mode.eta * (w * mode.u0) * b
    eta = m1.eta
    x_rs = []
    r_real = []
    for mode, dtil in zip(config.modes, detunings):
        x_r = _nearest_resonance(mode, dtil, x0)
        x_rs.append(x_r)
        r_real.append(abs(mode.eta * mode.profile.deriv(x_r) * (x_r - x0)))
    return HarmonicSettings(x0=x0, detunings=detunings, drive_weights=weights,
                            k_predicted=k_pred, ratio_predicted=4.0 / eta,
                            r_realized=tuple(r_real),
                            resonant_positions=tuple(x_rs))


def _nearest_resonance(mode, dtil, x0):
    """Root of eta*f(x) + dtil closest to x0."""
    def g(x):
        return mode.eta * mode.profile.value(x) + dtil

    span = 4.0 / (mode.eta * max(abs(mode.profile.deriv(x0)), 1e-9))
    for a, b in ((x0 - span, x0), (x0, x0 + span)):
        a = max(a, mode.profile.x_lo)
        b = min(b, mode.profile.x_hi)
        if g(a) * g(b) < 0:
            return brentq(g, a, b, xtol=1e-14)
    raise NumericsError("no resonant position near x0")


def harmonic_config(eta: float, x0: float, power: float = 1.0
                    ) -> TrapConfiguration:
    """Two-mode configuration realizing the optimized harmonic trap at x0."""
    base = two_mode_config(eta, 0.0, 0.0)
    st = optimize_harmonic(base, x0)
    return two_mode_config(eta, st.detunings[0], st.detunings[1],
                           power_1=power * st.drive_weights[0],
                           power_2=power * st.drive_weights[1])


# ---------------------------------------------------------------------------
# Fig. 5: experienced intensity vs confinement for two modes
# ---------------------------------------------------------------------------

def square_well_config(eta, x_r2, x_r1, power=1.0) -> TrapConfiguration:
    """Two-mode square well: mode 2 provides the left wall (x_r2), mode 1 the
    right wall (x_r1), on the balance branch between the two antinodes."""
    if not x_r2 < x_r1:
        raise ValidationError("wall order: require x_r2 < x_r1")
    dtil_1 = -eta * math.cos(x_r1) ** 2
    dtil_2 = -eta * math.sin(2.0 * x_r2) ** 2
    return two_mode_config(eta, dtil_1, dtil_2, power_1=power, power_2=power)


def constant_geometry_walls(eta, d_values, sigma_target=None):
    """Wall pairs with constant summed wall factor f/|f'|.

    Along the high back-action branch the experienced intensity is
    proportional to (sum_i f_i(x_ri)/|f_i'(x_ri)|) * e_kin/dx, so holding the
    wall factor fixed isolates the 1/dx travel-time scaling.  For each
    separation d the wall positions solve

        f1(c + d/2)/|f1'(c + d/2)| + f2(c - d/2)/|f2'(c - d/2)| = sigma.
    """
    def wall_sum(center, d):
        x1 = center + d / 2.0
        x2 = center - d / 2.0
        t1 = math.cos(x1) ** 2 / abs(math.sin(2.0 * x1))
        t2 = math.sin(2.0 * x2) ** 2 / abs(2.0 * math.sin(4.0 * x2))
        return t1 + t2

    d_values = sorted(d_values)
    if sigma_target is None:
        sigma_target = wall_sum(0.5, d_values[0])
    pairs = []
    for d in d_values:
        lo = d / 2.0 + 0.02
        hi = math.pi / 4 - d / 2.0 - 0.02
        if hi <= lo:
            raise ValidationError(f"wall separation {d} does not fit the branch")

        def gap(c):
            return wall_sum(c, d) - sigma_target

        # wall_sum is U-shaped in the center; take the left solution
        grid = np.linspace(lo, hi, 257)
        vals = np.array([gap(c) for c in grid])
        sign_change = np.nonzero(vals[:-1] * vals[1:] < 0)[0]
        if sign_change.size == 0:
            raise NumericsError(f"no constant-geometry center for d = {d}")
        i = sign_change[0]
        center = brentq(gap, grid[i], grid[i + 1], xtol=1e-13)
        pairs.append((center - d / 2.0, center + d / 2.0))
    return pairs, sigma_target


def sweep_two_mode(eta, powers, wall_pairs, e_kin=1.0, ekin_frac_sw=0.55,
                   n_periods=8, threads=None) -> SweepTable:
    """Experienced intensity vs confinement for the two-mode trap.

    Two families of points share the table:

    * square-well points - one per wall pair, drive power solved so
      ``e_kin = ekin_frac_sw * depth``; just above one half the turning
      points sit at the resonant positions themselves (dx -> d), which keeps
      the wall-factor evaluation symmetric across the reversal layer;
    * harmonic points - wall distance pinned near 2/eta at the optimized
      trap position, one point per entry of ``powers`` (increasing power
      shrinks the confinement at fixed e_kin).

    Columns: kdx, j_over_ekin, kd, eta, power, regime, flagged.
    """
    rows = []

    def sw_point(pair):
        x_r2, x_r1 = pair
        cfg = square_well_config(eta, x_r2, x_r1)
        width = 6.0 * max(2.0 / (eta * abs(cfg.modes[0].profile.deriv(x_r1))),
                          2.0 / (eta * abs(cfg.modes[1].profile.deriv(x_r2))))
        window = (x_r2 - width, x_r1 + width)
        depth = trap.trap_metrics(cfg, 0.0, window=window).depth
        cfg = trap.scale_drive(cfg, e_kin / (ekin_frac_sw * depth))
        res = simulate_intensity(cfg, e_kin, n_periods=n_periods,
                                 window=window)
        d = x_r1 - x_r2
        return [res["dx"], res["j_over_ekin"], d, eta,
                e_kin / (ekin_frac_sw * depth), _regime(d, eta),
                _flagged(cfg, res["metrics"])]

    rows.extend(_map(sw_point, list(wall_pairs), threads))

    x0 = eq13_trap_position(eta)
    settings = optimize_harmonic(two_mode_config(eta, 0.0, 0.0), x0)
    x_lo = min(settings.resonant_positions)
    x_hi = max(settings.resonant_positions)
    kd_h = x_hi - x_lo
    window = (x_lo - 2.0 * kd_h, x_hi + 2.0 * kd_h)

    def hb_point(power):
        cfg = harmonic_config(eta, x0, power=power)
        res = simulate_intensity(cfg, e_kin, n_periods=n_periods,
                                 window=window, x0=x0)
        return [res["dx"], res["j_over_ekin"], kd_h, eta, power,
                _regime(kd_h, eta), _flagged(cfg, res["metrics"])]

    rows.extend(_map(hb_point, list(powers), threads))
    cols = ("kdx", "j_over_ekin", "kd", "eta", "power", "regime", "flagged")
    return SweepTable("two_mode", cols, np.asarray(rows),
                      _provenance("two_mode", eta=eta, powers=list(powers),
                                  wall_pairs=[list(p) for p in wall_pairs],
                                  e_kin=e_kin, ekin_frac_sw=ekin_frac_sw,
                                  n_periods=n_periods))


def _migration_point(eta, d):
    """Near-merged resonances (kd << 2/eta): the particle's motion no longer
    shifts the modes off resonance, the back-action spring dies as 2r/(1+r^2)
    and the point returns toward the tweezer scaling.  Drives are balanced so
    the trap minimum stays pinned between the two resonances; probed in the
    harmonic regime with the amplitude a fixed fraction of the peak width."""
    center = 0.5
    base = two_mode_config(eta, 0.0, 0.0)
    p1 = abs(base.modes[0].profile.deriv(center))
    p2 = abs(base.modes[1].profile.deriv(center))
    dtil_1 = -eta * math.cos(center + d / 2.0) ** 2
    dtil_2 = -eta * math.sin(2.0 * (center - d / 2.0)) ** 2
    cfg = two_mode_config(eta, dtil_1, dtil_2, power_1=1.0, power_2=p1 / p2)
    # the confining basin around the merged resonances shrinks with d
    window = (center - 2.0 * d, center + 2.0 * d)
    x0 = trap.trap_metrics(cfg, 0.0, window=window).minimum_position
    k = trap.spring_constant_numeric(cfg, x0)
    amp = 0.15 * d
    e_loc = 0.5 * k * amp * amp
    res = simulate_intensity(cfg, e_loc, window=window, x0=x0)
    return [res["dx"], res["j_over_ekin"], d, eta, 1.0,
            _regime(d, eta), _flagged(cfg, res["metrics"])]


def _regime(kd, eta):
    ratio = kd / (2.0 / eta)
    if ratio < _HARMONIC_BAND[0]:
        return REGIME_TWEEZER
    if ratio < _HARMONIC_BAND[1]:
        return REGIME_HARMONIC_BA
    return REGIME_HIGH_BA


def _flagged(config, metrics):
    """1.0 when a mode's slope vanishes between its wall and the minimum."""
    x0 = metrics.minimum_position
    for mode, res in zip(config.modes, metrics.resonant_positions):
        for x_r in res:
            a, b = sorted((x0, x_r))
            if b - a < 1e-12:
                continue
            xs = np.linspace(a, b, 64)
            fp = np.asarray(mode.profile.deriv(xs))
            if np.any(fp[:-1] * fp[1:] < 0) or abs(mode.profile.deriv(x_r)) == 0:
                return 1.0
    return 0.0


def sweep_fig5(eta=100.0, n_walls=12, n_powers=8, e_kin=1.0, n_migrate=2,
               threads=None) -> SweepTable:
    """Full Fig.-5 style table: tweezer reference plus the two-mode families.

    Square-well separations span kd = 8..20 in units of 2/eta (far enough
    out that the wall Lorentzians no longer overlap) with the summed wall
    factor held constant, so the travel-time 1/dx scaling is isolated.
    ``n_migrate`` extra square-well points at kd below 2/eta document the
    migration back toward the tweezer line (labeled tweezer, excluded from
    the reference fit by their eta).  Tweezer reference points come from the
    eta << 1 single-mode trap at matched kinetic energy across a drive-power
    ramp (confinement shrinks as 1/sqrt(power)).
    """
    d_values = np.geomspace(8.0 * 2.0 / eta, 20.0 * 2.0 / eta, n_walls)
    wall_pairs, _sigma = constant_geometry_walls(eta, d_values)
    powers = _harmonic_power_grid(eta, e_kin, n_powers)
    table = sweep_two_mode(eta, powers, wall_pairs, e_kin=e_kin,
                           threads=threads)
    if n_migrate:
        d_small = np.geomspace(0.02 * 2.0 / eta, 0.1 * 2.0 / eta, n_migrate)
        migr = _map(lambda d: _migration_point(eta, d), d_small, threads)
        table = SweepTable(table.name, table.columns,
                           np.vstack([table.rows, np.asarray(migr)]),
                           table.provenance)

    def tw_point(frac):
        depth = e_kin / frac
        cfg = tweezer_config(depth)
        res = simulate_intensity(cfg, e_kin)
        return [res["dx"], res["j_over_ekin"], 2.0 * res["dx"], TWEEZER_ETA,
                depth, REGIME_TWEEZER, 0.0]

    fracs = np.geomspace(0.008, 0.05, n_powers)
    rows = np.vstack([table.rows, np.asarray(_map(tw_point, fracs, threads))])
    prov = _provenance("fig5", eta=eta, n_walls=n_walls, n_powers=n_powers,
                       e_kin=e_kin, n_migrate=n_migrate)
    prov["two_mode"] = table.provenance
    return SweepTable("fig5", table.columns, rows, prov)


def _harmonic_power_grid(eta, e_kin, n_powers):
    """Powers keeping the harmonic amplitude a small fraction of the wall gap."""
    x0 = eq13_trap_position(eta)
    settings = optimize_harmonic(two_mode_config(eta, 0.0, 0.0), x0)
    gap = min(abs(x_r - x0) for x_r in settings.resonant_positions)
    k_unit = settings.k_predicted     # spring at power_1 = 1
    powers = []
    for c in np.geomspace(0.12, 0.32, n_powers):
        amp = c * gap
        powers.append(2.0 * e_kin / (amp * amp) / k_unit)
    return powers


def fit_loglog(x, y):
    """Least-squares slope/intercept of log10(y) vs log10(x) with slope s.e."""
    lx, ly = np.log10(np.asarray(x)), np.log10(np.asarray(y))
    n = lx.size
    coeffs, cov = np.polyfit(lx, ly, 1, cov=True)
    slope, intercept = float(coeffs[0]), float(coeffs[1])
    stderr = float(np.sqrt(cov[0, 0])) if n > 2 else float("nan")
    return slope, intercept, stderr


# ---------------------------------------------------------------------------
# Fig. S1/S2: back-action parameter vs particle size
# ---------------------------------------------------------------------------

def sweep_eta_vs_size(q_list=(1e4, 1e5, 1e6), nu=1.0, kr_min=0.0, kr_max=0.9,
                      points=361, threads=None) -> SweepTable:
    """eta(kr) per quality factor, with each curve's optimum in the provenance."""
    scan = cavity.eta_scan(q_list, nu, kr_min, kr_max, points)
    cols = ["kr"] + [f"eta_Q{q:g}" for q in q_list]
    data = [scan["kr"]] + [scan["eta"][q] for q in q_list]
    optima = {}
    for q in q_list:
        kr_opt, eta_max = cavity.eta_optimum(q, nu)
        optima[f"{q:g}"] = {"kr_opt": kr_opt, "eta_max": eta_max}
    prov = _provenance("figS1", q_list=list(q_list), nu=nu, kr_min=kr_min,
                       kr_max=kr_max, points=points)
    prov["optima"] = optima
    return SweepTable("figS1", tuple(cols), np.column_stack(data), prov)
