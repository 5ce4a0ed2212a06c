"""Time integration of the coupled particle-cavity equations of motion.

Two integrators, chosen for structure:

* ``integrate_adiabatic`` - the cavity follows the particle instantaneously
  (d beta/dt = 0), leaving conservative motion in the arctan potential.
  Velocity Verlet (symplectic, fixed step) keeps the energy drift secular-free.
* ``integrate_full`` - the coupled real system (x, p, Re beta_i, Im beta_i)
  with the cavity linewidth resolved.  Fixed-step RK4; the field is damped so
  symplecticity buys nothing here.

Both are deterministic.  Period detection uses momentum zero crossings, which
stay sharp in the square-well regime where the position trace plateaus.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernels, trap
from .model import NumericsError, TrapConfiguration, ValidationError

ADIABATIC_DT_PERIODS = 200   # dt must resolve >= this many steps per period
FULL_DT_KAPPA = 0.1          # dt * kappa <= this for the full integrator


@dataclass(frozen=True)
class TrajectoryState:
    """Instantaneous state: position, momentum, per-mode field amplitude."""

    x_p: float
    p: float
    beta: np.ndarray | None
    t: float


@dataclass(frozen=True)
class Trajectory:
    """Uniform-grid solution of the equations of motion."""

    t: np.ndarray
    x: np.ndarray
    p: np.ndarray
    beta: np.ndarray | None      # (n_samples, n_modes) complex, full model only
    energy: np.ndarray           # H_eff = p^2/2m + U_tot(x) at the samples
    integrator: str              # "adiabatic" | "full"
    dt: float                    # sample spacing (integration dt * stride)
    e_kin: float
    mass: float
    kappa_scale: np.ndarray | None = None  # per-mode kappa used by the full model

    @property
    def n_samples(self) -> int:
        return self.t.shape[0]

    def state(self, i: int) -> TrajectoryState:
        beta = None if self.beta is None else self.beta[i]
        return TrajectoryState(x_p=float(self.x[i]), p=float(self.p[i]),
                               beta=beta, t=float(self.t[i]))


def estimate_period(config: TrapConfiguration, e_kin: float,
                    x0: float | None = None):
    """Conservative period estimate (min of harmonic and square-well forms).

    Returns ``(t_est, metrics)``; the metrics carry depth and turning points.
    """
    metrics = trap.trap_metrics(config, e_kin)
    x_min = metrics.minimum_position if x0 is None else x0
    k = trap.spring_constant_numeric(config, x_min)
    mass = config.particle.mass
    t_harm = 2.0 * math.pi * math.sqrt(mass / k) if k > 0 else math.inf
    if e_kin > 0:
        v_max = math.sqrt(2.0 * e_kin / mass)
        t_sw = 2.0 * metrics.confinement / v_max
    else:
        t_sw = math.inf
    t_est = min(t_harm, t_sw)
    if not math.isfinite(t_est):
        raise NumericsError("no period estimate: flat potential")
    return t_est, metrics


def integrate_adiabatic(config: TrapConfiguration, x0: float, e_kin: float,
                        dt: float, n_steps: int, stride: int = 1) -> Trajectory:
    """Velocity-Verlet integration of the adiabatic (instantaneous-cavity) model.

    Starts at ``x0`` with momentum ``sqrt(2*m*e_kin)``.  Preconditions: the
    motion must be bound (``e_kin`` below the trap depth) and ``dt`` must
    resolve the estimated period by a factor >= 200.
    """
    t_est, metrics = estimate_period(config, e_kin, x0)
    if e_kin >= metrics.depth:
        raise NumericsError(
            f"unbound: e_kin exceeds trap depth by {e_kin - metrics.depth:.6g}")
    if dt > t_est / ADIABATIC_DT_PERIODS:
        raise ValidationError(
            f"dt too coarse: dt must be <= T_est/{ADIABATIC_DT_PERIODS} "
            f"= {t_est / ADIABATIC_DT_PERIODS:.3e}")
    mass = config.particle.mass
    p0 = math.sqrt(2.0 * mass * e_kin)
    if all(m.profile.kind_code <= kernels.KIND_SECOND_HARMONIC
           for m in config.modes):
        kinds, eta, dtil, u0 = kernels.mode_arrays(config)
        xs, ps, fail = kernels.verlet(x0, p0, mass, dt, n_steps, stride,
                                      kinds, eta, dtil, u0)
    else:
        xs, ps, fail = _verlet_generic(config, x0, p0, mass, dt, n_steps, stride)
    if fail >= 0:
        raise NumericsError(f"integration failure: non-finite state at step {fail}")
    _check_in_domain(config, xs)
    t = np.arange(xs.shape[0]) * (dt * stride)
    energy = ps ** 2 / (2.0 * mass) + trap.potential(config, xs)
    return Trajectory(t=t, x=xs, p=ps, beta=None, energy=energy,
                      integrator="adiabatic", dt=dt * stride,
                      e_kin=e_kin, mass=mass)


def _check_in_domain(config, xs):
    lo = max(m.profile.x_lo for m in config.modes)
    hi = min(m.profile.x_hi for m in config.modes)
    bad = np.nonzero((xs < lo) | (xs > hi))[0]
    if bad.size:
        raise NumericsError(
            f"integration failure: left the profile domain at sample {bad[0]}")


def _verlet_generic(config, x0, p0, mass, dt, n_steps, stride):
    """Callable-force Verlet for tabulated profiles (outside the kernels)."""
    n_rec = n_steps // stride + 1
    xs = np.empty(n_rec)
    ps = np.empty(n_rec)
    x, p = x0, p0
    f = trap.force(config, x)
    xs[0], ps[0] = x, p
    j = 1
    for i in range(n_steps):
        p_half = p + 0.5 * dt * f
        x = x + dt * p_half / mass
        f = trap.force(config, x)
        p = p_half + 0.5 * dt * f
        if not (math.isfinite(x) and math.isfinite(p)):
            return xs[:j], ps[:j], i + 1
        if (i + 1) % stride == 0:
            xs[j], ps[j] = x, p
            j += 1
    return xs[:j], ps[:j], -1


def steady_state_beta(config: TrapConfiguration, x: float,
                      kappa_scale: np.ndarray, drive: np.ndarray) -> np.ndarray:
    """Fixed point of the field equation at frozen particle position."""
    beta = np.empty(len(config.modes), dtype=complex)
    for i, m in enumerate(config.modes):
        w = 0.5 * kappa_scale[i] * (m.detuning_tilde
                                    + m.eta * m.profile.value(x))
        beta[i] = drive[i] / (0.5 * kappa_scale[i] - 1j * w)
    return beta


def integrate_full(config: TrapConfiguration, x0: float, e_kin: float,
                   dt: float, n_steps: int, kappa_over_omega0: float,
                   stride: int = 1, beta0: np.ndarray | None = None
                   ) -> Trajectory:
    """Fixed-step RK4 on the full coupled system (x, p, Re beta, Im beta).

    ``kappa_over_omega0`` sets mode 1's linewidth in units of the motional
    frequency scale omega0; other modes keep their linewidth ratios.  Each
    mode's energy scale u0 and coupling ratio kappa_ex/kappa are preserved
    under the rescaling, so the adiabatic limit of this model is exactly the
    potential of :mod:`siba.trap`.  The fields start at their instantaneous
    steady state (override with ``beta0``), which removes the startup
    transient.  Fails fast when ``dt`` does not resolve the cavity
    (``dt * kappa > 0.1``).
    """
    if kappa_over_omega0 <= 0:
        raise ValidationError("kappa_over_omega0 must be positive")
    omega0 = config.units.omega0
    if not math.isfinite(omega0):
        raise ValidationError("configuration not validated: omega0 missing")
    kappa1 = config.modes[0].kappa
    kappa_scale = np.array([kappa_over_omega0 * omega0 * m.kappa / kappa1
                            for m in config.modes])
    if dt > FULL_DT_KAPPA / kappa_scale.max():
        raise ValidationError(
            f"dt too coarse for kappa: require dt <= "
            f"{FULL_DT_KAPPA / kappa_scale.max():.3e}")
    # drive = sqrt(kappa_ex)*E0 with u0 = 2*E0^2*kappa_ex/kappa held fixed:
    # |drive|^2 = kappa_ex*E0^2 = u0*kappa/2
    drive = np.sqrt(np.array([m.u0 for m in config.modes]) * kappa_scale / 2.0)
    if beta0 is None:
        beta0 = steady_state_beta(config, x0, kappa_scale, drive)
    else:
        beta0 = np.asarray(beta0, dtype=complex)
    mass = config.particle.mass
    p0 = math.sqrt(2.0 * mass * e_kin) if math.isfinite(mass) else 0.0

    if any(m.profile.kind_code > kernels.KIND_SECOND_HARMONIC
           for m in config.modes):
        raise ValidationError("full integrator supports analytic profiles only")
    kinds, eta, dtil, u0 = kernels.mode_arrays(config)
    xs, ps, brs, bis, fail = kernels.rk4_full(
        x0, p0, np.ascontiguousarray(beta0.real),
        np.ascontiguousarray(beta0.imag), mass, dt, n_steps, stride,
        kinds, eta, dtil, u0, kappa_scale, drive)
    if fail >= 0:
        raise NumericsError(f"integration failure: non-finite state at step {fail}")
    _check_in_domain(config, xs)
    beta = brs + 1j * bis
    n_max = 2.0 * np.array([m.u0 for m in config.modes]) / kappa_scale
    n_inst = np.abs(beta) ** 2
    bad = np.nonzero(n_inst > 1.01 * n_max[None, :])[0]
    if bad.size:
        raise NumericsError(
            f"photon number exceeded physical bound at sample {bad[0]}")
    t = np.arange(xs.shape[0]) * (dt * stride)
    energy = ps ** 2 / (2.0 * mass) + trap.potential(config, xs)
    return Trajectory(t=t, x=xs, p=ps, beta=beta, energy=energy,
                      integrator="full", dt=dt * stride, e_kin=e_kin, mass=mass,
                      kappa_scale=kappa_scale)


# ---------------------------------------------------------------------------
# Period detection and time averages
# ---------------------------------------------------------------------------

def momentum_zero_crossings(traj: Trajectory) -> np.ndarray:
    """Times where p crosses zero (linear interpolation between samples)."""
    p = traj.p
    sign = np.sign(p)
    idx = np.nonzero(sign[:-1] * sign[1:] < 0.0)[0]
    tc = traj.t[idx] - p[idx] * traj.dt / (p[idx + 1] - p[idx])
    exact = np.nonzero(p == 0.0)[0]
    if exact.size:
        interior = exact[(exact > 0) & (exact < p.shape[0] - 1)]
        keep = interior[sign[interior - 1] * sign[interior + 1] < 0]
        tc = np.sort(np.concatenate([tc, traj.t[keep]]))
    return tc


def oscillation_period(traj: Trajectory):
    """Period from momentum zero crossings: T = 2 * mean crossing spacing.

    Returns ``(period, rel_spread)`` where ``rel_spread`` is the relative
    standard deviation of the crossing spacings.  Raises
    ``NumericsError('no period ...')`` with fewer than 3 crossings.
    """
    tc = momentum_zero_crossings(traj)
    if tc.size < 3:
        raise NumericsError("no period: fewer than 3 momentum sign changes")
    gaps = np.diff(tc)
    period = 2.0 * float(np.mean(gaps))
    rel_spread = float(np.std(gaps) / np.mean(gaps))
    return period, rel_spread


def _whole_period_window(traj: Trajectory):
    tc = momentum_zero_crossings(traj)
    if tc.size < 3:
        raise NumericsError("no period: fewer than 3 momentum sign changes")
    n_half = (tc.size - 1) // 2 * 2       # even number of half periods
    i0 = int(np.searchsorted(traj.t, tc[0]))
    i1 = int(np.searchsorted(traj.t, tc[n_half]))
    return i0, i1


def local_intensity_j(traj: Trajectory, config: TrapConfiguration) -> list:
    """Per-mode alpha-scaled local intensity J_i(t) along the trajectory.

    Adiabatic model: J_i = eta_i * u0_i * L_i(x) * f_i(x).  Full model: the
    instantaneous photon number replaces the steady state,
    J_i = eta_i * (kappa_i/2) * |beta_i|^2 * f_i(x).
    """
    out = []
    for idx, m in enumerate(config.modes):
        if traj.beta is None:
            out.append(trap.mode_intensity_j(m, traj.x))
        else:
            n_inst = np.abs(traj.beta[:, idx]) ** 2
            out.append(m.eta * 0.5 * traj.kappa_scale[idx] * n_inst
                       * m.profile.value(traj.x))
    return out


def experienced_intensity(traj: Trajectory, config: TrapConfiguration):
    """Time-averaged intensity seen by the particle, alpha-scaled.

    Averages the local intensity over a whole number of motional periods by
    trapezoidal quadrature.  Values are reported as
    ``J = <I_exp> * alpha/(c*eps0)`` (internal energy units; in the tweezer
    limit J equals the trap depth) together with the dimensionless
    combination ``J / e_kin``.

    Returns ``(j_total, j_per_mode, j_over_ekin)``.
    """
    i0, i1 = _whole_period_window(traj)
    t_win = traj.t[i0:i1 + 1]
    span = t_win[-1] - t_win[0]
    if span <= 0:
        raise NumericsError("no period: empty averaging window")
    locals_j = local_intensity_j(traj, config)
    j_per_mode = tuple(
        float(np.trapezoid(local[i0:i1 + 1], t_win) / span)
        for local in locals_j)
    j_total = float(sum(j_per_mode))
    j_over = j_total / traj.e_kin if traj.e_kin > 0 else math.inf
    return j_total, j_per_mode, j_over


def experienced_intensity_high_ba(mode, x_r: float, e_kin: float) -> float:
    """Square-well limit of the experienced intensity (alpha-scaled).

    J_inf = 2 * (f(x_r)/|f'(x_r)|) * e_kin / x_r.  Singular where the profile
    slope vanishes (back-action dies at profile extrema).
    """
    fp = mode.profile.deriv(x_r)
    if fp == 0.0:
        raise NumericsError("back-action vanishes at extremum: f'(x_r) = 0")
    return 2.0 * (mode.profile.value(x_r) / abs(fp)) * e_kin / x_r


def energy_drift(traj: Trajectory) -> float:
    """Secular energy drift over the run, relative to e_kin.

    Fits a line through the per-period mean energies (periods delimited by
    successive same-parity momentum zero crossings) and reports
    ``|slope| * n_periods / e_kin``.  The bounded O(dt^2) oscillation of the
    Verlet energy cancels in the period means; what remains is the secular
    component, which a symplectic integrator keeps near machine precision.
    """
    tc = momentum_zero_crossings(traj)
    if tc.size < 5:
        raise NumericsError("no period: too few crossings for a drift estimate")
    means = []
    for k in range(0, tc.size - 2, 2):
        i0 = int(np.searchsorted(traj.t, tc[k]))
        i1 = int(np.searchsorted(traj.t, tc[k + 2]))
        if i1 > i0:
            means.append(float(np.mean(traj.energy[i0:i1])))
    means = np.asarray(means)
    npts = np.arange(means.size, dtype=float)
    slope = np.polyfit(npts, means, 1)[0]
    scale = traj.e_kin if traj.e_kin > 0 else float(np.max(np.abs(traj.energy)))
    return abs(slope) * means.size / scale


def boltzmann_average(config: TrapConfiguration, observable, kT: float,
                      n_samples: int = 16) -> float:
    """Thermal average of an e_kin-parameterized observable.

    Gauss-Laguerre quadrature with weight exp(-E/kT)/kT over maximal kinetic
    energy, truncated at ``E_max = min(10*kT, 0.99*depth)`` (above-barrier
    energies are excluded); the retained weights are renormalized, so a
    constant observable is returned unchanged.  ``kT = 0`` returns the
    observable at the E -> 0+ limit.
    """
    if kT < 0:
        raise ValidationError("kT must be nonnegative")
    if n_samples < 1:
        raise ValidationError("n_samples must be positive")
    if kT == 0.0:
        return float(observable(0.0))
    metrics = trap.trap_metrics(config, 0.0)
    e_max = min(10.0 * kT, 0.99 * metrics.depth)
    nodes, weights = np.polynomial.laguerre.laggauss(n_samples)
    energies = kT * nodes
    keep = energies <= e_max
    if not np.any(keep):
        keep = np.array([True] + [False] * (n_samples - 1))
    energies = energies[keep]
    weights = weights[keep]
    weights = weights / weights.sum()
    values = np.array([float(observable(float(e))) for e in energies])
    return float(np.dot(weights, values))
