"""Closed-form intra-cavity photon number, force, trap potential and metrics.

Potentials are reported in internal energy units (see :mod:`siba.model`); the
single-mode potential is ``U(x) = -u0 * arctan(eta*f(x) + dtil)`` and the
two-mode potential is the incoherent sum.  Root finding and minimization are
deterministic: a uniform pre-scan followed by bisection / golden-section
refinement, so tabulated profiles work identically to analytic ones.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
from scipy.optimize import brentq

from .model import NumericsError, TrapConfiguration, ValidationError

SCAN_POINTS = 4096
_GOLDEN_TOL = 1e-12


def lorentzian(mode, x):
    """Resonance factor 1/(1 + (eta*f(x) + dtil)^2)."""
    g = mode.eta * mode.profile.value(x) + mode.detuning_tilde
    return 1.0 / (1.0 + g * g)


def photon_number(mode, x):
    """Intra-cavity photon number n(x) = n_peak/(1 + (eta*f + dtil)^2)."""
    return mode.n_peak * lorentzian(mode, x)


def mode_potential(mode, x):
    """Single-mode trapping potential -u0 * arctan(eta*f(x) + dtil)."""
    return -mode.u0 * np.arctan(mode.eta * mode.profile.value(x)
                                + mode.detuning_tilde)


def potential(config: TrapConfiguration, x):
    """Total potential: incoherent sum of the per-mode arctan potentials."""
    return sum(mode_potential(m, x) for m in config.modes)


def force(config: TrapConfiguration, x):
    """Optical force sum_i n_i(x) * (kappa_i/2) * eta_i * f_i'(x), hbar = 1.

    Equals -dU/dx exactly.
    """
    total = 0.0
    for m in config.modes:
        total = total + m.u0 * m.eta * lorentzian(m, x) * m.profile.deriv(x)
    return total


def tweezer_potential(mode, x):
    """Small-eta reference potential -u0 * eta * f(x) / (1 + dtil^2)."""
    return -mode.u0 * mode.eta * mode.profile.value(x) \
        / (1.0 + mode.detuning_tilde ** 2)


def tweezer_depth(mode) -> float:
    """Depth u0 * eta / (1 + dtil^2) of the small-eta reference trap."""
    return mode.u0 * mode.eta / (1.0 + mode.detuning_tilde ** 2)


def scale_drive(config: TrapConfiguration, factor) -> TrapConfiguration:
    """Rescale every mode's drive power E0^2 by a common factor (or per-mode
    sequence).  The potential scales uniformly; trap geometry is unchanged."""
    factors = np.broadcast_to(np.asarray(factor, dtype=float),
                              (len(config.modes),))
    modes = tuple(replace(m, drive_flux_sq=m.drive_flux_sq * c)
                  for m, c in zip(config.modes, factors))
    from .model import validate_configuration
    return validate_configuration(replace(config, modes=modes))


# ---------------------------------------------------------------------------
# Root finding / minimization helpers (deterministic, derivative-free)
# ---------------------------------------------------------------------------

def _domain(config):
    lo = max(m.profile.x_lo for m in config.modes)
    hi = min(m.profile.x_hi for m in config.modes)
    if not hi > lo:
        raise ValidationError("profile domains do not overlap")
    return lo, hi


def _reduced_potential(config):
    """Potential divided by mode-1's u0.

    Rescaling all drive powers by a common factor leaves this function
    bit-identical, so minimizer brackets (and hence x0, x_r, d) do not move
    when only the power changes.
    """
    w = [m.u0 / config.modes[0].u0 for m in config.modes]

    def u(x):
        acc = 0.0
        for wi, m in zip(w, config.modes):
            acc = acc - wi * np.arctan(m.eta * m.profile.value(x)
                                       + m.detuning_tilde)
        return acc

    return u


def _golden_min(fun, a, b, tol=_GOLDEN_TOL):
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = fun(c), fun(d)
    while (b - a) > tol:
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = fun(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = fun(d)
    return 0.5 * (a + b)


def resonant_positions(mode):
    """All roots of eta*f(x) + dtil = 0 in the domain.

    Returns ``(positions, degenerate)``.  ``degenerate`` is True for the
    grazing case dtil = -eta where the resonance touches only the profile
    maxima (double roots).  Empty list when the laser is blue of every
    shifted resonance (dtil > 0) or red of the full shift (dtil < -eta).
    """
    eta, dtil = mode.eta, mode.detuning_tilde
    prof = mode.profile
    if eta == 0.0:
        return [], False
    if dtil > 0.0 or dtil < -eta:
        return [], False
    if abs(dtil + eta) < 1e-12 * max(1.0, eta):
        # resonance only where f = 1: locate profile maxima
        xs = np.linspace(prof.x_lo, prof.x_hi, SCAN_POINTS + 1)
        f = np.asarray(prof.value(xs))
        idx = np.nonzero(f > 1.0 - 1e-9)[0]
        roots = []
        for i in idx:
            a = xs[max(i - 1, 0)]
            b = xs[min(i + 1, len(xs) - 1)]
            roots.append(_golden_min(lambda x: -prof.value(x), a, b))
        return _dedupe(roots), True

    def g(x):
        return eta * prof.value(x) + dtil

    xs = np.linspace(prof.x_lo, prof.x_hi, SCAN_POINTS + 1)
    gv = np.asarray(g(xs))
    roots = []
    sign_change = np.nonzero(gv[:-1] * gv[1:] < 0.0)[0]
    for i in sign_change:
        r = brentq(g, xs[i], xs[i + 1], xtol=1e-14)
        # Newton polish on the analytic derivative toward |g| < 1e-12
        for _ in range(3):
            dg = eta * prof.deriv(r)
            if dg == 0.0:
                break
            r = min(max(r - g(r) / dg, prof.x_lo), prof.x_hi)
        roots.append(r)
    exact = np.nonzero(gv == 0.0)[0]
    roots.extend(xs[i] for i in exact)
    return _dedupe(roots), False


def _dedupe(roots, tol=1e-9):
    out = []
    for r in sorted(roots):
        if not out or abs(r - out[-1]) > tol:
            out.append(float(r))
    return out


@dataclass(frozen=True)
class TrapMetrics:
    """Depth, geometry and stiffness of the trap for a given kinetic energy."""

    depth: float
    minimum_position: float
    resonant_positions: tuple    # one tuple of x_r per mode
    degenerate_resonance: bool
    wall_separation: float       # |x_r2 - x_r1| of the walls bracketing x0
    turning_points: tuple        # (x_t1, x_t2) for the given e_kin
    confinement: float           # x_t2 - x_t1
    spring_numeric: float
    spring_analytic_terms: tuple  # per mode: (back-action term, tweezer term)
    e_kin: float


def trap_metrics(config: TrapConfiguration, e_kin: float,
                 window: tuple | None = None) -> TrapMetrics:
    """Locate the trap, measure its depth and confinement at ``e_kin``.

    ``window`` restricts the search to a sub-interval of the domain (used for
    multi-well two-mode landscapes); depth is always measured to the lowest
    enclosing potential maximum inside the searched interval.

    Raises ``NumericsError('unbound: ...')`` when ``e_kin`` meets or exceeds
    the escape barrier and ``NumericsError('no trap ...')`` when no interior
    minimum exists.
    """
    if e_kin < 0:
        raise ValidationError("e_kin must be nonnegative")
    lo, hi = _domain(config)
    if window is not None:
        lo, hi = max(lo, window[0]), min(hi, window[1])
        if not hi > lo:
            raise ValidationError("window does not intersect the domain")
    u_red = _reduced_potential(config)
    xs = np.linspace(lo, hi, SCAN_POINTS + 1)
    uv = np.asarray([u_red(x) for x in xs])
    i_min = int(np.argmin(uv))
    if i_min == 0 or i_min == len(xs) - 1:
        raise NumericsError("no trap: potential has no interior minimum")
    x0 = _golden_min(u_red, xs[i_min - 1], xs[i_min + 1])

    x_left = _enclosing_max(u_red, xs, uv, i_min, direction=-1)
    x_right = _enclosing_max(u_red, xs, uv, i_min, direction=+1)
    u0_scale = config.modes[0].u0
    u_min = u_red(x0) * u0_scale
    barrier = min(u_red(x_left), u_red(x_right)) * u0_scale
    depth = barrier - u_min
    if depth < 0:
        raise NumericsError("no trap: found maximum below the minimum")

    if e_kin >= depth:
        raise NumericsError(
            f"unbound: e_kin exceeds trap depth by {e_kin - depth:.6g}")

    if e_kin == 0.0:
        x_t1 = x_t2 = x0
    else:
        target = (u_min + e_kin) / u0_scale
        x_t1 = brentq(lambda x: u_red(x) - target, x_left, x0, xtol=1e-14)
        x_t2 = brentq(lambda x: u_red(x) - target, x0, x_right, xtol=1e-14)

    per_mode_res = []
    degenerate = False
    for m in config.modes:
        r, dg = resonant_positions(m)
        per_mode_res.append(tuple(r))
        degenerate = degenerate or dg
    all_res = sorted(r for rs in per_mode_res for r in rs)
    left_walls = [r for r in all_res if r < x0]
    right_walls = [r for r in all_res if r > x0]
    if left_walls and right_walls:
        d_wall = right_walls[0] - left_walls[-1]
    else:
        d_wall = float("nan")

    k_num = spring_constant_numeric(config, x0)
    terms = tuple(_spring_terms(m, x0) for m in config.modes)
    return TrapMetrics(depth=depth, minimum_position=x0,
                       resonant_positions=tuple(per_mode_res),
                       degenerate_resonance=degenerate,
                       wall_separation=d_wall,
                       turning_points=(x_t1, x_t2),
                       confinement=x_t2 - x_t1,
                       spring_numeric=k_num,
                       spring_analytic_terms=terms,
                       e_kin=e_kin)


def _enclosing_max(u_red, xs, uv, i_min, direction):
    """Walk the scan grid from the minimum to the first local max (or edge)."""
    i = i_min
    last = len(xs) - 1
    while 0 < i < last:
        j = i + direction
        if uv[j] < uv[i]:
            break  # started descending: xs[i] brackets a local maximum
        i = j
    if i == 0 or i == last:
        return xs[i]
    a, b = xs[i - 1], xs[i + 1]
    return _golden_min(lambda x: -u_red(x), a, b)


def spring_constant_numeric(config: TrapConfiguration, x0: float) -> float:
    """Trap curvature U''(x0) via Richardson-refined 5-point differences.

    Raises ``NumericsError`` when the curvature is negative (not a minimum).
    """
    def d2(h):
        um2, um1, u1, u2 = (potential(config, x0 + k * h)
                            for k in (-2, -1, 1, 2))
        u_0 = potential(config, x0)
        return (-um2 + 16 * um1 - 30 * u_0 + 16 * u1 - u2) / (12 * h * h)

    h = 1e-4
    k = (16.0 * d2(h / 2) - d2(h)) / 15.0
    if k < 0:
        raise NumericsError("not a minimum: negative curvature at x0")
    return k


def spring_constant_assembled(config: TrapConfiguration, x0: float) -> float:
    """k_opt assembled from the photon-number form.

    k = sum_i [ n_i'(x0) * wc_i'(x0) + n_i(x0) * wc_i''(x0) ], hbar = 1, with
    wc_i' = -(kappa_i/2) eta_i f_i'.  Exact (no finite differences).
    """
    total = 0.0
    for m in config.modes:
        fx = m.profile.value(x0)
        fp = m.profile.deriv(x0)
        fpp = m.profile.second_deriv(x0)
        g = m.eta * fx + m.detuning_tilde
        L = 1.0 / (1.0 + g * g)
        Lp = -2.0 * g * m.eta * fp * L * L
        total += -m.u0 * m.eta * (Lp * fp + L * fpp)
    return total


def _spring_terms(mode, x0):
    """Eq. 11 split at x0: (photon-number change term, mode-curvature term)."""
    fx = mode.profile.value(x0)
    fp = mode.profile.deriv(x0)
    fpp = mode.profile.second_deriv(x0)
    g = mode.eta * fx + mode.detuning_tilde
    L = 1.0 / (1.0 + g * g)
    Lp = -2.0 * g * mode.eta * fp * L * L
    return (-mode.u0 * mode.eta * Lp * fp, -mode.u0 * mode.eta * L * fpp)


def spring_constant_analytic(mode, x0: float, x_r: float,
                             intensity_j: float) -> tuple:
    """Optimized-spring bracket form for one mode.

    ``intensity_j`` is the alpha-scaled experienced intensity of the mode,
    J = <I> * alpha / (c * eps0), in internal energy units.  Returns
    ``(k_total, back_action_term, tweezer_term)`` with

        k = (J / f(x0)) * [ 2 r/(1+r^2) * eta * f'(x_r)^2 - f''(x0) ],
        r = |eta * f'(x_r) * (x_r - x0)|.

    The back-action term is maximal at r = 1; at eta -> 0 only the tweezer
    term ``-f''(x0)`` survives.
    """
    fx0 = mode.profile.value(x0)
    if fx0 == 0.0:
        raise NumericsError("singular configuration: f(x0) = 0")
    fp_r = mode.profile.deriv(x_r)
    r = abs(mode.eta * fp_r * (x_r - x0))
    pref = intensity_j / fx0
    ba = pref * (2.0 * r / (1.0 + r * r)) * mode.eta * fp_r ** 2
    tw = pref * (-mode.profile.second_deriv(x0))
    return ba + tw, ba, tw


def mode_intensity_j(mode, x):
    """Alpha-scaled local intensity J(x) = eta * u0 * L(x) * f(x).

    J = I_local * alpha/(c*eps0); in the tweezer limit its trap-average
    equals the tweezer depth (Appendix identity), which fixes the scale.
    """
    return mode.eta * mode.u0 * lorentzian(mode, x) * mode.profile.value(x)
