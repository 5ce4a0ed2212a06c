"""Back-action parameter, frequency shift, and particle-scattering corrections.

The scattering-loss helpers follow the small-particle convention
``alpha ~ eps0 * V`` (the exact sphere polarizability is available separately
via :func:`polarizability_sphere`), with the mode volume written as
``V_m = nu * (lambda/2)^3``.  The dimensionless prefactor symbol in the
scattering bound is read as the polarizability ratio alpha/(eps0*V), equal to
1 under this convention; see the package README for the provenance note.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .model import NumericsError, ValidationError


@dataclass(frozen=True)
class ScatteringModel:
    """Empty-cavity quality factor, mode-volume factor nu, particle size kr."""

    Q_empty: float
    nu: float = 1.0
    kr: float = 0.1

    def __post_init__(self):
        if self.Q_empty <= 0:
            raise ValidationError("Q_empty must be positive")
        if self.nu <= 0:
            raise ValidationError("nu must be positive")
        if self.kr < 0:
            raise ValidationError("kr must be nonnegative")


def polarizability_sphere(n_ref: float, volume: float = 1.0) -> float:
    """Dielectric-sphere polarizability 3*eps0*V*(n^2-1)/(n^2+2), eps0 = 1.

    With ``volume = 1`` this is the ratio alpha/(eps0*V).  A vacuum particle
    (n = 1) has no response; the ratio saturates at 3 for n -> infinity.
    """
    if n_ref <= 0:
        raise ValidationError("refractive index must be positive")
    if volume <= 0:
        raise ValidationError("volume must be positive")
    n2 = n_ref * n_ref
    return 3.0 * volume * (n2 - 1.0) / (n2 + 2.0)


def frequency_shift(mode, x) -> float:
    """Particle-induced cavity shift in units of kappa/2: 2*dwc/kappa = -eta*f(x)."""
    return -mode.eta * mode.profile.value(x)


def back_action_parameter(Q: float, alpha_ratio: float) -> float:
    """eta = alpha/(eps0*V_m) * Q."""
    if Q <= 0:
        raise ValidationError("Q must be positive")
    if alpha_ratio < 0:
        raise ValidationError("alpha_ratio must be nonnegative")
    return alpha_ratio * Q


def scattering_rate(sm: ScatteringModel, f_at_x: float) -> float:
    """Particle scattering loss relative to the laser frequency.

    kappa_scat/omega_L = (8/(27*pi^2*nu)) * (kr)^6 * f(x), the Rayleigh
    cross-section form sigma_scat*c*f/V_m under alpha ~ eps0*V.  Vanishes at
    profile nodes and falls off as (kr)^6.
    """
    if not 0.0 <= f_at_x <= 1.0 + 1e-12:
        raise ValidationError("f_at_x must lie in [0, 1]")
    return (8.0 / (27.0 * math.pi ** 2 * sm.nu)) * sm.kr ** 6 * f_at_x


def scattering_rate_from_cross_section(sm: ScatteringModel, f_at_x: float) -> float:
    """Same quantity assembled from sigma_scat*c*f/V_m with raw constants.

    sigma_scat = k^4 |alpha|^2/(6*pi*eps0^2) with alpha = eps0*V,
    V = (4*pi/3) r^3, V_m = nu*(pi/k)^3; the result is expressed relative to
    omega_L = c*k.  Agrees with :func:`scattering_rate` identically and
    serves as its independent cross-check.
    """
    if not 0.0 <= f_at_x <= 1.0 + 1e-12:
        raise ValidationError("f_at_x must lie in [0, 1]")
    # work with k = 1: sigma*c*f/Vm / omega_L = sigma*f/(Vm*k)
    volume = (4.0 * math.pi / 3.0) * sm.kr ** 3
    sigma = volume ** 2 / (6.0 * math.pi)
    v_m = sm.nu * math.pi ** 3
    return sigma * f_at_x / v_m


def eta_with_scattering(sm: ScatteringModel) -> float:
    """Back-action parameter including the particle's own scattering loss.

    eta(kr) = (4/(3*pi^2)) * (Q/nu) * (kr)^3
              / (1 + (Q/nu) * (8/(27*pi^2)) * (kr)^6)

    Increasing in kr up to a single interior optimum, decreasing after: the
    bigger particle shifts the resonance more but also spoils the linewidth.
    """
    a = sm.Q_empty / sm.nu
    kr3 = sm.kr ** 3
    return (4.0 / (3.0 * math.pi ** 2)) * a * kr3 \
        / (1.0 + a * (8.0 / (27.0 * math.pi ** 2)) * kr3 ** 2)


def eta_optimum(Q: float, nu: float = 1.0) -> tuple:
    """Closed-form optimum of :func:`eta_with_scattering`.

    Returns ``(kr_opt, eta_max)`` with kr_opt = (27*pi^2*nu/(8*Q))^(1/6) and
    eta_max = sqrt(3*Q/(2*pi^2*nu)); eta_max scales as sqrt(Q).
    """
    if Q <= 0 or nu <= 0:
        raise ValidationError("Q and nu must be positive")
    kr_opt = (27.0 * math.pi ** 2 * nu / (8.0 * Q)) ** (1.0 / 6.0)
    eta_max = math.sqrt(3.0 * Q / (2.0 * math.pi ** 2 * nu))
    return kr_opt, eta_max


def eta_estimate(config) -> float:
    """Scattering-limited back-action parameter from the configuration's SI
    block (quality factor, mode-volume factor) and the particle size kr.

    The only place SI-side quantities enter; everything else is dimensionless.
    """
    si = config.units.si
    if si is None or not (si.Q > 0) or not (si.nu > 0):
        raise ValidationError("eta estimation needs units.si with Q and nu")
    return eta_with_scattering(ScatteringModel(si.Q, si.nu, config.particle.kr))


def eta_maximum_numeric(Q: float, nu: float = 1.0) -> tuple:
    """Derivative-free numeric maximization of eta(kr) on (0, 1).

    Golden-section search plus one parabolic-vertex polish (the bare golden
    section is rounding-limited to ~sqrt(eps) in position on the flat
    maximum).  Returns ``(kr, eta)``.
    """
    from .trap import _golden_min

    def neg(kr):
        return -eta_with_scattering(ScatteringModel(Q, nu, kr))

    kr = _golden_min(neg, 1e-6, 1.0 - 1e-6)
    h = 1e-6
    f0, fm, fp = neg(kr), neg(kr - h), neg(kr + h)
    denom = fm - 2.0 * f0 + fp
    if denom > 0:
        kr = kr - 0.5 * h * (fp - fm) / denom
    return kr, eta_with_scattering(ScatteringModel(Q, nu, kr))


def harmonic_spring_with_scattering(mode, sm: ScatteringModel, x0: float,
                                    x_r: float, intensity_j: float) -> tuple:
    """Optimized spring constant including the position-dependent scattering
    term.

    k = (J / f(x0)) * [ 2r/(1+r^2) * eta
                        + (2*dkappa_s(x0)/(kappa*f(x0))) / (1+r^2) ] * f'(x_r)^2

    with r = |eta * f'(x_r) * (x_r - x0)| and dkappa_s the particle scattering
    rate at x0 relative to the total linewidth.  Returns ``(k, shift_term,
    scatter_term)``.  With kappa_scat = 0 and r = 1 this reduces to the
    back-action term of the optimized spring.  The scattering term survives
    alone at r = 0 and is smaller by ~(kr)^3 at r = 1.
    """
    fx0 = mode.profile.value(x0)
    if fx0 == 0.0:
        raise NumericsError("singular configuration: f(x0) = 0")
    fp_r = mode.profile.deriv(x_r)
    r = abs(mode.eta * fp_r * (x_r - x0))
    if not math.isfinite(r):
        raise ValidationError("r_i must be finite")
    # kappa_scat/kappa = Q * (kappa_scat/omega_L) at the trap position
    dk_over_kappa = sm.Q_empty * scattering_rate(sm, fx0)
    pref = intensity_j / fx0 * fp_r ** 2
    shift_term = pref * (2.0 * r / (1.0 + r * r)) * mode.eta
    scatter_term = pref * (2.0 * dk_over_kappa / fx0) / (1.0 + r * r)
    return shift_term + scatter_term, shift_term, scatter_term


def eta_scan(q_values, nu: float, kr_min: float, kr_max: float,
             points: int) -> dict:
    """eta(kr) curves per quality factor (the data behind the size-scan plots).

    Returns ``{"kr": array, "eta": {Q: array}}``.
    """
    if points < 2:
        raise ValidationError("points must be >= 2")
    kr = np.linspace(kr_min, kr_max, points)
    curves = {}
    for q in q_values:
        curves[q] = np.array([eta_with_scattering(ScatteringModel(q, nu, k))
                              for k in kr])
    return {"kr": kr, "eta": curves}
