"""Domain types, the dimensionless unit system, and configuration validation.

Internal unit convention
------------------------
All physics runs in dimensionless internal units:

* ``hbar = 1``, optical wavevector ``k = 1`` (positions are in units of 1/k),
  particle mass ``m = 1`` unless overridden in :class:`ParticleSpec`.
* The energy unit is ``U0 = 2*hbar*E0^2*kappa_ex/kappa`` of the first cavity
  mode, so the saturated trap depth of a deeply driven mode is exactly
  ``pi * U0``.
* The time unit is ``tau0 = 1/omega0`` with ``omega0 = sqrt(U0*k^2/m)``.

SI quantities (wavelength, quality factor, mode-volume factor) enter only the
back-action-parameter estimation helpers in :mod:`siba.cavity` through the
optional ``si`` block of :class:`UnitSystem`.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field, replace

import numpy as np

PROFILE_FUNDAMENTAL = "fundamental"      # f(x) = cos^2(kx)
PROFILE_SECOND_HARMONIC = "second_harmonic"  # f(x) = sin^2(2kx)
PROFILE_TABULATED = "tabulated"

_PROFILE_KIND_CODES = {PROFILE_FUNDAMENTAL: 0, PROFILE_SECOND_HARMONIC: 1,
                       PROFILE_TABULATED: 2}


class ValidationError(ValueError):
    """A configuration field violates an invariant. Message names the field."""


class NumericsError(RuntimeError):
    """A numerical operation failed (integration blow-up, unbound motion, ...)."""


@dataclass(frozen=True)
class ModeProfile:
    """Dimensionless cavity intensity profile f(x), normalized to max 1.

    Parameters
    ----------
    kind : str
        One of ``fundamental`` (cos^2(kx)), ``second_harmonic`` (sin^2(2kx))
        or ``tabulated``.
    x_lo, x_hi : float
        Evaluation domain in units of 1/k.
    x_samples, f_samples : tuple of float, optional
        Uniform-grid samples for a tabulated profile.  Interpolated with a
        clamped cubic spline so f' is continuous.
    """

    kind: str = PROFILE_FUNDAMENTAL
    x_lo: float = -math.pi / 2
    x_hi: float = math.pi / 2
    x_samples: tuple = ()
    f_samples: tuple = ()

    def __post_init__(self):
        if self.kind not in _PROFILE_KIND_CODES:
            raise ValidationError(f"profile.kind: unknown kind {self.kind!r}")
        if not (self.x_hi > self.x_lo):
            raise ValidationError("profile domain: x_hi must exceed x_lo")
        if self.kind == PROFILE_TABULATED:
            x = np.asarray(self.x_samples, dtype=float)
            f = np.asarray(self.f_samples, dtype=float)
            if x.size < 4 or x.size != f.size:
                raise ValidationError(
                    "profile samples: tabulated profile needs >= 4 matching samples")
            dx = np.diff(x)
            if not np.allclose(dx, dx[0], rtol=1e-9, atol=0.0) or dx[0] <= 0:
                raise ValidationError("profile samples: grid must be uniform increasing")
            if f.min() < -1e-12 or f.max() > 1.0 + 1e-9:
                raise ValidationError("profile not normalized: f must lie in [0, 1]")
            if abs(f.max() - 1.0) > 1e-9:
                raise ValidationError(
                    "profile not normalized: max f must equal 1 within 1e-9")
            if not np.all(np.isfinite(f)):
                raise ValidationError("profile samples: non-finite value")

    @property
    def kind_code(self) -> int:
        return _PROFILE_KIND_CODES[self.kind]

    def _spline(self):
        # Clamped boundary derivatives keep f' continuous and bounded.
        from scipy.interpolate import CubicSpline
        return CubicSpline(np.asarray(self.x_samples, dtype=float),
                           np.asarray(self.f_samples, dtype=float),
                           bc_type="clamped")

    def value(self, x):
        """f(x); raises outside the domain."""
        self._check_domain(x)
        if self.kind == PROFILE_FUNDAMENTAL:
            return np.cos(x) ** 2
        if self.kind == PROFILE_SECOND_HARMONIC:
            return np.sin(2.0 * x) ** 2
        return self._spline()(x)

    def deriv(self, x):
        """f'(x)."""
        self._check_domain(x)
        if self.kind == PROFILE_FUNDAMENTAL:
            return -np.sin(2.0 * x)
        if self.kind == PROFILE_SECOND_HARMONIC:
            return 2.0 * np.sin(4.0 * x)
        return self._spline()(x, 1)

    def second_deriv(self, x):
        """f''(x)."""
        self._check_domain(x)
        if self.kind == PROFILE_FUNDAMENTAL:
            return -2.0 * np.cos(2.0 * x)
        if self.kind == PROFILE_SECOND_HARMONIC:
            return 8.0 * np.cos(4.0 * x)
        return self._spline()(x, 2)

    def _check_domain(self, x):
        x = np.asarray(x)
        tol = 1e-12 * max(1.0, abs(self.x_hi - self.x_lo))
        if np.any(x < self.x_lo - tol) or np.any(x > self.x_hi + tol):
            raise ValidationError(
                f"position outside profile domain [{self.x_lo}, {self.x_hi}]")


@dataclass(frozen=True)
class CavityMode:
    """One driven optical mode of the resonator.

    ``kappa_ex``/``kappa_in`` are the external and intrinsic linewidths,
    ``drive_flux_sq`` is the photon number flux E0^2 of the drive,
    ``detuning_tilde`` is 2(omega_L - omega_c)/kappa and ``eta`` the
    back-action parameter (cavity-shift in half linewidths from node to
    antinode).
    """

    profile: ModeProfile = field(default_factory=ModeProfile)
    kappa_ex: float = 0.5
    kappa_in: float = 0.5
    drive_flux_sq: float = 1.0
    detuning_tilde: float = 0.0
    eta: float = 0.0

    def __post_init__(self):
        if self.kappa_ex < 0:
            raise ValidationError("kappa_ex must be nonnegative")
        if self.kappa_in < 0:
            raise ValidationError("kappa_in must be nonnegative")
        if self.kappa <= 0:
            raise ValidationError("kappa must be positive")
        if self.eta < 0:
            raise ValidationError("eta must be nonnegative")
        if self.drive_flux_sq < 0:
            raise ValidationError("drive_flux_sq must be nonnegative")

    @property
    def kappa(self) -> float:
        return self.kappa_ex + self.kappa_in

    @property
    def u0(self) -> float:
        """Mode energy scale 2*hbar*E0^2*kappa_ex/kappa (hbar = 1)."""
        return 2.0 * self.drive_flux_sq * self.kappa_ex / self.kappa

    @property
    def n_peak(self) -> float:
        """On-resonance intra-cavity photon number 4*E0^2*kappa_ex/kappa^2."""
        return 4.0 * self.drive_flux_sq * self.kappa_ex / self.kappa ** 2


@dataclass(frozen=True)
class SIBlock:
    """Optional SI quantities for back-action-parameter estimation."""

    wavelength_m: float = float("nan")
    Q: float = float("nan")
    nu: float = float("nan")


@dataclass(frozen=True)
class ParticleSpec:
    """Trapped particle: polarizability ratio alpha/(eps0*V_m), mass, size."""

    alpha_ratio: float = 1e-4
    mass: float = 1.0
    kr: float = 0.1
    refractive_index: float = 2.0

    def __post_init__(self):
        if self.alpha_ratio <= 0:
            raise ValidationError("alpha_ratio must be positive")
        if self.mass <= 0:
            raise ValidationError("mass must be positive")
        if not (0.0 <= self.kr < 1.0):
            raise ValidationError("kr must lie in [0, 1) (sub-wavelength regime)")


@dataclass(frozen=True)
class UnitSystem:
    """Internal dimensionless units plus derived scales.

    ``u0`` is the system energy unit (mode 1's 2*hbar*E0^2*kappa_ex/kappa),
    ``omega0 = sqrt(u0*k^2/m)`` and ``tau0 = 1/omega0``.  These are filled by
    :func:`validate_configuration`.
    """

    convention: str = "hbar=k=m=1"
    u0: float = float("nan")
    omega0: float = float("nan")
    tau0: float = float("nan")
    si: SIBlock | None = None

    def __post_init__(self):
        for name in ("u0", "omega0", "tau0"):
            v = getattr(self, name)
            if not math.isnan(v) and (not math.isfinite(v) or v <= 0):
                raise ValidationError(f"{name} must be finite and positive")


@dataclass(frozen=True)
class TrapConfiguration:
    """One or two cavity modes plus the trapped particle and unit system."""

    modes: tuple
    particle: ParticleSpec = field(default_factory=ParticleSpec)
    units: UnitSystem = field(default_factory=UnitSystem)

    def __post_init__(self):
        object.__setattr__(self, "modes", tuple(self.modes))


def validate_configuration(config: TrapConfiguration) -> TrapConfiguration:
    """Validate invariants and fill derived unit scales.

    Returns a normalized configuration (idempotent: validating twice yields
    the same object values).  Raises :class:`ValidationError` naming the
    offending field.
    """
    if len(config.modes) == 0:
        raise ValidationError("modes: mode list must not be empty")
    if len(config.modes) > 2:
        raise ValidationError("modes: at most two modes are supported")
    for mode in config.modes:
        if not isinstance(mode, CavityMode):
            raise ValidationError("modes: entries must be CavityMode")
        _check_profile_normalized(mode.profile)
    if len(config.modes) == 2:
        k0, k1 = (m.profile.kind for m in config.modes)
        if k0 == k1 and k0 != PROFILE_TABULATED:
            raise ValidationError(
                "modes: two-mode configurations need profiles of distinct "
                "periodicity (first and second harmonic)")
    # ParticleSpec / CavityMode invariants are enforced in __post_init__.
    u0 = config.modes[0].u0
    if u0 <= 0:
        raise ValidationError("drive_flux_sq/kappa_ex: mode 1 energy unit U0 "
                              "must be positive")
    omega0 = math.sqrt(u0 / config.particle.mass)
    units = replace(config.units, u0=u0, omega0=omega0, tau0=1.0 / omega0)
    return replace(config, units=units)


def _check_profile_normalized(profile: ModeProfile):
    """0 <= f <= 1 with max 1 within 1e-9 (dense grid for tabulated).

    Tabulated profiles get a small extra allowance (1e-6) for cubic-spline
    overshoot between samples; the samples themselves are checked strictly.
    """
    slack = 1e-6 if profile.kind == PROFILE_TABULATED else 1e-9
    xs = np.linspace(profile.x_lo, profile.x_hi, 4097)
    f = np.asarray(profile.value(xs))
    if f.min() < -slack or f.max() > 1.0 + slack:
        raise ValidationError("profile not normalized: f must lie in [0, 1]")
    if abs(f.max() - 1.0) > 1e-9 and profile.kind != PROFILE_TABULATED:
        raise ValidationError("profile not normalized: max f must equal 1")


# ---------------------------------------------------------------------------
# JSON configuration files
# ---------------------------------------------------------------------------

def config_from_dict(doc: dict) -> TrapConfiguration:
    """Build and validate a configuration from a JSON-style dict.

    Top-level keys: ``units`` (optional), ``particle`` (optional), ``modes``
    (required list).  Field names match the dataclass fields verbatim; all
    numbers are dimensionless internal units except under ``units.si``.
    """
    if "modes" not in doc or not isinstance(doc["modes"], list):
        raise ValidationError("modes: configuration needs a 'modes' list")
    modes = []
    for entry in doc["modes"]:
        prof_doc = entry.get("profile", {})
        profile = ModeProfile(
            kind=prof_doc.get("kind", PROFILE_FUNDAMENTAL),
            x_lo=float(prof_doc.get("x_lo", -math.pi / 2)),
            x_hi=float(prof_doc.get("x_hi", math.pi / 2)),
            x_samples=tuple(prof_doc.get("x_samples", ())),
            f_samples=tuple(prof_doc.get("f_samples", ())),
        )
        modes.append(CavityMode(
            profile=profile,
            kappa_ex=float(entry.get("kappa_ex", 0.5)),
            kappa_in=float(entry.get("kappa_in", 0.5)),
            drive_flux_sq=float(entry.get("drive_flux_sq", 1.0)),
            detuning_tilde=float(entry.get("detuning_tilde", 0.0)),
            eta=float(entry.get("eta", 0.0)),
        ))
    part_doc = doc.get("particle", {})
    particle = ParticleSpec(
        alpha_ratio=float(part_doc.get("alpha_ratio", 1e-4)),
        mass=float(part_doc.get("mass", 1.0)),
        kr=float(part_doc.get("kr", 0.1)),
        refractive_index=float(part_doc.get("refractive_index", 2.0)),
    )
    units_doc = doc.get("units", {})
    si = None
    if "si" in units_doc:
        si_doc = units_doc["si"]
        si = SIBlock(wavelength_m=float(si_doc.get("wavelength_m", float("nan"))),
                     Q=float(si_doc.get("Q", float("nan"))),
                     nu=float(si_doc.get("nu", float("nan"))))
    units = UnitSystem(convention=units_doc.get("convention", "hbar=k=m=1"), si=si)
    return validate_configuration(
        TrapConfiguration(modes=tuple(modes), particle=particle, units=units))


def config_to_dict(config: TrapConfiguration) -> dict:
    doc = {"units": {"convention": config.units.convention},
           "particle": {"alpha_ratio": config.particle.alpha_ratio,
                        "mass": config.particle.mass,
                        "kr": config.particle.kr,
                        "refractive_index": config.particle.refractive_index},
           "modes": []}
    if config.units.si is not None:
        doc["units"]["si"] = {"wavelength_m": config.units.si.wavelength_m,
                              "Q": config.units.si.Q, "nu": config.units.si.nu}
    for m in config.modes:
        entry = {"profile": {"kind": m.profile.kind, "x_lo": m.profile.x_lo,
                             "x_hi": m.profile.x_hi},
                 "kappa_ex": m.kappa_ex, "kappa_in": m.kappa_in,
                 "drive_flux_sq": m.drive_flux_sq,
                 "detuning_tilde": m.detuning_tilde, "eta": m.eta}
        if m.profile.kind == PROFILE_TABULATED:
            entry["profile"]["x_samples"] = list(m.profile.x_samples)
            entry["profile"]["f_samples"] = list(m.profile.f_samples)
        doc["modes"].append(entry)
    return doc


def load_config(path) -> TrapConfiguration:
    """Load and validate a JSON configuration file."""
    with open(path, "r", encoding="utf-8") as fh:
        return config_from_dict(json.load(fh))


def config_hash(config: TrapConfiguration) -> str:
    """sha256 of the canonical JSON form, for provenance records."""
    blob = json.dumps(config_to_dict(config), sort_keys=True).encode()
    return hashlib.sha256(blob).hexdigest()
