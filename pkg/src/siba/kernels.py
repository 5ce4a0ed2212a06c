"""Hot integration kernels: numba-jitted with a pure-Python/numpy fallback.

The fixed-step integrators dominate runtime (millions of sequential scalar
steps), so they are compiled with ``numba.njit`` when available.  Setting the
environment variable ``SIBA_NUMBA=0`` selects the uncompiled fallback path;
the two paths execute the same statements and produce identical trajectories.
``benchmarks/bench_kernels.py`` compares both.

Only the analytic profiles (cos^2, sin^2(2x)) are supported inside the
kernels; tabulated profiles integrate through the generic callable path in
:mod:`siba.dynamics`.
"""

from __future__ import annotations

import math
import os

import numpy as np

USE_NUMBA = os.environ.get("SIBA_NUMBA", "1") != "0"
if USE_NUMBA:
    try:
        from numba import njit
    except ImportError:  # pragma: no cover - numba is a declared dependency
        USE_NUMBA = False

KIND_FUNDAMENTAL = 0
KIND_SECOND_HARMONIC = 1


def _profile_value(kind, x):
    if kind == KIND_FUNDAMENTAL:
        c = math.cos(x)
        return c * c
    s = math.sin(2.0 * x)
    return s * s


def _profile_deriv(kind, x):
    if kind == KIND_FUNDAMENTAL:
        return -math.sin(2.0 * x)
    return 2.0 * math.sin(4.0 * x)


def _force(x, kinds, eta, dtil, u0):
    # F(x) = sum_i u0_i * eta_i * f_i'(x) / (1 + (eta_i f_i(x) + dtil_i)^2)
    acc = 0.0
    for i in range(kinds.shape[0]):
        g = eta[i] * _profile_value(kinds[i], x) + dtil[i]
        acc += u0[i] * eta[i] * _profile_deriv(kinds[i], x) / (1.0 + g * g)
    return acc


def _verlet(x0, p0, mass, dt, n_steps, stride, kinds, eta, dtil, u0):
    n_rec = n_steps // stride + 1
    xs = np.empty(n_rec)
    ps = np.empty(n_rec)
    x = x0
    p = p0
    f = _force(x, kinds, eta, dtil, u0)
    xs[0] = x
    ps[0] = p
    j = 1
    for i in range(n_steps):
        p_half = p + 0.5 * dt * f
        x = x + dt * p_half / mass
        f = _force(x, kinds, eta, dtil, u0)
        p = p_half + 0.5 * dt * f
        if not (math.isfinite(x) and math.isfinite(p)):
            return xs[:j], ps[:j], i + 1
        if (i + 1) % stride == 0:
            xs[j] = x
            ps[j] = p
            j += 1
    return xs[:j], ps[:j], -1


def _rk4_full(x0, p0, br0, bi0, mass, dt, n_steps, stride,
              kinds, eta, dtil, u0, kappa, drive):
    """RK4 on the coupled real system (x, p, Re beta_i, Im beta_i).

    dx/dt = p/m
    dp/dt = sum_i |beta_i|^2 * (kappa_i/2) * eta_i * f_i'(x)      (hbar = 1)
    dbeta_i/dt = [i*(kappa_i/2)*(dtil_i + eta_i f_i(x)) - kappa_i/2] beta_i
                 + drive_i                       (drive_i = sqrt(kappa_ex) E0)
    """
    nm = kinds.shape[0]
    n_rec = n_steps // stride + 1
    xs = np.empty(n_rec)
    ps = np.empty(n_rec)
    brs = np.empty((n_rec, nm))
    bis = np.empty((n_rec, nm))
    y = np.empty(2 + 2 * nm)
    y[0] = x0
    y[1] = p0
    for i in range(nm):
        y[2 + i] = br0[i]
        y[2 + nm + i] = bi0[i]
    k1 = np.empty_like(y)
    k2 = np.empty_like(y)
    k3 = np.empty_like(y)
    k4 = np.empty_like(y)
    yt = np.empty_like(y)
    xs[0] = y[0]
    ps[0] = y[1]
    for i in range(nm):
        brs[0, i] = y[2 + i]
        bis[0, i] = y[2 + nm + i]
    j = 1
    for step in range(n_steps):
        _full_rhs(y, k1, kinds, eta, dtil, kappa, drive, mass, nm)
        for q in range(y.shape[0]):
            yt[q] = y[q] + 0.5 * dt * k1[q]
        _full_rhs(yt, k2, kinds, eta, dtil, kappa, drive, mass, nm)
        for q in range(y.shape[0]):
            yt[q] = y[q] + 0.5 * dt * k2[q]
        _full_rhs(yt, k3, kinds, eta, dtil, kappa, drive, mass, nm)
        for q in range(y.shape[0]):
            yt[q] = y[q] + dt * k3[q]
        _full_rhs(yt, k4, kinds, eta, dtil, kappa, drive, mass, nm)
        ok = True
        for q in range(y.shape[0]):
            y[q] = y[q] + (dt / 6.0) * (k1[q] + 2.0 * k2[q] + 2.0 * k3[q] + k4[q])
            ok = ok and math.isfinite(y[q])
        if not ok:
            return xs[:j], ps[:j], brs[:j], bis[:j], step + 1
        if (step + 1) % stride == 0:
            xs[j] = y[0]
            ps[j] = y[1]
            for i in range(nm):
                brs[j, i] = y[2 + i]
                bis[j, i] = y[2 + nm + i]
            j += 1
    return xs[:j], ps[:j], brs[:j], bis[:j], -1


def _full_rhs(y, out, kinds, eta, dtil, kappa, drive, mass, nm):
    x = y[0]
    out[0] = y[1] / mass
    force = 0.0
    for i in range(nm):
        br = y[2 + i]
        bi = y[2 + nm + i]
        n_i = br * br + bi * bi
        force += n_i * 0.5 * kappa[i] * eta[i] * _profile_deriv(kinds[i], x)
        # complex rate: (i*w - kappa/2) * beta + drive, w = (kappa/2)(dtil + eta f)
        w = 0.5 * kappa[i] * (dtil[i] + eta[i] * _profile_value(kinds[i], x))
        out[2 + i] = -0.5 * kappa[i] * br - w * bi + drive[i]
        out[2 + nm + i] = -0.5 * kappa[i] * bi + w * br
    out[1] = force


# Keep both paths importable so the benchmark can compare them directly.
force_scalar_py = _force
verlet_py = _verlet
rk4_full_py = _rk4_full

if USE_NUMBA:
    _profile_value = njit(cache=True, nogil=True)(_profile_value)
    _profile_deriv = njit(cache=True, nogil=True)(_profile_deriv)
    _force = njit(cache=True, nogil=True)(_force)
    _verlet = njit(cache=True, nogil=True)(_verlet)
    _full_rhs = njit(cache=True, nogil=True)(_full_rhs)
    _rk4_full = njit(cache=True, nogil=True)(_rk4_full)

force_scalar = _force
verlet = _verlet
rk4_full = _rk4_full


def mode_arrays(config):
    """Pack per-mode kernel parameters (analytic profiles only)."""
    kinds = np.array([m.profile.kind_code for m in config.modes], dtype=np.int64)
    if np.any(kinds > KIND_SECOND_HARMONIC):
        raise ValueError("kernels support analytic profiles only")
    eta = np.array([m.eta for m in config.modes], dtype=float)
    dtil = np.array([m.detuning_tilde for m in config.modes], dtype=float)
    u0 = np.array([m.u0 for m in config.modes], dtype=float)
    return kinds, eta, dtil, u0
