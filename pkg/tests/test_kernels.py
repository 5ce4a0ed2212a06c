"""The jitted kernels and the plain-Python fallback produce identical paths."""

import math
import os
import subprocess
import sys

import numpy as np
import pytest

from siba import experiments, kernels


def test_verlet_jit_matches_python():
    cfg = experiments.resonant_config(20.0, math.pi / 4)
    args = kernels.mode_arrays(cfg)
    xs_a, ps_a, f_a = kernels.verlet(0.0, 0.9, 1.0, 1e-3, 5000, 1, *args)
    xs_b, ps_b, f_b = kernels.verlet_py(0.0, 0.9, 1.0, 1e-3, 5000, 1, *args)
    assert f_a == f_b == -1
    np.testing.assert_array_equal(xs_a, xs_b)
    np.testing.assert_array_equal(ps_a, ps_b)


def test_rk4_jit_matches_python():
    cfg = experiments.two_mode_config(50.0, -25.0, -30.0)
    kinds, eta, dtil, u0 = kernels.mode_arrays(cfg)
    kappa = np.array([800.0, 800.0])
    drive = np.sqrt(u0 * kappa / 2.0)
    br0 = np.array([0.01, 0.02])
    bi0 = np.array([0.0, -0.01])
    out_a = kernels.rk4_full(0.5, 0.3, br0, bi0, 1.0, 1e-4, 4000, 4,
                             kinds, eta, dtil, u0, kappa, drive)
    out_b = kernels.rk4_full_py(0.5, 0.3, br0, bi0, 1.0, 1e-4, 4000, 4,
                                kinds, eta, dtil, u0, kappa, drive)
    for a, b in zip(out_a[:4], out_b[:4]):
        np.testing.assert_array_equal(a, b)


def test_force_kernel_matches_module():
    from siba import trap
    cfg = experiments.two_mode_config(30.0, -20.0, -12.0)
    args = kernels.mode_arrays(cfg)
    for x in (-0.8, 0.1, 0.6):
        assert kernels.force_scalar(x, *args) \
            == pytest.approx(trap.force(cfg, x), rel=1e-14)


def test_mode_arrays_rejects_tabulated():
    from siba.model import ModeProfile, CavityMode, TrapConfiguration
    from siba.model import validate_configuration
    x = np.linspace(-1.0, 1.0, 65)
    f = np.cos(x) ** 2
    f /= f.max()
    prof = ModeProfile(kind="tabulated", x_lo=-1.0, x_hi=1.0,
                       x_samples=tuple(x), f_samples=tuple(f))
    cfg = validate_configuration(TrapConfiguration(
        modes=(CavityMode(profile=prof, eta=1.0),)))
    with pytest.raises(ValueError, match="analytic"):
        kernels.mode_arrays(cfg)


def test_env_flag_selects_fallback():
    # a subprocess with SIBA_NUMBA=0 must produce the identical trajectory
    code = (
        "import math, numpy as np\n"
        "from siba import experiments, kernels\n"
        "assert not kernels.USE_NUMBA\n"
        "cfg = experiments.resonant_config(20.0, math.pi / 4)\n"
        "xs, ps, f = kernels.verlet(0.0, 0.9, 1.0, 1e-3, 2000, 1,\n"
        "                           *kernels.mode_arrays(cfg))\n"
        "print(repr(float(xs[-1])), repr(float(ps[-1])))\n"
    )
    env = dict(os.environ, SIBA_NUMBA="0")
    out = subprocess.run([sys.executable, "-c", code], env=env,
                         capture_output=True, text=True, check=True)
    x_last, p_last = (float(tok) for tok in out.stdout.split())
    cfg = experiments.resonant_config(20.0, math.pi / 4)
    xs, ps, _ = kernels.verlet(0.0, 0.9, 1.0, 1e-3, 2000, 1,
                               *kernels.mode_arrays(cfg))
    assert x_last == xs[-1]
    assert p_last == ps[-1]
