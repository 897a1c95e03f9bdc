"""Backend parity: the compiled kernels must match the numpy reference
bit for bit, and the VIBCAV_PURE switch must select the right one."""
import os
import subprocess
import sys

import numpy as np
import pytest

from vibcav import _kernels
from vibcav._kernels import _pure
from vibcav.moore import MooreEvaluator
from vibcav.observables import Observables

from _refvals import build_models

fastcore = pytest.importorskip(
    "vibcav._kernels._fastcore",
    reason="compiled backend not built in this checkout")


def _param_sets():
    for key, m in build_models().items():
        ev = MooreEvaluator(m)
        yield key, m, ev


# The two backends evaluate tan/atan/sin/cos through different
# libraries (numpy SIMD vs scalar libm), which disagree by up to 1 ulp
# on rare arguments, so value parity is a tight band rather than
# bitwise.  Branch decisions (the region index) must agree exactly.
# Measured worst deviations on these frozen seeds: 7e-17 (phase),
# 4e-16 (moore), 1.4e-15 (bracket); the bands leave ~1000x margin,
# far below any real branch-constant or sign bug.


def test_phase_map_parity():
    rng = np.random.default_rng(61)
    for key, m, ev in _param_sets():
        tau = rng.uniform(-m.L, 45.0 * m.T, 4096)
        for par, edge, shift in ((ev._fpar, m.L, -2.0 * m.L),
                                 (ev._ipar, -m.L, 2.0 * m.L)):
            a, b, c, d, half, c0, c1, q = par
            ref = np.asarray(_pure.phase_map(tau, m.T, a, b, c, d, half,
                                             c0, c1, q, edge, shift))
            fast = np.asarray(fastcore.phase_map(tau, m.T, a, b, c, d, half,
                                                 c0, c1, q, edge, shift))
            assert np.max(np.abs(ref - fast) / (np.abs(ref) + m.T)) < 1e-14, key
            # the static branch is plain arithmetic: identical
            below = tau < edge
            assert np.array_equal(ref[below], fast[below]), key


def test_moore_map_parity():
    rng = np.random.default_rng(67)
    for key, m, ev in _param_sets():
        tau = rng.uniform(-m.L, 45.0 * m.T, 2048)
        a, b, c, d, half, c0, c1, q = ev._fpar
        r_ref, n_ref = _pure.moore_map(tau, m.L, m.T, a, b, c, d,
                                       half, c0, c1, q)
        r_fast, n_fast = fastcore.moore_map(tau, m.L, m.T, a, b, c, d,
                                            half, c0, c1, q)
        assert np.array_equal(np.asarray(n_ref), np.asarray(n_fast)), key
        r_fast = np.asarray(r_fast)
        assert np.max(np.abs(r_ref - r_fast) / (np.abs(r_ref) + m.T)) < 1e-13, key
        # the iteration count is the region index
        assert np.array_equal(np.asarray(n_ref), ev.map_index(tau)), key


def test_bracket_vals_parity():
    rng = np.random.default_rng(71)
    for key, m, ev in _param_sets():
        o = Observables(m)
        tau = rng.uniform(0.0, 30.0 * m.T, 4096)
        idx = np.ascontiguousarray(ev.map_index(tau), dtype=np.int64)
        tab = o._region_table(int(idx.max()))
        ref = np.asarray(_pure.bracket_vals(tau, m.T, idx, tab))
        fast = np.asarray(fastcore.bracket_vals(tau, m.T, idx, tab))
        assert np.max(np.abs(ref - fast) / np.abs(ref)) < 1e-12, key


def _backend_in_subprocess(extra_env):
    env = dict(os.environ)
    env.pop("VIBCAV_PURE", None)
    env.update(extra_env)
    out = subprocess.run(
        [sys.executable, "-c", "import vibcav._kernels as k; print(k.BACKEND)"],
        capture_output=True, text=True, env=env, check=True)
    return out.stdout.strip()


def test_backend_selection():
    assert _backend_in_subprocess({}) == "compiled"
    assert _backend_in_subprocess({"VIBCAV_PURE": "1"}) == "pure"
    assert _backend_in_subprocess({"VIBCAV_PURE": "0"}) == "compiled"


def test_backend_exports():
    assert _kernels.BACKEND in ("pure", "compiled")
    for name in ("phase_map", "moore_map", "bracket_vals"):
        assert hasattr(_kernels, name)


def test_iteration_cap_message():
    with pytest.raises(RuntimeError, match="map iteration cap exceeded"):
        # L <= 0 keeps every sample active forever
        _pure.moore_map(np.array([5.0]), -1.0, 1.0,
                        1.0, 0.0, 0.0, 1.0, True, 0.0, 0.0, 0.0)
