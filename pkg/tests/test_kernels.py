"""The compiled and plain-Python kernel paths must agree bit for bit."""

import json
import os
import subprocess
import sys

import numpy as np
import pytest

from nhcomp import _kernels as _k

_PROBE = r"""
import json
import numpy as np
from nhcomp import _kernels as _k

out = {"jit": _k.JIT_ENABLED, "pure": _k.PURE_PYTHON, "vals": []}
for family, par in ((0, 0.0), (0, 2.0), (1, -2.0), (2, 0.0), (3, 0.0)):
    for J in (0.37, 1.0, 5.5):
        out["vals"].append(list(_k.h_tuple(family, par, J)))
for case in (0, 1, 2):
    for lamT in (0.6, 1.0, 1.9):
        out["vals"].append(
            [_k.transverse_residual(1, 2, 0.0, case, 1.7, lamT, 2.53, 5.37625, 7.062916666666667)]
        )
u, w, it = _k.bisect_log(0, 2, 0.0, 0, 2.0, 1.0, 1.0, 2.0, -3.0, 1.0, -0.9, 120)
out["vals"].append([u, w, float(it)])
print(json.dumps(out))
"""


def _run_probe(pure):
    env = dict(os.environ)
    if pure:
        env["NHCOMP_PURE_PYTHON"] = "1"
    else:
        env.pop("NHCOMP_PURE_PYTHON", None)
    proc = subprocess.run(
        [sys.executable, "-c", _PROBE], env=env, capture_output=True, text=True, check=True
    )
    return json.loads(proc.stdout)


def test_env_flag_forces_pure_path():
    got = _run_probe(pure=True)
    assert got["pure"] is True
    assert got["jit"] is False


def test_paths_agree_exactly():
    pure = _run_probe(pure=True)
    default = _run_probe(pure=False)
    for a, b in zip(pure["vals"], default["vals"]):
        np.testing.assert_array_equal(np.array(a), np.array(b))


def test_grid_kernel_matches_scalar():
    Js = np.logspace(-2, 2, 57)
    out = np.empty((Js.size, 5))
    _k.h_grid(1, -1.0, Js, out)
    for i, J in enumerate(Js):
        np.testing.assert_array_equal(out[i], np.array(_k.h_tuple(1, -1.0, J)))


def test_residual_scan_matches_scalar():
    # the compiled loop may fuse the grid arithmetic (FMA), so the sampled
    # points can sit an ulp off a Python re-derivation; compare tightly but
    # not bitwise
    n = 33
    out = np.empty(n)
    _k.residual_scan(0, 0, 2.0, 0, 1.4, 1.0, 2.0, 3.0, -2.0, 2.0, n, out)
    du = 4.0 / (n - 1)
    for i, got in enumerate(out):
        u = -2.0 + du * i
        want = _k.transverse_residual(0, 0, 2.0, 0, 1.4, float(np.exp(u)), 1.0, 2.0, 3.0)
        assert got == pytest.approx(want, rel=1e-12)


def test_case_volume_ratio():
    assert _k.case_volume_ratio(0, 2.0, 3.0) == 18.0
    assert _k.case_volume_ratio(1, 2.0, 3.0) == 12.0
    assert _k.case_volume_ratio(2, 2.0, 3.0) == 6.0
