import os
import subprocess
import sys

import numpy as np

from lslab import numba_enabled, use_numba
from lslab._accel import HAVE_NUMBA, dispatch


def _probe(env_value):
    env = dict(os.environ)
    env.pop("LSLAB_NO_NUMBA", None)
    if env_value is not None:
        env["LSLAB_NO_NUMBA"] = env_value
    code = "import lslab; print(lslab.numba_enabled())"
    return subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True).stdout.strip()


def test_env_flag_selects_backend():
    assert _probe("1") == "False"
    assert _probe(None) == str(HAVE_NUMBA)
    assert _probe("0") == str(HAVE_NUMBA)


def test_use_numba_roundtrip():
    prev = use_numba(False)
    try:
        assert not numba_enabled()
    finally:
        use_numba(prev)
    assert numba_enabled() == prev


def test_dispatch_routes():
    k = dispatch(lambda x: ("nb", x), lambda x: ("np", x))
    prev = use_numba(False)
    try:
        assert k(1) == ("np", 1)
        use_numba(True)
        assert k(1) == (("nb", 1) if HAVE_NUMBA else ("np", 1))
    finally:
        use_numba(prev)


def test_experiment_identical_across_backends():
    from lslab.spectrum import evaluate, random_band_function
    from lslab.extremal import exact_grid

    f = random_band_function(20, 2)
    g = exact_grid(f.basis.nmax)
    prev = use_numba(True)
    try:
        a = evaluate(f, g)
        use_numba(False)
        b = evaluate(f, g)
    finally:
        use_numba(prev)
    assert np.max(np.abs(a - b)) < 1e-12
