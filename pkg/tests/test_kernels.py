import os
import subprocess
import sys

import numpy as np

from conftest import random_chain
from etskin import _kernels


def test_numpy_kernels_match_default_backend(panda):
    rng = np.random.default_rng(51)
    models = [panda] + [random_chain(rng, n) for n in (1, 4, 9, 16)]
    for ets in models:
        enc = ets.encoded
        for _ in range(50):
            q = ets.random_q(rng)
            np.testing.assert_allclose(_kernels._fkine_numpy(*enc, q), _kernels.fkine(*enc, q), atol=1e-13)
            np.testing.assert_allclose(_kernels._jacob0_numpy(*enc, q), _kernels.jacob0(*enc, q), atol=1e-13)


SCRIPT = """
import numpy as np
from etskin import BACKEND
from etskin.bench import run_campaign
from etskin.jacobian import jacobian_fast
from etskin.model import load_model
panda = load_model("panda")
q = np.linspace(-1, 1, 7)
print(BACKEND)
print(repr(jacobian_fast(panda, q).matrix.tolist()))
print(run_campaign("ur5", ["LM-Chan:0.1"], problems=20, seed=5).to_csv())
"""


def _run(disable):
    env = dict(os.environ)
    env.pop("ETSKIN_DISABLE_NUMBA", None)
    if disable:
        env["ETSKIN_DISABLE_NUMBA"] = "1"
    out = subprocess.run([sys.executable, "-c", SCRIPT], capture_output=True, text=True, env=env, check=True)
    return out.stdout.splitlines()


def test_backends_agree_across_processes():
    fast, slow = _run(False), _run(True)
    assert fast[0] == "numba" and slow[0] == "numpy"
    Jf, Js = np.array(eval(fast[1])), np.array(eval(slow[1]))
    np.testing.assert_allclose(Jf, Js, atol=1e-13)
    # campaign statistics are insensitive to last-bit differences between backends
    assert fast[2].split(",")[:3] == slow[2].split(",")[:3]
    assert fast[3].split(",")[5] == slow[3].split(",")[5]
