"""Compare the numba and pure-numpy backends.

Each backend runs in its own interpreter, since the backend is fixed at
import time by ETSKIN_DISABLE_NUMBA. Reported times are per call (best of
several repeats), after warm-up so JIT compilation is excluded.

    python3 benchmarks/bench_kernels.py [--problems 200]
"""

import argparse
import json
import os
import subprocess
import sys

WORKER = r"""
import json, sys, time
import numpy as np
from etskin import BACKEND
from etskin.bench import run_campaign
from etskin.ets import ETS, Rx, Ry, Rz, tx
from etskin.jacobian import jacobian_fast
from etskin.model import fkine, load_model

def best(fn, number, repeat=5):
    out = np.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        for _ in range(number):
            fn()
        out = min(out, (time.perf_counter() - t0) / number)
    return out

problems = int(sys.argv[1])
rows = {}
joint = (Rx, Ry, Rz)
for name in ("panda", "chain16", "chain64"):
    if name == "panda":
        ets = load_model("panda")
    else:
        n = int(name[5:])
        ets = ETS(tuple(t for j in range(n) for t in (tx(0.1), joint[j % 3](joint=j))))
    q = np.linspace(-1.0, 1.0, ets.n)
    fkine(ets, q); jacobian_fast(ets, q)
    rows[name] = {
        "fkine_us": 1e6 * best(lambda: fkine(ets, q), 2000),
        "jacobian_us": 1e6 * best(lambda: jacobian_fast(ets, q), 2000),
    }
run_campaign("ur5", ["LM-Chan:0.1"], problems=2, seed=1)
t0 = time.perf_counter()
run_campaign("ur5", ["LM-Chan:0.1"], problems=problems, seed=1)
rows["ur5_ik_campaign"] = {"seconds": time.perf_counter() - t0, "problems": problems}
print(json.dumps({"backend": BACKEND, "rows": rows}))
"""


def run_backend(disable, problems):
    env = dict(os.environ)
    env.pop("ETSKIN_DISABLE_NUMBA", None)
    if disable:
        env["ETSKIN_DISABLE_NUMBA"] = "1"
    out = subprocess.run([sys.executable, "-c", WORKER, str(problems)], env=env,
                         capture_output=True, text=True, check=True)
    return json.loads(out.stdout)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--problems", type=int, default=200, help="IK problems in the campaign timing")
    args = ap.parse_args()

    fast = run_backend(False, args.problems)
    slow = run_backend(True, args.problems)
    print(f"{'case':<18}{'metric':<14}{fast['backend']:>12}{slow['backend']:>12}{'speedup':>10}")
    for case, metrics in fast["rows"].items():
        for metric, value in metrics.items():
            if metric == "problems":
                continue
            other = slow["rows"][case][metric]
            print(f"{case:<18}{metric:<14}{value:>12.3f}{other:>12.3f}{other / value:>9.1f}x")


if __name__ == "__main__":
    main()
