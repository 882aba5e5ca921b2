"""Compare the compiled (numba) and pure-numpy integrator backends.

Runs the same workload in two subprocesses, one per EIKCRIT_BACKEND value,
and reports wall time.  The workload is the hot path of the library: many
short characteristic-flow integrations plus one manifold computation.

Usage: python benchmarks/bench_backends.py
"""

import json
import os
import subprocess
import sys
import textwrap

WORKLOAD = textwrap.dedent("""
    import json, time
    import numpy as np
    from eikcrit import (BACKEND, ModelQuadratic, NormalForm, integrate_flow,
                         invariant_manifold)
    from eikcrit.bivariate import normal_form_builtin

    specs = [ModelQuadratic(1.0, np.sqrt(2.0)),
             NormalForm(normal_form_builtin("product"), 1.0, np.sqrt(2.0))]
    rng = np.random.default_rng(0)
    points = rng.uniform(-0.3, 0.3, (200, 4))

    # warm-up (includes jit compilation when applicable)
    for spec in specs:
        integrate_flow(spec, points[0], 1.0)

    t0 = time.perf_counter()
    for spec in specs:
        for P in points:
            integrate_flow(spec, P, 2.5)
            integrate_flow(spec, P, -2.5)
    t_flows = time.perf_counter() - t0

    t0 = time.perf_counter()
    invariant_manifold(specs[0], [0, 0, 0, 0], "unstable", 0.3, grid_n=15)
    t_manifold = time.perf_counter() - t0

    print(json.dumps({"backend": BACKEND, "flows_s": t_flows,
                      "manifold_s": t_manifold}))
""")


def run(backend):
    env = dict(os.environ, EIKCRIT_BACKEND=backend)
    out = subprocess.run([sys.executable, "-c", WORKLOAD], env=env,
                         capture_output=True, text=True, check=True)
    return json.loads(out.stdout.strip().splitlines()[-1])


def main():
    results = [run(be) for be in ("numpy", "numba")]
    print(f"{'backend':<10} {'800 flows':>12} {'15x15 manifold':>16}")
    for r in results:
        print(f"{r['backend']:<10} {r['flows_s']:>11.3f}s {r['manifold_s']:>15.3f}s")
    speed = results[0]["flows_s"] / results[1]["flows_s"]
    print(f"\nnumba speedup on the flow workload: {speed:.1f}x")


if __name__ == "__main__":
    main()
