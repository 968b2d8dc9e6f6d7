#!/usr/bin/env python3
"""Compare the numba kernels against the pure-numpy fallback.

Runs the package's hot loops on representative workloads and prints a
timing table.  Usage:

    python benchmarks/bench_backends.py [--repeats 3]

The numba path includes a warm-up call so JIT compilation is not billed to
the measurement.  Both paths run the same Dormand-Prince scheme; the table
also reports the terminal-state agreement between them.
"""

from __future__ import annotations

import argparse
import sys
import time
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

import numpy as np

from crnforge.backend import NUMBA_ENABLED
from crnforge.dynamics import integrate, melnikov_at_zero
from crnforge.homoclinic import CaseStudyParams, build_variant


def workloads():
    params = CaseStudyParams(a=-0.8, alpha=0.0, t1=1.0, t2=1.5)
    xfact = build_variant(params, "xfact").system
    qssa = build_variant(params.with_(mu=1e-4), "qssa").system
    y0 = np.array([1.01, 0.61, 1.0 / 1.01, 1.0 / 0.61])

    return [
        (
            "cubic planar flow, t in [0, 200]",
            lambda backend: integrate(
                xfact, [0.9, 0.6], (0.0, 200.0), 1e-10, 1e-13, backend=backend
            ),
        ),
        (
            "stiff 4-species total system, mu = 1e-4",
            lambda backend: integrate(
                qssa, y0, (0.0, 10.0), 1e-8, 1e-10, backend=backend
            ),
        ),
        (
            "Melnikov loop tracking (both routes)",
            lambda backend: melnikov_at_zero(-0.8, backend=backend),
        ),
    ]


def main() -> int:
    parser = argparse.ArgumentParser()
    parser.add_argument("--repeats", type=int, default=3)
    args = parser.parse_args()

    if not NUMBA_ENABLED:
        print("numba is not available; only the numpy path can run")
    backends = ["numpy"] + (["numba"] if NUMBA_ENABLED else [])

    print(f"{'workload':<42} " + " ".join(f"{b:>12}" for b in backends) + "   speedup")
    for name, run in workloads():
        finals = {}
        times = {}
        for backend in backends:
            run(backend)  # warm-up (JIT compile, caches)
            best = float("inf")
            for _ in range(args.repeats):
                t0 = time.perf_counter()
                out = run(backend)
                best = min(best, time.perf_counter() - t0)
            times[backend] = best
            finals[backend] = getattr(out, "final_state", None)
            if finals[backend] is None:
                finals[backend] = np.array([out.value])
        row = f"{name:<42} " + " ".join(f"{times[b]:>10.4f}s" for b in backends)
        if len(backends) == 2:
            row += f"   {times['numpy'] / times['numba']:>6.1f}x"
            agreement = float(np.max(np.abs(finals["numpy"] - finals["numba"])))
            row += f"  (terminal agreement {agreement:.1e})"
        print(row)
    return 0


if __name__ == "__main__":
    sys.exit(main())
