"""Wall-clock comparison of the compiled and numpy kernels.

    python benchmarks/bench_kernels.py [--repeat 3]
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from markovsymp import _kernels

PARAMS = [3 / 7, -2 / 5, 1 / 3, 5 / 2, 7 / 4]


def best_of(fn, repeat: int) -> float:
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main() -> None:
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    rng = np.random.default_rng(0)
    pts = rng.normal(size=(200, 3)) + 1j * rng.normal(size=(200, 3))
    ts = rng.normal(size=200) * 0.5
    starts = rng.normal(size=(400, 3)) * 3 + 0j
    cases = {
        "markov_scan(2e5)": lambda nb: _kernels.markov_scan(200_000, nb),
        "rk4 200 pts x 2000 steps": lambda nb: _kernels.rk4_axis_flow(PARAMS, 2, pts, ts, 2000, nb),
        "newton 400 starts": lambda nb: _kernels.newton_critical_points(PARAMS, starts, 60, nb),
    }
    print(f"backend available: {_kernels.backend()}")
    for name, fn in cases.items():
        row = [f"{name:28s}", f"numpy {best_of(lambda: fn(False), args.repeat):8.3f}s"]
        if _kernels.HAVE_NUMBA:
            fn(True)  # compile
            row.append(f"numba {best_of(lambda: fn(True), args.repeat):8.3f}s")
        print("  ".join(row))


if __name__ == "__main__":
    main()
