"""Compare the compiled and numpy kernel backends.

    python3 benchmarks/bench_kernels.py [--repeat 5]

Workloads: the first-member scan over 2**20 candidate controls for a 4-axis
model, the same scan in strict mode, and 30 threshold-law rollouts of 600
steps on a 6-axis model. Each backend's output is checked against the other
before timing.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from finbox import kernels


def _scan_case(rng: np.random.Generator):
    n, m = 4, 5
    B = rng.integers(-3, 4, size=(n, m))
    values = np.arange(-8, 8)  # 16**5 = 2**20 controls
    Bu = kernels.control_increments(B, values)
    dmax = rng.integers(0, 6, size=n)
    dmin = dmax - rng.integers(0, 4, size=n)
    return Bu, dmax, dmin


def _rollout_case(rng: np.random.Generator, paths: int = 30, horizon: int = 600):
    n = 6
    inc = rng.integers(-40, 41, size=(2**n, n)).astype(np.float64)
    thresholds = rng.integers(20, 200, size=n).astype(np.float64)
    x0 = [rng.uniform(-1000, 1000, size=n) for _ in range(paths)]
    dw = [rng.integers(-20, 21, size=(horizon, n)).astype(np.float64) for _ in range(paths)]
    return x0, thresholds, inc, dw


def _equal(a, b) -> bool:
    if isinstance(a, (list, tuple)):
        return len(a) == len(b) and all(_equal(x, y) for x, y in zip(a, b))
    return np.array_equal(a, b)


def _best(fn, repeat: int) -> float:
    times = []
    for _ in range(repeat):
        t = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t)
    return min(times)


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    rng = np.random.default_rng(args.seed)
    impls = kernels.backends()
    Bu, dmax, dmin = _scan_case(rng)
    x0, thr, inc, dw = _rollout_case(rng)

    workloads = {
        "first_members (2^20, weak)": lambda im: kernels.first_members(Bu, dmax, dmin, False, impl=im),
        "first_members (2^20, strict)": lambda im: kernels.first_members(Bu, dmax, dmin, True, impl=im),
        "member_mask (2^20, z=5)": lambda im: kernels.member_mask(Bu, dmax, dmin, 5, False, impl=im),
        "rollout 30 x 600, n=6": lambda im: [kernels.rollout_threshold(a, thr, inc, d, impl=im) for a, d in zip(x0, dw)],
    }
    if "cython" not in impls:
        print("compiled backend not built; timing the numpy backend only")
    print(f"{'workload':32s} " + " ".join(f"{k:>12s}" for k in impls) + ("     speedup" if len(impls) > 1 else ""))
    for name, fn in workloads.items():
        outs = {k: fn(im) for k, im in impls.items()}
        if "cython" in outs:
            same = _equal(outs["python"], outs["cython"])
            if not same:
                raise SystemExit(f"{name}: backends disagree")
        times = {k: _best(lambda im=im: fn(im), args.repeat) for k, im in impls.items()}
        row = f"{name:32s} " + " ".join(f"{times[k] * 1e3:10.2f}ms" for k in impls)
        if "cython" in times:
            row += f" {times['python'] / times['cython']:10.1f}x"
        print(row)


if __name__ == "__main__":
    main()
