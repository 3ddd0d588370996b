"""Time the projection kernels on the scan shapes the estimator actually runs.

Compares the compiled backend against the pure-numpy one on the 1D departure
scan, the coarse quarter-sphere scan, and the fine window scan.  Run as:

    python3 benchmarks/bench_kernels.py [--repeats N]
"""

import argparse
import time

import numpy as np

from risloc.spectra import load_backend


def _best_of(fn, repeats):
    best = float("inf")
    for _ in range(repeats):
        start = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - start)
    return best


def _workloads(rng):
    basis_1d = rng.normal(size=(8, 7)) + 1j * rng.normal(size=(8, 7))
    u = np.sin(np.deg2rad(np.arange(-90.0, 90.1, 0.1)))

    basis_2d = rng.normal(size=(256, 4)) + 1j * rng.normal(size=(256, 4))
    basis_2d = np.ascontiguousarray(basis_2d)
    coarse = np.deg2rad(np.arange(0.0, 90.5, 0.5))
    grid_phi, grid_psi = np.meshgrid(coarse, coarse, indexing="ij")
    ux = (np.sin(grid_phi) * np.sin(grid_psi)).ravel()
    uy = (np.sin(grid_phi) * np.cos(grid_psi)).ravel()

    fine = np.deg2rad(np.arange(49.0, 51.02, 0.02))
    fine_phi, fine_psi = np.meshgrid(fine, fine, indexing="ij")
    fx = (np.sin(fine_phi) * np.sin(fine_psi)).ravel()
    fy = (np.sin(fine_phi) * np.cos(fine_psi)).ravel()

    return [
        ("1d departure scan (1801 pts)", "projection_power_1d", (basis_1d, u, 0.5)),
        ("2d coarse scan (32761 pts)", "projection_power_2d", (basis_2d, 16, 16, 0.2, ux, uy)),
        ("2d fine scan (10404 pts)", "projection_power_2d", (basis_2d, 16, 16, 0.2, fx, fy)),
    ]


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeats", type=int, default=7, help="take the best of N runs")
    args = parser.parse_args()

    backends = {"numpy": load_backend("numpy")}
    try:
        backends["compiled"] = load_backend("compiled")
    except ImportError:
        print("compiled extension not built; timing the numpy backend only\n")

    rng = np.random.default_rng(0)
    rows = []
    for label, kernel, kernel_args in _workloads(rng):
        timings = {}
        for name, module in backends.items():
            fn = getattr(module, kernel)
            timings[name] = _best_of(lambda: fn(*kernel_args), args.repeats)
        rows.append((label, timings))

    width = max(len(label) for label, _ in rows)
    header = f"{'workload':<{width}}  " + "".join(f"{name:>12}" for name in backends)
    if len(backends) == 2:
        header += f"{'speedup':>10}"
    print(header)
    for label, timings in rows:
        line = f"{label:<{width}}  " + "".join(
            f"{timings[name] * 1e3:>10.3f}ms" for name in backends
        )
        if len(backends) == 2:
            line += f"{timings['numpy'] / timings['compiled']:>9.2f}x"
        print(line)


if __name__ == "__main__":
    main()
