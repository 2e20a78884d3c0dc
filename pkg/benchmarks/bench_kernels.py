"""Compare the compiled kernels against their pure numpy fallbacks.

Times each hot kernel on representative inputs under both dispatch
paths (numba vs CARVE_NO_NUMBA=1), checks the outputs match bit for
bit, and prints a small table. Run from the repo root:

    python3 benchmarks/bench_kernels.py --size 1024 --repeats 5
"""

import argparse
import os
import statistics
import time

import numpy as np

from carve import kernels
from carve.imaging import ImageRGB, gradient_sectors, texture_complexity


def _time(fn, repeats):
    samples = []
    for _ in range(repeats):
        start = time.perf_counter()
        fn()
        samples.append(time.perf_counter() - start)
    return statistics.median(samples)


def _with_path(no_numba, fn):
    old = os.environ.get("CARVE_NO_NUMBA")
    os.environ["CARVE_NO_NUMBA"] = "1" if no_numba else "0"
    try:
        return fn()
    finally:
        if old is None:
            del os.environ["CARVE_NO_NUMBA"]
        else:
            os.environ["CARVE_NO_NUMBA"] = old


def build_inputs(size, rng):
    rgb = rng.integers(0, 256, (size, size, 3), dtype=np.uint8)

    # smooth field with island structure, scaled like an 8-bit gradient
    field = rng.standard_normal((size, size))
    for axis in (0, 1):
        acc = np.cumsum(field, axis=axis)
        field = (np.roll(acc, -8, axis=axis) - acc) / 8.0
    mag = np.abs(field) * (200.0 / max(np.abs(field).max(), 1e-12))
    sector = gradient_sectors(rng.uniform(-180.0, 180.0, (size, size)))
    mask = (mag > np.percentile(mag, 60)).astype(np.uint8)
    return rgb, mag, sector, mask


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--size", type=int, default=1024, help="square input edge")
    ap.add_argument("--repeats", type=int, default=5, help="median of this many runs")
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    if not kernels.HAS_NUMBA:
        raise SystemExit("numba is not importable; nothing to compare")

    rng = np.random.default_rng(args.seed)
    rgb, mag, sector, mask = build_inputs(args.size, rng)
    image = ImageRGB(rgb)

    cases = [
        ("hue_bins", lambda: kernels.hue_bins(rgb)),
        ("nms", lambda: kernels.nms(mag, sector)),
        ("hysteresis", lambda: kernels.hysteresis(mag, 50.0, 150.0)),
        ("label_components", lambda: kernels.label_components(mask, 8)),
        ("texture_complexity", lambda: texture_complexity(image)),
    ]

    _with_path(False, kernels.warmup)  # JIT compile outside the timings

    print(f"inputs: {args.size}x{args.size}, median of {args.repeats} runs")
    header = f"{'kernel':<20} {'numba':>10} {'numpy':>10} {'speedup':>8} {'identical':>9}"
    print(header)
    print("-" * len(header))
    for name, fn in cases:
        fast = _with_path(False, lambda: _time(fn, args.repeats))
        slow = _with_path(True, lambda: _time(fn, args.repeats))
        same = np.array_equal(
            np.asarray(_with_path(False, fn)), np.asarray(_with_path(True, fn))
        )
        print(
            f"{name:<20} {fast * 1e3:>8.2f}ms {slow * 1e3:>8.2f}ms"
            f" {slow / fast:>7.1f}x {'yes' if same else 'NO':>9}"
        )


if __name__ == "__main__":
    main()
