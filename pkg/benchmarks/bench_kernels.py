"""Time the numba kernels against the pure-numpy fallback.

    python benchmarks/bench_kernels.py [--repeat 3] [--size 2^22]

Each kernel is run once untimed per backend so JIT compilation is excluded.
Both backends must return identical arrays; a mismatch aborts the run.
"""

from __future__ import annotations

import argparse
import statistics
import time

import numpy as np

from veronese import kernels
from veronese.dual import scan_linear_form
from veronese.exactnum import GeometricCeil, LacunarySpec, RealHandle, powers_enclosure

Z = RealHandle.lacunary(LacunarySpec(2, 1, GeometricCeil(1, 4)))


def _timed(fn, repeat):
    fn()
    times = []
    out = None
    for _ in range(repeat):
        t = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t)
    return statistics.median(times), out


def _same(a, b) -> bool:
    if isinstance(a, tuple):
        return all(_same(x, y) for x, y in zip(a, b))
    if isinstance(a, np.ndarray):
        return np.array_equal(a, b)
    return a == b


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--size", default="2^22", help="x range for the M_x kernels")
    ap.add_argument("--height", type=int, default=150, help="box height for the linear form search")
    args = ap.parse_args(argv)
    base, _, exp = args.size.partition("^")
    size = int(base) ** int(exp) if exp else int(base)

    if not kernels.HAVE_NUMBA:
        print("numba unavailable (or disabled by VERONESE_DISABLE_NUMBA); nothing to compare")
        return 1

    A2, W2 = kernels.fixed_point_arrays(powers_enclosure(Z, 2, 4))
    cases = {
        f"mx_bounds k=2, x<{size}": lambda b: kernels.mx_bounds_block(A2, W2, 1, size, backend=b),
        f"record_candidates k=2, x<{size}": lambda b: kernels.record_candidates(A2, W2, 1, size, backend=b),
        f"linear form k=2, X={args.height}": lambda b: scan_linear_form(Z, 2, args.height, backend=b),
    }
    print(f"{'kernel':<40}{'numpy s':>10}{'numba s':>10}{'speedup':>10}")
    for name, fn in cases.items():
        t_np, out_np = _timed(lambda: fn("numpy"), args.repeat)
        t_nb, out_nb = _timed(lambda: fn("numba"), args.repeat)
        if not _same(out_np, out_nb):
            raise SystemExit(f"backend mismatch in {name}")
        print(f"{name:<40}{t_np:>10.3f}{t_nb:>10.3f}{t_np / t_nb:>9.1f}x")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
