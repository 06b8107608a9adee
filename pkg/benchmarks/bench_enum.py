"""Time the compiled and pure-Python AUSO enumeration kernels on the shipped catalogs.

    python3 benchmarks/bench_enum.py [--max-n 7] [--repeat 3]
"""

import argparse
import time

from lp3sim import search


def best_of(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t)
    return best, out


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--max-n", type=int, default=7)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    kernels = ["python"] + (["compiled"] if search.KERNEL == "compiled" else [])
    if len(kernels) == 1:
        print("compiled kernel not built; timing the Python kernel only")
    print(f"{'graph':8} {'ausos':>6} " + " ".join(f"{k:>10}" for k in kernels) + "   speedup")
    for n in range(4, args.max_n + 1):
        for g in search.load_catalog(n):
            times, counts = [], set()
            for k in kernels:
                t, masks = best_of(lambda: search.enumerate_masks(g, kernel=k), args.repeat)
                times.append(t)
                counts.add(tuple(masks))
            if len(counts) != 1:
                raise SystemExit(f"kernels disagree on {g.name}")
            ratio = f"{times[0] / times[-1]:8.1f}x" if len(times) > 1 else ""
            print(f"{g.name:8} {len(masks):6d} " + " ".join(f"{t * 1e3:8.2f}ms" for t in times) + "  " + ratio)


if __name__ == "__main__":
    main()
