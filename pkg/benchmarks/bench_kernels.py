"""Compare the compiled tree kernels against the NumPy fallback.

    python benchmarks/bench_kernels.py --max-n 22 --threads 1 4
"""

import argparse
import time

from hmpbounds import _backend, bounds, model


def time_depths(params, kernels, n_max, threads, repeat):
    best = float("inf")
    for _ in range(repeat):
        start = time.perf_counter()
        for _ in bounds.iter_rows(params, n_max, threads=threads, kernels=kernels):
            pass
        best = min(best, time.perf_counter() - start)
    return best


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--max-n", type=int, nargs="+", default=[16, 20, 22])
    ap.add_argument("--threads", type=int, nargs="+", default=[1])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--params", type=float, nargs=3, default=[0.1, 0.1, 0.01])
    args = ap.parse_args()

    params = model.validate(*args.params)
    backends = [("numpy", _backend.fallback)]
    if _backend.compiled is not None:
        backends.insert(0, ("cython", _backend.compiled))
    print(f"{'n_max':>5} {'threads':>7} " + " ".join(f"{name:>10}" for name, _ in backends) + "  speedup")
    for n in args.max_n:
        for t in args.threads:
            times = [time_depths(params, k, n, t, args.repeat) for _, k in backends]
            speed = f"{times[-1] / times[0]:8.1f}x" if len(times) > 1 else ""
            print(f"{n:>5} {t:>7} " + " ".join(f"{s:9.3f}s" for s in times) + f"  {speed}")


if __name__ == "__main__":
    main()
