"""Time the compiled kernels against the pure-Python fallback.

    python benchmarks/bench_kernels.py [--repeat 5] [--json out.json]
"""
import argparse
import json
import sys
import timeit

import numpy as np

from fractoback import _core


def cases(rng):
    z2 = -5.0 * rng.random((200, 2))
    z3 = -3.0 * rng.random((100, 3))
    y = rng.standard_normal((641, 8))
    return {
        "series_many M=2 (200 rows)": lambda k: k.series_many(1.8, (0.8, 0.4), z2, 1e-17, 300, 50.0),
        "series_many M=3 (100 rows)": lambda k: k.series_many(1.7, (0.7, 0.2, 0.6), z3, 1e-17, 300, 50.0),
        "l1_history n=640, 8 columns": lambda k: k.l1_history(y, 0.6),
    }


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--repeat", type=int, default=5)
    p.add_argument("--json", help="write timings here")
    args = p.parse_args(argv)
    if _core.compiled_kernels is None:
        print("compiled kernels are not built; only the fallback can be timed", file=sys.stderr)
    backends = {"python": _core.python_kernels}
    if _core.compiled_kernels is not None:
        backends["cython"] = _core.compiled_kernels
    rows = []
    print(f"{'kernel':<30} " + " ".join(f"{b:>12}" for b in backends) + f" {'speedup':>9}")
    for name, fn in cases(np.random.default_rng(0)).items():
        best = {}
        for b, k in backends.items():
            fn(k)
            n = 1 if b == "python" else 20
            best[b] = min(timeit.repeat(lambda: fn(k), number=n, repeat=args.repeat)) / n
        speed = best["python"] / best["cython"] if "cython" in best else float("nan")
        rows.append({"kernel": name, **{f"{b}_seconds": t for b, t in best.items()}, "speedup": speed})
        print(f"{name:<30} " + " ".join(f"{best[b]:>11.3e}s" for b in backends) + f" {speed:>8.1f}x")
    if args.json:
        with open(args.json, "w") as fh:
            json.dump(rows, fh, indent=2)
    return 0


if __name__ == "__main__":
    sys.exit(main())
