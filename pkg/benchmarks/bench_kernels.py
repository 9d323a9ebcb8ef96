"""Time the pure-Python and compiled kernel backends on identical inputs.

Usage: python3 benchmarks/bench_kernels.py [--dims 10 100 1000] [--repeat 5]
"""
import argparse
import timeit

import numpy as np

from fenchel_game.kernels import available_backends, get_backend


def cases(d, rng):
    v = rng.standard_normal(d)
    avg = rng.standard_normal(d)
    return {
        "box_lmo": lambda k: k.box_lmo(v, -np.ones(d), np.ones(d)),
        "lp_lmo": lambda k: k.lp_lmo(v, 3.0, 1.0),
        "simplex_project": lambda k: k.simplex_project(v),
        "lp_ball_project": lambda k: k.lp_ball_project(v, 3.0, 0.5),
        "soft_threshold": lambda k: k.soft_threshold(v, 0.3),
        "average_update": lambda k: k.average_update(avg, 2.0, v, 1.0),
    }


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    ap.add_argument("--dims", type=int, nargs="+", default=[10, 100, 1000])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)

    backends = available_backends()
    if "cython" not in backends:
        print("compiled kernels not built; timing the python backend only")
    rng = np.random.default_rng(0)
    print(f"{'kernel':16s} {'d':>6s} " + " ".join(f"{b + ' us':>12s}" for b in backends) + ("  speedup" if len(backends) > 1 else ""))
    for d in args.dims:
        for name, fn in cases(d, rng).items():
            us = []
            for b in backends:
                k = get_backend(b)
                timer = timeit.Timer(lambda: fn(k))
                n, _ = timer.autorange()
                us.append(min(timer.repeat(args.repeat, n)) / n * 1e6)
            line = f"{name:16s} {d:6d} " + " ".join(f"{u:12.2f}" for u in us)
            if len(us) > 1:
                line += f"  {us[0] / us[1]:7.1f}x"
            print(line)


if __name__ == "__main__":
    main()
