"""Time the compiled and pure-Python kernel backends on the same inputs.

Run with ``python benchmarks/bench_kernels.py``; needs the compiled extension.
"""

from __future__ import annotations

import argparse
import timeit

from phase_contract._backend import get_backend, has_compiled, log_factorials_split


def cases(two_s: int):
    lf = log_factorials_split(2 * two_s + 2)
    tm = two_s - 4
    return {
        "cg_float": lambda k: k.cg_float(two_s, tm, two_s, -tm, two_s, 0, lf),
        "wigner_d_rows": lambda k: k.wigner_d_rows(two_s, 0.37, 0, 5, lf),
        "term_deltas": lambda k: k.term_deltas(two_s, 2, lf),
        "diagonal_cg": lambda k: k.diagonal_cg(two_s, 2, lf),
    }


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--two-s", type=int, default=400)
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()
    if not has_compiled():
        raise SystemExit("compiled kernels are not built; run pip install -e . --no-build-isolation")
    py, cy = get_backend("python"), get_backend("cython")
    print(f"2s = {args.two_s}, best of {args.repeat}")
    print(f"{'kernel':<15}{'python [ms]':>14}{'cython [ms]':>14}{'speedup':>10}")
    for name, fn in cases(args.two_s).items():
        t_py = min(timeit.repeat(lambda: fn(py), number=1, repeat=args.repeat)) * 1e3
        t_cy = min(timeit.repeat(lambda: fn(cy), number=1, repeat=args.repeat)) * 1e3
        print(f"{name:<15}{t_py:>14.3f}{t_cy:>14.3f}{t_py / t_cy:>10.1f}")


if __name__ == "__main__":
    main()
