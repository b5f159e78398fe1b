"""Time the F_p row-reduction kernel: numba against the numpy fallback.

    python benchmarks/bench_rref.py [--sizes 32 64 128] [--p 7] [--repeat 5]
"""

import argparse
import timeit

import numpy as np

from bvtt import _kernels


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--sizes", type=int, nargs="+", default=[16, 32, 64, 128, 256])
    ap.add_argument("--p", type=int, default=7)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    if _kernels.nb_rref_mod_p is None:
        raise SystemExit("numba kernel unavailable (BVTT_NUMBA=0 or numba missing)")
    rng = np.random.default_rng(0)
    # compile once outside the timings
    _kernels.nb_rref_mod_p(np.eye(2, dtype=np.int64), args.p)
    print(f"{'n':>5} {'numpy [ms]':>12} {'numba [ms]':>12} {'speedup':>8}")
    for n in args.sizes:
        a = rng.integers(0, args.p, size=(n, n), dtype=np.int64)
        r_np, p_np = _kernels.np_rref_mod_p(a.copy(), args.p)
        r_nb, p_nb = _kernels.nb_rref_mod_p(a.copy(), args.p)
        assert np.array_equal(r_np, r_nb) and np.array_equal(p_np, p_nb)
        t_np = min(timeit.repeat(lambda: _kernels.np_rref_mod_p(a.copy(), args.p),
                                 number=1, repeat=args.repeat))
        t_nb = min(timeit.repeat(lambda: _kernels.nb_rref_mod_p(a.copy(), args.p),
                                 number=1, repeat=args.repeat))
        print(f"{n:>5} {1e3 * t_np:>12.3f} {1e3 * t_nb:>12.3f} {t_np / t_nb:>8.1f}")


if __name__ == "__main__":
    main()
