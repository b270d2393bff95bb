"""Time the numba and numpy kernels on the solver's real workloads.

    python3 benchmarks/bench_backends.py [--repeat 20]

Each case is run once to warm up (JIT compile, caches) and then timed;
the best and median wall times are reported per backend, along with the
largest difference in the results.
"""
import argparse
import statistics
import time

from tallcol import kernels
from tallcol.oracle import DiscreteShape, sturm_liouville_lambda
from tallcol.reconstruct import profile
from tallcol.shooting import integrate_backward


def _cases():
    clamped_shape = DiscreteShape.from_profile(profile(integrate_backward("clamped")), 2000)
    hinged_shape = DiscreteShape.from_profile(profile(integrate_backward("hinged")), 2000)
    return {
        "shoot clamped": lambda: integrate_backward("clamped").lam,
        "shoot hinged": lambda: integrate_backward("hinged").lam,
        "oracle clamped n=2000": lambda: sturm_liouville_lambda(clamped_shape, "clamped"),
        "oracle hinged n=2000": lambda: sturm_liouville_lambda(hinged_shape, "hinged"),
    }


def _time(fn, repeat):
    fn()
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        value = fn()
        times.append(time.perf_counter() - t0)
    return value, min(times), statistics.median(times)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=20)
    args = ap.parse_args(argv)

    backends = kernels.available()
    if "numba" not in backends:
        print("numba is not available (or TALLCOL_DISABLE_NUMBA is set); timing numpy only")
    cases = _cases()
    print(f"{'case':24s}" + "".join(f"{b + ' best':>14s}{b + ' median':>16s}" for b in backends) + f"{'speedup':>10s}{'|diff|':>11s}")
    for name, fn in cases.items():
        row, values, best = f"{name:24s}", {}, {}
        for b in backends:
            with kernels.use(b):
                values[b], best[b], med = _time(fn, args.repeat)
            row += f"{best[b] * 1e3:11.3f} ms{med * 1e3:13.3f} ms"
        if len(backends) == 2:
            row += f"{best['numpy'] / best['numba']:9.1f}x{abs(values['numpy'] - values['numba']):11.1e}"
        print(row)


if __name__ == "__main__":
    main()
