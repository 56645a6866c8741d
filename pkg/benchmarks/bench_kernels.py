"""Time the compiled kernels against their pure-Python twins.

    python3 benchmarks/bench_kernels.py [--repeat N]
"""

import argparse
import timeit

import numpy as np

from recoilfringe import kernels


def cases(impl):
    rng = np.random.default_rng(0)
    z = rng.uniform(-4, 4, 2000) + 1j * rng.uniform(-4, 4, 2000)
    inten = rng.uniform(0, 1, 32)
    shifts = np.linspace(0, 4e-7, 64, endpoint=False)
    gauss = (impl.KIND_GAUSSIAN, (1.5, 0.7, 0.8), 0.0, 2.0)
    return {
        "erf_complex_array (2000 pts)": lambda: impl.erf_complex_array(z),
        "char_integral mandel theta=12.6": lambda: impl.char_integral(
            impl.KIND_MANDEL, (), 12.6, 0.0, 2.0, 1e-10, 48),
        "char_integral gaussian theta=12.6": lambda: impl.char_integral(
            gauss[0], gauss[1], 12.6, gauss[2], gauss[3], 1e-10, 48),
        "window_flux folded period (64 shifts)": lambda: impl.window_flux(
            inten, 0.0, 6.25e-9, 0, 32, shifts, 2e-7, 1e-7, 0.0),
    }


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    impls = kernels.backends()
    table = {}
    for impl in impls:
        for name, fn in cases(impl).items():
            n, _ = timeit.Timer(fn).autorange()
            best = min(timeit.repeat(fn, number=n, repeat=args.repeat)) / n
            table.setdefault(name, {})[impl.IMPLEMENTATION] = best
    names = [i.IMPLEMENTATION for i in impls]
    print("%-40s" % "kernel" + "".join("%14s" % n for n in names) + "%10s" % "speedup")
    for name, row in table.items():
        cells = "".join("%12.1f us" % (row[n] * 1e6) for n in names)
        speed = row["python"] / row[names[0]] if len(names) > 1 else 1.0
        print("%-40s%s%9.1fx" % (name, cells, speed))
    if len(names) == 1:
        print("compiled extension not built; only the Python backend was timed")


if __name__ == "__main__":
    main()
