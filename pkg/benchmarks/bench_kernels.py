"""Time the numba and numpy kernel backends on the same inputs.

    python3 benchmarks/bench_kernels.py [--repeat 5] [--seed 0]

The first numba call compiles; it is excluded from the timings.
"""
import argparse
import timeit

import numpy as np

from bjorth import _kernels

SHAPES = [(2, 2), (1, 1), (3, 2)]


def _stack(rng, shapes):
    return _kernels.pack([rng.standard_normal(s) + 1j * rng.standard_normal(s) for s in shapes])


def cases(seed):
    rng = np.random.default_rng(seed)
    C = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
    thetas = np.linspace(0.0, 2 * np.pi, 720, endpoint=False)
    xs, ys = _stack(rng, SHAPES), _stack(rng, SHAPES)
    xs /= _kernels.np_norm_at(xs, ys, 0.0, 0.0)
    ys /= _kernels.np_norm_at(ys, xs, 0.0, 0.0)
    Z = rng.standard_normal((512, 4)) + 1j * rng.standard_normal((512, 4))
    Z /= np.linalg.norm(Z, axis=1, keepdims=True)
    return {
        "support_values 4x4, 720 angles": ("support_values", (C, thetas)),
        "norm_at 3 blocks": ("norm_at", (xs, ys, 0.3, -0.2)),
        "line_min 3 blocks": ("line_min", (xs, ys, 1.0, 0.0, 3.0, 1e-10)),
        "plane_min 3 blocks": ("plane_min", (xs, ys, 2.0, 1e-10)),
        "nr_values 4x4, 512 vectors": ("nr_values", (C, Z)),
    }


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--repeat", type=int, default=5)
    p.add_argument("--seed", type=int, default=0)
    args = p.parse_args(argv)

    table = _kernels.backends()
    names = [n for n in ("numba", "numpy") if n in table]
    print(f"{'kernel':<32}" + "".join(f"{n + ' (ms)':>14}" for n in names) + f"{'speedup':>10}")
    for label, (kernel, inputs) in cases(args.seed).items():
        best = {}
        for name in names:
            fn = table[name][kernel]
            fn(*inputs)
            timer = timeit.Timer(lambda: fn(*inputs))
            number, _ = timer.autorange()
            best[name] = min(timer.repeat(args.repeat, number)) / number * 1e3
        speed = f"{best['numpy'] / best['numba']:>9.1f}x" if "numba" in best else f"{'n/a':>10}"
        print(f"{label:<32}" + "".join(f"{best[n]:>14.4f}" for n in names) + speed)


if __name__ == "__main__":
    main()
