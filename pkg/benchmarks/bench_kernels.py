"""Compare the compiled kernels against the numpy reference.

    python benchmarks/bench_kernels.py [--repeat N]

Prints one row per kernel with the best-of-N wall time for each backend and
the speed-up. Both backends are checked for identical output first.
"""
import argparse
import timeit

import numpy as np

from iomhash import _kernels_py as ref
from iomhash._backend import compiled_kernels
from iomhash.randomness import child_seeds


def workloads():
    rng = np.random.default_rng(0)
    seeds = child_seeds(1, np.arange(1, 601)[:, None], np.arange(1, 3)[None, :]).reshape(-1)
    X = rng.normal(size=(250, 128))
    idx = ref.perm_prefix(seeds, 128, 128).reshape(600, 2, 128)
    A = rng.integers(1, 129, size=(250, 600), dtype=np.int64)
    return {
        "uniform_pairs 1200 seeds x 4096": (lambda k: k.uniform_pairs(seeds, 4096)),
        "perm_prefix 1200 x d=128 k=128": (lambda k: k.perm_prefix(seeds, 128, 128)),
        "perm_prefix 1200 x d=128 k=16": (lambda k: k.perm_prefix(seeds, 128, 16)),
        "hadamard_argmax 250 x m=600 p=2 k=128": (lambda k: k.hadamard_argmax(X, idx)),
        "collision_counts 250 x 250 x m=600": (lambda k: k.collision_counts(A, A)),
    }


def same(a, b):
    if isinstance(a, tuple):
        return all(np.array_equal(x, y) for x, y in zip(a, b))
    return np.array_equal(a, b)


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args(argv)
    ext = compiled_kernels()
    if ext is None:
        print("compiled extension not built; only the numpy backend is available")
    print(f"{'kernel':42s} {'numpy ms':>10s} {'cython ms':>10s} {'speed-up':>9s}")
    for name, fn in workloads().items():
        t_py = min(timeit.repeat(lambda: fn(ref), number=1, repeat=args.repeat)) * 1e3
        if ext is None:
            print(f"{name:42s} {t_py:10.1f} {'-':>10s} {'-':>9s}")
            continue
        if not same(fn(ref), fn(ext)):
            raise SystemExit(f"backends disagree on {name}")
        t_c = min(timeit.repeat(lambda: fn(ext), number=1, repeat=args.repeat)) * 1e3
        print(f"{name:42s} {t_py:10.1f} {t_c:10.1f} {t_py / t_c:8.1f}x")


if __name__ == "__main__":
    main()
