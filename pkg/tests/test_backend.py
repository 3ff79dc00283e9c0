"""The compiled kernels must agree bit-for-bit with the numpy reference."""
import os
import subprocess
import sys

import numpy as np
import pytest

from iomhash import _kernels_py as ref
from iomhash._backend import compiled_kernels

ext = compiled_kernels()
needs_ext = pytest.mark.skipif(ext is None, reason="compiled extension not built")

SEEDS = np.array([0, 1, 2**63 + 5, 2**64 - 1, 0x1234ABCD], dtype=np.uint64)


@needs_ext
def test_stream():
    assert np.array_equal(ext.stream_u64(SEEDS, 3, 17), ref.stream_u64(SEEDS, 3, 17))


@needs_ext
def test_uniform_pairs():
    for a, b in zip(ext.uniform_pairs(SEEDS, 33), ref.uniform_pairs(SEEDS, 33)):
        assert np.array_equal(a, b)


@needs_ext
@pytest.mark.parametrize("d,k", [(1, 1), (7, 3), (50, 50), (300, 128)])
def test_perm_prefix(d, k):
    assert np.array_equal(ext.perm_prefix(SEEDS, d, k), ref.perm_prefix(SEEDS, d, k))


@needs_ext
def test_hadamard_argmax(rng):
    X = rng.normal(size=(9, 20))
    X[0] = 1.0  # all ties
    idx = np.ascontiguousarray(rng.integers(0, 20, size=(40, 3, 6)), dtype=np.int64)
    assert np.array_equal(ext.hadamard_argmax(X, idx), ref.hadamard_argmax(X, idx))


@needs_ext
def test_collision_counts(rng):
    A = rng.integers(1, 5, size=(6, 50), dtype=np.int64)
    B = rng.integers(1, 5, size=(4, 50), dtype=np.int64)
    assert np.array_equal(ext.collision_counts(A, B), ref.collision_counts(A, B))


PROBE = """
import numpy as np
from iomhash import BACKEND, IomToken, iom_hash_many
X = np.linspace(-1, 1, 60).reshape(3, 20)
print(BACKEND, iom_hash_many(X, IomToken.urp(5, 30, 8, 2)).sum(), iom_hash_many(X, IomToken.grp(5, 30, 8)).sum())
"""


def _run(env_value):
    env = dict(os.environ)
    env.pop("IOMHASH_PURE_PYTHON", None)
    if env_value is not None:
        env["IOMHASH_PURE_PYTHON"] = env_value
    out = subprocess.run([sys.executable, "-c", PROBE], env=env, capture_output=True, text=True, check=True)
    return out.stdout.split()


def test_pure_python_fallback_selected_by_env():
    backend, *sums = _run("1")
    assert backend == "python"
    default_backend, *default_sums = _run(None)
    assert default_backend == ("cython" if ext is not None else "python")
    assert sums == default_sums
