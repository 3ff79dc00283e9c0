"""Seed-addressable random streams for hash-function generation.

Every hash function draws from its own stream, keyed by ``(master, i, l)``:
``i`` is the 1-based hash index and ``l`` the 1-based slot (the permutation
number within a URP hash; always 1 for GRP). Keys are mixed into a 64-bit
child seed with the splitmix64 finaliser, so any function can be regenerated
without replaying the others.

Stream draw ``c`` of child seed ``s`` is ``mix64(s + (c + 1) * 0x9E3779B97F4A7C15)``.
Gaussians come from Box-Muller on consecutive draw pairs; permutations from a
forward Fisher-Yates shuffle with modulo rejection.
"""
from dataclasses import dataclass

import numpy as np

from ._backend import kernels
from ._kernels_py import GOLDEN, MIX1, MIX2
from ._kernels_py import mix64 as _mix64_array
from .errors import InvalidParameter

MASK64 = (1 << 64) - 1
_INDEX_LIMIT = 1 << 32


def mix64(z: int) -> int:
    """splitmix64 finaliser on a Python int (a bijection on 64-bit words)."""
    z &= MASK64
    z = ((z ^ (z >> 30)) * MIX1) & MASK64
    z = ((z ^ (z >> 27)) * MIX2) & MASK64
    return z ^ (z >> 31)


def check_seed(seed) -> int:
    if isinstance(seed, (bool, np.bool_)) or not isinstance(seed, (int, np.integer)):
        raise InvalidParameter(f"seed must be an integer, got {seed!r}")
    seed = int(seed)
    if not 0 <= seed <= MASK64:
        raise InvalidParameter(f"seed must be a 64-bit unsigned integer, got {seed}")
    return seed


def child_seed(master: int, i: int, l: int = 1) -> int:
    """Child seed for hash ``i``, slot ``l``. Injective in ``(i, l)`` for a fixed master."""
    master = check_seed(master)
    if not (1 <= i < _INDEX_LIMIT and 1 <= l < _INDEX_LIMIT):
        raise InvalidParameter(f"child indices out of range: i={i}, l={l}")
    return mix64(master + GOLDEN * mix64((i << 32) | l))


def child_seeds(master: int, i, l) -> np.ndarray:
    """Vectorised :func:`child_seed` over broadcastable index arrays."""
    master = check_seed(master)
    i = np.asarray(i, dtype=np.int64)
    l = np.asarray(l, dtype=np.int64)
    if i.size and (i.min() < 1 or i.max() >= _INDEX_LIMIT):
        raise InvalidParameter("hash index out of range")
    if l.size and (l.min() < 1 or l.max() >= _INDEX_LIMIT):
        raise InvalidParameter("slot index out of range")
    packed = (i.astype(np.uint64) << np.uint64(32)) | l.astype(np.uint64)
    inner = _mix64_array(packed)
    return _mix64_array(np.uint64(master) + np.uint64(GOLDEN) * inner)


def derive_seed(master: int, *path: int) -> int:
    """Seed for a derived token or sub-experiment, e.g. ``derive_seed(s, FRESH, 7)``."""
    h = mix64(check_seed(master) ^ 0x6A09E667F3BCC908)
    for v in path:
        h = mix64(h + GOLDEN * (mix64(int(v) & MASK64) | 1))
    return h


@dataclass(frozen=True)
class ChildKey:
    master: int
    hash_index: int
    slot_index: int = 1

    @property
    def seed(self) -> int:
        return child_seed(self.master, self.hash_index, self.slot_index)


def normals(seeds, count: int) -> np.ndarray:
    """``count`` standard normals from each seed's stream, shape (n_seeds, count)."""
    seeds = np.asarray(seeds, dtype=np.uint64).reshape(-1)
    npairs = (count + 1) // 2
    u1, u2 = kernels.uniform_pairs(seeds, npairs)
    # transcendental step stays in numpy so both kernel backends agree bitwise
    r = np.sqrt(-2.0 * np.log(u1))
    theta = (2.0 * np.pi) * u2
    z = np.empty((seeds.shape[0], 2 * npairs), dtype=np.float64)
    z[:, 0::2] = r * np.cos(theta)
    z[:, 1::2] = r * np.sin(theta)
    return z[:, :count]


def gaussian_matrix(key: ChildKey, d: int, q: int) -> np.ndarray:
    """d x q matrix of standard normals; column j holds stream draws ``j*d .. j*d+d-1``."""
    if d < 1 or q < 2:
        raise InvalidParameter(f"gaussian_matrix needs d >= 1 and q >= 2, got d={d}, q={q}")
    z = normals([key.seed], d * q)[0]
    return z.reshape(q, d).T.copy()


def gaussian_matrices(master: int, d: int, q: int, start: int, stop: int) -> np.ndarray:
    """Stack of matrices for hashes ``start .. stop-1`` (1-based), shape (stop-start, d, q)."""
    if d < 1 or q < 2:
        raise InvalidParameter(f"gaussian_matrix needs d >= 1 and q >= 2, got d={d}, q={q}")
    seeds = child_seeds(master, np.arange(start, stop), 1)
    z = normals(seeds, d * q)
    return z.reshape(-1, q, d).transpose(0, 2, 1)


def permutation(key: ChildKey, d: int) -> np.ndarray:
    """Uniform permutation of ``1..d`` (1-based, like the hashed-code alphabet)."""
    if d < 1:
        raise InvalidParameter(f"permutation needs d >= 1, got {d}")
    return kernels.perm_prefix(np.array([key.seed], dtype=np.uint64), d, d)[0] + 1


def permutation_prefixes(master: int, m_start: int, m_stop: int, p: int, d: int, k: int) -> np.ndarray:
    """0-based first-``k`` prefixes of permutations ``(i, l)``, shape (m, p, k).

    Each prefix equals ``permutation(ChildKey(master, i, l), d)[:k] - 1``.
    """
    i = np.arange(m_start, m_stop)[:, None]
    l = np.arange(1, p + 1)[None, :]
    seeds = child_seeds(master, i, l).reshape(-1)
    return kernels.perm_prefix(seeds, d, k).reshape(m_stop - m_start, p, k)


def uniform_ints(seed: int, count: int, bound: int) -> np.ndarray:
    """``count`` integers uniform on ``[0, bound)`` by modulo rejection on one stream."""
    if bound < 1:
        raise InvalidParameter(f"bound must be >= 1, got {bound}")
    seed = check_seed(seed)
    thr = np.uint64((2**64 - bound) % bound)
    draws = kernels.stream_u64(np.array([seed], dtype=np.uint64), 0, count)[0]
    ok = draws[draws >= thr]
    used = count
    while ok.shape[0] < count:
        extra = kernels.stream_u64(np.array([seed], dtype=np.uint64), used, count - ok.shape[0])[0]
        used += extra.shape[0]
        ok = np.concatenate([ok, extra[extra >= thr]])
    return (ok % np.uint64(bound)).astype(np.int64)
