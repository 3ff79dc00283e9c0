"""Vectorised numpy kernels. Reference semantics for ``_kernels_c``.

Stream definition shared by both backends: draw ``c`` (0-based counter) of a
stream with 64-bit seed ``s`` is ``mix64(s + (c + 1) * GOLDEN)`` in wrapping
uint64 arithmetic, ``mix64`` being the splitmix64 finaliser.
"""
import numpy as np

GOLDEN = 0x9E3779B97F4A7C15
MIX1 = 0xBF58476D1CE4E5B9
MIX2 = 0x94D049BB133111EB

_G = np.uint64(GOLDEN)
_M1 = np.uint64(MIX1)
_M2 = np.uint64(MIX2)
_S30, _S27, _S31, _S11 = np.uint64(30), np.uint64(27), np.uint64(31), np.uint64(11)
_ONE = np.uint64(1)
_INV53 = 2.0**-53

# rows per block when materialising (n, chunk, k) intermediates
_BLOCK_ELEMS = 1 << 22


def mix64(z):
    z = np.asarray(z, dtype=np.uint64)
    z = (z ^ (z >> _S30)) * _M1
    z = (z ^ (z >> _S27)) * _M2
    return z ^ (z >> _S31)


def _draw(seeds, counters):
    return mix64(seeds + (counters + _ONE) * _G)


def stream_u64(seeds, start, count):
    """(n, count) block of draws ``start .. start+count-1`` for each seed."""
    seeds = np.asarray(seeds, dtype=np.uint64).reshape(-1)
    ctr = np.arange(start, start + count, dtype=np.uint64)
    return mix64(seeds[:, None] + (ctr[None, :] + _ONE) * _G)


def uniform_pairs(seeds, npairs):
    """Box-Muller inputs: u1 in (0, 1] from even draws, u2 in [0, 1) from odd draws."""
    raw = stream_u64(seeds, 0, 2 * npairs)
    top = raw >> _S11
    u1 = (top[:, 0::2] + _ONE).astype(np.float64) * _INV53
    u2 = top[:, 1::2].astype(np.float64) * _INV53
    return u1, u2


def perm_prefix(seeds, d, k):
    """First ``k`` entries (0-based) of a forward Fisher-Yates shuffle of ``range(d)``.

    Step ``i`` swaps position ``i`` with ``i + r``, ``r`` uniform on ``[0, d - i)``
    drawn by modulo rejection, so the prefix is final after ``k`` steps.
    """
    seeds = np.asarray(seeds, dtype=np.uint64).reshape(-1)
    n = seeds.shape[0]
    perm = np.tile(np.arange(d, dtype=np.int64), (n, 1))
    ctr = np.zeros(n, dtype=np.uint64)
    rows = np.arange(n)
    for i in range(min(k, d - 1)):
        bound = d - i
        thr = np.uint64((2**64 - bound) % bound)
        x = _draw(seeds, ctr)
        ctr += _ONE
        rej = x < thr
        while rej.any():
            x[rej] = _draw(seeds[rej], ctr[rej])
            ctr[rej] += _ONE
            rej = x < thr
        j = i + (x % np.uint64(bound)).astype(np.int64)
        held = perm[:, i].copy()
        perm[:, i] = perm[rows, j]
        perm[rows, j] = held
    return np.ascontiguousarray(perm[:, :k])


def hadamard_argmax(X, idx):
    """argmax over ``j`` of ``prod_l X[:, idx[i, l, j]]`` for every row and hash ``i``.

    X is (n, d) float64, idx is (m, p, k) int64 (0-based). Returns (n, m) int64,
    0-based, first maximum wins. Products accumulate left to right in ``l``.
    """
    X = np.ascontiguousarray(X, dtype=np.float64)
    n = X.shape[0]
    m, p, k = idx.shape
    out = np.empty((n, m), dtype=np.int64)
    step = max(1, _BLOCK_ELEMS // max(1, n * k))
    for a in range(0, m, step):
        b = min(m, a + step)
        prod = X[:, idx[a:b, 0, :]]
        for l in range(1, p):
            prod *= X[:, idx[a:b, l, :]]
        out[:, a:b] = prod.argmax(axis=-1)
    return out


def collision_counts(A, B):
    """(na, nb) matrix of agreement counts between rows of two code arrays."""
    A = np.asarray(A)
    B = np.asarray(B)
    na, m = A.shape
    out = np.empty((na, B.shape[0]), dtype=np.int64)
    step = max(1, _BLOCK_ELEMS // max(1, B.shape[0] * m))
    for a in range(0, na, step):
        b = min(na, a + step)
        out[a:b] = (A[a:b, None, :] == B[None, :, :]).sum(axis=-1)
    return out
