"""Uniformly random permutation IoM hashing with a p-order Hadamard product.

For hash ``i`` the feature vector is permuted ``p`` times with permutations
``(i, 1) .. (i, p)``, the copies are multiplied element-wise, and the 1-based
index of the largest of the first ``k`` products is recorded. Only the first
``k`` positions of each permutation are ever needed, so only those are drawn.

The factors at each position are multiplied in ascending feature-index order.
Floating-point products depend on operand order, so without this two positions
holding the same multiset of entries could differ in the last bit and break
the smallest-index rule for exact ties.
"""
import numpy as np

from ._backend import kernels
from .core import HashedCode, IomToken, as_feature_matrix, as_feature_vector
from .errors import InvalidInput, InvalidParameter, InvalidToken
from .randomness import permutation_prefixes

# permutation-prefix entries generated per block
_BLOCK = 1 << 20


def _check(token: IomToken, d: int) -> None:
    if not isinstance(token, IomToken) or token.scheme != "urp":
        raise InvalidToken("urp hashing needs a URP token")
    if token.params.k > d:
        raise InvalidParameter(f"window size k={token.params.k} exceeds dimension d={d}")


def urp_hash_many(X, token: IomToken) -> np.ndarray:
    """Hash every row of ``X``; returns an (n, m) int64 array with entries in [1, k]."""
    X = as_feature_matrix(X, min_dim=2)
    n, d = X.shape
    _check(token, d)
    m, k, p = token.params.m, token.params.k, token.params.p
    out = np.empty((n, m), dtype=np.int64)
    step = max(1, _BLOCK // (p * k))
    for a in range(0, m, step):
        b = min(m, a + step)
        idx = np.sort(permutation_prefixes(token.seed, a + 1, b + 1, p, d, k), axis=1)
        out[:, a:b] = kernels.hadamard_argmax(X, idx) + 1
    return out


def urp_hash(x, token: IomToken) -> HashedCode:
    x = as_feature_vector(x)
    row = urp_hash_many(x[None, :], token)[0]
    return HashedCode("urp", tuple(row.tolist()), token.params.k)


def urp_hash_with_permutations(x, permutations, k: int) -> HashedCode:
    """Hash ``x`` with explicit 1-based permutations, shaped (m, p, d) or (p, d) for m = 1."""
    x = as_feature_vector(x)
    perms = np.asarray(permutations, dtype=np.int64)
    if perms.ndim == 2:
        perms = perms[None]
    d = x.shape[0]
    if perms.ndim != 3 or perms.shape[2] != d:
        raise InvalidInput(f"permutations of shape {perms.shape} do not fit a {d}-dim vector")
    if not 1 < k <= d:
        raise InvalidParameter(f"window size must satisfy 1 < k <= d, got k={k}, d={d}")
    expected = np.arange(1, d + 1)
    if not all(np.array_equal(np.sort(row), expected) for row in perms.reshape(-1, d)):
        raise InvalidInput("rows are not permutations of 1..d")
    idx = np.ascontiguousarray(np.sort(perms[:, :, :k] - 1, axis=1))
    t = kernels.hadamard_argmax(x[None, :], idx)[0] + 1
    return HashedCode("urp", tuple(t.tolist()), k)
