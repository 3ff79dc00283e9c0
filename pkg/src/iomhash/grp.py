"""Gaussian random projection IoM hashing.

Hash ``i`` projects ``x`` onto the ``q`` columns of a Gaussian matrix ``W^i``
regenerated from the token seed and records the 1-based index of the largest
projection. Ties go to the smallest index.
"""
import numpy as np

from .core import HashedCode, IomToken, as_feature_matrix, as_feature_vector
from .errors import InvalidInput, InvalidToken
from .randomness import gaussian_matrices

# matrix entries generated per block; bounds memory for very large m
_BLOCK = 1 << 21


def _check_token(token: IomToken) -> None:
    if not isinstance(token, IomToken) or token.scheme != "grp":
        raise InvalidToken("grp hashing needs a GRP token")


def grp_hash_many(X, token: IomToken) -> np.ndarray:
    """Hash every row of ``X``; returns an (n, m) int64 array with entries in [1, q]."""
    _check_token(token)
    X = as_feature_matrix(X, min_dim=1)
    n, d = X.shape
    m, q = token.params.m, token.params.q
    out = np.empty((n, m), dtype=np.int64)
    step = max(1, _BLOCK // (d * q))
    for a in range(0, m, step):
        b = min(m, a + step)
        W = gaussian_matrices(token.seed, d, q, a + 1, b + 1)
        proj = np.matmul(X, W)  # (b - a, n, q)
        out[:, a:b] = proj.argmax(axis=-1).T + 1
    return out


def grp_hash(x, token: IomToken) -> HashedCode:
    x = as_feature_vector(x, min_dim=1)
    row = grp_hash_many(x[None, :], token)[0]
    return HashedCode("grp", tuple(row.tolist()), token.params.q)


def grp_hash_with_matrices(x, matrices) -> HashedCode:
    """Hash ``x`` against explicit d x q matrices instead of seed-derived ones."""
    x = as_feature_vector(x, min_dim=1)
    W = np.asarray(matrices, dtype=np.float64)
    if W.ndim == 2:
        W = W[None]
    if W.ndim != 3 or W.shape[1] != x.shape[0] or W.shape[2] < 2:
        raise InvalidInput(f"matrices of shape {W.shape} do not fit a {x.shape[0]}-dim vector")
    idx = np.einsum("d,mdq->mq", x, W).argmax(axis=-1) + 1
    return HashedCode("grp", tuple(idx.tolist()), W.shape[2])
