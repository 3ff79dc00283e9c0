"""Collision-count matching of hashed codes."""
from dataclasses import dataclass
from typing import Literal

import numpy as np

from ._backend import kernels
from .core import HashedCode
from .errors import IncomparableCodes, InvalidThreshold


@dataclass(frozen=True)
class MatchScore:
    collisions: int
    m: int

    @property
    def score(self) -> float:
        return self.collisions / self.m


def collision_score(enrolled: HashedCode, query: HashedCode) -> MatchScore:
    enrolled.check_comparable(query)
    hits = int(np.count_nonzero(enrolled.as_array() == query.as_array()))
    return MatchScore(hits, enrolled.m)


def decide(score, threshold: float) -> Literal["accept", "reject"]:
    """Accept when the score reaches the threshold (inclusive)."""
    if not 0.0 <= threshold <= 1.0:
        raise InvalidThreshold(f"threshold must lie in [0, 1], got {threshold}")
    value = score.score if isinstance(score, MatchScore) else float(score)
    return "accept" if value >= threshold else "reject"


def _as_codes(A):
    A = np.asarray(A, dtype=np.int64)
    return A[None, :] if A.ndim == 1 else A


def pairwise_scores(A, B) -> np.ndarray:
    """Score matrix between every row of ``A`` and every row of ``B``."""
    A, B = _as_codes(A), _as_codes(B)
    if A.shape[1] != B.shape[1]:
        raise IncomparableCodes(f"length mismatch: {A.shape[1]} vs {B.shape[1]}")
    return kernels.collision_counts(A, B) / A.shape[1]


def rowwise_scores(A, B) -> np.ndarray:
    """Score of row ``r`` of ``A`` against row ``r`` of ``B``."""
    A, B = _as_codes(A), _as_codes(B)
    if A.shape != B.shape:
        raise IncomparableCodes(f"shape mismatch: {A.shape} vs {B.shape}")
    return (A == B).sum(axis=1) / A.shape[1]
