"""Shared value types: feature vectors, tokens, hashed codes, datasets."""
from dataclasses import dataclass, field
from typing import Literal, Union

import numpy as np

from .errors import IncomparableCodes, InvalidInput, InvalidParameter, InvalidToken, UndefinedSimilarity
from .randomness import check_seed, derive_seed

Scheme = Literal["grp", "urp"]


def as_feature_vector(values, min_dim: int = 2) -> np.ndarray:
    """Validate a single feature vector and return it as a 1-D float64 array."""
    x = np.asarray(values, dtype=np.float64)
    if x.ndim != 1:
        raise InvalidInput(f"feature vector must be 1-D, got shape {x.shape}")
    if x.shape[0] < min_dim:
        raise InvalidInput(f"feature vector needs at least {min_dim} entries, got {x.shape[0]}")
    if not np.all(np.isfinite(x)):
        raise InvalidInput("feature vector has non-finite entries")
    return x


def as_feature_matrix(values, min_dim: int = 2) -> np.ndarray:
    X = np.asarray(values, dtype=np.float64)
    if X.ndim == 1:
        X = X[None, :]
    if X.ndim != 2:
        raise InvalidInput(f"feature matrix must be 2-D, got shape {X.shape}")
    if X.shape[1] < min_dim:
        raise InvalidInput(f"feature vectors need at least {min_dim} entries, got {X.shape[1]}")
    if not np.all(np.isfinite(X)):
        raise InvalidInput("feature matrix has non-finite entries")
    return X


def cosine_similarity(u, v) -> float:
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    if u.shape != v.shape or u.ndim != 1:
        raise InvalidInput(f"dimension mismatch: {u.shape} vs {v.shape}")
    nu = np.linalg.norm(u)
    nv = np.linalg.norm(v)
    if nu == 0 or nv == 0:
        raise UndefinedSimilarity("cosine similarity of a zero vector is undefined")
    return float(np.clip(np.dot(u, v) / (nu * nv), -1.0, 1.0))


@dataclass(frozen=True)
class GrpParams:
    m: int
    q: int

    def __post_init__(self):
        if self.m < 1:
            raise InvalidParameter(f"m must be >= 1, got {self.m}")
        if self.q < 2:
            raise InvalidParameter(f"q must be >= 2, got {self.q}")

    @property
    def alphabet(self) -> int:
        return self.q


@dataclass(frozen=True)
class UrpParams:
    m: int
    k: int
    p: int

    def __post_init__(self):
        if self.m < 1:
            raise InvalidParameter(f"m must be >= 1, got {self.m}")
        if self.k <= 1:
            raise InvalidParameter(f"window size k must be > 1, got {self.k}")
        if self.p < 1:
            raise InvalidParameter(f"Hadamard order p must be >= 1, got {self.p}")

    @property
    def alphabet(self) -> int:
        return self.k


Params = Union[GrpParams, UrpParams]


@dataclass(frozen=True)
class IomToken:
    """The revocable second factor: scheme, master seed and parameters."""

    scheme: Scheme
    seed: int
    params: Params

    def __post_init__(self):
        check_seed(self.seed)
        expected = {"grp": GrpParams, "urp": UrpParams}.get(self.scheme)
        if expected is None:
            raise InvalidToken(f"unknown scheme {self.scheme!r}")
        if not isinstance(self.params, expected):
            raise InvalidToken(f"{self.scheme} token carries {type(self.params).__name__}")

    @classmethod
    def grp(cls, seed: int, m: int, q: int) -> "IomToken":
        return cls("grp", seed, GrpParams(m, q))

    @classmethod
    def urp(cls, seed: int, m: int, k: int, p: int) -> "IomToken":
        return cls("urp", seed, UrpParams(m, k, p))

    @property
    def m(self) -> int:
        return self.params.m

    @property
    def alphabet(self) -> int:
        return self.params.alphabet

    def derive(self, *path: int) -> "IomToken":
        """Same scheme and parameters under a seed derived from this one."""
        return IomToken(self.scheme, derive_seed(self.seed, *path), self.params)

    def with_seed(self, seed: int) -> "IomToken":
        return IomToken(self.scheme, seed, self.params)


@dataclass(frozen=True)
class HashedCode:
    scheme: Scheme
    indices: tuple
    alphabet: int

    def __post_init__(self):
        idx = tuple(int(t) for t in self.indices)
        object.__setattr__(self, "indices", idx)
        if not idx:
            raise InvalidInput("hashed code is empty")
        if min(idx) < 1 or max(idx) > self.alphabet:
            raise InvalidInput(f"hashed code index outside [1, {self.alphabet}]")

    @property
    def m(self) -> int:
        return len(self.indices)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.indices, dtype=np.int64)

    def check_comparable(self, other: "HashedCode") -> None:
        if self.scheme != other.scheme:
            raise IncomparableCodes(f"scheme mismatch: {self.scheme} vs {other.scheme}")
        if self.m != other.m:
            raise IncomparableCodes(f"length mismatch: {self.m} vs {other.m}")
        if self.alphabet != other.alphabet:
            raise IncomparableCodes(f"alphabet mismatch: {self.alphabet} vs {other.alphabet}")


@dataclass
class Dataset:
    """users x samples collection of feature vectors, stored row-wise."""

    user_ids: list
    sample_ids: list
    features: np.ndarray = field(repr=False)

    def __post_init__(self):
        self.user_ids = [str(u) for u in self.user_ids]
        self.sample_ids = [str(s) for s in self.sample_ids]
        self.features = as_feature_matrix(self.features)
        n = self.features.shape[0]
        if len(self.user_ids) != n or len(self.sample_ids) != n:
            raise InvalidInput("ids and feature rows differ in length")
        keys = list(zip(self.user_ids, self.sample_ids))
        if len(set(keys)) != len(keys):
            raise InvalidInput("duplicate (user_id, sample_id) pair")

    def __len__(self) -> int:
        return self.features.shape[0]

    def __eq__(self, other) -> bool:
        if not isinstance(other, Dataset):
            return NotImplemented
        return (
            self.user_ids == other.user_ids
            and self.sample_ids == other.sample_ids
            and self.features.shape == other.features.shape
            and bool(np.array_equal(self.features, other.features))
        )

    @property
    def dim(self) -> int:
        return self.features.shape[1]

    def records(self):
        for u, s, x in zip(self.user_ids, self.sample_ids, self.features):
            yield u, s, x

    def groups(self) -> dict:
        """user_id -> row indices, both in order of first appearance."""
        out = {}
        for row, u in enumerate(self.user_ids):
            out.setdefault(u, []).append(row)
        return out
