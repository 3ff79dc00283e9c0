"""Index-of-Max cancelable biometric hashing."""
from ._backend import BACKEND
from .core import Dataset, GrpParams, HashedCode, IomToken, UrpParams, cosine_similarity
from .grp import grp_hash, grp_hash_many
from .hashing import iom_hash, iom_hash_many
from .matcher import MatchScore, collision_score, decide
from .urp import urp_hash, urp_hash_many

__all__ = [
    "BACKEND",
    "Dataset",
    "GrpParams",
    "HashedCode",
    "IomToken",
    "MatchScore",
    "UrpParams",
    "collision_score",
    "cosine_similarity",
    "decide",
    "grp_hash",
    "grp_hash_many",
    "iom_hash",
    "iom_hash_many",
    "urp_hash",
    "urp_hash_many",
]
