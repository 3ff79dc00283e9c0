"""Scheme dispatch over the two IoM realisations."""
from .core import HashedCode, IomToken
from .errors import InvalidToken
from .grp import grp_hash, grp_hash_many
from .urp import urp_hash, urp_hash_many


def iom_hash(x, token: IomToken) -> HashedCode:
    if token.scheme == "grp":
        return grp_hash(x, token)
    if token.scheme == "urp":
        return urp_hash(x, token)
    raise InvalidToken(f"unknown scheme {token.scheme!r}")


def iom_hash_many(X, token: IomToken):
    if token.scheme == "grp":
        return grp_hash_many(X, token)
    if token.scheme == "urp":
        return urp_hash_many(X, token)
    raise InvalidToken(f"unknown scheme {token.scheme!r}")
