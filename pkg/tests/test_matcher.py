import numpy as np
import pytest

from iomhash.core import HashedCode
from iomhash.errors import IncomparableCodes, InvalidThreshold
from iomhash.matcher import collision_score, decide, pairwise_scores, rowwise_scores


def code(*idx, alphabet=8):
    return HashedCode("urp", idx, alphabet)


def test_self_match():
    a = code(1, 2, 3)
    assert collision_score(a, a).score == 1.0


def test_disjoint():
    assert collision_score(code(1, 2, 3), code(2, 3, 1)).score == 0.0


def test_direct_count():
    s = collision_score(code(1, 2, 3, 4), code(1, 5, 3, 4))
    assert s.collisions == 3 and s.score == 0.75


def test_incomparable():
    with pytest.raises(IncomparableCodes):
        collision_score(code(1, 2), code(1, 2, 3))
    with pytest.raises(IncomparableCodes):
        collision_score(code(1, 2), HashedCode("grp", (1, 2), 8))


@pytest.mark.parametrize("score,tau,expected", [(0.12, 0.11, "accept"), (0.0, 0.0, "accept"), (0.5, 0.51, "reject")])
def test_decide(score, tau, expected):
    assert decide(score, tau) == expected


def test_decide_bad_threshold():
    with pytest.raises(InvalidThreshold):
        decide(0.5, 1.5)


def test_pairwise_matches_loop(rng):
    A = rng.integers(1, 4, size=(5, 30))
    B = rng.integers(1, 4, size=(7, 30))
    S = pairwise_scores(A, B)
    for i in range(5):
        for j in range(7):
            assert S[i, j] == pytest.approx((A[i] == B[j]).mean())
    assert np.allclose(rowwise_scores(A, A), 1.0)
