from fractions import Fraction

import numpy as np
import pytest

from iomhash.core import Dataset, IomToken
from iomhash.dataio import SyntheticSpec, synth_dataset
from iomhash.errors import InvalidParameter, ProtocolInfeasible, UnsupportedAttack
from iomhash.evaluation import (
    arm_order_attack,
    arm_trial,
    brute_force_attack_scores,
    eer,
    fvc_scores,
    parameter_sweep,
    pseudo_genuine_scores,
    pseudo_imposter_scores,
    roc_points,
    run_protocol,
    sign_test,
)
from iomhash.urp import urp_hash_many

URP = IomToken.urp(3, 200, 16, 2)
GRP = IomToken.grp(3, 200, 8)


def grid_dataset(users, samples, dim=16, seed=0):
    return synth_dataset(SyntheticSpec(users, samples, dim, seed=seed))


def brute_eer(g, i):
    """Oracle: try every observed threshold and keep the closest FAR/FRR pair."""
    best = None
    for t in sorted(set(g) | set(i)):
        far = Fraction(sum(s >= t for s in i), len(i))
        frr = Fraction(sum(s < t for s in g), len(g))
        if best is None or abs(far - frr) < best[0]:
            best = (abs(far - frr), (far + frr) / 2)
    return float(best[1])


def test_eer_perfect_and_chance():
    assert eer([1.0] * 5, [0.0] * 5).eer == 0.0
    s = [0.1, 0.4, 0.4, 0.9]
    assert eer(s, s).eer == 0.5


def test_eer_small_example():
    g, i = [0.9, 0.8, 0.4], [0.5, 0.3, 0.2]
    pt = eer(g, i)
    assert pt.eer == pytest.approx(brute_eer(g, i)) == pytest.approx(1 / 3)
    assert eer(g, i, method="rocch").eer == pytest.approx(1 / 6)


def test_eer_matches_brute_oracle(rng):
    for _ in range(20):
        g = rng.integers(0, 20, size=15) / 20
        i = rng.integers(0, 12, size=25) / 20
        assert eer(g, i).eer == pytest.approx(brute_eer(list(g), list(i)))


def test_rocch_never_above_sweep(rng):
    for _ in range(20):
        g, i = rng.random(10), rng.random(10) * 0.8
        assert eer(g, i, method="rocch").eer <= eer(g, i).eer + 1e-12


def test_roc_monotone(rng):
    taus, far, frr = roc_points(rng.random(30), rng.random(30))
    assert np.all(np.diff(far) <= 0) and np.all(np.diff(frr) >= 0)


def test_fvc_counts():
    g, i = fvc_scores(grid_dataset(100, 5), URP)
    assert len(g) == 1000 and len(i) == 4950
    g, i = fvc_scores(grid_dataset(2, 2), URP)
    assert len(g) == 2 and len(i) == 1


def test_fvc_needs_two_users():
    with pytest.raises(ProtocolInfeasible):
        fvc_scores(grid_dataset(1, 3), URP)


def test_genuine_above_imposter(small_dataset):
    for token in (URP, GRP):
        g, i = fvc_scores(small_dataset, token)
        assert g.mean > i.mean + 0.1


def test_per_user_policy_runs(small_dataset):
    g, i = fvc_scores(small_dataset, URP, token_policy="per_user")
    assert g.mean > i.mean
    assert abs(i.mean - 1 / 16) < 0.02


def test_pseudo_imposter_counts_and_mean():
    ds = grid_dataset(10, 5, dim=32)
    s = pseudo_imposter_scores(ds, URP, n_tokens=10)
    assert len(s) == 500
    assert abs(s.mean - 1 / 16) < 0.02
    assert len(pseudo_imposter_scores(grid_dataset(1, 1), URP, n_tokens=2)) == 2


def test_pseudo_genuine_counts():
    assert len(pseudo_genuine_scores(grid_dataset(100, 5), URP)) == 1000
    assert len(pseudo_genuine_scores(grid_dataset(1, 2), URP)) == 1


def test_brute_force_attack_minimal():
    ds = grid_dataset(1, 1, dim=4)
    s = brute_force_attack_scores(ds, IomToken.grp(1, 1, 2), n_random_codes=5)
    assert set(s.scores.tolist()) <= {0.0, 1.0}


def test_brute_force_attack_mean(small_dataset):
    s = brute_force_attack_scores(small_dataset, IomToken.urp(1, 600, 16, 2), n_random_codes=50)
    assert abs(s.mean - 1 / 16) < 0.005


@pytest.mark.parametrize("protocol", ["fvc", "revocability", "unlinkability", "bruteforce"])
def test_run_protocol(small_dataset, protocol):
    rep = run_protocol(small_dataset, URP, protocol, n_tokens=3, n_random_codes=5)
    assert 0.0 <= rep.eer <= 1.0
    assert rep.config["protocol"] == protocol
    assert rep.summary()["eer"] == rep.eer


def test_run_protocol_unknown(small_dataset):
    with pytest.raises(InvalidParameter):
        run_protocol(small_dataset, URP, "nope")


def test_sweep_shape(small_dataset):
    rows = parameter_sweep(small_dataset, URP, {"m": [5, 50]}, reps=2)
    assert [r["m"] for r in rows] == [5, 50]
    assert all(len(r["eers"]) == 2 for r in rows)


def test_sign_test():
    wins, n, p = sign_test([1] * 9 + [0], [0] * 9 + [1])
    assert (wins, n) == (9, 10) and p < 0.05
    assert sign_test([1, 1], [1, 1]) == (0, 0, 1.0)


def test_arm_positive_recovers_order():
    rep = arm_trial([0.1, 0.5, 0.3], 200, p=2, seed=1)
    assert rep.status == "consistent"
    assert rep.order == (2, 3, 1)


def test_arm_mixed_sign_contradiction():
    rep = arm_trial([-0.2, 0.5, -0.1], 200, p=2, seed=1)
    assert rep.status == "contradiction"
    assert rep.witnesses


def test_arm_single_code():
    token = IomToken.urp(4, 1, 2, 1)
    code = urp_hash_many(np.array([[0.3, 0.8]]), token)[0]
    rep = arm_order_attack(2, [(code, token)])
    assert len(rep.constraints) == 1 and rep.status == "consistent"


def test_arm_rejects_grp():
    with pytest.raises(UnsupportedAttack):
        arm_order_attack(3, [((1,), IomToken.grp(1, 1, 2))])


def test_dataset_with_identical_users_scores_one():
    X = np.array([[1.0, 2.0, 3.0], [1.0, 2.0, 3.0], [3.0, 1.0, 2.0], [3.0, 1.0, 2.0]])
    ds = Dataset(["a", "a", "b", "b"], ["1", "2", "1", "2"], X)
    g, _ = fvc_scores(ds, IomToken.urp(1, 20, 3, 2))
    assert np.all(g.scores == 1.0)
