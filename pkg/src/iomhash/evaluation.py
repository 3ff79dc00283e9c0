"""Verification protocols, EER, revocability/unlinkability and attack harnesses."""
import graphlib
import itertools
import math
from collections import Counter
from dataclasses import dataclass, field, replace
from typing import Literal, NamedTuple

import numpy as np
from scipy import stats

from .core import Dataset, IomToken
from .errors import InvalidInput, InvalidParameter, ProtocolInfeasible, UnsupportedAttack
from .hashing import iom_hash_many
from .matcher import pairwise_scores, rowwise_scores
from .randomness import derive_seed, permutation_prefixes, uniform_ints

# derive_seed path tags, one per experiment role
USER_TAG = 1
FRESH_TAG = 2
PSEUDO_GENUINE_TAG = 3
ATTACK_TAG = 4
SWEEP_TAG = 5
ARM_TAG = 6

Label = Literal["genuine", "imposter", "pseudo_genuine", "pseudo_imposter", "brute_force_attack"]


@dataclass
class ScoreSet:
    label: Label
    scores: np.ndarray = field(repr=False)

    def __post_init__(self):
        self.scores = np.asarray(self.scores, dtype=np.float64).reshape(-1)
        if self.scores.size == 0:
            raise InvalidInput(f"{self.label} score set is empty")
        if self.scores.min() < 0.0 or self.scores.max() > 1.0:
            raise InvalidInput(f"{self.label} scores fall outside [0, 1]")

    def __len__(self):
        return self.scores.shape[0]

    @property
    def mean(self) -> float:
        return float(self.scores.mean())


class EerPoint(NamedTuple):
    eer: float
    threshold: float


@dataclass
class EvalReport:
    eer: float
    threshold: float
    scores: dict
    config: dict = field(default_factory=dict)
    stats: dict = field(default_factory=dict)

    def summary(self) -> dict:
        out = {"eer": self.eer, "threshold": self.threshold}
        for label, s in self.scores.items():
            out[f"n_{label}"] = len(s)
            out[f"mean_{label}"] = s.mean
        out.update(self.stats)
        return out


# ---------------------------------------------------------------------------
# error rates


def _sorted_scores(s):
    return np.sort(s.scores if isinstance(s, ScoreSet) else np.asarray(s, dtype=np.float64).reshape(-1))


def roc_points(genuine, imposter):
    """(threshold, FAR, FRR) at every observed score; accept means score >= threshold."""
    g = _sorted_scores(genuine)
    i = _sorted_scores(imposter)
    if g.size == 0 or i.size == 0:
        raise InvalidInput("EER needs non-empty genuine and imposter scores")
    taus = np.unique(np.concatenate([g, i]))
    far = 1.0 - np.searchsorted(i, taus, side="left") / i.size
    frr = np.searchsorted(g, taus, side="left") / g.size
    return taus, far, frr


def eer(genuine, imposter, method: Literal["sweep", "rocch"] = "sweep") -> EerPoint:
    """Equal error rate.

    ``sweep`` scans the observed scores as thresholds, takes the one with the
    smallest |FAR - FRR| (smallest threshold on ties) and reports the FAR/FRR
    midpoint there. ``rocch`` intersects the convex hull of the ROC with the
    FAR = FRR diagonal; its threshold is the sweep threshold.
    """
    taus, far, frr = roc_points(genuine, imposter)
    ng, ni = _sorted_scores(genuine).size, _sorted_scores(imposter).size
    # compare |FAR - FRR| on integer counts so exact ties stay ties
    gap = np.abs(np.rint(far * ni).astype(np.int64) * ng - np.rint(frr * ng).astype(np.int64) * ni)
    best = int(np.argmin(gap))
    tau = float(taus[best])
    if method == "sweep":
        return EerPoint(float((far[best] + frr[best]) / 2.0), tau)
    if method == "rocch":
        return EerPoint(_rocch_eer(far, frr), tau)
    raise InvalidParameter(f"unknown EER method {method!r}")


def _rocch_eer(far, frr) -> float:
    pts = sorted(set(zip(far.tolist(), frr.tolist())) | {(0.0, 1.0), (1.0, 0.0)})
    hull = []
    for p in pts:
        while len(hull) >= 2:
            (x1, y1), (x2, y2) = hull[-2], hull[-1]
            if (x2 - x1) * (p[1] - y1) - (y2 - y1) * (p[0] - x1) <= 0:
                hull.pop()
            else:
                break
        hull.append(p)
    for (x1, y1), (x2, y2) in zip(hull, hull[1:]):
        s1, s2 = y1 - x1, y2 - x2
        if s1 >= 0 >= s2:
            if s1 == s2:
                return float(x1)
            t = s1 / (s1 - s2)
            return float(x1 + t * (x2 - x1))
    return 0.5


# ---------------------------------------------------------------------------
# score protocols


def _check_fvc(ds: Dataset):
    groups = ds.groups()
    if len(groups) < 2:
        raise ProtocolInfeasible("protocol needs at least 2 users")
    short = [u for u, rows in groups.items() if len(rows) < 2]
    if short:
        raise ProtocolInfeasible(f"users with fewer than 2 samples: {short[:5]}")
    return groups


def _genuine_pairs(groups):
    a, b = [], []
    for rows in groups.values():
        for r1, r2 in itertools.combinations(rows, 2):
            a.append(r1)
            b.append(r2)
    return np.array(a, dtype=np.int64), np.array(b, dtype=np.int64)


def hash_dataset(ds: Dataset, token: IomToken, token_policy: Literal["shared", "per_user"] = "shared"):
    """(n, m) codes. ``per_user`` hashes each user under its own derived token."""
    if token_policy == "shared":
        return iom_hash_many(ds.features, token)
    if token_policy != "per_user":
        raise InvalidParameter(f"unknown token policy {token_policy!r}")
    codes = np.empty((len(ds), token.m), dtype=np.int64)
    for u, rows in enumerate(ds.groups().values()):
        codes[rows] = iom_hash_many(ds.features[rows], token.derive(USER_TAG, u))
    return codes


def fvc_scores(ds: Dataset, token: IomToken, token_policy: Literal["shared", "per_user"] = "shared"):
    """Genuine scores from every within-user sample pair, imposter scores from
    every pair of different users' first samples."""
    groups = _check_fvc(ds)
    codes = hash_dataset(ds, token, token_policy)
    ga, gb = _genuine_pairs(groups)
    genuine = rowwise_scores(codes[ga], codes[gb])
    firsts = np.array([rows[0] for rows in groups.values()], dtype=np.int64)
    S = pairwise_scores(codes[firsts], codes[firsts])
    imposter = S[np.triu_indices(len(firsts), k=1)]
    return ScoreSet("genuine", genuine), ScoreSet("imposter", imposter)


def pseudo_imposter_scores(ds: Dataset, token: IomToken, n_tokens: int = 100) -> ScoreSet:
    """Each sample's code under ``token`` against its codes under ``n_tokens`` fresh tokens."""
    if n_tokens < 1:
        raise InvalidParameter(f"n_tokens must be >= 1, got {n_tokens}")
    ref = iom_hash_many(ds.features, token)
    out = [rowwise_scores(ref, iom_hash_many(ds.features, token.derive(FRESH_TAG, t))) for t in range(1, n_tokens + 1)]
    return ScoreSet("pseudo_imposter", np.concatenate(out))


def pseudo_genuine_scores(ds: Dataset, token: IomToken) -> ScoreSet:
    """Within-user sample pairs, every sample hashed under its own independent token."""
    groups = ds.groups()
    if any(len(rows) < 2 for rows in groups.values()):
        raise ProtocolInfeasible("every user needs at least 2 samples")
    codes = np.empty((len(ds), token.m), dtype=np.int64)
    for r in range(len(ds)):
        codes[r] = iom_hash_many(ds.features[r : r + 1], token.derive(PSEUDO_GENUINE_TAG, r))[0]
    ga, gb = _genuine_pairs(groups)
    return ScoreSet("pseudo_genuine", rowwise_scores(codes[ga], codes[gb]))


def brute_force_attack_scores(ds: Dataset, token: IomToken, n_random_codes: int = 1000, seed: int = 0) -> ScoreSet:
    """Every enrolled code against ``n_random_codes`` uniformly random codes."""
    if n_random_codes < 1:
        raise InvalidParameter(f"n_random_codes must be >= 1, got {n_random_codes}")
    enrolled = iom_hash_many(ds.features, token)
    m, delta = token.m, token.alphabet
    out = []
    for r in range(len(ds)):
        guesses = uniform_ints(derive_seed(seed, ATTACK_TAG, r), n_random_codes * m, delta).reshape(n_random_codes, m) + 1
        out.append(pairwise_scores(enrolled[r], guesses)[0])
    return ScoreSet("brute_force_attack", np.concatenate(out))


def mean_gap(a: ScoreSet, b: ScoreSet) -> float:
    return abs(a.mean - b.mean)


def run_protocol(
    ds: Dataset,
    token: IomToken,
    protocol: Literal["fvc", "revocability", "unlinkability", "bruteforce"],
    token_policy: Literal["shared", "per_user"] = "shared",
    n_tokens: int = 100,
    n_random_codes: int = 1000,
    seed: int = 0,
) -> EvalReport:
    config = {
        "protocol": protocol, "scheme": token.scheme, "seed": token.seed,
        "params": vars(token.params).copy(), "token_policy": token_policy,
    }
    if protocol == "fvc":
        g, i = fvc_scores(ds, token, token_policy)
        pt = eer(g, i)
        return EvalReport(pt.eer, pt.threshold, {"genuine": g, "imposter": i}, config)
    if protocol == "revocability":
        g, i = fvc_scores(ds, token)
        pi = pseudo_imposter_scores(ds, token, n_tokens)
        pt = eer(g, pi)
        config["n_tokens"] = n_tokens
        return EvalReport(
            pt.eer, pt.threshold, {"genuine": g, "imposter": i, "pseudo_imposter": pi}, config,
            {"eer_pair": "genuine_vs_pseudo_imposter", "gap_pseudo_imposter_imposter": mean_gap(pi, i)},
        )
    if protocol == "unlinkability":
        pg = pseudo_genuine_scores(ds, token)
        pi = pseudo_imposter_scores(ds, token, n_tokens)
        pt = eer(pg, pi)
        config["n_tokens"] = n_tokens
        return EvalReport(
            pt.eer, pt.threshold, {"pseudo_genuine": pg, "pseudo_imposter": pi}, config,
            {"eer_pair": "pseudo_genuine_vs_pseudo_imposter", "mean_gap": mean_gap(pg, pi)},
        )
    if protocol == "bruteforce":
        g, i = fvc_scores(ds, token)
        att = brute_force_attack_scores(ds, token, n_random_codes, seed)
        pt = eer(g, att)
        config["n_random_codes"] = n_random_codes
        return EvalReport(
            pt.eer, pt.threshold, {"genuine": g, "imposter": i, "brute_force_attack": att}, config,
            {"eer_pair": "genuine_vs_brute_force_attack", "attack_mean_minus_imposter_mean": att.mean - i.mean},
        )
    raise InvalidParameter(f"unknown protocol {protocol!r}")


# ---------------------------------------------------------------------------
# parameter sweeps


def parameter_sweep(ds: Dataset, token: IomToken, grid: dict, reps: int = 5, seed: int | None = None):
    """Mean EER over ``reps`` token seeds for every point of ``grid``.

    ``grid`` maps parameter names (m, q for GRP; m, k, p for URP) to value
    lists; unnamed parameters keep the token's values. Repetition ``r`` uses
    the same seed at every grid point so rows can be compared pairwise.
    """
    if not grid:
        raise InvalidParameter("grid must name at least one parameter")
    if reps < 1:
        raise InvalidParameter(f"reps must be >= 1, got {reps}")
    base = token.seed if seed is None else seed
    names = list(grid)
    rows = []
    for values in itertools.product(*(grid[n] for n in names)):
        params = replace(token.params, **dict(zip(names, values)))
        eers = []
        for r in range(reps):
            t = IomToken(token.scheme, derive_seed(base, SWEEP_TAG, r), params)
            eers.append(eer(*fvc_scores(ds, t)).eer)
        rows.append({**dict(zip(names, values)), "eers": eers, "mean_eer": float(np.mean(eers))})
    return rows


def sign_test(larger, smaller) -> tuple:
    """One-sided sign test that ``larger[r] > smaller[r]`` tends to hold.

    Ties are dropped. Returns (wins, non-tied count, p-value).
    """
    diff = np.asarray(larger, dtype=np.float64) - np.asarray(smaller, dtype=np.float64)
    wins = int((diff > 0).sum())
    n = int((diff != 0).sum())
    if n == 0:
        return 0, 0, 1.0
    return wins, n, float(stats.binomtest(wins, n, 0.5, alternative="greater").pvalue)


# ---------------------------------------------------------------------------
# order-recovery attack on URP codes


@dataclass
class ArmReport:
    dim: int
    constraints: set
    status: Literal["consistent", "contradiction"]
    order: tuple | None = None
    witnesses: list = field(default_factory=list)
    unresolved: int = 0

    @property
    def total(self) -> bool:
        return self.order is not None


def _term(counter):
    return "*".join(f"x{a + 1}" for a in sorted(counter.elements()))


def _pairwise(win: Counter, other: Counter):
    """Reduce prod(win) > prod(other) to 'a > b' under positivity, if possible."""
    common = win & other
    a = win - common
    b = other - common
    if not a and not b:
        return None, None
    if len(a) == 1 and len(b) == 1:
        (ea, ra), = a.items()
        (eb, rb), = b.items()
        if ra == rb:
            return ea, eb
    return False, f"{_term(a)} > {_term(b)}"


def arm_order_attack(dim: int, compromised) -> ArmReport:
    """Recover the order of feature components from URP codes with known tokens.

    ``compromised`` yields (code, token) pairs: code as a HashedCode or index
    sequence. Each entry says the winning window product exceeds every other
    window product; cancelling shared factors and assuming positive features
    turns single-factor residues into 'x_a > x_b'. Cycles among those
    constraints are reported as contradictions.
    """
    if dim < 2:
        raise InvalidParameter(f"dimension must be >= 2, got {dim}")
    edges = {}
    unresolved = 0
    for code, token in compromised:
        if token.scheme != "urp":
            raise UnsupportedAttack("order recovery only decomposes URP window products")
        idx_code = np.asarray(getattr(code, "indices", code), dtype=np.int64)
        m, k, p = token.params.m, token.params.k, token.params.p
        if idx_code.shape != (m,):
            raise InvalidInput(f"code of length {idx_code.shape} for m={m}")
        if k > dim:
            raise InvalidParameter(f"window size k={k} exceeds dimension {dim}")
        perms = permutation_prefixes(token.seed, 1, m + 1, p, dim, k)
        for i in range(m):
            w = int(idx_code[i]) - 1
            win = Counter(perms[i, :, w].tolist())
            for j in range(k):
                if j == w:
                    continue
                a, b = _pairwise(win, Counter(perms[i, :, j].tolist()))
                if a is None:
                    continue
                if a is False:
                    unresolved += 1
                    continue
                edges.setdefault((a, b), f"{_term(win)} > {_term(Counter(perms[i, :, j].tolist()))}")
    constraints = {(a + 1, b + 1, ">") for a, b in edges}
    graph = {v: set() for v in range(dim)}
    for a, b in edges:
        graph[b].add(a)
    try:
        order = list(graphlib.TopologicalSorter(graph).static_order())
    except graphlib.CycleError as exc:
        cycle = exc.args[1]
        witnesses = []
        for u, v in zip(cycle, cycle[1:]):
            for e in ((u, v), (v, u)):
                if e in edges:
                    witnesses.append(f"x{e[0] + 1} > x{e[1] + 1}  from  {edges[e]}")
                    break
        return ArmReport(dim, constraints, "contradiction", None, witnesses, unresolved)
    total = all((a, b) in edges for a, b in zip(order, order[1:]))
    return ArmReport(
        dim, constraints, "consistent", tuple(v + 1 for v in order) if total else None, [], unresolved
    )


def arm_trial(x, n_codes: int, p: int = 2, k: int = 2, seed: int = 0, per_template: int = 10) -> ArmReport:
    """Hash ``x`` into ``n_codes`` URP entries spread over tokens with known seeds, then attack.

    The default window of 2 turns every entry into one product inequality,
    which gives the most varied constraints per compromised entry.
    """
    from .urp import urp_hash_many

    x = np.asarray(x, dtype=np.float64)
    d = x.shape[0]
    pairs = []
    n_templates = math.ceil(n_codes / per_template)
    for t in range(n_templates):
        m = min(per_template, n_codes - t * per_template)
        token = IomToken.urp(derive_seed(seed, ARM_TAG, t), m, k, p)
        pairs.append((urp_hash_many(x[None, :], token)[0], token))
    return arm_order_attack(d, pairs)
