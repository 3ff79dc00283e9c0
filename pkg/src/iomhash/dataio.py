"""Feature ingestion, synthetic datasets, template and report persistence.

Feature files are UTF-8 text, one record per line::

    user_id,sample_id,v1,v2,...,vd

An optional header line is recognised by non-numeric value columns. Values are
rounded half away from zero to four decimals on ingestion.

Template files hold one JSON object per line with fields ``version``,
``scheme``, ``m``, ``q`` (GRP) or ``k`` and ``p`` (URP), ``seed``,
``indices`` and optionally ``user_id`` / ``sample_id``.
"""
import csv
import io
import json
from dataclasses import dataclass
from decimal import ROUND_HALF_UP, Decimal, InvalidOperation
from pathlib import Path

import numpy as np

from .core import Dataset, GrpParams, HashedCode, IomToken, UrpParams
from .errors import CorruptTemplate, DuplicateKey, FormatError, IomError, VersionError
from .randomness import check_seed, derive_seed, normals

TEMPLATE_VERSION = 1
_QUANTUM = Decimal("0.0001")
_SYNTH_TAG = 0x53594E


def round4(text: str) -> float:
    """Parse a decimal literal and round it half away from zero to 4 places."""
    return float(Decimal(text.strip()).quantize(_QUANTUM, rounding=ROUND_HALF_UP))


def quantize4(values) -> np.ndarray:
    """Snap floats onto the 4-decimal grid used by stored features."""
    return np.round(np.asarray(values, dtype=np.float64), 4)


def _parse_row(fields, lineno):
    if len(fields) < 4:
        raise FormatError(f"expected user_id,sample_id and at least 2 values, got {len(fields)} fields", lineno)
    try:
        values = [round4(v) for v in fields[2:]]
    except (InvalidOperation, ValueError):
        raise FormatError("non-numeric feature value", lineno) from None
    if not all(np.isfinite(values)):
        raise FormatError("non-finite feature value", lineno)
    return fields[0].strip(), fields[1].strip(), values


def _looks_numeric(fields):
    try:
        for v in fields[2:]:
            Decimal(v.strip())
    except InvalidOperation:
        return False
    return True


def parse_features(text: str) -> Dataset:
    users, samples, rows = [], [], []
    seen = set()
    dim = None
    reader = csv.reader(io.StringIO(text))
    first = True
    for lineno, fields in enumerate(reader, start=1):
        if not fields or all(not f.strip() for f in fields):
            continue
        if first:
            first = False
            if not _looks_numeric(fields):
                continue
        u, s, values = _parse_row(fields, lineno)
        if dim is None:
            dim = len(values)
        elif len(values) != dim:
            raise FormatError(f"ragged row: {len(values)} values, expected {dim}", lineno)
        if (u, s) in seen:
            raise DuplicateKey(f"duplicate record ({u}, {s})", lineno)
        if not any(values):
            raise FormatError("all-zero feature vector", lineno)
        seen.add((u, s))
        users.append(u)
        samples.append(s)
        rows.append(values)
    if not rows:
        raise FormatError("no feature records found")
    return Dataset(users, samples, np.asarray(rows, dtype=np.float64))


def load_features(path) -> Dataset:
    return parse_features(Path(path).read_text(encoding="utf-8"))


def format_features(ds: Dataset) -> str:
    out = io.StringIO()
    for u, s, x in ds.records():
        out.write(",".join([u, s] + [repr(float(v)) for v in x]))
        out.write("\n")
    return out.getvalue()


def save_features(ds: Dataset, path) -> None:
    Path(path).write_text(format_features(ds), encoding="utf-8")


@dataclass(frozen=True)
class SyntheticSpec:
    users: int
    samples_per_user: int
    dim: int
    within_noise: float = 0.33
    seed: int = 0
    spectrum_decay: float = 0.0

    def __post_init__(self):
        if self.users < 1 or self.samples_per_user < 1:
            raise IomError("synthetic dataset needs at least one user and one sample")
        if self.dim < 2:
            raise IomError(f"synthetic dimension must be >= 2, got {self.dim}")
        if self.spectrum_decay < 0:
            raise IomError(f"spectrum decay must be >= 0, got {self.spectrum_decay}")
        if self.within_noise < 0:
            raise IomError(f"within-user noise must be >= 0, got {self.within_noise}")
        check_seed(self.seed)


def synth_dataset(spec: SyntheticSpec) -> Dataset:
    """Gaussian class centres plus isotropic within-user noise.

    Sample ``s`` of user ``u`` is ``c_u + within_noise * e``, so two samples of
    one user have expected cosine ``1 / (1 + within_noise**2)`` and different
    users are near-orthogonal.

    With ``spectrum_decay = a > 0`` centre component ``j`` is scaled by
    ``(j + 1) ** -a`` (rescaled to keep the total centre energy at ``d``), so
    leading components carry most of the identity while the noise stays
    isotropic, much like a KPCA feature vector. The expected within-user cosine
    is unchanged.

    Values are snapped to four decimals so the dataset survives a save/load
    round trip.
    """
    U, S, d = spec.users, spec.samples_per_user, spec.dim
    base = derive_seed(spec.seed, _SYNTH_TAG)
    seeds = np.array(
        [[derive_seed(base, u, s) for s in range(S + 1)] for u in range(U)], dtype=np.uint64
    )
    z = normals(seeds.reshape(-1), d).reshape(U, S + 1, d)
    scale = (np.arange(d) + 1.0) ** -spec.spectrum_decay
    scale *= np.sqrt(d / np.sum(scale**2))
    X = z[:, :1, :] * scale + spec.within_noise * z[:, 1:, :]
    users = [f"u{u:04d}" for u in range(U) for _ in range(S)]
    samples = [f"s{s:02d}" for _ in range(U) for s in range(S)]
    return Dataset(users, samples, quantize4(X.reshape(U * S, d)))


@dataclass(frozen=True)
class TemplateRecord:
    token: IomToken
    code: HashedCode
    user_id: str | None = None
    sample_id: str | None = None
    version: int = TEMPLATE_VERSION

    def __post_init__(self):
        if self.code.scheme != self.token.scheme:
            raise CorruptTemplate("code scheme differs from token scheme")
        if self.code.m != self.token.m or self.code.alphabet != self.token.alphabet:
            raise CorruptTemplate("code shape differs from token parameters")

    def to_json(self) -> str:
        obj = {"version": self.version, "scheme": self.token.scheme, "m": self.token.m}
        if self.token.scheme == "grp":
            obj["q"] = self.token.params.q
        else:
            obj["k"] = self.token.params.k
            obj["p"] = self.token.params.p
        obj["seed"] = self.token.seed
        obj["indices"] = list(self.code.indices)
        if self.user_id is not None:
            obj["user_id"] = self.user_id
        if self.sample_id is not None:
            obj["sample_id"] = self.sample_id
        return json.dumps(obj, separators=(",", ":"))

    @classmethod
    def from_json(cls, text: str) -> "TemplateRecord":
        try:
            obj = json.loads(text)
        except json.JSONDecodeError as exc:
            raise CorruptTemplate(f"not a JSON object: {exc}") from None
        if not isinstance(obj, dict):
            raise CorruptTemplate("template must be a JSON object")
        version = obj.get("version")
        if version != TEMPLATE_VERSION:
            raise VersionError(f"unsupported template version {version!r}")
        scheme = obj.get("scheme")
        keys = {"grp": {"q"}, "urp": {"k", "p"}}.get(scheme)
        if keys is None:
            raise CorruptTemplate(f"unknown scheme {scheme!r}")
        foreign = ({"q", "k", "p"} - keys) & obj.keys()
        if foreign or not keys <= obj.keys():
            raise CorruptTemplate(f"{scheme} template with fields {sorted(obj.keys() & {'q', 'k', 'p'})}")
        try:
            if scheme == "grp":
                params = GrpParams(int(obj["m"]), int(obj["q"]))
            else:
                params = UrpParams(int(obj["m"]), int(obj["k"]), int(obj["p"]))
            token = IomToken(scheme, int(obj["seed"]), params)
            indices = obj["indices"]
            if not isinstance(indices, list) or not all(isinstance(t, int) for t in indices):
                raise CorruptTemplate("indices must be a list of integers")
            if len(indices) != params.m:
                raise CorruptTemplate(f"{len(indices)} indices for m={params.m}")
            code = HashedCode(scheme, tuple(indices), params.alphabet)
        except (KeyError, TypeError) as exc:
            raise CorruptTemplate(f"missing or malformed field: {exc}") from None
        except CorruptTemplate:
            raise
        except IomError as exc:
            raise CorruptTemplate(str(exc)) from None
        return cls(token, code, obj.get("user_id"), obj.get("sample_id"))


def save_templates(records, path) -> None:
    text = "".join(rec.to_json() + "\n" for rec in records)
    Path(path).write_text(text, encoding="utf-8")


def save_template(rec: TemplateRecord, path) -> None:
    save_templates([rec], path)


def load_templates(path) -> list:
    out = []
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), start=1):
        if not line.strip():
            continue
        try:
            out.append(TemplateRecord.from_json(line))
        except CorruptTemplate as exc:
            raise CorruptTemplate(f"line {lineno}: {exc}") from None
    if not out:
        raise CorruptTemplate("template file is empty")
    return out


def load_template(path) -> TemplateRecord:
    return load_templates(path)[0]


def write_roc_csv(rows, path) -> None:
    """rows of (threshold, far, frr)."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["threshold", "far", "frr"])
        for t, far, frr in rows:
            w.writerow([f"{t:.6f}", f"{far:.6f}", f"{frr:.6f}"])


def write_histogram_csv(scores, path, bins: int = 50) -> None:
    counts, edges = np.histogram(np.asarray(scores, dtype=np.float64), bins=bins, range=(0.0, 1.0))
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["bin_low", "bin_high", "count"])
        for lo, hi, c in zip(edges[:-1], edges[1:], counts):
            w.writerow([f"{lo:.4f}", f"{hi:.4f}", int(c)])
