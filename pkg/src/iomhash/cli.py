"""Command-line interface.

Every command prints one machine-parsable ``key=value`` summary line first,
then human-readable detail. Exit codes: 0 success/accept, 1 reject,
2 usage or parameter error, 3 I/O or file-format error.
"""
import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import theory
from .core import HashedCode, IomToken
from .dataio import (
    SyntheticSpec,
    TemplateRecord,
    load_features,
    load_templates,
    save_templates,
    synth_dataset,
    write_histogram_csv,
    write_roc_csv,
)
from .errors import CorruptTemplate, FormatError, IomError, VersionError
from .evaluation import (
    arm_order_attack,
    arm_trial,
    brute_force_attack_scores,
    fvc_scores,
    parameter_sweep,
    roc_points,
    run_protocol,
)
from .hashing import iom_hash_many
from .matcher import collision_score, decide

DEFAULT_SEED = 1
EXIT_OK, EXIT_REJECT, EXIT_USAGE, EXIT_IO = 0, 1, 2, 3


def _fmt(v):
    if isinstance(v, float):
        return f"{v:.6g}"
    if isinstance(v, (list, tuple)):
        return ",".join(str(x) for x in v)
    return str(v)


def emit(summary: dict, *detail: str) -> None:
    print(" ".join(f"{k}={_fmt(v)}" for k, v in summary.items()))
    for line in detail:
        print(line)


def _add_scheme_args(p, required=True):
    p.add_argument("--scheme", choices=["grp", "urp"], required=required, default="urp")
    p.add_argument("--m", type=int, default=300, help="number of hash functions (default 300)")
    p.add_argument("--q", type=int, default=16, help="GRP projections per matrix (default 16)")
    p.add_argument("--k", type=int, help="URP window size (default 128; 2 for --arm-vector)")
    p.add_argument("--p", type=int, default=2, help="URP Hadamard order (default 2)")
    p.add_argument("--seed", type=int, default=DEFAULT_SEED, help=f"token master seed (default {DEFAULT_SEED})")


def _token(args) -> IomToken:
    if args.scheme == "grp":
        return IomToken.grp(args.seed, args.m, args.q)
    return IomToken.urp(args.seed, args.m, args.k or 128, args.p)


def _parse_synthetic(text: str) -> SyntheticSpec:
    keys = {"U": "users", "S": "samples_per_user", "d": "dim", "sigma": "within_noise",
            "seed": "seed", "decay": "spectrum_decay"}
    kw = {"users": 100, "samples_per_user": 5, "dim": 128, "within_noise": 0.33, "seed": 0}
    for part in filter(None, (s.strip() for s in text.replace(";", ",").split(","))):
        name, _, value = part.partition("=")
        if name not in keys or not value:
            raise IomError(f"bad synthetic field {part!r}; expected U=,S=,d=,sigma=,seed=,decay=")
        field = keys[name]
        try:
            kw[field] = float(value) if field in ("within_noise", "spectrum_decay") else int(value)
        except ValueError:
            raise IomError(f"bad synthetic value {part!r}") from None
    return SyntheticSpec(**kw)


def _dataset(args):
    if args.synthetic is not None:
        return synth_dataset(_parse_synthetic(args.synthetic))
    if args.features is None:
        raise IomError("give a features file or --synthetic")
    return load_features(args.features)


def _parse_sweep(text: str) -> dict:
    grid = {}
    for part in filter(None, (s.strip() for s in text.split(";"))):
        name, _, values = part.partition("=")
        if name not in ("m", "q", "k", "p") or not values:
            raise IomError(f"bad sweep axis {part!r}; expected e.g. m=10,100,300")
        try:
            grid[name] = [int(v) for v in values.split(",")]
        except ValueError:
            raise IomError(f"bad sweep values {part!r}") from None
    return grid


# ---------------------------------------------------------------------------


def cmd_enroll(args) -> int:
    ds = load_features(args.features)
    token = _token(args)
    codes = iom_hash_many(ds.features, token)

    records = [
        TemplateRecord(token, HashedCode(token.scheme, tuple(row.tolist()), token.alphabet), u, s)
        for (u, s, _), row in zip(ds.records(), codes)
    ]
    save_templates(records, args.out)
    emit(
        {"command": "enroll", "templates": len(records), "scheme": token.scheme, "m": token.m,
         "alphabet": token.alphabet, "seed": token.seed, "out": args.out},
        f"wrote {len(records)} template(s) to {args.out}",
    )
    return EXIT_OK


def _is_template_file(path) -> bool:
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        if line.strip():
            return line.lstrip().startswith("{")
    return False


def cmd_verify(args) -> int:
    rec = load_templates(args.template)[args.index]
    if _is_template_file(args.probe):
        probe = load_templates(args.probe)[args.probe_index].code
    else:
        ds = load_features(args.probe)
        row = iom_hash_many(ds.features[args.probe_index : args.probe_index + 1], rec.token)[0]

        probe = HashedCode(rec.token.scheme, tuple(row.tolist()), rec.token.alphabet)
    score = collision_score(rec.code, probe)
    decision = decide(score, args.threshold)
    emit(
        {"command": "verify", "score": score.score, "collisions": score.collisions, "m": score.m,
         "threshold": args.threshold, "decision": decision},
        f"{score.collisions}/{score.m} entries collide -> {decision}",
    )
    return EXIT_OK if decision == "accept" else EXIT_REJECT


def _write_report(out_dir, report):
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    summary = report.summary()
    (out / "report.json").write_text(
        json.dumps({"summary": summary, "config": report.config}, indent=2, default=float) + "\n", encoding="utf-8"
    )
    for label, s in report.scores.items():
        write_histogram_csv(s.scores, out / f"hist_{label}.csv")
    labels = list(report.scores)
    taus, far, frr = roc_points(report.scores[labels[0]], report.scores[labels[-1]])
    write_roc_csv(zip(taus, far, frr), out / "roc.csv")


def cmd_eval(args) -> int:
    ds = _dataset(args)
    token = _token(args)
    if args.sweep:
        grid = _parse_sweep(args.sweep)
        rows = parameter_sweep(ds, token, grid, reps=args.reps)
        names = list(grid)
        if args.out_dir:
            out = Path(args.out_dir)
            out.mkdir(parents=True, exist_ok=True)
            with open(out / "sweep.csv", "w", encoding="utf-8") as fh:
                fh.write(",".join(names + ["mean_eer", "eers"]) + "\n")
                for r in rows:
                    eers = ";".join(f"{e:.6f}" for e in r["eers"])
                    fh.write(",".join([str(r[n]) for n in names] + [f"{r['mean_eer']:.6f}", eers]) + "\n")
        emit(
            {"command": "eval", "sweep": ",".join(names), "points": len(rows), "reps": args.reps},
            *(" ".join(f"{n}={r[n]}" for n in names) + f"  mean EER {100 * r['mean_eer']:.3f}%" for r in rows),
        )
        return EXIT_OK
    report = run_protocol(
        ds, token, args.protocol, token_policy=args.token_policy, n_tokens=args.tokens,
        n_random_codes=args.codes, seed=args.seed,
    )
    if args.out_dir:
        _write_report(args.out_dir, report)
    summary = {"command": "eval", "protocol": args.protocol, **report.summary()}
    detail = [f"EER {100 * report.eer:.3f}% at threshold {report.threshold:.4f}"]
    detail += [f"{label}: {len(s)} scores, mean {s.mean:.4f}" for label, s in report.scores.items()]
    if "mean_gap" in report.stats:
        detail.append(f"mean gap pseudo-genuine vs pseudo-imposter: {report.stats['mean_gap']:.4f}")
    emit(summary, *detail)
    return EXIT_OK


def _bits_text(bits: float) -> str:
    if abs(bits - round(bits)) < 1e-9:
        return f"{round(bits)} bits"
    return f"{bits:.2f} bits (≈{round(bits)} bits)"


def cmd_theory(args) -> int:
    if args.kq is not None:
        q, rho = int(args.kq[0]), float(args.kq[1])
        v = theory.kq_series(q, rho)
        emit({"command": "theory", "quantity": "kq_series", "q": q, "rho": rho, "value": v}, f"{v:.6g}")
        return EXIT_OK
    if args.exact2 is not None:
        v = theory.grp_collision_exact2(args.exact2)
        emit({"command": "theory", "quantity": "grp_collision_exact2", "rho": args.exact2, "value": v}, f"{v:.6g}")
        return EXIT_OK
    if args.hermite is not None:
        q, order = args.hermite
        v = theory.hermite_moment(q, order)
        emit({"command": "theory", "quantity": "hermite_moment", "q": q, "order": order, "value": v}, f"{v:.6g}")
        return EXIT_OK
    if args.tables:
        lines = ["false accept:"]
        lines += [f"  {r['database']} {r['scheme']} tau={r['tau']} m={r['m']} delta={r['delta']}: "
                  f"{r['bits']:.0f} bits (printed {r['printed_bits']}), exact {r['exact_bits']:.1f}"
                  for r in theory.reproduce_false_accept_cases()]
        lines.append("birthday:")
        lines += [f"  {r['database']} {r['scheme']} tau={r['tau']} m={r['m']} delta={r['delta']}: "
                  f"{r['bits']:.1f} bits (printed {r['printed_bits']})" for r in theory.reproduce_birthday_cases()]
        lines.append("guess space (d=299):")
        lines += [f"  {r['database']} [{r['min']}, {r['max']}]: {r['count']} values (printed {r['printed_count']}), "
                  f"{r['convention_bits']} bits by whole-bit convention" for r in theory.reproduce_guess_space_cases()]
        emit({"command": "theory", "quantity": "tables"}, *lines)
        return EXIT_OK
    kind = args.complexity
    need = {"brute": ("m", "delta"), "false-accept": ("tau", "m", "delta"), "birthday": ("tau", "m", "delta"),
            "guess-space": ("min", "max", "step", "d")}[kind]
    missing = [n for n in need if getattr(args, n.replace("-", "_")) is None]
    if missing:
        raise IomError(f"--complexity {kind} needs " + ", ".join("--" + n for n in missing))
    if kind == "brute":
        est = theory.brute_force_bits(args.m, args.delta, args.entry_bits)
    elif kind == "false-accept":
        est = theory.false_accept_bits(args.tau, args.m, args.delta, args.entry_bits)
    elif kind == "birthday":
        est = theory.birthday_bits(args.tau, args.m, args.delta)
    else:
        est = theory.guess_space_bits(args.min, args.max, args.step, args.d)
    summary = {"command": "theory", "formula": est.formula_id, "bits": est.bits, **est.inputs}
    detail = [_bits_text(est.bits)]
    if est.formula_id == "guess_space":
        detail.append(f"{est.inputs['count']} values per component, {est.convention_bits} bits by whole-bit convention")
    emit(summary, *detail)
    return EXIT_OK


def cmd_attack(args) -> int:
    if args.arm is not None:
        records = load_templates(args.arm)
        if any(r.token.scheme != "urp" for r in records):
            raise IomError("order recovery supports URP templates only")
        report = arm_order_attack(args.dim, [(r.code, r.token) for r in records])
        return _print_arm(report, None)
    if args.arm_vector is not None:
        x = np.array([float(v) for v in args.arm_vector.split(",")])
        report = arm_trial(x, args.codes, p=args.p, k=args.k or 2, seed=args.seed)
        truth = tuple(int(i) + 1 for i in np.argsort(-x, kind="stable"))
        return _print_arm(report, truth)
    ds = _dataset(args)
    token = _token(args)
    _, imposter = fvc_scores(ds, token)
    att = brute_force_attack_scores(ds, token, args.bruteforce, seed=args.seed)
    if args.out_dir:
        out = Path(args.out_dir)
        out.mkdir(parents=True, exist_ok=True)
        write_histogram_csv(att.scores, out / "hist_brute_force_attack.csv")
        write_histogram_csv(imposter.scores, out / "hist_imposter.csv")
    emit(
        {"command": "attack", "attack": "bruteforce", "scores": len(att), "mean_attack": att.mean,
         "mean_imposter": imposter.mean, "chance": 1.0 / token.alphabet},
        f"{len(att)} attack scores, mean {att.mean:.5f} (chance 1/{token.alphabet} = {1 / token.alphabet:.5f}), "
        f"imposter mean {imposter.mean:.5f}",
    )
    return EXIT_OK


def _print_arm(report, truth) -> int:
    summary = {"command": "attack", "attack": "arm", "status": report.status,
               "constraints": len(report.constraints), "order": report.order or "partial"}
    detail = []
    if report.order:
        detail.append("recovered order: " + " > ".join(f"x{i}" for i in report.order))
    if truth is not None:
        summary["matches_truth"] = report.order == truth
        detail.append("true order:      " + " > ".join(f"x{i}" for i in truth))
    detail += ["contradiction: " + w for w in report.witnesses]
    emit(summary, *detail)
    return EXIT_OK


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="iomhash", description="Index-of-Max cancelable biometric hashing")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("enroll", help="hash a feature file into templates")
    p.add_argument("features")
    _add_scheme_args(p)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_enroll)

    p = sub.add_parser("verify", help="match a probe against an enrolled template")
    p.add_argument("template")
    p.add_argument("probe", help="feature file, or a template file to compare codes directly")
    p.add_argument("--threshold", type=float, required=True)
    p.add_argument("--index", type=int, default=0, help="template record to use (default 0)")
    p.add_argument("--probe-index", type=int, default=0, help="probe row or record to use (default 0)")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("eval", help="run an evaluation protocol or parameter sweep")
    p.add_argument("features", nargs="?")
    p.add_argument("--synthetic", help="e.g. U=100,S=5,d=128,sigma=0.33,seed=0,decay=0")
    _add_scheme_args(p)
    p.add_argument("--protocol", choices=["fvc", "revocability", "unlinkability", "bruteforce"], default="fvc")
    p.add_argument("--token-policy", choices=["shared", "per_user"], default="shared")
    p.add_argument("--tokens", type=int, default=100, help="fresh tokens for pseudo-imposter scores")
    p.add_argument("--codes", type=int, default=1000, help="random codes per template for bruteforce")
    p.add_argument("--sweep", help="grid such as 'm=10,100,300;k=8,32'")
    p.add_argument("--reps", type=int, default=5)
    p.add_argument("--out-dir")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("theory", help="analytic collision and complexity values")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--kq", nargs=2, metavar=("Q", "RHO"))
    g.add_argument("--exact2", type=float, metavar="RHO")
    g.add_argument("--hermite", nargs=2, type=int, metavar=("Q", "ORDER"))
    g.add_argument("--complexity", choices=["brute", "false-accept", "birthday", "guess-space"])
    g.add_argument("--tables", action="store_true", help="reproduce the published FVC complexity cases")
    p.add_argument("--tau", type=float)
    p.add_argument("--m", type=int)
    p.add_argument("--delta", type=int)
    p.add_argument("--entry-bits", type=float)
    p.add_argument("--min", type=float)
    p.add_argument("--max", type=float)
    p.add_argument("--step", type=float)
    p.add_argument("--d", type=int)
    p.set_defaults(func=cmd_theory)

    p = sub.add_parser("attack", help="order-recovery or brute-force attack harness")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--arm", metavar="TEMPLATES", help="attack URP templates (seeds are in the file)")
    g.add_argument("--arm-vector", metavar="X", help="hash this comma-separated vector, then attack it")
    g.add_argument("--bruteforce", type=int, metavar="N", help="random codes per enrolled template")
    p.add_argument("--dim", type=int, help="feature dimension for --arm")
    p.add_argument("--codes", type=int, default=200, help="compromised entries for --arm-vector")
    p.add_argument("features", nargs="?")
    p.add_argument("--synthetic")
    _add_scheme_args(p, required=False)
    p.add_argument("--out-dir")
    p.set_defaults(func=cmd_attack)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "attack":
        if args.arm is not None and args.dim is None:
            parser.error("--arm needs --dim")
    try:
        return args.func(args)
    except (FormatError, CorruptTemplate, VersionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except IomError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except IndexError as exc:
        print(f"error: record index out of range ({exc})", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
