"""Command-line pipeline: data generation, hashing, matching, evaluation, sweeps,
and the security analyses.

Exit codes: 0 success, 1 usage error, 2 runtime error. All randomness flows
from explicit --seed flags and outputs carry no timestamps, so reruns with
identical arguments are byte-identical.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import json
import sys
from pathlib import Path

import numpy as np

from . import cases, security
from .evaluation import run_evaluation, sweep, write_sweep_csv, evaluation_config
from .hashing import giom_hash, hash_rows
from .matching import LgsParams, lgs_match_detail
from .mcc import MccParams, SynthParams, encode_cylinders, synth_dataset, write_dataset
from .model import (
    HashKey,
    IntegrityError,
    ParseError,
    load_hashed,
    load_minutiae,
    save_hashed,
    save_key,
)
from .randomness import derive_bank

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_RUNTIME = 2

DEFAULT_M = 700
DEFAULT_Q = 100
DEFAULT_M_GRID = "5,10,50,100,150,200,250,300,500,700"
DEFAULT_Q_GRID = "5,10,50,100,150,200,250,300"


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {value}")
    return value


def _nonneg_int(text: str) -> int:
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError(f"expected a non-negative integer, got {value}")
    return value


def _positive_float(text: str) -> float:
    value = float(text)
    if value <= 0:
        raise argparse.ArgumentTypeError(f"expected a positive number, got {value}")
    return value


def _nonneg_float(text: str) -> float:
    value = float(text)
    if value < 0:
        raise argparse.ArgumentTypeError(f"expected a non-negative number, got {value}")
    return value


def _unit_float(text: str) -> float:
    value = float(text)
    if not 0.0 <= value <= 1.0:
        raise argparse.ArgumentTypeError(f"expected a value in [0, 1], got {value}")
    return value


def _int_list(text: str) -> list[int]:
    try:
        values = [int(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None
    if not values:
        raise argparse.ArgumentTypeError("expected a non-empty integer list")
    return values


def _add_mcc_args(parser: argparse.ArgumentParser) -> None:
    group = parser.add_argument_group("cylinder encoding")
    group.add_argument("--radius", type=_positive_float, default=70.0, help="cylinder radius in pixels")
    group.add_argument("--ns", type=_positive_int, default=16, help="spatial cells per axis")
    group.add_argument("--nd", type=_positive_int, default=6, help="directional cells")
    group.add_argument("--sigma-s", type=_positive_float, default=None, help="spatial kernel std-dev (default radius/7.5)")
    group.add_argument("--sigma-d", type=_positive_float, default=np.pi / 9.0, help="angular kernel std-dev")


def _add_lgs_args(parser: argparse.ArgumentParser) -> None:
    group = parser.add_argument_group("matcher")
    group.add_argument("--min-np", type=_positive_int, default=4, help="minimum pair budget")
    group.add_argument("--max-np", type=_positive_int, default=12, help="maximum pair budget")
    group.add_argument("--mu-p", type=float, default=20.0, help="pair-budget sigmoid midpoint")
    group.add_argument("--tau-p", type=float, default=0.4, help="pair-budget sigmoid slope")
    group.add_argument(
        "--flat-topk",
        action="store_true",
        help="select the top n_p matrix entries instead of greedy unique pairs",
    )


def _mcc_from_args(args) -> MccParams:
    return MccParams(radius=args.radius, ns=args.ns, nd=args.nd, sigma_s=args.sigma_s, sigma_d=args.sigma_d)


def _lgs_from_args(args) -> LgsParams:
    return LgsParams(
        min_np=args.min_np,
        max_np=args.max_np,
        mu_p=args.mu_p,
        tau_p=args.tau_p,
        greedy_unique=not args.flat_topk,
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="giom",
        description="Cancellable point-set template hashing: pipeline and experiments.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen-data", help="generate a synthetic minutiae dataset")
    p.add_argument("--fingers", type=_positive_int, default=10)
    p.add_argument("--samples", type=_positive_int, default=8)
    p.add_argument("--min-minutiae", type=_positive_int, default=15)
    p.add_argument("--max-minutiae", type=_positive_int, default=30)
    p.add_argument("--jitter-pos", type=_nonneg_float, default=5.0)
    p.add_argument("--jitter-theta", type=_nonneg_float, default=0.1)
    p.add_argument("--drop-rate", type=_unit_float, default=0.05)
    p.add_argument("--field-size", type=_positive_float, default=500.0)
    p.add_argument("--seed", type=_nonneg_int, required=True)
    p.add_argument("--out", required=True, help="output directory for template text files")

    p = sub.add_parser("hash", help="hash minutiae templates into protected index codes")
    p.add_argument("--case", type=int, choices=sorted(cases.CASES), help="print the code of a bundled worked example and exit")
    p.add_argument("--data", help="template file or directory")
    p.add_argument("--seed", type=_nonneg_int)
    p.add_argument("--m", type=_positive_int, default=DEFAULT_M)
    p.add_argument("--q", type=_positive_int, default=DEFAULT_Q)
    p.add_argument("--out", help="output directory for hashed templates and the key")
    _add_mcc_args(p)

    p = sub.add_parser("match", help="score two hashed templates")
    p.add_argument("--a", required=True, help="first hashed template (JSON)")
    p.add_argument("--b", required=True, help="second hashed template (JSON)")
    p.add_argument("--detail", help="write selected pairs and n_p as JSON")
    _add_lgs_args(p)

    p = sub.add_parser("evaluate", help="run the genuine/impostor protocol and report EER")
    p.add_argument("--data", required=True)
    p.add_argument("--seed", type=_nonneg_int, required=True)
    p.add_argument("--m", type=_positive_int, default=DEFAULT_M)
    p.add_argument("--q", type=_positive_int, default=DEFAULT_Q)
    p.add_argument("--threads", type=_positive_int, default=1)
    p.add_argument("--out", required=True)
    _add_mcc_args(p)
    _add_lgs_args(p)

    p = sub.add_parser("sweep", help="mean EER over a grid of (m, q)")
    p.add_argument("--data", required=True)
    p.add_argument("--seed", type=_nonneg_int, required=True)
    p.add_argument("--m", type=_int_list, default=_int_list(DEFAULT_M_GRID))
    p.add_argument("--q", type=_int_list, default=_int_list(DEFAULT_Q_GRID))
    p.add_argument("--trials", type=_positive_int, default=3)
    p.add_argument("--threads", type=_positive_int, default=1)
    p.add_argument("--out", required=True)
    _add_mcc_args(p)
    _add_lgs_args(p)

    p = sub.add_parser("analyze", help="security experiments: invert, unlink, revoke")
    p.add_argument("--mode", choices=["invert", "unlink", "revoke"], required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=_nonneg_int, default=0)
    p.add_argument("--data", help="dataset directory (unlink and revoke modes)")
    p.add_argument("--attempts", type=_positive_int, default=1_000_000, help="rejection-sampling budget (invert)")
    p.add_argument("--volume-samples", type=_positive_int, default=200_000, help="Monte-Carlo volume samples (invert)")
    p.add_argument("--seed-a", type=_nonneg_int, help="first key seed (unlink)")
    p.add_argument("--seed-b", type=_nonneg_int, help="second key seed (unlink)")
    p.add_argument("--base-seed", type=_nonneg_int, help="base key seed (revoke)")
    p.add_argument("--n-keys", type=_positive_int, default=50, help="fresh keys per finger (revoke)")
    p.add_argument("--m", type=_positive_int, default=DEFAULT_M)
    p.add_argument("--q", type=_positive_int, default=DEFAULT_Q)
    _add_mcc_args(p)
    _add_lgs_args(p)

    return parser


def _write_json(path: Path, payload) -> None:
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")


def _write_hist_csv(path: Path, columns: dict[str, list[float]], bins: int = security.DEFAULT_HIST_BINS) -> None:
    edges = np.linspace(0.0, 1.0, bins + 1)
    fractions = {}
    for name, scores in columns.items():
        hist, _ = np.histogram(np.asarray(scores, dtype=float), bins=bins, range=(0.0, 1.0))
        total = max(len(scores), 1)
        fractions[name] = hist / total
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["bin_left", "bin_right"] + [f"{name}_fraction" for name in columns])
        for i in range(bins):
            row = [repr(float(edges[i])), repr(float(edges[i + 1]))]
            row += [repr(float(fractions[name][i])) for name in columns]
            writer.writerow(row)


def _cmd_gen_data(args) -> int:
    params = SynthParams(
        fingers=args.fingers,
        samples_per_finger=args.samples,
        minutiae_range=(args.min_minutiae, args.max_minutiae),
        jitter_pos=args.jitter_pos,
        jitter_theta=args.jitter_theta,
        drop_rate=args.drop_rate,
        field_size=args.field_size,
    )
    dataset = synth_dataset(args.seed, params)
    paths = write_dataset(dataset, args.out)
    print(f"wrote {len(paths)} templates to {args.out}")
    return EXIT_OK


def _cmd_hash(args, parser: argparse.ArgumentParser) -> int:
    if args.case is not None:
        case = cases.get_case(args.case)
        print(" ".join(str(int(i)) for i in case.expected_code))
        return EXIT_OK
    if not args.data or args.seed is None or not args.out:
        parser.error("hash requires --data, --seed and --out (or --case)")
    mcc = _mcc_from_args(args)
    key = HashKey(seed=args.seed, m=args.m, q=args.q, d=mcc.dim)
    bank = derive_bank(key)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    templates = load_minutiae(args.data)
    for template in templates:
        hashed = giom_hash(encode_cylinders(template, mcc), bank)
        save_hashed(hashed, out / f"{template.finger_id}_{template.sample_id:02d}.json")
    save_key(key, out / "key.json")
    print(f"hashed {len(templates)} templates under key {key.fingerprint()} to {args.out}")
    return EXIT_OK


def _cmd_match(args) -> int:
    lgs = _lgs_from_args(args)
    a = load_hashed(args.a)
    b = load_hashed(args.b)
    score, selected, n_p = lgs_match_detail(a, b, lgs)
    if args.detail:
        _write_json(
            Path(args.detail),
            {
                "score": score.value,
                "n_p": n_p,
                "pairs": [[i, j, s] for i, j, s in selected],
                "config": dataclasses.asdict(lgs),
            },
        )
    print(repr(score.value))
    return EXIT_OK


def _cmd_evaluate(args) -> int:
    mcc = _mcc_from_args(args)
    lgs = _lgs_from_args(args)
    key = HashKey(seed=args.seed, m=args.m, q=args.q, d=mcc.dim)
    dataset = load_minutiae(args.data)
    report = run_evaluation(dataset, key, mcc, lgs, threads=args.threads)
    report = dataclasses.replace(report, config={**report.config, "data": args.data})
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    report.save(out / "report.json")
    report.write_roc_csv(out / "roc.csv")
    print(f"eer={report.eer!r} ({len(report.genuine_scores)} genuine, {len(report.impostor_scores)} impostor)")
    return EXIT_OK


def _cmd_sweep(args) -> int:
    mcc = _mcc_from_args(args)
    lgs = _lgs_from_args(args)
    dataset = load_minutiae(args.data)
    result = sweep(dataset, args.m, args.q, args.trials, args.seed, mcc, lgs, threads=args.threads)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    write_sweep_csv(result, out / "sweep_trials.csv", out / "sweep_means.csv")
    print(f"swept {len(result.means)} (m, q) cells x {args.trials} trials into {args.out}")
    return EXIT_OK


def _analyze_invert(args, out: Path) -> None:
    report = {
        "mode": "invert",
        "seed": args.seed,
        "attempts": args.attempts,
        "volume_samples": args.volume_samples,
    }
    volume_rows = []
    for number in sorted(cases.CASES):
        case = cases.get_case(number)
        system = security.build_inequalities(case.bank, case.expected_code)
        forged = security.sample_preimage(system, attempts=args.attempts, seed=args.seed)
        entry = {
            "case": case.name,
            "dim": system.variable_dim,
            "constraints": system.n_constraints,
            "target_code": [int(i) for i in case.expected_code],
            "found": forged is not None,
        }
        if forged is not None:
            code = hash_rows(forged[None, :], case.bank)[0]
            entry["forged"] = [float(v) for v in forged]
            entry["rehash_matches"] = bool(np.array_equal(code, case.expected_code))
        # volume of the cone cut by growing constraint prefixes, fixed sample set
        for prefix in range(system.n_constraints + 1):
            sub = security.InequalitySystem(system.normals[:prefix], system.variable_dim)
            vol = security.preimage_volume_estimate(sub, samples=args.volume_samples, seed=args.seed)
            volume_rows.append((case.name, prefix, vol))
        report[case.name] = entry
    # 10^(places*dim) has places*dim + 1 decimal digits; avoid materializing
    # the 6145-digit string (CPython caps int-to-str conversions)
    places, dim = 4, 1536
    assert security.brute_force_guess_count(places, dim) == 10 ** (places * dim)
    report["guess_space"] = {
        "decimal_places": places,
        "dim": dim,
        "decimal_digits": places * dim + 1,
    }
    _write_json(out / "invert.json", report)
    with open(out / "invert_volume.csv", "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["case", "constraints", "volume_estimate"])
        for name, prefix, vol in volume_rows:
            writer.writerow([name, prefix, repr(vol)])


def _analyze_unlink(args, out: Path, parser: argparse.ArgumentParser) -> None:
    if not args.data or args.seed_a is None or args.seed_b is None:
        parser.error("analyze --mode unlink requires --data, --seed-a and --seed-b")
    mcc = _mcc_from_args(args)
    lgs = _lgs_from_args(args)
    key_a = HashKey(seed=args.seed_a, m=args.m, q=args.q, d=mcc.dim)
    key_b = HashKey(seed=args.seed_b, m=args.m, q=args.q, d=mcc.dim)
    dataset = load_minutiae(args.data)
    mated, non_mated = security.unlinkability_experiment(dataset, key_a, key_b, mcc, lgs)
    overlap = security.histogram_intersection(mated, non_mated) if non_mated else None
    _write_json(
        out / "unlink.json",
        {
            "mode": "unlink",
            "config": evaluation_config(key_a, mcc, lgs) | {"seed_b": key_b.seed, "data": args.data},
            "mated_genuine": mated,
            "non_mated_impostor": non_mated,
            "histogram_intersection": overlap,
            "mated_mean": float(np.mean(mated)),
            "non_mated_mean": float(np.mean(non_mated)) if non_mated else None,
        },
    )
    _write_hist_csv(out / "unlink_hist.csv", {"mated_genuine": mated, "non_mated_impostor": non_mated})


def _analyze_revoke(args, out: Path, parser: argparse.ArgumentParser) -> None:
    if not args.data or args.base_seed is None:
        parser.error("analyze --mode revoke requires --data and --base-seed")
    mcc = _mcc_from_args(args)
    lgs = _lgs_from_args(args)
    base_key = HashKey(seed=args.base_seed, m=args.m, q=args.q, d=mcc.dim)
    dataset = load_minutiae(args.data)
    mated, genuine, impostor = security.revocability_experiment(
        dataset, base_key, n_keys=args.n_keys, seed=args.seed, mcc=mcc, lgs=lgs
    )
    _write_json(
        out / "revoke.json",
        {
            "mode": "revoke",
            "config": evaluation_config(base_key, mcc, lgs)
            | {"n_keys": args.n_keys, "fresh_key_seed": args.seed, "data": args.data},
            "mated_genuine": mated,
            "genuine": genuine,
            "impostor": impostor,
            "intersection_mated_vs_impostor": security.histogram_intersection(mated, impostor),
            "intersection_mated_vs_genuine": security.histogram_intersection(mated, genuine),
            "mated_mean": float(np.mean(mated)),
            "genuine_mean": float(np.mean(genuine)),
            "impostor_mean": float(np.mean(impostor)),
        },
    )
    _write_hist_csv(
        out / "revoke_hist.csv",
        {"mated_genuine": mated, "genuine": genuine, "impostor": impostor},
    )


def _cmd_analyze(args, parser: argparse.ArgumentParser) -> int:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    if args.mode == "invert":
        _analyze_invert(args, out)
    elif args.mode == "unlink":
        _analyze_unlink(args, out, parser)
    else:
        _analyze_revoke(args, out, parser)
    print(f"wrote {args.mode} analysis to {args.out}")
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code in (0, None) else EXIT_USAGE
    try:
        if args.command == "gen-data":
            return _cmd_gen_data(args)
        if args.command == "hash":
            return _cmd_hash(args, parser)
        if args.command == "match":
            return _cmd_match(args)
        if args.command == "evaluate":
            return _cmd_evaluate(args)
        if args.command == "sweep":
            return _cmd_sweep(args)
        return _cmd_analyze(args, parser)
    except SystemExit as exc:  # parser.error inside a handler
        return EXIT_OK if exc.code in (0, None) else EXIT_USAGE
    except (ValueError, OSError, ParseError, IntegrityError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


def app() -> None:
    sys.exit(main())


if __name__ == "__main__":
    app()
