"""Command-line interface.

Subcommands: params, gen, verify, metrics, decode, plan, simulate,
lemma-check. Machine-readable output goes to stdout, diagnostics to stderr.
Exit codes: 0 success, 1 verification failure (a counterexample was found),
2 usage or domain error.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from fractions import Fraction

from . import metrics as metrics_mod
from .decoder import InfeasibleScenarioError, StragglerScenario, select_decoder, select_decoder_fast
from .encoder import EncodingMatrix, build_encoding
from .hetero import plan_m_types, round_plan, worker_type
from .params import ParameterError, derive_params
from .sim import SimConfig, parse_straggler_model, run_descent

EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_USAGE = 2

# Exhaustive verification above this many straggler sets switches to sampling.
EXHAUSTIVE_CAP = 10 ** 6
DEFAULT_SAMPLES = 10_000


def _echo_config(args, payload_fields: dict) -> dict:
    cfg = {"command": args.command, **payload_fields}
    if getattr(args, "seed", None) is not None:
        cfg["seed"] = args.seed
    return cfg


def _emit(args, payload: dict) -> None:
    print(json.dumps(payload, sort_keys=True))


def _diag(args, message: str) -> None:
    if not args.quiet:
        print(message, file=sys.stderr)


def _cmd_params(args) -> int:
    p = derive_params(args.n, args.s)
    _emit(args, {"config": _echo_config(args, {"n": args.n, "s": args.s}), **p.as_dict()})
    return EXIT_OK


def _cmd_gen(args) -> int:
    p = derive_params(args.n, args.s)
    matrix = build_encoding(p)
    if args.format == "json":
        workers = [
            {"worker": w, "class": p.class_of(w), "start": start, "width": width}
            for w, (start, width) in enumerate(matrix.intervals)
        ]
        _emit(args, {
            "config": _echo_config(args, {"n": args.n, "s": args.s, "format": args.format}),
            "workers": workers,
        })
        return EXIT_OK
    _diag(args, f"config: n={args.n} s={args.s} format={args.format}")
    if args.format == "dense":
        for row in matrix.to_dense():
            print(" ".join(str(int(v)) for v in row))
    else:  # triplets
        for i, j in matrix.to_triplets():
            print(f"{i} {j}")
    return EXIT_OK


def _read_triplets(path: str, p) -> EncodingMatrix:
    rows: list[list[int]] = [[] for _ in range(p.n)]
    with open(path) as handle:
        for lineno, line in enumerate(handle, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                i, j = (int(v) for v in line.split())
            except ValueError as exc:
                raise ParameterError(f"{path}:{lineno}: expected 'worker partition'") from exc
            if not 0 <= i < p.n:
                raise ParameterError(f"{path}:{lineno}: worker {i} out of range")
            rows[i].append(j)
    return EncodingMatrix.from_rows(p, rows)


def _cmd_verify(args) -> int:
    p = derive_params(args.n, args.s)
    matrix = _read_triplets(args.from_file, p) if args.from_file else build_encoding(p)
    total = math.comb(args.n, args.s)
    samples = args.sample
    if samples is None and not args.exhaustive and total > EXHAUSTIVE_CAP:
        samples = DEFAULT_SAMPLES
        _diag(args, f"C({args.n},{args.s})={total} exceeds {EXHAUSTIVE_CAP}; "
                    f"sampling {samples} scenarios with seed {args.seed}")
    report = metrics_mod.verify_scheme(
        matrix, samples=samples, seed=args.seed, threads=args.threads,
    )
    _emit(args, {
        "config": _echo_config(args, {
            "n": args.n, "s": args.s, "from_file": args.from_file,
            "mode": report.mode, "threads": args.threads,
        }),
        **report.as_dict(),
    })
    return EXIT_OK if report.passed else EXIT_VERIFY_FAILED


def _cmd_metrics(args) -> int:
    p = derive_params(args.n, args.s)
    report = metrics_mod.load_report(build_encoding(p))
    if args.output == "csv":
        print("metric,value")
        for w, load in enumerate(report.loads):
            print(f"load_{w},{load}")
        print(f"ds,{report.ds_value}")
        print(f"total,{report.total}")
        print(f"spread_c1,{report.spread_c1}")
        print(f"spread_c2,{report.spread_c2}")
        return EXIT_OK
    payload = {
        "config": _echo_config(args, {"n": args.n, "s": args.s}),
        "loads": list(report.loads),
        "ds": str(report.ds_value), "ds_float": float(report.ds_value),
        "total": report.total,
        "spread_c1": report.spread_c1, "spread_c2": report.spread_c2,
        "balanced": report.spread_c1 <= 1 and report.spread_c2 <= 1,
    }
    if args.output == "text":
        for key, value in payload.items():
            if key != "config":
                print(f"{key}: {value}")
        return EXIT_OK
    _emit(args, payload)
    return EXIT_OK


def _cmd_decode(args) -> int:
    p = derive_params(args.n, args.s)
    stragglers = [int(v) for v in args.stragglers.split(",")] if args.stragglers else []
    scenario = StragglerScenario.from_stragglers(p.n, stragglers)
    select = select_decoder_fast if args.fast else select_decoder
    try:
        vector = select(p, scenario)
    except InfeasibleScenarioError as exc:
        _diag(args, f"decode failed: {exc}")
        return EXIT_VERIFY_FAILED
    _emit(args, {
        "config": _echo_config(args, {"n": args.n, "s": args.s,
                                      "stragglers": stragglers, "fast": args.fast}),
        "class": vector.class_index,
        "support": list(vector.support),
    })
    return EXIT_OK


def _parse_types(text: str):
    specs = []
    for part in text.split(","):
        count, _, unit = part.partition(":")
        if not unit:
            raise ParameterError(f"type {part!r} must look like count:time")
        specs.append(worker_type(int(count), Fraction(unit)))
    return specs


def _cmd_plan(args) -> int:
    specs = _parse_types(args.types)
    plan = round_plan(plan_m_types(args.s, args.k, specs))
    error = plan.equalization_error
    _emit(args, {
        "config": _echo_config(args, {"s": args.s, "k": args.k, "types": args.types}),
        "n": plan.n,
        "real_loads": [str(load) for load in plan.real_loads],
        "real_loads_float": [float(load) for load in plan.real_loads],
        "int_loads": [list(per_type) for per_type in plan.int_loads],
        "total_assigned": plan.total_assigned,
        "equalization_error": float(error) if error is not None else None,
    })
    return EXIT_OK


def _cmd_lemma(args) -> int:
    a_values = None if args.a_max is None else range(0, args.a_max + 1)
    violations = metrics_mod.check_lemma(range(args.s_min, args.s_max + 1), a_values)
    _emit(args, {
        "config": _echo_config(args, {"s_min": args.s_min, "s_max": args.s_max,
                                      "a_max": args.a_max}),
        "violations": [list(v) for v in violations],
        "count": len(violations),
    })
    return EXIT_OK if not violations else EXIT_VERIFY_FAILED


def _cmd_simulate(args) -> int:
    if (args.data is None) == (args.synthetic is None):
        raise ParameterError("exactly one of --data and --synthetic is required")
    synthetic_samples = synthetic_dim = None
    if args.synthetic:
        parts = args.synthetic.split(",")
        if len(parts) != 2:
            raise ParameterError("--synthetic takes N,p")
        synthetic_samples, synthetic_dim = int(parts[0]), int(parts[1])
    config = SimConfig(
        n=args.n, s=args.s, iterations=args.iters, learning_rate=args.lr,
        seed=args.seed, straggler_model=parse_straggler_model(args.straggler_model),
        data_path=args.data, has_header=args.header,
        synthetic_samples=synthetic_samples, synthetic_dim=synthetic_dim,
        noise_std=args.noise, integer_data=args.integer_data,
    )
    log = run_descent(config)
    sys.stdout.write(log.to_jsonl())
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="seed for any randomized step")
    common.add_argument("--output", choices=("json", "csv", "text"), default="json")
    common.add_argument("--quiet", action="store_true", help="suppress diagnostics on stderr")
    common.add_argument("--threads", type=int, default=1, help="fan-out cap for verification")

    parser = argparse.ArgumentParser(
        prog="gradcoding",
        description="Binary gradient coding: task assignment, decoding, and simulation.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("params", parents=[common], help="derive the division parameters")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--s", type=int, required=True)
    sp.set_defaults(func=_cmd_params)

    sp = sub.add_parser("gen", parents=[common], help="emit the assignment matrix")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--s", type=int, required=True)
    sp.add_argument("--format", choices=("dense", "triplets", "json"), default="dense")
    sp.set_defaults(func=_cmd_gen)

    sp = sub.add_parser("verify", parents=[common], help="check structure and robustness")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--s", type=int, required=True)
    group = sp.add_mutually_exclusive_group()
    group.add_argument("--exhaustive", action="store_true",
                       help="force enumeration of all C(n,s) straggler sets")
    group.add_argument("--sample", type=int, default=None, metavar="COUNT",
                       help="check COUNT uniformly sampled straggler sets")
    sp.add_argument("--from-file", default=None, metavar="PATH",
                    help="verify a matrix read from 'worker partition' triplet lines")
    sp.set_defaults(func=_cmd_verify)

    sp = sub.add_parser("metrics", parents=[common], help="loads, uniformity distance, spreads")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--s", type=int, required=True)
    sp.set_defaults(func=_cmd_metrics)

    sp = sub.add_parser("decode", parents=[common], help="select a decoding class online")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--s", type=int, required=True)
    sp.add_argument("--stragglers", default="", help="comma-separated worker indices")
    sp.add_argument("--fast", action="store_true", help="skip the final class check")
    sp.set_defaults(func=_cmd_decode)

    sp = sub.add_parser("plan", parents=[common], help="heterogeneous per-type loads")
    sp.add_argument("--s", type=int, required=True)
    sp.add_argument("--k", type=int, required=True)
    sp.add_argument("--types", required=True,
                    help="comma-separated count:time pairs, e.g. 6:1,6:2")
    sp.set_defaults(func=_cmd_plan)

    sp = sub.add_parser("simulate", parents=[common], help="straggler-injected descent")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--s", type=int, required=True)
    sp.add_argument("--iters", type=int, required=True)
    sp.add_argument("--lr", type=float, required=True)
    sp.add_argument("--data", default=None, help="CSV path, features then label column")
    sp.add_argument("--header", action="store_true", help="skip the first CSV line")
    sp.add_argument("--synthetic", default=None, metavar="N,p")
    sp.add_argument("--noise", type=float, default=0.0, help="synthetic label noise stddev")
    sp.add_argument("--integer-data", action="store_true",
                    help="draw small-integer synthetic data (exact arithmetic)")
    sp.add_argument("--straggler-model", default="uniform",
                    help="uniform | race[:unit,noise] | fixed:i,j,k")
    sp.set_defaults(func=_cmd_simulate)

    sp = sub.add_parser("lemma-check", parents=[common],
                        help="scan n = s^2 + a for the t-value rule")
    sp.add_argument("--s-min", type=int, default=3)
    sp.add_argument("--s-max", type=int, default=40)
    sp.add_argument("--a-max", type=int, default=None, help="default scans a up to 4s")
    sp.set_defaults(func=_cmd_lemma)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ParameterError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
