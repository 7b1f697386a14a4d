"""Command-line entry point.

Exit codes: 0 success (a not-found recovery is data, not an error),
2 usage, 3 invalid parameters or failed reduction, 4 I/O.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys

from . import bounds as bnd
from .errors import ParameterError, ReductionFailure
from .experiment import ExperimentConfig, run_experiment
from .group import ProblemInstance, factor_from_short_dlog
from .postprocess import RecoveryParams, recover_d
from .simulator import DEFAULT_WINDOW, TAIL_POLICIES, SimulatorConfig, sample_stream

EXIT_OK, EXIT_USAGE, EXIT_PARAM, EXIT_IO = 0, 2, 3, 4


def _open_out(path):
    if path is None or path == "-":
        return sys.stdout, False
    return open(path, "w", encoding="utf-8"), True


def _read_text(path) -> str:
    if path == "-":
        return sys.stdin.read()
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def _load_instance(path) -> ProblemInstance:
    return ProblemInstance.from_json(_read_text(path))


def _add_instance_args(p):
    p.add_argument("--kind", choices=("safe_prime", "rsa"), default="safe_prime")
    p.add_argument("--m", type=int, required=True, help="bit bound on the logarithm")
    p.add_argument("--delta", type=int, default=0, help="l = m - delta")
    p.add_argument("--seed", type=int, default=0)


def cmd_bounds(args) -> int:
    targets = args.target or [str(t) for t in bnd.STANDARD_TARGETS]
    rows, missing = [], []
    for delta in args.delta:
        for target in targets:
            factor = bnd.F_DELTA.get(delta, 1) if args.rsa_factor else 1
            res = bnd.optimize_params(delta, target, args.c, args.tau_max, args.t_max, factor=factor)
            if res is None:
                missing.append((delta, target))
            else:
                rows.append(res[2])
    text = bnd.format_csv(rows) if args.format == "csv" else bnd.format_table(rows) + "\n"
    out, close = _open_out(args.out)
    try:
        out.write(text)
    finally:
        if close:
            out.close()
    for delta, target in missing:
        print(f"no (tau, t) reaches target {target} at delta={delta} within the search limits", file=sys.stderr)
    return EXIT_PARAM if missing else EXIT_OK


def cmd_ffdh(args) -> int:
    row = bnd.ffdh_row(args.l, args.z, args.delta, args.tau, args.t, args.c)
    print(json.dumps({"l": row.l, "z": row.z, "m": row.m, "delta": row.delta, "tau": args.tau, "t": args.t,
                      "ops": row.ops_eh, "ops_shor": row.ops_shor, "advantage": row.advantage_display,
                      "bound": row.bound.success_lb, "work_log2": row.bound.work_display}))
    return EXIT_OK


def cmd_instance(args) -> int:
    from .group import make_rsa_instance, make_safe_prime_instance

    if args.kind == "rsa":
        inst = make_rsa_instance(args.m - 1, args.delta, seed=args.seed)
    else:
        bits = args.prime_bits or 2 * args.m - args.delta + 2
        inst = make_safe_prime_instance(bits, args.m, args.delta, seed=args.seed)
    out, close = _open_out(args.out)
    try:
        out.write(inst.to_json() + "\n")
    finally:
        if close:
            out.close()
    return EXIT_OK


def cmd_simulate(args) -> int:
    inst = _load_instance(args.instance)
    cfg = SimulatorConfig(window=args.window, tail_policy=args.tail_policy, seed=args.seed)
    out, close = _open_out(args.out)
    try:
        for trial, sample in sample_stream(inst, cfg, args.count, args.start):
            out.write(sample.to_json(trial) + "\n")
    finally:
        if close:
            out.close()
    return EXIT_OK


def cmd_recover(args) -> int:
    inst = _load_instance(args.instance)
    j, k = args.j, args.k
    if args.pair is not None:
        line = next((ln for ln in _read_text(args.pair).splitlines() if ln.strip()), None)
        if line is None:
            raise ParameterError("pair input is empty")
        try:
            rec = json.loads(line)
            j, k = int(rec["j"]), int(rec["k"])
        except (ValueError, KeyError, TypeError) as exc:
            raise ParameterError(f"malformed pair record: {line!r}") from exc
    if j is None or k is None:
        raise ParameterError("give --j and --k, or --pair")
    ctx, g, x = inst.elements()
    tau = args.tau if args.tau is not None else min(7, inst.ell)
    report = recover_d(g, x, j, k, inst.m, inst.ell, RecoveryParams(tau=tau, c=args.c,
                                                                    verify_range=not args.no_verify_range),
                       d_true=inst.d)
    print(report.to_json())
    return EXIT_OK


def cmd_experiment(args) -> int:
    fixed = None
    cfg_kw = dict(m=args.m, delta=args.delta, tau=args.tau, t=args.t, c=args.c, trials=args.trials,
                  seed=args.seed, kind=args.kind, window=args.window, tail_policy=args.tail_policy,
                  prime_bits=args.prime_bits, timing=args.timing)
    if args.fixed_instance:
        fixed = _load_instance(args.fixed_instance)
        cfg_kw.update(m=fixed.m, delta=fixed.delta, kind=fixed.kind)
    cfg = ExperimentConfig(**cfg_kw)
    if fixed is not None and fixed.is_short is False:
        raise ParameterError("fixed instance violates the shortness condition")
    out, close = (None, False) if args.out is None else _open_out(args.out)
    try:
        summary = run_experiment(cfg, workers=args.workers, fixed_instance=fixed, sink=out)
    finally:
        if close:
            out.close()
    print(json.dumps(summary, default=str))
    return EXIT_OK


def cmd_factor(args) -> int:
    p, q = factor_from_short_dlog(args.N, args.d)
    print(json.dumps({"p": str(p), "q": str(q)}))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="shortdlog", description="Short discrete logarithm recovery lab")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("bounds", help="optimize (tau, t) per delta and target; print the table")
    p.add_argument("--delta", type=int, nargs="+", required=True)
    p.add_argument("--target", action="append", help="e.g. 0.99, 1-1e-10 or 1e-10-complement (repeatable)")
    p.add_argument("--c", type=int, default=1)
    p.add_argument("--tau-max", type=int, default=64)
    p.add_argument("--t-max", type=int, default=None)
    p.add_argument("--rsa-factor", action="store_true", help="scale by the tabulated f(delta) for RSA moduli")
    p.add_argument("--format", choices=("text", "csv"), default="text")
    p.add_argument("--out")
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("ffdh", help="quantum op counts and advantage for a short-exponent FF-DH row")
    p.add_argument("--l", type=int, required=True)
    p.add_argument("--z", type=int, required=True)
    p.add_argument("--delta", type=int, required=True)
    p.add_argument("--tau", type=int, required=True)
    p.add_argument("--t", type=int, required=True)
    p.add_argument("--c", type=int, default=1)
    p.set_defaults(func=cmd_ffdh)

    p = sub.add_parser("instance", help="generate a problem instance as JSON")
    _add_instance_args(p)
    p.add_argument("--prime-bits", type=int)
    p.add_argument("--out")
    p.set_defaults(func=cmd_instance)

    p = sub.add_parser("simulate", help="sample (j, k) pairs for an instance as JSONL")
    p.add_argument("--instance", required=True)
    p.add_argument("--count", type=int, default=1)
    p.add_argument("--start", type=int, default=0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--window", type=int, default=DEFAULT_WINDOW)
    p.add_argument("--tail-policy", choices=TAIL_POLICIES, default="fail")
    p.add_argument("--out")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("recover", help="recover d from one pair")
    p.add_argument("--instance", required=True)
    p.add_argument("--j", type=int)
    p.add_argument("--k", type=int)
    p.add_argument("--pair", help="JSONL file (or -) whose first record supplies j and k")
    p.add_argument("--tau", type=int)
    p.add_argument("--c", type=int, default=1)
    p.add_argument("--no-verify-range", action="store_true")
    p.set_defaults(func=cmd_recover)

    p = sub.add_parser("experiment", help="Monte Carlo: instance, simulated pair, recovery per trial")
    p.add_argument("--kind", choices=("safe_prime", "rsa"), default="safe_prime")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--delta", type=int, default=0)
    p.add_argument("--tau", type=int, required=True)
    p.add_argument("--t", type=int, default=2, help="t used for the reported bound")
    p.add_argument("--c", type=int, default=1)
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--window", type=int, default=DEFAULT_WINDOW)
    p.add_argument("--tail-policy", choices=TAIL_POLICIES, default="fail")
    p.add_argument("--prime-bits", type=int)
    p.add_argument("--fixed-instance", help="instance JSON reused for every trial")
    p.add_argument("--timing", action="store_true", help="add wall_time to records (breaks byte-identical logs)")
    p.add_argument("--out", help="JSONL log path")
    p.set_defaults(func=cmd_experiment)

    p = sub.add_parser("factor", help="factor N = pq from d = (p + q) / 2")
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--d", type=int, required=True)
    p.set_defaults(func=cmd_factor)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (ParameterError, ReductionFailure) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARAM
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
