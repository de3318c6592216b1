"""Command-line interface: ``hmpbounds {bounds,contraction,prob,simulate,validate}``.

Exit codes: 0 success, 2 bad parameters or flags, 3 tolerance not met,
4 insufficient data, 5 validation failure.
"""

import argparse
import csv
import io
import json
import sys
import time

from . import __version__, _backend, bounds, forward, model, simulate, validation
from .errors import CapacityError, InsufficientDataError, LengthError, ParameterError

SCHEMA_VERSION = "1.0"

EXIT_OK = 0
EXIT_PARAMS = 2
EXIT_TOLERANCE = 3
EXIT_DATA = 4
EXIT_VALIDATION = 5

ROW_COLUMNS = ("n", "L", "H", "U", "width", "geo")


class UsageError(Exception):
    """Bad flag value; reported on stderr with exit code 2."""


def _fmt(value):
    # repr() is the shortest string that round-trips the binary64 value.
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _record(command, params, args, **payload):
    rec = {"schema_version": SCHEMA_VERSION, "command": command}
    if params is not None:
        rec["params"] = params.as_dict()
    rec.update(payload)
    meta = {"version": __version__}
    if getattr(args, "threads", None) is not None:
        meta["threads"] = args.threads
    rec["metadata"] = {**meta, **rec.pop("metadata", {})}
    return rec


def _emit_json(rec, out, timing=None):
    if timing is not None:
        rec["timing"] = timing
    out.write(json.dumps(rec, indent=2, allow_nan=False) + "\n")


def _emit_csv(header, rows, out):
    w = csv.writer(out, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_fmt(row[h]) for h in header])


def _emit_table(header, rows, out, digits=12):
    def cell(v):
        if v is None:
            return "-"
        if isinstance(v, float):
            return f"{v:.{digits}g}"
        return str(v)

    cells = [[cell(r[h]) for h in header] for r in rows]
    widths = [max(len(h), *(len(c[i]) for c in cells)) if cells else len(h)
              for i, h in enumerate(header)]
    out.write("  ".join(h.rjust(w) for h, w in zip(header, widths)) + "\n")
    for c in cells:
        out.write("  ".join(v.rjust(w) for v, w in zip(c, widths)) + "\n")


def _params(args):
    try:
        return model.validate(args.pi01, args.pi10, args.eps)
    except ParameterError as exc:
        raise UsageError(f"--{exc.field}: {exc}") from None


def cmd_bounds(args, out):
    params = _params(args)
    if args.tol <= 0:
        raise UsageError(f"--tol: must be positive, got {args.tol!r}")
    if not 0 <= args.max_n <= bounds.HARD_CAP:
        raise UsageError(f"--max-n: must be in [0, {bounds.HARD_CAP}], got {args.max_n}")
    try:
        report = bounds.run(params, args.tol, args.max_n, threads=args.threads,
                            node_budget=args.node_budget)
    except CapacityError as exc:
        raise UsageError(f"--max-n: {exc}") from None
    rows = [r.as_dict() for r in report.rows]
    summary = {
        "n_final": report.final.n,
        "estimate": report.estimate,
        "guaranteed_error": report.guaranteed_error,
        "converged": report.converged,
        "tol": args.tol,
        "max_n": args.max_n,
    }
    if args.format == "json":
        rec = _record("bounds", params, args, contraction=report.contraction.as_dict(),
                      rows=rows, result=summary, metadata={"backend": report.backend})
        _emit_json(rec, out, report.elapsed if args.timing else None)
    elif args.format == "csv":
        _emit_csv(ROW_COLUMNS, rows, out)
        sys.stderr.write(f"estimate {report.estimate!r} +/- {report.guaranteed_error!r}\n")
    else:
        _emit_table(ROW_COLUMNS, rows, out)
        status = "converged" if report.converged else "NOT converged"
        out.write(f"\nh(Z) = {report.estimate:.15g} +/- {report.guaranteed_error:.3g} bits "
                  f"({status} at n = {report.final.n})\n")
    return EXIT_OK if report.converged else EXIT_TOLERANCE


def cmd_contraction(args, out):
    params = _params(args)
    info = model.contraction(params)
    fields = {**info.as_dict(), "strict_regime": params.strict_regime}
    if args.format == "json":
        _emit_json(_record("contraction", params, args, result=fields), out)
    elif args.format == "csv":
        _emit_csv(tuple(fields), [fields], out)
    else:
        _emit_table(tuple(fields), [fields], out)
    return EXIT_OK


def cmd_prob(args, out):
    params = _params(args)
    try:
        bits = forward.parse_bits(args.sequence, args.max_n)
    except (ValueError, LengthError) as exc:
        raise UsageError(f"--sequence: {exc}") from None
    prob, trace = forward.sequence_prob(params, bits, args.max_n)
    oracle = diff = None
    if args.oracle and len(bits) <= forward.ORACLE_MAX:
        oracle = forward.brute_force_prob(params, bits)
        diff = abs(prob - oracle)
    fields = {"sequence": args.sequence, "prob": prob, "oracle": oracle, "difference": diff}
    if args.format == "json":
        _emit_json(_record("prob", params, args, result={**fields, "beliefs": list(trace.beliefs)}), out)
    elif args.format == "csv":
        _emit_csv(("sequence", "prob", "oracle", "difference"), [fields], out)
    else:
        out.write(f"P({args.sequence}) = {prob!r}\n")
        if oracle is not None:
            out.write(f"brute force  = {oracle!r}  (difference {diff:.3e})\n")
        out.write("beliefs P(X_k=0 | Z_1^k):\n")
        for k, b in enumerate(trace.beliefs):
            out.write(f"  k={k:<3d} {b!r}\n")
    return EXIT_OK


def cmd_simulate(args, out):
    params = _params(args)
    if args.n < 1:
        raise UsageError(f"--n: must be >= 1, got {args.n}")
    if args.block_k < 0:
        raise UsageError(f"--block-k: must be >= 0, got {args.block_k}")
    path = simulate.sample_path(params, args.n, args.seed)
    if args.emit:
        bits = path.observed if args.emit_stream == "observed" else path.hidden
        if args.emit == "-":
            simulate.write_path(bits, sys.stdout.buffer, args.emit_format)
            sys.stdout.buffer.flush()
            out = sys.stderr
        else:
            with open(args.emit, "wb") as fh:
                simulate.write_path(bits, fh, args.emit_format)
    estimate = None
    if args.estimate:
        try:
            estimate = simulate.plugin_entropy_rate(path.observed, args.block_k)
        except InsufficientDataError as exc:
            sys.stderr.write(f"error: {exc}\n")
            return EXIT_DATA
    result = {
        "n": args.n,
        "hidden_zero_frequency": float(1.0 - path.hidden.mean()),
        "observed_zero_frequency": float(1.0 - path.observed.mean()),
        "flip_rate": float((path.hidden != path.observed).mean()),
    }
    if estimate is not None:
        result["estimate"] = estimate.as_dict()
    meta = {"seed": args.seed, "generator": simulate.GENERATOR,
            "emit_format": args.emit_format if args.emit else None}
    if args.format == "json":
        _emit_json(_record("simulate", params, args, result=result, metadata=meta), out)
    else:
        flat = dict(result)
        if estimate is not None:
            flat.update({k: v for k, v in estimate.as_dict().items()})
            flat.pop("estimate")
        if args.format == "csv":
            _emit_csv(tuple(flat), [flat], out)
        else:
            for k, v in flat.items():
                out.write(f"{k:>24s}  {_fmt(v)}\n")
    return EXIT_OK


def cmd_validate(args, out):
    failed = None
    results = []
    for res in validation.run_checks(quick=args.quick, fault=args.inject_fault):
        results.append(res)
        if args.format != "json":
            out.write(f"{'PASS' if res.passed else 'FAIL'}  {res.name}: {res.detail}\n")
        if not res.passed and failed is None:
            failed = res
    if args.format == "json":
        rec = _record("validate", None, args,
                      result={"checks": [vars(r) for r in results],
                              "passed": failed is None})
        _emit_json(rec, out)
    if failed is not None:
        sys.stderr.write(f"validation failed: {failed.name}\n")
        return EXIT_VALIDATION
    return EXIT_OK


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_PARAMS, f"{self.prog}: error: {message}\n")


def build_parser():
    parser = _Parser(prog="hmpbounds",
                     description="Entropy-rate bounds for binary hidden Markov processes.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    common = _Parser(add_help=False)
    common.add_argument("--pi01", type=float, required=True, help="P(X_k=1 | X_{k-1}=0)")
    common.add_argument("--pi10", type=float, required=True, help="P(X_k=0 | X_{k-1}=1)")
    common.add_argument("--eps", type=float, required=True, help="channel flip probability")
    fmt = _Parser(add_help=False)
    fmt.add_argument("--format", choices=("table", "csv", "json"), default="table")

    p = sub.add_parser("bounds", parents=[common, fmt], help="convergence table of L, H, U")
    p.add_argument("--tol", type=float, default=1e-6, help="target half-width in bits")
    p.add_argument("--max-n", type=int, default=25, help=f"deepest level (hard cap {bounds.HARD_CAP})")
    p.add_argument("--threads", type=int, default=bounds.default_threads())
    p.add_argument("--node-budget", type=int, default=bounds.NODE_BUDGET)
    p.add_argument("--timing", action="store_true", help="include wall time in JSON output")
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("contraction", parents=[common, fmt], help="delta, bigM and regime flags")
    p.set_defaults(func=cmd_contraction)

    p = sub.add_parser("prob", parents=[common, fmt], help="probability of an observation string")
    p.add_argument("--sequence", required=True, help="bit string such as 0110")
    p.add_argument("--oracle", action="store_true", help="also run the brute-force sum (n <= 14)")
    p.add_argument("--max-n", type=int, default=forward.N_MAX)
    p.set_defaults(func=cmd_prob)

    p = sub.add_parser("simulate", parents=[common, fmt], help="sample paths and plug-in estimates")
    p.add_argument("--n", type=int, default=10**6, help="path length")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--emit", metavar="PATH", help="write the sampled path ('-' for stdout)")
    p.add_argument("--emit-format", choices=("ascii", "packed"), default="ascii")
    p.add_argument("--emit-stream", choices=("observed", "hidden"), default="observed")
    p.add_argument("--estimate", action="store_true", help="plug-in entropy-rate estimate")
    p.add_argument("--block-k", type=int, default=8)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("validate", parents=[fmt], help="run the built-in invariant checks")
    p.add_argument("--quick", action="store_true", help="smaller sizes")
    p.add_argument("--inject-fault", action="store_true", help=argparse.SUPPRESS)
    p.set_defaults(func=cmd_validate)
    return parser


def main(argv=None, out=None):
    args = build_parser().parse_args(argv)
    out = out or sys.stdout
    try:
        return args.func(args, out)
    except UsageError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_PARAMS


def run(argv):
    """Invoke :func:`main` capturing stdout; returns ``(exit_code, text)``."""
    buf = io.StringIO()
    try:
        code = main(argv, buf)
    except SystemExit as exc:
        code = exc.code
    return code, buf.getvalue()


if __name__ == "__main__":
    sys.exit(main())
