"""Command-line front end.

Exit codes: 0 ok, 2 usage or parameter error, 3 numeric failure, 4 I/O
failure, 5 published-table mismatch.
"""

from __future__ import annotations

import argparse
import configparser
import contextlib
import csv
import io
import sys
from importlib import resources

import numpy as np

from .fock import MAX_ORDER
from .montecarlo import estimate_hoa, estimate_hosps
from .states import DEFAULT_TRUNCATION_EPSILON, StateSpec
from .table1 import format_table, reproduce_table1
from .witnesses import evaluate, find_zero_crossing, witness_report

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC, EXIT_IO, EXIT_MISMATCH = 0, 2, 3, 4, 5
PRECISION = ".10g"


class UsageError(Exception):
    pass


def fmt(value) -> str:
    if isinstance(value, (float, np.floating)):
        return format(float(value), PRECISION)
    return str(value)


def write_csv(rows, header, out) -> None:
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([fmt(v) for v in row])


@contextlib.contextmanager
def open_output(path: str | None):
    if path in (None, "-"):
        yield sys.stdout
        return
    buf = io.StringIO()
    yield buf
    with open(path, "w", newline="") as fh:
        fh.write(buf.getvalue())


def load_presets(path: str | None = None) -> configparser.ConfigParser:
    parser = configparser.ConfigParser(inline_comment_prefixes=("#",))
    parser.optionxform = str
    if path is None:
        parser.read_string(resources.files("nonclassical").joinpath("figures.ini").read_text())
    elif not parser.read(path):
        raise UsageError(f"cannot read preset file {path}")
    return parser


def _orders(text: str) -> list[int]:
    return [int(x) for x in text.split()]


def _selected(args) -> list[tuple[str, int]]:
    return (
        [("hoa", l) for l in args.hoa]
        + [("hosps", l) for l in args.hosps]
        + [("hos", n) for n in args.hos]
    )


# -- subcommands --------------------------------------------------------------


def cmd_witness(args) -> int:
    spec = StateSpec.parse(args.state)
    if not _selected(args):
        raise UsageError("select at least one of --hoa, --hosps, --hos")
    state = spec.build(args.trunc_eps)
    report = witness_report(
        state, hoa=args.hoa, hosps=args.hosps, hos=args.hos, max_order=args.max_order
    )
    text = spec.to_text()
    write_csv(((text, w, o, v) for w, o, v in report.rows()), ("state", "witness", "order", "value"), sys.stdout)
    return EXIT_OK


def _sweep_settings(args) -> dict:
    settings = {"relaxed": args.relaxed}
    if args.preset:
        presets = load_presets(args.presets)
        if args.preset not in presets:
            raise UsageError(f"unknown preset {args.preset!r}; known: {presets.sections()}")
        sec = presets[args.preset]
        settings.update(
            state=sec["state"], vary=sec["vary"], lo=float(sec["from"]), hi=float(sec["to"]),
            steps=int(sec.get("steps", "0")),
            selected=[(w, o) for w in ("hoa", "hosps", "hos") for o in _orders(sec.get(w, ""))],
            relaxed=args.relaxed or sec.getboolean("relaxed", False),
        )
    for key, value in (("state", args.state), ("vary", args.vary), ("lo", args.lo), ("hi", args.hi), ("steps", args.steps)):
        if value is not None:
            settings[key] = value
    if _selected(args):
        settings["selected"] = _selected(args)
    missing = [k for k in ("state", "vary", "lo", "hi", "selected") if k not in settings]
    if missing:
        raise UsageError(f"sweep needs {', '.join(missing)} (or a --preset)")
    return settings


def sweep_grid(spec: StateSpec, vary: str, lo: float, hi: float, steps: int) -> list:
    if not lo < hi:
        raise UsageError(f"--from must be below --to, got {lo} >= {hi}")
    if spec.param_type(vary) is int:
        return list(range(int(np.ceil(lo)), int(np.floor(hi)) + 1))
    if steps < 2:
        raise UsageError("--steps must be at least 2")
    return [float(x) for x in np.linspace(lo, hi, steps)]


def cmd_sweep(args) -> int:
    s = _sweep_settings(args)
    spec = StateSpec.parse(s["state"])
    vary = spec.resolve_param(s["vary"])
    grid = sweep_grid(spec, vary, s["lo"], s["hi"], s.get("steps") or 0)
    selected = s["selected"]
    rows = []
    for x in grid:
        state = spec.with_param(vary, x).build(args.trunc_eps)
        rows.append([x] + [evaluate(state, w, o, max_order=args.max_order) for w, o in selected])
    header = [vary] + [f"{w}_{o}" for w, o in selected]
    try:
        with open_output(args.out) as out:
            write_csv(rows, header, out)
    except OSError as exc:
        print(f"error: cannot write {args.out}: {exc}", file=sys.stderr)
        return EXIT_IO
    for w, o in selected:
        modes = [False] + ([True] if s["relaxed"] and spec.family == "gbs" and vary == "N" and w != "hos" else [])
        for relaxed in modes:
            x0 = find_zero_crossing(
                spec, vary, s["lo"], s["hi"], w, o, relaxed=relaxed, truncation_epsilon=args.trunc_eps,
                resolution=max(len(grid) - 1, 10),
            )
            tag = " (real-N continuation)" if relaxed else ""
            if x0 is None:
                print(f"# {w}_{o}: no sign change in [{s['lo']:g}, {s['hi']:g}]{tag}", file=sys.stderr)
            else:
                print(f"# {w}_{o}: sign change at {vary} = {x0:.4f}{tag}", file=sys.stderr)
    return EXIT_OK


def cmd_table1(args) -> int:
    entries = reproduce_table1()
    print(format_table(entries))
    if args.out:
        rows = [
            (e.alpha, e.beta, e.N, e.column, e.published_value, e.computed, e.rel_deviation,
             e.tolerance, "pass" if e.passed else "fail", "published-typo" if e.typo else "")
            for e in entries
        ]
        header = ("alpha", "beta", "N", "column", "published", "computed", "rel_deviation", "tolerance", "status", "note")
        try:
            with open_output(args.out) as out:
                write_csv(rows, header, out)
        except OSError as exc:
            print(f"error: cannot write {args.out}: {exc}", file=sys.stderr)
            return EXIT_IO
    failed = [e for e in entries if not e.passed]
    print(f"{len(entries) - len(failed)}/{len(entries)} entries within tolerance", file=sys.stderr)
    return EXIT_OK if not failed else EXIT_MISMATCH


def cmd_mc(args) -> int:
    if args.hos:
        raise UsageError("Hong-Mandel squeezing cannot be estimated from photon counts")
    if not (args.hoa or args.hosps):
        raise UsageError("select at least one of --hoa, --hosps")
    state = StateSpec.parse(args.state).build(args.trunc_eps)
    rows = []
    for witness, orders, estimator in (("hoa", args.hoa, estimate_hoa), ("hosps", args.hosps, estimate_hosps)):
        for l in orders:
            est = estimator(state, l, args.shots, args.seed, resamples=args.resamples)
            rows.append((witness, l, est.value, est.std_error, est.shots, est.seed))
    write_csv(rows, ("witness", "order", "value", "std_error", "shots", "seed"), sys.stdout)
    return EXIT_OK


def cmd_dump_state(args) -> int:
    state = StateSpec.parse(args.state).build(args.trunc_eps)
    rows = ((n, c.real, c.imag) for n, c in enumerate(state.amplitudes))
    try:
        with open_output(args.out) as out:
            write_csv(rows, ("n", "real", "imag"), out)
    except OSError as exc:
        print(f"error: cannot write {args.out}: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


# -- argument parsing ---------------------------------------------------------


def _add_common(p: argparse.ArgumentParser, witnesses: bool = True) -> None:
    p.add_argument("--trunc-eps", type=float, default=DEFAULT_TRUNCATION_EPSILON,
                   help="tail probability discarded by infinite-support states")
    p.add_argument("--max-order", type=int, default=MAX_ORDER, help="highest moment order allowed")
    if witnesses:
        p.add_argument("--hoa", type=int, action="append", default=[], metavar="L",
                       help="antibunching witness d(L); repeatable")
        p.add_argument("--hosps", type=int, action="append", default=[], metavar="L",
                       help="sub-Poissonian witness d_h(L); repeatable")
        p.add_argument("--hos", type=int, action="append", default=[], metavar="N",
                       help="Hong-Mandel squeezing S_HM(N), N even; repeatable")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nonclassical",
        description="Higher-order nonclassicality witnesses for intermediate states.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("witness", help="evaluate witnesses for one state")
    p.add_argument("--state", required=True, help="e.g. gbs:alpha=5,beta=5,N=5")
    _add_common(p)
    p.set_defaults(func=cmd_witness)

    p = sub.add_parser("sweep", help="tabulate witnesses along one parameter")
    p.add_argument("--state")
    p.add_argument("--preset", help="figure preset name, e.g. fig1")
    p.add_argument("--presets", help="preset file (default: the bundled figures.ini)")
    p.add_argument("--vary")
    p.add_argument("--from", dest="lo", type=float)
    p.add_argument("--to", dest="hi", type=float)
    p.add_argument("--steps", type=int)
    p.add_argument("--relaxed", action="store_true",
                   help="also report crossings of the real-N continuation (gbs, N)")
    p.add_argument("--out", help="output CSV path (default: standard output)")
    _add_common(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("table1", help="reproduce the published GBS witness table")
    p.add_argument("--out", help="also write the comparison as CSV")
    p.set_defaults(func=cmd_table1)

    p = sub.add_parser("mc", help="Monte-Carlo photon-counting estimates")
    p.add_argument("--state", required=True)
    p.add_argument("--shots", type=int, default=100_000)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--resamples", type=int, default=200, help="bootstrap resamples")
    _add_common(p)
    p.set_defaults(func=cmd_mc)

    p = sub.add_parser("dump-state", help="write the amplitude vector as CSV")
    p.add_argument("--state", required=True)
    p.add_argument("--out")
    _add_common(p, witnesses=False)
    p.set_defaults(func=cmd_dump_state)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ArithmeticError as exc:
        print(f"numeric error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
