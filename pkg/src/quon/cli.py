"""Command-line front end: ``quon vev | classify | spectrum | fit | verify``.

Exit codes: 0 success, 1 verification failure, 2 input error, 3 size cap.
"""
from __future__ import annotations

import argparse
import io
import sys
import warnings
from pathlib import Path
from typing import Optional, Sequence

from . import bandfit, models
from .fock import parse_word, vev_rewrite
from .qnum import check_q
from .symsector import (
    CapExceeded, OccupancyVector, attach_exact, classify_sectors,
    enumerate_permutation_words, gram_matrix,
)
from .verify import SUITES, run_suites

EXIT_OK, EXIT_VERIFY, EXIT_INPUT, EXIT_CAP = 0, 1, 2, 3
EXACT_MAX_N = 4


class InputError(Exception):
    pass


def fmt(x: float) -> str:
    out = f"{x:.10g}"
    return "0" if out == "-0" else out


def _q_value(text: str) -> float:
    try:
        return check_q(float(text))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _q_list(text: str) -> list[float]:
    return [_q_value(t) for t in text.split(",") if t.strip()]


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return value


def _table(header: Sequence[str], rows: Sequence[Sequence[str]], style: str) -> str:
    if style == "csv":
        return "".join(",".join(r) + "\n" for r in [header, *rows])
    widths = [max(len(str(c)) for c in col) for col in zip(header, *rows)]
    lines = ["  ".join(str(c).rjust(w) for c, w in zip(r, widths)) for r in [header, *rows]]
    return "\n".join(lines) + "\n"


def _emit(args, text: str) -> None:
    if args.output:
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)


def cmd_vev(args) -> int:
    try:
        word = parse_word(args.word)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    value = vev_rewrite(word)
    _emit(args, (str(value) if args.exact else fmt(value(args.q))) + "\n")
    return EXIT_OK


def cmd_classify(args) -> int:
    try:
        occ = OccupancyVector.parse(args.occupancy)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    if occ.total < 1:
        raise InputError("occupancy must contain at least one quon")
    words = enumerate_permutation_words(occ, cap=args.cap)
    spec = classify_sectors(gram_matrix(words, args.q, threads=args.threads), words)
    exact = args.exact and occ.total <= EXACT_MAX_N
    if args.exact and not exact:
        print(f"warning: exact polynomials only for N <= {EXACT_MAX_N}", file=sys.stderr)
    if exact:
        spec = attach_exact(spec, words, args.q)
    header = ["eigenvalue", "multiplicity", "sector", "null"] + (["polynomial"] if exact else [])
    rows = []
    for c in spec.clusters:
        row = [fmt(c.eigenvalue), str(c.multiplicity), c.label, "yes" if c.null else "no"]
        if exact:
            row.append(str(c.exact) if c.exact is not None else "-")
        rows.append(row)
    _emit(args, _table(header, rows, args.format))
    return EXIT_OK


def cmd_spectrum(args) -> int:
    qs = args.compare_q or [args.q]
    if args.model == "osc":
        if args.nmax is None:
            raise InputError("spectrum osc needs --nmax")
        cfgs = [models.OscillatorConfig(q, args.hbar_omega) for q in qs]
        index = list(range(args.nmax + 1))
        energy = lambda n, cfg: models.oscillator_energy(n, cfg)
        key, extra = "N", ["degeneracy"]
        extra_val = lambda n: [str(models.oscillator_degeneracy(n))]
    else:
        if args.lmax is None:
            raise InputError("spectrum rotor needs --lmax")
        cfgs = [models.RotorConfig(q, args.A) for q in qs]
        index = list(range(0, args.lmax + 1, args.lstep))
        energy = lambda l, cfg: models.rotor_energy(l, cfg)
        key, extra = "l", []
        extra_val = lambda l: []
    cols = ["energy"] if len(qs) == 1 and not args.compare_q else [f"energy_q={fmt(q)}" for q in qs]
    rows = [[str(i)] + [fmt(energy(i, cfg)) for cfg in cfgs] + extra_val(i) for i in index]
    _emit(args, _table([key] + cols + extra, rows, args.format))
    return EXIT_OK


def cmd_fit(args) -> int:
    try:
        if args.demo:
            band = bandfit.load_demo_band()
        elif args.input is None:
            raise InputError("fit needs an input CSV (or --demo)")
        elif args.input == "-":
            band = bandfit.parse_band_csv(sys.stdin.read())
        else:
            band = bandfit.read_band(args.input)
    except (OSError, bandfit.BandFormatError) as exc:
        raise InputError(str(exc)) from None
    lo = -1.0 if args.allow_negative_q else args.q_min
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", bandfit.BoundaryWarning)
        result = bandfit.fit_band(band, (lo, args.q_max), threads=args.threads)
    for w in caught:
        print(f"warning: {w.message}", file=sys.stderr)
    header = ["l", "energy_exp", "energy_fit", "residual"]
    rigid = None
    if args.emit_comparison:
        header.append("energy_rigid")
        _, rigid = bandfit.rigid_refit(band)
    rows = []
    for k, (l, e) in enumerate(zip(band.l, band.energy)):
        row = [str(l), fmt(e), fmt(result.fitted[k]), fmt(result.per_level_residuals[k])]
        if rigid is not None:
            row.append(fmt(rigid[k]))
        rows.append(row)
    summary = f"A={fmt(result.A)} q={fmt(result.q)} rms={fmt(result.rms_residual)}\n"
    table = _table(header, rows, args.format)
    if args.output:
        Path(args.output).write_text(table)
        sys.stdout.write(summary)
    else:
        sys.stdout.write(table + summary)
    return EXIT_OK


def cmd_verify(args) -> int:
    names = args.suite or list(SUITES)
    results = run_suites(names, args.max_n, cap=args.cap)
    out = io.StringIO()
    for r in results:
        status = "PASS" if r.ok else "FAIL"
        out.write(f"{status} {r.name}: {r.passed}/{r.total}\n")
        for msg in r.failures:
            out.write(f"    {msg}\n")
    _emit(args, out.getvalue())
    return EXIT_OK if all(r.ok for r in results) else EXIT_VERIFY


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--q", type=_q_value, default=1.0,
                        help="deformation parameter in [-1, 1] (default 1)")
    common.add_argument("--exact", action="store_true",
                        help="print exact polynomials in q where available")
    common.add_argument("--output", help="write the table to this file")
    common.add_argument("--format", choices=("csv", "table"), default="csv")
    common.add_argument("--threads", type=_positive_int, default=1)
    common.add_argument("--cap", type=_positive_int, default=8,
                        help="maximum number of quanta to enumerate")

    parser = argparse.ArgumentParser(prog="quon", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("vev", parents=[common], help="vacuum expectation value of an operator word")
    p.add_argument("word", help='operator string such as "a2 a1 ad2 ad1"')
    p.set_defaults(func=cmd_vev)

    p = sub.add_parser("classify", parents=[common], help="Gram-matrix symmetry sectors")
    p.add_argument("occupancy", nargs="+", help="mode:count pairs, e.g. 1:1 2:1 3:1")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("spectrum", parents=[common], help="oscillator or rotor spectra")
    p.add_argument("model", choices=("osc", "rotor"))
    p.add_argument("--nmax", type=int)
    p.add_argument("--lmax", type=int)
    p.add_argument("--lstep", type=_positive_int, default=1, help="l increment (2 for even bands)")
    p.add_argument("--compare-q", type=_q_list, help="comma-separated q values, one column each")
    p.add_argument("--hbar-omega", type=float, default=1.0)
    p.add_argument("--A", type=float, default=1.0, help="rotor inertia constant")
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("fit", parents=[common], help="fit A and q of the quon rotor to a band")
    p.add_argument("input", nargs="?", help="CSV with header l,energy_kev[,weight]; - for stdin")
    p.add_argument("--demo", action="store_true", help="use the bundled synthetic band")
    p.add_argument("--q-min", type=_q_value, default=0.0)
    p.add_argument("--q-max", type=_q_value, default=1.0)
    p.add_argument("--allow-negative-q", action="store_true", help="search q in [-1, q-max]")
    p.add_argument("--emit-comparison", action="store_true",
                   help="add the rigid-rotor (q = 1) refit column")
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("verify", parents=[common], help="run the consistency suites")
    p.add_argument("--max-n", type=int, default=4)
    p.add_argument("--suite", action="append", choices=sorted(SUITES))
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0) and EXIT_INPUT
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except CapExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CAP
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
