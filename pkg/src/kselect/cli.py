"""Command-line interface.

Exit status is 0 on success, 1 for invalid input (flags, files, dimensions)
and 2 when a numerical routine fails to converge.
"""

from __future__ import annotations

import argparse
import logging
import sys

from . import evalbench, io, selection
from .errors import InvalidInputError, NumericalError
from .matrix import fuse
from .spectral import spectral_cluster

log = logging.getLogger("kselect")

EXIT_OK, EXIT_INVALID, EXIT_NUMERICAL = 0, 1, 2
FUSION_MODES = {"mean": "none", "mean+degree": "degree"}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INVALID, f"{self.prog}: error: {message}\n")


def _add_matrices(p):
    p.add_argument("--matrix", action="append", required=True, metavar="PATH",
                   help="MAT-1 affinity matrix; repeat for several views")
    p.add_argument("--fusion", choices=sorted(FUSION_MODES),
                   help="view fusion (default: mean+degree for several matrices, mean for one)")


def _add_range(p):
    p.add_argument("--kmin", type=int, default=2)
    p.add_argument("--kmax", type=int, default=5)


def _add_strategy(p):
    p.add_argument("--strategy", default="average", type=str.lower, choices=selection.STRATEGIES)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="kselect", description="Spectral clustering with automatic cluster-count selection.")
    parser.add_argument("-v", "--verbose", action="count", default=0)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("select", help="print the selected number of clusters")
    _add_matrices(p)
    _add_range(p)
    _add_strategy(p)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--dump-confidences", metavar="PATH", help="write the per-k confidence table")

    p = sub.add_parser("cluster", help="cluster a matrix and write labels")
    _add_matrices(p)
    _add_range(p)
    _add_strategy(p)
    p.add_argument("--k", type=int, help="cluster count; selected automatically when omitted")
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--out", required=True, metavar="PATH", help="LBL-1 output")

    p = sub.add_parser("fuse", help="fuse affinity views into one matrix")
    _add_matrices(p)
    p.add_argument("--out", required=True, metavar="PATH", help="MAT-1 output")

    p = sub.add_parser("indices", help="print raw and normalized criterion scores per k")
    _add_matrices(p)
    _add_range(p)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--out", metavar="PATH", help="write the table here instead of stdout")

    p = sub.add_parser("synth", help="generate a planted-partition affinity matrix")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--per-cluster", type=int, required=True)
    p.add_argument("--within", type=float, nargs=2, default=(0.8, 1.0), metavar=("LOW", "HIGH"))
    p.add_argument("--cross", type=float, nargs=2, default=(0.0, 0.2), metavar=("LOW", "HIGH"))
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--out", required=True, metavar="PATH", help="MAT-1 output")
    p.add_argument("--labels-out", metavar="PATH", help="LBL-1 output of the planted labels")

    p = sub.add_parser("evaluate", help="benchmark a strategy over a manifest")
    p.add_argument("--manifest", required=True, metavar="PATH")
    _add_range(p)
    _add_strategy(p)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--out", required=True, metavar="PATH", help="report output")
    p.add_argument("--no-breakdown", action="store_true", help="omit the per-k breakdown rows")
    return parser


def _fused(args):
    views = [io.load_affinity(p) for p in args.matrix]
    if args.fusion is None:
        mode = "degree" if len(views) > 1 else "none"
    else:
        mode = FUSION_MODES[args.fusion]
    return fuse(views, mode)


def _krange(args, n: int) -> selection.KRange:
    k_range = selection.KRange(args.kmin, args.kmax)
    k_range.check(n)
    return k_range


def _select(args, a) -> int:
    k_range = _krange(args, a.n)
    if args.strategy == "random":
        return selection.random_k(k_range, args.seed)
    table = selection.confidence_table(a, k_range, args.seed)
    if getattr(args, "dump_confidences", None):
        io.atomic_write_text(args.dump_confidences, selection.format_confidence_table(table))
    return selection.select_k(table, args.strategy, args.seed)


def _run(args) -> None:
    cmd = args.command
    if cmd == "select":
        print(_select(args, _fused(args)))
    elif cmd == "cluster":
        a = _fused(args)
        k = args.k if args.k is not None else _select(args, a)
        io.write_labels(args.out, spectral_cluster(a, k, args.seed))
        print(args.out)
    elif cmd == "fuse":
        io.write_matrix(args.out, _fused(args))
        print(args.out)
    elif cmd == "indices":
        a = _fused(args)
        text = selection.format_confidence_table(selection.confidence_table(a, _krange(args, a.n), args.seed))
        if args.out:
            io.atomic_write_text(args.out, text)
            print(args.out)
        else:
            sys.stdout.write(text)
    elif cmd == "synth":
        spec = evalbench.SynthSpec(args.k, args.per_cluster, *args.within, *args.cross, seed=args.seed)
        a, labels = evalbench.generate_block_affinity(spec)
        io.write_matrix(args.out, a)
        if args.labels_out:
            io.write_labels(args.labels_out, labels)
        print(args.out)
    elif cmd == "evaluate":
        records = evalbench.read_manifest(args.manifest)
        report = evalbench.evaluate_manifest(records, selection.KRange(args.kmin, args.kmax), args.strategy, args.seed)
        evalbench.write_report(args.out, report, breakdown=not args.no_breakdown)
        print(args.out)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2), format="%(levelname)s %(name)s: %(message)s")
    try:
        _run(args)
    except NumericalError as exc:
        print(f"kselect: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except InvalidInputError as exc:
        print(f"kselect: error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except OSError as exc:
        print(f"kselect: error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
