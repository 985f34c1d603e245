"""
Command line interface.

Exit codes: 0 success, 2 unreadable or malformed input, 3 instance over a
size cap, 4 bad arguments.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys

from . import __version__
from .bound import clade_matrix, clade_partition, pair_min_sum, resolve_cap
from .core import (
    ParseError,
    TanglegramError,
    caterpillar,
    caterpillar_tanglegram,
    extend_family,
    grid_family,
    load,
    serialize,
)
from .layout import SizeCapError
from .sampler import DISTRIBUTIONS, SampleConfig, random_tanglegram, random_tree
from .simulate import POLICY_PAIRS, run_simulation, summarize, write_csv
from .solver import EXACT_CAP, exact_crt

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_CAP = 3
EXIT_ARGS = 4


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        sys.exit(EXIT_ARGS)


def _read(path):
    try:
        return load(path)
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc.strerror}") from None


def _write(text: str, path) -> None:
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def cmd_crt(args) -> int:
    t = _read(args.file)
    report = exact_crt(t, cap=args.cap, prune=not args.no_prune)
    left, right = report.witness.bits()
    print(f"n: {t.n}")
    print(f"crt: {report.crt}")
    print(f"left: {left}")
    print(f"right: {right}")
    print(f"nodes: {report.nodes}")
    print(f"pruned: {report.pruned}")
    print(f"leaves: {report.leaves}")
    print(f"time_s: {report.seconds:.6g}")
    return EXIT_OK


def cmd_bound(args) -> int:
    t = _read(args.file)
    cl = resolve_cap(args.cl, t.n)
    cr = resolve_cap(args.cr, t.n)
    lp = clade_partition(t.left, cl, "left")
    rp = clade_partition(t.right, cr, "right")
    m = clade_matrix(t, lp, rp)
    print(f"n: {t.n}")
    print(f"cap_left: {cl:.6g}")
    print(f"cap_right: {cr:.6g}")
    print("left_parts: " + " ".join(map(str, lp.sizes)))
    print("right_parts: " + " ".join(map(str, rp.sizes)))
    print("matrix:")
    for row in m:
        print("  " + " ".join(str(int(x)) for x in row))
    print(f"bound: {pair_min_sum(m)}")
    return EXIT_OK


def _components(kind: str, k: int, seed):
    if kind == "caterpillar":
        return [caterpillar(k)] * (2 * k + 2)
    if kind == "random":
        import numpy as np

        rng = np.random.default_rng(seed)
        return [random_tree(k, rng) for _ in range(2 * k + 2)]
    raise UsageError(f"unknown component kind {kind!r}")


def _one_int(params, name):
    if len(params) != 1:
        raise UsageError(f"expected exactly one parameter: {name}")
    try:
        return int(params[0])
    except ValueError:
        raise UsageError(f"{name} must be an integer, got {params[0]!r}") from None


def cmd_gen(args) -> int:
    if args.family == "caterpillar-tanglegram":
        t = caterpillar_tanglegram(_one_int(args.params, "n"))
    elif args.family == "grid":
        k = _one_int(args.params, "k")
        if k < 2:
            raise UsageError("grid needs k >= 2")
        t = grid_family(_components(args.components, k, args.seed))
    else:
        n = _one_int(args.params, "n")
        k = args.k if args.k is not None else math.isqrt(n)
        if k < 2:
            raise UsageError("extended needs k >= 2")
        base = grid_family(_components(args.components, k, args.seed))
        t = extend_family(base, n, args.seed)
    _write(serialize(t), args.output)
    return EXIT_OK


def cmd_sample(args) -> int:
    cfg = SampleConfig(args.n, seed=args.seed, count=args.count, distribution=args.distribution)
    if args.out_dir:
        os.makedirs(args.out_dir, exist_ok=True)
    chunks = []
    for i in range(cfg.count):
        text = serialize(random_tanglegram(cfg, i))
        if args.out_dir:
            _write(text, os.path.join(args.out_dir, f"sample_{args.n}_{i}.tgl"))
        else:
            chunks.append(text)
    if chunks:
        sys.stdout.write("\n".join(chunks))
    return EXIT_OK


def cmd_simulate(args) -> int:
    pairs = tuple(p.strip() for p in args.policies.split(",")) if args.policies else POLICY_PAIRS
    for p in pairs:
        if p not in POLICY_PAIRS:
            raise UsageError(f"unknown policy pair {p!r}")
    try:
        rows = run_simulation(
            args.nmin,
            args.nmax,
            args.samples,
            args.seed,
            pairs=pairs,
            exact_upto=min(args.exact_upto, EXACT_CAP),
            timing=args.timing,
            distribution=args.distribution,
            threads=args.threads,
        )
    except ValueError as exc:
        if isinstance(exc, TanglegramError):
            raise
        raise UsageError(str(exc)) from None
    if args.out in (None, "-"):
        write_csv(rows, sys.stdout)
    else:
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            write_csv(rows, fh)
    summary = summarize(
        rows,
        {
            "seed": args.seed,
            "nmin": args.nmin,
            "nmax": args.nmax,
            "samples": args.samples,
            "distribution": args.distribution,
        },
    )
    if args.summary:
        with open(args.summary, "w", encoding="utf-8", newline="\n") as fh:
            json.dump(summary, fh, indent=2, sort_keys=True)
            fh.write("\n")
    ll = summary["series"].get("ll")
    if ll:
        for key, ref in (("fit_mean", "ll_mean_n2"), ("fit_max", "ll_max_n2")):
            fit = ll[key]
            if fit:
                print(
                    f"ll {key}: {fit[0]:.4g} n^2 {fit[1]:+.4g} n {fit[2]:+.4g}"
                    f" (reference {summary['reference'][ref]} n^2)",
                    file=sys.stderr,
                )
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="tgl", description=__doc__.strip().splitlines()[0])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("crt", help="exact tangle crossing number of a .tgl file")
    s.add_argument("file")
    s.add_argument("--cap", type=int, default=EXACT_CAP, help="largest n the solver accepts")
    s.add_argument("--no-prune", action="store_true", help="enumerate without pruning")
    s.set_defaults(func=cmd_crt)

    s = sub.add_parser("bound", help="clade-partition lower bound")
    s.add_argument("file")
    s.add_argument("--cl", required=True, help="left cap: number, 'sqrt' or 'half'")
    s.add_argument("--cr", required=True, help="right cap: number, 'sqrt' or 'half'")
    s.set_defaults(func=cmd_bound)

    s = sub.add_parser("gen", help="write a member of an extremal family")
    s.add_argument("family", choices=["caterpillar-tanglegram", "grid", "extended"])
    s.add_argument("params", nargs="*")
    s.add_argument("--components", choices=["caterpillar", "random"], default="caterpillar")
    s.add_argument("--k", type=int, default=None, help="grid order for 'extended'")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("-o", "--output", default=None)
    s.set_defaults(func=cmd_gen)

    s = sub.add_parser("sample", help="random tanglegrams")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--count", type=int, default=1)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--distribution", choices=DISTRIBUTIONS, default=DISTRIBUTIONS[0])
    s.add_argument("--out-dir", default=None)
    s.set_defaults(func=cmd_sample)

    s = sub.add_parser("simulate", help="lower-bound simulation, CSV output")
    s.add_argument("--nmin", type=int, default=10)
    s.add_argument("--nmax", type=int, default=100)
    s.add_argument("--samples", type=int, default=100)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--exact-upto", type=int, default=0)
    s.add_argument("--policies", default=None, help="comma list such as ss,ml,ll (default: all 9)")
    s.add_argument("--distribution", choices=DISTRIBUTIONS, default=DISTRIBUTIONS[0])
    s.add_argument("--threads", type=int, default=None)
    s.add_argument("--timing", action="store_true", help="fill runtime_s (output no longer byte-stable)")
    s.add_argument("--out", default=None)
    s.add_argument("--summary", default=None, help="write averages, maxima and fits as JSON")
    s.set_defaults(func=cmd_simulate)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ParseError as exc:
        print(f"tgl: parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except SizeCapError as exc:
        print(f"tgl: {exc}", file=sys.stderr)
        return EXIT_CAP
    except (TanglegramError, UsageError) as exc:
        print(f"tgl: {exc}", file=sys.stderr)
        return EXIT_ARGS


if __name__ == "__main__":
    sys.exit(main())
