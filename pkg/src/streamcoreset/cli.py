"""Command-line entry point: ``streamcoreset {gen,stream,sens,bench}``."""
from __future__ import annotations

import argparse
import logging
import sys

import numpy as np

from . import bench
from .baselines import jl_project
from .dataio import read_dense_csv, read_sparse_triplets, write_coreset_csv, write_dense_csv, write_stats_jsonl
from .errors import ConfigError, CoresetError
from .linalg import DEFAULT_RANK_TOL, GramMatrix, build_oracle
from .sampler import SamplerConfig
from .streaming import StreamingCoreset
from .synthetic import KINDS, gen_synthetic


def _input_args(p, required=True):
    p.add_argument("--input", "-i", action="append", default=[], required=required, help="input file (repeatable)")
    p.add_argument("--format", choices=["dense", "sparse"], default="dense")
    p.add_argument("--source-dim", type=int, help="column count D of sparse input")
    p.add_argument("--d", type=int, help="target dimension (JL projection for sparse input)")


def _sampler_args(p):
    p.add_argument("--epsilon", type=float, default=0.5)
    p.add_argument("--delta", type=float, default=0.1)
    p.add_argument("--m-override", type=int)
    p.add_argument("--seed", type=int, default=0)


def _rows(args):
    if args.format == "sparse":
        if args.source_dim is None or args.d is None:
            raise ConfigError("sparse input needs --source-dim and --d")
        for path in args.input:
            yield from jl_project(read_sparse_triplets(path, args.source_dim), args.source_dim, args.d, args.seed)
    else:
        for path in args.input:
            yield from read_dense_csv(path)


def _peek_dim(rows):
    it = iter(rows)
    first = next(it, None)
    if first is None:
        raise ConfigError("input stream is empty")

    def chained():
        yield first
        yield from it

    return first.shape[0], chained()


def cmd_gen(args):
    rows = gen_synthetic(args.kind, args.n, args.d, args.seed)
    if args.out == "-":
        for a in rows:
            sys.stdout.write(",".join(repr(float(x)) for x in a) + "\n")
    else:
        write_dense_csv(args.out, rows)
    return 0


def cmd_stream(args):
    d, rows = _peek_dim(_rows(args))
    cfg = SamplerConfig(args.epsilon, args.delta, d, args.m_override)
    sc = StreamingCoreset(cfg, seed=args.seed, record_stats=args.stats is not None)
    c = sc.extend(rows)
    if args.out == "-":
        write_coreset_csv(sys.stdout, c)
    else:
        write_coreset_csv(args.out, c)
    if args.stats:
        write_stats_jsonl(args.stats, sc.stats)
    status = "meets" if c.meets_size_bound else "BELOW"
    print(
        f"n={sc.n} rank={c.rank_at_emit} singletons={c.singleton_count} ({status} m={cfg.m}) "
        f"coreset_rows={c.size}",
        file=sys.stderr,
    )
    return 0


def cmd_sens(args):
    # two passes: accumulate the Gram matrix, then score each row
    d, rows = _peek_dim(_rows(args))
    g = GramMatrix(d)
    for a in rows:
        g.update(a)
    z = build_oracle(g, args.tau_rank)
    out = sys.stdout
    out.write("index,sensitivity\n")
    for i, a in enumerate(_rows(args)):
        out.write(f"{i},{z(a)!r}\n")
    print(f"rank={z.rank}", file=sys.stderr)
    return 0


def cmd_bench(args):
    fmt = "synthetic" if args.synthetic else args.format
    cfg = bench.RunConfig(
        epsilon=args.epsilon,
        delta=args.delta,
        d=args.d,
        m_override=args.m_override,
        seed=args.seed,
        inputs=args.input,
        input_format=fmt,
        synthetic_kind=args.synthetic or "skewed",
        n=args.n,
        source_dim=args.source_dim,
        methods=args.methods.split(","),
        k=args.k,
        trials=args.trials,
        repetitions=args.repetitions,
        size=args.size,
        leaf_size=args.leaf_size,
        output=args.out,
        timing=not args.no_timing,
    )
    reports = bench.run_benchmark(cfg)
    if not args.out:
        print(",".join(bench.CSV_HEADER))
        for r in reports:
            print(",".join(r.csv_row()))
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="streamcoreset", description="Streaming SVD coresets.")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="write synthetic rows as dense CSV")
    p.add_argument("--kind", choices=KINDS, default="gaussian")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", "-o", default="-")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("stream", help="build a streaming coreset, write index,weight,v0.. CSV")
    _input_args(p)
    _sampler_args(p)
    p.add_argument("--out", "-o", default="-")
    p.add_argument("--stats", help="per-step stats as JSON lines")
    p.set_defaults(func=cmd_stream)

    p = sub.add_parser("sens", help="print the sensitivity of every input row")
    _input_args(p)
    p.add_argument("--seed", type=int, default=0, help="JL seed for sparse input")
    p.add_argument("--tau-rank", type=float, default=DEFAULT_RANK_TOL)
    p.set_defaults(func=cmd_sens)

    p = sub.add_parser("bench", help="compare coreset methods on one dataset")
    _input_args(p, required=False)
    _sampler_args(p)
    p.add_argument("--synthetic", choices=KINDS, help="use a synthetic stream instead of --input")
    p.add_argument("--n", type=int, default=2000, help="rows of synthetic data")
    p.add_argument("--methods", default=",".join(bench.METHODS))
    p.add_argument("--k", type=int, help="subspace dimension for svd_error (default d-1)")
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--repetitions", type=int, default=10)
    p.add_argument("--size", type=int, help="baseline coreset size (default m)")
    p.add_argument("--leaf-size", type=int, help="merge-reduce leaf size L (default size)")
    p.add_argument("--out", "-o", help="CSV path; a .json config sidecar is written beside it")
    p.add_argument("--no-timing", action="store_true", help="leave the seconds column empty")
    p.set_defaults(func=cmd_bench)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except BrokenPipeError:
        sys.stderr.close()
        return 0
    except CoresetError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except np.linalg.LinAlgError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
