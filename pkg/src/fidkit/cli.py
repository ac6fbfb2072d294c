"""Command-line entry point: ``fidkit <command> ...``.

Exit codes: 0 success, 1 usage or validation error, 2 numerical failure.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from . import io
from .descent import (
    AttackConfig,
    Encoder,
    Mode,
    default_init,
    default_problem,
    run_attack,
    sample_from_stats,
)
from .engine import Engine, frechet_distance, is_approximation
from .errors import DimensionError, FidError, NumericalError
from .experiments import gradcheck_problem, run_bench, run_numerr
from .gradients import fid_gradient, finite_diff_check
from .linalg import make_rng
from .stats import GaussianStats

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_NUMERIC = 2
GRADCHECK_LIMIT = 1e-4


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _int_list(text: str) -> list[int]:
    try:
        vals = [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")
    if not vals or min(vals) < 1:
        raise argparse.ArgumentTypeError("all counts must be >= 1")
    return vals


def _positive_int(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {v}")
    return v


def _str_list(choices):
    def parse(text: str) -> list[str]:
        vals = [v.strip() for v in text.split(",") if v.strip()]
        bad = [v for v in vals if v not in choices]
        if bad or not vals:
            raise argparse.ArgumentTypeError(f"choose from {','.join(choices)}")
        return vals

    return parse


def _out(path: str):
    return sys.stdout if path == "-" else path


def cmd_stats(args) -> int:
    x = io.read_samples_csv(args.input)
    if x.shape[1] < 2:
        raise DimensionError(f"need at least 2 samples (rows), got n={x.shape[1]}")
    stats = GaussianStats.from_samples(x, factor=args.repr == "factor")
    io.write_stats(args.out, stats)
    print(f"d={stats.d} n={stats.sample_count} trace={io.format_float(stats.trace())}")
    return EXIT_OK


FID_HEADER = ["engine", "d", "m", "mean_sq_diff", "tr_sigma1", "tr_sigma2", "tr_sqrt", "raw_total", "fid", "note"]


def cmd_fid(args) -> int:
    real = io.read_stats(args.real)
    fake = io.read_samples_csv(args.fake)
    if fake.shape[0] != real.d:
        raise DimensionError(f"feature dimension mismatch: fake d={fake.shape[0]}, real stats d={real.d}")
    if fake.shape[1] < 2:
        raise DimensionError(f"need at least 2 fake samples, got m={fake.shape[1]}")
    b = frechet_distance(fake, real, args.engine)
    note = "approximation" if is_approximation(args.engine) else "exact"
    row = [args.engine, real.d, fake.shape[1], b.mean_sq_diff, b.tr_sigma1, b.tr_sigma2, b.tr_sqrt, b.raw_total, b.total, note]
    io.write_csv_rows(sys.stdout, FID_HEADER, [row])
    return EXIT_OK


def cmd_bench(args) -> int:
    rows = run_bench(args.d, args.m, args.n, args.trials, args.mode, args.seed)
    io.write_csv_rows(
        _out(args.out),
        ["m", "engine", "mean_seconds", "std_seconds"],
        [[r.m, r.engine, r.mean_seconds, r.std_seconds] for r in rows],
    )
    return EXIT_OK


def cmd_numerr(args) -> int:
    small = [m for m in args.m if m < 2]
    if args.d < 2 or small:
        raise DimensionError(f"numerr needs d >= 2 and m >= 2 (d={args.d}, m={small or args.m})")
    recs = run_numerr(args.d, args.m, args.precision, args.trials, args.seed)
    io.write_csv_rows(
        _out(args.out),
        ["m", "precision", "ground_truth", "err_fullsqrt", "err_fast"],
        [[r.m, r.precision, r.ground_truth, r.err_fullsqrt, r.err_fast] for r in recs],
    )
    return EXIT_OK


def cmd_gradcheck(args) -> int:
    if args.m < 2:
        raise DimensionError(f"gradcheck needs m >= 2, got m={args.m}")
    x1, target = gradcheck_problem(args.d, args.m, args.seed, duplicate=args.duplicate_column)
    def grad_fn(x, t):
        g = fid_gradient(x, t)
        if args.corrupt:
            # hidden test hook: the checker must notice a wrong entry
            g.wrt_features[0, 0] += args.corrupt * (1.0 + abs(g.wrt_features[0, 0]))
        return g

    res = finite_diff_check(x1, target, step=args.step, seed=args.seed, gradient_fn=grad_fn)
    print(f"max_rel_err={res.max_rel_err:.3e} mean_rel_err={res.mean_rel_err:.3e} "
          f"checked={res.checked} skipped={res.skipped}")
    if res.nonsmooth_columns:
        cols = ",".join(str(c) for c in res.nonsmooth_columns)
        print(f"skipped nonsmooth columns: {cols}")
    return EXIT_OK if res.max_rel_err <= GRADCHECK_LIMIT else EXIT_NUMERIC


def cmd_attack(args) -> int:
    train = io.read_stats(args.train_stats)
    val = io.read_stats(args.val_stats)
    if train.d != val.d:
        raise DimensionError(f"train stats d={train.d} differs from val stats d={val.d}")
    if args.encoder == "identity":
        enc = Encoder.identity(train.d)
    else:
        enc = Encoder.fixed_linear(args.input_dim or train.d, train.d, args.encoder_seed)
    cfg = AttackConfig(
        mode=args.mode,
        steps=args.steps,
        learning_rate=args.lr,
        batch=args.batch,
        squash=args.squash,
        seed=args.seed,
        eval_every=args.eval_every,
        scale_loss=args.scale_loss,
    )
    if args.init:
        init = io.read_samples_csv(args.init)
    elif cfg.mode is Mode.MAXIMIZE:
        if enc.kind != "identity":
            raise DimensionError("maximize with a linear encoder needs --init samples in input space")
        init = np.clip(sample_from_stats(train, make_rng(cfg.seed), cfg.batch), 0.0, 1.0)
    else:
        init = default_init(cfg, enc.input_dim)
    if init.shape[0] != enc.input_dim:
        raise DimensionError(f"init has p={init.shape[0]} rows, encoder expects p={enc.input_dim}")
    trace = run_attack(cfg, enc, train, val, init)
    io.write_csv_rows(
        _out(args.out),
        ["step", "train_fid", "val_fid"],
        [[r.step, r.train_fid, r.val_fid] for r in trace.records],
    )
    return EXIT_OK


def cmd_synth(args) -> int:
    target, train, val = default_problem(args.dim, args.seed, args.n_train, args.n_val, factor=args.repr == "factor")
    io.write_stats(args.train_out, train)
    io.write_stats(args.val_out, val)
    if args.samples_out:
        io.write_samples_csv(args.samples_out, target.sample(make_rng([args.seed, 5]), args.samples))
    print(f"d={args.dim} n_train={args.n_train} n_val={args.n_val}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="fidkit", description="Frechet distance between Gaussians fitted to features.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("stats", help="fit mean and covariance to a sample CSV and save them")
    s.add_argument("input", help="CSV, one sample per row")
    s.add_argument("out", help="output stats file")
    s.add_argument("--repr", choices=["full", "factor"], default="full")
    s.set_defaults(func=cmd_stats)

    s = sub.add_parser("fid", help="distance from fake samples to saved real statistics")
    s.add_argument("fake", help="CSV of fake features, one sample per row")
    s.add_argument("real", help="stats file of the real data")
    s.add_argument("--engine", choices=[e.value for e in Engine], default="fast")
    s.set_defaults(func=cmd_fid)

    s = sub.add_parser("bench", help="time fast and baseline engines over batch sizes")
    s.add_argument("--d", type=_positive_int, default=2048)
    s.add_argument("--m", type=_int_list, default=[8, 16, 32, 64, 128, 256])
    s.add_argument("--n", type=_positive_int, default=2048, help="real samples behind the precomputed covariance")
    s.add_argument("--trials", type=_positive_int, default=10)
    s.add_argument("--mode", choices=["fast", "baseline", "both"], default="both")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--out", default="-")
    s.set_defaults(func=cmd_bench)

    s = sub.add_parser("numerr", help="error study with a known square root")
    s.add_argument("--d", type=_positive_int, default=2048)
    s.add_argument("--m", type=_int_list, default=[8, 16, 32, 64, 128, 256])
    s.add_argument("--precision", type=_str_list(("f32", "f64")), default=["f32"])
    s.add_argument("--trials", type=_positive_int, default=1)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--out", default="-")
    s.set_defaults(func=cmd_numerr)

    s = sub.add_parser("gradcheck", help="check analytic gradients against central differences")
    s.add_argument("--d", type=_positive_int, default=16)
    s.add_argument("--m", type=int, default=6)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--step", type=float, default=1e-4)
    s.add_argument("--duplicate-column", action="store_true", help="make the last fake sample repeat the first")
    s.add_argument("--corrupt", type=float, default=0.0, help=argparse.SUPPRESS)
    s.set_defaults(func=cmd_gradcheck)

    s = sub.add_parser("attack", help="gradient descent/ascent on samples against fixed statistics")
    s.add_argument("--train-stats", required=True)
    s.add_argument("--val-stats", required=True)
    s.add_argument("--mode", choices=[m.value for m in Mode], default="minimize")
    s.add_argument("--steps", type=int, default=500)
    s.add_argument("--lr", type=float, default=10.0)
    s.add_argument("--batch", type=int, default=64)
    s.add_argument("--squash", choices=["sigmoid", "clip", "none"], default=None,
                   help="default: sigmoid for minimize, clip for maximize")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--eval-every", type=_positive_int, default=10)
    s.add_argument("--scale-loss", action="store_true")
    s.add_argument("--encoder", choices=["identity", "linear"], default="identity")
    s.add_argument("--input-dim", type=int, default=0, help="input dimension p of the linear encoder")
    s.add_argument("--encoder-seed", type=int, default=0)
    s.add_argument("--init", help="CSV of starting samples (one per row)")
    s.add_argument("--out", default="-")
    s.set_defaults(func=cmd_attack)

    s = sub.add_parser("synth", help="write train/val stats of the seeded synthetic target")
    s.add_argument("--dim", type=_positive_int, default=64)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--n-train", type=_positive_int, default=4096)
    s.add_argument("--n-val", type=_positive_int, default=1024)
    s.add_argument("--repr", choices=["full", "factor"], default="full")
    s.add_argument("--train-out", required=True)
    s.add_argument("--val-out", required=True)
    s.add_argument("--samples-out", help="also write fresh target samples to this CSV")
    s.add_argument("--samples", type=_positive_int, default=64)
    s.set_defaults(func=cmd_synth)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code
    if getattr(args, "squash", "unset") is None:
        args.squash = "sigmoid" if args.mode == "minimize" else "clip"
    try:
        return args.func(args)
    except NumericalError as exc:
        print(f"fidkit {args.command}: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (FidError, ValueError) as exc:
        print(f"fidkit {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
