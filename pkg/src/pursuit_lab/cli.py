"""Command-line interface: one subcommand per workflow.

Subcommands: simulate, optimize, smoothness, squint, bench, glm, huber.
Every output is written atomically (temp file + rename) and is accompanied
by a ``<out>.config.json`` echo of the resolved options, so any run can be
reproduced from its outputs. Exit codes: 0 success, 1 usage error, 2
computation error.
"""

import argparse
import configparser
import json
import os
import sys
import tempfile

import numpy as np

from . import bench as bench_mod
from . import data as data_mod
from .errors import CsvParseError, DegenerateInputError, FitConvergenceError
from .glm import fit_quasibinomial_glm
from .indexes import registry_lookup
from .optimize import CrsConfig, JsoConfig, crs_run, jso_run, save_trace_jsonl
from .smoothness import fit_smoothness, sample_bases_smoothness
from .squint import (
    bin_average,
    fit_sigmoid_nls,
    sample_bases_squint,
    squintability_kernel,
    squintability_parametric,
)

SEED_ENV_VAR = "PURSUIT_LAB_SEED"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    """ArgumentParser that reports usage problems with exit code 1."""

    def error(self, message):
        raise UsageError(message)


def _atomic_write(path, writer):
    """Write via a temp file in the target directory, then rename."""
    directory = os.path.dirname(os.path.abspath(path)) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp_", suffix="~")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            writer(fh)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _write_json(path, obj):
    _atomic_write(path, lambda fh: fh.write(json.dumps(obj, indent=2) + "\n"))


def _echo_config(out_path, args):
    echo = {k: v for k, v in sorted(vars(args).items()) if k != "func"}
    _write_json(out_path + ".config.json", echo)


def _resolve_seed(args):
    if args.seed is None:
        env = os.environ.get(SEED_ENV_VAR)
        if env is not None:
            args.seed = int(env)
        else:
            args.seed = 0


def _load_dataset(path):
    return data_mod.load_csv(path)


def _load_basis(path):
    ds = data_mod.load_csv(path)
    from .manifold import orthonormalize

    return orthonormalize(ds.values)


# ---------------------------------------------------------------------------
# subcommands


def cmd_simulate(args):
    rng = np.random.default_rng(args.seed)
    if args.shape == "pipe":
        ds = data_mod.gen_pipe(args.n, args.p, rng)
    elif args.shape == "sine":
        ds = data_mod.gen_sine(args.n, args.p, rng)
    elif args.shape == "trimodal":
        ds = data_mod.gen_trimodal(args.n, rng)
    else:
        ds = data_mod.gen_randu(args.n, seed=max(args.seed, 1))
    if args.sphere:
        ds = data_mod.sphere(ds)
    _atomic_write(args.out, lambda fh: data_mod.save_csv(ds, fh))
    _echo_config(args.out, args)
    return 0


def cmd_optimize(args):
    ds = _load_dataset(args.data)
    index = registry_lookup(args.index)
    if not index.supports(args.d):
        raise ValueError(f"index {args.index!r} does not support d={args.d}")
    if args.optimizer == "jso":
        cfg = JsoConfig(
            n_jelly=args.jellies,
            max_iter=args.iters,
            beta=args.beta,
            gamma=args.gamma,
            seed=args.seed,
        )
        run = jso_run(ds, index, args.d, cfg)
    else:
        cfg = CrsConfig(
            max_tries=args.max_tries,
            alpha=args.alpha,
            max_iter=args.iters,
            seed=args.seed,
        )
        run = crs_run(ds, index, args.d, cfg)
    _atomic_write(args.out, lambda fh: save_trace_jsonl(run, fh))
    _echo_config(args.out, args)
    return 0


def cmd_smoothness(args):
    ds = _load_dataset(args.data)
    index = registry_lookup(args.index)
    bases, values = sample_bases_smoothness(
        ds, index, args.d, n_basis=args.n_bases, seed=args.seed
    )
    fit = fit_smoothness(bases, values)
    out = {"index": args.index, "d": args.d, **fit.to_dict()}
    _write_json(args.out, out)
    _echo_config(args.out, args)
    return 0


def cmd_squint(args):
    ds = _load_dataset(args.data)
    index = registry_lookup(args.index)
    if args.optimal is not None:
        a_star = _load_basis(args.optimal)
        source = "supplied"
    else:
        cfg = JsoConfig(n_jelly=50, max_iter=50, seed=args.seed)
        a_star = jso_run(ds, index, args.d, cfg).best_basis
        source = "jso_best"
    pairs = sample_bases_squint(
        ds,
        index,
        args.d,
        a_star,
        n_basis=args.n_bases,
        step=args.step,
        min_proj_dist=args.min_proj_dist,
        seed=args.seed,
    )
    samples = bin_average(pairs, bin_width=args.bin_width)
    if args.method == "nls":
        result = squintability_parametric(fit_sigmoid_nls(samples))
    else:
        result = squintability_kernel(samples)
    out = {
        "index": args.index,
        "d": args.d,
        "optimal_basis_source": source,
        "n_bins": int(samples.centers.size),
        "r0": samples.r0,
        **result.to_dict(),
    }
    _write_json(args.out, out)
    if args.samples_out:
        def write_samples(fh):
            fh.write("bin,mean_value\n")
            for c, m in zip(samples.centers, samples.means):
                fh.write(f"{c!r},{m!r}\n")
        _atomic_write(args.samples_out, write_samples)
    _echo_config(args.out, args)
    return 0


def cmd_bench(args):
    design = bench_mod.ExperimentDesign(
        shape=args.shape,
        p=args.p,
        index=args.index,
        optimizer=args.optimizer,
        d=args.d,
        n=args.n,
        n_jelly=args.jellies,
        max_iter=args.iters,
        max_tries=args.max_tries,
        alpha=args.alpha,
        beta=args.beta,
        gamma=args.gamma,
        n_reps=args.reps,
        success_tol=args.tol,
        master_seed=args.seed,
    )
    threads = args.threads or os.cpu_count() or 1
    tmp_records = args.out + ".records~"
    summary = bench_mod.run_experiment(design, threads=threads, jsonl_path=tmp_records)
    os.replace(tmp_records, args.out)
    summary_dict = summary.to_dict()
    _write_json(args.out + ".summary.json", summary_dict)
    _echo_config(args.out, args)
    print(
        f"success_rate={summary.success_rate:.4f} "
        f"ci=({summary.ci_low:.4f}, {summary.ci_high:.4f})"
    )
    return 0


def cmd_glm(args):
    ds = _load_dataset(args.table)
    header = ds.provenance["header"]
    try:
        s_col = header.index("successes")
        t_col = header.index("trials")
    except ValueError:
        raise ValueError("GLM table needs 'successes' and 'trials' columns") from None
    pred_cols = [j for j in range(len(header)) if j not in (s_col, t_col)]
    fit = fit_quasibinomial_glm(
        ds.values[:, s_col],
        ds.values[:, t_col],
        ds.values[:, pred_cols],
        terms=["intercept"] + [header[j] for j in pred_cols],
    )
    _write_json(args.out, fit.to_dict())
    _echo_config(args.out, args)
    return 0


def cmd_huber(args):
    ds = _load_dataset(args.data)
    index = registry_lookup(args.index)
    angles, values, mean_value, argmax_angle = bench_mod.huber_curve(
        ds, index, n_angles=args.n_angles
    )

    def write_curve(fh):
        fh.write("angle,value\n")
        for a, v in zip(angles, values):
            fh.write(f"{a!r},{v!r}\n")

    _atomic_write(args.out, write_curve)
    _write_json(
        args.out + ".summary.json",
        {"mean_value": mean_value, "argmax_angle": argmax_angle,
         "index": args.index, "n_angles": args.n_angles},
    )
    _echo_config(args.out, args)
    return 0


# ---------------------------------------------------------------------------
# parser construction


def _add_common(sp):
    sp.add_argument("--seed", type=int, default=None,
                    help=f"RNG seed (default: ${SEED_ENV_VAR} or 0)")
    sp.add_argument("-o", "--out", required=True, help="output file path")
    sp.add_argument("--config", default=None,
                    help="INI-style key=value file; flags override it")


def build_parser():
    parser = _Parser(prog="pursuit-lab",
                     description="Projection pursuit optimization toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", parents=[], help="generate synthetic data")
    p.add_argument("--shape", required=True,
                   choices=["pipe", "sine", "trimodal", "randu"])
    p.add_argument("--n", type=int, default=500, help="number of rows")
    p.add_argument("--p", type=int, default=6, help="number of columns")
    p.add_argument("--sphere", action="store_true", help="apply ZCA whitening")
    _add_common(p)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("optimize", help="run an optimizer on a dataset")
    p.add_argument("--data", required=True, help="input CSV")
    p.add_argument("--index", required=True, help="index function name")
    p.add_argument("--optimizer", choices=["jso", "crs"], default="jso")
    p.add_argument("--d", type=int, default=2, help="projection dimension")
    p.add_argument("--jellies", type=int, default=50)
    p.add_argument("--iters", type=int, default=50)
    p.add_argument("--max-tries", type=int, default=1000)
    p.add_argument("--alpha", type=float, default=0.5)
    p.add_argument("--beta", type=float, default=3.0)
    p.add_argument("--gamma", type=float, default=0.1)
    _add_common(p)
    p.set_defaults(func=cmd_optimize)

    p = sub.add_parser("smoothness", help="Matérn smoothness metric of an index")
    p.add_argument("--data", required=True)
    p.add_argument("--index", required=True)
    p.add_argument("--d", type=int, default=2)
    p.add_argument("--n-bases", type=int, default=500)
    _add_common(p)
    p.set_defaults(func=cmd_smoothness)

    p = sub.add_parser("squint", help="squintability metric of an index")
    p.add_argument("--data", required=True)
    p.add_argument("--index", required=True)
    p.add_argument("--d", type=int, default=2)
    p.add_argument("--optimal", default=None,
                   help="CSV of the optimal basis; default: best of a JSO run")
    p.add_argument("--method", choices=["nls", "ks"], default="nls")
    p.add_argument("--n-bases", type=int, default=50,
                   help="number of start bases")
    p.add_argument("--step", type=float, default=0.005)
    p.add_argument("--bin-width", type=float, default=0.005)
    p.add_argument("--min-proj-dist", type=float, default=0.5)
    p.add_argument("--samples-out", default=None,
                   help="optional CSV of (bin, mean_value)")
    _add_common(p)
    p.set_defaults(func=cmd_squint)

    p = sub.add_parser("bench", help="repeated optimizations + success rate")
    p.add_argument("--shape", choices=["pipe", "sine"], required=True)
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--n", type=int, default=500)
    p.add_argument("--index", required=True)
    p.add_argument("--optimizer", choices=["jso", "crs"], default="jso")
    p.add_argument("--d", type=int, default=2)
    p.add_argument("--jellies", type=int, default=50)
    p.add_argument("--iters", type=int, default=50)
    p.add_argument("--max-tries", type=int, default=1000)
    p.add_argument("--alpha", type=float, default=0.5)
    p.add_argument("--beta", type=float, default=3.0)
    p.add_argument("--gamma", type=float, default=0.1)
    p.add_argument("--reps", type=int, default=50)
    p.add_argument("--tol", type=float, default=0.05)
    p.add_argument("--threads", type=int, default=None,
                   help="rep-level concurrency (default: machine parallelism)")
    _add_common(p)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("glm", help="quasibinomial logit on a success table")
    p.add_argument("--table", required=True,
                   help="CSV with successes, trials, and predictor columns")
    _add_common(p)
    p.set_defaults(func=cmd_glm)

    p = sub.add_parser("huber", help="1-D index over all angles of 2-D data")
    p.add_argument("--data", required=True, help="CSV with exactly 2 columns")
    p.add_argument("--index", required=True)
    p.add_argument("--n-angles", type=int, default=360)
    _add_common(p)
    p.set_defaults(func=cmd_huber)

    return parser


def _apply_config_file(parser, args, argv):
    """Overlay config-file values under explicit command-line flags."""
    if getattr(args, "config", None) is None:
        return args
    cp = configparser.ConfigParser()
    with open(args.config) as fh:
        text = fh.read()
    if not text.lstrip().startswith("["):
        text = "[config]\n" + text
    cp.read_string(text)
    items = {}
    for section in cp.sections():
        items.update(cp[section])

    explicit = set()
    for tok in argv:
        if tok.startswith("--"):
            explicit.add(tok.lstrip("-").split("=")[0].replace("-", "_"))
        elif tok in ("-o",):
            explicit.add("out")
    for key, raw in items.items():
        attr = key.replace("-", "_")
        if not hasattr(args, attr) or attr in explicit:
            continue
        current = getattr(args, attr)
        if isinstance(current, bool):
            value = raw.lower() in ("1", "true", "yes")
        elif isinstance(current, int):
            value = int(raw)
        elif isinstance(current, float):
            value = float(raw)
        else:
            value = raw
        setattr(args, attr, value)
    return args


def run(argv):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        args = _apply_config_file(parser, args, argv)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    if hasattr(args, "seed"):
        _resolve_seed(args)
    try:
        return args.func(args)
    except (
        ValueError,
        KeyError,
        OSError,
        RuntimeError,
        CsvParseError,
        DegenerateInputError,
        FitConvergenceError,
    ) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def main():
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
