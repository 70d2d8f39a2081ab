"""Experiment runner: sketched RFDA error and accuracy curves written as CSV.

Usage::

    rfda-sketch experiment.cfg --trials 5 --output out/

The config is a flat ``key=value`` file with ``#`` comments. Flags override
file values; ``--set key=value`` overrides any key.
"""
import argparse
import csv
import math
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np

from .data import geometric_spectrum, load_csv, stratified_split, synthesize_dataset
from .errors import ConfigError, RfdaError
from .iterative import SketchPolicy, iterate_rfda
from .linalg import thin_svd
from .solvers import exact_g
from .spectrum import ridge_spectrum
from .verify import classify_nearest_centroid, lemma_sample_size

RESULT_COLUMNS = ["method", "s", "seed", "iteration", "rel_err", "bound_rhs", "struct_value",
                  "accuracy", "wall_ms"]
SUMMARY_COLUMNS = ["method", "s", "iteration", "trials", "rel_err_mean", "rel_err_se",
                   "accuracy_mean", "accuracy_se", "struct_value_mean"]
SWEEP_COLUMNS = ["method", "s", "seed", "lambda", "d_lambda", "rel_err_at_t"]

METHOD_ALIASES = {
    "uniform": "uniform",
    "leverage": "leverage",
    "ridge": "ridge_leverage",
    "ridge_leverage": "ridge_leverage",
    "countsketch": "count_sketch",
    "count_sketch": "count_sketch",
    "srht": "srht",
    "identity": "identity",
}

DEFAULTS = {
    "data.source": "synthetic",
    "data.path": "",
    "data.label_column": "label",
    "data.n": "100",
    "data.d": "1000",
    "data.c": "4",
    "data.rank": "20",
    "data.spectrum_top": "10",
    "data.spectrum_decay": "0.8",
    "data.class_sep": "1.0",
    "data.coherence": "0.0",
    "lambda": "1.0",
    "sketch.method": "ridge",
    "sketch.size": "500",
    "sketch.size_auto": "none",
    "sketch.epsilon": "0.5",
    "sketch.delta": "0.1",
    "iterations": "10",
    "resample_per_iter": "false",
    "trials": "20",
    "seed": "0",
    "split.train_frac": "0.8",
    "output.dir": "results",
    "output.timing": "false",
    "sweep.lambda": "auto",
    "workers": "1",
}

FLAG_KEYS = {
    "lambda": "lambda",
    "sketch": "sketch.method",
    "sketch_size": "sketch.size",
    "iterations": "iterations",
    "resample_per_iter": "resample_per_iter",
    "trials": "trials",
    "seed": "seed",
    "output": "output.dir",
    "workers": "workers",
}

PLOT_STUB = '''\
# Plotting stub written by rfda-sketch; rendering is left to the reader's environment.
import csv
from collections import defaultdict

import matplotlib.pyplot as plt

curves = defaultdict(list)
with open("summary.csv", newline="") as fh:
    for row in csv.DictReader(fh):
        curves[(row["method"], row["s"])].append((int(row["iteration"]), float(row["rel_err_mean"])))

fig, ax = plt.subplots()
for (method, s), points in sorted(curves.items()):
    its, errs = zip(*points)
    ax.semilogy(its, errs, marker="o", label=f"{method}, s={s}")
ax.set_xlabel("iteration")
ax.set_ylabel("relative error")
ax.legend()

sweep = defaultdict(list)
try:
    with open("dlambda_sweep.csv", newline="") as fh:
        for row in csv.DictReader(fh):
            sweep[(row["method"], row["s"])].append((float(row["d_lambda"]), float(row["rel_err_at_t"])))
except FileNotFoundError:
    pass
if sweep:
    fig2, ax2 = plt.subplots()
    for (method, s), points in sorted(sweep.items()):
        points.sort()
        ax2.semilogy([p[0] for p in points], [p[1] for p in points], ".", label=f"{method}, s={s}")
    ax2.set_xlabel("d_lambda")
    ax2.set_ylabel("relative error at final iteration")
    ax2.legend()
plt.show()
'''


def parse_config_text(text):
    """Flat ``key=value`` pairs; blank lines and ``#`` comments are ignored."""
    values = {}
    for line_no, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {line_no}: expected key=value, got {line!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in DEFAULTS:
            raise ConfigError(f"line {line_no}: unknown key", key=key)
        values[key] = value
    return values


def _parse(raw, key, kind, check=None, what=""):
    text = raw[key]
    try:
        value = kind(text)
    except ValueError:
        raise ConfigError(f"cannot parse {text!r}", key=key) from None
    if check is not None and not check(value):
        raise ConfigError(f"{text!r} is out of range; expected {what}", key=key)
    return value


def _bool(text):
    low = text.strip().lower()
    if low in ("true", "yes", "1", "on"):
        return True
    if low in ("false", "no", "0", "off"):
        return False
    raise ValueError(text)


def _list(kind):
    return lambda text: [kind(part) for part in text.split(",") if part.strip()]


@dataclass(frozen=True)
class RunConfig:
    source: str
    path: str
    label_column: str
    n: int
    d: int
    c: int
    rank: int
    spectrum_top: float
    spectrum_decay: float
    class_sep: float
    coherence: float
    lam: float
    methods: Tuple[str, ...]
    sizes: Tuple[int, ...]
    size_auto: str
    epsilon: float
    delta: float
    iterations: int
    resample: bool
    trials: int
    seed: int
    train_frac: float
    output_dir: str
    timing: bool
    sweep: Optional[Tuple[float, ...]]
    workers: int


def resolve_config(values):
    """Validate a key -> text mapping (defaults filled in) into a RunConfig."""
    for key in values:
        if key not in DEFAULTS:
            raise ConfigError("unknown key", key=key)
    raw = dict(DEFAULTS, **values)
    pos = lambda x: x > 0
    at_least_one = lambda x: x >= 1

    source = raw["data.source"]
    if source not in ("synthetic", "csv"):
        raise ConfigError(f"{source!r}; expected synthetic or csv", key="data.source")
    if source == "csv" and not raw["data.path"]:
        raise ConfigError("data.source=csv needs a file path", key="data.path")

    methods = []
    for name in raw["sketch.method"].split(","):
        name = name.strip().lower()
        if name not in METHOD_ALIASES:
            raise ConfigError(f"unknown sketch method {name!r}; expected one of {sorted(METHOD_ALIASES)}",
                              key="sketch.method")
        methods.append(METHOD_ALIASES[name])
    if not methods:
        raise ConfigError("no sketch method given", key="sketch.method")

    size_auto = raw["sketch.size_auto"].strip().lower()
    if size_auto not in ("none", "lemma"):
        raise ConfigError(f"{size_auto!r}; expected none or lemma", key="sketch.size_auto")
    sizes = _parse(raw, "sketch.size", _list(int), lambda xs: xs and all(x >= 1 for x in xs),
                   "positive integers")

    sweep_text = raw["sweep.lambda"].strip().lower()
    if sweep_text == "none":
        sweep = None
    elif sweep_text == "auto":
        sweep = ()
    else:
        sweep = tuple(_parse(raw, "sweep.lambda", _list(float), lambda xs: xs and all(x > 0 for x in xs),
                             "auto, none or positive numbers"))

    return RunConfig(
        source=source,
        path=raw["data.path"],
        label_column=raw["data.label_column"],
        n=_parse(raw, "data.n", int, lambda x: x >= 2, "an integer >= 2"),
        d=_parse(raw, "data.d", int, at_least_one, "a positive integer"),
        c=_parse(raw, "data.c", int, lambda x: x >= 2, "an integer >= 2"),
        rank=_parse(raw, "data.rank", int, at_least_one, "a positive integer"),
        spectrum_top=_parse(raw, "data.spectrum_top", float, pos, "a positive number"),
        spectrum_decay=_parse(raw, "data.spectrum_decay", float, lambda x: 0 < x <= 1, "a number in (0, 1]"),
        class_sep=_parse(raw, "data.class_sep", float, lambda x: x >= 0, "a non-negative number"),
        coherence=_parse(raw, "data.coherence", float, lambda x: x >= 0, "a non-negative number"),
        lam=_parse(raw, "lambda", float, lambda x: x > 0 and math.isfinite(x), "a positive number"),
        methods=tuple(methods),
        sizes=tuple(sizes),
        size_auto=size_auto,
        epsilon=_parse(raw, "sketch.epsilon", float, lambda x: 0 < x <= 1, "a number in (0, 1]"),
        delta=_parse(raw, "sketch.delta", float, lambda x: 0 < x < 1, "a number in (0, 1)"),
        iterations=_parse(raw, "iterations", int, at_least_one, "a positive integer"),
        resample=_parse(raw, "resample_per_iter", _bool),
        trials=_parse(raw, "trials", int, at_least_one, "a positive integer"),
        seed=_parse(raw, "seed", int, lambda x: x >= 0, "a non-negative integer"),
        train_frac=_parse(raw, "split.train_frac", float, lambda x: 0 < x < 1, "a number in (0, 1)"),
        output_dir=raw["output.dir"],
        timing=_parse(raw, "output.timing", _bool),
        sweep=sweep,
        workers=_parse(raw, "workers", int, at_least_one, "a positive integer"),
    )


@dataclass
class _Context:
    cfg: RunConfig
    train: object
    test: object
    svd: object
    sizes: Tuple[int, ...]
    refs: dict


def _load_data(cfg):
    if cfg.source == "csv":
        if not os.path.exists(cfg.path):
            raise ConfigError(f"file {cfg.path!r} does not exist", key="data.path")
        return load_csv(cfg.path, cfg.label_column)
    spectrum = geometric_spectrum(cfg.rank, cfg.spectrum_top, cfg.spectrum_decay)
    return synthesize_dataset(cfg.n, cfg.d, cfg.c, spectrum, cfg.class_sep, cfg.seed, cfg.coherence)


def sweep_grid(cfg):
    if cfg.sweep is None:
        return ()
    if cfg.sweep:
        return cfg.sweep
    return tuple(cfg.lam * 10.0 ** np.arange(-2, 4))


def prepare(cfg):
    raw, labels = _load_data(cfg)
    train, test = stratified_split(raw, labels, cfg.train_frac, cfg.seed)
    svd = thin_svd(train.a)
    if cfg.size_auto == "lemma":
        sizes = (lemma_sample_size(ridge_spectrum(svd, cfg.lam).d_lambda, cfg.epsilon, cfg.delta),)
    else:
        sizes = cfg.sizes
    refs = {lam: exact_g(train, lam, svd) for lam in (cfg.lam,) + tuple(sweep_grid(cfg))}
    return _Context(cfg, train, test, svd, sizes, refs)


def _fmt(x):
    if x is None:
        return ""
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return repr(float(x))


def _effective_size(method, s, ctx):
    return ctx.train.d if method == "identity" else s


def run_trial(ctx, method, s, seed):
    """Result rows for one (method, s, seed): one per iteration."""
    cfg = ctx.cfg
    policy = SketchPolicy(method, s, cfg.resample, seed)
    start = time.perf_counter()
    est = iterate_rfda(ctx.train, cfg.lam, policy, cfg.iterations, ctx.refs[cfg.lam], svd=ctx.svd,
                       diagnostics=True, keep_iterates=True)
    wall_ms = (time.perf_counter() - start) * 1e3 if cfg.timing else None
    rows = []
    eps_product, valid = 1.0, True
    for rec, g_j in zip(est.trace.records, est.trace.iterates):
        # spectral-norm form of the ridge bound: ||G_j - G||_2 <= prod(eps_i) / sqrt(lam)
        valid = valid and rec.epsilon < 1
        eps_product *= rec.epsilon
        bound = eps_product / math.sqrt(cfg.lam) if valid else None
        accuracy = classify_nearest_centroid(ctx.train.a @ g_j, ctx.train.labels, ctx.test.a @ g_j,
                                             ctx.test.labels)
        rows.append([method, s, seed, rec.j, rec.rel_err, bound, rec.struct_value, accuracy, wall_ms])
    return rows


def run_sweep_trial(ctx, method, s, seed):
    cfg = ctx.cfg
    rows = []
    for lam in sweep_grid(cfg):
        policy = SketchPolicy(method, s, cfg.resample, seed)
        est = iterate_rfda(ctx.train, lam, policy, cfg.iterations, ctx.refs[lam], svd=ctx.svd)
        rows.append([method, s, seed, lam, ridge_spectrum(ctx.svd, lam).d_lambda,
                     est.trace.records[-1].rel_err])
    return rows


def summarize(rows):
    groups = {}
    for method, s, _seed, it, rel, _bound, struct, acc, _wall in rows:
        groups.setdefault((method, s, it), []).append((rel, acc, struct))
    out = []
    for (method, s, it), vals in groups.items():
        arr = np.array(vals, dtype=float)
        count = arr.shape[0]
        mean = arr.mean(axis=0)
        se = arr.std(axis=0, ddof=1) / math.sqrt(count) if count > 1 else np.zeros(3)
        out.append([method, s, it, count, mean[0], se[0], mean[1], se[1], mean[2]])
    return out


def _write_csv(path, header, rows):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(x) if not isinstance(x, str) else x for x in row])


def _map(fn, tasks, workers):
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            return list(pool.map(lambda task: fn(*task), tasks))
    return [fn(*task) for task in tasks]


def run_experiment(cfg):
    """Run every (method, size, seed) combination and write the result files.

    Returns the output paths. Rows are emitted in task order whatever the
    completion order of the worker pool.
    """
    ctx = prepare(cfg)
    # identity sketches ignore the size; keep one copy of each task
    keys = dict.fromkeys((m, _effective_size(m, s, ctx), cfg.seed + i)
                         for m in cfg.methods for s in ctx.sizes for i in range(cfg.trials))
    tasks = [(ctx,) + key for key in keys]
    rows = [row for chunk in _map(run_trial, tasks, cfg.workers) for row in chunk]

    os.makedirs(cfg.output_dir, exist_ok=True)
    paths = {
        "results": os.path.join(cfg.output_dir, "results.csv"),
        "summary": os.path.join(cfg.output_dir, "summary.csv"),
        "plot": os.path.join(cfg.output_dir, "plot_results.py"),
    }
    _write_csv(paths["results"], RESULT_COLUMNS, rows)
    _write_csv(paths["summary"], SUMMARY_COLUMNS, summarize(rows))
    if sweep_grid(cfg):
        sweep_rows = [row for chunk in _map(run_sweep_trial, tasks, cfg.workers) for row in chunk]
        paths["sweep"] = os.path.join(cfg.output_dir, "dlambda_sweep.csv")
        _write_csv(paths["sweep"], SWEEP_COLUMNS, sweep_rows)
    with open(paths["plot"], "w", encoding="utf-8") as fh:
        fh.write(PLOT_STUB)
    return paths


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(message)


def build_parser():
    p = _Parser(prog="rfda-sketch", description="Iterative sketched RFDA experiments.")
    p.add_argument("config", nargs="?", help="flat key=value config file")
    p.add_argument("--lambda", dest="lambda", help="regularization parameter")
    p.add_argument("--sketch", help="comma list of uniform, leverage, ridge, countsketch, srht, identity")
    p.add_argument("--sketch-size", dest="sketch_size", help="comma list of sketch sizes")
    p.add_argument("--iterations", help="iterations per solve")
    p.add_argument("--resample-per-iter", dest="resample_per_iter", nargs="?", const="true",
                   help="draw a fresh sketch every iteration (true/false)")
    p.add_argument("--trials", help="seeds per (method, size)")
    p.add_argument("--seed", help="base seed")
    p.add_argument("--output", help="output directory")
    p.add_argument("--workers", help="worker threads")
    p.add_argument("--set", action="append", default=[], metavar="KEY=VALUE", help="override any config key")
    return p


def config_from_args(argv):
    args = build_parser().parse_args(argv)
    values = {}
    if args.config:
        try:
            with open(args.config, encoding="utf-8") as fh:
                values.update(parse_config_text(fh.read()))
        except OSError as exc:
            raise ConfigError(f"cannot read config file: {exc}") from None
    for item in args.set:
        values.update(parse_config_text(item))
    for attr, key in FLAG_KEYS.items():
        value = getattr(args, attr)
        if value is not None:
            values[key] = value
    return resolve_config(values)


def main(argv: Optional[List[str]] = None):
    try:
        cfg = config_from_args(sys.argv[1:] if argv is None else argv)
    except ConfigError as exc:
        print(f"rfda-sketch: config error: {exc}", file=sys.stderr)
        return 1
    try:
        paths = run_experiment(cfg)
    except ConfigError as exc:
        print(f"rfda-sketch: config error: {exc}", file=sys.stderr)
        return 1
    except (RfdaError, ValueError, ArithmeticError, KeyError, OSError) as exc:
        print(f"rfda-sketch: error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    for name in sorted(paths):
        print(f"{name}: {paths[name]}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
