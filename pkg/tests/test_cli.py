import csv
import math

import numpy as np
import pytest

from rfda_sketch import ConfigError, SketchPolicy, iterate_rfda
from rfda_sketch.cli import (RESULT_COLUMNS, SUMMARY_COLUMNS, SWEEP_COLUMNS, config_from_args, main,
                             parse_config_text, prepare, resolve_config)

SMALL = ["--set", "data.n=40", "--set", "data.d=200", "--set", "data.c=3", "--set", "data.rank=10"]


def read(path):
    with open(path, newline="") as fh:
        return list(csv.reader(fh))


def run(tmp_path, *args, name="out"):
    out = tmp_path / name
    code = main([*SMALL, "--output", str(out), *args])
    return code, out


def test_parse_config_text():
    values = parse_config_text("# header\nlambda = 0.5  # inline\n\nsketch.method=srht\n")
    assert values == {"lambda": "0.5", "sketch.method": "srht"}
    with pytest.raises(ConfigError) as err:
        parse_config_text("bogus.key=1")
    assert err.value.key == "bogus.key" and "bogus.key" in str(err.value)
    with pytest.raises(ConfigError):
        parse_config_text("no equals sign")


@pytest.mark.parametrize("key,value", [("lambda", "-1"), ("lambda", "abc"), ("iterations", "0"),
                                       ("sketch.method", "gaussian"), ("resample_per_iter", "maybe"),
                                       ("split.train_frac", "1.5"), ("sketch.size", "0"),
                                       ("data.source", "ftp"), ("sketch.size_auto", "magic")])
def test_bad_values_name_their_key(key, value):
    with pytest.raises(ConfigError) as err:
        resolve_config({key: value})
    assert err.value.key == key


def test_flags_override_file(tmp_path):
    cfg_file = tmp_path / "exp.cfg"
    cfg_file.write_text("lambda=2\ntrials=7\nsketch.method=countsketch\n")
    cfg = config_from_args([str(cfg_file), "--lambda", "0.25", "--resample-per-iter"])
    assert cfg.lam == 0.25 and cfg.trials == 7 and cfg.resample
    assert cfg.methods == ("count_sketch",)


def test_config_error_exit_code(tmp_path, capsys):
    code, _ = run(tmp_path, "--lambda", "zero")
    assert code == 1 and "lambda" in capsys.readouterr().err
    assert main(["--set", "data.source=csv", "--set", "data.path=/nonexistent.csv",
                 "--output", str(tmp_path / "x")]) == 1
    assert main(["--no-such-flag"]) == 1


def test_runtime_error_exit_code(tmp_path, capsys):
    code, _ = run(tmp_path, "--sketch", "srht", "--sketch-size", "5000", "--trials", "1")
    assert code == 2 and "SketchTooLarge" in capsys.readouterr().err


def test_identity_recovers_exactly(tmp_path):
    code, out = run(tmp_path, "--sketch", "identity", "--trials", "1", "--iterations", "1")
    assert code == 0
    rows = read(out / "results.csv")
    assert rows[0] == RESULT_COLUMNS
    assert all(float(r[4]) <= 1e-12 for r in rows[1:])


def test_schema_and_determinism(tmp_path):
    args = ["--sketch", "ridge,uniform,countsketch,srht", "--sketch-size", "64,128", "--trials", "3",
            "--iterations", "4"]
    _, first = run(tmp_path, *args, name="a")
    _, second = run(tmp_path, *args, "--workers", "3", name="b")
    for name in ("results.csv", "summary.csv", "dlambda_sweep.csv", "plot_results.py"):
        assert (first / name).read_bytes() == (second / name).read_bytes()
    results = read(first / "results.csv")
    assert results[0] == RESULT_COLUMNS and len(results) == 1 + 4 * 2 * 3 * 4
    assert all(len(r) == len(RESULT_COLUMNS) and r[8] == "" for r in results[1:])
    assert read(first / "summary.csv")[0] == SUMMARY_COLUMNS
    sweep = read(first / "dlambda_sweep.csv")
    assert sweep[0] == SWEEP_COLUMNS and len(sweep) == 1 + 4 * 2 * 3 * 6


def test_timing_column(tmp_path):
    _, out = run(tmp_path, "--trials", "1", "--iterations", "2", "--set", "output.timing=true",
                 "--set", "sweep.lambda=none")
    rows = read(out / "results.csv")[1:]
    assert all(float(r[8]) > 0 for r in rows)
    assert not (out / "dlambda_sweep.csv").exists()


def test_bound_rhs_dominates_distortion(tmp_path):
    args = [*SMALL, "--sketch", "ridge,uniform", "--sketch-size", "150", "--trials", "3", "--iterations", "5",
            "--resample-per-iter", "true"]
    assert main([*args, "--output", str(tmp_path / "o")]) == 0
    cfg = config_from_args(args)
    ctx = prepare(cfg)
    ref = ctx.refs[cfg.lam].g
    checked = 0
    for method, s, seed, it, _rel, rhs, struct, *_ in read(tmp_path / "o" / "results.csv")[1:]:
        if not rhs:
            continue
        est = iterate_rfda(ctx.train, cfg.lam, SketchPolicy(method, int(s), True, int(seed)), int(it),
                           svd=ctx.svd)
        lhs = np.linalg.norm(est.g - ref, 2)
        assert lhs <= float(rhs) * (1 + 1e-9) + 1e-12 * np.linalg.norm(ref, 2)
        checked += 1
    assert checked > 0


def test_lemma_sized_run_decreases(tmp_path):
    code, out = run(tmp_path, "--trials", "20", "--set", "sketch.size_auto=lemma", "--set", "sweep.lambda=none")
    assert code == 0
    summary = read(out / "summary.csv")[1:]
    means = [float(r[4]) for r in summary]
    assert len(means) == 10 and all(b < a for a, b in zip(means, means[1:]))


def test_csv_source(tmp_path):
    rng = np.random.default_rng(0)
    path = tmp_path / "data.csv"
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow([f"f{i}" for i in range(30)] + ["label"])
        for i in range(24):
            w.writerow(list(rng.standard_normal(30) + 3 * (i % 2)) + ["ab"[i % 2]])
    code = main(["--set", "data.source=csv", "--set", f"data.path={path}", "--sketch", "uniform",
                 "--sketch-size", "20", "--trials", "2", "--iterations", "3", "--output", str(tmp_path / "c")])
    assert code == 0
    rows = read(tmp_path / "c" / "results.csv")[1:]
    assert len(rows) == 6 and all(math.isfinite(float(r[4])) for r in rows)
