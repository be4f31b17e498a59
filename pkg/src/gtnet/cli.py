"""``gtnet`` command line: synth, facebook, mask, complete, train, bench, gradcheck.

Exit codes: 0 success, 1 bad input, 2 numerical or runtime failure.
Every flag can also come from a TOML file given with ``--config``; top-level
keys apply to all subcommands, a ``[<subcommand>]`` table to that one only.
Flags on the command line win.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import os
import sys
import time
from pathlib import Path
from typing import Sequence


try:
    import tomllib
except ImportError:  # Python < 3.11
    import tomli as tomllib

from . import data as dio
from . import gradcheck as gc
from . import graph as gr
from . import net
from . import solvers
from . import tensor as gt
from .errors import GTNetError, NumericalError, ValidationError

log = logging.getLogger("gtnet")

EXIT_OK, EXIT_INVALID, EXIT_NUMERIC = 0, 1, 2
ALGOS = ("imputation", "tnn-admm", "net")
BENCH_HEADER = ["algo", "missing_rate", "trial", "mse", "wall_time_s", "iterations"]
TRAIN_HEADER = ["epoch", "mean_loss", "test_mse"]


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on bad flags; that code means numerical failure here
    def error(self, message):
        raise ValidationError(f"{self.prog}: {message}")


# -- flag value parsers -----------------------------------------------------------


def _float_list(text) -> list[float]:
    if isinstance(text, (list, tuple)):
        return [float(v) for v in text]
    try:
        return [float(v) for v in str(text).split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma list of numbers: {text!r}") from None


def _str_list(text) -> list[str]:
    if isinstance(text, (list, tuple)):
        return [str(v) for v in text]
    return [v.strip() for v in str(text).split(",") if v.strip()]


def _int_list(text) -> list[int]:
    try:
        return [int(v) for v in _str_list(text)]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma list of integers: {text!r}") from None


def _range_pair(text) -> tuple[float, float] | None:
    if text in (None, ""):
        return None
    vals = _float_list(text)
    if len(vals) != 2:
        raise argparse.ArgumentTypeError("expected lo,hi")
    return vals[0], vals[1]


# -- validation helpers -------------------------------------------------------------


def _require(cond: bool, msg: str) -> None:
    if not cond:
        raise ValidationError(msg)


def _writable_file(path) -> Path:
    p = Path(path)
    parent = p.parent if str(p.parent) else Path(".")
    _require(not p.is_dir(), f"{p} is a directory")
    _require(parent.is_dir(), f"directory {parent} does not exist")
    _require(os.access(parent, os.W_OK), f"directory {parent} is not writable")
    return p


def _writable_dir(path) -> Path:
    p = Path(path)
    _require(not p.exists() or p.is_dir(), f"{p} exists and is not a directory")
    probe = p
    while not probe.exists():
        probe = probe.parent
    _require(os.access(probe, os.W_OK), f"{probe} is not writable")
    return p


def _readable(path, what: str) -> Path:
    p = Path(path)
    _require(p.exists(), f"{what} {p} does not exist")
    return p


def _rate(r: float) -> float:
    _require(0.0 <= r < 1.0, f"missing rate {r} outside [0, 1)")
    return r


def _write_csv(path: Path, header: Sequence[str], rows: Sequence[Sequence]) -> None:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    path.write_text(buf.getvalue(), encoding="utf-8")


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    return str(v)


# -- subcommands ------------------------------------------------------------------------


def cmd_synth(a) -> int:
    _require(a.rows >= 1 and a.cols >= 1 and a.nodes >= 1, "--rows/--cols/--nodes must be >= 1")
    _require(a.count >= 0, "--count must be >= 0")
    _require(a.transform in gr.KINDS, f"--transform must be one of {gr.KINDS}")
    out = _writable_dir(a.out)
    test_count = a.test_count if a.test_count is not None else min(20, a.count)
    ds = dio.build_synthetic_dataset(a.graph, a.rows, a.cols, a.nodes, a.rank, a.count, a.seed,
                                     test_count=test_count, kind=a.transform)
    if a.rank == 0:
        log.warning("rank 0: every tensor is zero")
    dio.save_dataset(ds, out)
    print(f"wrote {len(ds)} tensors {a.rows}x{a.cols}x{a.nodes} to {out} "
          f"(train {len(ds.train)}, test {len(ds.test)}, seed {a.seed}, graph {a.graph}, "
          f"{ds.graph.num_edges} edges)")
    return EXIT_OK


def cmd_facebook(a) -> int:
    _readable(a.edges, "edge file")
    _require(bool(a.features), "--features needs at least one file")
    for f in a.features:
        _readable(f, "feature file")
    out = _writable_dir(a.out)
    cfg = dio.FacebookConfig(
        first_id=a.first_id, last_id=a.last_id, n1=a.rows, n2=a.cols,
        train_count=a.train_count, test_count=a.test_count, seed=a.seed,
        weight_range=a.weights,
    )
    ds = dio.build_facebook_dataset(a.edges, a.features, cfg)
    dio.save_dataset(ds, out)
    n1, n2, n3 = ds.dims
    print(f"wrote {len(ds)} tensors {n1}x{n2}x{n3} to {out} "
          f"({ds.provenance['eligible_nodes']} eligible feature vectors)")
    return EXIT_OK


def cmd_mask(a) -> int:
    _rate(a.missing_rate)
    out = _writable_file(a.out)
    if a.observed_out:
        _require(a.tensor is not None, "--observed-out needs --tensor")
    obs_out = _writable_file(a.observed_out) if a.observed_out else None
    x = gt.load_gtt(_readable(a.tensor, "tensor")) if a.tensor else None
    n3 = a.nodes if a.nodes is not None else (x.shape[0] if x is not None else None)
    _require(n3 is not None, "give --nodes or --tensor")
    if x is not None:
        _require(x.shape[0] == n3, f"tensor has n3={x.shape[0]}, --nodes is {n3}")
    m = dio.sample_mask(n3, a.missing_rate, a.seed)
    with open(out, "w", encoding="utf-8") as f:
        m.write(f)
    if obs_out is not None:
        gt.save_gtt(solvers.observe(x, m), obs_out)
    print(f"{len(m.observed)} of {n3} nodes observed")
    return EXIT_OK


def _load_graph_arg(path, kind: str) -> gr.GraphTransform:
    p = _readable(path, "graph")
    if p.is_dir():
        _, t = dio.load_dataset_graph(p)
        return t
    return gr.spectral_transform(dio.load_graph(p), kind)


def cmd_complete(a) -> int:
    _require(a.algo in ALGOS, f"--algo must be one of {ALGOS}")
    x_obs = gt.load_gtt(_readable(a.tensor, "tensor"))
    with open(_readable(a.mask, "mask"), encoding="utf-8") as f:
        m = solvers.ObservationMask.read(f)
    _require(m.n3 == x_obs.shape[0], f"mask n3={m.n3} but tensor n3={x_obs.shape[0]}")
    truth = gt.load_gtt(_readable(a.truth, "truth")) if a.truth else None
    if truth is not None:
        _require(truth.shape == x_obs.shape, f"truth shape {truth.shape} != tensor {x_obs.shape}")
    t = params = None
    if a.algo == "imputation":
        _require(a.graph is not None, "--graph is required for imputation")
        t = _load_graph_arg(a.graph, a.transform)
        _require(t.n3 == m.n3, f"graph has {t.n3} nodes but tensor n3={m.n3}")
    elif a.algo == "net":
        _require(a.model is not None, "--model is required for algo net")
        params, cfg = net.load_model(_readable(a.model, "model"))
        _require((cfg.n3, cfg.n1, cfg.n2) == x_obs.shape,
                 f"model dims {(cfg.n1, cfg.n2, cfg.n3)} do not match tensor "
                 f"{x_obs.shape[1:] + x_obs.shape[:1]}")
    out = _writable_file(a.out)
    report_path = _writable_file(a.report) if a.report else None

    if a.algo == "imputation":
        icfg = solvers.ImputationConfig(max_iters=a.max_iters, tol=a.tol or 1e-8)
        x, rep = solvers.imputation_solve(x_obs, m, t, icfg, truth)
    elif a.algo == "tnn-admm":
        acfg = solvers.AdmmConfig(max_iters=a.max_iters, tol=a.tol or 1e-6)
        x, rep = solvers.tnn_admm_solve(x_obs, m, acfg, truth)
    else:
        g_obs = solvers.observe(x_obs, m)
        start = time.perf_counter()
        x = net.infer(g_obs, m, params)
        rep = solvers.SolveReport(wall_time=time.perf_counter() - start)
        if truth is not None:
            rep.final_mse = solvers.missing_mse(x, truth, m)
    gt.save_gtt(x, out)
    text = json.dumps(rep.to_dict(), indent=2)
    if report_path is not None:
        report_path.write_text(text + "\n", encoding="utf-8")
    else:
        print(text)
    return EXIT_OK


def cmd_train(a) -> int:
    data_dir = _readable(a.data, "dataset")
    _rate(a.missing_rate)
    _require(a.epochs >= 0, "--epochs must be >= 0")
    _require(a.lr > 0, "--lr must be > 0")
    _require(a.eval_every >= 1, "--eval-every must be >= 1")
    _require(a.batch_size >= 1, "--batch-size must be >= 1")
    out = _writable_file(a.out)
    log_path = _writable_file(a.log or str(out) + ".csv")
    fig_dir = _writable_dir(a.figures) if a.figures else None
    ds = dio.load_dataset(data_dir)
    _require(len(ds.train) > 0 or a.epochs == 0, "dataset has no training tensors")
    n1, n2, n3 = ds.dims
    cfg = net.NetConfig(n1, n2, n3, phases=a.phases, channels=a.channels, alpha=a.alpha,
                        beta=a.beta, seed=a.seed, share_weights=not a.per_phase_weights)
    tcfg = net.TrainConfig(epochs=a.epochs, lr=a.lr, missing_rate=a.missing_rate,
                           batch_size=a.batch_size, seed=a.seed, eval_every=a.eval_every)
    p0 = net.init_params(cfg, ds.transform)
    test = ds.tensors[ds.test]

    def report(e: net.EpochLog):
        print(f"epoch {e.epoch} loss {e.mean_loss:.6g} test_mse {_fmt(e.test_mse)} "
              f"({e.seconds:.1f}s)", flush=True)

    p, history = net.train(ds.tensors[ds.train], cfg, tcfg, params=p0, test_tensors=test,
                           on_epoch=report if a.verbose else None)
    net.save_model(p, cfg, out)
    rows = [[e.epoch, _fmt(float(e.mean_loss)), _fmt(e.test_mse)] for e in history]
    _write_csv(log_path, TRAIN_HEADER, rows)
    if fig_dir is not None and rows:
        from .plotting import training_figure

        training_figure([dict(zip(TRAIN_HEADER, r)) for r in rows], fig_dir)
    last = history[-1].test_mse if history else None
    print(f"wrote model {out} ({p.size()} parameters) and log {log_path}; "
          f"final test_mse {_fmt(last)}")
    return EXIT_OK


def bench_rows(ds: dio.Dataset, algos: Sequence[str], rates: Sequence[float], trials: int,
               seed: int, params: net.NetParams | None = None) -> tuple[list[list], int]:
    """One row per (algo, rate, trial). Trial ``i`` completes test tensor
    ``i mod |test|`` under a mask seeded by ``(seed, rate index, i)``, shared by
    every algorithm. Failures give ``mse = nan`` and are counted."""
    pool = ds.test or ds.train
    _require(len(pool) > 0, "dataset has no tensors")
    n3 = ds.dims[2]
    rows, failed = [], 0
    for ri, rate in enumerate(rates):
        for trial in range(trials):
            truth = ds.tensors[pool[trial % len(pool)]]
            m = dio.sample_mask(n3, rate, [seed, ri, trial])
            g_obs = solvers.observe(truth, m)
            for algo in algos:
                try:
                    if algo == "imputation":
                        x, rep = solvers.imputation_solve(g_obs, m, ds.transform, truth=truth)
                        mse, wall, iters = rep.final_mse, rep.wall_time, rep.iterations
                    elif algo == "tnn-admm":
                        x, rep = solvers.tnn_admm_solve(g_obs, m, truth=truth)
                        mse, wall, iters = rep.final_mse, rep.wall_time, rep.iterations
                    else:
                        start = time.perf_counter()
                        x = net.infer(g_obs, m, params)
                        wall = time.perf_counter() - start
                        mse, iters = solvers.missing_mse(x, truth, m), 0
                    if not math.isfinite(mse):
                        raise NumericalError("non-finite result")
                except GTNetError as exc:
                    log.error("%s rate %g trial %d failed: %s", algo, rate, trial, exc)
                    failed += 1
                    mse, wall, iters = float("nan"), float("nan"), 0
                rows.append([algo, rate, trial, mse, wall, iters])
    return rows, failed


def cmd_bench(a) -> int:
    data_dir = _readable(a.data, "dataset")
    algos = a.algos
    _require(bool(algos), "--algos is empty")
    for al in algos:
        _require(al in ALGOS, f"unknown algo {al!r}; choose from {ALGOS}")
    _require(bool(a.missing_rates), "--missing-rates is empty")
    for r in a.missing_rates:
        _rate(r)
    _require(a.trials >= 1, "--trials must be >= 1")
    params = None
    if "net" in algos:
        _require(a.model is not None, "algo net needs --model")
        _readable(a.model, "model")
    csv_path = _writable_file(a.csv) if a.csv else None
    fig_dir = _writable_dir(a.figures) if a.figures else None
    ds = dio.load_dataset(data_dir)
    if "net" in algos:
        params, cfg = net.load_model(a.model)
        n1, n2, n3 = ds.dims
        _require((cfg.n1, cfg.n2, cfg.n3) == (n1, n2, n3),
                 f"model dims {(cfg.n1, cfg.n2, cfg.n3)} != dataset dims {(n1, n2, n3)}")

    rows, failed = bench_rows(ds, algos, a.missing_rates, a.trials, a.seed, params)
    text_rows = [[al, _fmt(float(r)), t, _fmt(float(mse)), _fmt(float(w)), it]
                 for al, r, t, mse, w, it in rows]
    if csv_path is not None:
        _write_csv(csv_path, BENCH_HEADER, text_rows)
    else:
        w = csv.writer(sys.stdout, lineterminator="\n")
        w.writerow(BENCH_HEADER)
        w.writerows(text_rows)
    if fig_dir is not None:
        from .plotting import bench_figures

        for path in bench_figures([dict(zip(BENCH_HEADER, r)) for r in rows], fig_dir):
            log.info("wrote %s", path)
    if failed:
        log.error("%d of %d runs failed", failed, len(rows))
        return EXIT_NUMERIC
    return EXIT_OK


def cmd_gradcheck(a) -> int:
    _require(a.per_group >= 1, "--per-group must be >= 1")
    ok = True
    for seed in a.seed:
        x, m, p = gc.desk_instance(seed, zero_init=a.zero_init)
        rep = gc.check(x, m, p, per_group=a.per_group, seed=seed)
        print(f"seed {seed}: {'PASS' if rep.passed else 'FAIL'}")
        for line in rep.lines():
            print("  " + line)
        ok = ok and rep.passed
    return EXIT_OK if ok else EXIT_NUMERIC


# -- parser -------------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="gtnet", description="Graph-tensor completion tools.")
    ap.add_argument("--config", help="TOML file with flag values")
    ap.add_argument("-v", "--verbose", action="store_true")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-v", "--verbose", action="store_true", default=argparse.SUPPRESS)
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("synth", parents=[common], help="generate a synthetic spectral-low-rank dataset")
    s.add_argument("--rows", type=int, default=12)
    s.add_argument("--cols", type=int, default=12)
    s.add_argument("--nodes", type=int, default=20)
    s.add_argument("--rank", type=int, default=2)
    s.add_argument("--count", type=int, default=220)
    s.add_argument("--test-count", type=int, default=None, help="default min(20, count)")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--graph", default="er:0.2", help="er:<p> or file:<edge list>")
    s.add_argument("--transform", default="laplacian")
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_synth)

    s = sub.add_parser("facebook", parents=[common], help="build a dataset from ego-Facebook edges and features")
    s.add_argument("--edges", required=True)
    s.add_argument("--features", type=_str_list, required=True, help="comma list of .feat files")
    s.add_argument("--first-id", type=int, default=896)
    s.add_argument("--last-id", type=int, default=995)
    s.add_argument("--rows", type=int, default=24)
    s.add_argument("--cols", type=int, default=24)
    s.add_argument("--train-count", type=int, default=900)
    s.add_argument("--test-count", type=int, default=32)
    s.add_argument("--weights", type=_range_pair, default=None,
                   help="lo,hi integer edge weights (unweighted if omitted)")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_facebook)

    s = sub.add_parser("mask", parents=[common], help="sample an observation mask")
    s.add_argument("--nodes", type=int, default=None)
    s.add_argument("--missing-rate", type=float, required=True)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--tensor", default=None, help="complete tensor to zero-fill")
    s.add_argument("--observed-out", default=None)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_mask)

    s = sub.add_parser("complete", parents=[common], help="complete one tensor")
    s.add_argument("--algo", default="imputation")
    s.add_argument("--graph", default=None, help="edge list file or dataset directory")
    s.add_argument("--transform", default="laplacian")
    s.add_argument("--tensor", required=True)
    s.add_argument("--mask", required=True)
    s.add_argument("--truth", default=None)
    s.add_argument("--model", default=None)
    s.add_argument("--max-iters", type=int, default=500)
    s.add_argument("--tol", type=float, default=None)
    s.add_argument("--out", required=True)
    s.add_argument("--report", default=None, help="JSON report path (stdout if omitted)")
    s.set_defaults(func=cmd_complete)

    s = sub.add_parser("train", parents=[common], help="train a Conv GT-Net")
    s.add_argument("--data", required=True)
    s.add_argument("--phases", type=int, default=10)
    s.add_argument("--channels", type=int, default=16)
    s.add_argument("--lr", type=float, default=1e-4)
    s.add_argument("--epochs", type=int, default=500)
    s.add_argument("--missing-rate", type=float, default=0.3)
    s.add_argument("--batch-size", type=int, default=1)
    s.add_argument("--eval-every", type=int, default=1)
    s.add_argument("--alpha", type=float, default=1.0)
    s.add_argument("--beta", type=float, default=1e-4)
    s.add_argument("--per-phase-weights", action="store_true")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--out", required=True, help="model file")
    s.add_argument("--log", default=None, help="epoch CSV (default <out>.csv)")
    s.add_argument("--figures", default=None, help="directory for a training-curve PNG")
    s.set_defaults(func=cmd_train)

    s = sub.add_parser("bench", parents=[common], help="sweep missing rates, emit CSV")
    s.add_argument("--data", required=True)
    s.add_argument("--algos", type=_str_list, default=["imputation", "tnn-admm"])
    s.add_argument("--missing-rates", type=_float_list,
                   default=[0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9])
    s.add_argument("--trials", type=int, default=5)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--model", default=None)
    s.add_argument("--csv", default=None, help="output path (stdout if omitted)")
    s.add_argument("--figures", default=None, help="directory for MSE/time PNGs")
    s.set_defaults(func=cmd_bench)

    s = sub.add_parser("gradcheck", parents=[common], help="finite-difference check of the backward pass")
    s.add_argument("--seed", type=_int_list, default=[0], help="one seed or a comma list")
    s.add_argument("--per-group", type=int, default=200)
    s.add_argument("--zero-init", action="store_true")
    s.set_defaults(func=cmd_gradcheck)
    return ap


def _apply_config(ap: argparse.ArgumentParser, argv: Sequence[str]) -> None:
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, rest = pre.parse_known_args(argv)
    if not known.config:
        return
    try:
        with open(known.config, "rb") as f:
            conf = tomllib.load(f)
    except FileNotFoundError:
        raise ValidationError(f"config file {known.config} does not exist") from None
    except tomllib.TOMLDecodeError as exc:
        raise ValidationError(f"config file {known.config}: {exc}") from None
    subs = next(a for a in ap._actions if isinstance(a, argparse._SubParsersAction))
    command = next((t for t in rest if t in subs.choices), None)
    if command is None:
        return
    sp = subs.choices[command]
    dests = {a.dest: a for a in sp._actions if a.dest != "help"}
    table = conf.get(command, {})
    _require(isinstance(table, dict), f"config key {command!r} must be a table")
    values = {k: v for k, v in conf.items() if not isinstance(v, dict)}
    values.update(table)
    defaults = {}
    for key, val in values.items():
        dest = key.replace("-", "_")
        if dest not in dests:
            # top-level keys may target other subcommands
            if key in table:
                raise ValidationError(f"config key {key!r} is not a flag of {command}")
            continue
        action = dests[dest]
        if action.type is not None and isinstance(val, (str, list)):
            try:
                val = action.type(val)
            except (argparse.ArgumentTypeError, ValueError) as exc:
                raise ValidationError(f"config key {key!r}: {exc}") from None
        defaults[dest] = val
        action.required = False
    sp.set_defaults(**defaults)


def main(argv: Sequence[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    ap = build_parser()
    try:
        _apply_config(ap, argv)
        args = ap.parse_args(argv)
        if args.verbose:
            logging.getLogger("gtnet").setLevel(logging.INFO)
        return args.func(args)
    except NumericalError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (ValidationError, OSError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
