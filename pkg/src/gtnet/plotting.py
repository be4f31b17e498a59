"""PNG figures for bench and training CSV rows. Headless (Agg) only."""

from __future__ import annotations

from collections import defaultdict
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np
import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

_STYLE = {"imputation": "o-", "tnn-admm": "s--", "net": "^-"}


def _by_algo(rows: Iterable[dict], key: str) -> dict[str, tuple[np.ndarray, np.ndarray]]:
    acc: dict[str, dict[float, list[float]]] = defaultdict(lambda: defaultdict(list))
    for r in rows:
        v = float(r[key])
        if np.isfinite(v):
            acc[r["algo"]][float(r["missing_rate"])].append(v)
    out = {}
    for algo, per_rate in acc.items():
        rates = np.array(sorted(per_rate))
        out[algo] = (rates, np.array([np.median(per_rate[x]) for x in rates]))
    return out


def _sweep_plot(series, ylabel: str, path: Path, logy: bool) -> Path:
    fig, ax = plt.subplots(figsize=(5, 3.5))
    for algo, (x, y) in sorted(series.items()):
        ax.plot(x, y, _STYLE.get(algo, "x-"), label=algo, ms=4)
    if logy:
        ax.set_yscale("log")
    ax.set_xlabel("missing rate")
    ax.set_ylabel(ylabel)
    ax.grid(alpha=0.3)
    if series:
        ax.legend(frameon=False)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def bench_figures(rows: Sequence[dict], out_dir) -> list[Path]:
    """Median MSE and wall time against missing rate, one line per algorithm."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    mse = _by_algo(rows, "mse")
    # log axis needs positive values
    logy = all((y > 0).all() for _, y in mse.values()) and bool(mse)
    return [
        _sweep_plot(mse, "MSE (missing slices)", out / "mse_vs_missing_rate.png", logy),
        _sweep_plot(_by_algo(rows, "wall_time_s"), "wall time [s]",
                    out / "time_vs_missing_rate.png", False),
    ]


def training_figure(rows: Sequence[dict], out_dir) -> Path:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    ep = [int(r["epoch"]) for r in rows]
    fig, ax = plt.subplots(figsize=(5, 3.5))
    ax.plot(ep, [float(r["mean_loss"]) for r in rows], label="train loss")
    test = [(int(r["epoch"]), float(r["test_mse"])) for r in rows if r["test_mse"] not in ("", None)]
    if test:
        ax.plot(*zip(*test), "o-", ms=3, label="test MSE")
    ax.set_xlabel("epoch")
    ax.set_yscale("log")
    ax.grid(alpha=0.3)
    ax.legend(frameon=False)
    fig.tight_layout()
    path = out / "training.png"
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path
