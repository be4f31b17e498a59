"""Dataset construction: synthetic spectral-low-rank tensors, ego-Facebook
features, observation masks, and the on-disk dataset directory."""

from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from . import graph as gr
from . import tensor as gt
from .errors import DataError, ParseError, ValidationError
from .graph import Graph, GraphTransform
from .solvers import ObservationMask

log = logging.getLogger(__name__)


def sample_mask(n3: int, missing_rate: float, seed: int | Sequence[int]) -> ObservationMask:
    """Mask with ``ceil(missing_rate * n3)`` missing nodes drawn uniformly."""
    if not 0.0 <= missing_rate < 1.0:
        raise ValidationError(f"missing rate {missing_rate} outside [0, 1)")
    n_missing = math.ceil(missing_rate * n3)
    rng = np.random.default_rng(seed)
    missing = set(rng.choice(n3, size=n_missing, replace=False).tolist())
    return ObservationMask(n3, tuple(k for k in range(n3) if k not in missing))


@dataclass
class Dataset:
    tensors: np.ndarray  # (count, n3, n1, n2)
    graph: Graph
    transform: GraphTransform
    train: list[int]
    test: list[int]
    provenance: dict = field(default_factory=dict)

    def __post_init__(self):
        self.tensors = np.asarray(self.tensors, dtype=np.float64)
        if self.tensors.ndim != 4:
            raise ValidationError("dataset tensors must have shape (count, n3, n1, n2)")
        if self.tensors.shape[1] != self.graph.n3:
            raise ValidationError("tensor n3 does not match graph")
        both = set(self.train) | set(self.test)
        if set(self.train) & set(self.test) or both != set(range(len(self.tensors))):
            raise ValidationError("train/test split must be disjoint and cover all tensors")

    @property
    def dims(self) -> tuple[int, int, int]:
        _, n3, n1, n2 = self.tensors.shape
        return n1, n2, n3

    def __len__(self) -> int:
        return len(self.tensors)


def _split(count: int, test_count: int) -> tuple[list[int], list[int]]:
    if not 0 <= test_count <= count:
        raise ValidationError(f"test count {test_count} not in [0, {count}]")
    return list(range(count - test_count)), list(range(count - test_count, count))


def parse_graph_spec(spec: str, n3: int, seed: int) -> Graph:
    """``er:<p>`` for an Erdos-Renyi graph, ``file:<path>`` for an edge list."""
    kind, _, arg = spec.partition(":")
    if kind == "er":
        try:
            p = float(arg)
        except ValueError:
            raise ValidationError(f"bad edge probability in graph spec {spec!r}") from None
        return gr.erdos_renyi(n3, p, seed)
    if kind == "file":
        with open(arg, encoding="utf-8") as f:
            g = gr.load_edge_list(f)
        if g.n3 != n3:
            raise ValidationError(f"graph file has {g.n3} nodes, expected {n3}")
        return g
    raise ValidationError(f"graph spec must be 'er:<p>' or 'file:<path>', got {spec!r}")


def spectral_low_rank(n1: int, n2: int, t: GraphTransform, rank: int, rng) -> np.ndarray:
    """Time-domain tensor whose spectral slices are ``A_k @ B_k.T`` of rank ``rank``."""
    n3 = t.n3
    a = rng.standard_normal((n3, n1, rank))
    b = rng.standard_normal((n3, n2, rank))
    return gt.inverse_transform(np.einsum("kir,kjr->kij", a, b), t)


def build_synthetic_dataset(
    g: Graph | str,
    n1: int,
    n2: int,
    n3: int,
    rank: int,
    count: int,
    seed: int,
    test_count: int = 20,
    kind: str = "laplacian",
) -> Dataset:
    if isinstance(g, str):
        spec = g
        g = parse_graph_spec(g, n3, seed)
    else:
        spec = "explicit"
    if g.n3 != n3:
        raise ValidationError(f"graph has {g.n3} nodes, expected {n3}")
    if not 0 <= rank <= min(n1, n2):
        raise ValidationError(f"rank {rank} outside [0, min(n1, n2)={min(n1, n2)}]")
    if not g.is_connected():
        log.warning("graph is disconnected; transform is still orthogonal")
    t = gr.spectral_transform(g, kind)
    # per-tensor seeding so any subset can be regenerated independently
    tensors = np.stack(
        [spectral_low_rank(n1, n2, t, rank, np.random.default_rng([seed, i])) for i in range(count)]
    ) if count else np.zeros((0, n3, n1, n2))
    train, test = _split(count, test_count)
    prov = {
        "source": "synthetic",
        "seed": seed,
        "graph": spec,
        "rank": rank,
        "transform": kind,
    }
    return Dataset(tensors, g, t, train, test, prov)


# -- ego-Facebook -------------------------------------------------------------


@dataclass
class FacebookConfig:
    first_id: int = 896
    last_id: int = 995
    n1: int = 24
    n2: int = 24
    train_count: int = 900
    test_count: int = 32
    seed: int = 0
    weight_range: tuple[float, float] | None = None


def read_features(lines: Iterable[str]) -> dict[int, np.ndarray]:
    """Parse ``node_id v1 v2 ...`` lines (SNAP ``.feat`` layout)."""
    feats: dict[int, np.ndarray] = {}
    for lineno, line in enumerate(lines, start=1):
        text = line.strip()
        if not text or text.startswith("#"):
            continue
        parts = text.split()
        try:
            feats[int(parts[0])] = np.array([float(v) for v in parts[1:]])
        except ValueError:
            raise ParseError(f"feature line {lineno}: cannot parse") from None
    return feats


def build_facebook_dataset(
    edge_path, feature_paths: Sequence, cfg: FacebookConfig | None = None
) -> Dataset:
    """Spectral-domain feature matrices mapped into graph-tensors.

    Nodes with exactly ``n1*n2`` features are eligible. Each tensor places
    ``n3`` distinct eligible vectors (seeded shuffle) on the spectral slices,
    reshaped row-major, and inverse-transforms them. Vectors are reused
    across tensors.
    """
    cfg = cfg or FacebookConfig()
    with open(edge_path, encoding="utf-8") as f:
        full = gr.load_edge_list(f)
    window = range(cfg.first_id, cfg.last_id + 1)
    g = gr.induced_subgraph(full, full.index_of(window))
    if cfg.weight_range is not None:
        g = gr.assign_random_weights(g, *cfg.weight_range, seed=cfg.seed)
    n3 = g.n3
    t = gr.spectral_transform(g, "laplacian")

    feats: dict[int, np.ndarray] = {}
    for p in feature_paths:
        with open(p, encoding="utf-8") as f:
            feats.update(read_features(f))
    size = cfg.n1 * cfg.n2
    eligible = sorted(k for k, v in feats.items() if v.size == size)
    if len(eligible) < n3:
        raise DataError(f"only {len(eligible)} nodes have {size} features; need {n3}")
    pool = np.stack([feats[k] for k in eligible])

    count = cfg.train_count + cfg.test_count
    rng = np.random.default_rng(cfg.seed)
    tensors = np.empty((count, n3, cfg.n1, cfg.n2))
    for i in range(count):
        pick = rng.permutation(len(eligible))[:n3]
        spec = pool[pick].reshape(n3, cfg.n1, cfg.n2)
        tensors[i] = gt.inverse_transform(spec, t)
    train, test = _split(count, cfg.test_count)
    prov = {
        "source": "facebook-features",
        "seed": cfg.seed,
        "window": [cfg.first_id, cfg.last_id],
        "eligible_nodes": len(eligible),
        "reuse_across_tensors": True,
        "weight_range": list(cfg.weight_range) if cfg.weight_range else None,
        "transform": "laplacian",
    }
    return Dataset(tensors, g, t, train, test, prov)


# -- dataset directory ----------------------------------------------------------


def save_dataset(ds: Dataset, out_dir, masks: dict[int, ObservationMask] | None = None) -> Path:
    out = Path(out_dir)
    (out / "tensors").mkdir(parents=True, exist_ok=True)
    with open(out / "graph.txt", "w", encoding="utf-8") as f:
        gr.write_edge_list(ds.graph, f)
    n1, n2, n3 = ds.dims
    manifest = {
        "dims": {"n1": n1, "n2": n2, "n3": n3},
        "count": len(ds),
        "split": {"train": ds.train, "test": ds.test},
        "node_ids": list(ds.graph.node_ids),
        "provenance": ds.provenance,
    }
    with open(out / "manifest.json", "w", encoding="utf-8") as f:
        json.dump(manifest, f, indent=2)
    for i, x in enumerate(ds.tensors):
        gt.save_gtt(x, out / "tensors" / f"{i:04d}.gtt")
    if masks:
        (out / "masks").mkdir(exist_ok=True)
        for i, m in masks.items():
            with open(out / "masks" / f"{i:04d}.txt", "w", encoding="utf-8") as f:
                m.write(f)
    return out


def load_graph(path) -> Graph:
    with open(path, encoding="utf-8") as f:
        return gr.load_edge_list(f)


def _read_manifest(root: Path) -> dict:
    try:
        with open(root / "manifest.json", encoding="utf-8") as f:
            return json.load(f)
    except FileNotFoundError:
        raise DataError(f"{root} has no manifest.json") from None
    except json.JSONDecodeError as exc:
        raise ParseError(f"{root / 'manifest.json'}: {exc}") from None


def _graph_from_manifest(root: Path, manifest: dict) -> Graph:
    n3 = manifest["dims"]["n3"]
    loaded = load_graph(root / "graph.txt")
    # the edge list omits isolated nodes; rebuild over the manifest's ids
    ids = manifest.get("node_ids", list(range(n3)))
    pos = {nid: i for i, nid in enumerate(ids)}
    a = np.zeros((n3, n3))
    for i, j, w in loaded.edges():
        try:
            u, v = pos[loaded.node_ids[i]], pos[loaded.node_ids[j]]
        except KeyError as exc:
            raise DataError(f"graph.txt names node {exc.args[0]} absent from manifest") from None
        a[u, v] = a[v, u] = w
    return Graph(a, tuple(ids))


def load_dataset_graph(in_dir) -> tuple[Graph, GraphTransform]:
    """Graph and transform of a dataset directory, without its tensors."""
    root = Path(in_dir)
    manifest = _read_manifest(root)
    g = _graph_from_manifest(root, manifest)
    kind = manifest.get("provenance", {}).get("transform", "laplacian")
    return g, gr.spectral_transform(g, kind)


def load_dataset(in_dir) -> Dataset:
    root = Path(in_dir)
    manifest = _read_manifest(root)
    d = manifest["dims"]
    n3 = d["n3"]
    g = _graph_from_manifest(root, manifest)
    kind = manifest.get("provenance", {}).get("transform", "laplacian")
    t = gr.spectral_transform(g, kind)
    tensors = np.stack(
        [gt.load_gtt(root / "tensors" / f"{i:04d}.gtt") for i in range(manifest["count"])]
    ) if manifest["count"] else np.zeros((0, n3, d["n1"], d["n2"]))
    if tensors.shape[1:] != (n3, d["n1"], d["n2"]):
        raise DataError(f"tensor files do not match manifest dims {d}")
    split = manifest["split"]
    return Dataset(tensors, g, t, split["train"], split["test"], manifest.get("provenance", {}))


def load_masks(in_dir) -> dict[int, ObservationMask]:
    mdir = Path(in_dir) / "masks"
    out = {}
    if mdir.is_dir():
        for p in sorted(mdir.glob("*.txt")):
            with open(p, encoding="utf-8") as f:
                out[int(p.stem)] = ObservationMask.read(f)
    return out
