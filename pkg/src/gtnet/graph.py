"""Graphs, Laplacians and the spectral (graph Fourier) transform."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Iterable, Sequence, TextIO

import numpy as np

from .errors import NumericalError, ParseError, ValidationError

log = logging.getLogger(__name__)

KINDS = ("laplacian", "normalized-laplacian", "cycle-dct", "identity")


@dataclass(frozen=True)
class Graph:
    """Weighted undirected graph stored as a dense symmetric adjacency.

    ``node_ids`` keeps the original ids of the nodes (index ``i`` of the
    adjacency corresponds to ``node_ids[i]``).
    """

    adjacency: np.ndarray
    node_ids: tuple[int, ...] = field(default=())
    dropped_self_loops: int = field(default=0, compare=False)

    def __post_init__(self):
        a = np.asarray(self.adjacency, dtype=np.float64)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ValidationError(f"adjacency must be square, got {a.shape}")
        if not np.all(np.isfinite(a)):
            raise ValidationError("adjacency has non-finite entries")
        if np.any(a < 0):
            raise ValidationError("negative edge weight")
        if np.any(np.diag(a) != 0):
            raise ValidationError("adjacency diagonal must be zero")
        if not np.array_equal(a, a.T):
            raise ValidationError("adjacency must be symmetric")
        a = a.copy()
        a.setflags(write=False)
        object.__setattr__(self, "adjacency", a)
        ids = tuple(int(i) for i in self.node_ids) or tuple(range(a.shape[0]))
        if len(ids) != a.shape[0]:
            raise ValidationError("node_ids length does not match adjacency")
        object.__setattr__(self, "node_ids", ids)

    @property
    def n3(self) -> int:
        return self.adjacency.shape[0]

    @property
    def num_edges(self) -> int:
        return int(np.count_nonzero(np.triu(self.adjacency)))

    def edges(self) -> list[tuple[int, int, float]]:
        """Undirected edges ``(i, j, w)`` with ``i < j`` in internal indices."""
        iu, ju = np.nonzero(np.triu(self.adjacency))
        return [(int(i), int(j), float(self.adjacency[i, j])) for i, j in zip(iu, ju)]

    def is_weighted(self) -> bool:
        w = self.adjacency[self.adjacency > 0]
        return bool(w.size) and not np.all(w == 1.0)

    def index_of(self, original_ids: Iterable[int]) -> list[int]:
        lookup = {nid: i for i, nid in enumerate(self.node_ids)}
        try:
            return [lookup[int(i)] for i in original_ids]
        except KeyError as exc:
            raise ValidationError(f"node id {exc.args[0]} not in graph") from None

    def is_connected(self) -> bool:
        if self.n3 == 0:
            return True
        seen = np.zeros(self.n3, dtype=bool)
        stack = [0]
        seen[0] = True
        while stack:
            k = stack.pop()
            for s in np.flatnonzero(self.adjacency[k]):
                if not seen[s]:
                    seen[s] = True
                    stack.append(int(s))
        return bool(seen.all())


def from_edges(n3: int, edges: Iterable[tuple[int, int, float]]) -> Graph:
    a = np.zeros((n3, n3))
    for i, j, w in edges:
        if i == j:
            continue
        a[i, j] = a[j, i] = w
    return Graph(a)


def load_edge_list(stream: TextIO) -> Graph:
    """Parse a SNAP-style edge list (``u v`` or ``u v w`` per line).

    Nodes are re-indexed densely in ascending original-id order. Duplicate
    edges keep the last weight; self-loops are dropped.
    """
    raw: dict[tuple[int, int], float] = {}
    ids: set[int] = set()
    loops = 0
    for lineno, line in enumerate(stream, start=1):
        text = line.strip()
        if not text or text.startswith("#"):
            continue
        parts = text.split()
        if len(parts) not in (2, 3):
            raise ParseError(f"line {lineno}: expected 'u v' or 'u v w', got {text!r}")
        try:
            u, v = int(parts[0]), int(parts[1])
            w = float(parts[2]) if len(parts) == 3 else 1.0
        except ValueError:
            raise ParseError(f"line {lineno}: cannot parse {text!r}") from None
        if u < 0 or v < 0:
            raise ParseError(f"line {lineno}: node ids must be non-negative")
        if not np.isfinite(w):
            raise ParseError(f"line {lineno}: weight is not finite")
        if w < 0:
            raise ValidationError(f"line {lineno}: negative weight {w}")
        ids.update((u, v))
        if u == v:
            loops += 1
            continue
        raw[(min(u, v), max(u, v))] = w

    if loops:
        log.warning("dropped %d self-loop(s)", loops)
    order = sorted(ids)
    index = {nid: i for i, nid in enumerate(order)}
    a = np.zeros((len(order), len(order)))
    for (u, v), w in raw.items():
        a[index[u], index[v]] = a[index[v], index[u]] = w
    return Graph(a, tuple(order), dropped_self_loops=loops)


def write_edge_list(g: Graph, stream: TextIO) -> None:
    """Write ``g`` in the edge-list format; weights use ``repr`` so they round-trip."""
    stream.write(f"# nodes {g.n3}\n")
    weighted = g.is_weighted()
    for i, j, w in g.edges():
        u, v = g.node_ids[i], g.node_ids[j]
        stream.write(f"{u} {v} {w!r}\n" if weighted else f"{u} {v}\n")


def induced_subgraph(g: Graph, ids: Sequence[int]) -> Graph:
    """Restrict ``g`` to internal indices ``ids``, re-indexed in the given order."""
    idx = np.asarray(list(ids), dtype=np.int64)
    if idx.size and (idx.min() < 0 or idx.max() >= g.n3):
        raise ValidationError(f"node index out of range [0, {g.n3})")
    if np.unique(idx).size != idx.size:
        raise ValidationError("subgraph ids must be distinct")
    a = g.adjacency[np.ix_(idx, idx)]
    return Graph(a, tuple(g.node_ids[i] for i in idx))


def assign_random_weights(g: Graph, lo: float, hi: float, seed: int) -> Graph:
    """Give every edge an independent integer weight uniform on ``[lo, hi]``."""
    if lo <= 0 or hi <= 0:
        raise ValidationError("weight bounds must be positive")
    if lo > hi:
        raise ValidationError(f"lo={lo} > hi={hi}")
    rng = np.random.default_rng(seed)
    a = np.zeros_like(g.adjacency)
    iu, ju = np.nonzero(np.triu(g.adjacency))
    w = rng.integers(int(np.ceil(lo)), int(np.floor(hi)) + 1, size=iu.size).astype(np.float64)
    a[iu, ju] = w
    a[ju, iu] = w
    return Graph(a, g.node_ids)


def laplacian(g: Graph, normalized: bool = False) -> np.ndarray:
    a = g.adjacency
    deg = a.sum(axis=1)
    if not normalized:
        return np.diag(deg) - a
    isolated = np.flatnonzero(deg <= 0)
    if isolated.size:
        raise ValidationError(
            f"normalized Laplacian undefined: node {g.node_ids[isolated[0]]} has zero degree"
        )
    d = 1.0 / np.sqrt(deg)
    return np.eye(g.n3) - d[:, None] * a * d[None, :]


@dataclass(frozen=True)
class GraphTransform:
    """Orthogonal transform pair; ``U`` maps node slices to spectral slices."""

    U: np.ndarray
    U_inv: np.ndarray
    eigenvalues: np.ndarray
    kind: str

    @property
    def n3(self) -> int:
        return self.U.shape[0]


def _fix_signs(q: np.ndarray, tol: float = 1e-12) -> np.ndarray:
    # first entry above tol in each column made positive
    q = q.copy()
    for c in range(q.shape[1]):
        nz = np.flatnonzero(np.abs(q[:, c]) > tol)
        if nz.size and q[nz[0], c] < 0:
            q[:, c] = -q[:, c]
    return q


def cycle_basis(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Real orthogonal eigenbasis of the ``n``-cycle Laplacian.

    Columns are the constant vector, cosine/sine pairs and (for even ``n``)
    the alternating vector, ordered by ascending eigenvalue.
    """
    j = np.arange(n)
    cols = [np.full(n, 1.0 / np.sqrt(n))]
    vals = [0.0]
    for k in range(1, (n - 1) // 2 + 1):
        theta = 2.0 * np.pi * k * j / n
        lam = 2.0 - 2.0 * np.cos(2.0 * np.pi * k / n)
        cols += [np.sqrt(2.0 / n) * np.cos(theta), np.sqrt(2.0 / n) * np.sin(theta)]
        vals += [lam, lam]
    if n % 2 == 0 and n > 1:
        cols.append((-1.0) ** j / np.sqrt(n))
        vals.append(4.0)
    return np.array(vals), np.column_stack(cols)


def spectral_transform(g: Graph | int, kind: str = "laplacian") -> GraphTransform:
    """Build the transform for ``g``.

    ``cycle-dct`` and ``identity`` ignore the topology and only use the node
    count, so an integer may be passed for those.
    """
    if kind not in KINDS:
        raise ValidationError(f"unknown transform kind {kind!r}; expected one of {KINDS}")
    n = g if isinstance(g, int) else g.n3
    if kind == "identity":
        q, vals = np.eye(n), np.zeros(n)
    elif kind == "cycle-dct":
        vals, q = cycle_basis(n)
    else:
        if isinstance(g, int):
            raise ValidationError(f"kind {kind!r} needs a graph")
        lap = laplacian(g, normalized=(kind == "normalized-laplacian"))
        try:
            vals, q = np.linalg.eigh(lap)
        except np.linalg.LinAlgError as exc:
            raise NumericalError(f"eigendecomposition failed: {exc}") from exc
    q = _fix_signs(q)
    return GraphTransform(U=np.ascontiguousarray(q.T), U_inv=q, eigenvalues=vals, kind=kind)


def erdos_renyi(n: int, p: float, seed: int) -> Graph:
    """G(n, p) with unit weights."""
    if not 0.0 <= p <= 1.0:
        raise ValidationError(f"edge probability {p} outside [0, 1]")
    rng = np.random.default_rng(seed)
    upper = np.triu(rng.random((n, n)) < p, k=1).astype(np.float64)
    return Graph(upper + upper.T)
