"""Graph-tensor algebra.

A graph-tensor with dims ``n1 x n2 x n3`` is held as a float64 array of
shape ``(n3, n1, n2)``: ``x[k]`` is the frontal slice of node ``k``. This
slice-major layout is also the on-disk order of the GTT1 format.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from typing import BinaryIO

import numpy as np

from .errors import FormatError, NumericalError, ValidationError
from .graph import GraphTransform

GTT_MAGIC = b"GTT1"
_GTT_HEADER = struct.Struct("<4sIII")


def dims(x: np.ndarray) -> tuple[int, int, int]:
    """``(n1, n2, n3)`` of a graph-tensor array."""
    n3, n1, n2 = x.shape
    return n1, n2, n3


def as_tensor(x) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 3:
        raise ValidationError(f"graph-tensor must be 3-D (n3, n1, n2), got shape {x.shape}")
    return x


def zeros(n1: int, n2: int, n3: int) -> np.ndarray:
    return np.zeros((n3, n1, n2))


def fro_norm(x: np.ndarray) -> float:
    return float(np.sqrt(np.sum(np.square(x))))


def _mix(m: np.ndarray, x: np.ndarray) -> np.ndarray:
    # out[k] = sum_s m[k, s] * x[s]
    n3 = x.shape[0]
    return (m @ x.reshape(n3, -1)).reshape(x.shape)


def _check_transform(x: np.ndarray, t: GraphTransform) -> np.ndarray:
    x = as_tensor(x)
    if x.shape[0] != t.n3:
        raise ValidationError(f"tensor has n3={x.shape[0]} but transform has dimension {t.n3}")
    return x


def transform(x: np.ndarray, t: GraphTransform) -> np.ndarray:
    """Graph Fourier transform: spectral slice ``k`` is ``sum_s U[k, s] x[s]``."""
    return _mix(t.U, _check_transform(x, t))


def inverse_transform(x_spec: np.ndarray, t: GraphTransform) -> np.ndarray:
    return _mix(t.U_inv, _check_transform(x_spec, t))


@dataclass
class LsvdFactors:
    """Per-spectral-slice SVD factors (thin SVD, ``r_k = min(n1, n2)``)."""

    spectral_u: np.ndarray  # (n3, n1, r)
    spectral_s: np.ndarray  # (n3, r), non-increasing
    spectral_v: np.ndarray  # (n3, n2, r)
    transform: GraphTransform

    def spectral_slices(self) -> np.ndarray:
        return np.einsum("kir,kr,kjr->kij", self.spectral_u, self.spectral_s, self.spectral_v)

    def reconstruct(self) -> np.ndarray:
        return inverse_transform(self.spectral_slices(), self.transform)


def _svd(a: np.ndarray, where: str = ""):
    if not np.any(a):
        r = min(a.shape)
        return np.zeros((a.shape[0], r)), np.zeros(r), np.zeros((r, a.shape[1]))
    try:
        return np.linalg.svd(a, full_matrices=False)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"SVD did not converge{where}: {exc}") from exc


def l_svd(x: np.ndarray, t: GraphTransform) -> LsvdFactors:
    xs = transform(x, t)
    us, ss, vs = [], [], []
    for k, slc in enumerate(xs):
        u, s, vh = _svd(slc, f" on spectral slice {k}")
        us.append(u)
        ss.append(s)
        vs.append(vh.T)
    return LsvdFactors(np.array(us), np.array(ss), np.array(vs), t)


def gtnn(x: np.ndarray, t: GraphTransform, mode: str = "first-slice") -> float:
    """Graph-tensor nuclear norm.

    ``first-slice`` sums the singular values of spectral slice 0 only;
    ``all-slices`` sums them over every spectral slice.
    """
    xs = transform(x, t)
    if mode == "first-slice":
        return float(np.sum(_svd(xs[0], " on spectral slice 0")[1]))
    if mode == "all-slices":
        return float(sum(np.sum(_svd(s, f" on spectral slice {k}")[1]) for k, s in enumerate(xs)))
    raise ValidationError(f"unknown gtnn mode {mode!r}")


def singular_soft(a: np.ndarray, lam: float) -> np.ndarray:
    """Shrink the singular values of ``a`` by ``lam``, clamped at zero."""
    if lam < 0:
        raise ValidationError(f"threshold must be non-negative, got {lam}")
    u, s, vh = _svd(np.asarray(a, dtype=np.float64))
    s = np.maximum(s - lam, 0.0)
    return (u * s) @ vh


def singular_soft_slices(xs: np.ndarray, lams) -> np.ndarray:
    """Apply :func:`singular_soft` to every slice; ``lams`` is scalar or per-slice."""
    lams = np.broadcast_to(np.asarray(lams, dtype=np.float64), (xs.shape[0],))
    out = np.empty_like(xs)
    for k in range(xs.shape[0]):
        try:
            out[k] = singular_soft(xs[k], lams[k])
        except NumericalError as exc:
            raise NumericalError(f"slice {k}: {exc}") from exc
    return out


def slice_sigma_max(xs: np.ndarray) -> np.ndarray:
    return np.array([_svd(s)[1][0] if s.size else 0.0 for s in xs])


# -- GTT1 files ---------------------------------------------------------------


def write_gtt(x: np.ndarray, sink: BinaryIO) -> None:
    x = as_tensor(x)
    if not np.all(np.isfinite(x)):
        raise ValidationError("refusing to write a tensor with non-finite entries")
    n1, n2, n3 = dims(x)
    sink.write(_GTT_HEADER.pack(GTT_MAGIC, n1, n2, n3))
    sink.write(np.ascontiguousarray(x, dtype="<f8").tobytes())


def read_gtt(source: BinaryIO) -> np.ndarray:
    head = source.read(_GTT_HEADER.size)
    if len(head) != _GTT_HEADER.size:
        raise FormatError("truncated GTT1 header")
    magic, n1, n2, n3 = _GTT_HEADER.unpack(head)
    if magic != GTT_MAGIC:
        raise FormatError(f"bad magic {magic!r}, expected {GTT_MAGIC!r}")
    if 0 in (n1, n2, n3):
        raise FormatError(f"invalid dims {n1}x{n2}x{n3}")
    nbytes = 8 * n1 * n2 * n3
    body = source.read(nbytes)
    if len(body) != nbytes:
        raise FormatError(f"truncated GTT1 body: expected {nbytes} bytes, got {len(body)}")
    if source.read(1):
        raise FormatError("trailing bytes after GTT1 body")
    x = np.frombuffer(body, dtype="<f8").astype(np.float64).reshape(n3, n1, n2)
    if not np.all(np.isfinite(x)):
        raise FormatError("GTT1 body contains non-finite values")
    return x


def save_gtt(x: np.ndarray, path) -> None:
    with open(path, "wb") as f:
        write_gtt(x, f)


def load_gtt(path) -> np.ndarray:
    with open(path, "rb") as f:
        return read_gtt(f)
