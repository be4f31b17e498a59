"""Conv GT-Net: an unrolled imputation network with hand-written backprop.

Each phase imputes the observations, applies a learned transform
``F = conv(relu(conv(fc(.))))``, an element-wise soft threshold, the mirrored
inverse ``F^-1 = fc(conv(relu(conv(.))))`` and a shortcut:

    X^t = R^t + F^-1(soft(F(R^t), lam_t)),   R^t = P_obs(G) + P_miss(X^{t-1})

The ``fc`` layers mix frontal slices across nodes (an ``n3 x n3`` matrix, the
role the graph Fourier matrix plays in the classical algorithm); convolutions
act on each node's ``n1 x n2`` slice. Public feature maps are
``(n3, C, n1, n2)``.
"""

from __future__ import annotations

import logging
import struct
import time
from dataclasses import dataclass, field, fields, replace
from typing import BinaryIO, Callable, Sequence

import numpy as np

from .errors import FormatError, TrainingError, ValidationError
from .graph import GraphTransform
from .solvers import ObservationMask, missing_mse

log = logging.getLogger(__name__)

KERNEL = 3
LAMBDA_INIT = 0.01


@dataclass
class NetConfig:
    n1: int
    n2: int
    n3: int
    phases: int = 10
    channels: int = 16
    alpha: float = 1.0
    beta: float = 1e-4
    seed: int = 0
    share_weights: bool = True
    kernel: int = KERNEL

    def __post_init__(self):
        if self.phases < 1:
            raise ValidationError("phases must be >= 1")
        if self.channels < 1:
            raise ValidationError("channels must be >= 1")
        if self.kernel != KERNEL:
            raise ValidationError("only 3x3 kernels are supported")
        if min(self.n1, self.n2, self.n3) < 1:
            raise ValidationError("dims must be positive")


@dataclass
class Block:
    """Weights of one F / F^-1 pair."""

    fc_in: np.ndarray  # (n3, n3)
    w1: np.ndarray  # (C, 1, 3, 3)
    b1: np.ndarray  # (C,)
    w2: np.ndarray  # (C, C, 3, 3)
    b2: np.ndarray
    w3: np.ndarray  # (C, C, 3, 3)
    b3: np.ndarray
    w4: np.ndarray  # (1, C, 3, 3)
    b4: np.ndarray  # (1,)
    fc_out: np.ndarray  # (n3, n3)

    def arrays(self) -> list[np.ndarray]:
        return [getattr(self, f.name) for f in fields(self)]

    def zeros_like(self) -> "Block":
        return Block(*(np.zeros_like(a) for a in self.arrays()))


BLOCK_GROUPS = ("fc_in", "conv1.w", "conv1.b", "conv2.w", "conv2.b",
                "conv3.w", "conv3.b", "conv4.w", "conv4.b", "fc_out")


@dataclass
class NetParams:
    blocks: list[Block]
    lam: np.ndarray  # (T,)

    def arrays(self) -> list[np.ndarray]:
        """Every parameter array in serialization order."""
        out = []
        for b in self.blocks:
            out.extend(b.arrays())
        out.append(self.lam)
        return out

    def named_arrays(self) -> list[tuple[str, np.ndarray]]:
        names = [g for _ in self.blocks for g in BLOCK_GROUPS] + ["lambda"]
        return list(zip(names, self.arrays()))

    def block(self, t: int) -> Block:
        """Weights used by phase ``t`` (0-based)."""
        return self.blocks[0] if len(self.blocks) == 1 else self.blocks[t]

    def zeros_like(self) -> "NetParams":
        return NetParams([b.zeros_like() for b in self.blocks], np.zeros_like(self.lam))

    def copy(self) -> "NetParams":
        return NetParams([Block(*(a.copy() for a in b.arrays())) for b in self.blocks],
                         self.lam.copy())

    def size(self) -> int:
        return sum(a.size for a in self.arrays())

    @property
    def phases(self) -> int:
        return self.lam.size

    @property
    def channels(self) -> int:
        return self.blocks[0].w1.shape[0]

    @property
    def n3(self) -> int:
        return self.blocks[0].fc_in.shape[0]


def param_count(n3: int, c: int, t: int) -> int:
    return 2 * n3 * n3 + 9 * c + c + 9 * c * c + c + 9 * c * c + c + 9 * c + 1 + t


def init_params(cfg: NetConfig, transform: GraphTransform | None = None) -> NetParams:
    """Warm start: ``fc_in``/``fc_out`` from ``U``/``U^-1`` (identity without a
    graph), kernels uniform in ``+-1/sqrt(fan_in)``, zero biases, ``lam = 0.01``."""
    rng = np.random.default_rng(cfg.seed)
    c, n3 = cfg.channels, cfg.n3
    if transform is not None and transform.n3 != n3:
        raise ValidationError(f"transform dimension {transform.n3} != n3 {n3}")

    def kernel(cout, cin):
        bound = 1.0 / np.sqrt(cin * KERNEL * KERNEL)
        return rng.uniform(-bound, bound, size=(cout, cin, KERNEL, KERNEL))

    def block():
        return Block(
            fc_in=(transform.U if transform is not None else np.eye(n3)).copy(),
            w1=kernel(c, 1), b1=np.zeros(c),
            w2=kernel(c, c), b2=np.zeros(c),
            w3=kernel(c, c), b3=np.zeros(c),
            w4=kernel(1, c), b4=np.zeros(1),
            fc_out=(transform.U_inv if transform is not None else np.eye(n3)).copy(),
        )

    nsets = 1 if cfg.share_weights else cfg.phases
    return NetParams([block() for _ in range(nsets)], np.full(cfg.phases, LAMBDA_INIT))


def zero_params(cfg: NetConfig) -> NetParams:
    p = init_params(cfg)
    for b in p.blocks:
        for a in b.arrays():
            a[...] = 0.0
    p.lam[...] = 0.0
    return p


# -- layers -------------------------------------------------------------------


# Internal feature maps are channel-major ``(C, N, H, W)``. For im2col every
# slice is zero-padded and the result flattened to ``(C, N*(H+2)*(W+2))`` with
# a margin on both ends; each 3x3 tap is then one contiguous column offset.
# Outputs are computed on padded positions too and cropped.


def _im2col(x: np.ndarray) -> np.ndarray:
    c, n, h, w = x.shape
    wp = w + 2
    length = n * (h + 2) * wp
    margin = wp + 1
    buf = np.zeros((c, length + 2 * margin))
    buf[:, margin:margin + length].reshape(c, n, h + 2, wp)[:, :, 1:-1, 1:-1] = x
    cols = np.empty((c, KERNEL * KERNEL, length))
    for a in range(KERNEL):
        for b in range(KERNEL):
            off = margin + (a - 1) * wp + (b - 1)
            cols[:, a * KERNEL + b] = buf[:, off:off + length]
    return cols.reshape(c * KERNEL * KERNEL, length)


def _crop(flat: np.ndarray, n: int, h: int, w: int) -> np.ndarray:
    return flat.reshape(flat.shape[0], n, h + 2, w + 2)[:, :, 1:-1, 1:-1]


def _conv_fwd(x: np.ndarray, w: np.ndarray, b: np.ndarray):
    """Same-size 3x3 cross-correlation with zero padding."""
    _, n, h, wd = x.shape
    cols = _im2col(x)
    out = _crop(w.reshape(w.shape[0], -1) @ cols, n, h, wd)
    return out + b[:, None, None, None], cols


def _conv_bwd(dout: np.ndarray, cols: np.ndarray, w: np.ndarray):
    cout, n, h, wd = dout.shape
    dpad = np.zeros((cout, n, h + 2, wd + 2))
    dpad[:, :, 1:-1, 1:-1] = dout
    db = dout.sum(axis=(1, 2, 3))
    dw = (dpad.reshape(cout, -1) @ cols.T).reshape(w.shape)
    # input gradient = correlation with the flipped, channel-transposed kernel
    wt = np.ascontiguousarray(w[:, :, ::-1, ::-1].transpose(1, 0, 2, 3))
    dx = _crop(wt.reshape(wt.shape[0], -1) @ _im2col(dout), n, h, wd)
    return dx, dw, db


def _mix(m: np.ndarray, x: np.ndarray) -> np.ndarray:
    return (m @ x.reshape(x.shape[0], -1)).reshape(x.shape)


def _mix_bwd(dout: np.ndarray, m: np.ndarray, x: np.ndarray):
    n = x.shape[0]
    d2 = dout.reshape(n, -1)
    dm = d2 @ x.reshape(n, -1).T
    dx = (m.T @ d2).reshape(x.shape)
    return dx, dm


def soft_threshold(v: np.ndarray, lam: float) -> np.ndarray:
    return np.sign(v) * np.maximum(np.abs(v) - lam, 0.0)


def _f_forward(r: np.ndarray, blk: Block):
    a0 = _mix(blk.fc_in, r)[None]  # (1, n3, n1, n2)
    z1, cols1 = _conv_fwd(a0, blk.w1, blk.b1)
    h1 = np.maximum(z1, 0.0)
    v, cols2 = _conv_fwd(h1, blk.w2, blk.b2)
    return v, (r, cols1, z1, cols2)


def _f_backward(dv: np.ndarray, cache, blk: Block, g: Block) -> np.ndarray:
    r, cols1, z1, cols2 = cache
    dh1, dw2, db2 = _conv_bwd(dv, cols2, blk.w2)
    dz1 = dh1 * (z1 > 0)
    da0, dw1, db1 = _conv_bwd(dz1, cols1, blk.w1)
    dr, dfc = _mix_bwd(da0[0], blk.fc_in, r)
    g.w2 += dw2
    g.b2 += db2
    g.w1 += dw1
    g.b1 += db1
    g.fc_in += dfc
    return dr


def _finv_forward(s: np.ndarray, blk: Block):
    z3, cols3 = _conv_fwd(s, blk.w3, blk.b3)
    h3 = np.maximum(z3, 0.0)
    z4, cols4 = _conv_fwd(h3, blk.w4, blk.b4)
    out = _mix(blk.fc_out, z4[0])
    return out, (cols3, z3, cols4, z4[0])


def _finv_backward(dout: np.ndarray, cache, blk: Block, g: Block) -> np.ndarray:
    cols3, z3, cols4, z4 = cache
    dz4, dfc = _mix_bwd(dout, blk.fc_out, z4)
    dh3, dw4, db4 = _conv_bwd(dz4[None], cols4, blk.w4)
    dz3 = dh3 * (z3 > 0)
    ds, dw3, db3 = _conv_bwd(dz3, cols3, blk.w3)
    g.fc_out += dfc
    g.w4 += dw4
    g.b4 += db4
    g.w3 += dw3
    g.b3 += db3
    return ds


def _check_dims(x: np.ndarray, p: NetParams) -> None:
    if x.ndim != 3 or x.shape[0] != p.n3:
        raise ValidationError(f"tensor of shape {x.shape} does not match model with n3={p.n3}")


def f_transform(r: np.ndarray, p: NetParams, phase: int = 0) -> np.ndarray:
    """Learned forward transform; returns features of shape ``(n3, C, n1, n2)``."""
    _check_dims(r, p)
    v = _f_forward(np.asarray(r, dtype=np.float64), p.block(phase))[0]
    return np.ascontiguousarray(v.transpose(1, 0, 2, 3))


def f_inverse(v: np.ndarray, p: NetParams, phase: int = 0) -> np.ndarray:
    if v.ndim != 4 or v.shape[0] != p.n3 or v.shape[1] != p.channels:
        raise ValidationError(f"feature tensor of shape {v.shape} does not match model")
    return _finv_forward(np.ascontiguousarray(v.transpose(1, 0, 2, 3)), p.block(phase))[0]


# -- network ------------------------------------------------------------------


@dataclass
class PhaseCache:
    obs: np.ndarray  # bool (n3,)
    r: np.ndarray
    f_cache: tuple
    v: np.ndarray
    lam: float
    finv_cache: tuple


def phase_forward(x_prev, g_obs, m: ObservationMask, p: NetParams, t_index: int):
    """One phase, ``t_index`` counted from 1. Returns ``(x_t, cache)``."""
    if not 1 <= t_index <= p.phases:
        raise ValidationError(f"phase index {t_index} outside [1, {p.phases}]")
    _check_dims(g_obs, p)
    if x_prev.shape != g_obs.shape or m.n3 != p.n3:
        raise ValidationError("x_prev, g_obs and mask must share dims")
    blk = p.block(t_index - 1)
    obs = m.bool_observed
    r = x_prev.copy()
    r[obs] = g_obs[obs]
    lam = float(p.lam[t_index - 1])
    v, fc = _f_forward(r, blk)
    s = soft_threshold(v, lam)
    o, ic = _finv_forward(s, blk)
    return r + o, PhaseCache(obs, r, fc, v, lam, ic)


def forward(g_obs, m: ObservationMask, p: NetParams):
    """Run all phases from ``X^0 = 0``; returns ``(trajectory, caches)`` where
    ``trajectory[t]`` is ``X^{t+1}``."""
    g_obs = np.asarray(g_obs, dtype=np.float64)
    _check_dims(g_obs, p)
    x = np.zeros_like(g_obs)
    traj, caches = [], []
    for t in range(1, p.phases + 1):
        x, c = phase_forward(x, g_obs, m, p, t)
        traj.append(x)
        caches.append(c)
    return traj, caches


def infer(g_obs, m: ObservationMask, p: NetParams) -> np.ndarray:
    """Completed tensor: network output with observed slices re-imputed."""
    traj, _ = forward(g_obs, m, p)
    out = traj[-1].copy()
    obs = m.bool_observed
    out[obs] = np.asarray(g_obs)[obs]
    return out


def loss(traj: Sequence[np.ndarray], g_full, m: ObservationMask, p: NetParams,
         alpha: float = 1.0, beta: float = 1e-4, grads: NetParams | None = None):
    """``alpha * fidelity + beta * inversion``.

    Returns ``(value, dtraj)`` with ``dtraj[t] = dL/dX^{t+1}``. Parameter
    gradients of the inversion term are accumulated into ``grads`` if given.
    """
    T = len(traj)
    miss = ~m.bool_observed
    diff = traj[-1] - g_full
    diff[~miss] = 0.0
    fid = float(np.sum(diff * diff))
    dtraj = [np.zeros_like(x) for x in traj]
    dtraj[-1] += 2.0 * alpha * diff

    inv = 0.0
    if beta != 0.0:
        for t, x in enumerate(traj):
            blk = p.block(t)
            v, fc = _f_forward(x, blk)
            y, ic = _finv_forward(v, blk)
            e = y - x
            inv += float(np.sum(e * e))
            de = (2.0 * beta / T) * e
            if grads is not None:
                gb = grads.block(t)
                dv = _finv_backward(de, ic, blk, gb)
                dx = _f_backward(dv, fc, blk, gb)
            else:
                dx = _f_backward(_finv_backward(de, ic, blk, blk.zeros_like()), fc, blk, blk.zeros_like())
            dtraj[t] += dx - de
    return alpha * fid + beta * inv / T, dtraj


def backward(caches: Sequence[PhaseCache], dtraj: Sequence[np.ndarray], p: NetParams,
             grads: NetParams | None = None) -> NetParams:
    """Reverse-mode pass through the phases; returns (or accumulates into) ``grads``."""
    if len(caches) != p.phases or len(dtraj) != len(caches):
        raise ValidationError("caches/gradients do not match the model's phase count")
    grads = grads if grads is not None else p.zeros_like()
    carry = np.zeros_like(dtraj[-1])
    for t in range(len(caches) - 1, -1, -1):
        c = caches[t]
        blk, gb = p.block(t), grads.block(t)
        dx = dtraj[t] + carry
        ds = _finv_backward(dx, c.finv_cache, blk, gb)
        active = np.abs(c.v) > c.lam
        grads.lam[t] += -np.sum(np.sign(c.v) * active * ds)
        dr = dx + _f_backward(ds * active, c.f_cache, blk, gb)
        # observed slices of R come from the data, not from X^{t-1}
        dr[c.obs] = 0.0
        carry = dr
    return grads


def loss_and_grad(g_full, m: ObservationMask, p: NetParams, alpha: float = 1.0,
                  beta: float = 1e-4):
    g_obs = np.where(m.bool_observed[:, None, None], g_full, 0.0)
    traj, caches = forward(g_obs, m, p)
    grads = p.zeros_like()
    value, dtraj = loss(traj, g_full, m, p, alpha, beta, grads)
    backward(caches, dtraj, p, grads)
    return value, grads


def inversion_loss_and_grad(x, p: NetParams, phase: int = 0):
    """``||F^-1(F(x)) - x||^2`` and its parameter gradient (``x`` held fixed)."""
    x = np.asarray(x, dtype=np.float64)
    _check_dims(x, p)
    blk = p.block(phase)
    grads = p.zeros_like()
    gb = grads.block(phase)
    v, fc = _f_forward(x, blk)
    y, ic = _finv_forward(v, blk)
    e = y - x
    _f_backward(_finv_backward(2.0 * e, ic, blk, gb), fc, blk, gb)
    return float(np.sum(e * e)), grads


# -- Adam -----------------------------------------------------------------------


@dataclass
class AdamState:
    m: list[np.ndarray]
    v: list[np.ndarray]
    step: int = 0
    lr: float = 1e-4
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8

    @classmethod
    def fresh(cls, p: NetParams, lr: float = 1e-4, **kw) -> "AdamState":
        return cls([np.zeros_like(a) for a in p.arrays()],
                   [np.zeros_like(a) for a in p.arrays()], 0, lr, **kw)


def adam_update(w: np.ndarray, g: np.ndarray, m: np.ndarray, v: np.ndarray, step: int,
                lr: float, beta1: float = 0.9, beta2: float = 0.999, eps: float = 1e-8):
    """In-place bias-corrected Adam update of one array; ``step`` counts from 1."""
    m *= beta1
    m += (1.0 - beta1) * g
    v *= beta2
    v += (1.0 - beta2) * g * g
    mhat = m / (1.0 - beta1**step)
    vhat = v / (1.0 - beta2**step)
    w -= lr * mhat / (np.sqrt(vhat) + eps)


def adam_step(p: NetParams, grads: NetParams, s: AdamState) -> tuple[NetParams, AdamState]:
    """Returns updated copies; the inputs are left untouched."""
    for name, g in grads.named_arrays():
        if not np.all(np.isfinite(g)):
            raise TrainingError(f"non-finite gradient in {name}")
    p = p.copy()
    s = replace(s, m=[a.copy() for a in s.m], v=[a.copy() for a in s.v], step=s.step + 1)
    for w, g, m, v in zip(p.arrays(), grads.arrays(), s.m, s.v):
        adam_update(w, g, m, v, s.step, s.lr, s.beta1, s.beta2, s.eps)
    np.maximum(p.lam, 0.0, out=p.lam)
    return p, s


# -- training -------------------------------------------------------------------


@dataclass
class TrainConfig:
    epochs: int = 500
    lr: float = 1e-4
    missing_rate: float = 0.3
    batch_size: int = 1
    seed: int = 0
    eval_every: int = 1


@dataclass
class EpochLog:
    epoch: int
    mean_loss: float
    test_mse: float | None
    seconds: float


def eval_masks(n3: int, count: int, missing_rate: float, seed: int) -> list[ObservationMask]:
    from .data import sample_mask

    return [sample_mask(n3, missing_rate, [seed, 1, i]) for i in range(count)]


def evaluate(p: NetParams, tensors: Sequence[np.ndarray], masks: Sequence[ObservationMask]) -> float:
    """Mean missing-slice MSE of the network over ``tensors``."""
    errs = []
    for x, m in zip(tensors, masks):
        g_obs = np.where(m.bool_observed[:, None, None], x, 0.0)
        errs.append(missing_mse(infer(g_obs, m, p), x, m))
    return float(np.mean(errs)) if errs else float("nan")


def train(
    train_tensors: Sequence[np.ndarray],
    cfg: NetConfig,
    tcfg: TrainConfig,
    params: NetParams | None = None,
    transform: GraphTransform | None = None,
    test_tensors: Sequence[np.ndarray] = (),
    on_epoch: Callable[[EpochLog], None] | None = None,
) -> tuple[NetParams, list[EpochLog]]:
    """Adam over shuffled training tensors with a fresh seeded mask per tensor
    per epoch. Test MSE uses fixed masks so epochs are comparable."""
    from .data import sample_mask

    p = params.copy() if params is not None else init_params(cfg, transform)
    if tcfg.batch_size < 1:
        raise ValidationError("batch size must be >= 1")
    state = AdamState.fresh(p, lr=tcfg.lr)
    rng = np.random.default_rng(tcfg.seed)
    masks_test = eval_masks(cfg.n3, len(test_tensors), tcfg.missing_rate, tcfg.seed)
    history: list[EpochLog] = []
    n = len(train_tensors)

    for epoch in range(1, tcfg.epochs + 1):
        start = time.perf_counter()
        order = rng.permutation(n)
        total = 0.0
        for lo in range(0, n, tcfg.batch_size):
            batch = order[lo:lo + tcfg.batch_size]
            acc = p.zeros_like()
            for i in batch:
                m = sample_mask(cfg.n3, tcfg.missing_rate, [tcfg.seed, 0, epoch, int(i)])
                value, g = loss_and_grad(train_tensors[i], m, p, cfg.alpha, cfg.beta)
                total += value
                for a, b in zip(acc.arrays(), g.arrays()):
                    a += b
            if len(batch) > 1:
                for a in acc.arrays():
                    a /= len(batch)
            try:
                p, state = adam_step(p, acc, state)
            except TrainingError as exc:
                raise TrainingError(f"epoch {epoch}: {exc}") from exc
        mean_loss = total / max(n, 1)
        if not np.isfinite(mean_loss):
            raise TrainingError(f"loss diverged at epoch {epoch}")
        test_mse = None
        if len(test_tensors) and (epoch % tcfg.eval_every == 0 or epoch == tcfg.epochs):
            test_mse = evaluate(p, test_tensors, masks_test)
        entry = EpochLog(epoch, mean_loss, test_mse, time.perf_counter() - start)
        history.append(entry)
        log.info("epoch %d loss %.6g test_mse %s", epoch, mean_loss, test_mse)
        if on_epoch is not None:
            on_epoch(entry)
    return p, history


# -- CGTN model files -------------------------------------------------------------

CGTN_MAGIC = b"CGTN"
_HEAD = struct.Struct("<4sI5I")


def write_model(p: NetParams, cfg: NetConfig, sink: BinaryIO) -> None:
    """Version 1 holds one shared weight block; version 2 (per-phase weights)
    adds a u32 block count after the header."""
    shared = len(p.blocks) == 1
    sink.write(_HEAD.pack(CGTN_MAGIC, 1 if shared else 2,
                          cfg.n1, cfg.n2, cfg.n3, cfg.channels, cfg.phases))
    if not shared:
        sink.write(struct.pack("<I", len(p.blocks)))
    for a in p.arrays():
        sink.write(np.ascontiguousarray(a, dtype="<f8").tobytes())


def read_model(source: BinaryIO) -> tuple[NetParams, NetConfig]:
    head = source.read(_HEAD.size)
    if len(head) != _HEAD.size:
        raise FormatError("truncated CGTN header")
    magic, version, n1, n2, n3, c, t = _HEAD.unpack(head)
    if magic != CGTN_MAGIC:
        raise FormatError(f"bad magic {magic!r}, expected {CGTN_MAGIC!r}")
    if version not in (1, 2):
        raise FormatError(f"unsupported CGTN version {version}")
    try:
        cfg = NetConfig(n1=n1, n2=n2, n3=n3, phases=t, channels=c, share_weights=version == 1)
    except ValidationError as exc:
        raise FormatError(f"invalid CGTN dims: {exc}") from None
    nsets = 1
    if version == 2:
        raw = source.read(4)
        if len(raw) != 4:
            raise FormatError("truncated CGTN header")
        (nsets,) = struct.unpack("<I", raw)
        if nsets != t:
            raise FormatError(f"per-phase model has {nsets} blocks for {t} phases")
    p = zero_params(cfg)
    expected = sum(a.size for a in p.arrays())
    body = source.read(8 * expected)
    if len(body) != 8 * expected:
        raise FormatError(f"truncated CGTN body: expected {8 * expected} bytes, got {len(body)}")
    if source.read(1):
        raise FormatError("trailing bytes after CGTN body")
    flat = np.frombuffer(body, dtype="<f8")
    if not np.all(np.isfinite(flat)):
        raise FormatError("CGTN body contains non-finite values")
    pos = 0
    for a in p.arrays():
        a[...] = flat[pos:pos + a.size].reshape(a.shape)
        pos += a.size
    if np.any(p.lam < 0):
        raise FormatError("negative threshold in CGTN file")
    return p, cfg


def save_model(p: NetParams, cfg: NetConfig, path) -> None:
    with open(path, "wb") as f:
        write_model(p, cfg, f)


def load_model(path) -> tuple[NetParams, NetConfig]:
    with open(path, "rb") as f:
        return read_model(f)
