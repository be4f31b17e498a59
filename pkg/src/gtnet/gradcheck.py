"""Finite-difference verification of the Conv GT-Net backward pass."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import net
from .data import sample_mask
from .graph import erdos_renyi, spectral_transform
from .solvers import ObservationMask

DESK_DIMS = (6, 6, 8)
DESK_CHANNELS = 4
DESK_PHASES = 3


@dataclass
class GroupResult:
    name: str
    checked: int
    skipped_kink: int
    skipped_zero: int
    max_rel_err: float

    @property
    def ok(self) -> bool:
        # a group with only zero gradients is vacuous but consistent
        if self.checked == 0:
            return self.skipped_kink == 0
        return self.max_rel_err < GradcheckReport.threshold


@dataclass
class GradcheckReport:
    groups: list[GroupResult] = field(default_factory=list)
    threshold = 1e-4

    @property
    def passed(self) -> bool:
        return all(g.ok for g in self.groups)

    def lines(self) -> list[str]:
        out = []
        for g in self.groups:
            out.append(
                f"{g.name:10s} checked={g.checked:4d} kinks={g.skipped_kink:3d} "
                f"zero={g.skipped_zero:4d} max_rel_err={g.max_rel_err:.3e} "
                f"{'ok' if g.ok else 'FAIL'}"
            )
        return out


def activation_pattern(g_full, m: ObservationMask, p: net.NetParams, beta: float) -> np.ndarray:
    """Every ReLU and soft-threshold branch taken by the loss, flattened."""
    g_obs = np.where(m.bool_observed[:, None, None], g_full, 0.0)
    traj, caches = net.forward(g_obs, m, p)
    bits = []
    for c in caches:
        bits += [c.f_cache[2] > 0, c.finv_cache[1] > 0, np.abs(c.v) > c.lam]
    if beta != 0.0:
        for t, x in enumerate(traj):
            v, fc = net._f_forward(x, p.block(t))
            _, ic = net._finv_forward(v, p.block(t))
            bits += [fc[2] > 0, ic[1] > 0]
    return np.concatenate([b.ravel() for b in bits])


LossGrad = Callable[[np.ndarray, ObservationMask, net.NetParams, float, float], tuple]


def check(
    g_full,
    m: ObservationMask,
    p: net.NetParams,
    alpha: float = 1.0,
    beta: float = 1.0,
    per_group: int = 200,
    step: float = 1e-5,
    fallback_steps: tuple[float, ...] = (1e-6, 1e-7),
    seed: int = 0,
    loss_and_grad: LossGrad = net.loss_and_grad,
) -> GradcheckReport:
    """Compare analytic gradients with central differences.

    If a perturbation flips a ReLU or threshold branch the difference straddles
    a kink; the coordinate is retried with the smaller ``fallback_steps`` and
    skipped if it still flips. Coordinates where both gradients vanish are
    skipped first, so a flip that leaves the loss flat is not a kink.

    The relative error is ``|a - n| / max(|a|, |n|, 1e-6 * |L|)``: central
    differences carry roundoff of order ``eps * |L| / step``, so the floor
    keeps gradients far below the loss scale from reporting pure noise.
    """
    rng = np.random.default_rng(seed)
    p = p.copy()
    value, grads = loss_and_grad(g_full, m, p, alpha, beta)
    floor = 1e-6 * max(1.0, abs(value))
    base = activation_pattern(g_full, m, p, beta)
    report = GradcheckReport()

    groups: dict[str, list[tuple[np.ndarray, np.ndarray]]] = {}
    for (name, a), (_, ga) in zip(p.named_arrays(), grads.named_arrays()):
        groups.setdefault(name, []).append((a, ga))

    for name, members in groups.items():
        coords = [(j, idx) for j, (a, _) in enumerate(members) for idx in np.ndindex(a.shape)]
        order = rng.permutation(len(coords))
        checked = kinks = zeros = 0
        worst = 0.0
        for ci in order:
            if checked >= per_group:
                break
            j, idx = coords[ci]
            a, ga = members[j]
            old = a[idx]
            for h in (step, *fallback_steps):
                a[idx] = old + h
                lp, _ = loss_and_grad(g_full, m, p, alpha, beta)
                flip = not np.array_equal(activation_pattern(g_full, m, p, beta), base)
                a[idx] = old - h
                lm, _ = loss_and_grad(g_full, m, p, alpha, beta)
                flip = flip or not np.array_equal(activation_pattern(g_full, m, p, beta), base)
                a[idx] = old
                if not flip:
                    break
            num = (lp - lm) / (2.0 * h)
            ana = float(ga[idx])
            scale = max(abs(num), abs(ana))
            # both vanish: nothing to compare, even if a branch flipped
            if scale < 1e-10:
                zeros += 1
                continue
            if flip:
                kinks += 1
                continue
            checked += 1
            worst = max(worst, abs(num - ana) / max(scale, floor))
        report.groups.append(GroupResult(name, checked, kinks, zeros, worst))
    return report


def desk_instance(seed: int, zero_init: bool = False):
    """The fixed 6x6x8, C=4, T=3 problem used by ``gtnet gradcheck``."""
    n1, n2, n3 = DESK_DIMS
    rng = np.random.default_rng(seed)
    g = erdos_renyi(n3, 0.4, seed)
    t = spectral_transform(g)
    cfg = net.NetConfig(n1, n2, n3, phases=DESK_PHASES, channels=DESK_CHANNELS, seed=seed)
    if zero_init:
        p = net.zero_params(cfg)
    else:
        p = net.init_params(cfg, t)
        # zero biases put ReLU inputs exactly on the kink wherever the
        # thresholded features vanish; spread biases and thresholds off it
        for b in p.blocks:
            for bias in (b.b1, b.b2, b.b3, b.b4):
                bias[:] = rng.uniform(-0.1, 0.1, size=bias.shape)
        p.lam[:] = rng.uniform(0.01, 0.2, size=p.phases)
    x = rng.standard_normal((n3, n1, n2))
    m = sample_mask(n3, 0.3, seed)
    return x, m, p
