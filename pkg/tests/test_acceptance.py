"""Acceptance checks. Each test prints one PASS/FAIL line, repeated in the
terminal summary, and asserts the same verdict."""

import io
import itertools
import time

import numpy as np
import pytest

from gtnet import cli, gradcheck as gc, net
from gtnet import data as dio
from gtnet import graph as gr
from gtnet import solvers as sv
from gtnet import tensor as gt
from gtnet.errors import FormatError


def _connected_graphs(count: int, seed: int):
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < count:
        n = int(rng.integers(2, 65))
        g = gr.erdos_renyi(n, float(rng.uniform(0.1, 0.6)), int(rng.integers(1 << 30)))
        if not g.is_connected():
            continue
        if len(out) % 2:
            g = gr.assign_random_weights(g, 1, 20, int(rng.integers(1 << 30)))
        out.append(g)
    return out


def test_criterion_1_transform_round_trip(verdict):
    rng = np.random.default_rng(1)
    start = time.perf_counter()
    worst_inv = worst_norm = 0.0
    for g in _connected_graphs(50, seed=1):
        for kind in ("laplacian", "normalized-laplacian"):
            t = gr.spectral_transform(g, kind)
            x = rng.standard_normal((g.n3, int(rng.integers(1, 9)), int(rng.integers(1, 9))))
            spec = gt.transform(x, t)
            back = gt.inverse_transform(spec, t)
            nx = gt.fro_norm(x)
            worst_inv = max(worst_inv, gt.fro_norm(back - x) / nx)
            worst_norm = max(worst_norm, abs(gt.fro_norm(spec) - nx) / nx)
    elapsed = time.perf_counter() - start
    ok = worst_inv < 1e-10 and worst_norm < 1e-10 and elapsed < 10
    detail = f"inverse rel err {worst_inv:.2e}, norm drift {worst_norm:.2e}, {elapsed:.2f} s"
    assert verdict(1, "transform round trip on 50 connected graphs", ok, detail)


def test_criterion_2_spectral_machinery(verdict):
    worst_orth = worst_diag = 0.0
    for g in _connected_graphs(50, seed=2):
        for kind, normalized in (("laplacian", False), ("normalized-laplacian", True)):
            t = gr.spectral_transform(g, kind)
            u = t.U
            worst_orth = max(worst_orth, np.abs(u @ u.T - np.eye(g.n3)).max())
            d = u @ gr.laplacian(g, normalized) @ u.T
            worst_diag = max(worst_diag, np.abs(d - np.diag(np.diag(d))).max())
    p3 = gr.load_edge_list(io.StringIO("0 1\n1 2\n"))
    vals = np.sort(gr.spectral_transform(p3).eigenvalues)
    p3_err = np.abs(vals - [0.0, 1.0, 3.0]).max()
    ok = worst_orth < 1e-10 and worst_diag < 1e-8 and p3_err < 1e-9
    detail = f"orthogonality {worst_orth:.2e}, off-diagonal {worst_diag:.2e}, P3 eig err {p3_err:.2e}"
    assert verdict(2, "Laplacian eigenbasis", ok, detail)


def _prox_objective(z, a, lam):
    return 0.5 * np.sum((z - a) ** 2, axis=(-2, -1)) + lam * np.linalg.svd(
        z, compute_uv=False).sum(axis=-1)


def test_criterion_3_shrinkage_oracle(verdict):
    # brute force: no point of a 21^4 grid of 2x2 matrices may beat the prox value
    grid = np.linspace(-2.0, 2.0, 21)
    zs = np.array(list(itertools.product(grid, repeat=4))).reshape(-1, 2, 2)
    rng = np.random.default_rng(3)
    worst_gap = -np.inf
    for _ in range(6):
        a = rng.uniform(-1.5, 1.5, size=(2, 2))
        lam = float(rng.uniform(0.1, 1.0))
        best = _prox_objective(gt.singular_soft(a, lam), a, lam)
        worst_gap = max(worst_gap, best - _prox_objective(zs, a, lam).min())
    hand = gt.singular_soft(np.diag([3.0, 1.0]), 2.0)
    hand_err = np.abs(hand - np.diag([1.0, 0.0])).max()
    ok = worst_gap <= 1e-9 and hand_err < 1e-9
    detail = f"largest grid undercut {max(worst_gap, 0.0):.2e}, diag(3,1) case err {hand_err:.2e}"
    assert verdict(3, "singular_soft proximal oracle", ok, detail)


def _recovery_case(seed, rate=0.2):
    g = gr.erdos_renyi(30, 0.2, seed)
    t = gr.spectral_transform(g)
    truth = dio.spectral_low_rank(16, 16, t, 2, np.random.default_rng(seed))
    m = dio.sample_mask(30, rate, seed)
    return truth, m, t


def test_criterion_4_classical_recovery(verdict):
    rel, its, secs, imp, adm = [], [], [], [], []
    for seed in range(5):
        truth, m, t = _recovery_case(seed)
        g_obs = sv.observe(truth, m)
        start = time.perf_counter()
        out, rep = sv.imputation_solve(g_obs, m, t, sv.ImputationConfig(max_iters=500), truth=truth)
        secs.append(time.perf_counter() - start)
        rel.append(sv.relative_missing_error(out, truth, m))
        its.append(rep.iterations)
        imp.append(rep.final_mse)
        adm.append(sv.tnn_admm_solve(g_obs, m, truth=truth)[1].final_mse)
    recovered = [r < 1e-3 for r in rel]
    ordering = np.median(imp) <= np.median(adm)
    ok = all(recovered) and max(secs) < 5 and ordering
    detail = (f"rel err per seed {', '.join(f'{r:.1e}' for r in rel)}; "
              f"{sum(recovered)}/5 below 1e-3; iterations {its}; max {max(secs):.2f} s; "
              f"median mse imputation {np.median(imp):.2e} vs tnn-admm {np.median(adm):.2e}")
    assert verdict(4, "imputation recovery and ordering", ok, detail)


def test_criterion_5_gradient_check(verdict):
    start = time.perf_counter()
    worst, failed = 0.0, []
    for seed in range(3):
        x, m, p = gc.desk_instance(seed)
        rep = gc.check(x, m, p, seed=seed)
        if not rep.passed or any(g.checked == 0 for g in rep.groups):
            failed.append(seed)
        worst = max([worst] + [g.max_rel_err for g in rep.groups])
    elapsed = time.perf_counter() - start
    ok = not failed and worst < 1e-4 and elapsed < 120
    detail = f"max rel err {worst:.2e}, failing seeds {failed}, {elapsed:.1f} s"
    assert verdict(5, "gradient check 6x6x8 C=4 T=3 over 3 seeds", ok, detail)


@pytest.fixture(scope="module")
def learning_set():
    ds = dio.build_synthetic_dataset("er:0.2", 12, 12, 20, 2, 220, seed=1, test_count=20)
    return ds, ds.tensors[ds.train], ds.tensors[ds.test]


def test_criterion_6_learning_signal(verdict, learning_set):
    ds, train, test = learning_set
    assert len(train) == 200 and len(test) == 20
    cfg = net.NetConfig(12, 12, 20, phases=5, channels=8)
    tcfg = net.TrainConfig(epochs=100, lr=1e-4, missing_rate=0.3, seed=0)
    masks = net.eval_masks(20, len(test), 0.3, 0)
    p0 = net.init_params(cfg, ds.transform)
    before = net.evaluate(p0, test, masks)
    start = time.perf_counter()
    p, history = net.train(train, cfg, tcfg, params=p0.copy())
    elapsed = time.perf_counter() - start
    after = net.evaluate(p, test, masks)
    finite = all(np.isfinite(e.mean_loss) for e in history)
    ratio = after / before
    ok = finite and ratio <= 0.5 and elapsed < 600
    detail = (f"held-out mse {before:.4f} -> {after:.4f}, ratio {ratio:.3f} (need <= 0.5), "
              f"training {elapsed / 60:.1f} min (need < 10), losses finite {finite}")
    assert verdict(6, "training reduces held-out error", ok, detail)


def test_criterion_7_runtime_flatness(verdict):
    rates = [round(0.1 * i, 1) for i in range(1, 10)]
    # net inference at fixed dims
    ds = dio.build_synthetic_dataset("er:0.2", 12, 12, 20, 2, 5, seed=7, test_count=0)
    cfg = net.NetConfig(12, 12, 20, phases=5, channels=8)
    p = net.init_params(cfg, ds.transform)
    net.infer(ds.tensors[0], dio.sample_mask(20, 0.5, 0), p)  # warm-up
    medians = []
    for ri, rate in enumerate(rates):
        trials = []
        for trial in range(5):
            m = dio.sample_mask(20, rate, [7, ri, trial])
            g_obs = sv.observe(ds.tensors[trial], m)
            reps = []
            for _ in range(3):
                start = time.perf_counter()
                net.infer(g_obs, m, p)
                reps.append(time.perf_counter() - start)
            trials.append(min(reps))
        medians.append(float(np.median(trials)))
    spread = max(medians) / min(medians) - 1
    # imputation iteration counts on the recovery configuration
    counts = []
    for rate in rates:
        its = []
        for trial in range(5):
            truth, m, t = _recovery_case(trial, rate)
            its.append(sv.imputation_solve(sv.observe(truth, m), m, t)[1].iterations)
        counts.append(float(np.median(its)))
    monotone = all(a <= b for a, b in zip(counts, counts[1:]))
    ok = spread < 0.15 and monotone
    detail = (f"net time max/min - 1 = {spread:.1%}; median imputation iterations "
              f"{[int(c) for c in counts]}")
    assert verdict(7, "net runtime flat in missing rate, imputation work grows", ok, detail)


def test_criterion_8_fidelity(verdict):
    problems = []
    truth, m, t = _recovery_case(0, 0.4)
    g_obs = sv.observe(truth, m)
    obs = list(m.observed)
    want = g_obs[obs].tobytes()
    outputs = {
        "imputation": sv.imputation_solve(g_obs, m, t)[0],
        "tnn-admm": sv.tnn_admm_solve(g_obs, m)[0],
    }
    cfg = net.NetConfig(16, 16, 30, phases=4, channels=3, seed=2)
    p = net.init_params(cfg, t)
    rng = np.random.default_rng(8)
    for b in p.blocks:
        for a in b.arrays():
            a += rng.normal(scale=0.05, size=a.shape)
    outputs["net"] = net.infer(g_obs, m, p)
    for name, out in outputs.items():
        if out[obs].tobytes() != want:
            problems.append(name)
    _, caches = net.forward(g_obs, m, p)
    bad_phases = [i + 1 for i, c in enumerate(caches) if c.r[obs].tobytes() != want]
    if bad_phases:
        problems.append(f"phases {bad_phases}")
    zero = net.zero_params(cfg)
    if net.infer(g_obs, m, zero).tobytes() != g_obs.tobytes():
        problems.append("zero-init output")
    traj, _ = net.forward(g_obs, m, zero)
    if any(x.tobytes() != g_obs.tobytes() for x in traj):
        problems.append("zero-init phases")
    ok = not problems
    detail = f"checked {sorted(outputs)} and {len(caches)} phases" + (
        f"; mismatches {problems}" if problems else "")
    assert verdict(8, "observed slices kept bit-exactly", ok, detail)


def _rejects_every_prefix(raw: bytes, reader) -> list[int]:
    leaked = []
    for cut in range(len(raw)):
        try:
            reader(io.BytesIO(raw[:cut]))
        except FormatError:
            continue
        leaked.append(cut)
    return leaked


def test_criterion_9_serialization(verdict, tmp_path):
    rng = np.random.default_rng(9)
    problems = []
    x = rng.standard_normal((5, 3, 4))
    x[0, 0, 0] = -0.0
    x[1, 1, 1] = 5e-324
    buf = io.BytesIO()
    gt.write_gtt(x, buf)
    raw = buf.getvalue()
    if gt.read_gtt(io.BytesIO(raw)).tobytes() != x.tobytes():
        problems.append("GTT1 round trip")
    if _rejects_every_prefix(raw, gt.read_gtt):
        problems.append("GTT1 truncation")
    for corrupt in (b"GTT2" + raw[4:], raw + b"\0"):
        with pytest.raises(FormatError):
            gt.read_gtt(io.BytesIO(corrupt))
    for shared in (True, False):
        cfg = net.NetConfig(3, 4, 5, phases=3, channels=2, share_weights=shared)
        p = net.init_params(cfg)
        for a in p.arrays():
            a += rng.normal(size=a.shape) * 1e-3
        buf = io.BytesIO()
        net.write_model(p, cfg, buf)
        raw = buf.getvalue()
        back, cfg2 = net.read_model(io.BytesIO(raw))
        if cfg2 != cfg or any(a.tobytes() != b.tobytes() for a, b in zip(back.arrays(), p.arrays())):
            problems.append(f"CGTN round trip shared={shared}")
        if _rejects_every_prefix(raw, net.read_model):
            problems.append(f"CGTN truncation shared={shared}")
        for corrupt in (b"XGTN" + raw[4:], raw[:4] + b"\x09" + raw[5:], raw + b"\0"):
            with pytest.raises(FormatError):
                net.read_model(io.BytesIO(corrupt))
    # a failed command writes nothing
    (tmp_path / "bad.gtt").write_bytes(raw[:10])
    rc = cli.main(["complete", "--algo", "tnn-admm", "--tensor", str(tmp_path / "bad.gtt"),
                   "--mask", str(tmp_path / "none.txt"), "--out", str(tmp_path / "out.gtt")])
    if rc == 0 or (tmp_path / "out.gtt").exists():
        problems.append("partial output after rejected input")
    ok = not problems
    detail = "GTT1 and CGTN v1/v2 bit-exact, all truncations rejected" if ok else f"{problems}"
    assert verdict(9, "serialization", ok, detail)
