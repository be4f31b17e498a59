import io

import numpy as np
import pytest

from gtnet import data as dio
from gtnet import graph as gr
from gtnet import solvers as sv
from gtnet import tensor as gt
from gtnet.errors import ParseError, ValidationError


def low_rank_case(n1=10, n2=10, n3=12, rank=2, rate=0.2, seed=0, kind="laplacian", p=0.4):
    g = gr.erdos_renyi(n3, p, seed)
    t = gr.spectral_transform(g if kind != "cycle-dct" else n3, kind)
    truth = dio.spectral_low_rank(n1, n2, t, rank, np.random.default_rng(seed))
    m = dio.sample_mask(n3, rate, seed)
    return truth, m, t


# -- masks and projections -------------------------------------------------------------


def test_mask_validation():
    with pytest.raises(ValidationError):
        sv.ObservationMask(3, (0, 0))
    with pytest.raises(ValidationError):
        sv.ObservationMask(3, (3,))
    m = sv.ObservationMask(5, (4, 0, 2))
    assert m.observed == (0, 2, 4) and m.missing == (1, 3)
    assert len(m.observed) + len(m.missing) == m.n3


def test_mask_file_round_trip():
    m = sv.ObservationMask(7, (1, 2, 6))
    buf = io.StringIO()
    m.write(buf)
    assert buf.getvalue() == "n3 7\n1 2 6\n"
    assert sv.ObservationMask.read(io.StringIO(buf.getvalue())) == m


@pytest.mark.parametrize("text", ["", "nodes 3\n0\n", "n3 x\n", "n3 3\n0 a\n"])
def test_mask_file_malformed(text):
    with pytest.raises(ParseError):
        sv.ObservationMask.read(io.StringIO(text))


def test_project_cases(rng):
    x = rng.standard_normal((3, 2, 2))
    full = sv.ObservationMask.full(3)
    np.testing.assert_array_equal(sv.project(x, full), x)
    m = sv.ObservationMask(3, (0,))
    out = sv.project(x, m)
    np.testing.assert_array_equal(out[0], x[0])
    assert not np.any(out[1:])
    np.testing.assert_array_equal(sv.project(x, m) + sv.project(x, m, "missing"), x)
    with pytest.raises(ValidationError):
        sv.project(x, sv.ObservationMask.full(4))


def test_impute_step_cases(rng):
    g = rng.standard_normal((4, 3, 3))
    m = sv.ObservationMask(4, (1, 3))
    g_obs = sv.observe(g, m)
    r1 = sv.impute_step(np.zeros_like(g), g_obs, m)
    np.testing.assert_array_equal(r1, g_obs)
    x_prev = rng.standard_normal(g.shape)
    r = sv.impute_step(x_prev, g_obs, m)
    np.testing.assert_array_equal(r[[1, 3]], g_obs[[1, 3]])
    np.testing.assert_array_equal(r[[0, 2]], x_prev[[0, 2]])
    np.testing.assert_array_equal(sv.impute_step(r, g_obs, m), r)
    full = sv.ObservationMask.full(4)
    np.testing.assert_array_equal(sv.impute_step(x_prev, g, full), g)
    with pytest.raises(ValidationError):
        sv.impute_step(x_prev[:, :2], g_obs, m)


# -- imputation -----------------------------------------------------------------------


def test_imputation_nothing_missing(rng):
    x = rng.standard_normal((5, 3, 3))
    t = gr.spectral_transform(gr.erdos_renyi(5, 0.5, 0))
    out, rep = sv.imputation_solve(x, sv.ObservationMask.full(5), t, truth=x)
    assert rep.iterations == 1
    np.testing.assert_array_equal(out, x)
    assert rep.final_mse == 0.0


def test_imputation_recovers_low_rank():
    truth, m, t = low_rank_case(16, 16, 30, rate=0.2, seed=1, p=0.2)
    out, rep = sv.imputation_solve(sv.observe(truth, m), m, t, truth=truth)
    assert sv.relative_missing_error(out, truth, m) < 1e-3
    assert rep.iterations <= 500


def test_imputation_fidelity_and_report_shape():
    truth, m, t = low_rank_case(seed=3)
    g_obs = sv.observe(truth, m)
    out, rep = sv.imputation_solve(g_obs, m, t, truth=truth)
    obs = list(m.observed)
    assert out[obs].tobytes() == g_obs[obs].tobytes()
    assert len(rep.residual_history) == rep.iterations
    assert all(r >= 0 for r in rep.residual_history)
    assert rep.wall_time >= 0
    assert set(rep.to_dict()) == {"iterations", "final_mse", "residual_history", "wall_time"}


def test_imputation_zero_thresholds_fixed_point():
    truth, m, t = low_rank_case(seed=4, rate=0.3)
    g_obs = sv.observe(truth, m)
    cfg = sv.ImputationConfig(fixed_lambdas=np.zeros(m.n3), max_iters=10)
    out, rep = sv.imputation_solve(g_obs, m, t, cfg)
    np.testing.assert_allclose(out, g_obs, atol=1e-12)
    assert out[list(m.observed)].tobytes() == g_obs[list(m.observed)].tobytes()
    assert not np.any(np.abs(out[list(m.missing)]) > 1e-12)
    # X^1 = R^1 up to roundoff, X^2 = X^1: stops at iteration 2
    assert rep.iterations == 2


def test_imputation_residual_monotone_after_warmup():
    truth, m, t = low_rank_case(12, 12, 20, seed=5, rate=0.3)
    _, rep = sv.imputation_solve(sv.observe(truth, m), m, t)
    h = np.array(rep.residual_history[5:])
    assert np.all(np.diff(h) <= 1e-12)


def test_imputation_deterministic():
    truth, m, t = low_rank_case(seed=6)
    g_obs = sv.observe(truth, m)
    a, ra = sv.imputation_solve(g_obs, m, t)
    b, rb = sv.imputation_solve(g_obs, m, t)
    assert a.tobytes() == b.tobytes()
    assert ra.residual_history == rb.residual_history and ra.iterations == rb.iterations


def test_imputation_bad_inputs():
    truth, m, t = low_rank_case()
    with pytest.raises(ValidationError):
        sv.imputation_solve(truth, m, t, sv.ImputationConfig(max_iters=0))
    with pytest.raises(ValidationError):
        sv.imputation_solve(truth[:-1], m, t)


def test_imputation_iterations_grow_with_missing_rate():
    counts = {}
    for rate in (0.1, 0.5, 0.8):
        its = []
        for trial in range(5):
            truth, m, t = low_rank_case(16, 16, 30, rate=rate, seed=trial, p=0.2)
            its.append(sv.imputation_solve(sv.observe(truth, m), m, t)[1].iterations)
        counts[rate] = float(np.median(its))
    assert counts[0.1] <= counts[0.5] <= counts[0.8]


# -- TNN-ADMM --------------------------------------------------------------------------


def test_admm_nothing_missing(rng):
    x = rng.standard_normal((6, 3, 3))
    out, rep = sv.tnn_admm_solve(x, sv.ObservationMask.full(6))
    np.testing.assert_array_equal(out, x)
    assert rep.iterations == 1


def test_admm_recovers_cycle_low_rank():
    truth, m, _ = low_rank_case(10, 10, 16, rate=0.2, seed=2, kind="cycle-dct")
    out, rep = sv.tnn_admm_solve(sv.observe(truth, m), m, truth=truth)
    assert sv.relative_missing_error(out, truth, m) < 1e-2
    g_obs = sv.observe(truth, m)
    assert out[list(m.observed)].tobytes() == g_obs[list(m.observed)].tobytes()
    assert len(rep.residual_history) == rep.iterations


def test_admm_not_better_than_imputation_on_graph_data():
    imp, adm = [], []
    for seed in range(5):
        truth, m, t = low_rank_case(12, 12, 20, rate=0.2, seed=seed, p=0.3)
        g_obs = sv.observe(truth, m)
        imp.append(sv.imputation_solve(g_obs, m, t, truth=truth)[1].final_mse)
        adm.append(sv.tnn_admm_solve(g_obs, m, truth=truth)[1].final_mse)
    assert np.median(imp) <= np.median(adm)


def test_missing_mse_normalization():
    truth = np.zeros((4, 2, 3))
    x = np.zeros_like(truth)
    x[1] = 2.0
    m = sv.ObservationMask(4, (0, 2, 3))
    assert sv.missing_mse(x, truth, m) == 4.0
    assert sv.missing_mse(x, truth, sv.ObservationMask.full(4)) == 0.0
