import math

import numpy as np
import pytest

import gpdistill as gd


def toy():
    xs, ys = gd.regression_toy(0)
    return xs, ys, gd.KernelParams(1.0, 1.0, 0.0)


def test_gpr_matches_dense_formula():
    xs, ys, p = toy()
    m = gd.fit_gpr(xs, ys, p, 0.1)
    k = gd.gram(xs, p)
    test = np.linspace(-1, 11, 7)
    ks = gd.cross_gram(test, xs, p)
    expected = ks @ np.linalg.solve(k + 0.1 * np.eye(len(xs)), ys)
    np.testing.assert_allclose(m.predict_mean(test), expected, rtol=1e-9, atol=1e-12)
    pred = m.predict(test)
    assert pred.cov.shape == (7, 7)
    assert np.all(pred.lower() <= pred.upper())


def test_data_centric_paths_agree():
    xs, ys, p = toy()
    gammas = list(np.linspace(0.1, 1.0, 10))
    fast = gd.DataCentricGpr(xs, ys, p, gammas)
    naive = gd.DataCentricGpr(xs, ys, p, gammas, path="naive")
    assert fast.steps == 10
    np.testing.assert_allclose(fast.targets(1), ys)
    np.testing.assert_allclose(fast.targets(11), naive.targets(11), rtol=1e-10, atol=1e-12)


def test_distribution_centric_forms_agree():
    xs, ys, p = toy()
    gammas = [0.5, 0.2, 1.0]
    test = np.array([0.3, 4.0, 9.5])
    a = gd.distribution_centric_closed_form(xs, ys, p, gammas, 3, test)
    b = gd.distribution_centric_recursive(xs, ys, p, gammas, 3, test)
    np.testing.assert_allclose(a.mean, b.mean, rtol=1e-10, atol=1e-12)
    np.testing.assert_allclose(a.cov, b.cov, rtol=1e-10, atol=1e-12)


def test_effective_noise():
    _, eff = gd.effective_noise(list(np.linspace(0.1, 1.0, 10)), 10)
    assert abs(eff - 0.034) <= 1e-3


def test_continuous_bernoulli():
    assert gd.cb_normalizer(0.5) == 2.0
    log_c, d1, d2 = gd.cb_terms(0.0)
    assert math.isclose(log_c, math.log(2.0))
    assert d1 == 0.0
    assert math.isclose(d2, 1.0 / 6.0)
    xs = np.linspace(0, 1, 20001)
    dens = np.exp([gd.cb_log_density(x, 0.8) for x in xs])
    assert abs(np.trapezoid(dens, xs) - 1.0) < 1e-6


def test_gpc_and_distillation():
    xs, ys, _ = gd.classification_toy(0)
    p = gd.KernelParams(4.0, 1.0)
    m = gd.fit_gpc(xs, ys, p)
    test = np.linspace(-2, 7, 9)
    prob = m.predict_proba(test)
    assert np.all((prob > 0) & (prob < 1))
    assert m.psi_trace == sorted(m.psi_trace)

    chain = gd.data_centric_gpc(xs, ys, p, 3)
    assert len(chain) == 3

    it = gd.distribution_centric_gpc_iterated(xs, ys, p, 3)
    sc = [gd.distribution_centric_gpc_scaled(xs, ys, p, t) for t in range(1, 4)]
    err = gd.approximation_error(it, sc, test, method="latent_mean")
    assert err[0] == 0.0
    assert len(err) == 3


def test_grid_search():
    xs, ys, _ = toy()
    best, nll = gd.grid_search(xs, ys, [0.5, 1.0, 2.0], [0.5, 1.0], [0.1, 1.0])
    assert len(nll) == 12
    assert best["nll"] == min(nll)


def test_errors():
    xs = np.array([0.0, 0.0])
    with pytest.raises(gd.NumericalError):
        gd.fit_gpr(xs, np.array([1.0, 2.0]), gd.KernelParams(1.0, 1.0, 0.0), 0.0)
    with pytest.raises(gd.InvalidArgument):
        gd.fit_gpc(xs, np.array([0.0, 1.0]), gd.KernelParams(), likelihood="nope")
    with pytest.raises(gd.InvalidArgument):
        gd.run_experiment("nope", "/tmp/unused")


def test_run_experiment(tmp_path):
    assert "cb-plots" in gd.experiment_ids()
    files = gd.run_experiment("cb-plots", tmp_path)
    assert (tmp_path / "manifest.json").exists()
    assert len(files) >= 3
