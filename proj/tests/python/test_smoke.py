"""Smoke tests for the Python bindings."""

import numpy as np
import pytest

import _parsec as m


@pytest.fixture
def data():
    rng = np.random.default_rng(7)
    return rng.normal(size=(12, 50))


def test_uscores_preserve_correlations(data):
    u = m.uscores(data)
    assert u.shape == (11, 50)
    assert np.allclose(u.T @ u, np.corrcoef(data.T), atol=1e-12)


def test_methods_agree(data):
    hb = m.partial_correlations(data, "parsec-base")
    hs = m.partial_correlations(data, "parsec-scalable", threads=2)
    assert np.abs(hb - hs).max() < 1e-8
    hub = m.partial_correlations(data, "pcs-hub")
    assert np.allclose(hub, hub.T)
    assert np.allclose(np.diag(hub), 1.0)


def test_pvalues_and_levels():
    assert m.cap_probability(0.3, 4) == pytest.approx(0.7, abs=1e-12)
    rho = m.level_for_cap(0.05, 10)
    assert m.cap_probability(rho, 10) == pytest.approx(0.05, abs=1e-9)
    lvl = m.control_level("fwer", 0.05, 0, 30, 1000)
    assert 0 < lvl["rho"] < 1
    assert not lvl["vacuous"]


def test_screen_controls(data):
    h = m.partial_correlations(data, "parsec-scalable")
    n = data.shape[0]
    raw = m.screen(h, n, control="rho", rho=0.8)
    assert all(e[0] < e[1] for e in raw["edges"])
    bh = m.screen(h, n, control="fdr-bh", alpha=0.2)
    pf = m.screen(h, n, control="pfdr", alpha=0.2)
    assert len(pf["edges"]) <= len(bh["edges"])


def test_simulate_and_auc():
    sim = m.simulate("ar-block", 20, 80, a=40, d=1, phi1=0.8, seed=3)
    again = m.simulate("ar-block", 20, 80, a=40, d=1, phi1=0.8, seed=3)
    assert np.array_equal(sim["x"], again["x"])
    assert len(sim["true_edges"]) == 39
    h = m.partial_correlations(sim["x"])
    assert m.auc(h, sim["true_edges"]) > 0.8


def test_estimation_and_weights():
    sim = m.simulate("star-disconnected", 40, 12, k_stars=3, e=2, c=-0.35,
                     seed=11)
    s = np.cov(sim["x"].T)
    fit = m.estimate_precision(s, sim["true_edges"], "gaussian")
    assert fit["converged"]
    # Inactive off-diagonal entries of the precision estimate are zero.
    active = {tuple(e) for e in sim["true_edges"]}
    for i in range(12):
        for j in range(i + 1, 12):
            if (i, j) not in active:
                assert abs(fit["omega"][i, j]) < 1e-6
    w = m.mvp_weights(fit["omega"])
    assert w.sum() == pytest.approx(1.0, abs=1e-15)


def test_errors_are_exceptions():
    with pytest.raises(ValueError):
        m.cap_probability(1.5, 10)
    with pytest.raises(ValueError):
        m.partial_correlations(np.eye(5), "nonsense")
