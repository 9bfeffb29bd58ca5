"""Closed-form family quantities against scipy/numpy oracles."""

import numpy as np
import pytest
import scipy.stats as st
from scipy.integrate import quad

from wle.bvn import bvn_cdf
from wle.families import (DegenerateFitError, DomainError, FAMILIES,
                          concentration_ellipse, ellipse_polyline, get_family)


def test_registry():
    assert set(FAMILIES) == {"poisson", "normal", "exponential",
                             "normal_location", "bivariate_normal",
                             "normal_regression"}
    with pytest.raises(KeyError):
        get_family("cauchy")


def test_poisson_closed_forms():
    fam = get_family("poisson")
    theta = np.array([2.5])
    x = np.arange(0, 8, dtype=float)
    np.testing.assert_allclose(fam.pmf(theta, x), st.poisson.pmf(x, 2.5),
                               rtol=1e-12)
    F, S = fam.cdf_survival(theta, x)
    np.testing.assert_allclose(F, st.poisson.cdf(x, 2.5), rtol=1e-12)
    # survival uses X >= x, so F + S = 1 + P(X = x)
    np.testing.assert_allclose(F + S, 1.0 + st.poisson.pmf(x, 2.5),
                               rtol=1e-12)
    np.testing.assert_allclose(fam.score(theta, x)[:, 0], x / 2.5 - 1.0)
    assert fam.mle([1.0, 2.0, 6.0])[0] == pytest.approx(3.0)
    assert fam.fisher_information(theta)[0, 0] == pytest.approx(1 / 2.5)
    total = fam.pmf(theta, np.arange(0, 60, dtype=float)).sum()
    assert total == pytest.approx(1.0, abs=1e-6)


def test_normal_closed_forms():
    fam = get_family("normal")
    theta = np.array([1.0, 4.0])
    x = np.array([-2.0, 1.0, 3.5])
    F, S = fam.cdf_survival(theta, x)
    np.testing.assert_allclose(F, st.norm.cdf(x, 1.0, 2.0), rtol=1e-12)
    np.testing.assert_allclose(F + S, 1.0, rtol=1e-12)
    w = np.array([1.0, 2.0, 0.5])
    fit = fam.weighted_fit(x, w)
    mu = w @ x / w.sum()
    assert fit[0] == pytest.approx(mu)
    assert fit[1] == pytest.approx(w @ (x - mu) ** 2 / w.sum())
    info = fam.fisher_information(theta)
    np.testing.assert_allclose(info, [[1 / 4.0, 0.0], [0.0, 1 / 32.0]],
                               rtol=1e-10)
    area = quad(lambda t: fam.pdf(theta, t)[0], -30, 30, limit=200)[0]
    assert area == pytest.approx(1.0, abs=1e-6)


def test_exponential_closed_forms():
    fam = get_family("exponential")
    theta = np.array([0.5])
    x = np.array([0.1, 2.0, 9.0])
    F, S = fam.cdf_survival(theta, x)
    np.testing.assert_allclose(F, st.expon.cdf(x, scale=2.0), rtol=1e-12)
    np.testing.assert_allclose(S, st.expon.sf(x, scale=2.0), rtol=1e-12)
    w = np.array([2.0, 1.0, 1.0])
    assert fam.weighted_fit(x, w)[0] == pytest.approx(w.sum() / (w @ x))
    assert fam.fisher_information(theta)[0, 0] == pytest.approx(4.0)
    with pytest.raises(DomainError):
        fam.check_params(np.array([-1.0]))


def test_normal_location_fit_is_weighted_mean():
    fam = get_family("normal_location")
    x = np.array([0.0, 1.0, 5.0])
    w = np.array([1.0, 1.0, 0.0])
    assert fam.weighted_fit(x, w)[0] == pytest.approx(0.5)
    assert fam.fisher_information([0.0])[0, 0] == 1.0
    np.testing.assert_allclose(fam.score([1.0], x)[:, 0], x - 1.0)


def test_bvn_cdf_against_scipy():
    rng = np.random.default_rng(7)
    mvn = st.multivariate_normal
    for rho in (-0.95, -0.3, 0.0, 0.5, 0.9):
        cov = [[1.0, rho], [rho, 1.0]]
        hk = rng.uniform(-2.5, 2.5, size=(12, 2))
        ours = bvn_cdf(hk[:, 0], hk[:, 1], rho)
        ref = np.array([mvn.cdf(p, mean=[0, 0], cov=cov) for p in hk])
        np.testing.assert_allclose(ours, ref, atol=5e-9)


def test_bivariate_quadrants_sum_to_one():
    fam = get_family("bivariate_normal")
    theta = np.array([0.5, -1.0, 2.0, 0.5, 0.4])
    xy = np.array([[0.0, 0.0], [1.5, -2.0], [-3.0, 1.0]])
    q = fam.quadrant_probabilities(theta, xy)
    np.testing.assert_allclose(q.sum(axis=1), 1.0, atol=1e-10)
    assert np.all(q > 0)


def test_bivariate_weighted_fit_matches_numpy():
    rng = np.random.default_rng(5)
    xy = rng.normal(size=(60, 2)) @ np.array([[1.0, 0.3], [0.0, 0.8]])
    fam = get_family("bivariate_normal")
    fit = fam.mle(xy)
    mu = xy.mean(axis=0)
    cov = np.cov(xy.T, bias=True)
    np.testing.assert_allclose(fit[:2], mu, rtol=1e-10)
    assert fit[2] == pytest.approx(cov[0, 0])
    assert fit[3] == pytest.approx(cov[1, 1])
    assert fit[4] == pytest.approx(cov[0, 1] / np.sqrt(cov[0, 0] * cov[1, 1]))


def test_bivariate_score_zero_at_mle():
    rng = np.random.default_rng(6)
    xy = rng.normal(size=(40, 2))
    fam = get_family("bivariate_normal")
    u = fam.score(fam.mle(xy), xy)
    np.testing.assert_allclose(u.sum(axis=0), 0.0, atol=1e-8)


def test_regression_weighted_fit_matches_lstsq():
    rng = np.random.default_rng(8)
    x = rng.uniform(0, 10, 50)
    y = 2.0 + 0.7 * x + rng.normal(0, 1.2, 50)
    w = rng.uniform(0.1, 1.0, 50)
    fam = get_family("normal_regression")
    fit = fam.weighted_fit(np.column_stack([x, y]), w)
    X = np.column_stack([np.ones(50), x])
    beta_ref = np.linalg.lstsq(X * np.sqrt(w)[:, None],
                               y * np.sqrt(w), rcond=None)[0]
    np.testing.assert_allclose(fit[:2], beta_ref, rtol=1e-10)
    e = y - X @ fit[:2]
    assert fit[2] == pytest.approx(np.sqrt(w @ (e * e) / w.sum()))


def test_regression_score_zero_at_fit():
    rng = np.random.default_rng(9)
    x = rng.uniform(0, 5, 30)
    y = 1.0 - 0.5 * x + rng.normal(0, 0.3, 30)
    fam = get_family("normal_regression")
    xy = np.column_stack([x, y])
    u = fam.score(fam.mle(xy), xy)
    np.testing.assert_allclose(u.sum(axis=0), 0.0, atol=1e-8)


def test_degenerate_weight_collapse():
    fam = get_family("normal")
    with pytest.raises(DegenerateFitError):
        fam.weighted_fit(np.array([1.0, 2.0]), np.array([1e-14, 1e-14]))


def test_concentration_ellipse_mahalanobis():
    theta = np.array([1.0, -2.0, 2.0, 0.5, 0.6])
    pts = ellipse_polyline(theta, coverage=0.95, num=64)
    cov = np.array([[2.0, 0.6 * np.sqrt(1.0)], [0.6 * np.sqrt(1.0), 0.5]])
    inv = np.linalg.inv(cov)
    d = pts - np.array([1.0, -2.0])
    m2 = np.einsum("ij,jk,ik->i", d, inv, d)
    np.testing.assert_allclose(m2, st.chi2.ppf(0.95, 2), rtol=1e-8)
    with pytest.raises(ValueError):
        concentration_ellipse(theta, coverage=1.5)


def test_score_matches_numeric_gradient_of_logpdf():
    # spot-check the normal score against finite differences
    fam = get_family("normal")
    theta = np.array([0.3, 1.7])
    x = np.array([1.4])

    def logpdf(th):
        return np.log(fam.pdf(th, x))[0]

    h = 1e-6
    for j in range(2):
        tp, tm = theta.copy(), theta.copy()
        tp[j] += h
        tm[j] -= h
        num = (logpdf(tp) - logpdf(tm)) / (2 * h)
        assert fam.score(theta, x)[0, j] == pytest.approx(num, abs=1e-5)
