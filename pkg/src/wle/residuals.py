"""Standardized residuals comparing empirical and model distributions.

The residual compares the empirical distribution function with the model
in the lower tail and the empirical survival function with the model in
the upper tail; observations in the central region get residual zero.
Univariate, bivariate-quadrant and regression-standardized variants share
the same branch logic.
"""

from dataclasses import dataclass

import numpy as np
from scipy.special import ndtr


class ZeroModelTailError(ZeroDivisionError):
    """Model distribution/survival function vanished at an observation."""


@dataclass(frozen=True)
class ResidualConfig:
    """Tail fraction, denominator exponent and family-kind tag.

    `p` is the fraction of either distributional tail eligible for
    downweighting; `beta_exp` = 1 is the primary definition, other values
    are experimental. Boundary convention: F = p falls in the lower-tail
    branch, F = 1 - p in the upper-tail branch.
    """

    p: float = 0.5
    beta_exp: float = 1.0
    kind: str = "univariate"  # univariate | bivariate | regression

    def __post_init__(self):
        if not 0 < self.p <= 0.5:
            raise ValueError("p must be in (0, 0.5]")
        if not self.beta_exp > 0:
            raise ValueError("beta_exp must be positive")
        if self.kind not in ("univariate", "bivariate", "regression"):
            raise ValueError(f"unknown kind {self.kind!r}")


class EmpiricalFunctions:
    """Empirical distribution/survival functions of a fixed sample.

    For univariate data, F_n(x) = #{X_i <= x}/n and S_n(x) = #{X_i >= x}/n
    are evaluated in O(log n) from a sorted copy. For bivariate data the
    four quadrant counters are evaluated by direct counting.
    """

    def __init__(self, data, bivariate=False):
        self.bivariate = bivariate
        if bivariate:
            self._pts = np.asarray(data, dtype=float).reshape(-1, 2)
            self.n = len(self._pts)
        else:
            self._sorted = np.sort(np.asarray(data, dtype=float).ravel())
            self.n = self._sorted.size
        if self.n < 1:
            raise ValueError("need at least one observation")

    def cdf(self, x):
        x = np.atleast_1d(np.asarray(x, dtype=float))
        return np.searchsorted(self._sorted, x, side="right") / self.n

    def survival(self, x):
        x = np.atleast_1d(np.asarray(x, dtype=float))
        return (self.n - np.searchsorted(self._sorted, x, side="left")) / self.n

    def quadrants(self, xy):
        """Empirical quadrant masses (ll, lg, gl, gg) at each point, (n, 4)."""
        xy = np.asarray(xy, dtype=float).reshape(-1, 2)
        X, Y = self._pts[:, 0], self._pts[:, 1]
        lx = X[None, :] <= xy[:, 0:1]
        gx = X[None, :] >= xy[:, 0:1]
        ly = Y[None, :] <= xy[:, 1:2]
        gy = Y[None, :] >= xy[:, 1:2]
        n = self.n
        return np.column_stack([
            (lx & ly).sum(axis=1) / n,
            (lx & gy).sum(axis=1) / n,
            (gx & ly).sum(axis=1) / n,
            (gx & gy).sum(axis=1) / n,
        ])


def _tau_branch(Fn, Sn, F, S, p, beta_exp, strict=True):
    """Three-branch residual, vectorized. With strict=False a vanished model
    tail yields +inf (weight functions map it to zero) instead of raising."""
    F = np.asarray(F, dtype=float)
    S = np.asarray(S, dtype=float)
    lower = F <= p
    upper = F >= 1.0 - p
    tau = np.zeros_like(F)
    if strict and (np.any(lower & (F == 0)) or np.any(upper & (S == 0))):
        raise ZeroModelTailError("model tail probability underflowed to zero")
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        tl = Fn / F**beta_exp - 1.0
        tu = Sn / S**beta_exp - 1.0
    tau[lower] = np.where(np.isfinite(tl[lower]), tl[lower], np.inf)
    tau[upper] = np.where(np.isfinite(tu[upper]), tu[upper], np.inf)
    return tau


def tau_univariate(config, empirical, family, theta, x):
    """Residual at points x for a univariate family.

    Lower tail (F_theta <= p): F_n/F_theta^beta - 1. Upper tail
    (F_theta >= 1-p): S_n/S_theta^beta - 1. Zero in between.
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    F, S = family.cdf_survival(theta, x)
    return _tau_branch(empirical.cdf(x), empirical.survival(x), F, S,
                       config.p, config.beta_exp)


def tau_bivariate(config, empirical, family, theta, xy):
    """Residual from the quadrant with the smallest model probability.

    Ties at the minimum are broken in the fixed order ll, lg, gl, gg.
    """
    xy = np.asarray(xy, dtype=float).reshape(-1, 2)
    model_q = family.quadrant_probabilities(theta, xy)
    emp_q = empirical.quadrants(xy)
    pick = np.argmin(model_q, axis=1)  # argmin keeps the first of tied minima
    rows = np.arange(len(xy))
    pm = model_q[rows, pick]
    if np.any(pm < 1e-300):
        raise ZeroModelTailError("minimal quadrant probability underflowed")
    return emp_q[rows, pick] / pm**config.beta_exp - 1.0


def tau_regression(config, z_sample, z):
    """Residual for standardized regression residuals against Phi.

    `z_sample` are the standardized residuals at the current parameter;
    they provide the empirical functions, while the model functions are
    the standard normal distribution and survival functions.
    """
    z = np.atleast_1d(np.asarray(z, dtype=float))
    emp = EmpiricalFunctions(z_sample)
    return _tau_branch(emp.cdf(z), emp.survival(z), ndtr(z), ndtr(-z),
                       config.p, config.beta_exp)


def tau_for_sample(config, family, theta, data, empirical=None, strict=False):
    """Residuals of every observation in `data` under `family` at `theta`.

    This is the solver-facing path: model tails that underflow give +inf
    residuals rather than raising, so extreme outliers simply receive
    weight zero.
    """
    if config.kind == "bivariate":
        if empirical is None:
            empirical = EmpiricalFunctions(data, bivariate=True)
        xy = np.asarray(data, dtype=float).reshape(-1, 2)
        model_q = family.quadrant_probabilities(theta, xy)
        emp_q = empirical.quadrants(xy)
        pick = np.argmin(model_q, axis=1)
        rows = np.arange(len(xy))
        pm = model_q[rows, pick]
        with np.errstate(divide="ignore", invalid="ignore"):
            tau = emp_q[rows, pick] / pm**config.beta_exp - 1.0
        return np.where(np.isfinite(tau), tau, np.inf)
    if config.kind == "regression":
        z = family.residuals(theta, data)
        emp = EmpiricalFunctions(z)
        return _tau_branch(emp.cdf(z), emp.survival(z), ndtr(z), ndtr(-z),
                           config.p, config.beta_exp, strict=strict)
    if empirical is None:
        empirical = EmpiricalFunctions(data)
    x = np.atleast_1d(np.asarray(data, dtype=float))
    F, S = family.cdf_survival(theta, x)
    return _tau_branch(empirical.cdf(x), empirical.survival(x), F, S,
                       config.p, config.beta_exp, strict=strict)
