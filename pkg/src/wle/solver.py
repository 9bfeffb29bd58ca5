"""Weighted-likelihood estimating equation solver and multi-root search.

The estimating equation sum_i w_i(theta) u_theta(X_i) = 0 is solved by
iteratively reweighted closed-form estimation: freeze the weights at the
current parameter, solve the weighted likelihood equation in closed form,
repeat. Multiple roots are enumerated by restarting from MLEs of small
bootstrap subsamples, deduplicated, and ranked by total weight.
"""

from dataclasses import dataclass, field

import numpy as np

from .families import DegenerateFitError
from .residuals import EmpiricalFunctions, tau_for_sample

SCORE_RESIDUAL_TOL = 1e-6  # converged roots satisfy ||sum w u||_inf < tol * n

# smallest subsample that identifies each family's parameters
_MIN_SUBSAMPLE = {"poisson": 2, "normal": 2, "exponential": 2,
                  "normal_location": 2, "bivariate_normal": 3,
                  "normal_regression": 3}


@dataclass(frozen=True)
class SolverConfig:
    tol: float = 1e-8              # relative parameter change
    max_iter: int = 500
    bootstrap_b: int = 50          # number of bootstrap restarts
    bootstrap_m: int = 3           # bootstrap subsample size
    root_tol: float = 1e-4         # relative sup-norm for root identity
    min_weight_share: float = 0.25 # share of combined root weight needed for
                                   # the second root to win selection
    eligibility_share: float = 0.0 # roots below this share of n are kept in
                                   # the report but never win selection
    seed: int = 0

    def __post_init__(self):
        if self.bootstrap_b < 1:
            raise ValueError("bootstrap restart count must be >= 1")
        if self.bootstrap_m < 2:
            raise ValueError("bootstrap subsample size must be >= 2")
        if not 0 < self.min_weight_share < 1:
            raise ValueError("minimum weight share must be in (0, 1)")
        if not 0 <= self.eligibility_share < 1:
            raise ValueError("eligibility share must be in [0, 1)")


@dataclass
class Root:
    theta: np.ndarray
    weights: np.ndarray
    weight_sum: float
    iterations: int
    converged: bool
    score_residual: float

    def summary(self):
        return {
            "theta": [float(v) for v in self.theta],
            "weight_sum": self.weight_sum,
            "iterations": self.iterations,
            "converged": self.converged,
            "score_residual": self.score_residual,
        }


@dataclass
class RootSet:
    roots: list            # distinct converged roots, weight sum descending
    selected_index: int
    n: int                 # sample size
    selection_rule: str = "highest"
    n_restarts: int = 0
    n_failed: int = 0
    n_skipped_subsamples: int = 0
    non_converged: list = field(default_factory=list)

    @property
    def selected(self):
        return self.roots[self.selected_index]


def _rel_change(new, old):
    return np.max(np.abs(new - old)) / (1.0 + np.max(np.abs(old)))


def _score_residual(family, data, theta, w):
    u = family.score(theta, data)
    return float(np.max(np.abs(w @ u)))


def solve_from(family, data, residual_config, weight_spec, solver_config,
               theta0, empirical=None):
    """Iterate the reweighted closed-form step from a single start.

    Returns a Root; non-convergence is flagged, not raised. A collapse of
    the total weight below 1e-12 raises DegenerateFitError.
    """
    theta = np.asarray(theta0, dtype=float).copy()
    family.check_params(theta)
    if empirical is None and residual_config.kind != "regression":
        empirical = EmpiricalFunctions(
            data, bivariate=residual_config.kind == "bivariate")
    converged = False
    iterations = 0
    w = resid = None
    for it in range(solver_config.max_iter):
        tau = tau_for_sample(residual_config, family, theta, data, empirical)
        w = weight_spec.weight(tau)
        theta_new = family.weighted_fit(data, w)
        delta = _rel_change(theta_new, theta)
        theta = theta_new
        iterations = it + 1
        if delta >= solver_config.tol:
            resid = None
            continue
        # parameter change is small; accept only once the weighted score
        # itself is solved (ill-scaled parameters need extra iterations)
        tau = tau_for_sample(residual_config, family, theta, data, empirical)
        w = weight_spec.weight(tau)
        resid = _score_residual(family, data, theta, w)
        if resid < SCORE_RESIDUAL_TOL * len(w):
            converged = True
            break
        if delta == 0.0:
            break  # stalled at the numerical fixed point
    if resid is None:
        tau = tau_for_sample(residual_config, family, theta, data, empirical)
        w = weight_spec.weight(tau)
        resid = _score_residual(family, data, theta, w)
    return Root(theta=theta, weights=w, weight_sum=float(w.sum()),
                iterations=iterations, converged=converged,
                score_residual=resid)


def _solve_batch(family, x, residual_config, weight_spec, solver_config,
                 theta0s):
    """Vectorized fixed-point iteration over many starts (univariate only).

    Rows that hit a degenerate weighted fit turn to NaN and are reported
    as failures. Returns a list of Root-or-None, aligned with theta0s.
    """
    x = np.asarray(x, dtype=float)
    emp = EmpiricalFunctions(x)
    Fn, Sn = emp.cdf(x), emp.survival(x)
    p, beta_exp = residual_config.p, residual_config.beta_exp
    thetas = np.asarray(theta0s, dtype=float).copy()
    nstart, d = thetas.shape
    iters = np.zeros(nstart, dtype=int)
    done = np.zeros(nstart, dtype=bool)
    conv = np.zeros(nstart, dtype=bool)

    def _tau(th):
        F, S = family.cdf_batch(th, x)
        lower = F <= p
        upper = F >= 1.0 - p
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            tl = Fn[None, :] / F**beta_exp - 1.0
            tu = Sn[None, :] / S**beta_exp - 1.0
        tau = np.zeros_like(F)
        tau[lower] = tl[lower]
        tau[upper] = tu[upper]
        return np.where(np.isnan(tau), np.inf, tau)

    for it in range(solver_config.max_iter):
        active = ~done
        if not np.any(active):
            break
        th = thetas[active]
        w = weight_spec.weight(_tau(th))
        new = family.weighted_fit_batch(x, w)
        bad = np.any(np.isnan(new), axis=1)
        delta = (np.max(np.abs(new - th), axis=1)
                 / (1.0 + np.max(np.abs(th), axis=1)))
        hit = bad | (delta < solver_config.tol)
        idx = np.flatnonzero(active)
        thetas[idx] = np.where(bad[:, None], th, new)
        iters[idx[hit]] = it + 1
        done[idx[hit]] = True
        conv[idx[hit & ~bad]] = True
        done[idx[bad]] = True
    iters[~done] = solver_config.max_iter

    roots = []
    for i in range(nstart):
        th = thetas[i]
        if np.any(np.isnan(th)):
            roots.append(None)
            continue
        w = weight_spec.weight(_tau(th[None, :]))[0]
        resid = _score_residual(family, x, th, w)
        ok = conv[i] and resid < SCORE_RESIDUAL_TOL * x.size
        roots.append(Root(theta=th, weights=w, weight_sum=float(w.sum()),
                          iterations=int(iters[i]), converged=bool(ok),
                          score_residual=resid))
    return roots


def _same_root(t1, t2, tol):
    return (np.max(np.abs(t1 - t2)) / (1.0 + np.max(np.abs(t1)))) < tol


def cluster_roots(roots, root_tol):
    """Deduplicate converged roots; keep the highest-weight representative."""
    distinct = []
    for r in sorted(roots, key=lambda r: -r.weight_sum):
        if not any(_same_root(r.theta, d.theta, root_tol) for d in distinct):
            distinct.append(r)
    return distinct


def _subsample_starts(family, data, solver_config):
    """MLE starting values from seeded with-replacement subsamples."""
    n = len(data)
    m = max(solver_config.bootstrap_m, _MIN_SUBSAMPLE[family.name])
    starts, skipped = [], 0
    for i in range(solver_config.bootstrap_b):
        ss = np.random.SeedSequence(solver_config.seed, spawn_key=(i,))
        rng = np.random.Generator(np.random.Philox(ss))
        idx = rng.integers(0, n, size=m)
        sub = data[idx] if isinstance(data, np.ndarray) else np.asarray(data)[idx]
        try:
            starts.append(family.mle(sub))
        except (DegenerateFitError, np.linalg.LinAlgError):
            skipped += 1
    return starts, skipped


def _choose_index(roots, n, solver_config):
    """Selection rule on a weight-ordered root list.

    Roots carrying less than eligibility_share * n total weight never win.
    Among the eligible roots, the second-highest weight sum wins when it
    holds at least min_weight_share of their combined weight; otherwise
    the highest does.
    """
    eligible = [i for i, r in enumerate(roots)
                if r.weight_sum >= solver_config.eligibility_share * n]
    if not eligible:
        return 0, "highest"
    total = sum(roots[i].weight_sum for i in eligible)
    if (len(eligible) >= 2 and roots[eligible[1]].weight_sum
            >= solver_config.min_weight_share * total):
        return eligible[1], "second-highest"
    return eligible[0], "highest"


def build_root_set(roots, n, solver_config, **counters):
    """Cluster, rank and apply the root-selection rule."""
    converged = [r for r in roots if r is not None and r.converged]
    non_conv = cluster_roots(
        [r for r in roots if r is not None and not r.converged],
        solver_config.root_tol)
    distinct = cluster_roots(converged, solver_config.root_tol)
    if not distinct:
        raise DegenerateFitError("no converged roots found")
    selected, rule = _choose_index(distinct, n, solver_config)
    return RootSet(roots=distinct, selected_index=selected, n=n,
                   selection_rule=rule, non_converged=non_conv, **counters)


def bootstrap_root_search(family, data, residual_config, weight_spec,
                          solver_config):
    """Enumerate distinct roots via bootstrap-subsample MLE restarts.

    The full-sample MLE is always included as an extra start, so the
    MLE-like root cannot be missed by unlucky subsampling.
    """
    data = np.asarray(data, dtype=float)
    n = len(data)
    m = max(solver_config.bootstrap_m, _MIN_SUBSAMPLE[family.name])
    if n < m:
        raise ValueError("sample smaller than the bootstrap subsample size")
    starts, skipped = _subsample_starts(family, data, solver_config)
    starts.insert(0, family.mle(data))

    batched = (residual_config.kind == "univariate"
               and hasattr(family, "weighted_fit_batch"))
    roots = []
    if batched:
        roots = _solve_batch(family, data, residual_config, weight_spec,
                             solver_config, np.asarray(starts))
        # rows the vectorized pass could not certify get a careful retry
        emp = EmpiricalFunctions(data)
        for i, r in enumerate(roots):
            if r is not None and not r.converged:
                try:
                    roots[i] = solve_from(family, data, residual_config,
                                          weight_spec, solver_config,
                                          r.theta, empirical=emp)
                except (DegenerateFitError, np.linalg.LinAlgError):
                    pass
    else:
        emp = (None if residual_config.kind == "regression" else
               EmpiricalFunctions(data,
                                  bivariate=residual_config.kind == "bivariate"))
        for th0 in starts:
            try:
                roots.append(solve_from(family, data, residual_config,
                                        weight_spec, solver_config, th0,
                                        empirical=emp))
            except (DegenerateFitError, np.linalg.LinAlgError):
                roots.append(None)
    failed = sum(r is None for r in roots)
    return build_root_set(roots, n, solver_config, n_restarts=len(starts),
                          n_failed=failed, n_skipped_subsamples=skipped)


def select_root(root_set, solver_config):
    """Root-selection rule: the second-highest total weight wins when it
    carries at least the configured share of the combined weight over the
    eligible distinct roots; otherwise the highest."""
    index, _ = _choose_index(root_set.roots, root_set.n, solver_config)
    return root_set.roots[index]
