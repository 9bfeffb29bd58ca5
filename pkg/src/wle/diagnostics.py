"""Population-level diagnostics of the weighted-likelihood functional.

Everything here works at the distribution level, with no data involved:
Fisher-consistency quadrature checks, first- and second-order influence
analysis under point-mass contamination, root scans of the population
weighted score under mixture contamination, and concentration ellipses
for bivariate fits.
"""

import csv
import io
from dataclasses import dataclass

import numpy as np
from scipy.optimize import bisect
from scipy.special import ndtri

from .families import concentration_ellipse, ellipse_polyline  # noqa: F401
from .quadrature import Quadrature

_TAIL_MASS = 1e-13  # integration/summation truncation leaves less than this


@dataclass(frozen=True)
class ModelDistribution:
    """A parametric family frozen at a parameter value."""

    family: object
    theta: tuple

    def __post_init__(self):
        self.family.check_params(np.asarray(self.theta, dtype=float))

    def cdf(self, x):
        return self.family.cdf_survival(np.asarray(self.theta, float), x)[0]

    def survival(self, x):
        return self.family.cdf_survival(np.asarray(self.theta, float), x)[1]

    def pdf(self, x):
        return self.family.pdf(np.asarray(self.theta, float), x)


@dataclass(frozen=True)
class ContaminationSpec:
    """A base distribution contaminated at level eps.

    The contaminant is either a point mass at `y` or a second distribution
    (`contaminant`), giving the mixture (1 - eps) * base + eps * contaminant.
    """

    base: ModelDistribution
    eps: float = 0.0
    y: float = None
    contaminant: ModelDistribution = None

    def __post_init__(self):
        if not 0.0 <= self.eps <= 1.0:
            raise ValueError("eps must be in [0, 1]")
        if (self.y is None) == (self.contaminant is None):
            raise ValueError("specify exactly one of y and contaminant")

    def _mix(self, attr, x):
        if self.contaminant is None:
            raise ValueError("point-mass contamination has no smooth "
                             f"{attr}; handle the atom analytically")
        return ((1.0 - self.eps) * getattr(self.base, attr)(x)
                + self.eps * getattr(self.contaminant, attr)(x))

    def cdf(self, x):
        return self._mix("cdf", x)

    def survival(self, x):
        return self._mix("survival", x)

    def pdf(self, x):
        return self._mix("pdf", x)


@dataclass
class InfluenceReport:
    """Influence analysis at a contamination point y."""

    y: float
    t_prime: np.ndarray   # first-order influence T'(y)
    D: np.ndarray
    N: np.ndarray
    t_second: float = None          # scalar-parameter second-order term
    bias_curve: np.ndarray = None   # rows (eps, eps*T' + eps^2/2 * T'')


def integration_support(family, theta):
    """Truncated integration range leaving < 1e-13 mass in each tail."""
    theta = np.asarray(theta, dtype=float)
    if family.name == "normal":
        mu, sd = theta[0], np.sqrt(theta[1])
        return mu - 10 * sd, mu + 10 * sd
    if family.name == "normal_location":
        return theta[0] - 10.0, theta[0] + 10.0
    if family.name == "exponential":
        return 0.0, -np.log(_TAIL_MASS) / theta[0]
    raise ValueError(f"no integration support rule for family {family.name!r}")


def _median(family, theta):
    """The F_theta = 1/2 split point between the two tail regions."""
    theta = np.asarray(theta, dtype=float)
    if family.name == "normal":
        return float(theta[0])
    if family.name == "normal_location":
        return float(theta[0])
    if family.name == "exponential":
        return float(np.log(2.0) / theta[0])
    raise ValueError(f"no median rule for family {family.name!r}")


def _poisson_grid(theta):
    """Support points of a Poisson covering all but < 1e-13 tail mass."""
    lam = float(np.asarray(theta).reshape(-1)[0])
    hi = int(lam + 12 * np.sqrt(lam) + 30)
    return np.arange(0, hi + 1)


def fisher_consistency_check(family, theta, residual_config, weight_spec,
                             quad=None):
    """Population weighted score at the model: integral of H(tau) u dF_theta.

    The population residual of the model against itself vanishes, so the
    result must equal the plain score integral, i.e. the zero vector; the
    returned value quantifies how far the quadrature is from that.
    """
    theta = np.asarray(theta, dtype=float)
    family.check_params(theta)

    if getattr(family, "discrete", False):
        k = _poisson_grid(theta)
        F, S = family.cdf_survival(theta, k.astype(float))
        tau = _population_tau(F, S, F, S, residual_config.p,
                              residual_config.beta_exp)
        w = weight_spec.weight(tau)
        u = family.score(theta, k.astype(float))
        return (w * family.pmf(theta, k.astype(float))) @ u

    quad = quad or Quadrature()
    a, b = integration_support(family, theta)

    def integrand(x):
        F, S = family.cdf_survival(theta, x)
        tau = _population_tau(F, S, F, S, residual_config.p,
                              residual_config.beta_exp)
        w = weight_spec.weight(tau)
        return w[:, None] * family.score(theta, x) * family.pdf(theta, x)[:, None]

    return quad.integrate(integrand, a, b, points=[_median(family, theta)])


def _population_tau(Fg, Sg, F, S, p, beta_exp):
    """Residual of a smooth distribution (Fg, Sg) against the model (F, S)."""
    lower = F <= p
    upper = F >= 1.0 - p
    tau = np.zeros_like(np.asarray(F, dtype=float))
    with np.errstate(divide="ignore", invalid="ignore"):
        tl = Fg / F**beta_exp - 1.0
        tu = Sg / S**beta_exp - 1.0
    tau[lower] = tl[lower]
    tau[upper] = tu[upper]
    return np.where(np.isnan(tau), np.inf, tau)


def influence_first_order(family, theta_g, weight_spec, y, g=None, quad=None,
                          return_parts=False):
    """First-order influence T'(y) = D^{-1} N under point-mass contamination.

    `g` is the true distribution (anything with cdf/survival/pdf); it
    defaults to the model at theta_g, in which case the result must equal
    the maximum-likelihood influence I(theta)^{-1} u_theta(y). The two
    integration regions are split at F_theta = 1/2 and the point-mass
    indicators are handled by breaking the panels at y.
    """
    theta = np.asarray(theta_g, dtype=float)
    family.check_params(theta)
    if getattr(family, "discrete", False):
        raise NotImplementedError("influence analysis covers the continuous "
                                  "univariate families")
    if g is None:
        g = ModelDistribution(family, tuple(theta))
    quad = quad or Quadrature()
    a, b = integration_support(family, theta)
    med = _median(family, theta)
    y = float(y)
    cuts = [med, y]

    def pieces(x):
        F, S = family.cdf_survival(theta, x)
        tau = _population_tau(g.cdf(x), g.survival(x), F, S, 0.5, 1.0)
        H = weight_spec.weight(tau)
        Hp = weight_spec.weight_derivative(tau)
        u = family.score(theta, x)            # (n, d)
        gradF = family.cdf_gradient(theta, x) # (n, d)
        dens = g.pdf(x)
        lower = (F <= 0.5)[:, None]
        return F, S, tau, H, Hp, u, gradF, dens, lower

    def d_integrand(x):
        F, S, tau, H, Hp, u, gradF, dens, lower = pieces(x)
        # tail term: H'(tau) u (grad F / F) (tau + 1), with grad S = -grad F
        ratio = np.where(lower, gradF / F[:, None], -gradF / S[:, None])
        tail = (Hp * (tau + 1.0))[:, None, None] * u[:, :, None] * ratio[:, None, :]
        jac = -family.score_jacobian(theta, x)
        return (tail + H[:, None, None] * jac) * dens[:, None, None]

    def n_integrand(x):
        F, S, tau, H, Hp, u, gradF, dens, lower = pieces(x)
        lam = np.where(x >= y, 1.0, 0.0)       # Lambda_y(x)
        lam_bar = np.where(y >= x, 1.0, 0.0)   # P(point mass >= x)
        atom = np.where(lower[:, 0], lam / F, lam_bar / S)
        return ((Hp * atom - Hp * (tau + 1.0)) * dens)[:, None] * u

    D = quad.integrate(d_integrand, a, b, points=cuts)
    N = quad.integrate(n_integrand, a, b, points=cuts)
    Fy, Sy = family.cdf_survival(theta, np.atleast_1d(y))
    tau_y = _population_tau(np.atleast_1d(g.cdf(y)),
                            np.atleast_1d(g.survival(y)), Fy, Sy, 0.5, 1.0)
    N = N + weight_spec.weight(tau_y)[0] * family.score(theta, np.atleast_1d(y))[0]
    t_prime = np.linalg.solve(D, N)
    if return_parts:
        return t_prime, D, N
    return t_prime


def influence_second_order(family, theta, weight_spec, y, quad=None):
    """Second-order term T''(y) of the contamination-bias expansion.

    Evaluated at the model for scalar-parameter families; the three
    integral groups share the template in which only w''(0) distinguishes
    one weight family from another (it enters the middle group with a
    flipped sign).
    """
    theta = np.asarray(theta, dtype=float)
    family.check_params(theta)
    if theta.size != 1 or getattr(family, "discrete", False):
        raise NotImplementedError("second-order analysis covers the "
                                  "continuous scalar-parameter families")
    quad = quad or Quadrature()
    c = weight_spec.second_derivative_at_zero()
    a, b = integration_support(family, theta)
    med = _median(family, theta)
    y = float(y)
    info = float(family.fisher_information(theta)[0, 0])
    u_y = float(family.score(theta, np.atleast_1d(y))[0, 0])
    grad_u_y = float(family.score_jacobian(theta, np.atleast_1d(y))[0, 0, 0])
    t1 = u_y / info

    def groups(x):
        F, S = family.cdf_survival(theta, x)
        u = family.score(theta, x)[:, 0]
        gradF = family.cdf_gradient(theta, x)[:, 0]
        dens = family.pdf(theta, x)
        lower = F <= 0.5
        lam = np.where(x >= y, 1.0, 0.0)
        lam_bar = np.where(y >= x, 1.0, 0.0)
        # squared point-mass mismatch against the tail probabilities
        g1 = np.where(lower, (u / F) * (lam - F) ** 2,
                      (u / S) * (lam_bar - S) ** 2)
        # gradient-weighted mismatch; grad S = -grad F
        g2 = np.where(lower, u * (gradF / F) * (lam - F),
                      u * (-gradF / S) * (lam_bar - S))
        g3 = np.where(lower, u * (gradF / F) ** 2 * F,
                      u * (gradF / S) ** 2 * S)
        g4 = family.score_curvature(theta, x)
        return dens[:, None] * np.column_stack([g1, g2, g3, g4])

    i1, i2, i3, i4 = quad.integrate(groups, a, b, points=[med, y])
    bracket = (c * i1
               + 2.0 * t1 * (-c * i2 + grad_u_y + info)
               + t1 * t1 * (i4 + c * i3))
    return bracket / info


def influence_report(family, theta, weight_spec, y, eps_grid=None, quad=None):
    """Bundle T'(y), T''(y) and the predicted bias curve at the model."""
    t_prime, D, N = influence_first_order(family, theta, weight_spec, y,
                                          quad=quad, return_parts=True)
    t_second = None
    curve = None
    if np.asarray(theta, dtype=float).size == 1:
        t_second = influence_second_order(family, theta, weight_spec, y,
                                          quad=quad)
        if eps_grid is None:
            eps_grid = np.linspace(0.0, 0.1, 21)
        eps_grid = np.asarray(eps_grid, dtype=float)
        bias = eps_grid * float(t_prime[0]) + 0.5 * eps_grid**2 * t_second
        curve = np.column_stack([eps_grid, bias])
    return InfluenceReport(y=float(y), t_prime=t_prime, D=D, N=N,
                           t_second=t_second, bias_curve=curve)


def population_weighted_score(contam_spec, weight_spec, mu, p=0.5,
                              beta_exp=1.0, quad=None):
    """Weighted score integral of the N(mu, 1) model against a mixture."""
    quad = quad or Quadrature()
    mu = float(mu)
    from .families import get_family
    fam = get_family("normal_location")
    theta = np.array([mu])
    centers = [contam_spec.base.theta[0], contam_spec.contaminant.theta[0]]
    spans = [np.sqrt(contam_spec.base.theta[-1]) if len(contam_spec.base.theta) > 1 else 1.0,
             np.sqrt(contam_spec.contaminant.theta[-1]) if len(contam_spec.contaminant.theta) > 1 else 1.0]
    a = min(mu - 10.0, min(c - 10 * s for c, s in zip(centers, spans)))
    b = max(mu + 10.0, max(c + 10 * s for c, s in zip(centers, spans)))
    # branch boundaries of the residual in x
    cuts = [mu + ndtri(p), mu + ndtri(1.0 - p)]

    def integrand(x):
        F, S = fam.cdf_survival(theta, x)
        tau = _population_tau(contam_spec.cdf(x), contam_spec.survival(x),
                              F, S, p, beta_exp)
        return weight_spec.weight(tau) * (x - mu) * contam_spec.pdf(x)

    return float(quad.integrate(integrand, a, b, points=cuts))


def mixture_root_scan(contam_spec, weight_spec, mu_grid, p=0.5,
                      beta_exp=1.0, quad=None, xtol=1e-6):
    """Roots of the population weighted score of N(mu, 1) over a mu grid.

    The score integral is evaluated on the grid, sign changes are
    bracketed, and each bracket is refined by bisection. Returns the list
    of roots (possibly empty) in increasing order.
    """
    mu_grid = np.asarray(mu_grid, dtype=float)
    if np.any(np.diff(mu_grid) <= 0):
        raise ValueError("mu grid must be strictly increasing")
    quad = quad or Quadrature()

    def psi(mu):
        return population_weighted_score(contam_spec, weight_spec, mu,
                                         p=p, beta_exp=beta_exp, quad=quad)

    values = np.array([psi(mu) for mu in mu_grid])
    roots = []
    for i in np.flatnonzero(np.sign(values[:-1]) * np.sign(values[1:]) < 0):
        roots.append(bisect(psi, mu_grid[i], mu_grid[i + 1], xtol=xtol))
    for i in np.flatnonzero(values == 0.0):
        roots.append(float(mu_grid[i]))
    return sorted(roots)


def curve_to_csv(columns, rows):
    """Serialize curve data (bias curves, score scans, ellipses) as CSV."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in np.asarray(rows):
        writer.writerow([repr(float(v)) for v in np.atleast_1d(row)])
    return buf.getvalue()
