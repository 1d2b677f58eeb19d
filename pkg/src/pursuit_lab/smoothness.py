"""Smoothness diagnostic for projection pursuit indexes.

Index values over random bases are treated as a random field indexed by the
basis, and a Gaussian process with Matérn covariance is fitted by exact
maximum likelihood. The fitted Matérn smoothness parameter nu is the metric:
the higher nu, the smoother the index function.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import cho_factor, cho_solve
from scipy.optimize import minimize
from scipy.special import gammaln, kve

from .errors import DegenerateInputError, NotPositiveDefiniteError
from .manifold import random_basis

NU_MIN = 0.05
NU_MAX = 15.0


@dataclass(frozen=True)
class MaternParams:
    nu: float
    eta: float
    len: float
    sigma: float = 0.0

    def __post_init__(self):
        if not (self.nu > 0 and self.eta > 0 and self.len > 0):
            raise ValueError("nu, eta and len must be positive")
        if self.sigma < 0:
            raise ValueError("sigma must be nonnegative")


@dataclass(frozen=True)
class SmoothnessFit:
    params: MaternParams
    loglik: float
    n_bases: int
    converged: bool

    def to_dict(self):
        return {
            "nu": self.params.nu,
            "eta": self.params.eta,
            "len": self.params.len,
            "sigma": self.params.sigma,
            "loglik": self.loglik,
            "n_bases": self.n_bases,
            "converged": self.converged,
        }


def log_bessel_k(nu, x):
    """log K_nu(x) for real nu > 0, x > 0, robust to over/underflow.

    Uses the exponentially scaled Bessel function where it is finite and the
    small-argument asymptotic log(Gamma(nu)/2) + nu*log(2/x) otherwise, so the
    result is never NaN.
    """
    x = np.asarray(x, dtype=float)
    with np.errstate(over="ignore", invalid="ignore"):
        v = kve(nu, x)
        out = np.where(v > 0, np.log(np.where(v > 0, v, 1.0)) - x, -np.inf)
    bad = ~np.isfinite(out)
    if np.any(bad):
        xs = np.where(bad, x, 1.0)
        asym = math.log(0.5) + gammaln(nu) + nu * np.log(2.0 / xs)
        out = np.where(bad, asym, out)
    return out if out.ndim else float(out)


def bessel_k(nu, x):
    """Modified Bessel function of the second kind, real order nu > 0."""
    return np.exp(log_bessel_k(nu, x))


def matern_cov(u, params):
    """Matérn covariance of a basis difference u (any array; Frobenius norm)."""
    r = float(np.linalg.norm(np.asarray(u, dtype=float)))
    return float(_matern_from_dist(np.array([r]), params)[0])


def _matern_from_dist(r, params):
    """Matérn covariance evaluated at an array of distances, in log space."""
    nu, eta, ln = float(params.nu), float(params.eta), float(params.len)
    r = np.asarray(r, dtype=float)
    z = math.sqrt(2.0 * nu) * r / ln
    out = np.full(r.shape, eta * eta, dtype=float)
    pos = z > 1e-12
    if np.any(pos):
        zp = z[pos]
        logk = (
            2.0 * math.log(eta)
            + nu * np.log(zp)
            - gammaln(nu)
            - (nu - 1.0) * math.log(2.0)
            + log_bessel_k(nu, zp)
        )
        out[pos] = np.exp(logk)
    return out


def basis_dist_matrix(bases):
    """Pairwise Frobenius norms of raw basis differences (no alignment)."""
    flat = np.stack([np.asarray(b, dtype=float).ravel() for b in bases])
    sq = np.sum(flat * flat, axis=1)
    d2 = sq[:, None] + sq[None, :] - 2.0 * (flat @ flat.T)
    np.maximum(d2, 0.0, out=d2)
    return np.sqrt(d2)


def _neg_loglik_from_dist(D, y, params, jitter=True):
    n = y.shape[0]
    K = _matern_from_dist(D, params)
    np.fill_diagonal(K, params.eta**2 + params.sigma**2)
    try:
        c, low = cho_factor(K, lower=True)
    except np.linalg.LinAlgError:
        if not jitter:
            raise NotPositiveDefiniteError("covariance matrix is not positive definite")
        K = K + 1e-8 * params.eta**2 * np.eye(n)
        try:
            c, low = cho_factor(K, lower=True)
        except np.linalg.LinAlgError:
            raise NotPositiveDefiniteError(
                "covariance matrix is not positive definite even after jitter"
            ) from None
    alpha = cho_solve((c, low), y)
    logdet = 2.0 * np.sum(np.log(np.diag(c)))
    return float(0.5 * y @ alpha + 0.5 * logdet + 0.5 * n * math.log(2.0 * math.pi))


def gp_neg_loglik(bases, y, params, jitter=True):
    """Negative Matérn-GP log-likelihood of index values over bases.

    On a Cholesky failure a jitter of 1e-8 * eta^2 is added once (disable
    with jitter=False); a second failure raises NotPositiveDefiniteError.
    """
    y = np.asarray(y, dtype=float)
    if len(bases) != y.shape[0]:
        raise ValueError("bases and values must have equal length")
    D = basis_dist_matrix(bases)
    return _neg_loglik_from_dist(D, y, params, jitter=jitter)


def sample_bases_smoothness(X, index, d, n_basis=500, seed=0):
    """Draw uniform Stiefel bases and evaluate the index on each."""
    rng = np.random.default_rng(seed)
    p = X.values.shape[1]
    bases = []
    values = []
    for _ in range(n_basis):
        for attempt in range(10):
            A = random_basis(p, d, rng)
            try:
                v = float(index(X.values @ A))
            except Exception:
                continue
            if math.isfinite(v):
                bases.append(A)
                values.append(v)
                break
        else:
            raise RuntimeError("index failed on 10 consecutive random bases")
    return bases, np.asarray(values)


_NU_STARTS = (0.5, 1.5, 2.5, 5.0, 10.0)


def fit_smoothness(bases, values, maxiter=400):
    """Maximum-likelihood Matérn fit; the fitted nu is the smoothness metric.

    Nelder-Mead in log-parameter space from 5 deterministic starts; nu is
    box-constrained to [0.05, 15] by penalty. Values are centered before
    fitting since the likelihood assumes a zero-mean process.
    """
    y = np.asarray(values, dtype=float)
    n = y.shape[0]
    if n < 30:
        raise ValueError(f"need at least 30 bases to fit smoothness, got {n}")
    sd = y.std()
    if sd < 1e-12:
        raise DegenerateInputError("index has no signal over random bases")
    y = y - y.mean()
    D = basis_dist_matrix(bases)
    med = float(np.median(D[D > 0]))

    def objective(theta):
        nu, eta, ln, sigma = np.exp(theta)
        if not NU_MIN <= nu <= NU_MAX:
            return 1e10 * (1.0 + abs(math.log(nu)))
        params = MaternParams(nu, eta, ln, sigma)
        try:
            return _neg_loglik_from_dist(D, y, params)
        except NotPositiveDefiniteError:
            return 1e10

    best = None
    for nu0 in _NU_STARTS:
        theta0 = np.log([nu0, sd, med, 0.1 * sd])
        res = minimize(
            objective,
            theta0,
            method="Nelder-Mead",
            options={"maxiter": maxiter, "xatol": 1e-4, "fatol": 1e-6},
        )
        if best is None or res.fun < best.fun:
            best = res

    nu, eta, ln, sigma = np.exp(best.x)
    nu = min(max(nu, NU_MIN), NU_MAX)
    return SmoothnessFit(
        params=MaternParams(nu, eta, ln, sigma),
        loglik=-float(best.fun),
        n_bases=n,
        converged=bool(best.success),
    )
