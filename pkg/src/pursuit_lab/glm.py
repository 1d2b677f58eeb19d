"""Quasibinomial logistic regression by iteratively reweighted least squares.

Coefficients are identical to the plain binomial fit; the quasibinomial
family only rescales standard errors by the square root of the Pearson
dispersion, with p-values from a t distribution on the residual degrees of
freedom.
"""

from dataclasses import dataclass

import numpy as np
from scipy import stats

from .errors import FitConvergenceError

SEPARATION_THRESHOLD = 20.0


@dataclass(frozen=True)
class GlmFit:
    terms: list
    coefficients: np.ndarray
    std_errors: np.ndarray
    odds_ratios: np.ndarray
    ci_low: np.ndarray
    ci_high: np.ndarray
    p_values: np.ndarray
    dispersion: float
    deviance: float
    null_deviance: float
    df_residual: int
    df_null: int
    separation_flag: bool

    def to_dict(self):
        return {
            "terms": [
                {
                    "term": t,
                    "coef": float(c),
                    "se": float(s),
                    "or": float(o),
                    "ci_low": float(lo),
                    "ci_high": float(hi),
                    "p": float(p),
                }
                for t, c, s, o, lo, hi, p in zip(
                    self.terms,
                    self.coefficients,
                    self.std_errors,
                    self.odds_ratios,
                    self.ci_low,
                    self.ci_high,
                    self.p_values,
                )
            ],
            "dispersion": self.dispersion,
            "deviance": self.deviance,
            "null_deviance": self.null_deviance,
            "df_residual": self.df_residual,
            "df_null": self.df_null,
            "separation_flag": self.separation_flag,
        }


def _binomial_deviance(y, mu, trials):
    with np.errstate(divide="ignore", invalid="ignore"):
        t1 = np.where(y > 0, y * np.log(y / mu), 0.0)
        t2 = np.where(y < 1, (1 - y) * np.log((1 - y) / (1 - mu)), 0.0)
    return float(2.0 * np.sum(trials * (t1 + t2)))


def _irls(Xmat, y, trials, max_iter=100, rtol=1e-10):
    n, k = Xmat.shape
    beta = np.zeros(k)
    mu = np.clip((y * trials + 0.5) / (trials + 1.0), 1e-10, 1 - 1e-10)
    eta = np.log(mu / (1 - mu))
    dev = _binomial_deviance(y, mu, trials)
    for _ in range(max_iter):
        w = trials * mu * (1 - mu)
        z = eta + (y - mu) / (mu * (1 - mu))
        WX = Xmat * w[:, None]
        beta = np.linalg.solve(Xmat.T @ WX, WX.T @ z)
        eta = Xmat @ beta
        mu = np.clip(1.0 / (1.0 + np.exp(-eta)), 1e-10, 1 - 1e-10)
        new_dev = _binomial_deviance(y, mu, trials)
        if abs(dev - new_dev) / max(abs(new_dev), 1e-300) < rtol:
            return beta, mu, new_dev
        dev = new_dev
    raise FitConvergenceError("IRLS did not converge in 100 iterations", beta)


def fit_quasibinomial_glm(successes, trials, predictors, terms=None):
    """Fit success proportions on predictors with a logit link.

    predictors: n x k matrix WITHOUT an intercept column (one is prepended).
    """
    successes = np.asarray(successes, dtype=float)
    trials = np.asarray(trials, dtype=float)
    predictors = np.atleast_2d(np.asarray(predictors, dtype=float))
    if predictors.shape[0] != successes.shape[0]:
        predictors = predictors.T
    n = successes.shape[0]
    if n < 2:
        raise ValueError("need at least 2 rows to fit a GLM")
    y = successes / trials
    Xmat = np.column_stack([np.ones(n), predictors])
    k = Xmat.shape[1]
    if terms is None:
        terms = ["intercept"] + [f"x{j}" for j in range(1, k)]

    beta, mu, dev = _irls(Xmat, y, trials)

    # null model: intercept only
    _, mu0, null_dev = _irls(np.ones((n, 1)), y, trials)

    df_residual = n - k
    df_null = n - 1
    pearson = float(np.sum(trials * (y - mu) ** 2 / (mu * (1 - mu))))
    dispersion = pearson / df_residual if df_residual > 0 else np.nan

    w = trials * mu * (1 - mu)
    cov = dispersion * np.linalg.inv(Xmat.T @ (Xmat * w[:, None]))
    se = np.sqrt(np.diag(cov))
    with np.errstate(divide="ignore"):
        tstat = beta / se
    if df_residual > 0:
        p = 2.0 * stats.t.sf(np.abs(tstat), df_residual)
    else:
        p = np.full(k, np.nan)

    return GlmFit(
        terms=list(terms),
        coefficients=beta,
        std_errors=se,
        odds_ratios=np.exp(beta),
        ci_low=np.exp(beta - 1.96 * se),
        ci_high=np.exp(beta + 1.96 * se),
        p_values=p,
        dispersion=dispersion,
        deviance=dev,
        null_deviance=null_dev,
        df_residual=df_residual,
        df_null=df_null,
        separation_flag=bool(np.any(np.abs(beta) > SEPARATION_THRESHOLD)),
    )
