"""Squintability diagnostic for projection pursuit indexes.

Random start bases are interpolated geodesically toward the optimal basis;
index values, binned by projection distance to the optimum, trace out a
decreasing curve g(distance). Squintability is the fraction of the total
index improvement achieved by the time half the distance is covered,
computed either from a fitted scaled sigmoid (parametric) or from a kernel
regression of the curve (nonparametric).
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateInputError, FitConvergenceError
from .manifold import (
    SAME_PLANE_TOL,
    _principal_frames,
    orthonormalize,
    proj_distance,
    random_basis,
)


@dataclass(frozen=True)
class SquintSamples:
    """Binned (distance, mean index value) curve."""

    centers: np.ndarray
    means: np.ndarray
    bin_width: float

    @property
    def r0(self):
        return float(np.max(self.centers))


@dataclass(frozen=True)
class SigmoidParams:
    theta1: float
    theta2: float
    theta3: float
    theta4: float
    r0: float

    def to_dict(self):
        return {
            "theta1": self.theta1,
            "theta2": self.theta2,
            "theta3": self.theta3,
            "theta4": self.theta4,
            "r0": self.r0,
        }


@dataclass(frozen=True)
class SquintResult:
    varsigma: float
    method: str  # "parametric" or "kernel"
    fit: object = None

    def to_dict(self):
        fit = self.fit.to_dict() if hasattr(self.fit, "to_dict") else self.fit
        return {"varsigma": self.varsigma, "method": self.method, "fit": fit}


def _logistic(x, theta2, theta3):
    z = np.clip(theta3 * (np.asarray(x, dtype=float) - theta2), -700.0, 700.0)
    return 1.0 / (1.0 + np.exp(z))


def sigmoid_curve(x, params):
    """Scaled decreasing sigmoid with g(0)=theta1 and g(r0)=theta4."""
    l = _logistic(x, params.theta2, params.theta3)
    l0 = _logistic(0.0, params.theta2, params.theta3)
    lr = _logistic(params.r0, params.theta2, params.theta3)
    return (params.theta1 - params.theta4) * (l - lr) / (l0 - lr) + params.theta4


def _geodesic_path_values(X, index, start, target, step):
    """(distance to target, index value) along the geodesic start -> target."""
    d0 = proj_distance(start, target)
    if d0 < SAME_PLANE_TOL:
        return [(0.0, float(index(X @ target)))]
    Pa, Pb, theta = _principal_frames(start, target)
    Q = np.empty_like(Pa)
    for i, th in enumerate(theta):
        if th < 1e-9:
            Q[:, i] = 0.0
        else:
            Q[:, i] = (Pb[:, i] - math.cos(th) * Pa[:, i]) / math.sin(th)
    m = max(int(math.ceil(d0 / step)), 1)
    out = []
    for k in range(m + 1):
        t = k / m
        G = Pa * np.cos(t * theta) + Q * np.sin(t * theta)
        G = orthonormalize(G)
        out.append((proj_distance(G, target), float(index(X @ G))))
    return out


def sample_bases_squint(
    X, index, d, A_star, n_basis=50, step=0.005, min_proj_dist=0.5, seed=0
):
    """Raw (distance, value) pairs along geodesics from random starts to A_star.

    Each start basis is at least min_proj_dist from the optimum; along each
    path, points are spaced about `step` apart in projection distance.
    """
    rng = np.random.default_rng(seed)
    Xv = X.values
    p = Xv.shape[1]
    pairs = []
    for _ in range(n_basis):
        for attempt in range(1000):
            start = random_basis(p, d, rng)
            if proj_distance(start, A_star) >= min_proj_dist:
                break
        else:
            raise RuntimeError(
                f"no start basis at distance >= {min_proj_dist} found in 1000 draws"
            )
        pairs.extend(_geodesic_path_values(Xv, index, start, A_star, step))
    return np.asarray(pairs)


def bin_average(pairs, bin_width=0.005):
    """Mean index value per occupied projection-distance bin."""
    pairs = np.asarray(pairs, dtype=float)
    if pairs.size == 0:
        raise ValueError("no (distance, value) pairs to bin")
    dist = pairs[:, 0]
    vals = pairs[:, 1]
    idx = np.floor(dist / bin_width).astype(int)
    occupied = np.unique(idx)
    centers = (occupied + 0.5) * bin_width
    means = np.array([vals[idx == i].mean() for i in occupied])
    return SquintSamples(centers=centers, means=means, bin_width=bin_width)


def _lm_fit(x, y, theta0, model, max_iter=500, rtol=1e-10):
    """Small Levenberg-Marquardt loop with finite-difference Jacobian."""
    theta = np.asarray(theta0, dtype=float)
    resid = model(x, theta) - y
    sse = float(resid @ resid)
    lam = 1e-3
    best_theta, best_sse = theta.copy(), sse
    for _ in range(max_iter):
        J = np.empty((x.size, theta.size))
        for j in range(theta.size):
            h = 1e-6 * max(abs(theta[j]), 1.0)
            tp = theta.copy()
            tp[j] += h
            J[:, j] = (model(x, tp) - (resid + y)) / h
        g = J.T @ resid
        H = J.T @ J
        improved = False
        for _ in range(20):
            try:
                delta = np.linalg.solve(H + lam * np.diag(np.diag(H) + 1e-12), -g)
            except np.linalg.LinAlgError:
                lam *= 10.0
                continue
            trial = theta + delta
            trial_resid = model(x, trial) - y
            trial_sse = float(trial_resid @ trial_resid)
            if trial_sse < sse:
                theta, resid = trial, trial_resid
                new_sse = trial_sse
                lam = max(lam / 10.0, 1e-12)
                improved = True
                break
            lam *= 10.0
        if not improved:
            return theta, sse, True
        rel_change = (sse - new_sse) / max(sse, 1e-300)
        sse = new_sse
        if sse < best_sse:
            best_theta, best_sse = theta.copy(), sse
        if rel_change < rtol:
            return theta, sse, True
    return best_theta, best_sse, False


def fit_sigmoid_nls(samples):
    """Least-squares fit of the scaled sigmoid to the binned curve."""
    x = samples.centers
    y = samples.means
    if x.size < 8:
        raise ValueError(f"need at least 8 bins to fit, got {x.size}")
    if y.std() < 1e-14:
        raise DegenerateInputError("constant index values; nothing to fit")
    r0 = samples.r0
    mid = 0.5 * (y.max() + y.min())
    below = np.nonzero(y <= mid)[0]
    theta2_0 = float(x[below[0]]) if below.size else float(r0 / 2.0)
    theta0 = np.array([y.max(), theta2_0, 4.0 / r0, y.min()])

    def model(xx, th):
        return sigmoid_curve(xx, SigmoidParams(th[0], th[1], th[2], th[3], r0))

    theta, sse, converged = _lm_fit(x, y, theta0, model)
    params = SigmoidParams(*theta, r0)
    if not converged:
        raise FitConvergenceError(
            "sigmoid fit did not converge within 500 iterations", best_params=params
        )
    return params


def squintability_parametric(params):
    """Fraction of index improvement at half distance, from the sigmoid fit."""
    if params.theta3 == 0.0:
        return SquintResult(0.5, "parametric", params)
    l0 = _logistic(0.0, params.theta2, params.theta3)
    lh = _logistic(params.r0 / 2.0, params.theta2, params.theta3)
    lr = _logistic(params.r0, params.theta2, params.theta3)
    varsigma = float((lh - lr) / (l0 - lr))
    return SquintResult(varsigma, "parametric", params)


def _silverman_bandwidth(x):
    n = x.size
    sd = x.std(ddof=1)
    iqr = np.subtract(*np.percentile(x, [75, 25]))
    scale = min(sd, iqr / 1.34) if iqr > 0 else sd
    return 1.06 * scale * n ** (-0.2)


def squintability_kernel(samples, grid_size=200):
    """Nonparametric squintability: max curve gradient times its distance.

    Nadaraya-Watson regression with a Gaussian kernel (Silverman bandwidth on
    the bin centers); the gradient is taken by central differences on a
    uniform grid over [0, r0].
    """
    x = samples.centers
    y = samples.means
    if x.size < 8:
        raise ValueError(f"need at least 8 bins, got {x.size}")
    if y.std() < 1e-14:
        return SquintResult(0.0, "kernel", {"max_d": 0.0, "max_dist": 0.0})
    h = _silverman_bandwidth(x)
    grid = np.linspace(0.0, samples.r0, grid_size)
    w = np.exp(-0.5 * ((grid[:, None] - x[None, :]) / h) ** 2)
    g_hat = (w @ y) / np.sum(w, axis=1)
    grad = np.gradient(g_hat, grid)
    k = int(np.argmax(np.abs(grad)))
    max_d = float(abs(grad[k]))
    max_dist = float(grid[k])
    return SquintResult(
        max_d * max_dist, "kernel", {"max_d": max_d, "max_dist": max_dist}
    )
