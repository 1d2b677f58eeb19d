"""Projection pursuit index functions and their registry.

Every index is a pure map from an n x d projected-data matrix to a scalar.
The optimizers and the diagnostic metrics consume indexes through
``registry_lookup``; purity is a hard contract because evaluations may run
concurrently.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import BSpline
from scipy.stats import norm

from . import _accel
from .errors import DegenerateInputError


@dataclass(frozen=True)
class IndexFn:
    """Named pure index function with its supported projection dimensions."""

    name: str
    eval: callable
    supported_d: frozenset
    rotation_invariant: bool = True

    def supports(self, d):
        return not self.supported_d or d in self.supported_d

    def __call__(self, Y):
        return self.eval(Y)


def _as_matrix(Y):
    Y = np.asarray(Y, dtype=float)
    if Y.ndim == 1:
        Y = Y[:, None]
    return Y


def holes(Y):
    """Low central mass: large when points sit away from the origin."""
    Y = _as_matrix(Y)
    d = Y.shape[1]
    mean_exp = np.mean(np.exp(-0.5 * np.sum(Y * Y, axis=1)))
    return float((1.0 - mean_exp) / (1.0 - np.exp(-d / 2.0)))


def cmass(Y):
    """Central mass: 1 when all points sit at the origin."""
    Y = _as_matrix(Y)
    d = Y.shape[1]
    mean_exp = np.mean(np.exp(-0.5 * np.sum(Y * Y, axis=1)))
    return float((mean_exp - np.exp(-d / 2.0)) / (1.0 - np.exp(-d / 2.0)))


def skewness1d(Y):
    """Sample third standardized moment of a 1-D projection."""
    y = _as_matrix(Y)[:, 0]
    if y.size < 3:
        raise ValueError("skewness needs n >= 3")
    dev = y - y.mean()
    m2 = np.mean(dev * dev)
    if m2 < 1e-14:
        raise DegenerateInputError("zero variance in projection")
    m3 = np.mean(dev**3)
    return float(m3 / m2**1.5)


def norm_bin_count(n, cap=20):
    """Histogram bin count for the binned normality index."""
    return min(int(np.ceil(2.0 * n**0.4)), cap)


def norm_bin(Y, n_bins=None):
    """Chi-square discrepancy of a 1-D projection from normality.

    The standardized values are binned into equal-probability normal bins;
    the statistic is sum (O - E)^2 / E against the flat expected counts.
    """
    y = _as_matrix(Y)[:, 0]
    n = y.size
    sd = y.std(ddof=1)
    if sd < 1e-14:
        raise DegenerateInputError("zero variance in projection")
    z = (y - y.mean()) / sd
    B = norm_bin_count(n) if n_bins is None else n_bins
    edges = norm.ppf(np.arange(1, B) / B)
    counts = np.bincount(np.searchsorted(edges, z), minlength=B)
    expected = n / B
    return float(np.sum((counts - expected) ** 2) / expected)


def dcor2d(Y):
    """Squared distance correlation between the two projected coordinates."""
    Y = _as_matrix(Y)
    x = np.ascontiguousarray(Y[:, 0])
    y = np.ascontiguousarray(Y[:, 1])
    if x.std() < 1e-14 or y.std() < 1e-14:
        return 0.0
    return float(max(_accel.dcor2(x, y), 0.0))


_SPLINE_MIN_UNIQUE = 10
_SPLINE_INTERIOR_KNOTS = 10
_SPLINE_DEGREE = 3
_SPLINE_LAMBDA_GRID = np.logspace(-5, 3, 9)


def _spline_r2(x, y):
    """1 - Var(residual)/Var(response) for a penalized cubic B-spline fit.

    P-spline with a second-difference coefficient penalty; the smoothing
    parameter is chosen by generalized cross-validation over a fixed
    log-grid.
    """
    if np.unique(x).size < _SPLINE_MIN_UNIQUE:
        return 0.0
    var_y = np.var(y)
    if var_y < 1e-14:
        return 0.0
    lo, hi = x.min(), x.max()
    span = hi - lo
    if span < 1e-14:
        return 0.0
    k = _SPLINE_DEGREE
    inner = np.linspace(lo, hi, _SPLINE_INTERIOR_KNOTS + 2)
    t = np.concatenate([np.full(k, lo), inner, np.full(k, hi)])
    B = BSpline.design_matrix(np.clip(x, lo, hi), t, k).toarray()
    n, nb = B.shape
    BtB = B.T @ B
    Bty = B.T @ y
    D = np.diff(np.eye(nb), 2, axis=0)
    P = D.T @ D
    yy = float(y @ y)
    best_gcv = np.inf
    best_rss = None
    for lam in _SPLINE_LAMBDA_GRID:
        M = BtB + lam * P
        try:
            Minv = np.linalg.inv(M)
        except np.linalg.LinAlgError:
            continue
        coef = Minv @ Bty
        rss = yy - 2.0 * coef @ Bty + coef @ BtB @ coef
        edf = float(np.trace(Minv @ BtB))
        denom = max(n - edf, 1.0)
        gcv = n * max(rss, 0.0) / denom**2
        if gcv < best_gcv:
            best_gcv = gcv
            best_rss = max(rss, 0.0)
    if best_rss is None:
        return 0.0
    return float(np.clip(1.0 - (best_rss / n) / var_y, 0.0, 1.0))


def splines2d(Y):
    """Best spline-regression R^2 over both regression directions."""
    Y = _as_matrix(Y)
    x = Y[:, 0].copy()
    y = Y[:, 1].copy()
    return max(_spline_r2(x, y), _spline_r2(y, x))


def stringy(Y):
    """MST diameter-path length over total MST length.

    Equals 1 exactly when the minimum spanning tree is a simple path.
    Duplicate points are collapsed before building the tree.
    """
    Y = _as_matrix(Y)
    pts = np.unique(Y, axis=0)
    if pts.shape[0] < 3:
        raise DegenerateInputError("stringy needs at least 3 distinct points")
    D = _accel.pairwise_dist(np.ascontiguousarray(pts))
    parent, weight = _accel.prim_mst(D)
    total = float(np.sum(weight))
    if total <= 0.0:
        raise DegenerateInputError("all points coincide")
    diam = float(_accel.tree_diameter(parent, weight))
    return diam / total


def _abs_skewness(Y):
    # sign of the skewness is an orientation artifact of the basis
    return abs(skewness1d(Y))


_ANY_D = frozenset()

_REGISTRY = {
    fn.name: fn
    for fn in (
        IndexFn("holes", holes, _ANY_D),
        IndexFn("cmass", cmass, _ANY_D),
        IndexFn("skewness", _abs_skewness, frozenset({1}),
                rotation_invariant=False),
        IndexFn("norm_bin", norm_bin, frozenset({1}),
                rotation_invariant=False),
        IndexFn("dcor", dcor2d, frozenset({2})),
        IndexFn("splines", splines2d, frozenset({2}),
                rotation_invariant=False),
        IndexFn("stringy", stringy, frozenset({2})),
    )
}

_OUT_OF_SCOPE = ("mic", "tic", "loess", "skinny")


def available_indexes():
    return sorted(_REGISTRY)


def registry_lookup(name):
    """Case-insensitive lookup of an index function by name."""
    key = name.lower()
    if key in _REGISTRY:
        return _REGISTRY[key]
    if key in _OUT_OF_SCOPE:
        raise KeyError(
            f"index {name!r} is out of scope; available: {', '.join(available_indexes())}"
        )
    raise KeyError(
        f"unknown index {name!r}; available: {', '.join(available_indexes())}"
    )
