"""Hot numeric kernels: pairwise distances, distance correlation, dense MST.

Each kernel has a numba ``@njit`` implementation and a pure-numpy fallback.
Set ``PURSUIT_LAB_DISABLE_JIT=1`` to force the numpy path (useful for
debugging and for the kernel benchmark in ``benchmarks/``).
"""

import os

import numpy as np

JIT_ENABLED = os.environ.get("PURSUIT_LAB_DISABLE_JIT", "").strip() not in (
    "1",
    "true",
    "yes",
)

if JIT_ENABLED:
    try:
        from numba import njit
    except ImportError:  # pragma: no cover
        JIT_ENABLED = False

if not JIT_ENABLED:

    def njit(*args, **kwargs):
        if args and callable(args[0]):
            return args[0]

        def wrapper(f):
            return f

        return wrapper


# ---------------------------------------------------------------------------
# pairwise Euclidean distances


def pairwise_dist_np(Y):
    """n x n Euclidean distance matrix of the rows of Y."""
    sq = np.sum(Y * Y, axis=1)
    d2 = sq[:, None] + sq[None, :] - 2.0 * (Y @ Y.T)
    np.maximum(d2, 0.0, out=d2)
    return np.sqrt(d2)


@njit(cache=True)
def pairwise_dist_jit(Y):
    n, d = Y.shape
    out = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            s = 0.0
            for k in range(d):
                diff = Y[i, k] - Y[j, k]
                s += diff * diff
            s = np.sqrt(s)
            out[i, j] = s
            out[j, i] = s
    return out


# ---------------------------------------------------------------------------
# squared distance correlation of two 1-D samples


def dcor2_np(x, y):
    """Squared distance correlation via double-centered distance matrices."""
    n = x.shape[0]
    a = np.abs(x[:, None] - x[None, :])
    b = np.abs(y[:, None] - y[None, :])
    A = a - a.mean(axis=0)[None, :] - a.mean(axis=1)[:, None] + a.mean()
    B = b - b.mean(axis=0)[None, :] - b.mean(axis=1)[:, None] + b.mean()
    dcov2 = (A * B).sum() / (n * n)
    dvarx = (A * A).sum() / (n * n)
    dvary = (B * B).sum() / (n * n)
    denom = np.sqrt(dvarx * dvary)
    if denom <= 0.0:
        return 0.0
    return dcov2 / denom


@njit(cache=True)
def dcor2_jit(x, y):
    n = x.shape[0]
    arow = np.zeros(n)
    brow = np.zeros(n)
    amean = 0.0
    bmean = 0.0
    for i in range(n):
        sa = 0.0
        sb = 0.0
        for j in range(n):
            sa += abs(x[i] - x[j])
            sb += abs(y[i] - y[j])
        arow[i] = sa / n
        brow[i] = sb / n
        amean += sa
        bmean += sb
    amean /= n * n
    bmean /= n * n
    dcov2 = 0.0
    dvarx = 0.0
    dvary = 0.0
    for i in range(n):
        for j in range(n):
            A = abs(x[i] - x[j]) - arow[i] - arow[j] + amean
            B = abs(y[i] - y[j]) - brow[i] - brow[j] + bmean
            dcov2 += A * B
            dvarx += A * A
            dvary += B * B
    denom = np.sqrt(dvarx * dvary)
    if denom <= 0.0:
        return 0.0
    return dcov2 / denom


# ---------------------------------------------------------------------------
# dense Prim MST; returns (parent, weight) arrays with parent[0] == -1


def prim_mst_np(D):
    n = D.shape[0]
    parent = np.full(n, -1, dtype=np.int64)
    weight = np.zeros(n)
    in_tree = np.zeros(n, dtype=bool)
    best = np.full(n, np.inf)
    link = np.zeros(n, dtype=np.int64)
    best[0] = 0.0
    for _ in range(n):
        u = int(np.argmin(np.where(in_tree, np.inf, best)))
        in_tree[u] = True
        if u != 0:
            parent[u] = link[u]
            weight[u] = best[u]
        closer = ~in_tree & (D[u] < best)
        best[closer] = D[u][closer]
        link[closer] = u
    return parent, weight


@njit(cache=True)
def prim_mst_jit(D):
    n = D.shape[0]
    parent = np.full(n, -1, dtype=np.int64)
    weight = np.zeros(n)
    in_tree = np.zeros(n, dtype=np.bool_)
    best = np.full(n, np.inf)
    link = np.zeros(n, dtype=np.int64)
    best[0] = 0.0
    for _ in range(n):
        u = -1
        bu = np.inf
        for v in range(n):
            if not in_tree[v] and best[v] < bu:
                bu = best[v]
                u = v
        in_tree[u] = True
        if u != 0:
            parent[u] = link[u]
            weight[u] = best[u]
        for v in range(n):
            if not in_tree[v] and D[u, v] < best[v]:
                best[v] = D[u, v]
                link[v] = u
    return parent, weight


# ---------------------------------------------------------------------------
# weighted diameter (longest path) of a tree given as parent/weight arrays


def _farthest(n, heads, nxt, to, w, start):
    dist = np.full(n, -1.0)
    dist[start] = 0.0
    stack = [start]
    far_node, far_dist = start, 0.0
    while stack:
        u = stack.pop()
        e = heads[u]
        while e != -1:
            v = to[e]
            if dist[v] < 0.0:
                dist[v] = dist[u] + w[e]
                if dist[v] > far_dist:
                    far_dist = dist[v]
                    far_node = v
                stack.append(v)
            e = nxt[e]
    return far_node, far_dist


def tree_diameter_np(parent, weight):
    n = parent.shape[0]
    m = 2 * (n - 1)
    heads = np.full(n, -1, dtype=np.int64)
    nxt = np.full(m, -1, dtype=np.int64)
    to = np.zeros(m, dtype=np.int64)
    w = np.zeros(m)
    e = 0
    for v in range(n):
        u = parent[v]
        if u < 0:
            continue
        for a, b in ((u, v), (v, u)):
            to[e] = b
            w[e] = weight[v]
            nxt[e] = heads[a]
            heads[a] = e
            e += 1
    far, _ = _farthest(n, heads, nxt, to, w, 0)
    _, diam = _farthest(n, heads, nxt, to, w, far)
    return diam


@njit(cache=True)
def tree_diameter_jit(parent, weight):
    n = parent.shape[0]
    m = 2 * (n - 1)
    heads = np.full(n, -1, dtype=np.int64)
    nxt = np.full(m, -1, dtype=np.int64)
    to = np.zeros(m, dtype=np.int64)
    w = np.zeros(m)
    e = 0
    for v in range(n):
        u = parent[v]
        if u < 0:
            continue
        to[e] = v
        w[e] = weight[v]
        nxt[e] = heads[u]
        heads[u] = e
        e += 1
        to[e] = u
        w[e] = weight[v]
        nxt[e] = heads[v]
        heads[v] = e
        e += 1

    diam = 0.0
    start = 0
    for _ in range(2):
        dist = np.full(n, -1.0)
        dist[start] = 0.0
        stack = np.zeros(n, dtype=np.int64)
        stack[0] = start
        top = 1
        far_node = start
        far_dist = 0.0
        while top > 0:
            top -= 1
            u = stack[top]
            e = heads[u]
            while e != -1:
                v = to[e]
                if dist[v] < 0.0:
                    dist[v] = dist[u] + w[e]
                    if dist[v] > far_dist:
                        far_dist = dist[v]
                        far_node = v
                    stack[top] = v
                    top += 1
                e = nxt[e]
        start = far_node
        diam = far_dist
    return diam


if JIT_ENABLED:
    pairwise_dist = pairwise_dist_jit
    dcor2 = dcor2_jit
    prim_mst = prim_mst_jit
    tree_diameter = tree_diameter_jit
else:
    pairwise_dist = pairwise_dist_np
    dcor2 = dcor2_np
    prim_mst = prim_mst_np
    tree_diameter = tree_diameter_np
