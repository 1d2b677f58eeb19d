"""Jellyfish search and creeping random search over projection bases.

Both optimizers maximize index(X @ A) over orthonormal p x d bases A, record
every evaluation in a trace, and are deterministic given their seed. Moves
are made in the ambient matrix space and pulled back to the manifold by
orthonormalization, then orient-aligned to the predecessor so that frames
stay consistent along each member's path.
"""

import json
import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .manifold import orient_align, orthonormalize, random_basis

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class JsoConfig:
    n_jelly: int = 50
    max_iter: int = 50
    beta: float = 3.0
    gamma: float = 0.1
    seed: int = 0

    def __post_init__(self):
        if self.n_jelly < 1:
            raise ValueError("n_jelly must be >= 1")
        if self.max_iter < 1:
            raise ValueError("max_iter must be >= 1")
        if self.beta <= 0 or self.gamma <= 0:
            raise ValueError("beta and gamma must be positive")


@dataclass(frozen=True)
class CrsConfig:
    max_tries: int = 1000
    alpha: float = 0.5
    max_iter: int = 100
    seed: int = 0

    def __post_init__(self):
        if self.max_tries < 1:
            raise ValueError("max_tries must be >= 1")
        if self.alpha <= 0:
            raise ValueError("alpha must be positive")


@dataclass(frozen=True)
class TraceRecord:
    iteration: int
    member: int
    basis: np.ndarray
    value: float
    accepted: bool
    c_t: float = None


@dataclass
class OptRun:
    """Full optimizer trace plus the best basis/value found."""

    records: list
    best_basis: np.ndarray
    best_value: float
    config: dict
    seed: int
    optimizer: str

    def values(self):
        return np.array([r.value for r in self.records])

    def best_so_far(self):
        """Running maximum of accepted values, one entry per record."""
        out = np.empty(len(self.records))
        best = -math.inf
        for i, r in enumerate(self.records):
            if r.accepted and np.isfinite(r.value):
                best = max(best, r.value)
            out[i] = best
        return out


def time_control(t, max_iter, rng):
    """Schedule value deciding ocean-current vs swarm motion, in [0, 1]."""
    if not 1 <= t <= max_iter:
        raise ValueError(f"need 1 <= t <= max_iter, got t={t}")
    r = rng.uniform()
    return abs((1.0 - t / max_iter) * (2.0 * r - 1.0))


def _evaluate(index, X, basis):
    """Index value of a candidate, or NaN when evaluation fails."""
    try:
        value = float(index(X @ basis))
    except Exception as exc:
        log.debug("index evaluation failed: %s", exc)
        return math.nan
    return value if math.isfinite(value) else math.nan


def jso_step(population, values, best, t, cfg, index, X, rng):
    """One jellyfish iteration; returns (population', values', best').

    All RNG draws happen in a serial pre-pass so results do not depend on
    evaluation order. Candidates are accepted only on strict improvement.
    """
    n = len(population)
    c_t = time_control(t, cfg.max_iter, rng)
    records = []

    # pre-pass: draw every random quantity in a fixed order
    moves = []
    if c_t >= 0.5:
        aligned = [orient_align(A, best) for A in population]
        mean = np.mean(aligned, axis=0)
        for i in range(n):
            r = rng.uniform()
            r2 = rng.uniform()
            moves.append(("ocean", r, r2, mean))
    else:
        for i in range(n):
            r_branch = rng.uniform()
            if r_branch > 1.0 - c_t or n == 1:
                r = rng.uniform()
                Z = rng.standard_normal(population[i].shape)
                moves.append(("passive", r, Z))
            else:
                j = int(rng.integers(0, n - 1))
                if j >= i:
                    j += 1
                r = rng.uniform()
                moves.append(("active", r, j))

    new_pop = list(population)
    new_values = list(values)
    for i, move in enumerate(moves):
        A = population[i]
        if move[0] == "ocean":
            _, r, r2, mean = move
            step = r * (best - cfg.beta * r2 * mean)
        elif move[0] == "passive":
            _, r, Z = move
            step = cfg.gamma * r * Z
        else:
            _, r, j = move
            if values[j] > values[i]:
                direction = population[j] - A
            else:
                direction = A - population[j]
            step = r * direction
        candidate = orient_align(orthonormalize(A + step), A)
        value = _evaluate(index, X, candidate)
        accepted = math.isfinite(value) and value > values[i]
        if accepted:
            new_pop[i] = candidate
            new_values[i] = value
        records.append(TraceRecord(t, i, candidate, value, accepted, c_t))

    best_i = int(np.argmax(new_values))
    return new_pop, new_values, new_pop[best_i], records


def jso_run(X, index, d, cfg):
    """Run the jellyfish search optimizer from a random initial population."""
    Xv = X.values
    p = Xv.shape[1]
    rng = np.random.default_rng(cfg.seed)
    population = [random_basis(p, d, rng) for _ in range(cfg.n_jelly)]
    values = [_evaluate(index, Xv, A) for A in population]
    records = [
        TraceRecord(0, i, A, v, math.isfinite(v), None)
        for i, (A, v) in enumerate(zip(population, values))
    ]
    values = [v if math.isfinite(v) else -math.inf for v in values]
    best = population[int(np.argmax(values))]

    for t in range(1, cfg.max_iter + 1):
        population, values, best, recs = jso_step(
            population, values, best, t, cfg, index, Xv, rng
        )
        records.extend(recs)

    best_i = int(np.argmax(values))
    return OptRun(
        records=records,
        best_basis=population[best_i],
        best_value=float(values[best_i]),
        config=_config_dict(cfg),
        seed=cfg.seed,
        optimizer="jso",
    )


def crs_run(X, index, d, cfg):
    """Creeping random search: accept-if-better Gaussian perturbations.

    Terminates after cfg.max_tries consecutive rejected candidates or
    cfg.max_iter accepted moves, whichever comes first.
    """
    Xv = X.values
    p = Xv.shape[1]
    rng = np.random.default_rng(cfg.seed)
    A = random_basis(p, d, rng)
    value = _evaluate(index, Xv, A)
    records = [TraceRecord(0, 0, A, value, math.isfinite(value), None)]
    if not math.isfinite(value):
        value = -math.inf

    accepted_moves = 0
    fails = 0
    while accepted_moves < cfg.max_iter and fails < cfg.max_tries:
        Z = rng.standard_normal((p, d))
        candidate = orient_align(orthonormalize(A + cfg.alpha * Z), A)
        cand_value = _evaluate(index, Xv, candidate)
        accepted = math.isfinite(cand_value) and cand_value > value
        records.append(
            TraceRecord(accepted_moves, 0, candidate, cand_value, accepted, None)
        )
        if accepted:
            A = candidate
            value = cand_value
            accepted_moves += 1
            fails = 0
        else:
            fails += 1

    return OptRun(
        records=records,
        best_basis=A,
        best_value=float(value),
        config=_config_dict(cfg),
        seed=cfg.seed,
        optimizer="crs",
    )


def _config_dict(cfg):
    if isinstance(cfg, JsoConfig):
        return {
            "optimizer": "jso",
            "n_jelly": cfg.n_jelly,
            "max_iter": cfg.max_iter,
            "beta": cfg.beta,
            "gamma": cfg.gamma,
            "seed": cfg.seed,
        }
    return {
        "optimizer": "crs",
        "max_tries": cfg.max_tries,
        "alpha": cfg.alpha,
        "max_iter": cfg.max_iter,
        "seed": cfg.seed,
    }


def save_trace_jsonl(run, path_or_file):
    """Serialize an OptRun to JSONL: a config header then one line per eval."""
    own = isinstance(path_or_file, (str, bytes)) or hasattr(path_or_file, "__fspath__")
    fh = open(path_or_file, "w") if own else path_or_file
    try:
        header = {"type": "config", **run.config, "best_value": run.best_value}
        fh.write(json.dumps(header) + "\n")
        for r in run.records:
            p, d = r.basis.shape
            fh.write(
                json.dumps(
                    {
                        "iter": r.iteration,
                        "member": r.member,
                        "value": None if math.isnan(r.value) else r.value,
                        "accepted": r.accepted,
                        "c_t": r.c_t,
                        "p": p,
                        "d": d,
                        "basis": [float(v) for v in r.basis.ravel()],
                    }
                )
                + "\n"
            )
    finally:
        if own:
            fh.close()


def load_trace_jsonl(path):
    """Inverse of save_trace_jsonl; returns (config dict, list of TraceRecord)."""
    records = []
    config = None
    with open(path) as fh:
        for line in fh:
            obj = json.loads(line)
            if obj.get("type") == "config":
                config = obj
                continue
            basis = np.asarray(obj["basis"]).reshape(obj["p"], obj["d"])
            value = obj["value"]
            records.append(
                TraceRecord(
                    obj["iter"],
                    obj["member"],
                    basis,
                    math.nan if value is None else value,
                    obj["accepted"],
                    obj["c_t"],
                )
            )
    return config, records
