"""Benchmark harness: repeated optimizations and success-rate summaries.

A success is a repetition whose best index value lands within a tolerance of
the best value found across all repetitions. Repetitions run concurrently
(index functions are pure); per-rep seeds are derived from the master seed
and the rep number so results do not depend on scheduling.
"""

import json
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .data import gen_pipe, gen_sine
from .indexes import registry_lookup
from .optimize import CrsConfig, JsoConfig, crs_run, jso_run


@dataclass(frozen=True)
class ExperimentDesign:
    shape: str  # "pipe" or "sine"
    p: int
    index: str
    optimizer: str  # "jso" or "crs"
    d: int = 2
    n: int = 500
    n_jelly: int = 50
    max_iter: int = 50
    max_tries: int = 1000
    alpha: float = 0.5
    beta: float = 3.0
    gamma: float = 0.1
    n_reps: int = 50
    success_tol: float = 0.05
    master_seed: int = 0

    def __post_init__(self):
        if self.shape not in ("pipe", "sine"):
            raise ValueError(f"unknown shape {self.shape!r}")
        if self.optimizer not in ("jso", "crs"):
            raise ValueError(f"unknown optimizer {self.optimizer!r}")
        if self.n_reps < 1:
            raise ValueError("n_reps must be >= 1")
        if self.success_tol <= 0:
            raise ValueError("success_tol must be positive")
        if not registry_lookup(self.index).supports(self.d):
            raise ValueError(f"index {self.index!r} does not support d={self.d}")

    def to_dict(self):
        return {
            "shape": self.shape,
            "p": self.p,
            "index": self.index,
            "optimizer": self.optimizer,
            "d": self.d,
            "n": self.n,
            "n_jelly": self.n_jelly,
            "max_iter": self.max_iter,
            "max_tries": self.max_tries,
            "alpha": self.alpha,
            "beta": self.beta,
            "gamma": self.gamma,
            "n_reps": self.n_reps,
            "success_tol": self.success_tol,
            "master_seed": self.master_seed,
        }


@dataclass
class RunSummary:
    design: ExperimentDesign
    best_values: list  # NaN for failed reps
    best_bases: list
    success_rate: float
    ci_low: float
    ci_high: float
    n_failed: int
    wall_time: float

    def to_dict(self):
        return {
            "design": self.design.to_dict(),
            "best_values": [
                None if (v is None or math.isnan(v)) else v for v in self.best_values
            ],
            "success_rate": self.success_rate,
            "ci_low": self.ci_low,
            "ci_high": self.ci_high,
            "n_failed": self.n_failed,
            "wall_time": self.wall_time,
        }


def rep_seed(master_seed, rep):
    """Deterministic per-rep seed, independent of execution order."""
    ss = np.random.SeedSequence(entropy=master_seed, spawn_key=(rep,))
    return int(ss.generate_state(1)[0])


def success_rate(best_values, tol=0.05):
    """Fraction of values within tol of the best value; NaNs count as failures."""
    values = np.asarray(best_values, dtype=float)
    if values.size == 0:
        raise ValueError("empty value list")
    finite = values[np.isfinite(values)]
    if finite.size == 0:
        return 0.0
    return float(np.sum(finite >= finite.max() - tol) / values.size)


def bootstrap_ci(best_values, tol=0.05, n_boot=500, seed=0):
    """2.5%/97.5% percentile interval of the success rate over resamples."""
    values = np.asarray(best_values, dtype=float)
    if values.size == 0:
        raise ValueError("empty value list")
    rng = np.random.default_rng(seed)
    rates = np.empty(n_boot)
    for b in range(n_boot):
        sample = values[rng.integers(0, values.size, size=values.size)]
        rates[b] = success_rate(sample, tol)
    lo, hi = np.percentile(rates, [2.5, 97.5])
    return float(lo), float(hi)


def _generate(design, seed):
    rng = np.random.default_rng(seed)
    if design.shape == "pipe":
        return gen_pipe(design.n, design.p, rng)
    return gen_sine(design.n, design.p, rng)


def _one_rep(design, rep):
    seed = rep_seed(design.master_seed, rep)
    # data seed shifted so the optimizer and generator draws are independent
    X = _generate(design, seed ^ 0x5EED)
    index = registry_lookup(design.index)
    if design.optimizer == "jso":
        cfg = JsoConfig(
            n_jelly=design.n_jelly,
            max_iter=design.max_iter,
            beta=design.beta,
            gamma=design.gamma,
            seed=seed,
        )
        run = jso_run(X, index, design.d, cfg)
    else:
        cfg = CrsConfig(
            max_tries=design.max_tries,
            alpha=design.alpha,
            max_iter=design.max_iter,
            seed=seed,
        )
        run = crs_run(X, index, design.d, cfg)
    return seed, run.best_value, run.best_basis, len(run.records)


def run_experiment(design, threads=1, jsonl_path=None):
    """Run n_reps independent optimizations and summarize the success rate.

    A rep that raises is recorded as failed: it stays in the success-rate
    denominator but cannot count as a success.
    """
    t0 = time.perf_counter()
    results = [None] * design.n_reps

    def work(rep):
        try:
            return _one_rep(design, rep)
        except Exception as exc:
            return exc

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(work, range(design.n_reps)))
    else:
        results = [work(rep) for rep in range(design.n_reps)]

    best_values = []
    best_bases = []
    records = []
    n_failed = 0
    for rep, res in enumerate(results):
        if isinstance(res, Exception):
            n_failed += 1
            best_values.append(math.nan)
            best_bases.append(None)
            records.append(
                {"rep": rep, "seed": rep_seed(design.master_seed, rep),
                 "failed": True, "error": str(res)}
            )
        else:
            seed, value, basis, n_evals = res
            best_values.append(value)
            best_bases.append(basis)
            records.append(
                {
                    "rep": rep,
                    "seed": seed,
                    "failed": False,
                    "best_value": value,
                    "basis": [float(v) for v in basis.ravel()],
                    "p": int(basis.shape[0]),
                    "d": int(basis.shape[1]),
                    "n_evals": n_evals,
                }
            )

    rate = success_rate(best_values, design.success_tol)
    lo, hi = bootstrap_ci(
        best_values, design.success_tol, seed=design.master_seed
    )
    summary = RunSummary(
        design=design,
        best_values=best_values,
        best_bases=best_bases,
        success_rate=rate,
        ci_low=lo,
        ci_high=hi,
        n_failed=n_failed,
        wall_time=time.perf_counter() - t0,
    )
    if jsonl_path is not None:
        with open(jsonl_path, "w") as fh:
            fh.write(json.dumps({"type": "design", **design.to_dict()}) + "\n")
            for rec in records:
                fh.write(json.dumps(rec) + "\n")
    return summary


def huber_curve(X2, index, n_angles=360):
    """1-D index values over all projection angles of 2-D data.

    Returns (angles, values, mean_value, argmax_angle); the mean is the
    dashed-circle baseline and the argmax marks the optimal projection.
    """
    Xv = X2.values
    if Xv.shape[1] != 2:
        raise ValueError("huber_curve needs 2-D data")
    angles = 2.0 * np.pi * np.arange(n_angles) / n_angles
    values = np.empty(n_angles)
    for k, a in enumerate(angles):
        direction = np.array([[np.cos(a)], [np.sin(a)]])
        values[k] = float(index(Xv @ direction))
    mean_value = float(values.mean())
    argmax_angle = float(angles[int(np.argmax(values))])
    return angles, values, mean_value, argmax_angle
