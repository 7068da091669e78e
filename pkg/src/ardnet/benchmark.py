"""Monte Carlo harness for the effective-rank and MSE simulation tables.

Each replication draws its own seed from (master seed, experiment, model, n,
replication index), so results do not depend on worker count or scheduling.
"""

import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from typing import Optional

import numpy as np

from . import diagnostics, netgen, solver

EXPERIMENTS = ("effective-rank", "mse")


@dataclass
class CellRecord:
    experiment: str
    model: str
    n: int
    K: Optional[int]
    reps: int
    mean: float
    se: float
    seed: int
    elapsed_seconds: float
    nonconverged: int = 0
    # effective-rank cells also carry the unsquared nuclear/Frobenius ratio.
    ratio_mean: Optional[float] = None
    ratio_se: Optional[float] = None

    def to_json(self):
        return json.dumps(asdict(self), sort_keys=True)


def _mean_se(values):
    values = np.asarray(values, dtype=float)
    if values.size < 2:
        return float(values.mean()), 0.0
    return float(values.mean()), float(values.std(ddof=1) / math.sqrt(values.size))


def effective_rank_replication(model, n, rep, master_seed):
    """(effective rank, nuclear/Frobenius ratio) of one simulated M*."""
    seed = netgen.replication_seed(master_seed, "effective-rank", model, n, rep)
    M = netgen.probability_matrix(netgen.NetworkModelSpec(model, n), seed)
    s = np.linalg.svd(M, compute_uv=False)
    ratio = float(s.sum() / math.sqrt(np.sum(s**2)))
    return ratio**2, ratio


def mse_replication(model, n, rep, master_seed, solver_options=None):
    """(mse, converged) of one full simulate-then-estimate pipeline."""
    K = netgen.default_trait_count(n)
    seed = netgen.replication_seed(master_seed, "mse", model, n, rep)
    M, _, W, Y = netgen.simulate_ard(netgen.NetworkModelSpec(model, n), K, seed)
    result = solver.fit(solver.Problem(Y, W), solver.SolverConfig(**(solver_options or {})))
    return diagnostics.mse(result.estimate, M), result.converged


def _run_task(task):
    experiment, model, n, rep, master_seed, solver_options = task
    if experiment == "effective-rank":
        return effective_rank_replication(model, n, rep, master_seed)
    return mse_replication(model, n, rep, master_seed, solver_options)


def run_cell(experiment, model, n, reps, master_seed, parallel=1, solver_options=None, pool=None):
    if experiment not in EXPERIMENTS:
        raise ValueError(f"unknown experiment {experiment!r}")
    if reps < 1:
        raise ValueError("reps must be at least 1")
    model = netgen.NetworkModelSpec(model, 1).variant.value
    tasks = [(experiment, model, n, r, master_seed, solver_options) for r in range(reps)]
    start = time.perf_counter()
    if pool is not None:
        results = list(pool.map(_run_task, tasks, chunksize=max(1, reps // (4 * parallel))))
    else:
        results = [_run_task(t) for t in tasks]
    elapsed = time.perf_counter() - start

    if experiment == "effective-rank":
        mean, se = _mean_se([r[0] for r in results])
        ratio_mean, ratio_se = _mean_se([r[1] for r in results])
        return CellRecord(experiment, model, n, None, reps, mean, se, master_seed, elapsed,
                          ratio_mean=ratio_mean, ratio_se=ratio_se)
    mean, se = _mean_se([r[0] for r in results])
    nonconverged = sum(1 for r in results if not r[1])
    return CellRecord(experiment, model, n, netgen.default_trait_count(n), reps, mean, se,
                      master_seed, elapsed, nonconverged=nonconverged)


def run_benchmark(experiment, models, ns, reps, master_seed, parallel=1, solver_options=None):
    records = []
    if parallel > 1:
        with ProcessPoolExecutor(max_workers=parallel) as pool:
            for model in models:
                for n in ns:
                    records.append(run_cell(experiment, model, n, reps, master_seed, parallel,
                                            solver_options, pool))
    else:
        for model in models:
            for n in ns:
                records.append(run_cell(experiment, model, n, reps, master_seed, 1, solver_options))
    return records


def render_table(records):
    """Models as rows, n as columns, 'mean (se)' cells."""
    if not records:
        return ""
    ns = sorted({r.n for r in records})
    models = list(dict.fromkeys(r.model for r in records))
    by_key = {(r.model, r.n): r for r in records}
    digits = 2 if records[0].experiment == "effective-rank" else 5
    header = ["n"] + [str(n) for n in ns]
    lines = [header]
    for model in models:
        row = [model]
        for n in ns:
            r = by_key.get((model, n))
            row.append("" if r is None else f"{r.mean:.{digits}f} ({r.se:.{digits}f})")
        lines.append(row)
        if records[0].experiment == "effective-rank":
            ratio_row = [f"{model} ratio"]
            for n in ns:
                r = by_key.get((model, n))
                ratio_row.append("" if r is None else f"{r.ratio_mean:.2f} ({r.ratio_se:.2f})")
            lines.append(ratio_row)
    widths = [max(len(line[i]) for line in lines) for i in range(len(header))]
    return "\n".join(
        "  ".join(cell.ljust(w) if i == 0 else cell.rjust(w) for i, (cell, w) in enumerate(zip(line, widths)))
        for line in lines
    )
