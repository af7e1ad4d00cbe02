"""Experiment harness: size/power studies over a scenario grid.

A configuration spans ``cases x transforms x m_grid x rho_grid``; every
grid cell runs ``reps`` independent replicates of data generation followed
by each requested test, and the rejection frequency per (cell, method)
becomes one :class:`PowerRecord`.  Replicate seeds derive from
``(master_seed, cell_index, replicate)``, cells are independent work
items, and aggregation is order-free, so results are identical for any
thread count and two runs of the same configuration produce byte-identical
CSV output (modulo the ``elapsed_ms`` column).
"""

from __future__ import annotations

import concurrent.futures
import itertools
import json
import math
import os
import time
from dataclasses import dataclass, fields

from .dep_tests import (
    METHODS,
    dcor_test_permutation,
    xi_test_asymptotic,
    xi_test_permutation,
)
from .errors import DatasetFormatError, InvalidInputError
from .manifold_gen import (
    CASES,
    TRANSFORMS,
    ScenarioSpec,
    generate,
    linear_embedding_matrix,
    matrix_hash,
)
from .null_constants import default_null_constants

CSV_HEADER = "case,transform,m,rho,method,n,reps,rejection_rate,mc_stderr,r_matrix_hash,elapsed_ms"


@dataclass(frozen=True)
class ExperimentConfig:
    cases: tuple
    transforms: tuple
    m_grid: tuple
    rho_grid: tuple
    n: int = 100
    reps: int = 1000
    alpha: float = 0.05
    methods: tuple = ("xi_asymptotic", "dcor_permutation")
    B: int = 199
    master_seed: int = 0
    threads: int | None = None  # None means auto
    xi_tail: str = "right"  # "two_sided" reproduces two-sided-threshold studies

    def __post_init__(self):
        object.__setattr__(self, "cases", tuple(self.cases))
        object.__setattr__(self, "transforms", tuple(self.transforms))
        object.__setattr__(self, "m_grid", tuple(int(m) for m in self.m_grid))
        object.__setattr__(self, "rho_grid", tuple(float(r) for r in self.rho_grid))
        object.__setattr__(self, "methods", tuple(self.methods))
        for case in self.cases:
            if case not in CASES:
                raise InvalidInputError(f"unknown case {case!r}")
        for transform in self.transforms:
            if transform not in TRANSFORMS:
                raise InvalidInputError(f"unknown transform {transform!r}")
        for method in self.methods:
            if method not in METHODS:
                raise InvalidInputError(f"unknown method {method!r}")
        if not (self.cases and self.transforms and self.m_grid and self.rho_grid
                and self.methods):
            raise InvalidInputError("grid lists must be non-empty")
        if any(m < 1 for m in self.m_grid):
            raise InvalidInputError("m_grid entries must be >= 1")
        if any(r < 0 for r in self.rho_grid):
            raise InvalidInputError("rho_grid entries must be >= 0")
        if self.reps < 1:
            raise InvalidInputError(f"reps must be >= 1, got {self.reps}")
        if self.n < 4:
            raise InvalidInputError(f"n must be >= 4, got {self.n}")
        if not 0.0 < self.alpha < 1.0:
            raise InvalidInputError(f"alpha must lie in (0, 1), got {self.alpha}")
        if self.B < 19:
            raise InvalidInputError(f"B must be >= 19, got {self.B}")
        if self.xi_tail not in ("right", "two_sided"):
            raise InvalidInputError(f"unknown xi_tail {self.xi_tail!r}")


@dataclass
class PowerRecord:
    """Rejection frequency of one method in one grid cell.

    ``rejection_rate * reps`` is an exact integer count and
    ``mc_stderr = sqrt(p(1-p)/reps)``.  Cells that cannot be generated
    (infeasible gaussian correlation) carry ``skip_reason`` and NaN rates.
    """

    case: str
    transform: str
    m: int
    rho: float
    method: str
    n: int
    reps: int
    rejection_rate: float
    mc_stderr: float
    r_matrix_hash: str | None
    elapsed_ms: int
    skip_reason: str | None = None


def config_from_dict(raw: dict) -> ExperimentConfig:
    """Build a configuration from parsed JSON; unknown keys are rejected."""
    known = {f.name for f in fields(ExperimentConfig)}
    unknown = set(raw) - known
    if unknown:
        raise DatasetFormatError(f"unknown config keys: {sorted(unknown)}")
    kwargs = dict(raw)
    if kwargs.get("threads") in ("auto", None):
        kwargs["threads"] = None
    try:
        return ExperimentConfig(**kwargs)
    except TypeError as exc:
        raise DatasetFormatError(f"bad config: {exc}") from None


def load_config(path: str) -> ExperimentConfig:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            raw = json.load(fh)
        except json.JSONDecodeError as exc:
            raise DatasetFormatError(f"{path}: {exc}") from None
    if not isinstance(raw, dict):
        raise DatasetFormatError(f"{path}: config must be a JSON object")
    return config_from_dict(raw)


def _run_cell(cell_index: int, case: str, transform: str, m: int, rho: float,
              config: ExperimentConfig) -> list[PowerRecord]:
    start = time.perf_counter()
    base = dict(case=case, transform=transform, m=m, rho=rho, n=config.n,
                reps=config.reps)
    if case == "gaussian" and m * rho**2 >= 1.0:
        return [PowerRecord(**base, method=method, rejection_rate=math.nan,
                            mc_stderr=math.nan, r_matrix_hash=None, elapsed_ms=0,
                            skip_reason=f"gaussian correlation infeasible: m*rho^2="
                                        f"{m * rho**2:g} >= 1")
                for method in config.methods]
    r_hash = (matrix_hash(linear_embedding_matrix(m, config.master_seed))
              if transform == "linear_embed" else None)
    constants = (default_null_constants(m)
                 if "xi_asymptotic" in config.methods else None)
    counts = dict.fromkeys(config.methods, 0)
    for rep in range(config.reps):
        spec = ScenarioSpec(case=case, transform=transform, m=m, rho=rho,
                            n=config.n, seed=(config.master_seed, cell_index, rep, 0),
                            r_seed=config.master_seed)
        data = generate(spec)
        for k, method in enumerate(config.methods):
            seed = (config.master_seed, cell_index, rep, 1 + k)
            if method == "xi_asymptotic":
                res = xi_test_asymptotic(data.x, data.y, m, config.alpha, constants,
                                         tail=config.xi_tail)
            elif method == "xi_permutation":
                res = xi_test_permutation(data.x, data.y, config.alpha,
                                          B=config.B, seed=seed)
            else:
                res = dcor_test_permutation(data.x, data.y, config.alpha,
                                            B=config.B, seed=seed)
            counts[method] += res.reject
    elapsed_ms = int(1000 * (time.perf_counter() - start))
    records = []
    for method in config.methods:
        p_hat = counts[method] / config.reps
        stderr = math.sqrt(p_hat * (1.0 - p_hat) / config.reps)
        records.append(PowerRecord(**base, method=method, rejection_rate=p_hat,
                                   mc_stderr=stderr, r_matrix_hash=r_hash,
                                   elapsed_ms=elapsed_ms))
    return records


def run_experiment(config: ExperimentConfig, log=None) -> list[PowerRecord]:
    """Run every grid cell of a configuration and return sorted records.

    Cells run on a thread pool (``config.threads``, default: CPU count);
    per-cell seeds are deterministic, so the output does not depend on the
    thread count.  Infeasible gaussian cells are recorded as skipped (see
    :class:`PowerRecord`) and the run continues.
    """
    cells = list(enumerate(itertools.product(
        config.cases, config.transforms, config.m_grid, config.rho_grid)))
    if "xi_asymptotic" in config.methods:
        for m in sorted(set(config.m_grid)):
            default_null_constants(m)  # warm the cache once, off the pool
    workers = config.threads or min(32, os.cpu_count() or 1)
    results: dict[int, list[PowerRecord]] = {}

    def run(item):
        index, (case, transform, m, rho) = item
        records = _run_cell(index, case, transform, m, rho, config)
        if log is not None:
            for rec in records:
                tag = (f"skipped ({rec.skip_reason})" if rec.skip_reason
                       else f"rate={rec.rejection_rate:.4f}")
                log(f"{rec.case}/{rec.transform} m={rec.m} rho={rec.rho:g} "
                    f"{rec.method}: {tag}")
        results[index] = records

    if workers > 1 and len(cells) > 1:
        with concurrent.futures.ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(run, cells))
    else:
        for item in cells:
            run(item)

    flat = [rec for index in sorted(results) for rec in results[index]]
    flat.sort(key=lambda r: (r.case, r.transform, r.m, r.rho, r.method))
    return flat


def records_to_csv(records: list[PowerRecord], stream) -> None:
    """Write records under the fixed schema (floats at 6 significant digits)."""
    stream.write(CSV_HEADER + "\n")
    for r in records:
        stream.write(",".join([
            r.case, r.transform, str(r.m), f"{r.rho:.6g}", r.method,
            str(r.n), str(r.reps), f"{r.rejection_rate:.6g}",
            f"{r.mc_stderr:.6g}", r.r_matrix_hash or "", str(r.elapsed_ms),
        ]) + "\n")
