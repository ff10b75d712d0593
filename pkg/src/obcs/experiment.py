"""Sweep harness: random sparse truths, sign measurements at each grid
size, every configured recovery method, scored records out.

The seeding discipline is the load-bearing part. Every random draw comes
from a SeedSequence spawned off the master seed with a purpose-specific
key: (trial, 0) for the truth, (trial, 1, m) for the measurement rows and
offsets, (trial, 2, m, labelset) for label noise, where labelset 0 is the
offset-free labels and 1 the offset labels. Keys carry the grid value m
itself, not its position, so trimming or extending the grid never touches
the records of surviving cells, and adding trials never reshuffles earlier
ones.

Records are scored even when a hard-constraint method reports infeasible:
the estimate is the zero vector, mse is taken against it, and the status
column says why. That keeps baselines plottable next to the slack methods.
"""

from __future__ import annotations

import csv
import json
import time
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import InvalidArgumentError, ResourceLimitError
from .measurement import (
    GAUSSIAN_IID,
    MeasurementSet,
    NoiseChannel,
    SamplingDistribution,
    apply_channel,
    measure,
    sample_rows,
)
from .metrics import recovery_report
from .sparse_core import SparseVector, normalize_euclidean
from .solvers import (
    METHOD_KSW,
    METHOD_L1SVM,
    METHOD_L1SVM_AFFINE,
    METHOD_PV,
    METHODS,
    RecoveryConfig,
    recover,
)

AFFINE_METHODS = (METHOD_L1SVM_AFFINE, METHOD_KSW)
LINEAR_METHODS = (METHOD_L1SVM, METHOD_PV)

RECORD_FIELDS = ("method", "m", "trial_index", "mse", "support_hits",
                 "gen_error", "status", "wall_time")
SUMMARY_FIELDS = ("method", "m", "min", "q25", "median", "q75", "max", "mean")

SCALE_NOTE = ("one-bit recovery stays meaningful for m > n; "
              "the grid is not capped at the ambient dimension")


@dataclass(frozen=True)
class ExperimentConfig:
    """One sweep: fixed (n, k), a measurement-count grid, repeated trials.

    methods may mix offset-free and offset programs; the harness draws one
    row set per (trial, m) and derives both label sets from it, so the two
    families see the same geometry. lambda_weight and tau feed the solver
    config unchanged; flip_probability > 0 routes labels through the
    symmetric flip channel before solving.
    """

    n: int
    k: int
    m_grid: tuple[int, ...]
    trials: int
    distribution: SamplingDistribution = field(
        default_factory=lambda: SamplingDistribution(kind=GAUSSIAN_IID, offset_scale=1.0))
    flip_probability: float = 0.0
    methods: tuple[str, ...] = (METHOD_L1SVM_AFFINE,)
    lambda_weight: float = 0.05
    tau: float = 1.0
    master_seed: int = 0

    def __post_init__(self) -> None:
        if not isinstance(self.n, (int, np.integer)) or self.n < 1:
            raise InvalidArgumentError("n must be a positive integer")
        if not isinstance(self.k, (int, np.integer)) or not 1 <= self.k <= self.n:
            raise InvalidArgumentError("k must be an integer in [1, n]")
        grid = tuple(self.m_grid)
        object.__setattr__(self, "m_grid", grid)
        if not grid:
            raise InvalidArgumentError("m_grid must be nonempty")
        for m in grid:
            if not isinstance(m, (int, np.integer)) or m < 1:
                raise InvalidArgumentError("m_grid entries must be positive integers")
        if any(b <= a for a, b in zip(grid, grid[1:])):
            raise InvalidArgumentError("m_grid must be strictly ascending")
        if not isinstance(self.trials, (int, np.integer)) or self.trials < 1:
            raise InvalidArgumentError("trials must be a positive integer")
        # delegate the channel and solver knob validation to their owners
        NoiseChannel(flip_probability=float(self.flip_probability))
        RecoveryConfig(lambda_weight=self.lambda_weight, tau=self.tau)
        methods = tuple(self.methods)
        object.__setattr__(self, "methods", methods)
        if not methods:
            raise InvalidArgumentError("methods must be nonempty")
        if len(set(methods)) != len(methods):
            raise InvalidArgumentError("methods must not repeat")
        unknown = [x for x in methods if x not in METHODS]
        if unknown:
            raise InvalidArgumentError(
                f"unknown methods {unknown}; expected a subset of {METHODS}")
        needs_offsets = [x for x in methods if x in AFFINE_METHODS]
        if needs_offsets and self.distribution.offset_scale == 0.0:
            raise InvalidArgumentError(
                f"{needs_offsets} need offsets; set distribution.offset_scale > 0")
        if not isinstance(self.master_seed, (int, np.integer)) or self.master_seed < 0:
            raise InvalidArgumentError("master_seed must be a nonnegative integer")

    @classmethod
    def desk(cls) -> "ExperimentConfig":
        """Runs in minutes on one core; the default for tests and scripts."""
        return cls(n=200, k=5, m_grid=(100, 250, 500, 1000, 1500, 2000),
                   trials=10)

    @classmethod
    def paper_scale(cls) -> "ExperimentConfig":
        """The study's published scale (n=1000, k=20, 30 trials). Expect
        hours, not minutes."""
        return cls(n=1000, k=20, m_grid=(100, 250, 500, 1000, 1500, 2000),
                   trials=30)

    def to_dict(self) -> dict:
        return {
            "n": int(self.n),
            "k": int(self.k),
            "m_grid": [int(m) for m in self.m_grid],
            "trials": int(self.trials),
            "distribution": self.distribution.to_dict(),
            "flip_probability": float(self.flip_probability),
            "methods": list(self.methods),
            "lambda": float(self.lambda_weight),
            "tau": float(self.tau),
            "master_seed": int(self.master_seed),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        try:
            kwargs = {
                "n": data["n"],
                "k": data["k"],
                "m_grid": tuple(data["m_grid"]),
                "trials": data["trials"],
            }
        except KeyError as exc:
            raise InvalidArgumentError(f"config is missing key {exc}") from exc
        if "distribution" in data:
            kwargs["distribution"] = SamplingDistribution.from_dict(data["distribution"])
        if "flip_probability" in data:
            kwargs["flip_probability"] = float(data["flip_probability"])
        if "methods" in data:
            kwargs["methods"] = tuple(data["methods"])
        if "lambda" in data:
            kwargs["lambda_weight"] = float(data["lambda"])
        if "tau" in data:
            kwargs["tau"] = float(data["tau"])
        if "master_seed" in data:
            kwargs["master_seed"] = data["master_seed"]
        return cls(**kwargs)


@dataclass(frozen=True)
class TrialRecord:
    """One solver run on one instance. gen_error is None when the estimate
    had no direction to compare (zero vector, e.g. infeasible status)."""

    method: str
    m: int
    trial_index: int
    mse: float
    support_hits: int
    gen_error: float | None
    status: str
    wall_time: float


def generate_truth(n: int, k: int, seed) -> SparseVector:
    """Unit-norm k-sparse truth: support uniform over k-subsets, values
    i.i.d. standard normal before normalization."""
    if not isinstance(n, (int, np.integer)) or n < 1:
        raise InvalidArgumentError("n must be a positive integer")
    if not isinstance(k, (int, np.integer)) or not 1 <= k <= n:
        raise InvalidArgumentError("k must be an integer in [1, n]")
    rng = np.random.default_rng(seed)
    support = rng.choice(int(n), size=int(k), replace=False)
    values = np.zeros(int(n))
    values[support] = rng.standard_normal(int(k))
    unit = normalize_euclidean(values)
    return SparseVector(values=unit.values, sparsity_budget=int(k))


def _labels_for(cfg: ExperimentConfig, truth: np.ndarray, rows: np.ndarray,
                offsets: np.ndarray | None, trial: int, m: int,
                labelset: int) -> np.ndarray:
    labels = measure(truth, rows, offsets if labelset == 1 else None)
    if cfg.flip_probability > 0.0:
        noise_seed = np.random.SeedSequence(
            entropy=int(cfg.master_seed), spawn_key=(trial, 2, m, labelset))
        labels = apply_channel(labels, NoiseChannel(float(cfg.flip_probability)),
                               noise_seed)
    return labels


def run_single_trial(cfg: ExperimentConfig, trial_index: int) -> list[TrialRecord]:
    """All records of one trial: one truth, one row draw per grid size,
    every configured method on the shared instance."""
    t = int(trial_index)
    truth = generate_truth(cfg.n, cfg.k,
                           np.random.SeedSequence(entropy=int(cfg.master_seed),
                                                  spawn_key=(t, 0)))
    solver_cfg = RecoveryConfig(lambda_weight=cfg.lambda_weight, tau=cfg.tau,
                                truncation_k=int(cfg.k))
    records: list[TrialRecord] = []
    wants_linear = any(x in LINEAR_METHODS for x in cfg.methods)
    wants_affine = any(x in AFFINE_METHODS for x in cfg.methods)
    for m in cfg.m_grid:
        rows_seed = np.random.SeedSequence(entropy=int(cfg.master_seed),
                                           spawn_key=(t, 1, int(m)))
        rows, offsets = sample_rows(cfg.distribution, int(m), int(cfg.n), rows_seed)
        sets: dict[str, MeasurementSet] = {}
        if wants_linear:
            labels = _labels_for(cfg, truth.values, rows, offsets, t, int(m), 0)
            sets["linear"] = MeasurementSet(rows=rows, labels=labels)
        if wants_affine:
            labels = _labels_for(cfg, truth.values, rows, offsets, t, int(m), 1)
            sets["affine"] = MeasurementSet(rows=rows, labels=labels, offsets=offsets)
        for method in cfg.methods:
            ms = sets["affine" if method in AFFINE_METHODS else "linear"]
            start = time.perf_counter()
            try:
                solution = recover(ms, method, solver_cfg)
                estimate = solution.estimate
                status = solution.status
            except ResourceLimitError:
                estimate = SparseVector(values=np.zeros(int(cfg.n)))
                status = "resource_limit"
            elapsed = time.perf_counter() - start
            report = recovery_report(estimate, truth, int(cfg.k))
            records.append(TrialRecord(
                method=method,
                m=int(m),
                trial_index=t,
                mse=report.mse,
                support_hits=report.support_hits,
                gen_error=report.gen_error_J,
                status=status,
                wall_time=elapsed,
            ))
    return records


def _trial_task(args: tuple[ExperimentConfig, int]) -> list[TrialRecord]:
    return run_single_trial(*args)


def run_experiment(cfg: ExperimentConfig, *, workers: int = 1) -> list[TrialRecord]:
    """Run every trial and return records sorted by (method, m, trial).

    workers > 1 fans trials out over a process pool; the sort makes the
    output order independent of completion order, so the worker count
    never changes the persisted artifacts.
    """
    if not isinstance(workers, (int, np.integer)) or workers < 1:
        raise InvalidArgumentError("workers must be a positive integer")
    tasks = [(cfg, t) for t in range(int(cfg.trials))]
    if workers == 1:
        batches = [_trial_task(task) for task in tasks]
    else:
        with ProcessPoolExecutor(max_workers=int(workers)) as pool:
            batches = list(pool.map(_trial_task, tasks))
    records = [record for batch in batches for record in batch]
    records.sort(key=lambda r: (r.method, r.m, r.trial_index))
    return records


@dataclass(frozen=True)
class SummaryRow:
    """Five-number summary plus mean of one (method, m) group's mse."""

    method: str
    m: int
    min: float
    q25: float
    median: float
    q75: float
    max: float
    mean: float


def aggregate(records: list[TrialRecord]) -> list[SummaryRow]:
    """Per-(method, m) mse summaries, quartiles by linear interpolation,
    rows sorted by (method, m). Groups with no finite mse are dropped with
    a warning."""
    if not records:
        raise InvalidArgumentError("no records to aggregate")
    groups: dict[tuple[str, int], list[float]] = {}
    for r in records:
        groups.setdefault((r.method, int(r.m)), []).append(float(r.mse))
    out: list[SummaryRow] = []
    for (method, m) in sorted(groups):
        values = np.asarray([v for v in groups[(method, m)] if np.isfinite(v)])
        if values.size == 0:
            warnings.warn(f"group ({method}, m={m}) has no finite mse; omitted",
                          stacklevel=2)
            continue
        lo, q25, med, q75, hi = np.quantile(values, [0.0, 0.25, 0.5, 0.75, 1.0])
        out.append(SummaryRow(method=method, m=m, min=float(lo), q25=float(q25),
                              median=float(med), q75=float(q75), max=float(hi),
                              mean=float(np.mean(values))))
    return out


def _fmt(value: float | int | None) -> str:
    if value is None:
        return ""
    return repr(float(value)) if isinstance(value, float) else str(value)


def save_records_csv(records: list[TrialRecord], path) -> None:
    """TrialRecord rows with a header; floats via repr, None as empty."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(RECORD_FIELDS)
        for r in records:
            writer.writerow([r.method, r.m, r.trial_index, _fmt(r.mse),
                             r.support_hits, _fmt(r.gen_error), r.status,
                             _fmt(r.wall_time)])


def load_records_csv(path) -> list[TrialRecord]:
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or tuple(reader.fieldnames) != RECORD_FIELDS:
            raise InvalidArgumentError(
                f"records csv must have columns {','.join(RECORD_FIELDS)}")
        out = []
        for row in reader:
            out.append(TrialRecord(
                method=row["method"],
                m=int(row["m"]),
                trial_index=int(row["trial_index"]),
                mse=float(row["mse"]),
                support_hits=int(row["support_hits"]),
                gen_error=float(row["gen_error"]) if row["gen_error"] else None,
                status=row["status"],
                wall_time=float(row["wall_time"]),
            ))
    return out


def save_summary_csv(rows: list[SummaryRow], path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(SUMMARY_FIELDS)
        for r in rows:
            writer.writerow([r.method, r.m, _fmt(r.min), _fmt(r.q25),
                             _fmt(r.median), _fmt(r.q75), _fmt(r.max),
                             _fmt(r.mean)])


def write_outputs(cfg: ExperimentConfig, records: list[TrialRecord], out_dir) -> dict:
    """Persist records.csv, summary.csv and meta.json under out_dir;
    returns the paths."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    records_path = out / "records.csv"
    summary_path = out / "summary.csv"
    meta_path = out / "meta.json"
    save_records_csv(records, records_path)
    save_summary_csv(aggregate(records), summary_path)
    from . import __version__
    meta = {
        "config": cfg.to_dict(),
        "version": __version__,
        "master_seed": int(cfg.master_seed),
        "note": SCALE_NOTE,
    }
    with open(meta_path, "w") as fh:
        json.dump(meta, fh, indent=2)
        fh.write("\n")
    return {"records": records_path, "summary": summary_path, "meta": meta_path}
