"""Measurement row sampling, one-bit quantization, and symmetric label noise.

Rows are drawn from a named distribution with a seeded numpy Generator
(PCG64). Seeds may be plain integers or numpy SeedSequence objects; the
experiment harness uses spawn keys so that every (trial, grid cell) has its
own substream.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgumentError
from .sparse_core import as_float_vector, signs_bipolar

GAUSSIAN_IID = "gaussian_iid"
RADIAL_GAUSSIAN = "radially_invariant_gaussian"
RADEMACHER_ATOMIC = "rademacher_atomic"
CUSTOM_ATOMIC = "custom_atomic"

DISTRIBUTION_KINDS = (GAUSSIAN_IID, RADIAL_GAUSSIAN, RADEMACHER_ATOMIC, CUSTOM_ATOMIC)


@dataclass(frozen=True)
class SamplingDistribution:
    """Row distribution plus the offset scale for affine measurements.

    offset_scale > 0 makes sample_rows also draw offsets b ~ N(0, scale^2);
    zero means purely linear measurements. custom_atomic draws rows from the
    given finite point set with the given weights.
    """

    kind: str
    offset_scale: float = 0.0
    points: np.ndarray | None = None
    weights: np.ndarray | None = None

    def __post_init__(self) -> None:
        if self.kind not in DISTRIBUTION_KINDS:
            raise InvalidArgumentError(
                f"unknown distribution kind {self.kind!r}; expected one of {DISTRIBUTION_KINDS}")
        if not np.isfinite(self.offset_scale) or self.offset_scale < 0:
            raise InvalidArgumentError("offset_scale must be finite and >= 0")
        if self.kind == CUSTOM_ATOMIC:
            if self.points is None or self.weights is None:
                raise InvalidArgumentError("custom_atomic needs points and weights")
            pts = np.asarray(self.points, dtype=float)
            if pts.ndim != 2 or pts.shape[0] == 0:
                raise InvalidArgumentError("points must be a nonempty (q, n) array")
            if not np.all(np.isfinite(pts)):
                raise InvalidArgumentError("points must be finite")
            w = as_float_vector(self.weights, "weights")
            if w.size != pts.shape[0]:
                raise InvalidArgumentError("one weight per point required")
            if np.any(w < 0) or abs(float(w.sum()) - 1.0) > 1e-12:
                raise InvalidArgumentError("weights must be nonnegative and sum to 1")
            pts = pts.copy()
            pts.setflags(write=False)
            w = w.copy()
            w.setflags(write=False)
            object.__setattr__(self, "points", pts)
            object.__setattr__(self, "weights", w)
        elif self.points is not None or self.weights is not None:
            raise InvalidArgumentError(f"{self.kind} takes no points/weights")

    def to_dict(self) -> dict:
        out = {"kind": self.kind, "offset_scale": float(self.offset_scale)}
        if self.kind == CUSTOM_ATOMIC:
            out["points"] = [[float(v) for v in row] for row in self.points]
            out["weights"] = [float(w) for w in self.weights]
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "SamplingDistribution":
        try:
            kind = data["kind"]
        except (KeyError, TypeError) as exc:
            raise InvalidArgumentError("distribution dict needs a 'kind'") from exc
        return cls(
            kind=kind,
            offset_scale=float(data.get("offset_scale", 0.0)),
            points=np.asarray(data["points"], dtype=float) if "points" in data else None,
            weights=np.asarray(data["weights"], dtype=float) if "weights" in data else None,
        )


@dataclass(frozen=True)
class NoiseChannel:
    """Symmetric label-flip channel; each label is negated independently
    with probability flip_probability in [0, 0.5)."""

    flip_probability: float

    def __post_init__(self) -> None:
        a = float(self.flip_probability)
        if not np.isfinite(a) or not 0.0 <= a < 0.5:
            raise InvalidArgumentError("flip_probability must lie in [0, 0.5)")
        object.__setattr__(self, "flip_probability", a)


def composed_flip_probability(alpha1: float, alpha2: float) -> float:
    """Effective rate of two independent flip channels in series."""
    c1, c2 = NoiseChannel(alpha1), NoiseChannel(alpha2)
    a1, a2 = c1.flip_probability, c2.flip_probability
    return a1 * (1.0 - a2) + a2 * (1.0 - a1)


@dataclass(frozen=True)
class MeasurementSet:
    """m measurement rows with bipolar labels and optional affine offsets."""

    rows: np.ndarray
    labels: np.ndarray
    offsets: np.ndarray | None = None

    def __post_init__(self) -> None:
        rows = np.asarray(self.rows, dtype=float)
        if rows.ndim != 2 or rows.shape[0] == 0 or rows.shape[1] == 0:
            raise InvalidArgumentError(f"rows must be a nonempty (m, n) array, got {rows.shape}")
        if not np.all(np.isfinite(rows)):
            raise InvalidArgumentError("rows must be finite")
        labels = np.asarray(self.labels)
        if labels.shape != (rows.shape[0],):
            raise InvalidArgumentError("one label per row required")
        if not np.all(np.isin(labels, (-1, 1))):
            raise InvalidArgumentError("labels must be +1 or -1")
        labels = labels.astype(np.int64)
        rows = rows.copy()
        rows.setflags(write=False)
        labels.setflags(write=False)
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "labels", labels)
        if self.offsets is not None:
            off = as_float_vector(self.offsets, "offsets")
            if off.size != rows.shape[0]:
                raise InvalidArgumentError("one offset per row required")
            off = off.copy()
            off.setflags(write=False)
            object.__setattr__(self, "offsets", off)

    @property
    def count(self) -> int:
        return int(self.rows.shape[0])

    @property
    def dim(self) -> int:
        return int(self.rows.shape[1])


def sample_rows(dist: SamplingDistribution, m: int, n: int, seed):
    """Draw m measurement rows in R^n; returns (rows, offsets_or_None).

    Draw order is pinned: rows first, then offsets, so adding offsets never
    changes the rows for a given seed.
    """
    if m < 1 or n < 1:
        raise InvalidArgumentError("m and n must be positive")
    rng = np.random.default_rng(seed)
    if dist.kind in (GAUSSIAN_IID, RADIAL_GAUSSIAN):
        rows = rng.standard_normal((m, n))
    elif dist.kind == RADEMACHER_ATOMIC:
        rows = (rng.integers(0, 2, size=(m, n)) * 2 - 1).astype(float)
    else:
        if dist.points.shape[1] != n:
            raise InvalidArgumentError(
                f"custom_atomic points live in R^{dist.points.shape[1]}, asked for n={n}")
        idx = rng.choice(dist.points.shape[0], size=m, p=dist.weights)
        rows = dist.points[idx].copy()
    offsets = None
    if dist.offset_scale > 0:
        offsets = rng.normal(0.0, dist.offset_scale, size=m)
    return rows, offsets


def measure(x, rows, offsets=None) -> np.ndarray:
    """One-bit measurements sign(<a_i, x> [+ b_i]) as +/-1 labels."""
    vec = x.values if hasattr(x, "values") else as_float_vector(x, "x")
    rows = np.asarray(rows, dtype=float)
    if rows.ndim != 2 or rows.shape[1] != vec.size:
        raise InvalidArgumentError(
            f"rows shape {rows.shape} incompatible with x of dim {vec.size}")
    scores = rows @ vec
    if offsets is not None:
        off = as_float_vector(offsets, "offsets")
        if off.size != rows.shape[0]:
            raise InvalidArgumentError("one offset per row required")
        scores = scores + off
    return signs_bipolar(scores)


def apply_channel(labels, channel: NoiseChannel, seed) -> np.ndarray:
    """Independently negate each label with the channel's flip probability."""
    labels = np.asarray(labels)
    if not np.all(np.isin(labels, (-1, 1))):
        raise InvalidArgumentError("labels must be +1 or -1")
    labels = labels.astype(np.int64)
    if channel.flip_probability == 0.0:
        return labels.copy()
    rng = np.random.default_rng(seed)
    flips = rng.random(labels.size) < channel.flip_probability
    return np.where(flips, -labels, labels)


def save_measurements_csv(ms: MeasurementSet, path) -> None:
    """Write rows as a_1..a_n[,b],y with a header; floats use repr."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        header = [f"a_{j + 1}" for j in range(ms.dim)]
        if ms.offsets is not None:
            header.append("b")
        header.append("y")
        writer.writerow(header)
        for i in range(ms.count):
            record = [repr(float(v)) for v in ms.rows[i]]
            if ms.offsets is not None:
                record.append(repr(float(ms.offsets[i])))
            record.append(str(int(ms.labels[i])))
            writer.writerow(record)


def load_measurements_csv(path) -> MeasurementSet:
    """Read the schema written by save_measurements_csv."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise InvalidArgumentError(f"{path}: empty file") from None
        body = [row for row in reader if row]
    if not header or header[-1] != "y":
        raise InvalidArgumentError(f"{path}: last column must be 'y'")
    has_offsets = len(header) >= 2 and header[-2] == "b"
    n = len(header) - (2 if has_offsets else 1)
    expected = [f"a_{j + 1}" for j in range(n)]
    if header[:n] != expected:
        raise InvalidArgumentError(
            f"{path}: measurement columns must be a_1..a_{n}, got {header[:n]}")
    if not body:
        raise InvalidArgumentError(f"{path}: no measurement rows")
    try:
        rows = np.array([[float(v) for v in row[:n]] for row in body])
        labels = np.array([int(float(row[-1])) for row in body])
        offsets = np.array([float(row[n]) for row in body]) if has_offsets else None
    except (ValueError, IndexError) as exc:
        raise InvalidArgumentError(f"{path}: malformed row: {exc}") from exc
    return MeasurementSet(rows=rows, labels=labels, offsets=offsets)
