"""Core vector types and operations for one-bit sparse recovery.

Vectors are stored dense (numpy float64) with an optional sparsity budget k.
Labels throughout the package are bipolar integers in {-1, +1}; the sign of
zero is +1, so every measurement maps to a label.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateInputError, InvalidArgumentError


def as_float_vector(values, name: str = "vector") -> np.ndarray:
    """Coerce to a finite 1-d float64 array or raise."""
    arr = np.asarray(values, dtype=float)
    if arr.ndim != 1:
        raise InvalidArgumentError(f"{name} must be 1-d, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise InvalidArgumentError(f"{name} entries must be finite")
    return arr


@dataclass(frozen=True)
class SparseVector:
    """A vector in R^n, optionally certified to carry at most k nonzeros.

    The stored array is a defensive copy with the write flag cleared, so a
    SparseVector never mutates after construction.
    """

    values: np.ndarray
    sparsity_budget: int | None = None

    def __post_init__(self) -> None:
        arr = as_float_vector(self.values).copy()
        if arr.size == 0:
            raise InvalidArgumentError("vector must have at least one entry")
        arr.setflags(write=False)
        object.__setattr__(self, "values", arr)
        k = self.sparsity_budget
        if k is not None:
            if not isinstance(k, (int, np.integer)) or k < 1:
                raise InvalidArgumentError("sparsity_budget must be a positive integer")
            object.__setattr__(self, "sparsity_budget", int(k))
            nnz = int(np.count_nonzero(arr))
            if nnz > k:
                raise InvalidArgumentError(
                    f"vector has {nnz} nonzeros, over the budget of {k}")

    @property
    def ambient_dim(self) -> int:
        return int(self.values.size)

    @property
    def support(self) -> np.ndarray:
        """Indices of the nonzero entries, ascending."""
        return np.flatnonzero(self.values)


def _values_of(v) -> np.ndarray:
    return v.values if isinstance(v, SparseVector) else as_float_vector(v)


def sign_bipolar(t: float) -> int:
    """Bipolar sign: +1 for t >= 0 (zero included), -1 for t < 0."""
    t = float(t)
    if not math.isfinite(t):
        raise InvalidArgumentError("sign of a non-finite value")
    return 1 if t >= 0.0 else -1


def signs_bipolar(values) -> np.ndarray:
    """Vectorized bipolar sign; returns an int64 array of +/-1."""
    arr = np.asarray(values, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise InvalidArgumentError("sign of a non-finite value")
    return np.where(arr >= 0.0, 1, -1).astype(np.int64)


def truncate_top_k(v, k: int) -> SparseVector:
    """Keep the k largest-magnitude entries and zero the rest.

    Ties break toward the lowest index. The result has exactly
    min(k, nnz(v)) nonzeros; k = 0 gives the zero vector and k > dim is an
    error. Comparisons are exact float comparisons.
    """
    vec = _values_of(v)
    if not isinstance(k, (int, np.integer)) or k < 0:
        raise InvalidArgumentError("k must be a nonnegative integer")
    k = int(k)
    n = vec.size
    if k > n:
        raise InvalidArgumentError(f"k={k} exceeds the ambient dimension {n}")
    out = np.zeros(n)
    if k > 0:
        # stable sort on descending magnitude keeps the lowest index on ties
        order = np.argsort(-np.abs(vec), kind="stable")
        keep = order[:k]
        out[keep] = vec[keep]
    return SparseVector(out, sparsity_budget=k if k >= 1 else None)


def normalize_euclidean(v) -> SparseVector:
    """Scale to unit Euclidean norm; the zero vector is degenerate.

    The vector is pre-scaled by its peak magnitude so the squared norm can
    neither underflow to zero nor overflow, whatever the input scale.
    """
    vec = _values_of(v)
    peak = float(np.max(np.abs(vec)))
    if peak == 0.0:
        raise DegenerateInputError("cannot normalize the zero vector")
    scaled = vec / peak
    budget = v.sparsity_budget if isinstance(v, SparseVector) else None
    return SparseVector(scaled / float(np.linalg.norm(scaled)), sparsity_budget=budget)


def vector_to_json(v, sparse: bool = False) -> str:
    """Serialize a vector as a JSON array, or as {"dim", "entries"} pairs
    when sparse=True. Floats use repr, so round-trips are exact."""
    vec = _values_of(v)
    if sparse:
        entries = [[int(i), float(vec[i])] for i in np.flatnonzero(vec)]
        return json.dumps({"dim": int(vec.size), "entries": entries})
    return json.dumps([float(x) for x in vec])


def vector_from_json(text: str) -> SparseVector:
    """Parse either serialized form produced by vector_to_json."""
    obj = json.loads(text)
    if isinstance(obj, list):
        return SparseVector(np.asarray(obj, dtype=float))
    if isinstance(obj, dict):
        try:
            dim = int(obj["dim"])
            entries = obj["entries"]
        except (KeyError, TypeError, ValueError) as exc:
            raise InvalidArgumentError(f"malformed sparse vector JSON: {exc}") from exc
        if dim < 1:
            raise InvalidArgumentError("sparse vector dim must be positive")
        out = np.zeros(dim)
        for item in entries:
            i, val = int(item[0]), float(item[1])
            if not 0 <= i < dim:
                raise InvalidArgumentError(f"entry index {i} outside [0, {dim})")
            out[i] = val
        return SparseVector(out)
    raise InvalidArgumentError("vector JSON must be an array or an object")
