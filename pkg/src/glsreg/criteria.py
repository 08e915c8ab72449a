"""Diagnostics for almost-everywhere convergence on simulated trajectories.

A trajectory batch is an M x W matrix of realized sequence values.  The
diagnostics are the bounded-sup functional E sup_{m >= n} |x_m|/(1 + |x_m|)
(which tends to 0 iff the sequence tends to 0 a.e.), the union-event
probability P(union_{m >= n} {|x_m| <= eps}), the bounded metric
rho(X, Y) = E |X - Y|/(1 + |X - Y|), and regulator extraction: the smallest
per-trajectory factor v with |x_n| <= v * delta_n for a chosen null sequence
delta_n.

Every infinite-horizon quantity here is truncated at the batch window, and
estimates carry the window's last index so reports can say so.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    DomainError,
    EmptySample,
    IndexOutOfRange,
    LengthMismatch,
    NonpositiveDelta,
)
from .estimates import ConfidenceValue, mean_estimate, proportion_estimate

__all__ = [
    "TrajectoryBatch",
    "CriterionEstimate",
    "RegulatorExtraction",
    "regulator_ratio_matrix",
    "criterion_functional",
    "union_criterion",
    "rho_distance",
    "extract_regulator",
    "save_batch",
    "load_batch",
]


@dataclass(frozen=True)
class TrajectoryBatch:
    """M x W matrix of sequence values; column j holds index index_start + j."""

    values: np.ndarray
    index_start: int = 1
    seed: int | None = None
    model_label: str = ""

    def __post_init__(self) -> None:
        v = np.asarray(self.values, dtype=float)
        if v.ndim != 2 or v.shape[0] < 1 or v.shape[1] < 1:
            raise DomainError(f"a batch needs a 2-D value matrix, got shape {v.shape}")
        if not np.all(np.isfinite(v)):
            raise DomainError("batch values must all be finite")
        if self.index_start < 1:
            raise DomainError(f"index_start must be >= 1, got {self.index_start}")
        object.__setattr__(self, "values", v)

    @property
    def trajectories(self) -> int:
        return self.values.shape[0]

    @property
    def last_index(self) -> int:
        return self.index_start + self.values.shape[1] - 1

    def indices(self) -> np.ndarray:
        return np.arange(self.index_start, self.last_index + 1, dtype=float)

    def column_of(self, n: int) -> int:
        if not self.index_start <= n <= self.last_index:
            raise IndexOutOfRange(f"index {n} outside the window [{self.index_start}, {self.last_index}]")
        return n - self.index_start


@dataclass(frozen=True)
class CriterionEstimate:
    """Monte Carlo estimate of a truncated convergence diagnostic.

    The underlying sup/union runs over m <= last_index only, so the value is
    a lower bound of the infinite-horizon quantity for nonnegative
    functionals of the sup and the union event alike.
    """

    value: float
    half_width: float
    last_index: int

    def as_confidence(self) -> ConfidenceValue:
        return ConfidenceValue(self.value, self.half_width)


@dataclass(frozen=True)
class RegulatorExtraction:
    """Per-trajectory regulator factors for a fixed null sequence."""

    factors: np.ndarray
    delta_values: np.ndarray
    delta_seq: object


def regulator_ratio_matrix(values: np.ndarray, delta: np.ndarray) -> np.ndarray:
    """Elementwise |values| / delta with delta broadcast across trajectories.

    This single expression is shared by regulator extraction and by the
    direct simulation of sup-regulators, so the two agree bitwise.
    """
    delta = np.asarray(delta, dtype=float)
    if delta.size == 0 or np.any(~np.isfinite(delta)) or np.any(delta <= 0.0):
        raise NonpositiveDelta("every delta_n must be finite and positive")
    return np.abs(np.asarray(values, dtype=float)) / delta


def criterion_functional(batch: TrajectoryBatch, n: int) -> CriterionEstimate:
    """Estimate E sup_{m >= n} |x_m| / (1 + |x_m|) over the batch window.

    t -> t/(1+t) is increasing on t >= 0, so the sup of the transformed
    entries is the transform of the sup; only one max per trajectory needed.
    """
    col = batch.column_of(n)
    sups = np.max(np.abs(batch.values[:, col:]), axis=1)
    transformed = sups / (1.0 + sups)
    est = mean_estimate(transformed)
    return CriterionEstimate(est.value, est.half_width, batch.last_index)


def union_criterion(batch: TrajectoryBatch, eps: float, n: int) -> CriterionEstimate:
    """Estimate P(union_{m >= n} {|x_m| <= eps}) over the batch window.

    The union event is taken exactly as stated: at least one index m in
    [n, last_index] with |x_m| <= eps.
    """
    if not (math.isfinite(eps) and eps > 0):
        raise DomainError(f"union threshold must be positive, got {eps}")
    col = batch.column_of(n)
    hits = int(np.count_nonzero(np.any(np.abs(batch.values[:, col:]) <= eps, axis=1)))
    est = proportion_estimate(hits, batch.trajectories)
    return CriterionEstimate(est.value, est.half_width, batch.last_index)


def rho_distance(x_samples: np.ndarray, y_samples: np.ndarray) -> float:
    """Bounded metric E |x - y| / (1 + |x - y|) on paired samples."""
    x = np.asarray(x_samples, dtype=float).ravel()
    y = np.asarray(y_samples, dtype=float).ravel()
    if x.size != y.size:
        raise LengthMismatch(f"paired samples differ in length: {x.size} vs {y.size}")
    if x.size == 0:
        raise EmptySample("rho distance of empty samples")
    d = np.abs(x - y)
    return float(np.mean(d / (1.0 + d)))


def extract_regulator(batch: TrajectoryBatch, delta_seq) -> RegulatorExtraction:
    """Smallest per-trajectory v with |x_n| <= v * delta_n on the window.

    v = max_n |x_n| / delta_n, so the factorization holds exactly (not up to
    tolerance) for every entry of every trajectory.
    """
    delta = delta_seq.values(batch.indices())
    ratios = regulator_ratio_matrix(batch.values, delta)
    return RegulatorExtraction(factors=ratios.max(axis=1), delta_values=delta, delta_seq=delta_seq)


# ---------------------------------------------------------------------------
# persistence


def save_batch(batch: TrajectoryBatch, path) -> None:
    """Write a batch as long-format CSV (trajectory_id,n,value) plus sidecar."""
    from .persist import atomic_write_text, sidecar_path, write_json

    lines = ["trajectory_id,n,value"]
    for i in range(batch.trajectories):
        row = batch.values[i]
        lines.extend(f"{i},{n},{float(v)!r}" for n, v in zip(range(batch.index_start, batch.last_index + 1), row))
    atomic_write_text(path, "\n".join(lines) + "\n")
    write_json(
        sidecar_path(path),
        {
            "index_start": batch.index_start,
            "last_index": batch.last_index,
            "model": batch.model_label,
            "seed": batch.seed,
            "trajectories": batch.trajectories,
        },
    )


def load_batch(path) -> TrajectoryBatch:
    """Read a batch written by save_batch."""
    from .persist import read_json, sidecar_path

    meta = read_json(sidecar_path(path))
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    if data.shape[1] != 3:
        raise DomainError(f"expected 3 CSV columns (trajectory_id,n,value) in {path}")
    rows = int(meta["trajectories"])
    width = int(meta["last_index"]) - int(meta["index_start"]) + 1
    if data.shape[0] != rows * width:
        raise DomainError(f"batch file {path} does not match its sidecar shape")
    order = np.lexsort((data[:, 1], data[:, 0]))
    values = data[order, 2].reshape(rows, width)
    return TrajectoryBatch(
        values=values,
        index_start=int(meta["index_start"]),
        seed=meta.get("seed"),
        model_label=str(meta.get("model", "")),
    )
