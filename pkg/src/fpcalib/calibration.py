"""Gradient-descent calibration of the fifteen complexity weights.

A fixed-topology network: the 15 per-cell component counts feed a single
middle neuron through the complexity weights (its output equals the
unadjusted FP count), and the output neuron applies the fitted power law
to produce an effort estimate.  Training minimizes the summed squared
relative error against recorded efforts under the hard constraint that
each component keeps low < average < high.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .effort import ProjectRecord, RegressionFit
from .fp import CELLS, WeightMatrix

#: Minimum separation enforced between a component's low/average/high
#: weights, and the floor below the lowest weight.
MONOTONE_GAP = 1e-3

ProjectSample = Tuple[np.ndarray, float]


@dataclass(frozen=True)
class NetworkState:
    """Trainable weights plus the frozen activation parameters.

    ``w`` holds the 15 complexity weights in canonical cell order;
    ``v1`` and ``v2`` are the power-law exponent and coefficient.
    """

    w: np.ndarray
    v1: float
    v2: float

    def __post_init__(self) -> None:
        w = np.asarray(self.w, dtype=float)
        if w.shape != (len(CELLS),):
            raise ValueError(f"expected {len(CELLS)} weights, got shape {w.shape}")
        if np.any(~np.isfinite(w)) or np.any(w <= 0.0):
            raise ValueError("all weights must be positive and finite")
        for offset in range(0, len(CELLS), 3):
            low, avg, high = w[offset : offset + 3]
            if low + MONOTONE_GAP > avg or avg + MONOTONE_GAP > high:
                kind = CELLS[offset][0]
                raise ValueError(
                    f"weights for {kind.value} must increase by at least {MONOTONE_GAP}: "
                    f"({low}, {avg}, {high})"
                )
        if self.v2 <= 0.0:
            raise ValueError(f"v2 must be positive, got {self.v2!r}")
        w.setflags(write=False)
        object.__setattr__(self, "w", w)

    def weight_matrix(self) -> WeightMatrix:
        return WeightMatrix.from_vector(self.w)


def forward(state: NetworkState, x: np.ndarray) -> Tuple[float, float]:
    """Middle-layer output y (the UFP count) and effort estimate z."""
    x = np.asarray(x, dtype=float)
    if x.shape != state.w.shape:
        raise ValueError(f"expected input shape {state.w.shape}, got {x.shape}")
    if np.any(x < 0.0):
        raise ValueError("component counts must be nonnegative")
    y = float(np.dot(x, state.w))
    if y <= 0.0:
        raise ValueError("at least one component count must be positive")
    z = state.v2 * y**state.v1
    return y, z


def _stack(projects: Sequence[ProjectSample]) -> Tuple[np.ndarray, np.ndarray]:
    if not projects:
        raise ValueError("need at least one project")
    xs = np.array([np.asarray(x, dtype=float) for x, _ in projects])
    actual = np.array([float(e) for _, e in projects])
    if np.any(actual <= 0.0):
        raise ValueError("actual effort must be positive for every project")
    if np.any(xs < 0.0):
        raise ValueError("component counts must be nonnegative")
    if np.any(xs.sum(axis=1) <= 0.0):
        raise ValueError("every project needs at least one positive count")
    return xs, actual


def _loss_value(w: np.ndarray, v1: float, v2: float, xs: np.ndarray, actual: np.ndarray) -> float:
    y = xs @ w
    z = v2 * y**v1
    rel = (z - actual) / actual
    return 0.5 * float(np.dot(rel, rel))


def loss(state: NetworkState, projects: Sequence[ProjectSample]) -> float:
    """Summed half squared relative estimation error."""
    xs, actual = _stack(projects)
    return _loss_value(state.w, state.v1, state.v2, xs, actual)


def _gradient_value(
    w: np.ndarray, v1: float, v2: float, xs: np.ndarray, actual: np.ndarray
) -> np.ndarray:
    y = xs @ w
    z = v2 * y**v1
    factor = (z - actual) / actual**2 * v2 * v1 * y ** (v1 - 1.0)
    return factor @ xs


def gradient(state: NetworkState, projects: Sequence[ProjectSample]) -> np.ndarray:
    """Analytic gradient of the loss with respect to the 15 weights.

    v1 and v2 are held fixed; only the complexity weights train.
    """
    xs, actual = _stack(projects)
    return _gradient_value(state.w, state.v1, state.v2, xs, actual)


def _isotonic(values: np.ndarray) -> np.ndarray:
    """Nondecreasing least-squares fit (pool adjacent violators)."""
    blocks: List[Tuple[float, int]] = []
    for v in values:
        blocks.append((float(v), 1))
        while len(blocks) > 1 and blocks[-2][0] / blocks[-2][1] > blocks[-1][0] / blocks[-1][1]:
            s2, c2 = blocks.pop()
            s1, c1 = blocks.pop()
            blocks.append((s1 + s2, c1 + c2))
    out: List[float] = []
    for s, c in blocks:
        out.extend([s / c] * c)
    return np.array(out)


def project_monotone(w: np.ndarray, gap: float = MONOTONE_GAP) -> np.ndarray:
    """Project onto the feasible cone, one component at a time.

    Each component's three weights are sorted, then pushed onto the set
    {gap <= low, low + gap <= average, average + gap <= high} by isotonic
    regression in gap-shifted coordinates.  The result is idempotent and
    never moves farther from any feasible point than the input was.
    """
    w = np.asarray(w, dtype=float).copy()
    shift = gap * np.arange(1, 4)
    for offset in range(0, len(w), 3):
        triple = np.sort(w[offset : offset + 3])
        u = np.maximum(_isotonic(triple - shift), 0.0)
        w[offset : offset + 3] = u + shift
    return w


def detect_outliers(
    projects: Sequence[ProjectSample], state: NetworkState, zscore: float
) -> List[int]:
    """Indices whose log residual sits more than ``zscore`` sigmas from the mean."""
    if len(projects) < 3:
        raise ValueError(f"need at least 3 projects, got {len(projects)}")
    if not zscore > 0.0:
        raise ValueError(f"zscore must be positive, got {zscore!r}")
    xs, actual = _stack(projects)
    y = xs @ state.w
    z = state.v2 * y**state.v1
    residuals = np.log(actual) - np.log(z)
    std = float(residuals.std())
    if std == 0.0 or math.isinf(zscore):
        return []
    deviation = np.abs(residuals - residuals.mean())
    return [int(i) for i in np.nonzero(deviation > zscore * std)[0]]


@dataclass(frozen=True)
class TrainingConfig:
    """Hyperparameters of the projected gradient descent."""

    learning_rate: float = 0.05
    max_epochs: int = 5000
    convergence_tol: float = 1e-8
    outlier_zscore: float = 3.0
    seed: int = 0  # reserved for stochastic optimizers; descent is full-batch

    def __post_init__(self) -> None:
        if self.learning_rate <= 0.0:
            raise ValueError("learning_rate must be positive")
        if self.max_epochs <= 0:
            raise ValueError("max_epochs must be positive")
        if self.convergence_tol <= 0.0:
            raise ValueError("convergence_tol must be positive")
        if self.outlier_zscore <= 0.0:
            raise ValueError("outlier_zscore must be positive")

    def to_json_dict(self) -> Dict[str, object]:
        return {
            "learning_rate": self.learning_rate,
            "max_epochs": self.max_epochs,
            "convergence_tol": self.convergence_tol,
            "outlier_zscore": self.outlier_zscore,
            "seed": self.seed,
        }

    @classmethod
    def from_json_dict(cls, data) -> "TrainingConfig":
        defaults = cls()
        return cls(
            learning_rate=float(data.get("learning_rate", defaults.learning_rate)),
            max_epochs=int(data.get("max_epochs", defaults.max_epochs)),
            convergence_tol=float(data.get("convergence_tol", defaults.convergence_tol)),
            outlier_zscore=float(data.get("outlier_zscore", defaults.outlier_zscore)),
            seed=int(data.get("seed", defaults.seed)),
        )


@dataclass(frozen=True)
class CalibrationReport:
    """Outcome of one calibration run."""

    initial_weights: WeightMatrix
    final_weights: WeightMatrix
    loss_trace: Tuple[float, ...]
    excluded_outliers: Tuple[str, ...]
    epochs_run: int
    converged: bool

    def to_json_dict(self) -> Dict[str, object]:
        return {
            "initial_weights": self.initial_weights.to_json_dict(),
            "final_weights": self.final_weights.to_json_dict(),
            "loss_trace": list(self.loss_trace),
            "excluded_outliers": list(self.excluded_outliers),
            "epochs_run": self.epochs_run,
            "converged": self.converged,
        }

    @classmethod
    def from_json_dict(cls, data) -> "CalibrationReport":
        return cls(
            initial_weights=WeightMatrix.from_json_dict(data["initial_weights"]),
            final_weights=WeightMatrix.from_json_dict(data["final_weights"]),
            loss_trace=tuple(float(v) for v in data["loss_trace"]),
            excluded_outliers=tuple(str(v) for v in data["excluded_outliers"]),
            epochs_run=int(data["epochs_run"]),
            converged=bool(data["converged"]),
        )


# Learning-rate halving stops once the step is this many times smaller
# than the configured rate; at that point the state is stationary.
_MIN_RATE_FACTOR = 2.0**-60


def _samples_from_records(records: Sequence[ProjectRecord]) -> List[Tuple[str, ProjectSample]]:
    out = []
    for record in records:
        if record.counts is None:
            raise ValueError(f"project {record.id!r} has no component counts")
        x = record.counts.as_vector()
        if x.sum() <= 0.0:
            raise ValueError(f"project {record.id!r} has an all-zero count grid")
        out.append((record.id, (x, record.normalized_effort)))
    return out


def calibrate(
    records: Sequence[ProjectRecord],
    initial: WeightMatrix,
    fit: RegressionFit,
    config: Optional[TrainingConfig] = None,
) -> CalibrationReport:
    """Calibrate the weight matrix against recorded efforts.

    Outliers under the initial state are removed first.  Each accepted
    descent step is followed by projection onto the monotone cone; steps
    that would increase the loss retry at half the rate, and the rate is
    restored after every accepted step.
    """
    config = config or TrainingConfig()
    named = _samples_from_records(records)

    w0 = project_monotone(initial.as_vector())
    state = NetworkState(w=w0, v1=fit.exponent, v2=fit.coefficient)

    samples = [sample for _, sample in named]
    outlier_idx = set(detect_outliers(samples, state, config.outlier_zscore))
    excluded = tuple(named[i][0] for i in sorted(outlier_idx))
    kept = [sample for i, sample in enumerate(samples) if i not in outlier_idx]
    if len(kept) < 10:
        raise ValueError(f"need at least 10 non-outlier projects, got {len(kept)}")

    xs, actual = _stack(kept)
    w = state.w.copy()
    current = _loss_value(w, state.v1, state.v2, xs, actual)
    trace = [current]
    epochs = 0
    converged = False

    for _ in range(config.max_epochs):
        grad = _gradient_value(w, state.v1, state.v2, xs, actual)
        rate = config.learning_rate
        accepted = None
        while rate >= config.learning_rate * _MIN_RATE_FACTOR:
            candidate = project_monotone(w - rate * grad)
            cand_loss = _loss_value(candidate, state.v1, state.v2, xs, actual)
            if cand_loss <= current:
                accepted = (candidate, cand_loss)
                break
            rate *= 0.5
        if accepted is None:
            converged = True
            break
        w, new_loss = accepted
        epochs += 1
        trace.append(new_loss)
        improvement = (current - new_loss) / current if current > 0.0 else 0.0
        current = new_loss
        if improvement < config.convergence_tol:
            converged = True
            break

    return CalibrationReport(
        initial_weights=WeightMatrix.from_vector(w0),
        final_weights=WeightMatrix.from_vector(w),
        loss_trace=tuple(trace),
        excluded_outliers=excluded,
        epochs_run=epochs,
        converged=converged,
    )
