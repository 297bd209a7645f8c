"""Estimation-accuracy metrics and the repeated random-split experiment.

MMRE is the mean magnitude of relative error; PRED(p) is the fraction
of projects estimated within p percent of the recorded effort.  The
experiment splits a dataset into train/test, calibrates weights on the
training side (minus outliers), and compares test accuracy under the
original and the calibrated weight matrices.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .calibration import TrainingConfig, calibrate
from .effort import ProjectRecord, RegressionFit, predict_effort
from .fp import ORIGINAL_WEIGHTS, WeightMatrix, unadjusted_fp

Pair = Tuple[float, float]  # (estimated, actual)


def _checked(pairs: Sequence[Pair]) -> Tuple[np.ndarray, np.ndarray]:
    if not pairs:
        raise ValueError("need at least one (estimated, actual) pair")
    estimated = np.array([p[0] for p in pairs], dtype=float)
    actual = np.array([p[1] for p in pairs], dtype=float)
    if np.any(actual <= 0.0):
        raise ValueError("actual values must be positive")
    return estimated, actual


def mmre(pairs: Sequence[Pair]) -> float:
    """Mean magnitude of relative error."""
    estimated, actual = _checked(pairs)
    return float(np.mean(np.abs(estimated - actual) / actual))


def pred(pairs: Sequence[Pair], level_percent: float) -> float:
    """Fraction of pairs with relative error at most ``level_percent`` percent."""
    if level_percent <= 0.0:
        raise ValueError(f"level_percent must be positive, got {level_percent!r}")
    estimated, actual = _checked(pairs)
    mre = np.abs(estimated - actual) / actual
    return float(np.mean(mre <= level_percent / 100.0))


@dataclass(frozen=True)
class AccuracyReport:
    """MMRE plus PRED at the requested levels."""

    mmre: float
    pred: Dict[float, float]
    n: int

    def to_json_dict(self) -> Dict[str, object]:
        return {
            "mmre": self.mmre,
            "pred": {str(level): value for level, value in sorted(self.pred.items())},
            "n": self.n,
        }


def accuracy(pairs: Sequence[Pair], levels: Sequence[float] = (25, 50, 75, 100)) -> AccuracyReport:
    return AccuracyReport(
        mmre=mmre(pairs),
        pred={float(level): pred(pairs, level) for level in levels},
        n=len(pairs),
    )


@dataclass(frozen=True)
class ExperimentConfig:
    """Protocol parameters for the repeated random-split experiment."""

    n_trials: int = 5
    train_fraction: float = 100 / 184
    seed: int = 0
    pred_levels: Tuple[float, ...] = (25.0, 50.0, 75.0, 100.0)
    training: TrainingConfig = TrainingConfig()

    def __post_init__(self) -> None:
        if self.n_trials <= 0:
            raise ValueError("n_trials must be positive")
        if not 0.0 < self.train_fraction < 1.0:
            raise ValueError("train_fraction must lie in (0, 1)")
        if not self.pred_levels:
            raise ValueError("pred_levels must not be empty")
        object.__setattr__(self, "pred_levels", tuple(float(v) for v in self.pred_levels))

    def to_json_dict(self) -> Dict[str, object]:
        return {
            "n_trials": self.n_trials,
            "train_fraction": self.train_fraction,
            "seed": self.seed,
            "pred_levels": list(self.pred_levels),
            "training": self.training.to_json_dict(),
        }

    @classmethod
    def from_json_dict(cls, data) -> "ExperimentConfig":
        defaults = cls()
        return cls(
            n_trials=int(data.get("n_trials", defaults.n_trials)),
            train_fraction=float(data.get("train_fraction", defaults.train_fraction)),
            seed=int(data.get("seed", defaults.seed)),
            pred_levels=tuple(data.get("pred_levels", defaults.pred_levels)),
            training=TrainingConfig.from_json_dict(data.get("training", {})),
        )


@dataclass(frozen=True)
class TrialResult:
    """One train/test split: accuracy before and after calibration."""

    index: int
    n_train: int
    n_test: int
    excluded_outliers: Tuple[str, ...]
    original: Optional[AccuracyReport] = None
    calibrated: Optional[AccuracyReport] = None
    calibrated_weights: Optional[WeightMatrix] = None
    #: (project id, MRE under original weights, MRE under calibrated weights)
    test_mres: Tuple[Tuple[str, float, float], ...] = ()
    error: Optional[str] = None

    @property
    def mmre_improvement_pct(self) -> Optional[float]:
        if self.original is None or self.calibrated is None:
            return None
        if self.original.mmre == 0.0:
            return 0.0
        return 100.0 * (self.original.mmre - self.calibrated.mmre) / self.original.mmre

    def to_json_dict(self) -> Dict[str, object]:
        return {
            "index": self.index,
            "n_train": self.n_train,
            "n_test": self.n_test,
            "excluded_outliers": list(self.excluded_outliers),
            "original": None if self.original is None else self.original.to_json_dict(),
            "calibrated": None if self.calibrated is None else self.calibrated.to_json_dict(),
            "calibrated_weights": (
                None if self.calibrated_weights is None else self.calibrated_weights.to_json_dict()
            ),
            "test_mres": [
                {"id": pid, "original": orig, "calibrated": cal}
                for pid, orig, cal in self.test_mres
            ],
            "mmre_improvement_pct": self.mmre_improvement_pct,
            "error": self.error,
        }


@dataclass(frozen=True)
class ExperimentSummary:
    """All trials plus averages in the shape of the validation tables."""

    trials: Tuple[TrialResult, ...]
    pred_levels: Tuple[float, ...]

    @property
    def completed(self) -> Tuple[TrialResult, ...]:
        return tuple(t for t in self.trials if t.error is None)

    @property
    def average_mmre_original(self) -> Optional[float]:
        done = self.completed
        if not done:
            return None
        return float(np.mean([t.original.mmre for t in done]))

    @property
    def average_mmre_calibrated(self) -> Optional[float]:
        done = self.completed
        if not done:
            return None
        return float(np.mean([t.calibrated.mmre for t in done]))

    @property
    def average_improvement_pct(self) -> Optional[float]:
        done = self.completed
        if not done:
            return None
        return float(np.mean([t.mmre_improvement_pct for t in done]))

    def average_pred(self) -> Dict[float, Dict[str, float]]:
        """Per level: average original, average calibrated, and the
        improvement in percentage points."""
        done = self.completed
        table: Dict[float, Dict[str, float]] = {}
        for level in self.pred_levels:
            if not done:
                continue
            orig = float(np.mean([t.original.pred[level] for t in done]))
            cal = float(np.mean([t.calibrated.pred[level] for t in done]))
            table[level] = {
                "original": orig,
                "calibrated": cal,
                "improvement_points": 100.0 * (cal - orig),
            }
        return table

    def to_json_dict(self) -> Dict[str, object]:
        return {
            "trials": [t.to_json_dict() for t in self.trials],
            "pred_levels": list(self.pred_levels),
            "average_mmre_original": self.average_mmre_original,
            "average_mmre_calibrated": self.average_mmre_calibrated,
            "average_improvement_pct": self.average_improvement_pct,
            "average_pred": {
                str(level): row for level, row in self.average_pred().items()
            },
        }

    def to_text_table(self) -> str:
        lines = ["Trial  MMRE original  MMRE calibrated  Improvement %"]
        for t in self.trials:
            if t.error is not None:
                lines.append(f"{t.index + 1:<5d}  failed: {t.error}")
                continue
            lines.append(
                f"{t.index + 1:<5d}  {t.original.mmre:<13.3f}  {t.calibrated.mmre:<15.3f}  "
                f"{t.mmre_improvement_pct:.1f}%"
            )
        if self.completed:
            lines.append(
                f"Avg    {self.average_mmre_original:<13.3f}  "
                f"{self.average_mmre_calibrated:<15.3f}  {self.average_improvement_pct:.1f}%"
            )
            lines.append("")
            lines.append("PRED level  Average original  Average calibrated  Improvement (points)")
            for level, row in self.average_pred().items():
                lines.append(
                    f"{level:<10.0f}  {row['original']:<16.3f}  {row['calibrated']:<18.3f}  "
                    f"{row['improvement_points']:+.1f}"
                )
        return "\n".join(lines)


def _test_pairs(
    records: Sequence[ProjectRecord], weights: WeightMatrix, fit: RegressionFit
) -> List[Pair]:
    pairs = []
    for record in records:
        ufp = unadjusted_fp(record.counts, weights)
        pairs.append((predict_effort(fit, ufp), record.normalized_effort))
    return pairs


def run_experiments(
    records: Sequence[ProjectRecord],
    config: ExperimentConfig,
    fit: RegressionFit,
) -> ExperimentSummary:
    """Run the seeded split/calibrate/compare protocol.

    Outliers are removed from the training side only; the test side is
    evaluated in full.  Both accuracy arms share the fitted equation and
    differ only in the weight matrix, so improvements are attributable
    to the weights alone.
    """
    records = list(records)
    if len(records) < 20:
        raise ValueError(f"need at least 20 projects for a split, got {len(records)}")
    for record in records:
        if record.counts is None:
            raise ValueError(f"project {record.id!r} has no component counts")

    n = len(records)
    n_train = round(n * config.train_fraction)
    n_train = min(max(n_train, 1), n - 1)
    rng = np.random.default_rng(config.seed)

    trials: List[TrialResult] = []
    for index in range(config.n_trials):
        perm = rng.permutation(n)
        train = [records[i] for i in perm[:n_train]]
        test = [records[i] for i in perm[n_train:]]
        try:
            report = calibrate(train, ORIGINAL_WEIGHTS, fit, config.training)
            original_pairs = _test_pairs(test, ORIGINAL_WEIGHTS, fit)
            calibrated_pairs = _test_pairs(test, report.final_weights, fit)
            mres = tuple(
                (
                    record.id,
                    abs(orig_est - actual) / actual,
                    abs(cal_est - actual) / actual,
                )
                for record, (orig_est, actual), (cal_est, _) in zip(
                    test, original_pairs, calibrated_pairs
                )
            )
            trials.append(
                TrialResult(
                    index=index,
                    n_train=len(train),
                    n_test=len(test),
                    excluded_outliers=report.excluded_outliers,
                    original=accuracy(original_pairs, config.pred_levels),
                    calibrated=accuracy(calibrated_pairs, config.pred_levels),
                    calibrated_weights=report.final_weights,
                    test_mres=mres,
                )
            )
        except ValueError as exc:
            trials.append(
                TrialResult(
                    index=index,
                    n_train=len(train),
                    n_test=len(test),
                    excluded_outliers=(),
                    error=str(exc),
                )
            )
    return ExperimentSummary(trials=tuple(trials), pred_levels=config.pred_levels)
