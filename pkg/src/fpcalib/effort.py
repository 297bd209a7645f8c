"""Project records, dataset filtering, and the log-log effort equation.

Work effort is modelled as a power law of unadjusted function points,
fitted by ordinary least squares after a logarithmic transformation of
both variables.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Dict, FrozenSet, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from .fp import ComponentCounts, ComponentKind, FileCounts, GscRatings


class QualityRating(Enum):
    A = "A"
    B = "B"
    C = "C"
    D = "D"


class CountingMethod(Enum):
    IFPUG = "IFPUG"
    COSMIC = "COSMIC"
    MARK_II = "MARK_II"
    OTHER = "OTHER"


class DevelopmentType(Enum):
    NEW_DEVELOPMENT = "NewDevelopment"
    ENHANCEMENT = "Enhancement"
    REDEVELOPMENT = "Redevelopment"
    OTHER = "Other"


Inventory = Tuple[Tuple[ComponentKind, FileCounts], ...]


@dataclass(frozen=True)
class ProjectRecord:
    """One software project as recorded in a benchmarking repository.

    ``counts`` and ``gsc`` are optional: a repository row either provides
    all 15 component counts (respectively all 14 ratings) or none.
    ``components`` is an optional per-component file inventory used by
    the fuzzy measurement.
    """

    id: str
    quality_rating: QualityRating
    counting_method: CountingMethod
    resource_level: int
    development_type: DevelopmentType
    normalized_effort: float
    counts: Optional[ComponentCounts] = None
    gsc: Optional[GscRatings] = None
    components: Optional[Inventory] = None

    def __post_init__(self) -> None:
        if not self.id:
            raise ValueError("project id must be a non-empty string")
        if self.resource_level not in (1, 2, 3, 4):
            raise ValueError(f"resource_level must be 1..4, got {self.resource_level!r}")
        effort = float(self.normalized_effort)
        if not math.isfinite(effort) or effort <= 0.0:
            raise ValueError(f"normalized_effort must be positive, got {self.normalized_effort!r}")
        object.__setattr__(self, "normalized_effort", effort)
        if self.components is not None:
            object.__setattr__(self, "components", tuple(self.components))


@dataclass(frozen=True)
class FilterCriteria:
    """Admission rules for building a modelling dataset."""

    allowed_quality: FrozenSet[QualityRating]
    allowed_methods: FrozenSet[CountingMethod]
    allowed_resource_levels: FrozenSet[int]
    allowed_dev_types: FrozenSet[DevelopmentType]
    require_counts: bool = True
    require_gsc: bool = True

    def __post_init__(self) -> None:
        for name in ("allowed_quality", "allowed_methods", "allowed_resource_levels",
                     "allowed_dev_types"):
            values = getattr(self, name)
            if not values:
                raise ValueError(f"{name} must not be empty")
            object.__setattr__(self, name, frozenset(values))

    @classmethod
    def default(cls) -> "FilterCriteria":
        """Quality A/B, IFPUG counting, resource level 1, new development or
        redevelopment, with full counts and GSC ratings required."""
        return cls(
            allowed_quality=frozenset({QualityRating.A, QualityRating.B}),
            allowed_methods=frozenset({CountingMethod.IFPUG}),
            allowed_resource_levels=frozenset({1}),
            allowed_dev_types=frozenset(
                {DevelopmentType.NEW_DEVELOPMENT, DevelopmentType.REDEVELOPMENT}
            ),
            require_counts=True,
            require_gsc=True,
        )

    def admits(self, record: ProjectRecord) -> bool:
        if record.quality_rating not in self.allowed_quality:
            return False
        if record.counting_method not in self.allowed_methods:
            return False
        if record.resource_level not in self.allowed_resource_levels:
            return False
        if record.development_type not in self.allowed_dev_types:
            return False
        if self.require_counts and record.counts is None:
            return False
        if self.require_gsc and record.gsc is None:
            return False
        return True

    def to_json_dict(self) -> Dict[str, object]:
        return {
            "allowed_quality": sorted(q.value for q in self.allowed_quality),
            "allowed_methods": sorted(m.value for m in self.allowed_methods),
            "allowed_resource_levels": sorted(self.allowed_resource_levels),
            "allowed_dev_types": sorted(t.value for t in self.allowed_dev_types),
            "require_counts": self.require_counts,
            "require_gsc": self.require_gsc,
        }

    @classmethod
    def from_json_dict(cls, data: Mapping[str, object]) -> "FilterCriteria":
        try:
            return cls(
                allowed_quality=frozenset(QualityRating(q) for q in data["allowed_quality"]),
                allowed_methods=frozenset(CountingMethod(m) for m in data["allowed_methods"]),
                allowed_resource_levels=frozenset(int(v) for v in data["allowed_resource_levels"]),
                allowed_dev_types=frozenset(DevelopmentType(t) for t in data["allowed_dev_types"]),
                require_counts=bool(data.get("require_counts", True)),
                require_gsc=bool(data.get("require_gsc", True)),
            )
        except KeyError as exc:
            raise ValueError(f"criteria document missing field {exc.args[0]!r}") from None


def filter_projects(
    records: Sequence[ProjectRecord], criteria: FilterCriteria
) -> List[ProjectRecord]:
    """Records satisfying every criterion, original order preserved."""
    return [record for record in records if criteria.admits(record)]


@dataclass(frozen=True)
class RegressionFit:
    """Least-squares fit of ln(effort) = alpha * ln(ufp) + beta.

    ``coefficient`` and ``exponent`` are the equivalent power-law
    parameters: effort = coefficient * ufp ** exponent.
    """

    alpha: float
    beta: float
    coefficient: float
    exponent: float
    r_squared: float
    residual_mean: float
    residual_std: float
    n: int

    def to_json_dict(self) -> Dict[str, float]:
        return {
            "alpha": self.alpha,
            "beta": self.beta,
            "coefficient": self.coefficient,
            "exponent": self.exponent,
            "r_squared": self.r_squared,
            "residual_mean": self.residual_mean,
            "residual_std": self.residual_std,
            "n": self.n,
        }

    @classmethod
    def from_json_dict(cls, data: Mapping[str, float]) -> "RegressionFit":
        try:
            return cls(
                alpha=float(data["alpha"]),
                beta=float(data["beta"]),
                coefficient=float(data["coefficient"]),
                exponent=float(data["exponent"]),
                r_squared=float(data["r_squared"]),
                residual_mean=float(data["residual_mean"]),
                residual_std=float(data["residual_std"]),
                n=int(data["n"]),
            )
        except KeyError as exc:
            raise ValueError(f"fit document missing field {exc.args[0]!r}") from None

    @classmethod
    def from_parameters(cls, coefficient: float, exponent: float) -> "RegressionFit":
        """A fit object from known power-law parameters, without data."""
        if coefficient <= 0.0:
            raise ValueError(f"coefficient must be positive, got {coefficient!r}")
        return cls(
            alpha=exponent,
            beta=math.log(coefficient),
            coefficient=coefficient,
            exponent=exponent,
            r_squared=1.0,
            residual_mean=0.0,
            residual_std=0.0,
            n=0,
        )


def _log_arrays(samples: Sequence[Tuple[float, float]]) -> Tuple[np.ndarray, np.ndarray]:
    ufp = np.array([s[0] for s in samples], dtype=float)
    effort = np.array([s[1] for s in samples], dtype=float)
    if np.any(ufp <= 0.0):
        raise ValueError("all ufp values must be positive")
    if np.any(effort <= 0.0):
        raise ValueError("all effort values must be positive")
    return np.log(ufp), np.log(effort)


def fit_effort_equation(samples: Sequence[Tuple[float, float]]) -> RegressionFit:
    """Fit effort = A * ufp ** B by OLS on the log-transformed samples."""
    if len(samples) < 3:
        raise ValueError(f"need at least 3 samples, got {len(samples)}")
    lx, ly = _log_arrays(samples)
    mx, my = lx.mean(), ly.mean()
    dx = lx - mx
    var = float(np.dot(dx, dx))
    if var == 0.0:
        raise ValueError("ufp values are all identical; the design is degenerate")
    alpha = float(np.dot(dx, ly - my)) / var
    beta = my - alpha * mx
    residuals = ly - (alpha * lx + beta)
    ss_res = float(np.dot(residuals, residuals))
    ss_tot = float(np.dot(ly - my, ly - my))
    r_squared = 1.0 if ss_tot == 0.0 else 1.0 - ss_res / ss_tot
    return RegressionFit(
        alpha=alpha,
        beta=beta,
        coefficient=math.exp(beta),
        exponent=alpha,
        r_squared=r_squared,
        residual_mean=float(residuals.mean()),
        residual_std=float(residuals.std()),
        n=len(samples),
    )


def predict_effort(fit: RegressionFit, ufp: float) -> float:
    """Point prediction of the power-law model."""
    if ufp <= 0.0:
        raise ValueError(f"ufp must be positive, got {ufp!r}")
    return fit.coefficient * ufp ** fit.exponent


@dataclass(frozen=True)
class DiagnosticReport:
    """Moment-based residual diagnostics of a fitted effort equation."""

    residual_mean: float
    residual_std: float
    skewness: float
    excess_kurtosis: float
    r_squared: float
    warnings: Tuple[str, ...] = ()

    def to_json_dict(self) -> Dict[str, object]:
        return {
            "residual_mean": self.residual_mean,
            "residual_std": self.residual_std,
            "skewness": self.skewness,
            "excess_kurtosis": self.excess_kurtosis,
            "r_squared": self.r_squared,
            "warnings": list(self.warnings),
        }


def residual_diagnostics(
    fit: RegressionFit, samples: Sequence[Tuple[float, float]]
) -> DiagnosticReport:
    """Log-space residual moments with advisory normality warnings.

    Must be called with the samples the fit was computed from; the OLS
    residual mean is then zero up to rounding.
    """
    lx, ly = _log_arrays(samples)
    residuals = ly - (fit.alpha * lx + fit.beta)
    m2 = float(np.mean(residuals**2)) - float(np.mean(residuals)) ** 2
    centered = residuals - residuals.mean()
    if m2 > 0.0:
        skewness = float(np.mean(centered**3)) / m2**1.5
        excess_kurtosis = float(np.mean(centered**4)) / m2**2 - 3.0
    else:
        skewness = 0.0
        excess_kurtosis = 0.0
    warnings = []
    if abs(skewness) > 1.0:
        warnings.append(f"residual skewness {skewness:.3f} exceeds 1 in magnitude")
    if abs(excess_kurtosis) > 2.0:
        warnings.append(f"residual excess kurtosis {excess_kurtosis:.3f} exceeds 2 in magnitude")
    return DiagnosticReport(
        residual_mean=float(residuals.mean()),
        residual_std=float(residuals.std()),
        skewness=skewness,
        excess_kurtosis=excess_kurtosis,
        r_squared=fit.r_squared,
        warnings=tuple(warnings),
    )
