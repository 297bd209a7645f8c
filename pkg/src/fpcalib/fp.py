"""Crisp IFPUG function point arithmetic.

Complexity classification of the five component families, unadjusted
function points (UFP), the value adjustment factor (VAF), and the final
FP products for new-development and enhancement counting.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Dict, Mapping, Tuple

import numpy as np


class ComponentKind(Enum):
    """The five function component families, in canonical order."""

    EI = "EI"
    EO = "EO"
    EQ = "EQ"
    ILF = "ILF"
    EIF = "EIF"


class ComplexityClass(Enum):
    """Complexity rating of one component; totally ordered low < average < high."""

    LOW = "low"
    AVERAGE = "average"
    HIGH = "high"

    @property
    def rank(self) -> int:
        return _CLASS_RANK[self]

    def __lt__(self, other: "ComplexityClass") -> bool:
        if not isinstance(other, ComplexityClass):
            return NotImplemented
        return self.rank < other.rank

    def __le__(self, other: "ComplexityClass") -> bool:
        if not isinstance(other, ComplexityClass):
            return NotImplemented
        return self.rank <= other.rank


KINDS: Tuple[ComponentKind, ...] = tuple(ComponentKind)
CLASSES: Tuple[ComplexityClass, ...] = tuple(ComplexityClass)
_CLASS_RANK = {cls: i for i, cls in enumerate(ComplexityClass)}

Cell = Tuple[ComponentKind, ComplexityClass]

#: All 15 (kind, class) cells in canonical order: EI, EO, EQ, ILF, EIF,
#: each low, average, high.  Matrix flattening and serialization use this.
CELLS: Tuple[Cell, ...] = tuple((k, c) for k in KINDS for c in CLASSES)


@dataclass(frozen=True)
class FileCounts:
    """Associated file numbers of one component.

    ``primary_files`` is RET for data functions (ILF/EIF) and FTR for
    transactions (EI/EO/EQ); ``data_elements`` is DET in both cases.
    """

    primary_files: int
    data_elements: int

    def __post_init__(self) -> None:
        for name in ("primary_files", "data_elements"):
            value = getattr(self, name)
            if not isinstance(value, int) or isinstance(value, bool) or value < 0:
                raise ValueError(f"{name} must be a nonnegative integer, got {value!r}")


def _validated_cells(raw: Mapping[Cell, float], *, what: str) -> Dict[Cell, float]:
    unknown = set(raw) - set(CELLS)
    if unknown:
        raise ValueError(f"unknown {what} cells: {sorted(str(c) for c in unknown)}")
    return dict(raw)


@dataclass(frozen=True)
class ComponentCounts:
    """The 15 per-cell component counts of one project (component x class grid)."""

    counts: Mapping[Cell, int]

    def __post_init__(self) -> None:
        raw = _validated_cells(self.counts, what="count")
        full: Dict[Cell, int] = {}
        for cell in CELLS:
            value = raw.get(cell, 0)
            if not isinstance(value, int) or isinstance(value, bool) or value < 0:
                kind, cls = cell
                raise ValueError(
                    f"count {kind.value}/{cls.value} must be a nonnegative integer, got {value!r}"
                )
            full[cell] = value
        object.__setattr__(self, "counts", full)

    @classmethod
    def zeros(cls) -> "ComponentCounts":
        return cls({})

    def cell(self, kind: ComponentKind, complexity: ComplexityClass) -> int:
        return self.counts[(kind, complexity)]

    def total(self) -> int:
        return sum(self.counts.values())

    def as_vector(self) -> np.ndarray:
        """Counts flattened to a float vector in canonical cell order."""
        return np.array([self.counts[cell] for cell in CELLS], dtype=float)

    @classmethod
    def from_vector(cls, vector) -> "ComponentCounts":
        values = list(vector)
        if len(values) != len(CELLS):
            raise ValueError(f"expected {len(CELLS)} counts, got {len(values)}")
        return cls({cell: int(v) for cell, v in zip(CELLS, values)})


@dataclass(frozen=True)
class WeightMatrix:
    """The 15 complexity weights, positive and increasing within each component."""

    weights: Mapping[Cell, float]

    def __post_init__(self) -> None:
        raw = _validated_cells(self.weights, what="weight")
        missing = [cell for cell in CELLS if cell not in raw]
        if missing:
            kind, cls = missing[0]
            raise ValueError(f"missing weight cell {kind.value}/{cls.value}")
        full: Dict[Cell, float] = {}
        for cell in CELLS:
            value = float(raw[cell])
            kind, cls = cell
            if not np.isfinite(value) or value <= 0.0:
                raise ValueError(
                    f"weight {kind.value}/{cls.value} must be positive and finite, got {value!r}"
                )
            full[cell] = value
        for kind in KINDS:
            low, avg, high = (full[(kind, c)] for c in CLASSES)
            if not (low < avg < high):
                raise ValueError(
                    f"weights for {kind.value} must satisfy low < average < high, "
                    f"got ({low}, {avg}, {high})"
                )
        object.__setattr__(self, "weights", full)

    @classmethod
    def from_rows(cls, rows: Mapping[ComponentKind, Tuple[float, float, float]]) -> "WeightMatrix":
        cells = {
            (kind, c): rows[kind][i]
            for kind in rows
            for i, c in enumerate(CLASSES)
        }
        return cls(cells)

    def cell(self, kind: ComponentKind, complexity: ComplexityClass) -> float:
        return self.weights[(kind, complexity)]

    def row(self, kind: ComponentKind) -> Tuple[float, float, float]:
        return tuple(self.weights[(kind, c)] for c in CLASSES)  # type: ignore[return-value]

    def as_vector(self) -> np.ndarray:
        """Weights flattened to a float vector in canonical cell order."""
        return np.array([self.weights[cell] for cell in CELLS], dtype=float)

    @classmethod
    def from_vector(cls, vector) -> "WeightMatrix":
        values = [float(v) for v in vector]
        if len(values) != len(CELLS):
            raise ValueError(f"expected {len(CELLS)} weights, got {len(values)}")
        return cls(dict(zip(CELLS, values)))

    def to_json_dict(self) -> Dict[str, Dict[str, float]]:
        """Nested JSON form: kind -> {low, average, high} -> value."""
        return {
            kind.value: {c.value: self.weights[(kind, c)] for c in CLASSES}
            for kind in KINDS
        }

    @classmethod
    def from_json_dict(cls, data: Mapping[str, Mapping[str, float]]) -> "WeightMatrix":
        if not isinstance(data, Mapping):
            raise ValueError("weight document must be a JSON object keyed by component kind")
        cells: Dict[Cell, float] = {}
        for kind_name, row in data.items():
            try:
                kind = ComponentKind(kind_name)
            except ValueError:
                raise ValueError(f"unknown component kind {kind_name!r}") from None
            if not isinstance(row, Mapping):
                raise ValueError(f"weights for {kind_name} must be an object")
            for cls_name, value in row.items():
                try:
                    complexity = ComplexityClass(cls_name)
                except ValueError:
                    raise ValueError(
                        f"unknown complexity class {cls_name!r} for {kind_name}"
                    ) from None
                cells[(kind, complexity)] = float(value)
        return cls(cells)


#: The original 1979 weight assignment (EI 3/4/6, EO 4/5/7, EQ 3/4/6,
#: ILF 7/10/15, EIF 5/7/10).
ORIGINAL_WEIGHTS = WeightMatrix.from_rows(
    {
        ComponentKind.EI: (3.0, 4.0, 6.0),
        ComponentKind.EO: (4.0, 5.0, 7.0),
        ComponentKind.EQ: (3.0, 4.0, 6.0),
        ComponentKind.ILF: (7.0, 10.0, 15.0),
        ComponentKind.EIF: (5.0, 7.0, 10.0),
    }
)


@dataclass(frozen=True)
class GscRatings:
    """The 14 general system characteristic ratings, each 0..5."""

    ratings: Tuple[int, ...]

    def __post_init__(self) -> None:
        ratings = tuple(self.ratings)
        if len(ratings) != 14:
            raise ValueError(f"expected 14 GSC ratings, got {len(ratings)}")
        for i, value in enumerate(ratings, start=1):
            if not isinstance(value, int) or isinstance(value, bool) or not 0 <= value <= 5:
                raise ValueError(f"GSC rating {i} must be an integer in [0, 5], got {value!r}")
        object.__setattr__(self, "ratings", ratings)

    def total(self) -> int:
        return sum(self.ratings)


# Classification bands of the complexity matrices.  Each axis is split in
# three; the pair is (start of band 2, start of band 3).  Values below
# band 2 (including 0) fall in the lowest band.
_PRIMARY_BANDS: Dict[ComponentKind, Tuple[int, int]] = {
    ComponentKind.ILF: (2, 6),   # RET 1 / 2-5 / 6+
    ComponentKind.EIF: (2, 6),
    ComponentKind.EI: (2, 3),    # FTR 0-1 / 2 / 3+
    ComponentKind.EO: (2, 4),    # FTR 0-1 / 2-3 / 4+
    ComponentKind.EQ: (2, 4),
}
_DET_BANDS: Dict[ComponentKind, Tuple[int, int]] = {
    ComponentKind.ILF: (20, 51),  # DET 1-19 / 20-50 / 51+
    ComponentKind.EIF: (20, 51),
    ComponentKind.EI: (5, 16),    # DET 1-4 / 5-15 / 16+
    ComponentKind.EO: (6, 20),    # DET 1-5 / 6-19 / 20+
    ComponentKind.EQ: (6, 20),
}

# Complexity by (primary-file band, DET band); the same pattern holds for
# all five component families.
_CLASS_GRID = (
    (ComplexityClass.LOW, ComplexityClass.LOW, ComplexityClass.AVERAGE),
    (ComplexityClass.LOW, ComplexityClass.AVERAGE, ComplexityClass.HIGH),
    (ComplexityClass.AVERAGE, ComplexityClass.HIGH, ComplexityClass.HIGH),
)


def _band(value: int, cuts: Tuple[int, int]) -> int:
    if value < cuts[0]:
        return 0
    if value < cuts[1]:
        return 1
    return 2


def classify_complexity(kind: ComponentKind, files: FileCounts) -> ComplexityClass:
    """Rate one component low/average/high from its associated file counts."""
    row = _band(files.primary_files, _PRIMARY_BANDS[kind])
    col = _band(files.data_elements, _DET_BANDS[kind])
    return _CLASS_GRID[row][col]


def unadjusted_fp(counts: ComponentCounts, weights: WeightMatrix) -> float:
    """Weighted component count over all 15 cells."""
    return float(np.dot(counts.as_vector(), weights.as_vector()))


def value_adjustment_factor(gsc: GscRatings) -> float:
    """VAF = 0.65 + 0.01 * (sum of the 14 ratings); always in [0.65, 1.35]."""
    return 0.65 + 0.01 * gsc.total()


def _check_vaf(value: float, name: str) -> None:
    if not 0.65 <= value <= 1.35:
        raise ValueError(f"{name} must lie in [0.65, 1.35], got {value!r}")


def function_points(ufp: float, vaf: float) -> float:
    """Adjusted function points: UFP scaled by the value adjustment factor."""
    if ufp < 0:
        raise ValueError(f"ufp must be nonnegative, got {ufp!r}")
    _check_vaf(vaf, "vaf")
    return ufp * vaf


def enhancement_fp(
    ufp_add: float,
    ufp_change: float,
    ufp_delete: float,
    vaf_after: float,
    vaf_before: float,
) -> float:
    """Function points of an enhancement project.

    Added and changed functionality is valued at the post-enhancement
    adjustment factor, deleted functionality at the pre-enhancement one.
    """
    for name, value in (("ufp_add", ufp_add), ("ufp_change", ufp_change),
                        ("ufp_delete", ufp_delete)):
        if value < 0:
            raise ValueError(f"{name} must be nonnegative, got {value!r}")
    _check_vaf(vaf_after, "vaf_after")
    _check_vaf(vaf_before, "vaf_before")
    return (ufp_add + ufp_change) * vaf_after + ufp_delete * vaf_before
