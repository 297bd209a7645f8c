"""Project record interchange (CSV and JSON) and the synthetic generator.

The generator stands in for a proprietary benchmarking repository: it
draws component count grids, prices them with a chosen "true" weight
matrix, and produces efforts from a power law with lognormal noise, so
every record passes the default filter criteria by construction.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, IO, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np

from .effort import (
    CountingMethod,
    DevelopmentType,
    ProjectRecord,
    QualityRating,
)
from .fp import (
    CELLS,
    CLASSES,
    KINDS,
    ComplexityClass,
    ComponentCounts,
    ComponentKind,
    FileCounts,
    GscRatings,
    ORIGINAL_WEIGHTS,
    WeightMatrix,
)

_COUNT_COLUMNS = [f"z_{kind.value.lower()}_{cls.value}" for kind, cls in CELLS]
_GSC_COLUMNS = [f"gsc_{i}" for i in range(1, 15)]

#: Header of the record CSV schema, in order.
CSV_COLUMNS: Tuple[str, ...] = tuple(
    ["id", "quality_rating", "counting_method", "resource_level", "development_type"]
    + _COUNT_COLUMNS
    + _GSC_COLUMNS
    + ["normalized_effort"]
)


class CsvFormatError(ValueError):
    """Raised for malformed record CSV files; carries per-row messages."""

    def __init__(self, message: str, row_errors: Sequence[str] = ()):
        details = list(row_errors)
        if details:
            message = message + "\n" + "\n".join(details)
        super().__init__(message)
        self.row_errors = details


Source = Union[str, Path, IO[str]]


def _open_for(source: Source, mode: str):
    if isinstance(source, (str, Path)):
        return open(source, mode, newline=""), True
    return source, False


def _parse_optional_group(
    row: Mapping[str, str], columns: Sequence[str], what: str, row_no: int
) -> Optional[List[int]]:
    raw = [(row.get(col) or "").strip() for col in columns]
    filled = [v for v in raw if v != ""]
    if not filled:
        return None
    if len(filled) != len(columns):
        raise ValueError(f"row {row_no}: {what} must be fully present or fully empty")
    values = []
    for col, v in zip(columns, raw):
        try:
            values.append(int(v))
        except ValueError:
            raise ValueError(f"row {row_no}: column {col} must be an integer, got {v!r}") from None
    return values


def load_csv(source: Source) -> List[ProjectRecord]:
    """Parse project records, reporting all value errors with row numbers.

    A malformed header aborts immediately; value errors accumulate so a
    bad file is diagnosed in one pass.
    """
    handle, owned = _open_for(source, "r")
    try:
        reader = csv.DictReader(handle)
        header = reader.fieldnames
        if header is None:
            raise CsvFormatError("empty file: missing header row")
        if tuple(header) != CSV_COLUMNS:
            raise CsvFormatError(
                "malformed header: expected columns "
                f"{', '.join(CSV_COLUMNS[:5])}, ... got {', '.join(header[:5])}, ..."
            )
        records: List[ProjectRecord] = []
        errors: List[str] = []
        seen_ids: Dict[str, int] = {}
        for row_no, row in enumerate(reader, start=2):
            try:
                record = _record_from_row(row, row_no)
                if record.id in seen_ids:
                    raise ValueError(
                        f"row {row_no}: duplicate id {record.id!r} "
                        f"(first seen at row {seen_ids[record.id]})"
                    )
                seen_ids[record.id] = row_no
                records.append(record)
            except ValueError as exc:
                errors.append(str(exc))
        if errors:
            raise CsvFormatError(f"{len(errors)} invalid row(s)", errors)
        return records
    finally:
        if owned:
            handle.close()


def _record_from_row(row: Mapping[str, str], row_no: int) -> ProjectRecord:
    def want(col: str) -> str:
        value = (row.get(col) or "").strip()
        if value == "":
            raise ValueError(f"row {row_no}: column {col} must not be empty")
        return value

    def as_enum(col: str, enum_cls):
        value = want(col)
        try:
            return enum_cls(value)
        except ValueError:
            allowed = ", ".join(e.value for e in enum_cls)
            raise ValueError(
                f"row {row_no}: column {col} must be one of {allowed}, got {value!r}"
            ) from None

    try:
        resource_level = int(want("resource_level"))
    except ValueError as exc:
        if "row" in str(exc):
            raise
        raise ValueError(f"row {row_no}: column resource_level must be an integer") from None
    try:
        effort = float(want("normalized_effort"))
    except ValueError as exc:
        if "row" in str(exc):
            raise
        raise ValueError(f"row {row_no}: column normalized_effort must be a number") from None

    count_values = _parse_optional_group(row, _COUNT_COLUMNS, "the 15 count columns", row_no)
    gsc_values = _parse_optional_group(row, _GSC_COLUMNS, "the 14 GSC columns", row_no)

    try:
        return ProjectRecord(
            id=want("id"),
            quality_rating=as_enum("quality_rating", QualityRating),
            counting_method=as_enum("counting_method", CountingMethod),
            resource_level=resource_level,
            development_type=as_enum("development_type", DevelopmentType),
            normalized_effort=effort,
            counts=None if count_values is None else ComponentCounts.from_vector(count_values),
            gsc=None if gsc_values is None else GscRatings(tuple(gsc_values)),
        )
    except ValueError as exc:
        if str(exc).startswith(f"row {row_no}"):
            raise
        raise ValueError(f"row {row_no}: {exc}") from None


def save_csv(records: Sequence[ProjectRecord], dest: Source) -> None:
    """Write records in the canonical CSV schema; optional fields stay empty."""
    handle, owned = _open_for(dest, "w")
    try:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        for record in records:
            row: List[object] = [
                record.id,
                record.quality_rating.value,
                record.counting_method.value,
                record.resource_level,
                record.development_type.value,
            ]
            if record.counts is None:
                row.extend([""] * len(_COUNT_COLUMNS))
            else:
                row.extend(int(v) for v in record.counts.as_vector())
            if record.gsc is None:
                row.extend([""] * len(_GSC_COLUMNS))
            else:
                row.extend(record.gsc.ratings)
            row.append(repr(record.normalized_effort))
            writer.writerow(row)
    finally:
        if owned:
            handle.close()


def record_to_json_dict(record: ProjectRecord) -> Dict[str, object]:
    counts = None
    if record.counts is not None:
        counts = {
            kind.value: {c.value: record.counts.cell(kind, c) for c in CLASSES}
            for kind in KINDS
        }
    components = None
    if record.components is not None:
        components = [
            {
                "kind": kind.value,
                "primary_files": files.primary_files,
                "data_elements": files.data_elements,
            }
            for kind, files in record.components
        ]
    return {
        "id": record.id,
        "quality_rating": record.quality_rating.value,
        "counting_method": record.counting_method.value,
        "resource_level": record.resource_level,
        "development_type": record.development_type.value,
        "normalized_effort": record.normalized_effort,
        "counts": counts,
        "gsc": None if record.gsc is None else list(record.gsc.ratings),
        "components": components,
    }


def record_from_json_dict(data: Mapping[str, object]) -> ProjectRecord:
    counts = None
    if data.get("counts") is not None:
        cells = {}
        for kind_name, row in data["counts"].items():  # type: ignore[union-attr]
            kind = ComponentKind(kind_name)
            for cls_name, value in row.items():
                cells[(kind, ComplexityClass(cls_name))] = int(value)
        counts = ComponentCounts(cells)
    components = None
    if data.get("components") is not None:
        components = tuple(
            (
                ComponentKind(entry["kind"]),
                FileCounts(int(entry["primary_files"]), int(entry["data_elements"])),
            )
            for entry in data["components"]  # type: ignore[union-attr]
        )
    return ProjectRecord(
        id=str(data["id"]),
        quality_rating=QualityRating(data["quality_rating"]),
        counting_method=CountingMethod(data["counting_method"]),
        resource_level=int(data["resource_level"]),
        development_type=DevelopmentType(data["development_type"]),
        normalized_effort=float(data["normalized_effort"]),
        counts=counts,
        gsc=None if data.get("gsc") is None else GscRatings(tuple(int(v) for v in data["gsc"])),
        components=components,
    )


def records_to_json_list(records: Sequence[ProjectRecord]) -> List[Dict[str, object]]:
    return [record_to_json_dict(r) for r in records]


def records_from_json_list(data: Sequence[Mapping[str, object]]) -> List[ProjectRecord]:
    return [record_from_json_dict(d) for d in data]


def _default_count_max() -> Dict[ComponentKind, int]:
    # Transaction-heavy mix: small projects count more inputs/outputs and
    # logical files than external interfaces.
    return {
        ComponentKind.EI: 20,
        ComponentKind.EO: 20,
        ComponentKind.EQ: 12,
        ComponentKind.ILF: 15,
        ComponentKind.EIF: 8,
    }


@dataclass(frozen=True)
class GeneratorSpec:
    """Parameters of the synthetic project generator."""

    n_projects: int
    true_weights: WeightMatrix = ORIGINAL_WEIGHTS
    true_coefficient: float = 3.5
    true_exponent: float = 0.9
    count_max: Mapping[ComponentKind, int] = field(default_factory=_default_count_max)
    noise_sigma: float = 0.0
    outlier_rate: float = 0.0
    outlier_multiplier: float = 10.0
    seed: int = 0

    def __post_init__(self) -> None:
        if self.n_projects <= 0:
            raise ValueError("n_projects must be positive")
        if self.true_coefficient <= 0.0:
            raise ValueError("true_coefficient must be positive")
        if self.noise_sigma < 0.0:
            raise ValueError("noise_sigma must be nonnegative")
        if not 0.0 <= self.outlier_rate < 1.0:
            raise ValueError("outlier_rate must lie in [0, 1)")
        if self.outlier_multiplier <= 0.0:
            raise ValueError("outlier_multiplier must be positive")
        maxima = dict(self.count_max)
        for kind in KINDS:
            value = int(maxima.get(kind, 0))
            if value < 0:
                raise ValueError(f"count_max for {kind.value} must be nonnegative")
            maxima[kind] = value
        if all(v == 0 for v in maxima.values()):
            raise ValueError("at least one component must allow nonzero counts")
        object.__setattr__(self, "count_max", maxima)

    def to_json_dict(self) -> Dict[str, object]:
        return {
            "n_projects": self.n_projects,
            "true_weights": self.true_weights.to_json_dict(),
            "true_coefficient": self.true_coefficient,
            "true_exponent": self.true_exponent,
            "count_max": {kind.value: self.count_max[kind] for kind in KINDS},
            "noise_sigma": self.noise_sigma,
            "outlier_rate": self.outlier_rate,
            "outlier_multiplier": self.outlier_multiplier,
            "seed": self.seed,
        }

    @classmethod
    def from_json_dict(cls, data: Mapping[str, object]) -> "GeneratorSpec":
        defaults: Dict[str, object] = {}
        if "true_weights" in data:
            defaults["true_weights"] = WeightMatrix.from_json_dict(data["true_weights"])
        if "count_max" in data:
            defaults["count_max"] = {
                ComponentKind(k): int(v) for k, v in data["count_max"].items()
            }
        for key in ("true_coefficient", "true_exponent", "noise_sigma",
                    "outlier_rate", "outlier_multiplier"):
            if key in data:
                defaults[key] = float(data[key])
        if "seed" in data:
            defaults["seed"] = int(data["seed"])
        try:
            n_projects = int(data["n_projects"])
        except KeyError:
            raise ValueError("generator spec must define n_projects") from None
        return cls(n_projects=n_projects, **defaults)


def generate(spec: GeneratorSpec) -> List[ProjectRecord]:
    """Draw a reproducible synthetic dataset that passes the default filter."""
    rng = np.random.default_rng(spec.seed)
    weights = spec.true_weights.as_vector()
    maxima = np.array(
        [spec.count_max[kind] for kind, _ in CELLS], dtype=np.int64
    )
    records: List[ProjectRecord] = []
    for i in range(spec.n_projects):
        while True:
            cells = rng.integers(0, maxima + 1)
            if cells.sum() > 0:
                break
        counts = ComponentCounts.from_vector(cells)
        ufp_true = float(np.dot(cells.astype(float), weights))
        noise = float(rng.normal(0.0, spec.noise_sigma)) if spec.noise_sigma > 0.0 else 0.0
        effort = spec.true_coefficient * ufp_true**spec.true_exponent * math.exp(noise)
        if spec.outlier_rate > 0.0 and rng.random() < spec.outlier_rate:
            effort *= spec.outlier_multiplier
        gsc = GscRatings(tuple(int(v) for v in rng.integers(0, 6, size=14)))
        records.append(
            ProjectRecord(
                id=f"P{i + 1:04d}",
                quality_rating=QualityRating.A,
                counting_method=CountingMethod.IFPUG,
                resource_level=1,
                development_type=DevelopmentType.NEW_DEVELOPMENT,
                normalized_effort=effort,
                counts=counts,
                gsc=gsc,
            )
        )
    return records
