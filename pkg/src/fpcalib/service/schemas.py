"""Pydantic request/response models for the HTTP service.

These mirror the JSON interchange schemas of the core package; value
validation beyond shape (weight monotonicity, rating ranges, ...) is
delegated to the core types so both surfaces give the same messages.
"""
from __future__ import annotations

from typing import Dict, List, Literal, Optional

from pydantic import BaseModel, Field

KindName = Literal["EI", "EO", "EQ", "ILF", "EIF"]

#: kind -> {"low"|"average"|"high" -> value}
WeightsDoc = Dict[KindName, Dict[Literal["low", "average", "high"], float]]
CountsDoc = Dict[KindName, Dict[Literal["low", "average", "high"], int]]


class RecordModel(BaseModel):
    id: str
    quality_rating: Literal["A", "B", "C", "D"]
    counting_method: Literal["IFPUG", "COSMIC", "MARK_II", "OTHER"]
    resource_level: int
    development_type: Literal["NewDevelopment", "Enhancement", "Redevelopment", "Other"]
    normalized_effort: float
    counts: Optional[CountsDoc] = None
    gsc: Optional[List[int]] = None
    components: Optional[List["ComponentEntry"]] = None


class ComponentEntry(BaseModel):
    kind: KindName
    primary_files: int
    data_elements: int


class ClassifyRequest(BaseModel):
    kind: KindName
    primary_files: int
    data_elements: int


class ClassifyResponse(BaseModel):
    complexity: Literal["low", "average", "high"]


class CountRequest(BaseModel):
    records: List[RecordModel]
    weights: Optional[WeightsDoc] = None


class CountRow(BaseModel):
    id: str
    ufp: float
    vaf: Optional[float] = None
    fp: Optional[float] = None


class CountResponse(BaseModel):
    rows: List[CountRow]


class FuzzyWeightRequest(BaseModel):
    kind: KindName
    primary_files: int
    data_elements: int
    weights: Optional[WeightsDoc] = None


class FuzzyWeightResponse(BaseModel):
    weight: float


class Inventory(BaseModel):
    id: str
    components: List[ComponentEntry]


class FuzzyCountRequest(BaseModel):
    inventories: List[Inventory]
    weights: Optional[WeightsDoc] = None


class FuzzyCountRow(BaseModel):
    id: str
    fuzzy_ufp: float


class FuzzyCountResponse(BaseModel):
    rows: List[FuzzyCountRow]


class FuzzyConfigRequest(BaseModel):
    weights: Optional[WeightsDoc] = None


class CriteriaModel(BaseModel):
    allowed_quality: List[Literal["A", "B", "C", "D"]]
    allowed_methods: List[Literal["IFPUG", "COSMIC", "MARK_II", "OTHER"]]
    allowed_resource_levels: List[int]
    allowed_dev_types: List[Literal["NewDevelopment", "Enhancement", "Redevelopment", "Other"]]
    require_counts: bool = True
    require_gsc: bool = True


class FilterRequest(BaseModel):
    records: List[RecordModel]
    criteria: Optional[CriteriaModel] = None


class FilterResponse(BaseModel):
    records: List[RecordModel]
    n_input: int
    n_kept: int


class FitModel(BaseModel):
    alpha: float
    beta: float
    coefficient: float
    exponent: float
    r_squared: float
    residual_mean: float
    residual_std: float
    n: int


class DiagnosticsModel(BaseModel):
    residual_mean: float
    residual_std: float
    skewness: float
    excess_kurtosis: float
    r_squared: float
    warnings: List[str]


class FitRequest(BaseModel):
    records: List[RecordModel]
    weights: Optional[WeightsDoc] = None


class FitResponse(BaseModel):
    fit: FitModel
    diagnostics: DiagnosticsModel


class PredictRequest(BaseModel):
    fit: FitModel
    ufp: float


class PredictResponse(BaseModel):
    effort: float


class TrainingModel(BaseModel):
    learning_rate: float = 0.05
    max_epochs: int = 5000
    convergence_tol: float = 1e-8
    outlier_zscore: float = 3.0
    seed: int = 0


class CalibrateRequest(BaseModel):
    records: List[RecordModel]
    fit: FitModel
    initial_weights: Optional[WeightsDoc] = None
    training: Optional[TrainingModel] = None


class CalibrationReportModel(BaseModel):
    initial_weights: WeightsDoc
    final_weights: WeightsDoc
    loss_trace: List[float]
    excluded_outliers: List[str]
    epochs_run: int
    converged: bool


class ExperimentConfigModel(BaseModel):
    n_trials: int = 5
    train_fraction: float = 100 / 184
    seed: int = 0
    pred_levels: List[float] = Field(default_factory=lambda: [25.0, 50.0, 75.0, 100.0])
    training: TrainingModel = Field(default_factory=TrainingModel)


class EvaluateRequest(BaseModel):
    records: List[RecordModel]
    fit: FitModel
    config: Optional[ExperimentConfigModel] = None


class GenerateRequest(BaseModel):
    n_projects: int
    true_weights: Optional[WeightsDoc] = None
    true_coefficient: Optional[float] = None
    true_exponent: Optional[float] = None
    count_max: Optional[Dict[KindName, int]] = None
    noise_sigma: Optional[float] = None
    outlier_rate: Optional[float] = None
    outlier_multiplier: Optional[float] = None
    seed: Optional[int] = None


class GenerateResponse(BaseModel):
    records: List[RecordModel]


class HealthResponse(BaseModel):
    status: str
    version: str
