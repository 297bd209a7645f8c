"""FastAPI application exposing the calibration pipeline.

Every endpoint is a stateless wrapper over the core package: requests
carry full documents (records, weights, fits), responses carry the
computed documents, and core ``ValueError`` messages surface as HTTP
400 details.
"""
from __future__ import annotations

from typing import Dict, List, Optional

from fastapi import FastAPI, HTTPException

from .. import __version__
from ..calibration import TrainingConfig, calibrate
from ..dataio import GeneratorSpec, generate, record_from_json_dict, record_to_json_dict
from ..effort import (
    FilterCriteria,
    ProjectRecord,
    RegressionFit,
    filter_projects,
    fit_effort_equation,
    predict_effort,
    residual_diagnostics,
)
from ..evaluation import ExperimentConfig, run_experiments
from ..fp import (
    ORIGINAL_WEIGHTS,
    ComponentKind,
    FileCounts,
    WeightMatrix,
    classify_complexity,
    function_points,
    unadjusted_fp,
    value_adjustment_factor,
)
from ..fuzzy import config_to_json_dict, default_config, fuzzy_ufp, fuzzy_weight
from . import schemas


def _weights_from(doc: Optional[dict]) -> WeightMatrix:
    if doc is None:
        return ORIGINAL_WEIGHTS
    return WeightMatrix.from_json_dict(doc)


def _records_from(models: List[schemas.RecordModel]) -> List[ProjectRecord]:
    return [record_from_json_dict(m.model_dump()) for m in models]


def _records_to(records: List[ProjectRecord]) -> List[schemas.RecordModel]:
    return [schemas.RecordModel(**record_to_json_dict(r)) for r in records]


def _fit_from(model: schemas.FitModel) -> RegressionFit:
    return RegressionFit.from_json_dict(model.model_dump())


def _training_from(model: Optional[schemas.TrainingModel]) -> TrainingConfig:
    if model is None:
        return TrainingConfig()
    return TrainingConfig.from_json_dict(model.model_dump())


def _ufp_samples(records: List[ProjectRecord], weights: WeightMatrix):
    samples = []
    for record in records:
        if record.counts is None:
            raise ValueError(f"project {record.id!r} has no component counts")
        samples.append((unadjusted_fp(record.counts, weights), record.normalized_effort))
    return samples


def create_app() -> FastAPI:
    app = FastAPI(
        title="fpcalib",
        description="Function point counting, fuzzy complexity weighting, "
        "and effort-model weight calibration.",
        version=__version__,
    )

    def run(fn, *args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except ValueError as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from exc

    @app.get("/health", response_model=schemas.HealthResponse)
    def health() -> schemas.HealthResponse:
        return schemas.HealthResponse(status="ok", version=__version__)

    @app.get("/weights/default")
    def default_weights() -> Dict[str, Dict[str, float]]:
        return ORIGINAL_WEIGHTS.to_json_dict()

    @app.post("/classify", response_model=schemas.ClassifyResponse)
    def classify(req: schemas.ClassifyRequest) -> schemas.ClassifyResponse:
        files = run(FileCounts, req.primary_files, req.data_elements)
        complexity = classify_complexity(ComponentKind(req.kind), files)
        return schemas.ClassifyResponse(complexity=complexity.value)

    @app.post("/count", response_model=schemas.CountResponse)
    def count(req: schemas.CountRequest) -> schemas.CountResponse:
        weights = run(_weights_from, req.weights)
        records = run(_records_from, req.records)
        rows = []
        for record in records:
            if record.counts is None:
                raise HTTPException(
                    status_code=400,
                    detail=f"project {record.id!r} has no component counts",
                )
            ufp = unadjusted_fp(record.counts, weights)
            vaf = fp = None
            if record.gsc is not None:
                vaf = value_adjustment_factor(record.gsc)
                fp = function_points(ufp, vaf)
            rows.append(schemas.CountRow(id=record.id, ufp=ufp, vaf=vaf, fp=fp))
        return schemas.CountResponse(rows=rows)

    @app.post("/fuzzy/config")
    def fuzzy_config(req: schemas.FuzzyConfigRequest) -> dict:
        weights = run(_weights_from, req.weights)
        return config_to_json_dict(default_config(weights))

    @app.post("/fuzzy/weight", response_model=schemas.FuzzyWeightResponse)
    def fuzzy_weight_endpoint(req: schemas.FuzzyWeightRequest) -> schemas.FuzzyWeightResponse:
        weights = run(_weights_from, req.weights)
        files = run(FileCounts, req.primary_files, req.data_elements)
        config = default_config(weights)
        value = fuzzy_weight(config, ComponentKind(req.kind), files)
        return schemas.FuzzyWeightResponse(weight=value)

    @app.post("/fuzzy/count", response_model=schemas.FuzzyCountResponse)
    def fuzzy_count(req: schemas.FuzzyCountRequest) -> schemas.FuzzyCountResponse:
        weights = run(_weights_from, req.weights)
        config = default_config(weights)
        rows = []
        for inventory in req.inventories:
            components = [
                (ComponentKind(c.kind), run(FileCounts, c.primary_files, c.data_elements))
                for c in inventory.components
            ]
            rows.append(
                schemas.FuzzyCountRow(id=inventory.id, fuzzy_ufp=fuzzy_ufp(config, components))
            )
        return schemas.FuzzyCountResponse(rows=rows)

    @app.post("/filter", response_model=schemas.FilterResponse)
    def filter_endpoint(req: schemas.FilterRequest) -> schemas.FilterResponse:
        records = run(_records_from, req.records)
        if req.criteria is None:
            criteria = FilterCriteria.default()
        else:
            criteria = run(FilterCriteria.from_json_dict, req.criteria.model_dump())
        kept = filter_projects(records, criteria)
        return schemas.FilterResponse(
            records=_records_to(kept), n_input=len(records), n_kept=len(kept)
        )

    @app.post("/fit", response_model=schemas.FitResponse)
    def fit_endpoint(req: schemas.FitRequest) -> schemas.FitResponse:
        weights = run(_weights_from, req.weights)
        records = run(_records_from, req.records)
        samples = run(_ufp_samples, records, weights)
        fit = run(fit_effort_equation, samples)
        diagnostics = residual_diagnostics(fit, samples)
        return schemas.FitResponse(
            fit=schemas.FitModel(**fit.to_json_dict()),
            diagnostics=schemas.DiagnosticsModel(**diagnostics.to_json_dict()),
        )

    @app.post("/predict", response_model=schemas.PredictResponse)
    def predict(req: schemas.PredictRequest) -> schemas.PredictResponse:
        fit = run(_fit_from, req.fit)
        return schemas.PredictResponse(effort=run(predict_effort, fit, req.ufp))

    @app.post("/calibrate", response_model=schemas.CalibrationReportModel)
    def calibrate_endpoint(req: schemas.CalibrateRequest) -> schemas.CalibrationReportModel:
        records = run(_records_from, req.records)
        initial = run(_weights_from, req.initial_weights)
        fit = run(_fit_from, req.fit)
        training = run(_training_from, req.training)
        report = run(calibrate, records, initial, fit, training)
        return schemas.CalibrationReportModel(**report.to_json_dict())

    @app.post("/evaluate")
    def evaluate(req: schemas.EvaluateRequest) -> dict:
        records = run(_records_from, req.records)
        fit = run(_fit_from, req.fit)
        if req.config is None:
            config = ExperimentConfig()
        else:
            config = run(ExperimentConfig.from_json_dict, req.config.model_dump())
        summary = run(run_experiments, records, config, fit)
        return summary.to_json_dict()

    @app.post("/generate", response_model=schemas.GenerateResponse)
    def generate_endpoint(req: schemas.GenerateRequest) -> schemas.GenerateResponse:
        doc = {k: v for k, v in req.model_dump().items() if v is not None}
        spec = run(GeneratorSpec.from_json_dict, doc)
        records = generate(spec)
        return schemas.GenerateResponse(records=_records_to(records))

    return app


app = create_app()
