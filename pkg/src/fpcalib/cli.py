"""Command-line front end of the calibration pipeline.

Every subcommand is a thin client of the HTTP service: files are read
and written locally, all computation happens behind the service
endpoints.  Without ``--server`` the application is embedded in-process,
so the pipeline runs standalone and fully deterministically.

Stages exchange files: ``generate`` and ``filter`` produce record files
(CSV or JSON by extension), ``fit`` produces a fit JSON, ``calibrate`` a
calibration report JSON whose weights feed ``count``/``fuzzy-count``
``--weights``, and ``evaluate`` emits the accuracy summary.

Exit codes: 0 success, 1 validation error, 2 internal error.
"""
from __future__ import annotations

import csv
import json
import sys
from pathlib import Path
from typing import List, Optional

import click

from . import __version__, dataio
from .service.client import ServiceClient, ServiceError


def _fail(message: str, code: int = 1) -> None:
    click.echo(f"error: {message}", err=True)
    sys.exit(code)


def _client(server: Optional[str]) -> ServiceClient:
    return ServiceClient(base_url=server)


def _post(client: ServiceClient, path: str, payload: dict) -> dict:
    try:
        return client.post(path, payload)
    except ServiceError as exc:
        _fail(exc.detail if exc.status_code < 500 else str(exc),
              code=2 if exc.status_code >= 500 else 1)
    except Exception as exc:  # connection problems and the like
        _fail(str(exc), code=2)


def _read_json(path: str):
    try:
        with open(path) as handle:
            return json.load(handle)
    except OSError as exc:
        _fail(f"cannot read {path}: {exc.strerror}")
    except json.JSONDecodeError as exc:
        _fail(f"{path} is not valid JSON: {exc}")


def _dump_json(document, output: Optional[str]) -> None:
    text = json.dumps(document, indent=2, sort_keys=True) + "\n"
    if output:
        Path(output).write_text(text)
    else:
        click.echo(text, nl=False)


def _load_wire_records(path: str) -> List[dict]:
    """Record file -> wire-format record list (CSV or JSON by extension)."""
    try:
        if path.endswith(".json"):
            data = _read_json(path)
            if not isinstance(data, list):
                _fail(f"{path}: record JSON must be an array")
            return data
        return dataio.records_to_json_list(dataio.load_csv(path))
    except dataio.CsvFormatError as exc:
        _fail(f"{path}: {exc}")
    except OSError as exc:
        _fail(f"cannot read {path}: {exc.strerror}")
    except ValueError as exc:
        _fail(f"{path}: {exc}")


def _write_wire_records(wire: List[dict], output: str) -> None:
    if output.endswith(".json"):
        _dump_json(wire, output)
    else:
        dataio.save_csv(dataio.records_from_json_list(wire), output)


def _load_weights_doc(path: Optional[str]) -> Optional[dict]:
    """A weight matrix document, or the final weights of a calibration report."""
    if path is None:
        return None
    doc = _read_json(path)
    if isinstance(doc, dict) and "final_weights" in doc:
        return doc["final_weights"]
    return doc


server_option = click.option(
    "--server", default=None, metavar="URL",
    help="Base URL of a running service; default is in-process.",
)
format_option = click.option(
    "--format", "output_format", type=click.Choice(["json", "table"]), default="json",
    help="Stdout rendering; files always receive JSON/CSV.",
)


@click.group()
@click.version_option(__version__)
def main() -> None:
    """Function point counting, fuzzy weighting, and weight calibration."""


@main.command()
@click.option("--input", "input_path", required=True, help="Record file (.csv or .json).")
@click.option("--weights", "weights_path", default=None, help="Weight matrix JSON.")
@click.option("--output", default=None, help="Write the result JSON here.")
@format_option
@server_option
def count(input_path, weights_path, output, output_format, server):
    """Crisp UFP/VAF/FP per record."""
    records = _load_wire_records(input_path)
    with _client(server) as client:
        result = _post(client, "/count", {
            "records": records,
            "weights": _load_weights_doc(weights_path),
        })
    if output_format == "table" and not output:
        click.echo(f"{'id':<12} {'UFP':>10} {'VAF':>6} {'FP':>10}")
        for row in result["rows"]:
            vaf = "" if row["vaf"] is None else f"{row['vaf']:.2f}"
            fp = "" if row["fp"] is None else f"{row['fp']:.2f}"
            click.echo(f"{row['id']:<12} {row['ufp']:>10.2f} {vaf:>6} {fp:>10}")
    else:
        _dump_json(result, output)


@main.command(name="fuzzy-count")
@click.option("--input", "input_path", required=True,
              help="Inventory JSON: array of {id, components:[{kind, primary_files, data_elements}]}.")
@click.option("--weights", "weights_path", default=None,
              help="Weight matrix JSON or calibration report (uses final_weights).")
@click.option("--output", default=None, help="Write the result JSON here.")
@format_option
@server_option
def fuzzy_count(input_path, weights_path, output, output_format, server):
    """Continuous fuzzy UFP per component inventory."""
    data = _read_json(input_path)
    if not isinstance(data, list):
        _fail(f"{input_path}: inventory JSON must be an array")
    inventories = [
        {"id": str(entry.get("id", i)), "components": entry.get("components", [])}
        for i, entry in enumerate(data)
    ]
    with _client(server) as client:
        result = _post(client, "/fuzzy/count", {
            "inventories": inventories,
            "weights": _load_weights_doc(weights_path),
        })
    if output_format == "table" and not output:
        for row in result["rows"]:
            click.echo(f"{row['id']:<12} {row['fuzzy_ufp']:.4f}")
    else:
        _dump_json(result, output)


@main.command(name="filter")
@click.option("--input", "input_path", required=True, help="Record file (.csv or .json).")
@click.option("--criteria", "criteria_path", default=None,
              help="Criteria JSON; default admits quality A/B, IFPUG, level 1, new/redevelopment.")
@click.option("--output", required=True, help="Filtered record file (.csv or .json).")
@server_option
def filter_cmd(input_path, criteria_path, output, server):
    """Keep only records admitted by the filter criteria."""
    records = _load_wire_records(input_path)
    criteria = _read_json(criteria_path) if criteria_path else None
    with _client(server) as client:
        result = _post(client, "/filter", {"records": records, "criteria": criteria})
    _write_wire_records(result["records"], output)
    click.echo(f"kept {result['n_kept']} of {result['n_input']} records", err=True)


@main.command()
@click.option("--input", "input_path", required=True, help="Record file (.csv or .json).")
@click.option("--weights", "weights_path", default=None,
              help="Weight matrix for the UFP counts (default: original weights).")
@click.option("--output", default=None, help="Write the fit JSON here.")
@server_option
def fit(input_path, weights_path, output, server):
    """Fit effort = A * UFP^B by log-log least squares."""
    records = _load_wire_records(input_path)
    with _client(server) as client:
        result = _post(client, "/fit", {
            "records": records,
            "weights": _load_weights_doc(weights_path),
        })
    for warning in result["diagnostics"]["warnings"]:
        click.echo(f"warning: {warning}", err=True)
    _dump_json(result, output)


@main.command()
@click.option("--input", "input_path", required=True, help="Training record file.")
@click.option("--fit", "fit_path", required=True, help="Fit JSON from the fit stage.")
@click.option("--weights", "weights_path", default=None,
              help="Initial weight matrix (default: original weights).")
@click.option("--training", "training_path", default=None, help="Training config JSON.")
@click.option("--output", default=None, help="Write the calibration report JSON here.")
@format_option
@server_option
def calibrate(input_path, fit_path, weights_path, training_path, output, output_format, server):
    """Calibrate the 15 weights against recorded efforts."""
    records = _load_wire_records(input_path)
    fit_doc = _read_json(fit_path)
    payload = {
        "records": records,
        "fit": fit_doc.get("fit", fit_doc),
        "initial_weights": _load_weights_doc(weights_path),
        "training": _read_json(training_path) if training_path else None,
    }
    with _client(server) as client:
        result = _post(client, "/calibrate", payload)
    if output_format == "table" and not output:
        click.echo(f"{'component':<10} {'class':<8} {'original':>9} {'calibrated':>11}")
        for kind, row in result["initial_weights"].items():
            for cls in ("low", "average", "high"):
                click.echo(
                    f"{kind:<10} {cls:<8} {row[cls]:>9.2f} "
                    f"{result['final_weights'][kind][cls]:>11.2f}"
                )
        click.echo(
            f"epochs: {result['epochs_run']}  converged: {result['converged']}  "
            f"outliers excluded: {len(result['excluded_outliers'])}"
        )
    else:
        _dump_json(result, output)


@main.command()
@click.option("--input", "input_path", required=True, help="Record file (.csv or .json).")
@click.option("--fit", "fit_path", required=True, help="Fit JSON from the fit stage.")
@click.option("--config", "config_path", default=None, help="Experiment config JSON.")
@click.option("--seed", default=None, type=int, help="Override the experiment seed.")
@click.option("--output", default=None, help="Write the summary JSON here.")
@click.option("--mre-out", "mre_out", default=None,
              help="Also write per-project MREs as CSV (trial, id, original, calibrated).")
@format_option
@server_option
def evaluate(input_path, fit_path, config_path, seed, output, mre_out, output_format, server):
    """Random-split experiments: accuracy before and after calibration."""
    records = _load_wire_records(input_path)
    fit_doc = _read_json(fit_path)
    config = _read_json(config_path) if config_path else {}
    if seed is not None:
        config["seed"] = seed
    payload = {
        "records": records,
        "fit": fit_doc.get("fit", fit_doc),
        "config": config or None,
    }
    with _client(server) as client:
        result = _post(client, "/evaluate", payload)
    if mre_out:
        with open(mre_out, "w", newline="") as handle:
            writer = csv.writer(handle, lineterminator="\n")
            writer.writerow(["trial", "id", "mre_original", "mre_calibrated"])
            for trial in result["trials"]:
                for row in trial["test_mres"]:
                    writer.writerow(
                        [trial["index"], row["id"], repr(row["original"]), repr(row["calibrated"])]
                    )
    if output_format == "table" and not output:
        click.echo(_summary_table(result))
    else:
        _dump_json(result, output)


def _summary_table(result: dict) -> str:
    lines = ["Trial  MMRE original  MMRE calibrated  Improvement %"]
    for trial in result["trials"]:
        if trial.get("error"):
            lines.append(f"{trial['index'] + 1:<5d}  failed: {trial['error']}")
            continue
        lines.append(
            f"{trial['index'] + 1:<5d}  {trial['original']['mmre']:<13.3f}  "
            f"{trial['calibrated']['mmre']:<15.3f}  {trial['mmre_improvement_pct']:.1f}%"
        )
    if result["average_mmre_original"] is not None:
        lines.append(
            f"Avg    {result['average_mmre_original']:<13.3f}  "
            f"{result['average_mmre_calibrated']:<15.3f}  "
            f"{result['average_improvement_pct']:.1f}%"
        )
        lines.append("")
        lines.append("PRED level  Average original  Average calibrated  Improvement (points)")
        for level, row in result["average_pred"].items():
            lines.append(
                f"{float(level):<10.0f}  {row['original']:<16.3f}  "
                f"{row['calibrated']:<18.3f}  {row['improvement_points']:+.1f}"
            )
    return "\n".join(lines)


@main.command()
@click.option("--spec", "spec_path", default=None, help="Generator spec JSON.")
@click.option("--n", "n_projects", default=None, type=int, help="Number of projects.")
@click.option("--seed", default=None, type=int, help="Override the generator seed.")
@click.option("--output", required=True, help="Record file to write (.csv or .json).")
@server_option
def generate(spec_path, n_projects, seed, output, server):
    """Draw a synthetic project dataset."""
    payload = _read_json(spec_path) if spec_path else {}
    if n_projects is not None:
        payload["n_projects"] = n_projects
    if seed is not None:
        payload["seed"] = seed
    if "n_projects" not in payload:
        _fail("generator needs --n or a spec file defining n_projects")
    with _client(server) as client:
        result = _post(client, "/generate", payload)
    _write_wire_records(result["records"], output)
    click.echo(f"wrote {len(result['records'])} records to {output}", err=True)


@main.command(name="dump-config")
@click.option("--weights", "weights_path", default=None,
              help="Weight matrix JSON or calibration report (uses final_weights).")
@click.option("--output", default=None, help="Write the fuzzy config JSON here.")
@server_option
def dump_config(weights_path, output, server):
    """Emit the fuzzy membership configuration for a weight matrix."""
    with _client(server) as client:
        result = _post(client, "/fuzzy/config", {"weights": _load_weights_doc(weights_path)})
    _dump_json(result, output)


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8000, show_default=True, type=int)
def serve(host, port):
    """Run the HTTP service."""
    import uvicorn

    uvicorn.run("fpcalib.service:app", host=host, port=port)


if __name__ == "__main__":
    main()
