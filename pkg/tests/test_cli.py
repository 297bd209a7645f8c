import json
import subprocess
import sys

import pytest

CLI = [sys.executable, "-m", "fpcalib.cli"]

TABLE_VI_INVENTORY = [
    {"id": "A", "components": [{"kind": "ILF", "primary_files": 3, "data_elements": 50}]},
    {"id": "B", "components": [{"kind": "ILF", "primary_files": 3, "data_elements": 20}]},
    {"id": "C", "components": [{"kind": "ILF", "primary_files": 3, "data_elements": 19}]},
]


def run_cli(*args, cwd=None):
    return subprocess.run(
        CLI + [str(a) for a in args], capture_output=True, text=True, cwd=cwd
    )


def run_pipeline(workdir, seed=123):
    """generate -> filter -> fit -> calibrate -> evaluate, file-passing."""
    steps = [
        ["generate", "--n", 60, "--seed", seed, "--output", workdir / "records.csv"],
        ["filter", "--input", workdir / "records.csv", "--output", workdir / "kept.csv"],
        ["fit", "--input", workdir / "kept.csv", "--output", workdir / "fit.json"],
        ["calibrate", "--input", workdir / "kept.csv", "--fit", workdir / "fit.json",
         "--output", workdir / "report.json"],
        ["evaluate", "--input", workdir / "kept.csv", "--fit", workdir / "fit.json",
         "--seed", 7, "--output", workdir / "summary.json",
         "--mre-out", workdir / "mres.csv"],
    ]
    for step in steps:
        result = run_cli(*step)
        assert result.returncode == 0, f"{step[0]} failed: {result.stderr}"


@pytest.fixture(scope="module")
def pipeline_dir(tmp_path_factory):
    workdir = tmp_path_factory.mktemp("pipeline")
    run_pipeline(workdir)
    return workdir


class TestPipeline:
    def test_artifacts_exist(self, pipeline_dir):
        for name in ("records.csv", "kept.csv", "fit.json", "report.json",
                     "summary.json", "mres.csv"):
            assert (pipeline_dir / name).exists()

    def test_fit_document_shape(self, pipeline_dir):
        doc = json.loads((pipeline_dir / "fit.json").read_text())
        assert set(doc) == {"fit", "diagnostics"}
        assert doc["fit"]["n"] == 60

    def test_calibration_report_shape(self, pipeline_dir):
        doc = json.loads((pipeline_dir / "report.json").read_text())
        assert set(doc["final_weights"]) == {"EI", "EO", "EQ", "ILF", "EIF"}
        assert doc["loss_trace"][-1] <= doc["loss_trace"][0]

    def test_summary_has_all_trials(self, pipeline_dir):
        doc = json.loads((pipeline_dir / "summary.json").read_text())
        assert len(doc["trials"]) == 5
        assert doc["average_mmre_original"] is not None

    def test_mre_csv_layout(self, pipeline_dir):
        lines = (pipeline_dir / "mres.csv").read_text().splitlines()
        assert lines[0] == "trial,id,mre_original,mre_calibrated"
        assert len(lines) > 5

    def test_byte_reproducible(self, pipeline_dir, tmp_path):
        rerun = tmp_path / "again"
        rerun.mkdir()
        run_pipeline(rerun)
        for name in ("records.csv", "kept.csv", "fit.json", "report.json",
                     "summary.json", "mres.csv"):
            assert (rerun / name).read_bytes() == (pipeline_dir / name).read_bytes(), name


class TestCount:
    def test_single_average_ilf(self, tmp_path):
        records = [{
            "id": "ONE",
            "quality_rating": "A",
            "counting_method": "IFPUG",
            "resource_level": 1,
            "development_type": "NewDevelopment",
            "normalized_effort": 50.0,
            "counts": {k: {"low": 0, "average": 1 if k == "ILF" else 0, "high": 0}
                       for k in ("EI", "EO", "EQ", "ILF", "EIF")},
            "gsc": [0] * 14,
        }]
        path = tmp_path / "one.json"
        path.write_text(json.dumps(records))
        result = run_cli("count", "--input", path)
        assert result.returncode == 0
        row = json.loads(result.stdout)["rows"][0]
        assert row["ufp"] == 10.0
        assert row["vaf"] == 0.65
        assert row["fp"] == pytest.approx(6.5)

    def test_empty_record_file(self, tmp_path):
        path = tmp_path / "empty.json"
        path.write_text("[]")
        result = run_cli("count", "--input", path)
        assert result.returncode == 0
        assert json.loads(result.stdout) == {"rows": []}

    def test_table_format(self, tmp_path, pipeline_dir):
        result = run_cli("count", "--input", pipeline_dir / "records.csv",
                         "--format", "table")
        assert result.returncode == 0
        assert result.stdout.startswith("id")

    def test_bad_weights_names_cell(self, tmp_path, pipeline_dir):
        weights = {"EI": {"low": 3, "average": 4, "high": 6}}
        path = tmp_path / "weights.json"
        path.write_text(json.dumps(weights))
        result = run_cli("count", "--input", pipeline_dir / "records.csv",
                         "--weights", path)
        assert result.returncode == 1
        assert "EO/low" in result.stderr

    def test_missing_input_file(self):
        result = run_cli("count", "--input", "no-such-file.csv")
        assert result.returncode == 1
        assert "error" in result.stderr


class TestFuzzyCount:
    def test_worked_values(self, tmp_path):
        path = tmp_path / "inventory.json"
        path.write_text(json.dumps(TABLE_VI_INVENTORY))
        result = run_cli("fuzzy-count", "--input", path)
        assert result.returncode == 0
        rows = {r["id"]: r["fuzzy_ufp"] for r in json.loads(result.stdout)["rows"]}
        assert rows["A"] == pytest.approx(11.4, abs=0.15)
        assert rows["B"] == pytest.approx(10.4, abs=0.15)
        assert rows["C"] == pytest.approx(10.2, abs=0.15)

    def test_calibrated_weights_flow_back_in(self, tmp_path, pipeline_dir):
        # calibration report -> fuzzy-count --weights: the interchange loop
        path = tmp_path / "inventory.json"
        path.write_text(json.dumps(TABLE_VI_INVENTORY))
        base = run_cli("fuzzy-count", "--input", path)
        tuned = run_cli("fuzzy-count", "--input", path,
                        "--weights", pipeline_dir / "report.json")
        assert tuned.returncode == 0
        base_rows = {r["id"]: r["fuzzy_ufp"] for r in json.loads(base.stdout)["rows"]}
        tuned_rows = {r["id"]: r["fuzzy_ufp"] for r in json.loads(tuned.stdout)["rows"]}
        report = json.loads((pipeline_dir / "report.json").read_text())
        if report["final_weights"] != report["initial_weights"]:
            assert tuned_rows != base_rows


class TestDumpConfig:
    def test_default_config(self, tmp_path):
        out = tmp_path / "config.json"
        result = run_cli("dump-config", "--output", out)
        assert result.returncode == 0
        doc = json.loads(out.read_text())
        assert doc["ILF"]["input1"]["medium"] == [15, 25, 45, 55]

    def test_retuned_output_triangles_match_report(self, tmp_path, pipeline_dir):
        out = tmp_path / "tuned.json"
        result = run_cli("dump-config", "--weights", pipeline_dir / "report.json",
                         "--output", out)
        assert result.returncode == 0
        doc = json.loads(out.read_text())
        weights = json.loads((pipeline_dir / "report.json").read_text())["final_weights"]
        row = weights["ILF"]
        assert doc["ILF"]["output"]["average"] == [row["low"], row["average"], row["high"]]


class TestFilterCmd:
    def test_criteria_file(self, tmp_path, pipeline_dir):
        criteria = {
            "allowed_quality": ["B"],
            "allowed_methods": ["IFPUG"],
            "allowed_resource_levels": [1],
            "allowed_dev_types": ["NewDevelopment"],
            "require_counts": True,
            "require_gsc": True,
        }
        cpath = tmp_path / "criteria.json"
        cpath.write_text(json.dumps(criteria))
        out = tmp_path / "none.csv"
        result = run_cli("filter", "--input", pipeline_dir / "records.csv",
                         "--criteria", cpath, "--output", out)
        assert result.returncode == 0
        assert "kept 0 of 60" in result.stderr

    def test_json_output_format(self, tmp_path, pipeline_dir):
        out = tmp_path / "kept.json"
        result = run_cli("filter", "--input", pipeline_dir / "records.csv",
                         "--output", out)
        assert result.returncode == 0
        assert len(json.loads(out.read_text())) == 60


class TestErrorModes:
    def test_unreachable_server_is_internal_error(self, tmp_path):
        path = tmp_path / "inv.json"
        path.write_text(json.dumps(TABLE_VI_INVENTORY))
        result = run_cli("fuzzy-count", "--input", path, "--server", "http://127.0.0.1:9")
        assert result.returncode == 2

    def test_generate_requires_project_count(self, tmp_path):
        result = run_cli("generate", "--output", tmp_path / "x.csv")
        assert result.returncode == 1
        assert "n_projects" in result.stderr

    def test_invalid_json_input(self, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text("{not json")
        result = run_cli("fuzzy-count", "--input", path)
        assert result.returncode == 1
        assert "JSON" in result.stderr
