"""Command-line wiring: subcommands, manifests, exit codes, reruns."""

import json
import subprocess
import sys

import numpy as np
import pytest

from teka.cli import main


def run(argv) -> int:
    return main([str(a) for a in argv])


class TestGen:
    def test_cbf_line_count(self, tmp_path):
        out = tmp_path / "cbf.tsv"
        assert run(["gen", "cbf", "--per-class", 100, "--seed", 7,
                    "--out", out]) == 0
        lines = out.read_text().strip().splitlines()
        assert len(lines) == 300

    def test_rosette_outputs(self, tmp_path):
        clean = tmp_path / "clean.csv"
        noisy = tmp_path / "noisy.csv"
        assert run(["gen", "rosette", "--instances", 2, "--seed", 3,
                    "--out-clean", clean, "--out-noisy", noisy]) == 0
        assert len(clean.read_text().strip().splitlines()) == 2
        assert len(noisy.read_text().strip().splitlines()) == 2

    def test_manifest_written(self, tmp_path):
        out = tmp_path / "cbf.tsv"
        run(["gen", "cbf", "--per-class", 2, "--out", out])
        doc = json.loads((tmp_path / "cbf.tsv.manifest.json").read_text())
        assert doc["command"] == "gen-cbf"
        assert doc["config"]["per_class"] == 2
        assert doc["outputs"] == [str(out)]
        assert "version" in doc


class TestAverage:
    def test_teka_centroid_and_trace(self, tmp_path):
        data = tmp_path / "train.tsv"
        run(["gen", "cbf", "--per-class", 4, "--seed", 5, "--out", data])
        cent = tmp_path / "cent.csv"
        trace = tmp_path / "trace.json"
        code = run(["average", "--in", data, "--label", 0, "--method", "teka",
                    "--nu", 0.01, "--max-iter", 3, "--out", cent,
                    "--trace", trace])
        assert code == 0
        rows = cent.read_text().strip().splitlines()
        assert len(rows) == 128
        assert all(len(r.split(",")) == 2 for r in rows)
        doc = json.loads(trace.read_text())
        assert doc["method"] == "teka"
        assert len(doc["trace"]) >= 1

    def test_unknown_label_fails(self, tmp_path):
        data = tmp_path / "train.tsv"
        run(["gen", "cbf", "--per-class", 2, "--out", data])
        assert run(["average", "--in", data, "--label", 7, "--method",
                    "euclidean", "--out", tmp_path / "c.csv"]) == 1


class TestClassify:
    def test_grid_selection_report(self, tmp_path):
        train = tmp_path / "train.tsv"
        test = tmp_path / "test.tsv"
        run(["gen", "cbf", "--per-class", 4, "--seed", 11, "--out", train])
        run(["gen", "cbf", "--per-class", 3, "--seed", 12, "--out", test])
        report = tmp_path / "rep.json"
        code = run(["classify", "--train", train, "--test", test,
                    "--method", "medoid_kdtw", "--grid", "0.01,0.1",
                    "--fast-loo", "--report", report])
        assert code == 0
        doc = json.loads(report.read_text())
        assert doc["nu_selected"] in (0.01, 0.1)
        assert 0.0 <= doc["error_rate"] <= 1.0
        assert doc["loo_error"] is not None

    def test_nu_and_grid_mutually_exclusive(self, tmp_path):
        assert run(["classify", "--train", "a", "--test", "b",
                    "--method", "teka", "--nu", 1, "--grid", "default",
                    "--report", "r.json"]) == 1


class TestPosterior:
    def test_csv_and_pgm(self, tmp_path):
        data = tmp_path / "d.tsv"
        run(["gen", "cbf", "--per-class", 2, "--seed", 2, "--out", data])
        csv = tmp_path / "post.csv"
        pgm = tmp_path / "post.pgm"
        assert run(["posterior", "--in", data, "--i", 0, "--j", 1,
                    "--nu", 0.01, "--out-csv", csv, "--out-pgm", pgm]) == 0
        rows = csv.read_text().strip().splitlines()
        assert len(rows) == 128
        assert pgm.read_bytes().startswith(b"P5\n")

    def test_out_of_range_index(self, tmp_path):
        data = tmp_path / "d.tsv"
        run(["gen", "cbf", "--per-class", 1, "--out", data])
        assert run(["posterior", "--in", data, "--i", 0, "--j", 99,
                    "--nu", 0.01, "--out-csv", tmp_path / "p.csv"]) == 1

    def test_numeric_error_exit_code(self, tmp_path):
        data = tmp_path / "d.tsv"
        run(["gen", "cbf", "--per-class", 1, "--seed", 1, "--out", data])
        assert run(["posterior", "--in", data, "--i", 0, "--j", 1,
                    "--nu", 1e5, "--out-csv", tmp_path / "p.csv"]) == 2


class TestSpectra:
    def test_two_column_csv(self, tmp_path):
        data = tmp_path / "d.tsv"
        run(["gen", "cbf", "--per-class", 1, "--out", data])
        out = tmp_path / "spec.csv"
        assert run(["spectra", "--in", data, "--row", 0, "--rate", 1.0,
                    "--out", out]) == 0
        rows = [r.split(",") for r in out.read_text().strip().splitlines()]
        assert len(rows) == 65
        assert all(len(r) == 2 for r in rows)
        float(rows[1][0]), float(rows[1][1])


class TestDenoise:
    def test_report_contents(self, tmp_path):
        report = tmp_path / "den.json"
        assert run(["denoise", "--instances", 3, "--seed", 4, "--nu", 1.0,
                    "--max-iter", 2, "--report", report]) == 0
        doc = json.loads(report.read_text())
        assert set(doc["gains_db"]) == {"teka", "euclidean", "dba"}


class TestErrorsAndUsage:
    def test_unknown_command(self):
        assert run(["frobnicate"]) == 1

    def test_unknown_flag(self):
        assert run(["gen", "cbf", "--per-class", 1, "--out", "x",
                    "--frobnicate"]) == 1

    def test_missing_input_file(self, tmp_path):
        assert run(["average", "--in", tmp_path / "nope.tsv",
                    "--method", "euclidean", "--out", tmp_path / "c.csv"]) == 1

    def test_version_exits_zero(self, capsys):
        assert run(["--version"]) == 0

    def test_console_script(self, tmp_path):
        out = tmp_path / "cbf.tsv"
        proc = subprocess.run(
            [sys.executable, "-m", "teka.cli", "gen", "cbf",
             "--per-class", "1", "--out", str(out)],
            capture_output=True,
        )
        assert proc.returncode == 0
        assert out.exists()


class TestRerun:
    def test_gen_rerun_bitwise(self, tmp_path):
        out = tmp_path / "cbf.tsv"
        run(["gen", "cbf", "--per-class", 3, "--seed", 9, "--out", out])
        first = out.read_bytes()
        manifest = tmp_path / "cbf.tsv.manifest.json"
        first_manifest = manifest.read_bytes()
        out.unlink()
        assert run(["rerun", manifest]) == 0
        assert out.read_bytes() == first
        assert manifest.read_bytes() == first_manifest

    def test_average_rerun_independent_of_jobs(self, tmp_path):
        data = tmp_path / "train.tsv"
        run(["gen", "cbf", "--per-class", 3, "--seed", 6, "--out", data])
        cent = tmp_path / "cent.csv"
        run(["average", "--in", data, "--label", 1, "--method", "teka",
             "--nu", 0.01, "--max-iter", 2, "--out", cent, "--jobs", 1])
        first = cent.read_bytes()
        assert run(["rerun", tmp_path / "cent.csv.manifest.json",
                    "--jobs", 4]) == 0
        assert cent.read_bytes() == first

    def test_rerun_missing_manifest(self, tmp_path):
        assert run(["rerun", tmp_path / "nope.json"]) == 1

    def test_rerun_rejects_unknown_command(self, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text(json.dumps({"command": "explode", "config": {}}))
        assert run(["rerun", bad]) == 1
