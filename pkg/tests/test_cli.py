from __future__ import annotations

import pytest
from click.testing import CliRunner

from themfit.cli import main

from conftest import CASSETTES_DIR, FIXTURE_DATA, REPO_DATA


@pytest.fixture
def runner() -> CliRunner:
    return CliRunner()


def invoke(runner: CliRunner, *args: str):
    result = runner.invoke(main, list(args), catch_exceptions=False)
    assert result.exit_code == 0, result.output
    return result


class TestValidateData:
    def test_reports_counts_and_transforms(self, runner):
        result = invoke(runner, "validate-data", "--dataset", str(REPO_DATA / "mcrae.tsv"))
        assert "loaded: 1444 items" in result.output
        assert "dedupe: removed 8 rows" in result.output
        assert "items after preprocessing: 1436" in result.output

    def test_rejects_bad_file(self, runner, tmp_path):
        bad = tmp_path / "bad.tsv"
        bad.write_text("dataset\tpredicate\targument\trole\trating\nd\teat\tx\tAgent\t7\n")
        result = runner.invoke(main, ["validate-data", "--dataset", str(bad)])
        assert result.exit_code != 0


class TestRunCommand:
    def test_mock_run_writes_reports_and_figures(self, runner, tmp_path):
        result = invoke(
            runner,
            "run",
            "--experiment",
            "1.1",
            "--dataset",
            str(FIXTURE_DATA / "demo10.tsv"),
            "--mode",
            "mock",
            "--out",
            str(tmp_path),
            "--run-id",
            "demo",
        )
        assert "1.000000" in result.output
        run_dir = tmp_path / "demo"
        for name in ("report.tsv", "report.txt", "scatter.png", "manifest.json"):
            assert (run_dir / name).exists(), name

    def test_resume_requires_run_id(self, runner, tmp_path):
        result = runner.invoke(main, ["run", "--resume", "--out", str(tmp_path)])
        assert result.exit_code != 0


class TestReplayDeterminism:
    def _replay(self, runner, out_dir, run_id):
        return invoke(
            runner,
            "run",
            "--experiment",
            "1.1",
            "--dataset",
            str(FIXTURE_DATA / "demo10.tsv"),
            "--mode",
            "replay",
            "--cassette-dir",
            str(CASSETTES_DIR / "demo10"),
            "--out",
            str(out_dir),
            "--run-id",
            run_id,
        )

    def test_committed_cassette_replays_byte_identically(self, runner, tmp_path):
        self._replay(runner, tmp_path / "a", "r")
        self._replay(runner, tmp_path / "b", "r")
        first = (tmp_path / "a" / "r" / "report.tsv").read_bytes()
        second = (tmp_path / "b" / "r" / "report.tsv").read_bytes()
        assert first == second
        assert b"1.000000" in first

    def test_report_command_regenerates_identical_tsv(self, runner, tmp_path):
        self._replay(runner, tmp_path, "r")
        original = (tmp_path / "r" / "report.tsv").read_bytes()
        invoke(runner, "report", "--out", str(tmp_path), "--run-id", "r")
        assert (tmp_path / "r" / "report.tsv").read_bytes() == original


class TestGridCommand:
    def test_two_by_one_grid(self, runner, tmp_path):
        result = invoke(
            runner,
            "grid",
            "--experiment",
            "1.1",
            "--experiment",
            "1.2",
            "--dataset",
            str(FIXTURE_DATA / "accept5.tsv"),
            "--mode",
            "mock",
            "--out",
            str(tmp_path),
        )
        assert (tmp_path / "grid_rho.tsv").exists()
        assert (tmp_path / "grid_long.tsv").exists()
        assert (tmp_path / "grid_heatmap.png").exists()
        matrix = (tmp_path / "grid_rho.tsv").read_text()
        assert matrix.splitlines()[0] == "experiment\taccept5"
        assert "1.000000" in matrix


class TestSweepCommand:
    def test_three_by_three_table(self, runner, tmp_path):
        result = invoke(
            runner,
            "sweep",
            "--experiment",
            "1.1",
            "--dataset",
            str(FIXTURE_DATA / "accept5.tsv"),
            "--mode",
            "mock",
            "--out",
            str(tmp_path),
            "--sample-size",
            "5",
        )
        table = (tmp_path / "sweep.tsv").read_text().splitlines()
        assert table[0] == "temperature\t0.5\t0.7\t0.95"
        assert len(table) == 4
        assert (tmp_path / "sweep_heatmap.png").exists()


class TestAnalyzeCommand:
    def test_analyze_after_run(self, runner, tmp_path):
        invoke(
            runner,
            "run",
            "--experiment",
            "1.1",
            "--dataset",
            str(FIXTURE_DATA / "accept5.tsv"),
            "--mode",
            "mock",
            "--out",
            str(tmp_path),
            "--run-id",
            "r",
        )
        result = invoke(
            runner, "analyze", "--out", str(tmp_path), "--run-id", "r", "--threshold", "0.25"
        )
        assert "good:bad = 5:0" in result.output
        run_dir = tmp_path / "r"
        for name in ("judgments.tsv", "judgments.jsonl", "judgments_hist.png"):
            assert (run_dir / name).exists(), name

    def test_unknown_run_id_fails(self, runner, tmp_path):
        result = runner.invoke(main, ["analyze", "--out", str(tmp_path), "--run-id", "nope"])
        assert result.exit_code != 0


class TestResumeCli:
    def test_resume_finished_run_reports_same_rho(self, runner, tmp_path):
        for _ in range(2):
            args = [
                "run",
                "--experiment",
                "1.1",
                "--dataset",
                str(FIXTURE_DATA / "demo10.tsv"),
                "--mode",
                "replay",
                "--cassette-dir",
                str(CASSETTES_DIR / "demo10"),
                "--out",
                str(tmp_path),
                "--run-id",
                "r",
            ]
            if _ == 1:
                args = [
                    "run",
                    "--resume",
                    "--run-id",
                    "r",
                    "--out",
                    str(tmp_path),
                    "--mode",
                    "replay",
                    "--cassette-dir",
                    str(CASSETTES_DIR / "demo10"),
                ]
            result = invoke(runner, *args)
            assert "1.000000" in result.output
