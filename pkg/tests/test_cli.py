import json

import pandas as pd
import pytest

from design_explorer.cli import EXIT_OK, EXIT_USAGE, build_parser, main
from design_explorer.metrics import build_report
from design_explorer.storage import read_samples

MINIMAL = {
    "epsilon": 0.1,
    "batch_size": 10,
    "warmup_size": 25,
    "num_trees": 6,
    "max_iterations": 3,
    "seed": 1,
}


@pytest.fixture
def minimal_config(write_config):
    return write_config(MINIMAL)


def run_cli(*argv: str) -> int:
    return main([str(a) for a in argv])


class TestRun:
    def test_outputs(self, minimal_config, tmp_path):
        out = tmp_path / "out"
        assert run_cli("run", minimal_config, "--output-dir", out) == EXIT_OK
        records = (out / "iterations.jsonl").read_text().splitlines()
        assert [json.loads(r)["iteration"] for r in records] == [1, 2, 3]
        rows = read_samples(out / "samples.jsonl")
        assert sum(r.iteration == 0 for r in rows) == 25
        summary = json.loads((out / "summary.json").read_text())
        assert summary["final_n"] == len(rows)
        assert summary["iterations"] == 3
        assert summary["final_n"] == 25 + summary["admitted"]
        assert summary["min_pairwise_distance"] >= 1e-6

    def test_byte_identical_samples(self, minimal_config, tmp_path):
        for name in ("a", "b"):
            assert run_cli("run", minimal_config, "--seed", 4, "--output-dir", tmp_path / name) == 0
        assert (tmp_path / "a" / "samples.jsonl").read_bytes() == (
            tmp_path / "b" / "samples.jsonl"
        ).read_bytes()

    def test_csv_and_jsonl_agree(self, minimal_config, tmp_path):
        run_cli("run", minimal_config, "--output-dir", tmp_path / "j")
        run_cli("run", minimal_config, "--output-dir", tmp_path / "c", "--format", "csv")
        assert read_samples(tmp_path / "j" / "samples.jsonl") == read_samples(
            tmp_path / "c" / "samples.csv"
        )

    def test_records_written_at_end(self, minimal_config, tmp_path):
        out = tmp_path / "out"
        code = run_cli("run", minimal_config, "--output-dir", out, "--set", "emit_per_iteration=false")
        assert code == EXIT_OK
        assert len((out / "iterations.jsonl").read_text().splitlines()) == 3

    def test_invalid_value_names_field(self, write_config, tmp_path, capsys):
        path = write_config({**MINIMAL, "epsilon": -1})
        assert run_cli("run", path, "--output-dir", tmp_path) == EXIT_USAGE
        assert "epsilon" in capsys.readouterr().err

    def test_invalid_override(self, minimal_config, tmp_path, capsys):
        code = run_cli("run", minimal_config, "--output-dir", tmp_path, "--set", "bounds.clip_mode=wrap")
        assert code == EXIT_USAGE
        assert "bounds.clip_mode" in capsys.readouterr().err

    def test_unknown_key(self, write_config, tmp_path, capsys):
        path = write_config({**MINIMAL, "trees": 5})
        assert run_cli("run", path, "--output-dir", tmp_path) == EXIT_USAGE
        assert "trees" in capsys.readouterr().err

    @pytest.mark.parametrize(
        ("extra", "field"),
        [
            ({"bounds": {"min": ["a", 0], "max": [1, 1]}}, "bounds"),
            ({"output_dir": 5}, "output_dir"),
            ({"stop": {"max_points": "x"}}, "stop.max_points"),
            ({"stop": {"max_seconds": "soon"}}, "stop.max_seconds"),
        ],
    )
    def test_wrong_type_is_usage_error(self, write_config, tmp_path, capsys, extra, field):
        path = write_config({**MINIMAL, **extra})
        assert run_cli("run", path) == EXIT_USAGE
        assert field in capsys.readouterr().err

    def test_broken_json(self, tmp_path, capsys):
        path = tmp_path / "broken.json"
        path.write_text('{"epsilon": 0.1,\n"seed": }', encoding="utf-8")
        assert run_cli("run", path) == EXIT_USAGE
        assert "line 2" in capsys.readouterr().err

    def test_runtime_failure(self, write_config, tmp_path):
        path = write_config(
            {**MINIMAL, "warmup_box": {"min": [0.5, 0.5], "max": [0.5, 0.5]}, "max_retries": 2}
        )
        assert run_cli("run", path, "--output-dir", tmp_path) == 1

    def test_output_dir_flag_beats_environment(self, minimal_config, tmp_path, monkeypatch):
        monkeypatch.setenv("DESIGN_EXPLORER_OUTPUT_DIR", str(tmp_path / "env"))
        run_cli("run", minimal_config)
        assert (tmp_path / "env" / "samples.jsonl").exists()
        run_cli("run", minimal_config, "--output-dir", tmp_path / "flag")
        assert (tmp_path / "flag" / "samples.jsonl").exists()


class TestUsage:
    def test_missing_subcommand(self):
        assert run_cli() == EXIT_USAGE

    def test_unknown_experiment(self, tmp_path):
        assert run_cli("experiment", "warp-drive", "--output-dir", tmp_path) == EXIT_USAGE

    def test_parser_lists_subcommands(self):
        help_text = build_parser().format_help()
        for name in ("run", "experiment", "report"):
            assert name in help_text


class TestExperiment:
    def test_long_run(self, tmp_path):
        code = run_cli(
            "experiment", "long-run", "--iterations", 3, "--batch", 10, "--output-dir", tmp_path
        )
        assert code == EXIT_OK
        assert len(pd.read_csv(tmp_path / "coverage.csv")) == 4
        assert json.loads((tmp_path / "metadata.json").read_text())["config"]["max_iterations"] == 3

    def test_epsilon_sweep_matches_report(self, tmp_path, capsys):
        code = run_cli("experiment", "epsilon-sweep", "--seeds", 2, "--output-dir", tmp_path)
        assert code == EXIT_OK
        files = sorted(tmp_path.glob("samples_eps*.jsonl"), key=lambda p: float(p.stem[11:]))
        assert len(files) == 5
        reported = [build_report(read_samples(f)).growth[1].separation for f in files]
        assert reported == sorted(reported)
        table = pd.read_csv(tmp_path / "sweep_summary.csv")
        assert table["mean_separation"].is_monotonic_increasing
        for f in files:
            assert run_cli("report", f, "--plot-csv", tmp_path / "plot.csv") == EXIT_OK


class TestReport:
    def test_round_trip(self, minimal_config, tmp_path, capsys):
        out = tmp_path / "out"
        run_cli("run", minimal_config, "--output-dir", out, "--format", "csv")
        capsys.readouterr()
        assert run_cli("report", out / "samples.csv", "--bounds", "0,0,1,1") == EXIT_OK
        text = capsys.readouterr().out
        assert "grid: 32^2" in text
        assert "coverage:" in text
        plot = pd.read_csv(out / "samples.plot.csv")
        assert list(plot.columns) == ["x", "y", "iteration"]

    def test_single_warmup_point(self, tmp_path, capsys):
        path = tmp_path / "one.jsonl"
        path.write_text(
            json.dumps(
                {"id": 0, "iteration": 0, "parent_id": -1, "coords": [0.2, 0.4], "score_at_selection": -1}
            )
            + "\n",
            encoding="utf-8",
        )
        assert run_cli("report", path) == EXIT_OK
        text = capsys.readouterr().out
        assert "occupied_cells: 1" in text
        assert "min_nn_distance: n/a" in text

    def test_identical_files_identical_reports(self, minimal_config, tmp_path, capsys):
        run_cli("run", minimal_config, "--output-dir", tmp_path / "a")
        copy = tmp_path / "copy.jsonl"
        copy.write_bytes((tmp_path / "a" / "samples.jsonl").read_bytes())
        capsys.readouterr()
        run_cli("report", tmp_path / "a" / "samples.jsonl")
        first = capsys.readouterr().out
        run_cli("report", copy)
        assert capsys.readouterr().out == first

    def test_malformed(self, tmp_path):
        path = tmp_path / "bad.jsonl"
        path.write_text("{oops\n", encoding="utf-8")
        assert run_cli("report", path) == EXIT_USAGE
        assert run_cli("report", tmp_path / "missing.csv") == EXIT_USAGE

    def test_bad_bounds(self, minimal_config, tmp_path):
        run_cli("run", minimal_config, "--output-dir", tmp_path)
        assert run_cli("report", tmp_path / "samples.jsonl", "--bounds", "0,1") == EXIT_USAGE
