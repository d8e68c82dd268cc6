"""Documentation generation system for Design Explorer."""

import json
from dataclasses import fields
from pathlib import Path
from typing import Any

from ..config.manager import get_default_config
from ..config.schema import ExplorerConfig, RunConfigFile, StoppingRule
from ..experiments import EXPERIMENTS

_DESCRIPTIONS = {
    "epsilon": "Radius of the hyperball drawn around each peripheral point. Must be > 0.",
    "batch_size": "Peripheral points selected per iteration, at most one new sample each.",
    "warmup_size": "Uniform random points drawn before the first iteration.",
    "num_trees": "Trees in the forest.",
    "max_iterations": "Iterations after the warm-up.",
    "bounds": "Domain box `{min, max, clip_mode}`; `clip` clamps candidates, `reject` redraws them.",
    "collision_tolerance": "Minimum L2 distance between two samples; 0 disables the check.",
    "seed": "64-bit unsigned seed; equal seeds give byte-identical sample logs.",
    "update_mode": "`streaming` inserts new points into every tree, `retrain` rebuilds the forest.",
    "subsample_size": "Points per tree; `null` gives every tree the whole dataset.",
    "warmup_box": "Box for the warm-up draw; `null` uses the domain box.",
    "max_retries": "Redraws per candidate before the peripheral point is skipped.",
    "stop": "Optional budgets `max_points` and `max_seconds`.",
    "output_dir": "Directory for samples, iteration records and the summary.",
    "output_format": "`jsonl` or `csv` sample log.",
    "emit_per_iteration": "Stream iteration records to disk as each iteration completes.",
}


def _field_rows(cls: type, defaults: dict[str, Any], prefix: str = "") -> list[str]:
    rows = []
    for f in fields(cls):
        if f.name == "explorer":
            continue
        key = f"{prefix}{f.name}"
        default = defaults.get(f.name)
        rows.append(
            f"| `{key}` | `{json.dumps(default)}` | {_DESCRIPTIONS.get(f.name, '')} |"
        )
    return rows


def generate_config_docs(output: Path) -> Path:
    """Render the configuration reference page."""
    defaults = get_default_config()
    lines = [
        "# Configuration reference",
        "",
        "Run configurations are flat JSON objects. Keys left out take the packaged",
        "defaults below; unknown keys are rejected with exit code 2.",
        "",
        "| Key | Default | Description |",
        "|-----|---------|-------------|",
        *_field_rows(ExplorerConfig, defaults),
        *_field_rows(RunConfigFile, defaults),
        "",
        "## Stopping rule",
        "",
        "| Key | Default | Description |",
        "|-----|---------|-------------|",
    ]
    stop_defaults = defaults.get("stop", {})
    for f in fields(StoppingRule):
        lines.append(f"| `stop.{f.name}` | `{json.dumps(stop_defaults.get(f.name))}` | |")
    lines += [
        "",
        "## Overrides",
        "",
        "Any key can be overridden on the command line with `--set KEY=VALUE`. Dotted",
        "keys reach nested values and values are parsed as JSON:",
        "",
        "```bash",
        "design-explorer run config/minimal-2d.json --set epsilon=0.2 --set bounds.clip_mode=reject",
        "```",
        "",
        "## Environment",
        "",
        "| Variable | Effect |",
        "|----------|--------|",
        "| `DESIGN_EXPLORER_OUTPUT_DIR` | Default `output_dir` when neither the file nor an override sets it |",
        "| `DESIGN_EXPLORER_LOG_LEVEL` | Level of library log events (default `WARNING`) |",
        "",
        "## Packaged defaults",
        "",
        "```json",
        json.dumps(defaults, indent=2),
        "```",
        "",
        "## Experiment presets",
        "",
        *[f"- `{name}`: {runner.__doc__.strip()}" for name, runner in EXPERIMENTS.items()],
        "",
    ]
    output.parent.mkdir(parents=True, exist_ok=True)
    output.write_text("\n".join(lines), encoding="utf-8")
    return output


def generate_documentation(docs_dir: str | Path = "docs") -> list[Path]:
    """Generate all generated documentation pages."""
    docs_dir = Path(docs_dir)
    return [generate_config_docs(docs_dir / "guide" / "configuration.md")]
