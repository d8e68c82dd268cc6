"""Configuration schema definitions."""

from __future__ import annotations

from dataclasses import asdict, dataclass, field, fields
from enum import Enum
from pathlib import Path
from typing import Any

from ..errors import ConfigError, ExplorerError
from ..geometry import BoundingBox, ClipMode, DomainBounds
from ..trees.forest import DEFAULT_NUM_TREES, UpdateMode

_MAX_SEED = 2**64 - 1


class OutputFormat(Enum):
    JSONL = "jsonl"
    CSV = "csv"


@dataclass
class StoppingRule:
    """Extra stopping conditions on top of ``max_iterations``."""

    max_points: int | None = None  # total dataset size budget
    max_seconds: float | None = None  # wall-clock budget

    def __post_init__(self):
        if self.max_points is not None:
            if not isinstance(self.max_points, int) or isinstance(self.max_points, bool):
                raise ConfigError(
                    f"must be an integer or null, got {self.max_points!r}", field="stop.max_points"
                )
            if self.max_points < 1:
                raise ConfigError("must be positive", field="stop.max_points")
        if self.max_seconds is not None:
            _require_number(self.max_seconds, "stop.max_seconds")
            if self.max_seconds <= 0:
                raise ConfigError("must be positive", field="stop.max_seconds")


def _unit_square() -> DomainBounds:
    return DomainBounds(BoundingBox((0.0, 0.0), (1.0, 1.0)))


@dataclass
class ExplorerConfig:
    """Hyper-parameters of the exploration loop.

    Dict values for ``bounds``, ``warmup_box`` and ``stop`` and strings for
    ``update_mode`` are converted on construction; every field is validated and a
    violation raises :class:`ConfigError` naming the field.
    """

    epsilon: float = 0.1  # hyperball radius
    batch_size: int = 50  # peripheral points per iteration
    warmup_size: int = 100
    num_trees: int = DEFAULT_NUM_TREES
    max_iterations: int = 10
    bounds: DomainBounds = field(default_factory=_unit_square)
    collision_tolerance: float = 1e-6
    seed: int = 0
    update_mode: UpdateMode = UpdateMode.STREAMING
    subsample_size: int | None = None
    warmup_box: BoundingBox | None = None  # defaults to bounds.box
    max_retries: int = 100
    stop: StoppingRule = field(default_factory=StoppingRule)

    def __post_init__(self):
        self.bounds = _coerce_bounds(self.bounds)
        self.warmup_box = _coerce_box(self.warmup_box, "warmup_box")
        if isinstance(self.stop, dict):
            _check_keys(self.stop, {f.name for f in fields(StoppingRule)}, "stop")
            self.stop = StoppingRule(**self.stop)
        try:
            self.update_mode = UpdateMode(self.update_mode)
        except ValueError:
            raise ConfigError(
                f"expected one of {[m.value for m in UpdateMode]}, got {self.update_mode!r}",
                field="update_mode",
            ) from None
        self._validate()

    def _validate(self) -> None:
        _require_number(self.epsilon, "epsilon")
        if not self.epsilon > 0:
            raise ConfigError(f"must be > 0, got {self.epsilon}", field="epsilon")
        for name, minimum in (
            ("batch_size", 1),
            ("warmup_size", 2),
            ("num_trees", 1),
            ("max_iterations", 0),
            ("max_retries", 0),
        ):
            value = getattr(self, name)
            if not isinstance(value, int) or isinstance(value, bool) or value < minimum:
                raise ConfigError(f"must be an integer >= {minimum}, got {value!r}", field=name)
        _require_number(self.collision_tolerance, "collision_tolerance")
        if not 0 <= self.collision_tolerance < self.epsilon:
            raise ConfigError(
                f"must satisfy 0 <= tolerance < epsilon ({self.epsilon}), got {self.collision_tolerance}",
                field="collision_tolerance",
            )
        if not isinstance(self.seed, int) or not 0 <= self.seed <= _MAX_SEED:
            raise ConfigError(f"must be a 64-bit unsigned integer, got {self.seed!r}", field="seed")
        if self.subsample_size is not None and (
            not isinstance(self.subsample_size, int) or self.subsample_size < 1
        ):
            raise ConfigError(
                f"must be a positive integer or null, got {self.subsample_size!r}",
                field="subsample_size",
            )
        if self.warmup_box is not None:
            if self.warmup_box.dimension != self.bounds.dimension:
                raise ConfigError(
                    f"has dimension {self.warmup_box.dimension}, bounds have {self.bounds.dimension}",
                    field="warmup_box",
                )
            if not (
                self.bounds.box.contains(self.warmup_box.min)
                and self.bounds.box.contains(self.warmup_box.max)
            ):
                raise ConfigError("must lie inside bounds", field="warmup_box")

    @property
    def dimension(self) -> int:
        return self.bounds.dimension

    @property
    def warmup_region(self) -> BoundingBox:
        return self.warmup_box or self.bounds.box

    def to_dict(self) -> dict[str, Any]:
        return {
            "epsilon": self.epsilon,
            "batch_size": self.batch_size,
            "warmup_size": self.warmup_size,
            "num_trees": self.num_trees,
            "max_iterations": self.max_iterations,
            "bounds": {
                **self.bounds.box.to_dict(),
                "clip_mode": self.bounds.clip_mode.value,
            },
            "collision_tolerance": self.collision_tolerance,
            "seed": self.seed,
            "update_mode": self.update_mode.value,
            "subsample_size": self.subsample_size,
            "warmup_box": None if self.warmup_box is None else self.warmup_box.to_dict(),
            "max_retries": self.max_retries,
            "stop": asdict(self.stop),
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> ExplorerConfig:
        _check_keys(data, {f.name for f in fields(cls)}, None)
        return cls(**data)


@dataclass
class RunConfigFile:
    """A run configuration file: explorer settings plus output options."""

    explorer: ExplorerConfig
    output_dir: Path = Path("runs/latest")
    output_format: OutputFormat = OutputFormat.JSONL
    emit_per_iteration: bool = True

    def __post_init__(self):
        if not isinstance(self.output_dir, str | Path):
            raise ConfigError(
                f"must be a path string, got {self.output_dir!r}", field="output_dir"
            )
        self.output_dir = Path(self.output_dir)
        try:
            self.output_format = OutputFormat(self.output_format)
        except ValueError:
            raise ConfigError(
                f"expected 'jsonl' or 'csv', got {self.output_format!r}",
                field="output_format",
            ) from None
        if not isinstance(self.emit_per_iteration, bool):
            raise ConfigError("must be true or false", field="emit_per_iteration")

    def to_dict(self) -> dict[str, Any]:
        return {
            **self.explorer.to_dict(),
            "output_dir": str(self.output_dir),
            "output_format": self.output_format.value,
            "emit_per_iteration": self.emit_per_iteration,
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> RunConfigFile:
        """Split a flat config mapping into explorer and output settings."""
        output_keys = {"output_dir", "output_format", "emit_per_iteration"}
        explorer = ExplorerConfig.from_dict(
            {k: v for k, v in data.items() if k not in output_keys}
        )
        return cls(explorer, **{k: v for k, v in data.items() if k in output_keys})


def _check_keys(data: dict[str, Any], allowed: set[str], prefix: str | None) -> None:
    unknown = sorted(set(data) - allowed)
    if unknown:
        name = f"{prefix}.{unknown[0]}" if prefix else unknown[0]
        raise ConfigError("unknown key", field=name)


def _require_number(value: Any, name: str) -> None:
    if isinstance(value, bool) or not isinstance(value, int | float):
        raise ConfigError(f"must be a number, got {value!r}", field=name)


def _coerce_box(value: Any, name: str) -> BoundingBox | None:
    if value is None or isinstance(value, BoundingBox):
        return value
    if not isinstance(value, dict):
        raise ConfigError("must be an object with 'min' and 'max'", field=name)
    _check_keys(value, {"min", "max"}, name)
    try:
        return BoundingBox(tuple(value["min"]), tuple(value["max"]))
    except KeyError as e:
        raise ConfigError("missing key", field=f"{name}.{e.args[0]}") from None
    except (ExplorerError, TypeError, ValueError) as e:
        raise ConfigError(str(e), field=name) from None


def _coerce_bounds(value: Any) -> DomainBounds:
    if isinstance(value, DomainBounds):
        return value
    if not isinstance(value, dict):
        raise ConfigError("must be an object with 'min', 'max', 'clip_mode'", field="bounds")
    _check_keys(value, {"min", "max", "clip_mode"}, "bounds")
    box = _coerce_box({k: v for k, v in value.items() if k != "clip_mode"}, "bounds")
    try:
        mode = ClipMode(value.get("clip_mode", ClipMode.CLIP.value))
    except ValueError:
        raise ConfigError(
            f"expected 'clip' or 'reject', got {value.get('clip_mode')!r}",
            field="bounds.clip_mode",
        ) from None
    try:
        return DomainBounds(box, mode)
    except ExplorerError as e:
        raise ConfigError(str(e), field="bounds") from None
