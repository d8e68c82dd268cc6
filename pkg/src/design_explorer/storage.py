"""Sample log and record storage.

Sample logs come in two interchangeable formats: JSONL (one object per line) and
CSV with a header row. Both are UTF-8 with LF line endings and parse back to the
same floats bit for bit.
"""

import json
from abc import ABC, abstractmethod
from collections.abc import Sequence
from pathlib import Path
from typing import Any

import pandas as pd

from .errors import MalformedInputError
from .explorer.dataset import SampleLogRow
from .explorer.records import IterationRecord, RecordSink

_BASE_COLUMNS = ["id", "iteration", "parent_id", "score_at_selection"]


class SampleLogBackend(ABC):
    """Abstract base class for sample log formats."""

    suffix: str

    @abstractmethod
    def write(self, rows: Sequence[SampleLogRow], path: Path) -> None:
        """Write rows to ``path``, replacing it."""
        pass

    @abstractmethod
    def read(self, path: Path) -> list[SampleLogRow]:
        """Read rows back from ``path``."""
        pass


class JsonlSampleLog(SampleLogBackend):
    """One JSON object per admitted point."""

    suffix = ".jsonl"

    def write(self, rows: Sequence[SampleLogRow], path: Path) -> None:
        with open(path, "w", encoding="utf-8", newline="\n") as f:
            for row in rows:
                f.write(json.dumps(_row_to_dict(row)) + "\n")

    def read(self, path: Path) -> list[SampleLogRow]:
        rows = []
        with open(path, encoding="utf-8") as f:
            for lineno, line in enumerate(f, start=1):
                if not line.strip():
                    continue
                try:
                    data = json.loads(line)
                    rows.append(
                        SampleLogRow(
                            id=int(data["id"]),
                            iteration=int(data["iteration"]),
                            parent_id=int(data["parent_id"]),
                            coords=tuple(float(c) for c in data["coords"]),
                            score_at_selection=float(data["score_at_selection"]),
                        )
                    )
                except (json.JSONDecodeError, KeyError, TypeError, ValueError) as e:
                    raise MalformedInputError(f"{path}:{lineno}: {e}") from None
        return rows


class CsvSampleLog(SampleLogBackend):
    """Header row plus one row per admitted point; coordinates in ``x0..x{m-1}``."""

    suffix = ".csv"

    def write(self, rows: Sequence[SampleLogRow], path: Path) -> None:
        dimension = len(rows[0].coords) if rows else 0
        frame = pd.DataFrame(
            [
                [r.id, r.iteration, r.parent_id, r.score_at_selection, *r.coords]
                for r in rows
            ],
            columns=_BASE_COLUMNS + [f"x{i}" for i in range(dimension)],
        )
        frame.to_csv(path, index=False, float_format="%.17g", lineterminator="\n")

    def read(self, path: Path) -> list[SampleLogRow]:
        try:
            frame = pd.read_csv(path, float_precision="round_trip")
        except (pd.errors.ParserError, pd.errors.EmptyDataError, UnicodeDecodeError) as e:
            raise MalformedInputError(f"{path}: {e}") from None
        missing = [c for c in _BASE_COLUMNS if c not in frame.columns]
        coord_columns = [c for c in frame.columns if c not in _BASE_COLUMNS]
        expected = [f"x{i}" for i in range(len(coord_columns))]
        if missing or coord_columns != expected or not coord_columns:
            raise MalformedInputError(
                f"{path}: expected columns {_BASE_COLUMNS} + x0..x(m-1), got {list(frame.columns)}"
            )
        if frame.isna().any().any():
            raise MalformedInputError(f"{path}: empty cells")
        try:
            return [
                SampleLogRow(
                    id=int(rec["id"]),
                    iteration=int(rec["iteration"]),
                    parent_id=int(rec["parent_id"]),
                    coords=tuple(float(rec[c]) for c in coord_columns),
                    score_at_selection=float(rec["score_at_selection"]),
                )
                for rec in frame.to_dict("records")
            ]
        except (TypeError, ValueError) as e:
            raise MalformedInputError(f"{path}: {e}") from None


SAMPLE_LOG_BACKENDS: dict[str, SampleLogBackend] = {
    "jsonl": JsonlSampleLog(),
    "csv": CsvSampleLog(),
}


def get_backend(fmt: str) -> SampleLogBackend:
    try:
        return SAMPLE_LOG_BACKENDS[fmt]
    except KeyError:
        raise ValueError(f"Unknown sample log format: {fmt!r}") from None


def write_samples(rows: Sequence[SampleLogRow], path: str | Path, fmt: str) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    get_backend(fmt).write(rows, path)
    return path


def read_samples(path: str | Path) -> list[SampleLogRow]:
    """Read a sample log, choosing the format from the file suffix.

    Raises
    ------
    MalformedInputError
        If the file is missing, has an unknown suffix or cannot be parsed.
    """
    path = Path(path)
    backend = next(
        (b for b in SAMPLE_LOG_BACKENDS.values() if b.suffix == path.suffix), None
    )
    if backend is None:
        raise MalformedInputError(f"{path}: unknown sample log suffix {path.suffix!r}")
    if not path.is_file():
        raise MalformedInputError(f"{path}: no such file")
    rows = backend.read(path)
    if not rows:
        raise MalformedInputError(f"{path}: no samples")
    dimension = len(rows[0].coords)
    if any(len(r.coords) != dimension for r in rows):
        raise MalformedInputError(f"{path}: rows of different dimensions")
    return rows


def write_json(path: str | Path, data: dict[str, Any]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        json.dump(data, f, indent=2, ensure_ascii=False)
        f.write("\n")
    return path


class JsonlRecordSink(RecordSink):
    """Append each iteration record to a JSONL file as it arrives."""

    def __init__(self, file_path: str | Path):
        self.file_path = Path(file_path)
        self.file_path.parent.mkdir(parents=True, exist_ok=True)
        self._file = open(self.file_path, "w", encoding="utf-8", newline="\n")

    def emit(self, record: IterationRecord) -> None:
        self._file.write(json.dumps(record.to_dict()) + "\n")
        self._file.flush()

    def close(self) -> None:
        if not self._file.closed:
            self._file.close()

    def __enter__(self) -> "JsonlRecordSink":
        return self

    def __exit__(self, *exc_info: object) -> None:
        self.close()


def _row_to_dict(row: SampleLogRow) -> dict[str, Any]:
    return {
        "id": row.id,
        "iteration": row.iteration,
        "parent_id": row.parent_id,
        "coords": list(row.coords),
        "score_at_selection": row.score_at_selection,
    }
