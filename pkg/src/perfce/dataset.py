"""KPI matrices with column metadata and labeled segments, plus CSV I/O.

File layout: ``trace.csv`` holds ``timestamp,<col1>,...`` rows at a uniform
sample period; ``trace.segments.json`` (sibling, same stem) holds the
baseline / chaos / anomaly segment labels. Columns whose name starts with
``chaos_`` are loaded with kind ``chaos-variable``, everything else ``kpi``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ParseError, SchemaError

KIND_KPI = "kpi"
KIND_CHAOS = "chaos-variable"

SEGMENT_BASELINE = "baseline"
SEGMENT_CHAOS = "chaos"
SEGMENT_ANOMALY = "anomaly"

CHAOS_NAME_PREFIX = "chaos_"


@dataclass(frozen=True)
class KpiMeta:
    """Column metadata: a monitored KPI or an injected chaos variable."""

    name: str
    unit: str = ""
    kind: str = KIND_KPI
    description: str | None = None

    def __post_init__(self):
        if self.kind not in (KIND_KPI, KIND_CHAOS):
            raise SchemaError(f"unknown column kind {self.kind!r}")


@dataclass(frozen=True)
class SegmentLabel:
    """Half-open row range [start, end) with its collection context."""

    kind: str
    start: int
    end: int
    variable: str | None = None
    level: int | None = None
    anomaly_kind: str | None = None

    def __post_init__(self):
        if self.kind not in (SEGMENT_BASELINE, SEGMENT_CHAOS, SEGMENT_ANOMALY):
            raise SchemaError(f"unknown segment kind {self.kind!r}")
        if not (0 <= self.start < self.end):
            raise SchemaError(f"segment range [{self.start}, {self.end}) is empty or negative")
        if self.kind == SEGMENT_CHAOS and (self.variable is None or self.level is None):
            raise SchemaError("chaos segment needs variable and level")
        if self.kind == SEGMENT_ANOMALY and self.anomaly_kind is None:
            raise SchemaError("anomaly segment needs anomaly_kind")

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "variable": self.variable,
            "level": self.level,
            "anomaly_kind": self.anomaly_kind,
            "start": self.start,
            "end": self.end,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "SegmentLabel":
        try:
            return cls(
                kind=d["kind"],
                start=int(d["start"]),
                end=int(d["end"]),
                variable=d.get("variable"),
                level=d.get("level"),
                anomaly_kind=d.get("anomaly_kind"),
            )
        except KeyError as exc:
            raise SchemaError(f"segment record missing field {exc}") from exc


class Dataset:
    """Immutable uniformly-sampled KPI matrix.

    ``values`` is row-major, one row per sample; timestamps are implicit
    (row index x ``sample_period_s``). Segments must not overlap and must
    lie inside the row range.
    """

    def __init__(self, columns, values, segments=(), sample_period_s: float = 1.0):
        self.columns: tuple[KpiMeta, ...] = tuple(
            c if isinstance(c, KpiMeta) else KpiMeta(name=c) for c in columns
        )
        values = np.asarray(values, dtype=float)
        if values.ndim != 2:
            raise SchemaError("values must be a 2-D matrix")
        if values.shape[0] < 1:
            raise SchemaError("dataset needs at least one row")
        if values.shape[1] != len(self.columns):
            raise SchemaError(
                f"{values.shape[1]} value columns vs {len(self.columns)} declared"
            )
        if not np.all(np.isfinite(values)):
            raise SchemaError("dataset values must be finite")
        names = [c.name for c in self.columns]
        if len(set(names)) != len(names):
            raise SchemaError("duplicate column names")
        self.values = values.copy()
        self.values.flags.writeable = False
        self.segments: tuple[SegmentLabel, ...] = tuple(
            sorted(segments, key=lambda s: s.start)
        )
        self._check_segments()
        self.sample_period_s = float(sample_period_s)
        self._index = {name: i for i, name in enumerate(names)}

    def _check_segments(self):
        prev_end = 0
        for seg in self.segments:
            if seg.end > self.n_rows:
                raise SchemaError(f"segment end {seg.end} past row count {self.n_rows}")
            if seg.start < prev_end:
                raise SchemaError("segments overlap")
            prev_end = seg.end

    @property
    def n_rows(self) -> int:
        return self.values.shape[0]

    @property
    def column_names(self) -> tuple[str, ...]:
        return tuple(c.name for c in self.columns)

    def column_index(self, name: str) -> int:
        if name not in self._index:
            raise SchemaError(f"no column named {name!r}")
        return self._index[name]

    def column(self, name: str) -> np.ndarray:
        return self.values[:, self.column_index(name)]

    def meta(self, name: str) -> KpiMeta:
        return self.columns[self.column_index(name)]

    def baseline_mask(self) -> np.ndarray:
        """Boolean row mask of baseline segments.

        A dataset without any segment labels is treated as all-baseline
        (the case for synthetic DGP samples).
        """
        if not self.segments:
            return np.ones(self.n_rows, dtype=bool)
        mask = np.zeros(self.n_rows, dtype=bool)
        for seg in self.segments:
            if seg.kind == SEGMENT_BASELINE:
                mask[seg.start:seg.end] = True
        return mask

    def with_segments(self, segments) -> "Dataset":
        return Dataset(self.columns, self.values, segments, self.sample_period_s)


def save_dataset(dataset: Dataset, path) -> None:
    """Write the CSV and, when segments exist, the sidecar label file.

    Floats are written with ``repr`` so a reload is always bit-exact.
    """
    path = Path(path)
    with path.open("w", encoding="utf-8", newline="\n") as fh:
        fh.write("timestamp," + ",".join(dataset.column_names) + "\n")
        period = dataset.sample_period_s
        for i in range(dataset.n_rows):
            stamp = int(round(i * period))
            fh.write(str(stamp) + ","
                     + ",".join(repr(float(v)) for v in dataset.values[i]) + "\n")
    sidecar = _sidecar_path(path)
    if dataset.segments:
        payload = [seg.to_dict() for seg in dataset.segments]
        sidecar.write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")
    elif sidecar.exists():
        sidecar.unlink()


def load_dataset(path) -> Dataset:
    """Parse a trace CSV (+ optional segments sidecar) into a Dataset."""
    path = Path(path)
    lines = path.read_text(encoding="utf-8").splitlines()
    if not lines:
        raise SchemaError(f"{path}: empty file")
    header = lines[0].split(",")
    if header[0] != "timestamp":
        raise SchemaError(f"{path}: first header field must be 'timestamp'")
    names = header[1:]
    if not names:
        raise SchemaError(f"{path}: no data columns")
    if len(set(names)) != len(names):
        raise SchemaError(f"{path}: duplicate column names in header")

    rows = np.empty((len(lines) - 1, len(names)), dtype=float)
    for li, line in enumerate(lines[1:], start=2):
        fields = line.split(",")
        if len(fields) != len(names) + 1:
            raise ParseError(li, len(fields), f"expected {len(names) + 1} fields")
        try:
            int(fields[0])
        except ValueError:
            raise ParseError(li, 1, f"timestamp {fields[0]!r} is not an integer") from None
        for ci, field in enumerate(fields[1:], start=2):
            try:
                value = float(field)
            except ValueError:
                raise ParseError(li, ci, f"{field!r} is not a number") from None
            if not math.isfinite(value):
                raise ParseError(li, ci, f"{field!r} is not finite")
            rows[li - 2, ci - 2] = value

    columns = [
        KpiMeta(name=n, kind=KIND_CHAOS if n.startswith(CHAOS_NAME_PREFIX) else KIND_KPI)
        for n in names
    ]
    segments: list[SegmentLabel] = []
    sidecar = _sidecar_path(path)
    if sidecar.exists():
        try:
            payload = json.loads(sidecar.read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise SchemaError(f"{sidecar}: malformed JSON: {exc}") from exc
        segments = [SegmentLabel.from_dict(d) for d in payload]
    return Dataset(columns, rows, segments)


def _sidecar_path(path: Path) -> Path:
    return path.with_suffix(".segments.json")
