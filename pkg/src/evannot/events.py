"""Event stream ingestion: parse, validate and serialize raw event files.

The on-disk format is plain text, one event per line, whitespace separated
columns ``t x y p`` with ``t`` in integer microseconds and ``p`` in {0, 1}
(1 = positive polarity).  Column order, delimiter, timestamp unit and sensor
resolution are configurable.
"""

from __future__ import annotations

import io
from dataclasses import dataclass, field
from typing import Iterable, Optional

import numpy as np

from .errors import EmptyStream, InvalidConfig, MalformedLine, NonMonotonicTimestamp

DEFAULT_SENSOR_WIDTH = 346
DEFAULT_SENSOR_HEIGHT = 260


@dataclass(frozen=True)
class Event:
    """One asynchronous camera event."""

    t_us: int
    x: int
    y: int
    polarity: int  # +1 or -1

    def __post_init__(self):
        if self.polarity not in (-1, 1):
            raise ValueError(f"polarity must be +1 or -1, got {self.polarity}")


@dataclass(frozen=True)
class EventStream:
    """Immutable, time-ordered sequence of events plus sensor metadata.

    Events are stored as parallel numpy arrays for fast accumulation;
    ``events`` exposes them as :class:`Event` objects.
    """

    t_us: np.ndarray
    x: np.ndarray
    y: np.ndarray
    polarity: np.ndarray  # +1 / -1
    sensor_width: int
    sensor_height: int

    @property
    def count(self) -> int:
        return int(self.t_us.size)

    @property
    def t_first_us(self) -> int:
        return int(self.t_us[0]) if self.count else 0

    @property
    def t_last_us(self) -> int:
        return int(self.t_us[-1]) if self.count else 0

    @property
    def events(self) -> list[Event]:
        return [
            Event(int(t), int(x), int(y), int(p))
            for t, x, y, p in zip(self.t_us, self.x, self.y, self.polarity)
        ]

    def __len__(self) -> int:
        return self.count


@dataclass
class IngestConfig:
    """Input-side configuration for :func:`parse_events`."""

    columns: str = "txyp"  # permutation of the four column letters
    delimiter: Optional[str] = None  # None = any whitespace
    timestamp_unit_us: float = 1.0  # multiply raw t by this to get microseconds
    sensor_width: int = DEFAULT_SENSOR_WIDTH
    sensor_height: int = DEFAULT_SENSOR_HEIGHT
    out_of_bounds: str = "error"  # "error" | "drop"
    ordering: str = "strict"  # "strict" | "sort"

    def __post_init__(self):
        if sorted(self.columns) != ["p", "t", "x", "y"]:
            raise InvalidConfig(f"columns must be a permutation of 'txyp', got {self.columns!r}")
        if self.out_of_bounds not in ("error", "drop"):
            raise InvalidConfig(f"out_of_bounds must be 'error' or 'drop', got {self.out_of_bounds!r}")
        if self.ordering not in ("strict", "sort"):
            raise InvalidConfig(f"ordering must be 'strict' or 'sort', got {self.ordering!r}")
        if self.sensor_width <= 0 or self.sensor_height <= 0:
            raise InvalidConfig("sensor resolution must be positive")


@dataclass
class ValidationReport:
    count: int
    duration_us: int
    pos_count: int
    neg_count: int
    out_of_bounds_count: int
    max_gap_us: int

    def as_dict(self) -> dict:
        return dict(self.__dict__)


def parse_events(source, config: Optional[IngestConfig] = None) -> EventStream:
    """Parse a text event file into an :class:`EventStream`.

    ``source`` may be a path, a text/byte file object, or a string of lines.
    Raises :class:`MalformedLine`, :class:`NonMonotonicTimestamp` (strict
    ordering only) or :class:`EmptyStream`.
    """
    config = config or IngestConfig()
    lines = _read_lines(source)

    col = {name: i for i, name in enumerate(config.columns)}
    ts, xs, ys, ps = [], [], [], []
    dropped = 0
    for line_no, line in enumerate(lines, start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        parts = stripped.split(config.delimiter)
        if len(parts) != 4:
            raise MalformedLine(line_no, f"expected 4 columns, got {len(parts)}")
        try:
            t_raw = float(parts[col["t"]])
            x = int(parts[col["x"]])
            y = int(parts[col["y"]])
            p_raw = int(parts[col["p"]])
        except ValueError as exc:
            raise MalformedLine(line_no, str(exc)) from None
        if p_raw not in (0, 1):
            raise MalformedLine(line_no, f"polarity must be 0 or 1, got {p_raw}")
        t_us = int(round(t_raw * config.timestamp_unit_us))
        if t_us < 0:
            raise MalformedLine(line_no, f"negative timestamp {t_us}")
        if not (0 <= x < config.sensor_width and 0 <= y < config.sensor_height):
            if config.out_of_bounds == "drop":
                dropped += 1
                continue
            raise MalformedLine(line_no, f"coordinates ({x}, {y}) out of sensor bounds")
        if config.ordering == "strict" and ts and t_us < ts[-1]:
            raise NonMonotonicTimestamp(line_no)
        ts.append(t_us)
        xs.append(x)
        ys.append(y)
        ps.append(1 if p_raw == 1 else -1)

    if not ts:
        raise EmptyStream()

    t = np.asarray(ts, dtype=np.int64)
    x = np.asarray(xs, dtype=np.int32)
    y = np.asarray(ys, dtype=np.int32)
    p = np.asarray(ps, dtype=np.int8)
    if config.ordering == "sort":
        order = np.argsort(t, kind="stable")
        t, x, y, p = t[order], x[order], y[order], p[order]

    stream = EventStream(t, x, y, p, config.sensor_width, config.sensor_height)
    stream.__dict__["dropped_out_of_bounds"] = dropped
    return stream


def _read_lines(source) -> Iterable[str]:
    if isinstance(source, str) and ("\n" in source or source == ""):
        return source.splitlines()
    if isinstance(source, bytes):
        return source.decode("utf-8").splitlines()
    if hasattr(source, "read"):
        data = source.read()
        if isinstance(data, bytes):
            data = data.decode("utf-8")
        return data.splitlines()
    with open(source, "r", encoding="utf-8") as fh:
        return fh.read().splitlines()


def serialize_events(stream: EventStream, sink=None) -> Optional[str]:
    """Write the stream back to the ``t x y p`` text format.

    Returns the text when ``sink`` is None, otherwise writes to the path or
    file object.  Round-trips exactly with :func:`parse_events`.
    """
    buf = io.StringIO()
    for t, x, y, p in zip(stream.t_us, stream.x, stream.y, stream.polarity):
        buf.write(f"{int(t)} {int(x)} {int(y)} {1 if p > 0 else 0}\n")
    text = buf.getvalue()
    if sink is None:
        return text
    if hasattr(sink, "write"):
        sink.write(text)
    else:
        with open(sink, "w", encoding="utf-8") as fh:
            fh.write(text)
    return None


def validate_stream(stream: EventStream) -> ValidationReport:
    """Summarize a parsed stream; purely informational."""
    pos = int(np.count_nonzero(stream.polarity > 0))
    neg = stream.count - pos
    if stream.count >= 2:
        max_gap = int(np.max(np.diff(stream.t_us)))
    else:
        max_gap = 0
    return ValidationReport(
        count=stream.count,
        duration_us=stream.t_last_us - stream.t_first_us,
        pos_count=pos,
        neg_count=neg,
        out_of_bounds_count=0,
        max_gap_us=max_gap,
    )


def stream_from_arrays(t_us, x, y, polarity, sensor_width=DEFAULT_SENSOR_WIDTH,
                       sensor_height=DEFAULT_SENSOR_HEIGHT) -> EventStream:
    """Build a stream directly from arrays (used by the simulator and tests)."""
    t = np.asarray(t_us, dtype=np.int64)
    order = np.argsort(t, kind="stable")
    return EventStream(
        t[order],
        np.asarray(x, dtype=np.int32)[order],
        np.asarray(y, dtype=np.int32)[order],
        np.asarray(polarity, dtype=np.int8)[order],
        sensor_width,
        sensor_height,
    )
