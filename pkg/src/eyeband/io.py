"""Recording/event CSV parsing and atomic file output."""

from __future__ import annotations

import csv
import hashlib
import io
import json
import math
import os
import tempfile

import numpy as np

from .errors import EmptyFile, InputError, MalformedHeader, OffsetBeforeOnset
from .signal import EventLabel, SaccadeEvent, validate_series

RECORDING_COLUMNS = ("t_ms", "x_deg", "y_deg")
EVENT_COLUMNS = ("onset_ms", "offset_ms", "label")
_MISSING = {"", "nan", "NaN", "NAN"}


class UnsortedEvents(InputError):
    pass


def _reader(path):
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    rows = [r for r in rows if any(c.strip() for c in r)]
    if not rows:
        raise EmptyFile(f"{path} is empty")
    header = [h.strip() for h in rows[0]]
    return header, rows[1:]


def _columns(header, required, path):
    missing = [c for c in required if c not in header]
    if missing:
        raise MalformedHeader(f"{path}: header {header} lacks {missing}")
    return [header.index(c) for c in required]


def _cell(row, i):
    return row[i].strip() if i < len(row) else ""


def parse_recording(path, expected_rate_hz, channel="x", tolerance=0.01):
    """Read one channel of a ``t_ms,x_deg,y_deg`` file as a TimeSeries.

    Empty cells and ``NaN`` become masked samples.
    """
    if channel not in ("x", "y"):
        raise InputError(f"channel must be 'x' or 'y', got {channel!r}")
    header, rows = _reader(path)
    it, ix, iy = _columns(header, RECORDING_COLUMNS, path)
    if not rows:
        raise EmptyFile(f"{path} has a header but no samples")
    col = ix if channel == "x" else iy
    pairs = []
    for lineno, row in enumerate(rows, start=2):
        try:
            t = float(_cell(row, it))
            raw = _cell(row, col)
            v = None if raw in _MISSING else float(raw)
        except ValueError as exc:
            raise InputError(f"{path}:{lineno}: {exc}") from None
        pairs.append((t, v))
    return validate_series(pairs, expected_rate_hz, tolerance)


def ms_to_onset_index(t_ms, rate_hz, start_ms=0.0):
    return math.floor((t_ms - start_ms) * rate_hz / 1000.0 + 1e-9)


def ms_to_offset_index(t_ms, rate_hz, start_ms=0.0):
    return math.ceil((t_ms - start_ms) * rate_hz / 1000.0 - 1e-9)


def parse_events(path, rate_hz, start_ms=0.0):
    """Events as sample indices; onsets round down and offsets round up."""
    header, rows = _reader(path)
    io_, ioff, ilab = _columns(header, EVENT_COLUMNS, path)
    events, last_onset = [], -math.inf
    for lineno, row in enumerate(rows, start=2):
        try:
            on = float(_cell(row, io_))
            off = float(_cell(row, ioff))
            label = EventLabel(_cell(row, ilab) or "saccade")
        except ValueError as exc:
            raise InputError(f"{path}:{lineno}: {exc}") from None
        if off < on:
            raise OffsetBeforeOnset(f"{path}:{lineno}: offset {off} ms before onset {on} ms")
        if on < last_onset:
            raise UnsortedEvents(f"{path}:{lineno}: onsets must be non-decreasing")
        last_onset = on
        events.append(SaccadeEvent(ms_to_onset_index(on, rate_hz, start_ms),
                                   ms_to_offset_index(off, rate_hz, start_ms), label))
    return events


def file_digest(path):
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


def atomic_write_text(path, text):
    """Write to a temp file in the target directory, then rename over ``path``."""
    path = os.fspath(path)
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(prefix=".tmp-", dir=directory)
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def csv_text(header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([_fmt(v) for v in r])
    return buf.getvalue()


def _fmt(v):
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return v


def write_recording(path, ts, y=None):
    """Write a TimeSeries as the x channel of a recording CSV."""
    ys = np.zeros(len(ts)) if y is None else np.asarray(y, dtype=np.float64)
    rows = (
        (float(t), "NaN" if not ok else float(x), float(yv))
        for t, x, ok, yv in zip(ts.times_ms, ts.samples, ts.valid_mask, ys)
    )
    atomic_write_text(path, csv_text(RECORDING_COLUMNS, rows))


def write_events(path, events, rate_hz, start_ms=0.0):
    step = 1000.0 / rate_hz
    rows = ((start_ms + e.onset_index * step, start_ms + e.offset_index * step, e.label.value)
            for e in events)
    atomic_write_text(path, csv_text(EVENT_COLUMNS, rows))


def json_text(obj):
    return json.dumps(obj, indent=2, sort_keys=True, allow_nan=False) + "\n"
