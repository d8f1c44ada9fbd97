"""CSV serialization for traces, records, and metrics.

Owns the on-disk schemas. Numbers render via repr so floats round-trip
exactly and identical runs produce byte-identical files; writes go through a
temp file and an atomic rename. `summarize_rows` recomputes a full metrics
summary from trace rows alone, independently of the in-memory record lists,
which is what the `metrics` subcommand and the consistency checks use.
"""

from __future__ import annotations

import csv
import io
import json
import os
import tempfile
from typing import Iterable, Optional

import numpy as np

from .errors import TraceError
from .world import (
    DreamFrameRow,
    InteractionRecord,
    Metrics,
    PerceptRow,
    TraceRow,
)

TRACE_HEADER = [
    "tick",
    "agent_id",
    "i",
    "j",
    "mode",
    "e_h",
    "e_c",
    "e_f",
    "e_k",
    "fatigue",
    "field_value",
    "event",
]

INTERACTIONS_HEADER = [
    "tick",
    "agent_a",
    "agent_b",
    "cell_i",
    "cell_j",
    "sent_by_a",
    "sent_by_b",
    "eval_by_a",
    "eval_by_b",
]

DREAMS_HEADER = [
    "agent_id",
    "tick",
    "frame_index",
    "percept_id",
    "content_category",
    "style_category",
    "origin_i",
    "origin_j",
    "pair_distance",
    "valence",
]

PERCEPTS_HEADER = [
    "agent_id",
    "id",
    "kind",
    "category",
    "i",
    "j",
    "tick",
    "features",
]

METRICS_HEADER = ["metric", "value"]


def _fmt(v: float) -> str:
    return repr(float(v))


def atomic_write_text(path: str, text: str) -> None:
    """Write text then rename into place so readers never see partial files."""
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=".part")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _csv_text(header: list[str], rows: Iterable[list]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow(row)
    return buf.getvalue()


def write_trace_csv(path: str, rows: Iterable[TraceRow]) -> None:
    atomic_write_text(
        path,
        _csv_text(
            TRACE_HEADER,
            (
                [
                    r.tick,
                    r.agent_id,
                    r.i,
                    r.j,
                    r.mode,
                    _fmt(r.e_h),
                    _fmt(r.e_c),
                    _fmt(r.e_f),
                    _fmt(r.e_k),
                    _fmt(r.fatigue),
                    _fmt(r.field_value),
                    ";".join(r.events),
                ]
                for r in rows
            ),
        ),
    )


def read_trace_csv(path: str) -> list[TraceRow]:
    """Parse and validate a trace file; rows must be ordered by (tick, agent)."""
    try:
        with open(path, "r", encoding="utf-8", newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader, None)
            if header != TRACE_HEADER:
                raise TraceError(f"unexpected trace header {header}")
            rows = []
            prev = None
            for lineno, rec in enumerate(reader, start=2):
                if len(rec) != len(TRACE_HEADER):
                    raise TraceError(f"line {lineno}: expected {len(TRACE_HEADER)} columns")
                try:
                    row = TraceRow(
                        tick=int(rec[0]),
                        agent_id=int(rec[1]),
                        i=int(rec[2]),
                        j=int(rec[3]),
                        mode=rec[4],
                        e_h=float(rec[5]),
                        e_c=float(rec[6]),
                        e_f=float(rec[7]),
                        e_k=float(rec[8]),
                        fatigue=float(rec[9]),
                        field_value=float(rec[10]),
                        events=tuple(t for t in rec[11].split(";") if t),
                    )
                except ValueError as exc:
                    raise TraceError(f"line {lineno}: {exc}") from None
                if row.mode not in ("awake", "asleep"):
                    raise TraceError(f"line {lineno}: unknown mode {row.mode!r}")
                key = (row.tick, row.agent_id)
                if prev is not None and key <= prev:
                    raise TraceError(f"line {lineno}: rows not ordered by (tick, agent_id)")
                prev = key
                rows.append(row)
            return rows
    except OSError as exc:
        raise TraceError(f"cannot read trace file {path}: {exc}") from None


def summarize_rows(rows: list[TraceRow]) -> Metrics:
    """Recompute the metrics summary from trace rows alone.

    Photos, dream frames, and interactions are counted from event tokens; an
    interaction appears on both partners' rows, so only the row with the lower
    agent id counts it. Moves are successive position changes per agent.
    """
    photos = 0
    dream_frames = 0
    interactions = 0
    last_pos: dict[int, tuple[int, int]] = {}
    moves: dict[int, int] = {}
    sums = [0.0, 0.0, 0.0, 0.0, 0.0]
    for row in rows:
        moves.setdefault(row.agent_id, 0)
        prev = last_pos.get(row.agent_id)
        if prev is not None and prev != (row.i, row.j):
            moves[row.agent_id] += 1
        last_pos[row.agent_id] = (row.i, row.j)
        sums[0] += row.e_h
        sums[1] += row.e_c
        sums[2] += row.e_f
        sums[3] += row.e_k
        sums[4] += row.fatigue
        for token in row.events:
            if token.startswith("photo:"):
                photos += 1
            elif token.startswith("dream:"):
                dream_frames += 1
            elif token.startswith("int:"):
                try:
                    partner = int(token.split(":", 2)[1])
                except (IndexError, ValueError):
                    raise TraceError(f"malformed interaction token {token!r}") from None
                if partner > row.agent_id:
                    interactions += 1
    n = len(rows)
    means = [s / n if n else 0.0 for s in sums]
    per_agent = tuple(moves[aid] for aid in sorted(moves))
    return Metrics(
        interactions=interactions,
        photos=photos,
        dream_frames=dream_frames,
        moves_per_agent=per_agent,
        total_moves=sum(per_agent),
        mean_happiness=means[0],
        mean_curiosity=means[1],
        mean_friendship=means[2],
        mean_courage=means[3],
        mean_fatigue=means[4],
    )


def write_interactions_csv(path: str, records: Iterable[InteractionRecord]) -> None:
    atomic_write_text(
        path,
        _csv_text(
            INTERACTIONS_HEADER,
            (
                [
                    r.tick,
                    r.agent_a,
                    r.agent_b,
                    r.cell.i,
                    r.cell.j,
                    r.sent_by_a,
                    r.sent_by_b,
                    _fmt(r.eval_by_a),
                    _fmt(r.eval_by_b),
                ]
                for r in records
            ),
        ),
    )


def write_dreams_csv(path: str, rows: Iterable[DreamFrameRow]) -> None:
    atomic_write_text(
        path,
        _csv_text(
            DREAMS_HEADER,
            (
                [
                    r.agent_id,
                    r.tick,
                    r.frame_index,
                    r.percept_id,
                    r.content_category,
                    r.style_category,
                    r.origin_i,
                    r.origin_j,
                    "" if r.pair_distance is None else r.pair_distance,
                    r.valence,
                ]
                for r in rows
            ),
        ),
    )


def write_percepts_csv(path: str, rows: Iterable[PerceptRow]) -> None:
    atomic_write_text(
        path,
        _csv_text(
            PERCEPTS_HEADER,
            (
                [
                    r.agent_id,
                    r.id,
                    r.kind,
                    r.category,
                    r.i,
                    r.j,
                    r.tick,
                    ";".join(_fmt(x) for x in r.features),
                ]
                for r in rows
            ),
        ),
    )


def read_percepts_csv(path: str) -> list[PerceptRow]:
    try:
        with open(path, "r", encoding="utf-8", newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader, None)
            if header != PERCEPTS_HEADER:
                raise TraceError(f"unexpected percept log header {header}")
            rows = []
            for lineno, rec in enumerate(reader, start=2):
                if len(rec) != len(PERCEPTS_HEADER):
                    raise TraceError(f"line {lineno}: expected {len(PERCEPTS_HEADER)} columns")
                try:
                    feats = np.array(
                        [float(x) for x in rec[7].split(";") if x], dtype=float
                    )
                    rows.append(
                        PerceptRow(
                            agent_id=int(rec[0]),
                            id=rec[1],
                            kind=rec[2],
                            category=rec[3],
                            i=int(rec[4]),
                            j=int(rec[5]),
                            tick=int(rec[6]),
                            features=feats,
                        )
                    )
                except ValueError as exc:
                    raise TraceError(f"line {lineno}: {exc}") from None
            return rows
    except OSError as exc:
        raise TraceError(f"cannot read percept log {path}: {exc}") from None


def _render_metric(v) -> str:
    return str(v) if isinstance(v, (int, np.integer)) else _fmt(v)


def write_metrics_csv(path: str, m: Metrics) -> None:
    atomic_write_text(
        path,
        _csv_text(METRICS_HEADER, ([k, _render_metric(v)] for k, v in m.items())),
    )


def read_metrics_csv(path: str) -> Metrics:
    try:
        with open(path, "r", encoding="utf-8", newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader, None)
            if header != METRICS_HEADER:
                raise TraceError(f"unexpected metrics header {header}")
            kv = {}
            for rec in reader:
                if len(rec) != 2:
                    raise TraceError(f"malformed metrics row {rec}")
                kv[rec[0]] = rec[1]
    except OSError as exc:
        raise TraceError(f"cannot read metrics file {path}: {exc}") from None
    try:
        moves = []
        k = 0
        while f"moves_agent_{k}" in kv:
            moves.append(int(kv[f"moves_agent_{k}"]))
            k += 1
        return Metrics(
            interactions=int(kv["interactions"]),
            photos=int(kv["photos"]),
            dream_frames=int(kv["dream_frames"]),
            moves_per_agent=tuple(moves),
            total_moves=int(kv["total_moves"]),
            mean_happiness=float(kv["mean_happiness"]),
            mean_curiosity=float(kv["mean_curiosity"]),
            mean_friendship=float(kv["mean_friendship"]),
            mean_courage=float(kv["mean_courage"]),
            mean_fatigue=float(kv["mean_fatigue"]),
        )
    except (KeyError, ValueError) as exc:
        raise TraceError(f"incomplete metrics file {path}: {exc}") from None


def write_manifest(path: str, manifest: dict) -> None:
    atomic_write_text(path, json.dumps(manifest, indent=2, sort_keys=True) + "\n")


def read_manifest(path: str) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise TraceError(f"cannot read manifest {path}: {exc}") from None


def standalone_dream_rows(frames, valences: Optional[list[int]] = None) -> list[DreamFrameRow]:
    """Adapt bare dream frames (no agent, no field) to the dreams.csv schema."""
    rows = []
    for idx, frame in enumerate(frames, start=1):
        rows.append(
            DreamFrameRow(
                agent_id=0,
                tick=idx,
                frame_index=idx,
                percept_id="",
                content_category=frame.content_category,
                style_category=frame.style_category,
                origin_i=frame.content_origin.i,
                origin_j=frame.content_origin.j,
                pair_distance=frame.pair_distance,
                valence=0 if valences is None else valences[idx - 1],
            )
        )
    return rows
