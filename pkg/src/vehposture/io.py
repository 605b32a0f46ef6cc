"""Plain-text file formats.

* Sample CSV: header ``t_ms,x_g,y_g,z_g``, six fractional digits on write.
* Event records: JSON Lines, one event per line; blank lines are ignored.
* Ground truth: one JSON document (intervals plus sampled timelines).
* Scenario: ``key=value`` lines after a ``schema=1`` header; ``#`` comments.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable

import numpy as np

from .core import AccelSample, AccelStream, Source
from .detector import PostureEvent
from .diff_estimator import ResidualStream
from .errors import InvalidSampleError, ParseError, PostureError
from .scenario import GroundTruth, Maneuver, Pickup, ScenarioKind, ScenarioSpec

CSV_HEADER = "t_ms,x_g,y_g,z_g"
SCENARIO_SCHEMA = 1
TRUTH_SCHEMA = 1


def _fmt(v: float) -> str:
    s = f"{v:.6f}"
    return "0.000000" if s == "-0.000000" else s


def format_csv(stream: AccelStream) -> str:
    lines = [CSV_HEADER]
    lines += [f"{s.t_ms},{_fmt(s.x_g)},{_fmt(s.y_g)},{_fmt(s.z_g)}" for s in stream]
    return "\n".join(lines) + "\n"


def write_csv(stream: AccelStream, path: str | Path) -> None:
    Path(path).write_text(format_csv(stream))


def format_residual_csv(residual: ResidualStream) -> str:
    lines = [CSV_HEADER]
    lines += [f"{r.t_ms},{_fmt(r.rx)},{_fmt(r.ry)},{_fmt(r.rz)}" for r in residual.samples]
    return "\n".join(lines) + "\n"


def infer_rate_hz(t_ms: np.ndarray) -> float:
    """Median reciprocal spacing."""
    return 1000.0 / float(np.median(np.diff(t_ms)))


def parse_csv(
    text: str,
    *,
    rate_hz: float | None = None,
    source: Source = Source.CHEST,
    path: str | None = None,
) -> AccelStream:
    lines = text.splitlines()
    if not lines or lines[0].strip() != CSV_HEADER:
        raise ParseError(1, f"expected header {CSV_HEADER!r}", path)
    samples: list[AccelSample] = []
    prev_t = None
    for lineno, raw in enumerate(lines[1:], start=2):
        line = raw.strip()
        if not line:
            continue
        parts = line.split(",")
        if len(parts) != 4:
            raise ParseError(lineno, f"expected 4 fields, got {len(parts)}", path)
        try:
            t = int(parts[0])
            x, y, z = (float(p) for p in parts[1:])
        except ValueError:
            raise ParseError(lineno, f"malformed value in {line!r}", path) from None
        if prev_t is not None and t <= prev_t:
            raise ParseError(lineno, f"nonmonotonic timestamp {t} after {prev_t}", path)
        try:
            samples.append(AccelSample(t, x, y, z))
        except InvalidSampleError as exc:
            raise ParseError(lineno, f"out-of-range value: {exc}", path) from None
        prev_t = t
    if rate_hz is None:
        if len(samples) < 2:
            raise ParseError(len(lines), "need at least 2 samples to infer rate; pass rate_hz", path)
        rate_hz = infer_rate_hz(np.array([s.t_ms for s in samples]))
    return AccelStream(source, float(rate_hz), tuple(samples))


def read_csv(path: str | Path, *, rate_hz: float | None = None, source: Source = Source.CHEST) -> AccelStream:
    return parse_csv(Path(path).read_text(), rate_hz=rate_hz, source=source, path=str(path))


@dataclass(frozen=True)
class EventRecord:
    event: PostureEvent
    source: Source
    config_fingerprint: str

    def to_json(self) -> str:
        e = self.event
        return json.dumps(
            {
                "start_ms": e.start_ms,
                "end_ms": e.end_ms,
                "min_y_g": e.min_y_g,
                "min_alpha_deg": e.min_alpha_deg,
                "confirmed": e.confirmed,
                "truncated": e.truncated,
                "source": self.source.value,
                "config_fingerprint": self.config_fingerprint,
            }
        )

    @classmethod
    def from_json(cls, line: str) -> "EventRecord":
        d = json.loads(line)
        ev = PostureEvent(
            start_ms=int(d["start_ms"]),
            end_ms=None if d["end_ms"] is None else int(d["end_ms"]),
            min_y_g=float(d["min_y_g"]),
            min_alpha_deg=float(d["min_alpha_deg"]),
            confirmed=bool(d["confirmed"]),
            truncated=bool(d.get("truncated", False)),
        )
        return cls(ev, Source(d["source"]), str(d["config_fingerprint"]))


def format_events(records: Iterable[EventRecord]) -> str:
    return "".join(r.to_json() + "\n" for r in records)


def write_events(records: Iterable[EventRecord], path: str | Path) -> None:
    Path(path).write_text(format_events(records))


def parse_events(text: str, path: str | None = None) -> list[EventRecord]:
    out = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        if not raw.strip():
            continue
        try:
            out.append(EventRecord.from_json(raw))
        except (ValueError, KeyError, TypeError) as exc:
            raise ParseError(lineno, f"bad event record: {exc}", path) from None
    return out


def read_events(path: str | Path) -> list[EventRecord]:
    return parse_events(Path(path).read_text(), str(path))


def format_truth(truth: GroundTruth) -> str:
    doc = {
        "schema": TRUTH_SCHEMA,
        "pickup_intervals": [list(iv) for iv in truth.pickup_intervals],
        "t_ms": [int(t) for t in truth.t_ms],
        "alpha_deg": [float(a) for a in truth.alpha_deg],
        "vehicle_pitch_deg": [float(a) for a in truth.vehicle_pitch_deg],
    }
    return json.dumps(doc, separators=(",", ":")) + "\n"


def write_truth(truth: GroundTruth, path: str | Path) -> None:
    Path(path).write_text(format_truth(truth))


def parse_truth(text: str, path: str | None = None) -> GroundTruth:
    try:
        doc = json.loads(text)
        if doc.get("schema") != TRUTH_SCHEMA:
            raise ValueError(f"unsupported schema {doc.get('schema')!r}")
        return GroundTruth(
            pickup_intervals=tuple((int(a), int(b)) for a, b in doc["pickup_intervals"]),
            t_ms=np.asarray(doc["t_ms"], dtype=np.int64),
            alpha_deg=np.asarray(doc["alpha_deg"], dtype=float),
            vehicle_pitch_deg=np.asarray(doc["vehicle_pitch_deg"], dtype=float),
        )
    except json.JSONDecodeError as exc:
        raise ParseError(exc.lineno, exc.msg, path) from None
    except (ValueError, KeyError, TypeError, AttributeError) as exc:
        raise ParseError(1, f"bad ground-truth document: {exc}", path) from None


def read_truth(path: str | Path) -> GroundTruth:
    return parse_truth(Path(path).read_text(), str(path))


def format_scenario(spec: ScenarioSpec) -> str:
    lines = [
        f"schema={SCENARIO_SCHEMA}",
        f"kind={spec.kind.value}",
        f"duration_s={spec.duration_s!r}",
        f"seed={spec.seed}",
        f"sway_deg={spec.sway_deg!r}",
    ]
    if spec.grade_percent is not None:
        lines.append(f"grade_percent={spec.grade_percent!r}")
    if spec.maneuvers is not None:
        lines.append("maneuvers=explicit")
        for m in spec.maneuvers:
            lines.append(f"maneuver={m.start_s!r},{m.duration_s!r},{m.fore_aft_g!r},{m.lateral_g!r}")
    for p in spec.pickups:
        lines.append(
            f"pickup={p.start_s!r},{p.dip_duration_s!r},{p.hold_s!r},{p.target_alpha_deg!r}"
        )
    return "\n".join(lines) + "\n"


def write_scenario(spec: ScenarioSpec, path: str | Path) -> None:
    Path(path).write_text(format_scenario(spec))


def _floats(value: str, n: int, lineno: int, path: str | None) -> list[float]:
    parts = value.split(",")
    if len(parts) != n:
        raise ParseError(lineno, f"expected {n} comma-separated numbers", path)
    try:
        vals = [float(p) for p in parts]
    except ValueError:
        raise ParseError(lineno, f"malformed number in {value!r}", path) from None
    if not all(math.isfinite(v) for v in vals):
        raise ParseError(lineno, "non-finite number", path)
    return vals


def parse_scenario(text: str, path: str | None = None) -> ScenarioSpec:
    fields: dict = {}
    maneuvers: list[Maneuver] = []
    pickups: list[Pickup] = []
    explicit = False
    seen_schema = False
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if not sep:
            raise ParseError(lineno, f"expected key=value, got {line!r}", path)
        if not seen_schema:
            if key != "schema":
                raise ParseError(lineno, "first entry must be schema=1", path)
            if value != str(SCENARIO_SCHEMA):
                raise ParseError(lineno, f"unsupported schema {value!r}", path)
            seen_schema = True
            continue
        try:
            if key == "kind":
                fields["kind"] = ScenarioKind.parse(value)
            elif key in ("duration_s", "grade_percent", "sway_deg"):
                fields[key] = _floats(value, 1, lineno, path)[0]
            elif key == "seed":
                fields["seed"] = int(value)
            elif key == "maneuvers":
                if value != "explicit":
                    raise ParseError(lineno, "maneuvers= only accepts 'explicit'", path)
                explicit = True
            elif key == "maneuver":
                maneuvers.append(Maneuver(*_floats(value, 4, lineno, path)))
                explicit = True
            elif key == "pickup":
                pickups.append(Pickup(*_floats(value, 4, lineno, path)))
            else:
                raise ParseError(lineno, f"unknown key {key!r}", path)
        except ParseError:
            raise
        except (ValueError, PostureError) as exc:
            raise ParseError(lineno, str(exc), path) from None
    if not seen_schema:
        raise ParseError(1, "missing schema=1 header", path)
    spec = ScenarioSpec(
        maneuvers=tuple(maneuvers) if explicit else None, pickups=tuple(pickups), **fields
    )
    try:
        spec.validate()
    except PostureError as exc:
        raise ParseError(1, str(exc), path) from None
    return spec


def read_scenario(path: str | Path) -> ScenarioSpec:
    return parse_scenario(Path(path).read_text(), str(path))


def format_series(t_ms: Iterable[int], values: Iterable[float], name: str) -> str:
    lines = [f"t_ms,{name}"]
    lines += [f"{int(t)},{_fmt(float(v))}" for t, v in zip(t_ms, values)]
    return "\n".join(lines) + "\n"
