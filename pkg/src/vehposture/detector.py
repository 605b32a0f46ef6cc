"""Streaming forward-bend detector on the low-pass filtered Y axis.

The detector walks Idle -> Candidate -> Active. A sample whose filtered Y is
at or below ``threshold_g`` opens a candidate; the candidate becomes an event
once it has persisted ``min_duration_ms`` (timestamp based, not sample
counted). An active event ends when filtered Y climbs back to ``release_g``.
Setting ``release_g`` just above ``threshold_g`` and ``min_duration_ms=0``
gives plain single-threshold crossing.
"""

from __future__ import annotations

import enum
import hashlib
import math
from dataclasses import asdict, dataclass, replace
from typing import Iterable, Literal

from .core import AccelSample, AccelStream, tilt_from_y
from .errors import InvalidConfigError, InvalidSampleError, NonMonotonicTimestampError
from .filters import LowPassState, lowpass_step, smoothing_alpha

DEFAULT_THRESHOLD_G = -0.34  # roughly sin(-20 deg)


@dataclass(frozen=True)
class DetectorConfig:
    threshold_g: float = DEFAULT_THRESHOLD_G
    release_g: float = -0.25
    min_duration_ms: int = 300
    filter_cutoff_hz: float = 1.0
    rate_hz: float = 25.0

    def validate(self) -> None:
        for name in ("threshold_g", "release_g", "filter_cutoff_hz", "rate_hz"):
            if not math.isfinite(getattr(self, name)):
                raise InvalidConfigError(name, "must be finite")
        if not self.release_g > self.threshold_g:
            raise InvalidConfigError(
                "release_g",
                f"{self.release_g} must be greater than threshold_g {self.threshold_g}",
            )
        if self.min_duration_ms < 0:
            raise InvalidConfigError("min_duration_ms", f"{self.min_duration_ms} < 0")
        if not self.rate_hz > 0:
            raise InvalidConfigError("rate_hz", f"{self.rate_hz} must be positive")
        if not 0 < self.filter_cutoff_hz < self.rate_hz / 2:
            raise InvalidConfigError(
                "filter_cutoff_hz",
                f"{self.filter_cutoff_hz} must lie in (0, {self.rate_hz / 2})",
            )

    def fingerprint(self) -> str:
        """Short stable hash of the settings, used to tag event records."""
        canon = ";".join(f"{k}={v!r}" for k, v in sorted(asdict(self).items()))
        return hashlib.sha256(canon.encode()).hexdigest()[:16]


class Phase(enum.Enum):
    IDLE = "idle"
    CANDIDATE = "candidate"
    ACTIVE = "active"


@dataclass
class PostureEvent:
    start_ms: int
    end_ms: int | None
    min_y_g: float
    min_alpha_deg: float
    confirmed: bool = True
    truncated: bool = False  # still open when the stream ended

    @property
    def duration_ms(self) -> int | None:
        return None if self.end_ms is None else self.end_ms - self.start_ms


@dataclass(frozen=True)
class Transition:
    kind: Literal["start", "end"]
    event: PostureEvent


@dataclass
class DetectorState:
    config: DetectorConfig
    filter: LowPassState
    phase: Phase = Phase.IDLE
    candidate_since_ms: int | None = None
    current_event: PostureEvent | None = None
    last_t_ms: int | None = None
    min_y_g: float = math.inf


def detector_create(config: DetectorConfig | None = None) -> DetectorState:
    config = config or DetectorConfig()
    config.validate()
    alpha = smoothing_alpha(config.filter_cutoff_hz, config.rate_hz)
    return DetectorState(config=config, filter=LowPassState(alpha=alpha))


def _snapshot(state: DetectorState, end_ms: int | None, truncated: bool = False) -> PostureEvent:
    y = state.min_y_g
    return PostureEvent(
        start_ms=state.candidate_since_ms,
        end_ms=end_ms,
        min_y_g=y,
        min_alpha_deg=tilt_from_y(y).alpha_deg,
        confirmed=True,
        truncated=truncated,
    )


def detector_step(state: DetectorState, s: AccelSample) -> Transition | None:
    """Feed one sample; returns a start/end transition or ``None``."""
    if not (math.isfinite(s.x_g) and math.isfinite(s.y_g) and math.isfinite(s.z_g)):
        raise InvalidSampleError(f"non-finite sample at t={s.t_ms} ms")
    if state.last_t_ms is not None and s.t_ms <= state.last_t_ms:
        raise NonMonotonicTimestampError(
            f"t_ms {s.t_ms} does not follow previous {state.last_t_ms}"
        )
    state.last_t_ms = s.t_ms
    cfg = state.config
    y = lowpass_step(state.filter, s).y_g

    if state.phase is Phase.IDLE:
        if y > cfg.threshold_g:
            return None
        state.phase = Phase.CANDIDATE
        state.candidate_since_ms = s.t_ms
        state.min_y_g = y
    elif state.phase is Phase.CANDIDATE:
        if y > cfg.threshold_g:
            state.phase = Phase.IDLE
            state.candidate_since_ms = None
            state.min_y_g = math.inf
            return None
        state.min_y_g = min(state.min_y_g, y)
    else:
        state.min_y_g = min(state.min_y_g, y)
        state.current_event = replace(
            state.current_event,
            min_y_g=state.min_y_g,
            min_alpha_deg=tilt_from_y(state.min_y_g).alpha_deg,
        )
        if y < cfg.release_g:
            return None
        ended = _snapshot(state, s.t_ms)
        state.phase = Phase.IDLE
        state.current_event = None
        state.candidate_since_ms = None
        state.min_y_g = math.inf
        return Transition("end", ended)

    # Candidate (possibly just entered): promote once dwell is satisfied
    if s.t_ms - state.candidate_since_ms >= cfg.min_duration_ms:
        state.phase = Phase.ACTIVE
        state.current_event = _snapshot(state, None)
        return Transition("start", replace(state.current_event))
    return None


def detector_finish(state: DetectorState) -> PostureEvent | None:
    """Close an event still active at end of stream; pending candidates are dropped."""
    if state.phase is not Phase.ACTIVE:
        return None
    return _snapshot(state, state.last_t_ms, truncated=True)


def collect_events(state: DetectorState, samples: Iterable[AccelSample]) -> list[PostureEvent]:
    events = []
    for i, s in enumerate(samples):
        try:
            tr = detector_step(state, s)
        except (InvalidSampleError, NonMonotonicTimestampError) as exc:
            err = type(exc)(f"sample {i}: {exc}")
            err.index = i
            raise err from exc
        if tr is not None and tr.kind == "end":
            events.append(tr.event)
    last = detector_finish(state)
    if last is not None:
        events.append(last)
    return events


def detect_batch(stream: AccelStream, config: DetectorConfig | None = None) -> list[PostureEvent]:
    return collect_events(detector_create(config), stream.samples)
