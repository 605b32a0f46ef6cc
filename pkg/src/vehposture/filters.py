"""Causal first-order low-pass filtering and two-stream time alignment."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import AccelSample, AccelStream
from .errors import InvalidCutoffError, NoOverlapError

DEFAULT_MAX_GAP_MS = 100


@dataclass
class LowPassState:
    """Exponential smoother ``y += alpha * (x - y)`` applied per axis.

    The first sample seen passes through unchanged and seeds ``y_prev``.
    """

    alpha: float
    y_prev: tuple[float, float, float] = (0.0, 0.0, 0.0)
    initialized: bool = False

    def __post_init__(self) -> None:
        if not 0.0 < self.alpha <= 1.0:
            raise ValueError(f"alpha must lie in (0, 1], got {self.alpha!r}")


def smoothing_alpha(cutoff_hz: float, rate_hz: float) -> float:
    return 1.0 - math.exp(-2.0 * math.pi * cutoff_hz / rate_hz)


def lowpass_create(cutoff_hz: float, rate_hz: float) -> LowPassState:
    if not (rate_hz > 0 and 0 < cutoff_hz < rate_hz / 2):
        raise InvalidCutoffError(
            f"cutoff {cutoff_hz} Hz must satisfy 0 < cutoff < rate/2 = {rate_hz / 2} Hz"
        )
    return LowPassState(alpha=smoothing_alpha(cutoff_hz, rate_hz))


def lowpass_step(state: LowPassState, s: AccelSample) -> AccelSample:
    if not state.initialized:
        state.y_prev = (s.x_g, s.y_g, s.z_g)
        state.initialized = True
        return s
    a = state.alpha
    px, py, pz = state.y_prev
    out = (px + a * (s.x_g - px), py + a * (s.y_g - py), pz + a * (s.z_g - pz))
    state.y_prev = out
    return AccelSample(s.t_ms, *out)


def lowpass_stream(stream: AccelStream, cutoff_hz: float) -> AccelStream:
    """Filter a whole stream with a fresh state at the stream's nominal rate."""
    state = lowpass_create(cutoff_hz, stream.rate_hz)
    return AccelStream(
        stream.source, stream.rate_hz, tuple(lowpass_step(state, s) for s in stream)
    )


@dataclass(frozen=True)
class AlignedPair:
    t_ms: int
    a: tuple[float, float, float]
    b: tuple[float, float, float]
    gap_exceeded: bool


def resample_align(
    a: AccelStream, b: AccelStream, max_gap_ms: int = DEFAULT_MAX_GAP_MS
) -> list[AlignedPair]:
    """Put ``b`` onto ``a``'s timestamps by linear interpolation.

    Only timestamps of ``a`` inside the common time window are kept. A pair is
    flagged ``gap_exceeded`` when the two ``b`` samples bracketing it are more
    than ``max_gap_ms`` apart; an exact hit on a ``b`` sample is never flagged.
    """
    if len(a) == 0 or len(b) == 0:
        raise NoOverlapError("both streams must be non-empty")
    ta = a.t_ms
    tb = b.t_ms
    lo = max(ta[0], tb[0])
    hi = min(ta[-1], tb[-1])
    if lo > hi:
        raise NoOverlapError(
            f"streams do not overlap: a spans [{ta[0]}, {ta[-1]}] ms, "
            f"b spans [{tb[0]}, {tb[-1]}] ms"
        )
    keep = (ta >= lo) & (ta <= hi)
    t = ta[keep]
    xa = a.xyz[keep]
    xb_src = b.xyz
    tbf = tb.astype(float)
    xb = np.column_stack([np.interp(t.astype(float), tbf, xb_src[:, k]) for k in range(3)])

    right = np.searchsorted(tb, t, side="left")
    exact = tb[np.minimum(right, len(tb) - 1)] == t
    left = np.maximum(right - 1, 0)
    span = tb[np.minimum(right, len(tb) - 1)] - tb[left]
    gap = (~exact) & (span > max_gap_ms)

    return [
        AlignedPair(int(ti), tuple(pa), tuple(pb), bool(g))
        for ti, pa, pb, g in zip(t.tolist(), xa.tolist(), xb.tolist(), gap.tolist())
    ]
