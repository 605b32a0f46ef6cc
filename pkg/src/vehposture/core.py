"""Sample/stream data model and gravity-projection tilt math.

Axes follow the chest sensor: X lateral, Y along the torso (pelvis to head),
Z anterior (back to chest). Values are specific force in G; a sensor at rest
reads +1 G along whichever axis points up, so an upright torso reads y ~ +1.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import InvalidSampleError, NonMonotonicTimestampError

STANDARD_GRAVITY = 9.80665  # m/s^2 per G
MAX_ABS_G = 16.0


class Source(enum.Enum):
    CHEST = "ChestSensor"
    PHONE = "Phone"
    SYNTHETIC = "Synthetic"

    @classmethod
    def parse(cls, text: str) -> "Source":
        aliases = {"chest": cls.CHEST, "phone": cls.PHONE, "synthetic": cls.SYNTHETIC}
        key = text.strip()
        if key.lower() in aliases:
            return aliases[key.lower()]
        return cls(key)


def _check_component(name: str, value: float) -> None:
    if not math.isfinite(value):
        raise InvalidSampleError(f"{name} is not finite: {value!r}")
    if abs(value) > MAX_ABS_G:
        raise InvalidSampleError(f"|{name}| = {abs(value)} G exceeds {MAX_ABS_G} G")


@dataclass(frozen=True, slots=True)
class AccelSample:
    t_ms: int
    x_g: float
    y_g: float
    z_g: float

    def __post_init__(self) -> None:
        _check_component("x_g", self.x_g)
        _check_component("y_g", self.y_g)
        _check_component("z_g", self.z_g)

    @property
    def xyz(self) -> tuple[float, float, float]:
        return (self.x_g, self.y_g, self.z_g)


@dataclass(frozen=True)
class AccelStream:
    """Time-ordered samples from one sensor at a nominal rate."""

    source: Source
    rate_hz: float
    samples: tuple[AccelSample, ...]
    _array: np.ndarray | None = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        if not (self.rate_hz > 0 and math.isfinite(self.rate_hz)):
            raise ValueError(f"rate_hz must be positive, got {self.rate_hz!r}")
        if not isinstance(self.samples, tuple):
            object.__setattr__(self, "samples", tuple(self.samples))
        prev = None
        for i, s in enumerate(self.samples):
            if prev is not None and s.t_ms <= prev:
                raise NonMonotonicTimestampError(
                    f"sample {i}: t_ms {s.t_ms} does not follow {prev}"
                )
            prev = s.t_ms

    @classmethod
    def from_arrays(
        cls,
        t_ms: Sequence[int] | np.ndarray,
        xyz: np.ndarray,
        *,
        rate_hz: float,
        source: Source = Source.SYNTHETIC,
    ) -> "AccelStream":
        t = np.asarray(t_ms, dtype=np.int64)
        xyz = np.asarray(xyz, dtype=float).reshape(-1, 3)
        if len(t) != len(xyz):
            raise ValueError("t_ms and xyz lengths differ")
        samples = tuple(
            AccelSample(int(ti), float(a), float(b), float(c))
            for ti, (a, b, c) in zip(t.tolist(), xyz.tolist())
        )
        return cls(source, float(rate_hz), samples)

    def __len__(self) -> int:
        return len(self.samples)

    def __iter__(self):
        return iter(self.samples)

    def as_array(self) -> np.ndarray:
        """(n, 4) float array of ``t_ms, x, y, z``; cached."""
        if self._array is None:
            arr = np.array(
                [(s.t_ms, s.x_g, s.y_g, s.z_g) for s in self.samples], dtype=float
            ).reshape(-1, 4)
            arr.setflags(write=False)
            object.__setattr__(self, "_array", arr)
        return self._array

    @property
    def t_ms(self) -> np.ndarray:
        return np.array([s.t_ms for s in self.samples], dtype=np.int64)

    @property
    def xyz(self) -> np.ndarray:
        return self.as_array()[:, 1:]


@dataclass(frozen=True)
class TiltAngle:
    """Torso elevation above horizontal: +90 upright, 0 flat, negative head-down."""

    alpha_deg: float

    def __post_init__(self) -> None:
        if not -90.0 <= self.alpha_deg <= 90.0:
            raise ValueError(f"alpha_deg out of [-90, 90]: {self.alpha_deg}")

    def __float__(self) -> float:
        return self.alpha_deg


def magnitude(s: AccelSample) -> float:
    return math.sqrt(s.x_g * s.x_g + s.y_g * s.y_g + s.z_g * s.z_g)


def tilt_from_y(y_g: float) -> TiltAngle:
    # clamp: dynamic acceleration can push |y| past 1 G
    y = min(1.0, max(-1.0, y_g))
    return TiltAngle(math.degrees(math.asin(y)))


def g_to_mps2(value_g: float) -> float:
    return value_g * STANDARD_GRAVITY

