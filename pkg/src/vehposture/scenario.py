"""Synthetic vehicle/torso kinematics and sensor rendering with ground truth.

Physics lives in the vehicle pitch plane. For a torso at elevation ``alpha``
above horizontal and vehicle fore-aft acceleration ``a_f`` (G), the ideal
chest reading is::

    x = a_lat
    y = sin(alpha) + a_f * cos(alpha)
    z = a_f * sin(alpha) - cos(alpha)

Profiles are generated on a 1 kHz base grid (one node per millisecond), so
any integer-millisecond sensor timestamp lands exactly on a node.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

from .core import AccelStream, Source
from .errors import InvalidSpecError, MismatchedTimelinesError, OverlappingPickupsError

BASE_RATE_HZ = 1000
RAMP_S = 0.5
PICKUP_ALPHA_DEG = -20.0  # ground-truth label: torso at or below this elevation
SWAY_MAX_HZ = 0.3


class ScenarioKind(enum.Enum):
    HAND_CART = "HandCart"
    REGULAR_BUS = "RegularBus"
    MOUNTAIN_CLIMB = "MountainClimb"
    CUSTOM = "Custom"

    @classmethod
    def parse(cls, text: str) -> "ScenarioKind":
        aliases = {
            "handcart": cls.HAND_CART,
            "hand_cart": cls.HAND_CART,
            "cart": cls.HAND_CART,
            "bus": cls.REGULAR_BUS,
            "regularbus": cls.REGULAR_BUS,
            "regular_bus": cls.REGULAR_BUS,
            "mountain": cls.MOUNTAIN_CLIMB,
            "mountainclimb": cls.MOUNTAIN_CLIMB,
            "mountain_climb": cls.MOUNTAIN_CLIMB,
            "custom": cls.CUSTOM,
        }
        try:
            return aliases[text.strip().lower()]
        except KeyError:
            raise InvalidSpecError("kind", f"unknown scenario kind {text!r}") from None


class Mounting(enum.Enum):
    TORSO = "Torso"
    VEHICLE_FIXED = "VehicleFixed"


@dataclass(frozen=True)
class Maneuver:
    start_s: float
    duration_s: float
    fore_aft_g: float = 0.0
    lateral_g: float = 0.0


@dataclass(frozen=True)
class Pickup:
    start_s: float
    dip_duration_s: float
    hold_s: float
    target_alpha_deg: float

    @property
    def end_s(self) -> float:
        return self.start_s + 2 * self.dip_duration_s + self.hold_s


@dataclass(frozen=True)
class ScenarioSpec:
    """Declarative scenario.

    ``grade_percent=None`` means the kind's default (20 for MountainClimb,
    else 0). ``maneuvers=None`` means the kind's canonical maneuver pattern;
    pass an empty tuple for none.
    """

    kind: ScenarioKind = ScenarioKind.CUSTOM
    duration_s: float = 60.0
    grade_percent: float | None = None
    maneuvers: tuple[Maneuver, ...] | None = None
    pickups: tuple[Pickup, ...] = ()
    seed: int = 0
    sway_deg: float = 2.0

    @property
    def effective_grade(self) -> float:
        if self.grade_percent is not None:
            return self.grade_percent
        return 20.0 if self.kind is ScenarioKind.MOUNTAIN_CLIMB else 0.0

    def validate(self) -> None:
        if not (math.isfinite(self.duration_s) and self.duration_s > 0):
            raise InvalidSpecError("duration_s", f"must be positive, got {self.duration_s}")
        if not 0.0 <= self.effective_grade <= 30.0:
            raise InvalidSpecError("grade_percent", f"{self.effective_grade} outside [0, 30]")
        if not 0.0 <= self.sway_deg <= 10.0:
            raise InvalidSpecError("sway_deg", f"{self.sway_deg} outside [0, 10]")
        for i, m in enumerate(self.maneuvers or ()):
            if abs(m.fore_aft_g) > 0.5:
                raise InvalidSpecError(f"maneuvers[{i}].fore_aft_g", f"|{m.fore_aft_g}| > 0.5")
            if abs(m.lateral_g) > 0.5:
                raise InvalidSpecError(f"maneuvers[{i}].lateral_g", f"|{m.lateral_g}| > 0.5")
            if m.duration_s <= 0 or m.start_s < 0:
                raise InvalidSpecError(f"maneuvers[{i}]", "needs start_s >= 0 and duration_s > 0")
        for i, p in enumerate(self.pickups):
            if not -90.0 <= p.target_alpha_deg <= 90.0:
                raise InvalidSpecError(
                    f"pickups[{i}].target_alpha_deg", f"{p.target_alpha_deg} outside [-90, 90]"
                )
            if p.dip_duration_s <= 0 or p.hold_s < 0:
                raise InvalidSpecError(f"pickups[{i}]", "needs dip_duration_s > 0 and hold_s >= 0")


@dataclass(frozen=True)
class VehicleProfile:
    t_ms: np.ndarray
    fore_aft_g: np.ndarray
    lateral_g: np.ndarray
    pitch_deg: np.ndarray

    def __len__(self) -> int:
        return len(self.t_ms)


@dataclass(frozen=True)
class SensorModel:
    rate_hz: float = 25.0
    gain: tuple[float, float, float] = (1.0, 1.0, 1.0)
    bias_g: tuple[float, float, float] = (0.0, 0.0, 0.0)
    latency_ms: int = 0
    noise_sigma_g: float = 0.0

    def validate(self) -> None:
        if not self.rate_hz > 0:
            raise InvalidSpecError("rate_hz", f"{self.rate_hz} must be positive")
        if any(not 0.8 <= g <= 1.2 for g in self.gain):
            raise InvalidSpecError("gain", f"{self.gain} outside [0.8, 1.2]")
        if any(abs(b) > 0.1 for b in self.bias_g):
            raise InvalidSpecError("bias_g", f"{self.bias_g} exceeds 0.1 G")
        if self.latency_ms < 0:
            raise InvalidSpecError("latency_ms", f"{self.latency_ms} < 0")
        if self.noise_sigma_g < 0:
            raise InvalidSpecError("noise_sigma_g", f"{self.noise_sigma_g} < 0")


IDEAL_SENSOR = SensorModel()
CHEST_SENSOR = SensorModel(rate_hz=25.0, noise_sigma_g=0.02)
PHONE_SENSOR = SensorModel(
    rate_hz=50.0,
    gain=(1.05, 1.05, 1.05),
    bias_g=(0.02, 0.02, 0.02),
    latency_ms=40,
    noise_sigma_g=0.01,
)


@dataclass(frozen=True)
class GroundTruth:
    pickup_intervals: tuple[tuple[int, int], ...]
    t_ms: np.ndarray
    alpha_deg: np.ndarray
    vehicle_pitch_deg: np.ndarray = field(repr=False)


def smoothstep(u: np.ndarray) -> np.ndarray:
    u = np.clip(u, 0.0, 1.0)
    return u * u * (3.0 - 2.0 * u)


def _trapezoid(t_s: np.ndarray, start: float, duration: float, ramp: float) -> np.ndarray:
    """Weight rising 0->1 over ``ramp`` after ``start`` and falling 1->0 before ``start+duration``.

    ``t_s`` must be sorted; only the window itself is evaluated.
    """
    ramp = min(ramp, duration / 2)
    w = np.zeros(len(t_s))
    lo, hi = np.searchsorted(t_s, [start, start + duration], side="left")
    tw = t_s[lo : hi + 1]
    up = smoothstep((tw - start) / ramp)
    down = smoothstep((start + duration - tw) / ramp)
    w[lo : hi + 1] = np.minimum(up, down)
    return w


def _cycle(period_s: float, duration_s: float, pattern: Sequence[Maneuver]) -> tuple[Maneuver, ...]:
    out = []
    k = 0
    while k * period_s < duration_s:
        base = k * period_s
        for m in pattern:
            if base + m.start_s + m.duration_s <= duration_s:
                out.append(replace(m, start_s=base + m.start_s))
        k += 1
    return tuple(out)


def canonical_maneuvers(kind: ScenarioKind, duration_s: float) -> tuple[Maneuver, ...]:
    """Built-in maneuver patterns, repeated to fill the duration.

    HandCart: start, straight, left turn, right turn, stop (0.05 G class pushes).
    RegularBus: pull-away 0.1 G, curve 0.08 G, brake 0.1 G, dwell at stop.
    MountainClimb: pull-away 0.1 G, alternating hairpins 0.1 G, brake 0.1 G.
    """
    if kind is ScenarioKind.HAND_CART:
        pattern = [
            Maneuver(1.0, 2.0, 0.05, 0.0),
            Maneuver(5.0, 2.0, 0.0, 0.04),
            Maneuver(9.0, 2.0, 0.0, -0.04),
            Maneuver(13.0, 2.0, -0.05, 0.0),
        ]
        return _cycle(16.0, duration_s, pattern)
    if kind is ScenarioKind.REGULAR_BUS:
        pattern = [
            Maneuver(2.0, 5.0, 0.10, 0.0),
            Maneuver(12.0, 4.0, 0.0, 0.08),
            Maneuver(20.0, 5.0, -0.10, 0.0),
        ]
        return _cycle(30.0, duration_s, pattern)
    if kind is ScenarioKind.MOUNTAIN_CLIMB:
        pattern = [
            Maneuver(2.0, 4.0, 0.10, 0.0),
            Maneuver(10.0, 5.0, 0.0, 0.10),
            Maneuver(20.0, 5.0, 0.0, -0.10),
            Maneuver(30.0, 4.0, -0.10, 0.0),
        ]
        return _cycle(40.0, duration_s, pattern)
    return ()


def resolved_maneuvers(spec: ScenarioSpec) -> tuple[Maneuver, ...]:
    if spec.maneuvers is not None:
        return spec.maneuvers
    return canonical_maneuvers(spec.kind, spec.duration_s)


def base_timeline_ms(duration_s: float) -> np.ndarray:
    return np.arange(int(round(duration_s * BASE_RATE_HZ)) + 1, dtype=np.int64)


def synth_vehicle_profile(spec: ScenarioSpec) -> VehicleProfile:
    spec.validate()
    t_ms = base_timeline_ms(spec.duration_s)
    t_s = t_ms / 1000.0
    fa = np.zeros(len(t_s))
    lat = np.zeros(len(t_s))
    for m in resolved_maneuvers(spec):
        w = _trapezoid(t_s, m.start_s, m.duration_s, RAMP_S)
        fa += m.fore_aft_g * w
        lat += m.lateral_g * w
    pitch = math.degrees(math.atan(spec.effective_grade / 100.0))
    return VehicleProfile(t_ms, fa, lat, np.full(len(t_s), pitch))


def _sway(t_s: np.ndarray, amplitude_deg: float, seed: int) -> np.ndarray:
    if amplitude_deg == 0:
        return np.zeros(len(t_s))
    rng = np.random.default_rng([seed, 0])
    freqs = rng.uniform(0.03, SWAY_MAX_HZ, size=3)
    phases = rng.uniform(0.0, 2 * math.pi, size=3)
    weights = rng.dirichlet(np.ones(3))  # sum to 1 keeps |sway| <= amplitude
    return amplitude_deg * sum(
        w * np.sin(2 * math.pi * f * t_s + p) for w, f, p in zip(weights, freqs, phases)
    )


def synth_torso_profile(spec: ScenarioSpec, vehicle_pitch_deg: np.ndarray) -> np.ndarray:
    """Torso elevation (deg) on the base grid: seat-back lean plus sway plus pickups."""
    spec.validate()
    t_s = np.arange(len(vehicle_pitch_deg)) / BASE_RATE_HZ
    pickups = sorted(spec.pickups, key=lambda p: p.start_s)
    for i, p in enumerate(pickups):
        if p.start_s < 0 or p.end_s > spec.duration_s:
            raise InvalidSpecError(f"pickups[{i}]", "must lie inside [0, duration_s]")
        if i and p.start_s < pickups[i - 1].end_s:
            raise OverlappingPickupsError(
                f"pickup at {p.start_s} s starts before previous ends at {pickups[i - 1].end_s} s"
            )
    alpha = 90.0 + np.asarray(vehicle_pitch_deg, dtype=float) + _sway(t_s, spec.sway_deg, spec.seed)
    for p in pickups:
        w = _trapezoid(t_s, p.start_s, p.end_s - p.start_s, p.dip_duration_s)
        alpha = (1.0 - w) * alpha + w * p.target_alpha_deg
    return alpha


def ideal_specific_force(fore_aft_g, lateral_g, alpha_deg) -> np.ndarray:
    a = np.radians(alpha_deg)
    s, c = np.sin(a), np.cos(a)
    lat = np.broadcast_to(np.asarray(lateral_g, dtype=float), s.shape)
    return np.column_stack([lat, s + fore_aft_g * c, fore_aft_g * s - c])


def sample_times_ms(duration_ms: int, rate_hz: float) -> np.ndarray:
    n = int(math.floor(duration_ms * rate_hz / 1000.0 + 1e-9)) + 1
    t = np.round(np.arange(n) * (1000.0 / rate_hz)).astype(np.int64)
    return t[t <= duration_ms]


def pickup_intervals(t_ms: np.ndarray, alpha_deg: np.ndarray) -> tuple[tuple[int, int], ...]:
    """Maximal runs of samples with ``alpha <= -20``, as inclusive (first, last) timestamps."""
    below = np.asarray(alpha_deg) <= PICKUP_ALPHA_DEG
    if not below.any():
        return ()
    edges = np.diff(below.astype(np.int8), prepend=0, append=0)
    starts = np.flatnonzero(edges == 1)
    ends = np.flatnonzero(edges == -1) - 1
    return tuple((int(t_ms[a]), int(t_ms[b])) for a, b in zip(starts, ends))


def render_sensor(
    vehicle: VehicleProfile,
    alpha_deg: np.ndarray,
    model: SensorModel = IDEAL_SENSOR,
    mounting: Mounting = Mounting.TORSO,
    *,
    seed: int = 0,
    source: Source = Source.SYNTHETIC,
) -> tuple[AccelStream, GroundTruth]:
    """Sample the ideal specific force through an imperfect sensor.

    Order of effects: latency (hold first value before t=latency), sampling at
    ``model.rate_hz``, per-axis gain, per-axis bias, seeded white noise.
    """
    model.validate()
    alpha_deg = np.asarray(alpha_deg, dtype=float)
    n = len(vehicle)
    if len(alpha_deg) != n:
        raise MismatchedTimelinesError(f"vehicle has {n} nodes, alpha has {len(alpha_deg)}")
    if n == 0 or vehicle.t_ms[0] != 0 or np.any(np.diff(vehicle.t_ms) != 1):
        raise MismatchedTimelinesError("timelines must be on the 1 ms base grid from t=0")

    if mounting is Mounting.VEHICLE_FIXED:
        body_alpha = 90.0 + vehicle.pitch_deg
    else:
        body_alpha = alpha_deg
    ideal = ideal_specific_force(vehicle.fore_aft_g, vehicle.lateral_g, body_alpha)

    t = sample_times_ms(int(vehicle.t_ms[-1]), model.rate_hz)
    src_idx = np.clip(t - model.latency_ms, 0, n - 1)
    vals = ideal[src_idx] * np.asarray(model.gain) + np.asarray(model.bias_g)
    if model.noise_sigma_g > 0:
        rng = np.random.default_rng([seed, 1, int(model.rate_hz * 1000), model.latency_ms])
        vals = vals + rng.normal(0.0, model.noise_sigma_g, size=vals.shape)

    stream = AccelStream.from_arrays(t, vals, rate_hz=model.rate_hz, source=source)
    true_alpha = body_alpha[t]
    truth = GroundTruth(
        pickup_intervals=pickup_intervals(t, true_alpha),
        t_ms=t,
        alpha_deg=true_alpha,
        vehicle_pitch_deg=vehicle.pitch_deg[t],
    )
    return stream, truth


def default_mounting(kind: ScenarioKind) -> Mounting:
    # on the hand cart both devices ride the cart; nobody is wearing the shirt
    return Mounting.VEHICLE_FIXED if kind is ScenarioKind.HAND_CART else Mounting.TORSO


def render_scenario(
    spec: ScenarioSpec,
    model: SensorModel = CHEST_SENSOR,
    mounting: Mounting | None = None,
    *,
    source: Source = Source.CHEST,
) -> tuple[AccelStream, GroundTruth]:
    vehicle = synth_vehicle_profile(spec)
    alpha = synth_torso_profile(spec, vehicle.pitch_deg)
    mounting = default_mounting(spec.kind) if mounting is None else mounting
    return render_sensor(vehicle, alpha, model, mounting, seed=spec.seed, source=source)


def random_pickups(
    rng: np.random.Generator,
    count: int,
    duration_s: float,
    *,
    alpha_range: tuple[float, float] = (-40.0, -25.0),
    hold_range: tuple[float, float] = (1.0, 2.0),
    dip_range: tuple[float, float] = (1.0, 2.0),
    margin_s: float = 3.0,
) -> tuple[Pickup, ...]:
    """Draw ``count`` non-overlapping pickups, each in its own equal time slot."""
    slot = duration_s / count
    out = []
    for k in range(count):
        dip = rng.uniform(*dip_range)
        hold = rng.uniform(*hold_range)
        length = 2 * dip + hold
        lo = k * slot + margin_s
        hi = (k + 1) * slot - margin_s - length
        if hi < lo:
            raise InvalidSpecError("pickups", f"{count} pickups do not fit in {duration_s} s")
        out.append(Pickup(rng.uniform(lo, hi), dip, hold, rng.uniform(*alpha_range)))
    return tuple(out)
