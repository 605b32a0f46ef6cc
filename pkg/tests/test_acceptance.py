"""Exit criteria, one test per criterion, each at its stated tolerance."""

import math
import subprocess
import sys
import time

import numpy as np
import pytest

from vehposture.core import AccelSample, AccelStream, Source, tilt_from_y
from vehposture.detector import DetectorConfig, detect_batch, detector_create, detector_finish, detector_step
from vehposture.diff_estimator import residual_metrics, subtract_streams
from vehposture.errors import ParseError
from vehposture.evaluate import eval_events, pooled_report
from vehposture.filters import LowPassState, lowpass_create, lowpass_step, lowpass_stream, resample_align
from vehposture.io import EventRecord, format_csv, format_events, parse_csv, parse_events
from vehposture.detector import PostureEvent
from vehposture.scenario import (
    CHEST_SENSOR,
    IDEAL_SENSOR,
    PHONE_SENSOR,
    Mounting,
    ScenarioKind,
    ScenarioSpec,
    SensorModel,
    random_pickups,
    render_scenario,
    render_sensor,
    synth_vehicle_profile,
)

SIN_MINUS_20 = -0.342020143325669  # mpmath, 30 digits, rounded


def test_c1_threshold_geometry(criterion):
    angle = tilt_from_y(-0.342).alpha_deg
    v = synth_vehicle_profile(ScenarioSpec(duration_s=1.0, maneuvers=(), sway_deg=0.0))
    stream, _ = render_sensor(v, np.full(len(v), -20.0), IDEAL_SENSOR)
    y = stream.samples[0].y_g
    criterion("C1 threshold geometry", f"tilt(-0.342)={angle:.4f} deg, rendered y(-20 deg)={y:.7f} G")
    assert abs(angle - -20.0) <= 0.05
    assert abs(y - SIN_MINUS_20) <= 1e-6
    assert round(y, 3) == -0.342


def test_c2_mountain_no_false_detection(criterion):
    t0 = time.perf_counter()
    counts = []
    for seed in range(100):
        spec = ScenarioSpec(kind=ScenarioKind.MOUNTAIN_CLIMB, duration_s=120, seed=seed)
        assert spec.effective_grade == 20.0
        stream, truth = render_scenario(spec, SensorModel(rate_hz=25.0, noise_sigma_g=0.02))
        assert truth.pickup_intervals == ()
        events = detect_batch(stream, DetectorConfig(rate_hz=stream.rate_hz))
        counts.append(sum(e.confirmed for e in events))
    elapsed = time.perf_counter() - t0
    criterion("C2 mountain climb", f"confirmed events over 100 seeds={sum(counts)}, {elapsed:.1f}s")
    assert sum(counts) == 0
    assert elapsed < 10.0


def test_c3_pickup_detection(criterion):
    t0 = time.perf_counter()
    reports = []
    for seed in range(200):
        rng = np.random.default_rng([seed, 3])
        count = int(rng.integers(1, 4))
        pickups = random_pickups(rng, count, 60.0, alpha_range=(-40.0, -25.0), hold_range=(1.0, 2.0))
        spec = ScenarioSpec(kind=ScenarioKind.REGULAR_BUS, duration_s=60.0, pickups=pickups, seed=seed)
        stream, truth = render_scenario(spec, CHEST_SENSOR)
        assert len(truth.pickup_intervals) == count
        events = detect_batch(stream, DetectorConfig(rate_hz=stream.rate_hz))
        reports.append(eval_events(events, truth, match_tol_ms=500))
    r = pooled_report(reports)
    elapsed = time.perf_counter() - t0
    criterion(
        "C3 pickup detection",
        f"precision={r.precision:.4f} recall={r.recall:.4f} "
        f"mean_start_error={r.mean_start_error_ms:.1f}ms, {elapsed:.1f}s",
    )
    assert r.recall >= 0.95
    assert r.precision >= 0.95
    assert r.mean_start_error_ms <= 200
    assert elapsed < 30.0


def test_c4_subtraction_residual(criterion):
    spec = ScenarioSpec(kind=ScenarioKind.HAND_CART, duration_s=60.0, seed=1)
    ideal = SensorModel(rate_hz=50.0)
    a0, _ = render_scenario(spec, ideal, Mounting.VEHICLE_FIXED)
    b0, _ = render_scenario(spec, ideal, Mounting.VEHICLE_FIXED, source=Source.PHONE)
    same = residual_metrics(subtract_streams(resample_align(a0, b0))).rms_g["all"]

    assert PHONE_SENSOR.gain == (1.05, 1.05, 1.05) and PHONE_SENSOR.latency_ms == 40
    chest, _ = render_scenario(spec, CHEST_SENSOR)
    phone, _ = render_scenario(spec, PHONE_SENSOR, Mounting.VEHICLE_FIXED, source=Source.PHONE)
    raw = residual_metrics(subtract_streams(resample_align(chest, phone))).rms_g["all"]
    smooth = residual_metrics(
        subtract_streams(resample_align(lowpass_stream(chest, 1.0), lowpass_stream(phone, 1.0)))
    ).rms_g["all"]
    criterion(
        "C4 subtraction residual",
        f"ideal rms={same:.2e} G, discrepant rms={raw:.4f} G, after 1 Hz low-pass rms={smooth:.4f} G",
    )
    assert same < 1e-9
    assert raw >= 0.01
    assert smooth >= 0.005


def test_c5_filter_correctness(criterion):
    st = lowpass_create(1.0, 25.0)
    lowpass_step(st, AccelSample(0, 0.0, 0.0, 0.0))
    dc = [lowpass_step(st, AccelSample(i, 0.4, 0.4, 0.4)).y_g for i in range(1, 201)][-1]
    dc_err = abs(dc - 0.4)

    rate, f = 100.0, 10.0
    st = lowpass_create(1.0, rate)
    n = 4000
    x = np.sin(2 * math.pi * f * np.arange(n) / rate)
    y = np.array([lowpass_step(st, AccelSample(i, 0.0, float(v), 0.0)).y_g for i, v in enumerate(x)])
    tail = slice(n // 2, None)
    atten_db = -20 * math.log10(np.sqrt(np.mean(y[tail] ** 2)) / np.sqrt(np.mean(x[tail] ** 2)))

    alpha = lowpass_create(1.0, 25.0).alpha
    st = LowPassState(alpha=alpha)
    lowpass_step(st, AccelSample(0, 0.0, 0.0, 0.0))
    step_err = max(
        abs(lowpass_step(st, AccelSample(k, 0.0, 1.0, 0.0)).y_g - (1 - (1 - alpha) ** k)) for k in range(1, 51)
    )
    criterion("C5 filter", f"dc err={dc_err:.1e}, attenuation@10x={atten_db:.2f} dB, step err={step_err:.1e}")
    assert dc_err <= 1e-6
    assert atten_db >= 15.0
    assert step_err <= 1e-9


def _random_stream(rng, n=800):
    y = 0.9 + np.cumsum(rng.normal(0, 0.03, n))
    for _ in range(int(rng.integers(1, 5))):
        i = int(rng.integers(0, n - 80))
        y[i : i + int(rng.integers(3, 80))] = rng.uniform(-1.0, -0.2)
    y = np.clip(y + rng.normal(0, 0.02, n), -3, 3)
    t = np.cumsum(rng.integers(30, 50, n))
    xyz = np.column_stack([rng.normal(0, 0.05, n), y, rng.normal(0, 0.05, n)])
    return AccelStream.from_arrays(t, xyz, rate_hz=25.0)


def test_c6_batch_stream_equivalence(criterion):
    mismatches = 0
    total = 0
    for seed in range(50):
        stream = _random_stream(np.random.default_rng([seed, 6]))
        config = DetectorConfig()
        batch = detect_batch(stream, config)
        state = detector_create(config)
        inc = []
        for s in stream:
            tr = detector_step(state, s)
            if tr is not None and tr.kind == "end":
                inc.append(tr.event)
        last = detector_finish(state)
        inc += [last] if last else []
        total += len(batch)
        mismatches += batch != inc
    criterion("C6 batch/stream equivalence", f"{50 - mismatches}/50 streams identical, {total} events")
    assert mismatches == 0


def test_c7_format_roundtrips(criterion, tmp_path):
    rng = np.random.default_rng(7)
    worst = 0.0
    event_ok = 0
    for _ in range(1000):
        n = int(rng.integers(2, 40))
        t = np.cumsum(rng.integers(1, 100, n))
        xyz = rng.uniform(-16, 16, (n, 3))
        back = parse_csv(format_csv(AccelStream.from_arrays(t, xyz, rate_hz=25.0)), rate_hz=25.0)
        assert back.t_ms.tolist() == t.tolist()
        worst = max(worst, float(np.max(np.abs(back.xyz - xyz))))

        recs = []
        for _ in range(int(rng.integers(0, 6))):
            start = int(rng.integers(0, 10**7))
            ev = PostureEvent(start, start + int(rng.integers(1, 10**5)), float(rng.uniform(-16, -0.34)),
                              float(rng.uniform(-90, 0)), bool(rng.integers(0, 2)), bool(rng.integers(0, 2)))
            recs.append(EventRecord(ev, Source.CHEST, f"{int(rng.integers(0, 2**60)):016x}"))
        event_ok += parse_events(format_events(recs)) == recs

    bad = tmp_path / "bad.csv"
    bad.write_text("t_ms,x_g,y_g,z_g\n0,0,1,0\n40,abc,0,0\n")
    with pytest.raises(ParseError) as exc:
        parse_csv(bad.read_text())
    proc = subprocess.run(
        [sys.executable, "-m", "vehposture", "detect", "--in", str(bad), "--out", str(tmp_path / "e")],
        capture_output=True, text=True,
    )
    criterion(
        "C7 format round-trips",
        f"csv worst err={worst:.1e} G, events {event_ok}/1000 exact, "
        f"malformed line={exc.value.line}, exit={proc.returncode}",
    )
    assert worst <= 1e-6
    assert event_ok == 1000
    assert exc.value.line == 3
    assert proc.returncode == 2 and ":3:" in proc.stderr


def test_c8_simulate_deterministic(criterion, tmp_path):
    outs = []
    for k in range(2):
        path = tmp_path / f"run{k}.csv"
        proc = subprocess.run(
            [sys.executable, "-m", "vehposture", "simulate", "--scenario", "bus", "--seed", "7", "--out", str(path)],
            capture_output=True, text=True,
        )
        assert proc.returncode == 0
        outs.append(path.read_bytes())
    criterion("C8 determinism", f"{len(outs[0])} bytes, identical={outs[0] == outs[1]}")
    assert outs[0] == outs[1]
