import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from vehposture.core import AccelStream
from vehposture.diff_estimator import ResidualSample, ResidualStream, residual_metrics, subtract_streams
from vehposture.errors import AllGapsError, EmptyResidualError
from vehposture.filters import AlignedPair, resample_align


def _sine_stream(gain=1.0, amp=0.2, f=0.5, seconds=20.0, rate=100.0):
    t = np.arange(0, int(seconds * 1000) + 1, int(1000 / rate))
    y = gain * amp * np.sin(2 * math.pi * f * t / 1000.0)
    xyz = np.column_stack([np.zeros_like(y), y, np.zeros_like(y)])
    return AccelStream.from_arrays(t, xyz, rate_hz=rate)


def test_identical_streams_give_zero_residual():
    s = _sine_stream()
    r = subtract_streams(resample_align(s, s))
    assert r.excluded_count == 0
    assert all(v == 0.0 for smp in r.samples for v in smp[1:])
    assert residual_metrics(r).rms_g["all"] == 0.0


def test_gain_mismatch_residual_amplitude():
    a = _sine_stream()
    b = _sine_stream(gain=1.05)
    r = subtract_streams(resample_align(a, b))
    ry = np.array([s.ry for s in r.samples])
    # 0.05 * 0.2 G, sign flipped since b is the larger
    assert np.max(np.abs(ry)) == pytest.approx(0.01, abs=1e-6)


def test_swap_negates():
    a, b = _sine_stream(), _sine_stream(gain=0.9)
    ab = subtract_streams(resample_align(a, b))
    ba = subtract_streams(resample_align(b, a))
    for p, q in zip(ab.samples, ba.samples):
        assert p.t_ms == q.t_ms
        assert (p.rx, p.ry, p.rz) == (-q.rx, -q.ry, -q.rz)


def test_gap_pairs_excluded():
    pairs = [
        AlignedPair(0, (1, 1, 1), (0, 0, 0), False),
        AlignedPair(40, (1, 1, 1), (0, 0, 0), True),
    ]
    r = subtract_streams(pairs)
    assert r.excluded_count == 1 and len(r) == 1


def test_all_gaps():
    with pytest.raises(AllGapsError):
        subtract_streams([AlignedPair(0, (1, 1, 1), (0, 0, 0), True)])


def test_empty():
    with pytest.raises(EmptyResidualError):
        subtract_streams([])
    with pytest.raises(EmptyResidualError):
        residual_metrics(ResidualStream(()))


def test_metrics_zero():
    r = ResidualStream(tuple(ResidualSample(i, 0.0, 0.0, 0.0) for i in range(100)))
    m = residual_metrics(r)
    assert m.n == 100
    assert all(v == 0 for v in m.rms_g.values()) and all(v == 0 for v in m.max_abs_g.values())


def test_metrics_constant():
    r = ResidualStream(tuple(ResidualSample(i, 0.0, 0.02, 0.0) for i in range(50)))
    m = residual_metrics(r)
    assert m.rms_g["y"] == pytest.approx(0.02, abs=1e-15)
    assert m.max_abs_g["y"] == pytest.approx(0.02, abs=1e-15)
    assert m.rms_g["y"] <= m.max_abs_g["y"]


def test_metrics_sine_rms():
    t = np.arange(0, 10000)  # 10 whole periods of a 1 Hz sine at 1 kHz
    ry = 0.01 * np.sin(2 * math.pi * t / 1000.0)
    r = ResidualStream(tuple(ResidualSample(int(ti), 0.0, float(v), 0.0) for ti, v in zip(t, ry)))
    assert residual_metrics(r).rms_g["y"] == pytest.approx(0.00707106781186548, rel=0.02)


@settings(max_examples=50, deadline=None)
@given(st.floats(0.8, 1.2).filter(lambda g: abs(g - 1) > 1e-3), st.floats(0.05, 3.0))
def test_gain_mismatch_never_cancels(gain, freq):
    a = _sine_stream(f=freq, seconds=3.0)
    b = _sine_stream(gain=gain, f=freq, seconds=3.0)
    assert residual_metrics(subtract_streams(resample_align(a, b))).rms_g["all"] > 0


@settings(max_examples=50)
@given(st.lists(st.tuples(st.floats(-1, 1), st.floats(-1, 1), st.floats(-1, 1)), min_size=1, max_size=50))
def test_metric_invariants(rows):
    r = ResidualStream(tuple(ResidualSample(i, *row) for i, row in enumerate(rows)))
    m = residual_metrics(r)
    for k in "xyz":
        assert 0 <= m.rms_g[k] <= m.max_abs_g[k]
