"""Vehicle-acceleration subtraction (chest minus phone) and residual statistics.

Raw specific force is subtracted as-is; gravity is not removed first and no
latency compensation is attempted. The residual is expected to stay nonzero
whenever the two sensors differ in gain, bias, latency or noise.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .filters import AlignedPair
from .errors import AllGapsError, EmptyResidualError

AXES = ("x", "y", "z")


class ResidualSample(NamedTuple):
    t_ms: int
    rx: float
    ry: float
    rz: float


@dataclass(frozen=True)
class ResidualStream:
    samples: tuple[ResidualSample, ...]
    excluded_count: int = 0

    def __len__(self) -> int:
        return len(self.samples)

    def as_array(self) -> np.ndarray:
        return np.array([tuple(s) for s in self.samples], dtype=float).reshape(-1, 4)


@dataclass(frozen=True)
class ResidualMetrics:
    rms_g: dict[str, float]  # keys x, y, z, all
    max_abs_g: dict[str, float]  # keys x, y, z
    n: int

    def as_lines(self, excluded_count: int | None = None) -> list[str]:
        lines = [f"n={self.n}"]
        if excluded_count is not None:
            lines.append(f"excluded={excluded_count}")
        lines += [f"rms_{k}={self.rms_g[k]:.6g}" for k in AXES]
        lines.append(f"rms={self.rms_g['all']:.6g}")
        lines += [f"max_abs_{k}={self.max_abs_g[k]:.6g}" for k in AXES]
        return lines


def subtract_streams(pairs: Sequence[AlignedPair]) -> ResidualStream:
    if not pairs:
        raise EmptyResidualError("no aligned pairs to subtract")
    kept = []
    excluded = 0
    for p in pairs:
        if p.gap_exceeded:
            excluded += 1
            continue
        kept.append(
            ResidualSample(p.t_ms, p.a[0] - p.b[0], p.a[1] - p.b[1], p.a[2] - p.b[2])
        )
    if not kept:
        raise AllGapsError(f"all {excluded} aligned pairs fall inside data gaps")
    return ResidualStream(tuple(kept), excluded)


def residual_metrics(r: ResidualStream) -> ResidualMetrics:
    if len(r) == 0:
        raise EmptyResidualError("residual stream is empty")
    vals = r.as_array()[:, 1:]
    sq = vals * vals
    rms = {k: float(np.sqrt(sq[:, i].mean())) for i, k in enumerate(AXES)}
    rms["all"] = float(np.sqrt(sq.mean()))
    max_abs = {k: float(np.abs(vals[:, i]).max()) for i, k in enumerate(AXES)}
    # sqrt(mean(v^2)) can exceed max|v| by one ulp for constant v
    for k in AXES:
        rms[k] = min(rms[k], max_abs[k])
    return ResidualMetrics(rms, max_abs, len(r))
