"""Event-level scoring of detections against labeled pickup intervals."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .detector import PostureEvent
from .scenario import GroundTruth

DEFAULT_MATCH_TOL_MS = 500


@dataclass(frozen=True)
class EvalReport:
    true_positives: int
    false_positives: int
    false_negatives: int
    precision: float
    recall: float
    mean_start_error_ms: float  # nan when nothing matched
    start_errors_ms: tuple[int, ...] = ()

    def as_lines(self) -> list[str]:
        return [
            f"true_positives={self.true_positives}",
            f"false_positives={self.false_positives}",
            f"false_negatives={self.false_negatives}",
            f"precision={self.precision:.6g}",
            f"recall={self.recall:.6g}",
            f"mean_start_error_ms={self.mean_start_error_ms:.6g}",
        ]


def report_from_counts(tp: int, fp: int, fn: int, start_errors: Sequence[int] = ()) -> EvalReport:
    precision = tp / (tp + fp) if tp + fp else 1.0
    recall = tp / (tp + fn) if tp + fn else 1.0
    mean_err = sum(start_errors) / len(start_errors) if start_errors else math.nan
    return EvalReport(tp, fp, fn, precision, recall, mean_err, tuple(start_errors))


def spans_match(pred: tuple[int, int], truth: tuple[int, int], tol_ms: int) -> bool:
    """Spans overlap (closed intervals) or their starts lie within ``tol_ms``."""
    ps, pe = pred
    ts, te = truth
    return (ps <= te and ts <= pe) or abs(ps - ts) <= tol_ms


def _span(e: PostureEvent) -> tuple[int, int]:
    return (e.start_ms, e.start_ms if e.end_ms is None else e.end_ms)


def eval_events(
    predicted: Sequence[PostureEvent],
    truth: GroundTruth | Sequence[tuple[int, int]],
    match_tol_ms: int = DEFAULT_MATCH_TOL_MS,
) -> EvalReport:
    """Greedy one-to-one matching in time order.

    Each confirmed prediction, earliest first, takes the earliest still
    unmatched truth interval it matches. Unconfirmed predictions are ignored.
    """
    if isinstance(truth, GroundTruth):
        truth = truth.pickup_intervals
    preds = [_span(e) for e in predicted if e.confirmed]
    used = [False] * len(truth)
    errors = []
    for p in preds:
        for j, t in enumerate(truth):
            if not used[j] and spans_match(p, t, match_tol_ms):
                used[j] = True
                errors.append(abs(p[0] - t[0]))
                break
    tp = len(errors)
    return report_from_counts(tp, len(preds) - tp, len(truth) - tp, errors)


def pooled_report(reports: Sequence[EvalReport]) -> EvalReport:
    """Sum counts across runs; the start error is averaged over every matched pair."""
    errors = [e for r in reports for e in r.start_errors_ms]
    return report_from_counts(
        sum(r.true_positives for r in reports),
        sum(r.false_positives for r in reports),
        sum(r.false_negatives for r in reports),
        errors,
    )
