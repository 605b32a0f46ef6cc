"""Command-line pipeline: simulate -> detect -> eval, plus diff and plotdata.

Exit codes: 0 success, 1 usage error (bad flag or invalid setting), 2 data
error (missing/unreadable file, malformed content, unusable streams).
Diagnostics go to stderr as a single line.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from pathlib import Path

from . import __version__
from .core import Source, magnitude, tilt_from_y
from .detector import DetectorConfig, detect_batch
from .diff_estimator import residual_metrics, subtract_streams
from .errors import FingerprintMismatchError, InvalidConfigError, InvalidCutoffError, PostureError
from .evaluate import DEFAULT_MATCH_TOL_MS, eval_events
from .filters import DEFAULT_MAX_GAP_MS, lowpass_stream, resample_align
from .io import (
    EventRecord,
    format_csv,
    format_residual_csv,
    format_series,
    read_csv,
    read_events,
    read_scenario,
    read_truth,
    write_events,
    write_truth,
)
from .scenario import (
    CHEST_SENSOR,
    PHONE_SENSOR,
    Mounting,
    ScenarioKind,
    ScenarioSpec,
    default_mounting,
    render_scenario,
)

EXIT_OK, EXIT_USAGE, EXIT_DATA = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # argparse would exit 2; usage errors are 1 here
        raise UsageError(message)


def _scenario_from_arg(arg: str) -> ScenarioSpec:
    path = Path(arg)
    if path.is_file():
        return read_scenario(path)
    try:
        kind = ScenarioKind.parse(arg)
    except PostureError:
        raise UsageError(f"--scenario {arg!r} is neither a scenario kind nor an existing file")
    return ScenarioSpec(kind=kind)


def cmd_simulate(args) -> int:
    spec = _scenario_from_arg(args.scenario)
    overrides = {}
    if args.duration is not None:
        overrides["duration_s"] = args.duration
    if args.seed is not None:
        overrides["seed"] = args.seed
    spec = replace(spec, **overrides)
    if args.sensor == "phone":
        model, mounting, source = PHONE_SENSOR, Mounting.VEHICLE_FIXED, Source.PHONE
    else:
        model, mounting, source = CHEST_SENSOR, default_mounting(spec.kind), Source.CHEST
    if args.noise_sigma is not None:
        model = replace(model, noise_sigma_g=args.noise_sigma)
    stream, truth = render_scenario(spec, model, mounting, source=source)
    Path(args.out).write_text(format_csv(stream))
    if args.truth:
        write_truth(truth, args.truth)
    print(f"samples={len(stream)}")
    print(f"pickups={len(truth.pickup_intervals)}")
    return EXIT_OK


def _detector_config(args, rate_hz: float) -> DetectorConfig:
    return DetectorConfig(
        threshold_g=args.threshold,
        release_g=args.release,
        min_duration_ms=args.dwell_ms,
        filter_cutoff_hz=args.cutoff_hz,
        rate_hz=args.rate_hz or rate_hz,
    )


def cmd_detect(args) -> int:
    stream = read_csv(args.input, rate_hz=args.rate_hz, source=Source.parse(args.source))
    config = _detector_config(args, stream.rate_hz)
    config.validate()
    events = detect_batch(stream, config)
    fp = config.fingerprint()
    write_events([EventRecord(e, stream.source, fp) for e in events], args.out)
    print(f"events={len(events)}")
    print(f"config_fingerprint={fp}")
    return EXIT_OK


def cmd_diff(args) -> int:
    a = read_csv(args.a, source=Source.CHEST)
    b = read_csv(args.b, source=Source.PHONE)
    if args.lowpass_hz is not None:
        a = lowpass_stream(a, args.lowpass_hz)
        b = lowpass_stream(b, args.lowpass_hz)
    residual = subtract_streams(resample_align(a, b, args.max_gap_ms))
    Path(args.out).write_text(format_residual_csv(residual))
    for line in residual_metrics(residual).as_lines(residual.excluded_count):
        print(line)
    return EXIT_OK


def cmd_eval(args) -> int:
    records = read_events(args.pred)
    prints = {r.config_fingerprint for r in records}
    if len(prints) > 1:
        raise FingerprintMismatchError(
            f"events come from {len(prints)} detector configurations: {sorted(prints)}"
        )
    truth = read_truth(args.truth)
    report = eval_events([r.event for r in records], truth, args.tol_ms)
    for line in report.as_lines():
        print(line)
    return EXIT_OK


def cmd_plotdata(args) -> int:
    stream = read_csv(args.input, rate_hz=args.rate_hz)
    if args.lowpass_hz is not None:
        stream = lowpass_stream(stream, args.lowpass_hz)
    if args.axis == "mag":
        values = [magnitude(s) for s in stream]
    elif args.axis == "tilt":
        values = [tilt_from_y(s.y_g).alpha_deg for s in stream]
    else:
        values = [getattr(s, f"{args.axis}_g") for s in stream]
    name = {"mag": "mag_g", "tilt": "alpha_deg"}.get(args.axis, f"{args.axis}_g")
    Path(args.out).write_text(format_series((s.t_ms for s in stream), values, name))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="vehposture", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("simulate", help="render a synthetic scenario to a sample CSV")
    s.add_argument("--scenario", required=True, help="handcart|bus|mountain|custom or a scenario file")
    s.add_argument("--duration", type=float, help="seconds (overrides the scenario)")
    s.add_argument("--seed", type=int, help="random seed (overrides the scenario)")
    s.add_argument("--sensor", choices=["chest", "phone"], default="chest")
    s.add_argument("--noise-sigma", type=float, help="override sensor noise sigma, G")
    s.add_argument("--out", required=True)
    s.add_argument("--truth", help="also write ground truth JSON here")
    s.set_defaults(func=cmd_simulate)

    d = sub.add_parser("detect", help="detect forward-bend events in a sample CSV")
    d.add_argument("--in", dest="input", required=True)
    d.add_argument("--threshold", type=float, default=DetectorConfig.threshold_g)
    d.add_argument("--release", type=float, default=DetectorConfig.release_g)
    d.add_argument("--dwell-ms", type=int, default=DetectorConfig.min_duration_ms)
    d.add_argument("--cutoff-hz", type=float, default=DetectorConfig.filter_cutoff_hz)
    d.add_argument("--rate-hz", type=float, help="sample rate; inferred from timestamps if omitted")
    d.add_argument("--source", choices=["chest", "phone", "synthetic"], default="chest")
    d.add_argument("--out", required=True)
    d.set_defaults(func=cmd_detect)

    f = sub.add_parser("diff", help="subtract stream b from stream a and report residual")
    f.add_argument("--a", required=True, help="chest CSV (timeline anchor)")
    f.add_argument("--b", required=True, help="phone CSV")
    f.add_argument("--max-gap-ms", type=int, default=DEFAULT_MAX_GAP_MS)
    f.add_argument("--lowpass-hz", type=float, help="low-pass both streams before subtracting")
    f.add_argument("--out", required=True)
    f.set_defaults(func=cmd_diff)

    e = sub.add_parser("eval", help="score event records against ground truth")
    e.add_argument("--pred", required=True)
    e.add_argument("--truth", required=True)
    e.add_argument("--tol-ms", type=int, default=DEFAULT_MATCH_TOL_MS)
    e.set_defaults(func=cmd_eval)

    pd = sub.add_parser("plotdata", help="emit a two-column series for external plotting")
    pd.add_argument("--in", dest="input", required=True)
    pd.add_argument("--axis", choices=["x", "y", "z", "mag", "tilt"], default="y")
    pd.add_argument("--lowpass-hz", type=float)
    pd.add_argument("--rate-hz", type=float)
    pd.add_argument("--out", required=True)
    pd.set_defaults(func=cmd_plotdata)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        print(f"vehposture: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (InvalidConfigError, InvalidCutoffError) as exc:
        print(f"vehposture: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"vehposture: error: {exc.strerror or exc}: {exc.filename}", file=sys.stderr)
        return EXIT_DATA
    except PostureError as exc:
        print(f"vehposture: error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
