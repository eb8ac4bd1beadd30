"""Command-line entry point: validate, render, annotate, stats, anomalies, serve."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__
from .anomalies import compute_deltas, find_anomalies, plot_deltas
from .ellipse import RansacConfig
from .errors import EvannotError
from .events import IngestConfig, parse_events, validate_stream
from .frames import accumulate, frame_to_png, frame_to_sparse_csv
from .pipeline import PipelineConfig, annotate_stream
from .saccades import DetectorConfig
from .store import (
    DEFAULT_MIN_EVENT_THRESHOLD,
    compute_stats,
    load_annotations,
    save_annotations,
)
from .templates import TemplateConfig


def _add_ingest_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--columns", default="txyp", help="event file column order (default txyp)")
    p.add_argument("--delimiter", default=None, help="column delimiter (default: whitespace)")
    p.add_argument("--timestamp-unit-us", type=float, default=1.0,
                   help="microseconds per raw timestamp unit")
    p.add_argument("--sensor-width", type=int, default=346)
    p.add_argument("--sensor-height", type=int, default=260)
    p.add_argument("--out-of-bounds", choices=["error", "drop"], default="error")
    p.add_argument("--ordering", choices=["strict", "sort"], default="strict")


def _add_pipeline_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--window-us", type=int, default=5000, help="accumulation window (default 5000)")
    p.add_argument("--saccade-threshold", type=int, default=150,
                   help="event count above which a frame is a saccade (default 150)")
    p.add_argument("--pupil-radius", type=int, default=10)
    p.add_argument("--kernel-size", type=int, default=31)
    p.add_argument("--roi-size", type=int, default=64)
    p.add_argument("--min-score", type=float, default=None,
                   help="template match acceptance score (default calibrated)")
    p.add_argument("--ransac-iters", type=int, default=1000)
    p.add_argument("--inlier-tol", type=float, default=2.0)
    p.add_argument("--ransac-seed", type=int, default=0)
    p.add_argument("--min-event-threshold", type=int, default=DEFAULT_MIN_EVENT_THRESHOLD,
                   help="per-user review threshold (default 30)")
    p.add_argument("--config", default=None,
                   help="JSON config file; its keys override the flags above")


def _ingest_config(args) -> IngestConfig:
    return IngestConfig(
        columns=args.columns,
        delimiter=args.delimiter,
        timestamp_unit_us=args.timestamp_unit_us,
        sensor_width=args.sensor_width,
        sensor_height=args.sensor_height,
        out_of_bounds=args.out_of_bounds,
        ordering=args.ordering,
    )


def _pipeline_config(args) -> PipelineConfig:
    values = {
        "window_us": args.window_us,
        "saccade_threshold": args.saccade_threshold,
        "pupil_radius": args.pupil_radius,
        "kernel_size": args.kernel_size,
        "roi_size": args.roi_size,
        "min_score": args.min_score,
        "ransac_iters": args.ransac_iters,
        "inlier_tol": args.inlier_tol,
        "ransac_seed": args.ransac_seed,
        "min_event_threshold": args.min_event_threshold,
    }
    if args.config:
        with open(args.config, "r", encoding="utf-8") as fh:
            values.update(json.load(fh))
    template_kwargs = dict(
        pupil_radius_px=values["pupil_radius"],
        kernel_size=values["kernel_size"],
        roi_width=values["roi_size"],
        roi_height=values["roi_size"],
    )
    if values["min_score"] is not None:
        template_kwargs["min_score"] = values["min_score"]
    return PipelineConfig(
        window_us=values["window_us"],
        detector=DetectorConfig(event_threshold=values["saccade_threshold"]),
        template=TemplateConfig(**template_kwargs),
        ransac=RansacConfig(
            iterations=values["ransac_iters"],
            inlier_tol_px=values["inlier_tol"],
            rng_seed=values["ransac_seed"],
        ),
        min_event_threshold=values["min_event_threshold"],
    )


def cmd_validate(args) -> int:
    stream = parse_events(args.events, _ingest_config(args))
    report = validate_stream(stream)
    print(json.dumps(report.as_dict(), indent=2))
    return 0


def cmd_render(args) -> int:
    stream = parse_events(args.events, _ingest_config(args))
    frames = accumulate(stream, args.window_us)
    if not (0 <= args.frame < len(frames)):
        print(f"frame {args.frame} out of range (0..{len(frames) - 1})", file=sys.stderr)
        return 1
    frame = frames[args.frame]
    out = Path(args.output or f"frame_{args.frame:06d}.png")
    frame_to_png(frame, out)
    print(f"wrote {out}")
    if args.sparse_csv:
        csv_path = out.with_suffix(".csv")
        csv_path.write_text(frame_to_sparse_csv(frame))
        print(f"wrote {csv_path}")
    return 0


def cmd_annotate(args) -> int:
    stream = parse_events(args.events, _ingest_config(args))
    config = _pipeline_config(args)
    annotations, report = annotate_stream(stream, config)
    save_annotations(annotations, args.output)
    print(f"wrote {args.output}")
    print(json.dumps(report.as_dict(), indent=2))
    if args.report:
        Path(args.report).write_text(json.dumps(report.as_dict(), indent=2) + "\n")
    return 0


def cmd_stats(args) -> int:
    rows = []
    for path in args.annotations:
        name = Path(path).stem
        stats = compute_stats(load_annotations(path), args.min_event_threshold)
        rows.append((name, stats))
    total = None
    for _, s in rows:
        total = s if total is None else total + s
    rows.append(("Total", total))

    fields = ["frames_analyzed", "annotated_frames", "saccade_count",
              "blink_count", "eye_center_positions"]
    labels = ["Frame analyzed", "Annotated Frame", "Saccade Counts",
              "Blink Counts", "Eye Center Position"]
    name_w = max(len("Statistic"), *(len(n) for n, _ in rows))
    header = "Statistic".ljust(20) + "".join(n.rjust(name_w + 2) for n, _ in rows)
    print(header)
    for label, field_name in zip(labels, fields):
        line = label.ljust(20)
        for _, s in rows:
            line += str(getattr(s, field_name)).rjust(name_w + 2)
        print(line)
    if args.json:
        Path(args.json).write_text(json.dumps(
            {name: s.as_dict() for name, s in rows}, indent=2) + "\n")
        print(f"wrote {args.json}")
    return 0


def cmd_anomalies(args) -> int:
    annotations = load_annotations(args.annotations)
    deltas = compute_deltas(annotations)
    report = find_anomalies(deltas, args.threshold, metric=args.metric,
                            scale_by_gap=args.scale_by_gap)
    body = report.as_dict()
    text = json.dumps(body, indent=2)
    if args.output:
        Path(args.output).write_text(text + "\n")
        print(f"wrote {args.output}")
    else:
        print(text)
    if args.plot:
        plot_deltas(annotations, deltas, report, path=args.plot)
        print(f"wrote {args.plot}")
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .service import ReviewSession, create_app, default_static_dir

    session = ReviewSession.open(args.events, args.annotations,
                                 _pipeline_config(args), _ingest_config(args))
    app = create_app(session, static_dir=args.static_dir or default_static_dir())
    uvicorn.run(app, host=args.host, port=args.port)
    return 0


def cmd_simulate(args) -> int:
    from .events import serialize_events
    from .simulate import SaccadeScript, SimulationConfig, scripted_recording

    config = SimulationConfig(n_frames=args.frames, seed=args.seed)
    third = args.frames // 4
    scripts = [
        SaccadeScript(third, third + 8, (120.0, 130.0), (180.0, 130.0)),
        SaccadeScript(2 * third, 2 * third + 8, (180.0, 130.0), (150.0, 90.0)),
        SaccadeScript(3 * third, 3 * third + 8, (150.0, 90.0), (120.0, 130.0)),
    ]
    stream, truth = scripted_recording(scripts, config)
    serialize_events(stream, args.output)
    print(f"wrote {args.output} ({stream.count} events, "
          f"{len(truth.moving_frames)} moving frames)")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="evannot",
                                     description="Semi-automatic event-camera eye annotation")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="parse an event file and print a summary")
    p.add_argument("events")
    _add_ingest_args(p)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("render", help="render one accumulated frame to PNG")
    p.add_argument("events")
    p.add_argument("--frame", type=int, required=True)
    p.add_argument("--window-us", type=int, default=5000)
    p.add_argument("--output", default=None)
    p.add_argument("--sparse-csv", action="store_true",
                   help="also write the frame's sparse pixel CSV")
    _add_ingest_args(p)
    p.set_defaults(func=cmd_render)

    p = sub.add_parser("annotate", help="run the automatic annotation pipeline")
    p.add_argument("events")
    p.add_argument("--output", required=True, help="annotation CSV to write")
    p.add_argument("--report", default=None, help="optional JSON run report path")
    _add_ingest_args(p)
    _add_pipeline_args(p)
    p.set_defaults(func=cmd_annotate)

    p = sub.add_parser("stats", help="dataset statistics over annotation CSVs")
    p.add_argument("annotations", nargs="+")
    p.add_argument("--min-event-threshold", type=int, default=DEFAULT_MIN_EVENT_THRESHOLD)
    p.add_argument("--json", default=None, help="also write machine-readable stats")
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("anomalies", help="flag inter-frame displacement exceedances")
    p.add_argument("annotations")
    p.add_argument("--threshold", type=float, default=10.0)
    p.add_argument("--metric", choices=["per_axis", "euclidean"], default="per_axis")
    p.add_argument("--scale-by-gap", action="store_true",
                   help="scale the threshold by the frame gap between centers")
    p.add_argument("--output", default=None, help="JSON report path (default: stdout)")
    p.add_argument("--plot", default=None, help="write the delta/anomaly figure (PNG)")
    p.set_defaults(func=cmd_anomalies)

    p = sub.add_parser("serve", help="start the review service")
    p.add_argument("--events", required=True)
    p.add_argument("--annotations", required=True)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--static-dir", default=None, help="review UI assets directory")
    _add_ingest_args(p)
    _add_pipeline_args(p)
    p.set_defaults(func=cmd_serve)

    p = sub.add_parser("simulate", help="generate a synthetic demo recording")
    p.add_argument("--output", required=True)
    p.add_argument("--frames", type=int, default=120)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_simulate)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except EvannotError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
