"""End-to-end automatic annotation: events -> frames -> states -> centers."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .ellipse import RansacConfig, ransac_fit
from .errors import EvannotError, InsufficientPoints, NoModelFound, NoSignal
from .events import EventStream
from .frames import DEFAULT_WINDOW_US, accumulate
from .saccades import DetectorConfig, count_saccade_runs, detect_saccades
from .store import DEFAULT_MIN_EVENT_THRESHOLD, FrameAnnotation, Source
from .templates import TemplateConfig, build_default_templates, match_pupil, roi_points


@dataclass
class PipelineConfig:
    window_us: int = DEFAULT_WINDOW_US
    detector: DetectorConfig = field(default_factory=DetectorConfig)
    template: TemplateConfig = field(default_factory=TemplateConfig)
    ransac: RansacConfig = field(default_factory=RansacConfig)
    min_event_threshold: int = DEFAULT_MIN_EVENT_THRESHOLD
    anomaly_threshold_px: float = 10.0

    def __post_init__(self):
        if self.window_us <= 0:
            raise ValueError("window_us must be positive")
        if self.min_event_threshold <= 0:
            raise ValueError("min_event_threshold must be positive")
        if self.anomaly_threshold_px <= 0:
            raise ValueError("anomaly_threshold_px must be positive")


@dataclass
class RunReport:
    frame_count: int = 0
    active_frames: int = 0
    saccade_count: int = 0
    centers_found: int = 0
    match_failures: int = 0
    fit_failures: int = 0

    def as_dict(self) -> dict:
        return dict(self.__dict__)


def annotate_stream(stream: EventStream,
                    config: Optional[PipelineConfig] = None
                    ) -> tuple[list[FrameAnnotation], RunReport]:
    """Run the full automatic pipeline over one recording.

    Active frames get a template match followed by a RANSAC ellipse fit on
    the ROI's active pixels; frames where either stage fails keep their
    saccade state but no center.  Inactive frames get NONE states and no
    center.  Deterministic for a fixed RANSAC seed.
    """
    config = config or PipelineConfig()
    frames = accumulate(stream, config.window_us)
    states = detect_saccades(frames, config.detector)
    bank = build_default_templates(config.template)

    report = RunReport(frame_count=len(frames), saccade_count=count_saccade_runs(states))
    annotations = []
    for frame, state in zip(frames, states):
        center = None
        if state.active:
            report.active_frames += 1
            try:
                match = match_pupil(frame, bank, config.template)
            except NoSignal:
                report.match_failures += 1
            else:
                pts = roi_points(frame, match.roi)
                try:
                    fit = ransac_fit(pts, config.ransac)
                except (InsufficientPoints, NoModelFound, EvannotError):
                    report.fit_failures += 1
                else:
                    cx, cy = fit.center
                    if 0 <= cx < stream.sensor_width and 0 <= cy < stream.sensor_height:
                        center = (round(cx, 2), round(cy, 2))
                        report.centers_found += 1
                    else:
                        report.fit_failures += 1
        annotations.append(FrameAnnotation(
            frame_index=frame.index,
            t_start_us=frame.t_start_us,
            event_count=frame.total_events,
            center=center,
            saccade_state=state,
            source=Source.AUTO,
            reviewed=False,
        ))
    return annotations, report
