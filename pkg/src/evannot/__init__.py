"""Semi-automatic pupil annotation for event-camera eye tracking recordings."""

__version__ = "0.1.0"

from .ellipse import (  # noqa: F401
    Conic,
    EllipseFit,
    RansacConfig,
    conic_center,
    conic_to_ellipse_params,
    fit_conic_5pts,
    ransac_fit,
)
from .events import EventStream, IngestConfig, parse_events, validate_stream  # noqa: F401
from .frames import PolarityFrame, accumulate, render_rgb  # noqa: F401
from .pipeline import PipelineConfig, annotate_stream  # noqa: F401
from .saccades import DetectorConfig, SaccadeState, detect_saccades  # noqa: F401
from .store import (  # noqa: F401
    AnnotationStore,
    BlinkState,
    FrameAnnotation,
    compute_stats,
    load_annotations,
    save_annotations,
)
from .templates import TemplateBank, TemplateConfig, build_default_templates, match_pupil  # noqa: F401
