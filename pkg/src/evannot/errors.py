"""Exception types shared across the package."""


class EvannotError(Exception):
    """Base class for all package errors."""


class MalformedLine(EvannotError):
    def __init__(self, line_no, reason=""):
        self.line_no = line_no
        super().__init__(f"malformed event line {line_no}: {reason}")


class NonMonotonicTimestamp(EvannotError):
    def __init__(self, line_no):
        self.line_no = line_no
        super().__init__(f"timestamp decreases at line {line_no}")


class EmptyStream(EvannotError):
    def __init__(self, msg="event stream is empty"):
        super().__init__(msg)


class InvalidConfig(EvannotError):
    pass


class NoSignal(EvannotError):
    """Frame too weak or ambiguous for template matching."""


class DegenerateSample(EvannotError):
    """Minimal conic sample is singular (e.g. collinear points)."""


class NotAnEllipse(EvannotError):
    """Conic does not satisfy the ellipse condition 4ac - b^2 > 0."""


class DegenerateConic(EvannotError):
    """Conic has no real, positive axis lengths."""


class InsufficientPoints(EvannotError):
    pass


class NoModelFound(EvannotError):
    """RANSAC found no ellipse meeting the inlier-ratio requirement."""


class MalformedRow(EvannotError):
    def __init__(self, line_no, reason=""):
        self.line_no = line_no
        super().__init__(f"malformed annotation row {line_no}: {reason}")


class DuplicateFrameIndex(EvannotError):
    def __init__(self, frame_index):
        self.frame_index = frame_index
        super().__init__(f"duplicate frame_index {frame_index}")


class UnknownFrame(EvannotError):
    def __init__(self, frame_index):
        self.frame_index = frame_index
        super().__init__(f"no annotation for frame {frame_index}")


class InvalidPatch(EvannotError):
    pass
