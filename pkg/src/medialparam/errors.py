"""Exception hierarchy shared by every stage of the pipeline."""


class MedialParamError(Exception):
    """Base class for all errors raised by this package."""


class InvalidArgumentError(MedialParamError, ValueError):
    pass


class ValidationError(MedialParamError, ValueError):
    """Input domain is malformed (not closed, not G1, self-intersecting...)."""


class AmbiguousPointError(MedialParamError):
    """Query point lies on a boundary curve."""


class ClearanceError(MedialParamError):
    """A dipole escaped to the wrong side of the boundary.

    Usually means the curve is under-sampled relative to its local feature size.
    """

    def __init__(self, message, sample=None):
        super().__init__(message)
        self.sample = sample


class DegenerateSitesError(MedialParamError):
    pass


class DegenerateInputError(MedialParamError):
    pass


class TopologyError(MedialParamError):
    pass


class FaceStructureError(TopologyError):
    def __init__(self, message, face=None):
        super().__init__(message)
        self.face = face


class SelfIntersectionError(TopologyError):
    def __init__(self, message, index=None):
        super().__init__(message)
        self.index = index


class InversionError(MedialParamError):
    """Inverse bilinear mapping found no root inside the face."""


class PipelineError(MedialParamError):
    """Wraps an error raised inside a named pipeline stage."""

    def __init__(self, stage, cause):
        super().__init__(f"[{stage}] {type(cause).__name__}: {cause}")
        self.stage = stage
        self.cause = cause


class ParseError(MedialParamError, ValueError):
    """Domain file is not valid JSON or does not follow the schema."""


class OrientationWarning(UserWarning):
    """A loop was reversed to match its role (outer CCW, hole CW)."""
