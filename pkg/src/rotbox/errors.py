"""Exception types shared across the package."""


class RotBoxError(Exception):
    """Base class for all rotbox errors."""


class NonPositiveSize(RotBoxError):
    """Box width or height is zero or negative."""


class NonFinite(RotBoxError):
    """A NaN or infinite value was encountered."""


class DegenerateQuad(RotBoxError):
    """Four points do not form a proper convex quadrilateral."""


class AnchorMismatch(RotBoxError):
    """Two encodings do not share the same anchor."""


class EmptyBatch(RotBoxError):
    """Mean reduction requested over an empty batch."""


class ShapeMismatch(RotBoxError):
    """Array batch shapes are inconsistent."""


class MalformedLine(RotBoxError):
    """An annotation or detection line could not be parsed."""

    def __init__(self, line_no: int, reason: str):
        super().__init__(f"line {line_no}: {reason}")
        self.line_no = line_no
        self.reason = reason


class NoGroundTruth(RotBoxError):
    """AP requested for a category with zero ground-truth objects."""


class EmptyInput(RotBoxError):
    """An aggregate was requested over no categories."""
