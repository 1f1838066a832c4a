"""Exception hierarchy shared by every module."""


class OrthoGroupsError(ValueError):
    """Base class for all errors raised by this package."""


class InputError(OrthoGroupsError):
    """Non-finite values, bad shapes or mismatched row counts."""


class RankError(OrthoGroupsError):
    """Requested rank outside the admissible range."""


class ParameterError(OrthoGroupsError):
    """A tuning parameter outside its valid domain."""


class SingularDesignError(OrthoGroupsError):
    """The group design matrix is column-rank deficient."""


class DegenerateGroupError(OrthoGroupsError):
    """The group variable has no variation."""


class DegenerateDirectionError(OrthoGroupsError):
    """A direction vector is identically zero."""


class SpanCollapseError(OrthoGroupsError):
    """A vector lies entirely in the span of the constraint basis."""


class DegenerateLabelError(OrthoGroupsError):
    """Binary labels contain a single class."""
