"""Low-rank data adjustment that removes linear dependence on a group variable."""

from .errors import (
    DegenerateDirectionError,
    DegenerateGroupError,
    DegenerateLabelError,
    InputError,
    OrthoGroupsError,
    ParameterError,
    RankError,
    SingularDesignError,
    SpanCollapseError,
)
from .linalg import SvdFactors, residualize, soft_threshold, truncated_svd
from .metrics import (
    aggregate,
    classification_metrics,
    group_dependence,
    reconstruction_error,
    regression_metrics,
)
from .og import GroupDesign, OgModel, encode_group, error_decomposition, fit_og, transform
from .predict import LinearModel, LogisticModel, fit_linear, fit_logistic, predict
from .simulate import GeneratedData, ScenarioSpec, generate, split
from .sog import SogModel, fit_sog, theta_search, update_s

__version__ = "0.1.0"
