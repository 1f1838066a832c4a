"""Closed-form orthogonal-to-groups (OG) adjustment.

The adjusted matrix is the rank-k truncated SVD reconstruction whose
score columns have been residualized on the group design::

    X_tilde = (I - P_Z) V_k D_k U_k^T

Every column of ``X_tilde`` is then orthogonal to the intercept and to the
centred group columns, so any model linear in ``X_tilde`` produces
predictions with zero sample covariance with the group variable.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Literal

import numpy as np

from .errors import DegenerateGroupError, InputError, ParameterError
from .linalg import DesignBasis, SvdFactors, as_data_matrix, design_basis, truncated_svd

Scheme = Literal["auto", "categorical", "numeric"]

DEFAULT_MAX_RANK = 30


@dataclass(frozen=True)
class GroupDesign:
    """A nuisance variable and its augmented design ``[1, centred columns]``.

    Attributes
    ----------
    raw : ndarray
        The group values as supplied (n-vector or n x q).
    augmented : ndarray
        n x (q+1) design: intercept column followed by centred numeric or
        indicator columns.
    scheme : str
        ``"categorical"`` or ``"numeric"``.
    levels : tuple
        Category levels in encoding order (empty for numeric input). The
        first level is the reference and gets no indicator column.
    """

    raw: np.ndarray
    augmented: np.ndarray
    scheme: str
    levels: tuple = ()
    basis: DesignBasis = field(repr=False, compare=False, default=None)

    @property
    def n(self) -> int:
        return self.augmented.shape[0]

    @property
    def rank(self) -> int:
        return self.augmented.shape[1]

    def project(self, A: np.ndarray) -> np.ndarray:
        return self.basis.project(A)

    def residualize(self, A: np.ndarray) -> np.ndarray:
        return self.basis.residualize(A)


def _looks_numeric(values: np.ndarray) -> bool:
    if values.dtype.kind in "biuf":
        return True
    try:
        values.astype(float)
    except (TypeError, ValueError):
        return False
    return True


def encode_group(raw: Any, scheme: Scheme = "auto") -> GroupDesign:
    """Build the augmented design for a group variable.

    Categorical input with L levels yields L-1 centred indicator columns;
    numeric input is centred column by column. An intercept column is
    always prepended. ``scheme="auto"`` treats numeric-looking input as
    numeric and anything else (strings, objects) as categorical.
    """
    values = np.asarray(raw)
    if values.ndim == 0 or values.ndim > 2:
        raise InputError("group variable must be a vector or an n x q matrix")
    n = values.shape[0]
    if n < 2:
        raise InputError("group variable needs at least 2 rows")
    if scheme == "auto":
        scheme = "numeric" if _looks_numeric(values) else "categorical"

    levels: tuple = ()
    if scheme == "numeric":
        cols = values.astype(float)
        if cols.ndim == 1:
            cols = cols[:, None]
        if not np.all(np.isfinite(cols)):
            raise InputError("numeric group variable contains NaN or Inf")
        spread = np.ptp(cols, axis=0)
        if np.any(spread == 0):
            raise DegenerateGroupError(
                f"group column(s) {np.flatnonzero(spread == 0).tolist()} are constant"
            )
        centred = cols - cols.mean(axis=0)
    elif scheme == "categorical":
        if values.ndim != 1:
            if values.shape[1] != 1:
                raise InputError("categorical encoding expects a single group column")
            values = values[:, 0]
        labels = values.astype(str) if values.dtype.kind not in "biuf" else values
        levels_arr, codes = np.unique(labels, return_inverse=True)
        if levels_arr.shape[0] < 2:
            raise DegenerateGroupError("categorical group variable has a single level")
        levels = tuple(levels_arr.tolist())
        indicators = (codes[:, None] == np.arange(1, levels_arr.shape[0])[None, :]).astype(float)
        centred = indicators - indicators.mean(axis=0)
    else:
        raise ParameterError(f"unknown encoding scheme {scheme!r}")

    augmented = np.column_stack([np.ones(n), centred])
    return GroupDesign(
        raw=np.asarray(raw),
        augmented=augmented,
        scheme=scheme,
        levels=levels,
        basis=design_basis(augmented),
    )


def as_group_design(Z: Any, scheme: Scheme = "auto") -> GroupDesign:
    return Z if isinstance(Z, GroupDesign) else encode_group(Z, scheme)


@dataclass(frozen=True)
class OgModel:
    """Fitted OG adjustment.

    ``lambda_`` holds the (q+1) x k least-squares coefficients of the SVD
    scores on the augmented design; ``gap`` is ``||P_Z V_k D_k||_F^2``.
    """

    factors: SvdFactors
    lambda_: np.ndarray
    x_tilde: np.ndarray
    err_og: float
    err_svd: float
    gap: float
    design: GroupDesign = field(repr=False)

    @property
    def k(self) -> int:
        return self.factors.k

    @property
    def scores(self) -> np.ndarray:
        """Residualized scores ``(I - P_Z) V_k D_k``."""
        return self.factors.scores - self.design.augmented @ self.lambda_

    def identity_residual(self) -> float:
        """``|(err_og - err_svd) - gap|``; zero up to rounding."""
        return abs((self.err_og - self.err_svd) - self.gap)


def default_rank(n: int, p: int) -> int:
    return min(n, p, DEFAULT_MAX_RANK)


def fit_og(X: Any, Z: Any, k: int | None = None, scheme: Scheme = "auto") -> OgModel:
    """Fit the OG adjustment of ``X`` against group ``Z`` at rank ``k``.

    ``Z`` may be a :class:`GroupDesign` or raw group values, which are
    encoded with :func:`encode_group`.
    """
    X = as_data_matrix(X)
    design = as_group_design(Z, scheme)
    n, p = X.shape
    if design.n != n:
        raise InputError(f"X has {n} rows but the group design has {design.n}")
    if k is None:
        k = default_rank(n, p)
    factors = truncated_svd(X, k)
    scores = factors.scores
    lam = design.basis.coefficients(scores)
    fitted = design.project(scores)
    x_tilde = (scores - fitted) @ factors.U.T
    err_og = float(np.sum((X - x_tilde) ** 2))
    err_svd = float(np.sum((X - factors.reconstruct()) ** 2))
    gap = float(np.sum(fitted**2))
    return OgModel(factors, lam, x_tilde, err_og, err_svd, gap, design)


def error_decomposition(X: Any, model: OgModel) -> tuple[float, float, float]:
    """Recompute ``(err_og, err_svd, gap)`` for ``model`` against ``X``.

    ``err_og - err_svd == gap`` holds exactly in exact arithmetic because
    the residual of the truncated SVD is orthogonal to every right
    singular vector kept.
    """
    X = as_data_matrix(X)
    if X.shape != model.x_tilde.shape:
        raise InputError(f"X has shape {X.shape}, model was fitted on {model.x_tilde.shape}")
    err_og = float(np.sum((X - model.x_tilde) ** 2))
    err_svd = float(np.sum((X - model.factors.reconstruct()) ** 2))
    gap = float(np.sum(model.design.project(model.factors.scores) ** 2))
    return err_og, err_svd, gap


def transform(
    model: OgModel,
    X_new: Any,
    Z_new: Any,
    mode: Literal["refit", "basis_reuse"] = "refit",
) -> np.ndarray:
    """Adjust a new block of rows.

    ``refit`` runs the full procedure on the new rows with their own group
    labels. ``basis_reuse`` projects the new rows on the fitted right
    singular vectors, residualizes those scores on the new design and maps
    back, so the output lives in the training basis.
    """
    X_new = as_data_matrix(X_new)
    p = model.factors.U.shape[0]
    if X_new.shape[1] != p:
        raise InputError(f"X_new has {X_new.shape[1]} columns, model expects {p}")
    design = as_group_design(Z_new, model.design.scheme)
    if design.n != X_new.shape[0]:
        raise InputError("X_new and Z_new row counts differ")
    if mode == "refit":
        return fit_og(X_new, design, model.k).x_tilde
    if mode == "basis_reuse":
        U = model.factors.U
        return design.residualize(X_new @ U) @ U.T
    raise ParameterError(f"unknown transform mode {mode!r}")


def constraint_violation(x_tilde: np.ndarray, design: GroupDesign) -> np.ndarray:
    """Per design column, the largest ``|z_j^T x|`` over columns of ``x_tilde``."""
    return np.max(np.abs(design.augmented.T @ x_tilde), axis=1)
