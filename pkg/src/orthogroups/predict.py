"""Learners used to evaluate adjusted data: OLS and ridge IRLS logistic regression."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Any

import numpy as np
import scipy.linalg
from scipy.special import expit

from .errors import DegenerateLabelError, InputError, ParameterError
from .linalg import as_data_matrix

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class LinearModel:
    weights: np.ndarray
    intercept: float
    fitted_on_rank: int


@dataclass(frozen=True)
class LogisticModel:
    weights: np.ndarray
    intercept: float
    converged: bool
    threshold: float
    n_iter: int = 0


def _xy(X: Any, Y: Any) -> tuple[np.ndarray, np.ndarray]:
    X = as_data_matrix(X)
    Y = np.asarray(Y, dtype=float).ravel()
    if Y.shape[0] != X.shape[0]:
        raise InputError(f"X has {X.shape[0]} rows but Y has {Y.shape[0]} entries")
    if not np.all(np.isfinite(Y)):
        raise InputError("Y contains NaN or Inf")
    return X, Y


def fit_linear(X: Any, Y: Any) -> LinearModel:
    """Least squares with intercept; minimum-norm weights under collinearity.

    The intercept is left unpenalised by solving on centred data.
    """
    X, Y = _xy(X, Y)
    xm, ym = X.mean(axis=0), Y.mean()
    # LAPACK's default cutoff (machine eps) keeps roundoff directions of
    # exactly low-rank inputs such as adjusted reconstructions
    cond = np.finfo(float).eps * max(X.shape)
    w, _, rank, _ = scipy.linalg.lstsq(X - xm, Y - ym, cond=cond, lapack_driver="gelsd")
    return LinearModel(w, float(ym - xm @ w), int(rank))


def fit_logistic(X: Any, Y: Any, ridge: float | None = None, max_iter: int = 100, tol: float = 1e-8) -> LogisticModel:
    """Ridge-penalised logistic regression by damped Newton (IRLS).

    The penalty ``ridge/2 * ||w||^2`` excludes the intercept; the default
    ``ridge`` is ``1e-6 * n``. The decision threshold is set to the
    training prevalence of the positive class.
    """
    X, Y = _xy(X, Y)
    if not np.all((Y == 0) | (Y == 1)):
        raise InputError("labels must be 0/1")
    prevalence = float(Y.mean())
    if prevalence in (0.0, 1.0):
        raise DegenerateLabelError("both classes must be present")
    n, p = X.shape
    if ridge is None:
        ridge = 1e-6 * n
    if ridge < 0:
        raise ParameterError("ridge must be nonnegative")

    A = np.column_stack([np.ones(n), X])
    pen = np.full(p + 1, ridge)
    pen[0] = 0.0
    beta = np.zeros(p + 1)
    beta[0] = np.log(prevalence / (1 - prevalence))

    def objective(b):
        eta = A @ b
        return float(np.sum(np.logaddexp(0, eta) - Y * eta) + 0.5 * np.sum(pen * b * b))

    obj = objective(beta)
    converged = False
    it = 0
    for it in range(1, max_iter + 1):
        mu = expit(A @ beta)
        w = mu * (1 - mu)
        grad = A.T @ (Y - mu) - pen * beta
        H = (A * w[:, None]).T @ A + np.diag(pen)
        # tiny jitter keeps H invertible when the ridge is zero and X is rank deficient
        H[np.diag_indices_from(H)] += 1e-12 * max(1.0, np.trace(H) / (p + 1))
        try:
            step = scipy.linalg.solve(H, grad, assume_a="pos")
        except (np.linalg.LinAlgError, scipy.linalg.LinAlgError):
            step = scipy.linalg.lstsq(H, grad)[0]
        scale = 1.0
        while True:
            cand = beta + scale * step
            cand_obj = objective(cand)
            if cand_obj <= obj + 1e-12 * abs(obj) or scale < 1e-10:
                break
            scale *= 0.5
        change = float(np.max(np.abs(cand - beta)))
        beta, obj = cand, cand_obj
        if change < tol:
            converged = True
            break
    if not converged:
        log.info("logistic IRLS stopped after %d iterations without converging", max_iter)
    return LogisticModel(beta[1:].copy(), float(beta[0]), converged, prevalence, it)


def decision_function(model: LinearModel | LogisticModel, X_new: Any) -> np.ndarray:
    """Linear index ``X_new @ w + b``."""
    X_new = as_data_matrix(X_new, name="X_new", min_rows=1)
    if X_new.shape[1] != model.weights.shape[0]:
        raise InputError(f"X_new has {X_new.shape[1]} columns, model expects {model.weights.shape[0]}")
    return X_new @ model.weights + model.intercept


def predict(model: LinearModel | LogisticModel, X_new: Any):
    """Predictions for new rows.

    Linear models return the fitted values. Logistic models return a pair
    ``(probabilities, labels)`` where ``labels = probabilities >= threshold``.
    """
    eta = decision_function(model, X_new)
    if isinstance(model, LogisticModel):
        proba = expit(eta)
        return proba, (proba >= model.threshold).astype(int)
    return eta
