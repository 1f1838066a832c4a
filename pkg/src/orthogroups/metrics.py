"""Regression, classification, reconstruction and group-dependence metrics."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, NamedTuple

import numpy as np
from scipy.stats import rankdata

from .errors import InputError


@dataclass(frozen=True)
class MetricReport:
    name: str
    value: float
    n_splits: int
    std_dev: float


def aggregate(name: str, values: Any) -> MetricReport:
    """Mean and sample standard deviation (n-1 denominator) across splits."""
    v = np.asarray(values, dtype=float).ravel()
    if v.size == 0:
        raise InputError("nothing to aggregate")
    sd = float(np.std(v, ddof=1)) if v.size > 1 else 0.0
    return MetricReport(name, float(v.mean()), int(v.size), sd)


def _pair(a: Any, b: Any) -> tuple[np.ndarray, np.ndarray]:
    a = np.asarray(a, dtype=float).ravel()
    b = np.asarray(b, dtype=float).ravel()
    if a.shape != b.shape:
        raise InputError(f"length mismatch: {a.shape[0]} vs {b.shape[0]}")
    if a.size == 0:
        raise InputError("empty input")
    return a, b


def regression_metrics(y_hat: Any, y: Any) -> dict[str, float]:
    """RMSE, MAE and median absolute error (even counts use the midpoint)."""
    y_hat, y = _pair(y_hat, y)
    r = np.abs(y_hat - y)
    return {
        "rmse": float(np.sqrt(np.mean(r**2))),
        "mae": float(np.mean(r)),
        "mdae": float(np.median(r)),
    }


def auc_score(scores: Any, labels: Any) -> float:
    """Mann-Whitney AUC with average ranks for ties."""
    scores, labels = _pair(scores, labels)
    pos = labels == 1
    n_pos, n_neg = int(pos.sum()), int((~pos).sum())
    if n_pos == 0 or n_neg == 0:
        raise InputError("AUC needs both classes")
    ranks = rankdata(scores)
    return float((ranks[pos].sum() - n_pos * (n_pos + 1) / 2) / (n_pos * n_neg))


def classification_metrics(scores: Any, labels: Any, threshold: float) -> dict[str, float]:
    """ACC, AUC, TPR, TNR, PPV and NPV at ``score >= threshold``.

    Metrics whose denominator is zero (e.g. AUC with a single class) are
    left out of the returned dict.
    """
    scores, labels = _pair(scores, labels)
    if not np.all((labels == 0) | (labels == 1)):
        raise InputError("labels must be 0/1")
    pred = scores >= threshold
    pos = labels == 1
    tp = int(np.sum(pred & pos))
    tn = int(np.sum(~pred & ~pos))
    fp = int(np.sum(pred & ~pos))
    fn = int(np.sum(~pred & pos))
    out = {"acc": (tp + tn) / labels.size}
    if tp + fn:
        out["tpr"] = tp / (tp + fn)
    if tn + fp:
        out["tnr"] = tn / (tn + fp)
    if tp + fp:
        out["ppv"] = tp / (tp + fp)
    if tn + fn:
        out["npv"] = tn / (tn + fn)
    if tp + fn and tn + fp:
        out["auc"] = auc_score(scores, labels)
    return {k: float(v) for k, v in out.items()}


class Dependence(NamedTuple):
    corr: float
    degenerate: bool


def group_dependence(y_hat: Any, z: Any) -> Dependence:
    """Pearson correlation of predictions with the group variable.

    Constant inputs give ``corr = 0`` with ``degenerate = True``.
    """
    y_hat, z = _pair(y_hat, z)
    yc = y_hat - y_hat.mean()
    zc = z - z.mean()
    sy, sz = np.linalg.norm(yc), np.linalg.norm(zc)
    # spread below rounding of the mean counts as constant
    scale_y = 1e-13 * max(1.0, np.abs(y_hat).max()) * np.sqrt(y_hat.size)
    if sy <= scale_y or sz == 0:
        return Dependence(0.0, True)
    return Dependence(float(yc @ zc / (sy * sz)), False)


def reconstruction_error(X: Any, X_tilde: Any) -> float:
    """Frobenius norm ``||X - X_tilde||_F`` (not squared)."""
    X = np.asarray(X, dtype=float)
    X_tilde = np.asarray(X_tilde, dtype=float)
    if X.shape != X_tilde.shape:
        raise InputError(f"shape mismatch: {X.shape} vs {X_tilde.shape}")
    return float(np.linalg.norm(X - X_tilde))
