"""Sparse orthogonal-to-groups (SOG) decomposition.

Components are extracted one at a time. For component j the pair
``(s_j, u_j)`` maximises ``s^T X u`` subject to ``||u||_2 <= 1``,
``||u||_1 <= t``, ``||s||_2 <= 1``, ``s`` orthogonal to the group design
and to ``s_1 .. s_{j-1}``. The maximisation alternates two closed-form
updates: a projected-and-normalised ``s`` for fixed ``u``, and a
soft-thresholded ``u`` for fixed ``s``.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Any, Literal

import numpy as np

from .errors import (
    DegenerateDirectionError,
    InputError,
    ParameterError,
    RankError,
    SpanCollapseError,
)
from .linalg import as_data_matrix, soft_threshold, truncated_svd
from .og import GroupDesign, Scheme, as_group_design

log = logging.getLogger(__name__)

THETA_BISECTION_STEPS = 100
SPAN_COLLAPSE_TOL = 1e-12


def _l1_ratio(b: np.ndarray, theta: float) -> float:
    st = soft_threshold(b, theta)
    nrm = np.linalg.norm(st)
    return np.inf if nrm == 0 else float(np.abs(st).sum() / nrm)


def theta_search(b: Any, t: float) -> tuple[float, np.ndarray]:
    """Solve ``max b^T u  s.t. ||u||_2 <= 1, ||u||_1 <= t``.

    Returns the threshold ``theta`` and ``u = S_theta(b) / ||S_theta(b)||_2``.
    ``theta`` is zero when the normalised ``b`` already satisfies the l1
    bound, otherwise it is found by bisection on ``[0, max|b|]`` so that
    ``||u||_1 = t``. At ``t = 1`` the answer is the signed unit vector on
    the largest ``|b_i|`` (lowest index on ties).
    """
    b = np.asarray(b, dtype=float)
    if not t >= 1:
        raise ParameterError(f"l1 bound t must be >= 1, got {t}")
    bmax = float(np.max(np.abs(b))) if b.size else 0.0
    if bmax == 0.0:
        raise DegenerateDirectionError("cannot threshold an all-zero vector")

    u = b / np.linalg.norm(b)
    if np.abs(u).sum() <= t:
        return 0.0, u

    i = int(np.argmax(np.abs(b)))
    n_ties = int(np.count_nonzero(np.abs(b) == bmax))
    if t * t <= n_ties * (1 + 1e-15):
        # l1/l2 of any thresholded b is >= sqrt(n_ties); only a one-hot fits
        u = np.zeros_like(b)
        u[i] = np.sign(b[i])
        second = np.max(np.abs(np.delete(b, i))) if b.size > 1 else 0.0
        return float(second), u

    lo, hi = 0.0, bmax
    for _ in range(THETA_BISECTION_STEPS):
        mid = 0.5 * (lo + hi)
        if _l1_ratio(b, mid) > t:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 1e-15 * bmax:
            break
    # hi keeps ||u||_1 <= t
    st = soft_threshold(b, hi)
    return hi, st / np.linalg.norm(st)


def _orthonormal_columns(prev: Any, n: int) -> np.ndarray:
    if prev is None:
        return np.zeros((n, 0))
    P = np.asarray(prev, dtype=float)
    if P.ndim == 1:
        P = P[:, None]
    if P.shape[0] != n and P.shape[1] == n:
        P = P.T
    if P.shape[0] != n:
        raise InputError("deflation basis has the wrong number of rows")
    return P


def update_s(a: Any, design: GroupDesign | None, previous: Any = None) -> np.ndarray:
    """Score update: deflate, residualize on the design, normalise.

    ``previous`` holds the already-extracted unit score vectors as columns
    (n x m). Raises :class:`SpanCollapseError` when nothing is left of
    ``a`` after the projections.
    """
    a = np.asarray(a, dtype=float)
    if a.ndim != 1 or not np.all(np.isfinite(a)):
        raise InputError("a must be a finite vector")
    n = a.shape[0]
    S = _orthonormal_columns(previous, n)
    if design is not None and design.n != n:
        raise InputError(f"a has {n} entries, the design has {design.n} rows")
    a_norm = np.linalg.norm(a)

    r = a
    # second pass restores orthogonality lost to cancellation
    for _ in range(2):
        if S.shape[1]:
            r = r - S @ (S.T @ r)
        if design is not None:
            r = design.residualize(r)
    r_norm = np.linalg.norm(r)
    if a_norm == 0 or r_norm <= SPAN_COLLAPSE_TOL * a_norm:
        raise SpanCollapseError("vector lies in the span of the group design and previous scores")
    return r / r_norm


@dataclass(frozen=True)
class SogModel:
    """Fitted SOG decomposition with ``x_tilde = S @ U.T``.

    ``S`` holds the scaled scores ``d_j s_j`` as columns, ``U`` the sparse
    loadings as columns. ``objective[j]`` records ``s^T X u`` after every
    full iteration of component j.
    """

    s_vectors: np.ndarray
    U: np.ndarray
    d: np.ndarray
    t: float
    x_tilde: np.ndarray
    n_iter: tuple[int, ...]
    converged: tuple[bool, ...]
    objective: tuple[np.ndarray, ...] = field(repr=False)
    truncated: bool = False
    design: GroupDesign | None = field(repr=False, default=None)

    @property
    def S(self) -> np.ndarray:
        return self.s_vectors * self.d

    @property
    def k(self) -> int:
        return self.d.shape[0]

    def partial_reconstruction(self, k: int) -> np.ndarray:
        """Reconstruction from the first ``k`` components only."""
        return (self.s_vectors[:, :k] * self.d[:k]) @ self.U[:, :k].T


def _residual_matrix(X: np.ndarray, design: GroupDesign | None, S: np.ndarray) -> np.ndarray:
    R = design.residualize(X) if design is not None else X
    if S.shape[1]:
        R = R - S @ (S.T @ R)
    return R


def fit_sog(
    X: Any,
    Z: Any,
    k: int,
    t: float | None = None,
    tol: float = 1e-7,
    max_iter: int = 500,
    init: Literal["svd", "random"] = "svd",
    seed: int | None = None,
    scheme: Scheme = "auto",
) -> SogModel:
    """Greedy rank-``k`` SOG fit.

    Parameters
    ----------
    X : array_like, n x p
    Z : GroupDesign, raw group values, or None
        ``None`` drops the group constraint (plain sparse decomposition).
    k : int
        Number of components, at most ``min(n, p) - rank(Z_aug)``.
    t : float, optional
        l1 bound on every loading vector, ``t >= 1``. Defaults to
        ``sqrt(p)``, where the bound is inactive.
    tol, max_iter
        Stop when the largest absolute change in ``(u_j, s_j)`` falls below
        ``tol`` or after ``max_iter`` iterations. Non-convergence is
        recorded in ``converged``, not raised.
    init : {"svd", "random"}
        Start each component from the leading right singular vector of the
        deflated, residualized data, or from a seeded random unit vector.

    If a component collapses into the span of the constraints, the
    components completed so far are returned with ``truncated=True``.
    """
    X = as_data_matrix(X)
    n, p = X.shape
    design = None if Z is None else as_group_design(Z, scheme)
    if design is not None and design.n != n:
        raise InputError(f"X has {n} rows but the group design has {design.n}")
    zrank = 0 if design is None else design.rank
    if not isinstance(k, (int, np.integer)) or not 1 <= k <= min(n, p) - zrank:
        raise RankError(f"k={k} outside [1, {min(n, p) - zrank}]")
    if t is None:
        t = float(np.sqrt(p))
    if not t >= 1:
        raise ParameterError(f"l1 bound t must be >= 1, got {t}")
    if tol <= 0 or max_iter < 1:
        raise ParameterError("tol must be positive and max_iter at least 1")
    rng = np.random.default_rng(seed) if init == "random" else None
    if init not in ("svd", "random"):
        raise ParameterError(f"unknown init {init!r}")

    s_list: list[np.ndarray] = []
    u_list: list[np.ndarray] = []
    d_list: list[float] = []
    iters: list[int] = []
    conv: list[bool] = []
    objs: list[np.ndarray] = []
    truncated = False

    for j in range(k):
        S_prev = np.column_stack(s_list) if s_list else np.zeros((n, 0))
        if init == "svd":
            R = _residual_matrix(X, design, S_prev)
            if np.linalg.norm(R) == 0:
                truncated = True
                break
            u = truncated_svd(R, 1).U[:, 0]
        else:
            u = rng.standard_normal(p)
            u /= np.linalg.norm(u)

        try:
            s = update_s(X @ u, design, S_prev)
            history = []
            converged = False
            it = 0
            for it in range(1, max_iter + 1):
                _, u_new = theta_search(X.T @ s, t)
                s_new = update_s(X @ u_new, design, S_prev)
                history.append(float(s @ X @ u_new))
                change = max(np.max(np.abs(u_new - u)), np.max(np.abs(s_new - s)))
                u, s = u_new, s_new
                if change < tol:
                    converged = True
                    break
        except SpanCollapseError:
            log.warning("component %d collapsed into the constraint span; stopping at rank %d", j + 1, j)
            truncated = True
            break

        d = float(s @ X @ u)
        if d <= 0:
            u = -u
            d = -d
        s_list.append(s)
        u_list.append(u)
        d_list.append(d)
        iters.append(it)
        conv.append(converged)
        objs.append(np.asarray(history))
        if not converged:
            log.info("component %d did not converge in %d iterations", j + 1, max_iter)

    s_mat = np.column_stack(s_list) if s_list else np.zeros((n, 0))
    u_mat = np.column_stack(u_list) if u_list else np.zeros((p, 0))
    d_arr = np.asarray(d_list, dtype=float)
    x_tilde = (s_mat * d_arr) @ u_mat.T
    return SogModel(
        s_vectors=s_mat,
        U=u_mat,
        d=d_arr,
        t=float(t),
        x_tilde=x_tilde,
        n_iter=tuple(iters),
        converged=tuple(conv),
        objective=tuple(objs),
        truncated=truncated,
        design=design,
    )


def transform(
    model: SogModel,
    X_new: Any,
    Z_new: Any,
    mode: Literal["refit", "basis_reuse"] = "refit",
    **fit_kwargs,
) -> np.ndarray:
    """Adjust new rows, either by refitting or by reusing the fitted loadings.

    In ``basis_reuse`` mode the new rows are regressed on the loading
    vectors (which need not be orthogonal), the resulting scores are
    residualized on the new group design, and mapped back through ``U``.
    """
    X_new = as_data_matrix(X_new)
    p = model.U.shape[0]
    if X_new.shape[1] != p:
        raise InputError(f"X_new has {X_new.shape[1]} columns, model expects {p}")
    scheme = model.design.scheme if model.design is not None else "auto"
    design = None if Z_new is None else as_group_design(Z_new, scheme)
    if mode == "refit":
        kwargs = dict(t=model.t)
        kwargs.update(fit_kwargs)
        return fit_sog(X_new, design, model.k, **kwargs).x_tilde
    if mode == "basis_reuse":
        coef = np.linalg.lstsq(model.U, X_new.T, rcond=None)[0].T
        if design is not None:
            coef = design.residualize(coef)
        return coef @ model.U.T
    raise ParameterError(f"unknown transform mode {mode!r}")
