"""Dense linear-algebra kernels: truncated SVD, residualization, soft-thresholding."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any

import numpy as np
import scipy.linalg

from .errors import InputError, ParameterError, RankError, SingularDesignError

# relative pivot size below which a design column is treated as dependent
DESIGN_RANK_TOL = 1e-10


def as_data_matrix(X: Any, name: str = "X", min_rows: int = 2) -> np.ndarray:
    """Validate and return ``X`` as a finite 2-D float array."""
    A = np.asarray(X, dtype=float)
    if A.ndim == 1:
        A = A[:, None]
    if A.ndim != 2:
        raise InputError(f"{name} must be a 2-D matrix, got ndim={A.ndim}")
    if A.shape[0] < min_rows or A.shape[1] < 1:
        raise InputError(f"{name} must have at least {min_rows} rows and 1 column, got {A.shape}")
    if not np.all(np.isfinite(A)):
        raise InputError(f"{name} contains NaN or Inf entries")
    return A


@dataclass(frozen=True)
class SvdFactors:
    """Rank-k factors with ``X ~= V @ diag(D) @ U.T``.

    ``V`` is n x k (left vectors), ``D`` holds the k singular values in
    nonincreasing order and ``U`` is p x k (right vectors).
    """

    V: np.ndarray
    D: np.ndarray
    U: np.ndarray

    @property
    def k(self) -> int:
        return self.D.shape[0]

    @property
    def scores(self) -> np.ndarray:
        """Left vectors scaled by the singular values, ``V @ diag(D)``."""
        return self.V * self.D

    def reconstruct(self) -> np.ndarray:
        return self.scores @ self.U.T

    def truncate(self, k: int) -> "SvdFactors":
        if not 1 <= k <= self.k:
            raise RankError(f"cannot truncate rank-{self.k} factors to k={k}")
        return SvdFactors(self.V[:, :k], self.D[:k], self.U[:, :k])


def _fix_signs(V: np.ndarray, U: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    # largest-|entry| of each U column made positive; first index wins ties
    idx = np.argmax(np.abs(U), axis=0)
    signs = np.sign(U[idx, np.arange(U.shape[1])])
    signs[signs == 0] = 1.0
    return V * signs, U * signs


def truncated_svd(X: Any, k: int) -> SvdFactors:
    """Top-``k`` singular triplets of ``X``.

    Uses LAPACK ``gesvd`` (Householder bidiagonalization followed by
    implicit-shift QR on the bidiagonal). Signs are normalised so the
    largest-magnitude entry of every right singular vector is positive.
    """
    A = as_data_matrix(X, min_rows=1)
    n, p = A.shape
    if not isinstance(k, (int, np.integer)) or not 1 <= k <= min(n, p):
        raise RankError(f"rank k={k} outside [1, {min(n, p)}]")
    V, d, Ut = scipy.linalg.svd(
        A, full_matrices=False, lapack_driver="gesvd", check_finite=False
    )
    V, U = _fix_signs(V[:, :k], Ut[:k].T)
    return SvdFactors(np.ascontiguousarray(V), d[:k].copy(), np.ascontiguousarray(U))


@dataclass(frozen=True)
class DesignBasis:
    """Pivoted QR of a full-column-rank design: ``Z[:, perm] = Q @ R``."""

    Q: np.ndarray
    R: np.ndarray
    perm: np.ndarray

    @property
    def rank(self) -> int:
        return self.Q.shape[1]

    def project(self, A: np.ndarray) -> np.ndarray:
        """Hat-matrix product ``P_Z @ A`` without forming ``P_Z``."""
        return self.Q @ (self.Q.T @ A)

    def residualize(self, A: np.ndarray) -> np.ndarray:
        return A - self.project(A)

    def coefficients(self, A: np.ndarray) -> np.ndarray:
        """Least-squares coefficients of ``A`` regressed on the design."""
        A2 = A if A.ndim == 2 else A[:, None]
        B = scipy.linalg.solve_triangular(self.R, self.Q.T @ A2)
        out = np.empty_like(B)
        out[self.perm] = B
        return out if A.ndim == 2 else out[:, 0]


def design_basis(Z: Any) -> DesignBasis:
    """Rank-revealing QR of a design matrix; raises on rank deficiency."""
    Zm = np.asarray(Z, dtype=float)
    if Zm.ndim == 1:
        Zm = Zm[:, None]
    if Zm.ndim != 2 or Zm.shape[1] == 0:
        raise InputError("design must be a non-empty 2-D matrix")
    if not np.all(np.isfinite(Zm)):
        raise InputError("design contains NaN or Inf entries")
    n, q = Zm.shape
    if q > n:
        raise SingularDesignError(f"design has {q} columns but only {n} rows")
    Q, R, perm = scipy.linalg.qr(Zm, mode="economic", pivoting=True)
    diag = np.abs(np.diag(R))
    if diag[0] == 0 or diag[-1] <= DESIGN_RANK_TOL * diag[0]:
        raise SingularDesignError(
            f"design is rank deficient (pivot ratio {diag[-1] / max(diag[0], 1e-300):.3g})"
        )
    return DesignBasis(Q, R, perm)


def _basis_of(design: Any) -> DesignBasis:
    if isinstance(design, DesignBasis):
        return design
    basis = getattr(design, "basis", None)
    if isinstance(basis, DesignBasis):
        return basis
    return design_basis(getattr(design, "augmented", design))


def residualize(A: Any, design: Any) -> np.ndarray:
    """Return ``(I - P_Z) A`` for the design's column span.

    ``design`` may be a raw design matrix, a :class:`DesignBasis` or a
    ``GroupDesign``; in the last case its augmented (intercept plus
    centred) matrix is used.
    """
    basis = _basis_of(design)
    Am = np.asarray(A, dtype=float)
    if Am.shape[0] != basis.Q.shape[0]:
        raise InputError(f"row mismatch: A has {Am.shape[0]} rows, design has {basis.Q.shape[0]}")
    if not np.all(np.isfinite(Am)):
        raise InputError("A contains NaN or Inf entries")
    return basis.residualize(Am)


def soft_threshold(b: Any, theta: float) -> np.ndarray:
    """Elementwise ``sign(b) * max(|b| - theta, 0)``."""
    if not theta >= 0:
        raise ParameterError(f"threshold must be nonnegative, got {theta}")
    b = np.asarray(b, dtype=float)
    return np.sign(b) * np.maximum(np.abs(b) - theta, 0.0)
