import logging
import typing as t

import numpy as np
import scipy.linalg

from ..const import JITTER_SCALE
from ..errors import CholeskyFailure

log = logging.getLogger(__name__)


def asymmetry(matrix: np.ndarray) -> float:
    """Largest absolute difference between a matrix and its transpose."""
    if matrix.size == 0:
        return 0.0
    return float(np.max(np.abs(matrix - matrix.T)))


def symmetrize(matrix: np.ndarray) -> np.ndarray:
    return (matrix + matrix.T) / 2.0


def cholesky_lower(
    matrix: np.ndarray,
    name: str = "matrix",
    jitter: bool = True,
) -> np.ndarray:
    """
    Lower Cholesky factor of a symmetric positive definite matrix.

    On failure the factorization is retried once with a diagonal jitter of
    `JITTER_SCALE * trace / dim`.

    Raises:
        CholeskyFailure: When the matrix is numerically indefinite.
    """
    try:
        return scipy.linalg.cholesky(matrix, lower=True, check_finite=False)
    except np.linalg.LinAlgError:
        if not jitter:
            raise CholeskyFailure(f"Cholesky factorization of {name} failed")
    dim = matrix.shape[0]
    shift = JITTER_SCALE * float(np.trace(matrix)) / max(dim, 1)
    log.warning(f"Cholesky of {name} failed, retrying with jitter {shift:.3g}")
    try:
        return scipy.linalg.cholesky(
            matrix + shift * np.eye(dim), lower=True, check_finite=False
        )
    except np.linalg.LinAlgError as e:
        raise CholeskyFailure(
            f"Cholesky factorization of {name} failed after jitter"
        ) from e


def is_positive_definite(matrix: np.ndarray) -> bool:
    try:
        scipy.linalg.cholesky(matrix, lower=True, check_finite=False)
    except np.linalg.LinAlgError:
        return False
    return True


def logdet_from_cholesky(factor: np.ndarray) -> float:
    """log det(L L^T) from the lower factor L."""
    return 2.0 * float(np.sum(np.log(np.diag(factor))))


def spd_logdet(matrix: np.ndarray, name: str = "matrix") -> float:
    if matrix.shape[0] == 0:
        return 0.0
    return logdet_from_cholesky(cholesky_lower(matrix, name=name))


def spd_inverse(matrix: np.ndarray, name: str = "matrix") -> np.ndarray:
    """Inverse of a symmetric positive definite matrix via its Cholesky factor."""
    factor = cholesky_lower(matrix, name=name)
    inverse = scipy.linalg.cho_solve(
        (factor, True), np.eye(matrix.shape[0]), check_finite=False
    )
    return symmetrize(inverse)


def cholesky_update(factor: np.ndarray, x: np.ndarray) -> np.ndarray:
    """
    Rank-one update of a lower Cholesky factor.

    Returns L' with L' L'^T = L L^T + x x^T. Neither argument is modified.
    """
    L = np.array(factor, dtype=float, copy=True)
    x = np.array(x, dtype=float, copy=True)
    nonzero = np.flatnonzero(x)
    if nonzero.size == 0:
        return L
    for k in range(int(nonzero[0]), L.shape[0]):
        d = L[k, k]
        r = np.hypot(d, x[k])
        c = r / d
        s = x[k] / d
        L[k, k] = r
        L[k + 1 :, k] = (L[k + 1 :, k] + s * x[k + 1 :]) / c
        x[k + 1 :] = c * x[k + 1 :] - s * L[k + 1 :, k]
    return L


def cholesky_update_rows(factor: np.ndarray, rows: np.ndarray) -> np.ndarray:
    """Apply one rank-one update per row: L L^T + rows^T rows."""
    out = factor
    for row in rows:
        out = cholesky_update(out, row)
    return out


def block_diagonal(blocks: t.Sequence[np.ndarray]) -> np.ndarray:
    return scipy.linalg.block_diag(*blocks)
