"""Row-stochastic matrix calculus.

For a stochastic matrix ``F``, ``floor(F)`` is the row of column minima and
``bracket(F) = F - 1 floor(F)`` measures how far ``F`` is from a rank-one
(consensus) matrix; ``inf_norm(bracket(F)) == 1 - floor(F).sum()``.
"""

from __future__ import annotations

from typing import NamedTuple, Sequence

import numpy as np

from .errors import DimensionError

__all__ = [
    "ROW_SUM_TOL",
    "PRODUCT_ROW_SUM_TOL",
    "POSITIVITY_THRESHOLD",
    "validate_stochastic",
    "is_stochastic",
    "random_stochastic",
    "floor",
    "bracket",
    "inf_norm",
    "FloorTrace",
    "product_floor_limit",
    "check_strongly_rooted_matrix",
    "positive_columns",
]

ROW_SUM_TOL = 1e-12
PRODUCT_ROW_SUM_TOL = 1e-10
# only used when no structural support pattern is available
POSITIVITY_THRESHOLD = 1e-15


def validate_stochastic(F, tol: float = ROW_SUM_TOL) -> np.ndarray:
    """Return ``F`` as a float array, raising ``ValueError`` unless it is row-stochastic."""
    F = np.asarray(F, dtype=float)
    if F.ndim != 2 or F.shape[0] != F.shape[1]:
        raise DimensionError(f"stochastic matrix must be square, got shape {F.shape}")
    if not np.all(np.isfinite(F)):
        raise ValueError("stochastic matrix has non-finite entries")
    if np.any(F < 0):
        raise ValueError(f"stochastic matrix has a negative entry ({F.min():.3g})")
    dev = np.abs(F.sum(axis=1) - 1.0).max()
    if dev > tol:
        raise ValueError(f"row sums deviate from 1 by {dev:.3g} (tolerance {tol:g})")
    return F


def is_stochastic(F, tol: float = ROW_SUM_TOL) -> bool:
    try:
        validate_stochastic(F, tol)
    except ValueError:
        return False
    return True


def random_stochastic(n: int, rng: np.random.Generator, sparsity: float = 0.0) -> np.ndarray:
    """Random row-stochastic ``n x n`` matrix.

    With ``sparsity > 0`` each off-diagonal entry is zeroed with that
    probability, so structural zeros (and hence zero column minima) occur.
    """
    F = rng.random((n, n))
    if sparsity > 0:
        mask = rng.random((n, n)) < sparsity
        np.fill_diagonal(mask, False)
        F[mask] = 0.0
    return F / F.sum(axis=1, keepdims=True)


def floor(F) -> np.ndarray:
    """Column minima of ``F``."""
    return np.asarray(F, dtype=float).min(axis=0)


def bracket(F) -> np.ndarray:
    """``F`` minus the rank-one matrix whose rows all equal ``floor(F)``."""
    F = np.asarray(F, dtype=float)
    return F - F.min(axis=0)[None, :]


def inf_norm(M) -> float:
    """Maximum absolute row sum."""
    M = np.asarray(M, dtype=float)
    if M.size == 0:
        return 0.0
    return float(np.abs(M).sum(axis=-1).max())


class FloorTrace(NamedTuple):
    product: np.ndarray
    floor_trace: list


def product_floor_limit(seq: Sequence) -> FloorTrace:
    """Accumulate ``F_t ... F_2 F_1`` and record the floor after every factor.

    ``seq`` lists the factors in time order, so each new factor multiplies
    from the left.  The recorded floors are elementwise nondecreasing; their
    limit is the floor of the infinite product.
    """
    seq = [np.asarray(F, dtype=float) for F in seq]
    if not seq:
        raise ValueError("empty matrix sequence")
    n = seq[0].shape[0]
    for k, F in enumerate(seq):
        if F.shape != (n, n):
            raise DimensionError(f"factor {k} has shape {F.shape}, expected {(n, n)}")
    P = seq[0].copy()
    trace = [floor(P)]
    for F in seq[1:]:
        P = F @ P
        trace.append(floor(P))
    return FloorTrace(P, trace)


def positive_columns(F, support=None) -> np.ndarray:
    """Boolean mask of columns whose entries are all strictly positive.

    ``support`` is an optional boolean pattern of structurally nonzero
    entries; when given it decides positivity instead of a numeric threshold.
    """
    if support is not None:
        return np.all(np.asarray(support, dtype=bool), axis=0)
    return np.all(np.asarray(F, dtype=float) > POSITIVITY_THRESHOLD, axis=0)


def check_strongly_rooted_matrix(F, support=None) -> bool:
    """True when ``inf_norm(bracket(F)) < 1``, i.e. ``F`` has a strictly positive column."""
    return bool(positive_columns(F, support).any())
