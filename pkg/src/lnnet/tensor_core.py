"""Dense vector helpers and the normalization primitives.

Vectors are 1-D float arrays; point sets are ``d x m`` arrays whose columns
are samples. LN follows the sqrt(d) convention, i.e. the output has zero mean
and squared norm ``d``; spherical projection has unit radius.
"""
from __future__ import annotations

import numpy as np

from .config import DEFAULT
from .errors import DegenerateInputError, ShapeError


def as_vec(x) -> np.ndarray:
    v = np.asarray(x, dtype=float)
    if v.ndim != 1:
        raise ShapeError(f"expected a vector, got shape {v.shape}")
    if not np.all(np.isfinite(v)):
        raise ShapeError("vector has non-finite entries")
    return v


def as_mat(X) -> np.ndarray:
    A = np.asarray(X, dtype=float)
    if A.ndim != 2:
        raise ShapeError(f"expected a matrix, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise ShapeError("matrix has non-finite entries")
    return A


def sum_of_squares(X) -> float:
    """Total squared deviation of the columns of ``X`` from their mean."""
    A = as_mat(X)
    if A.shape[1] == 0 or A.shape[0] == 0:
        raise ShapeError("sum of squares of an empty matrix")
    dev = A - A.mean(axis=1, keepdims=True)
    return float(np.sum(dev * dev))


def center(x) -> np.ndarray:
    v = as_vec(x)
    return v - v.mean()


def spherical_project(x, eps_zero: float = DEFAULT.eps_zero) -> np.ndarray:
    v = as_vec(x)
    n = np.linalg.norm(v)
    if n <= eps_zero:
        raise DegenerateInputError(f"cannot project a vector of norm {n:.3g} onto the sphere")
    return v / n


def norm_stats(x) -> tuple[float, float]:
    """Mean and (population) standard deviation."""
    v = as_vec(x)
    mu = float(v.mean())
    return mu, float(np.sqrt(np.mean((v - mu) ** 2)))


def layer_norm(x, eps_zero: float = DEFAULT.eps_zero) -> np.ndarray:
    v = as_vec(x)
    if v.size < 2:
        raise ShapeError("layer norm needs at least two neurons")
    c = v - v.mean()
    n = np.linalg.norm(c)
    sigma = n / np.sqrt(v.size)
    if sigma <= eps_zero:
        raise DegenerateInputError(f"zero variance input (sigma={sigma:.3g})")
    # sqrt(d) * c / ||c|| == c / sigma
    return np.sqrt(v.size) * c / n


def group_layer_norm(x, g: int, eps_zero: float = DEFAULT.eps_zero) -> np.ndarray:
    v = as_vec(x)
    d = v.size
    if g < 1 or d % g:
        raise ShapeError(f"{g} groups do not divide dimension {d}")
    c = d // g
    if c < 2:
        raise DegenerateInputError(f"group size {c} has zero variance by construction")
    return np.concatenate([layer_norm(part, eps_zero) for part in v.reshape(g, c)])


def apply_affine(W, b, x) -> np.ndarray:
    W = as_mat(W)
    b = as_vec(b)
    v = as_vec(x)
    if W.shape[1] != v.size or W.shape[0] != b.size:
        raise ShapeError(f"affine {W.shape} with bias {b.size} cannot act on dimension {v.size}")
    return W @ v + b


def compose_affine(W1, b1, W2, b2) -> tuple[np.ndarray, np.ndarray]:
    """Return ``(W, b)`` of ``x -> W2 (W1 x + b1) + b2``."""
    W1, W2 = as_mat(W1), as_mat(W2)
    if W2.shape[1] != W1.shape[0]:
        raise ShapeError(f"cannot chain {W1.shape} into {W2.shape}")
    return W2 @ W1, W2 @ as_vec(b1) + as_vec(b2)
