"""Hessian-based nonlinearity measure of LN and grouped LN.

``H(f; x) = sum_i ||d^2 f_i / dx^2||_F^2`` summed over output coordinates.
For ``f = LN`` on ``R^d`` this is ``3 (d - 2) / (d sigma^4)``; grouping adds
one such term per group with its own ``sigma_i`` and group size ``c``.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .config import DEFAULT
from .errors import DegenerateInputError, ShapeError, UndefinedRatioError
from .tensor_core import as_vec


class IllConditionedStepWarning(UserWarning):
    """Finite-difference step is not small next to the input's spread."""


# step / smallest group std above which the stencil is flagged
_STEP_LIMIT = 1e-2


def _split(x, g: int) -> np.ndarray:
    v = as_vec(x)
    if g < 1 or v.size % g:
        raise ShapeError(f"{g} groups do not divide dimension {v.size}")
    if v.size // g < 2:
        raise DegenerateInputError(f"group size {v.size // g} has zero variance by construction")
    return v.reshape(g, v.size // g)


def group_variances(x, g: int = 1) -> np.ndarray:
    return _split(x, g).var(axis=1)


def hessian_measure_lng_closed(x, g: int, eps_zero: float = DEFAULT.eps_zero) -> float:
    parts = _split(x, g)
    c = parts.shape[1]
    var = parts.var(axis=1)
    if np.any(np.sqrt(var) <= eps_zero):
        raise DegenerateInputError("a group has zero variance")
    return float(np.sum(3.0 * (c - 2) / (c * var ** 2)))


def hessian_measure_ln_closed(x, eps_zero: float = DEFAULT.eps_zero) -> float:
    return hessian_measure_lng_closed(x, 1, eps_zero)


def default_step(x, g: int = 1) -> float:
    """``1e-4 (1 + ||x||_inf)``, capped at ``1e-3`` of the smallest group std."""
    parts = _split(x, g)
    base = 1e-4 * (1.0 + float(np.max(np.abs(parts))))
    sd = float(np.sqrt(parts.var(axis=1)).min())
    return min(base, 1e-3 * sd) if sd > 0 else base


def _lng_columns(X: np.ndarray, g: int) -> np.ndarray:
    d, n = X.shape
    Z = X.reshape(g, d // g, n)
    dev = Z - Z.mean(axis=1, keepdims=True)
    return (np.sqrt(d // g) * dev / np.linalg.norm(dev, axis=1, keepdims=True)).reshape(d, n)


def hessian_measure_fd(x, g: int = 1, h: float | None = None, eps_zero: float = DEFAULT.eps_zero) -> float:
    """Central-difference estimate of ``H`` for grouped LN (``g = 1`` is plain LN).

    Diagonal entries use the three-point stencil, mixed ones the four-point
    stencil; every output coordinate comes out of the same evaluations.
    """
    parts = _split(x, g)
    v = parts.ravel()
    d = v.size
    h = default_step(v, g) if h is None else float(h)
    if h <= 0:
        raise ValueError("step must be positive")
    sd = np.sqrt(parts.var(axis=1))
    if np.any(sd <= eps_zero):
        raise DegenerateInputError("a group has zero variance")
    if h > _STEP_LIMIT * sd.min():
        warnings.warn(f"step {h:.3g} is large next to the smallest group std {sd.min():.3g}",
                      IllConditionedStepWarning, stacklevel=2)

    E = h * np.eye(d)
    j, k = np.triu_indices(d, 1)
    pp = v[:, None] + E[:, j] + E[:, k]
    pm = v[:, None] + E[:, j] - E[:, k]
    mp = v[:, None] - E[:, j] + E[:, k]
    mm = v[:, None] - E[:, j] - E[:, k]
    plus, minus = v[:, None] + E, v[:, None] - E
    cols = np.hstack([v[:, None], plus, minus, pp, pm, mp, mm])
    Y = _lng_columns(cols, g)
    y0 = Y[:, :1]
    Yp, Ym = Y[:, 1:1 + d], Y[:, 1 + d:1 + 2 * d]
    q = j.size
    Ypp, Ypm, Ymp, Ymm = (Y[:, 1 + 2 * d + s * q:1 + 2 * d + (s + 1) * q] for s in range(4))
    diag = (Yp - 2 * y0 + Ym) / h ** 2
    mixed = (Ypp - Ypm - Ymp + Ymm) / (4 * h ** 2)
    # off-diagonal entries appear twice in the Frobenius norm
    return float(np.sum(diag ** 2) + 2 * np.sum(mixed ** 2))


@dataclass(frozen=True)
class NonlinearityReport:
    h_closed: float
    h_fd: float
    rel_err: float
    per_group_variances: tuple
    global_variance: float
    group_count: int
    group_size: int

    def to_dict(self) -> dict:
        return {
            "h_closed": self.h_closed,
            "h_fd": self.h_fd,
            "rel_err": self.rel_err,
            "per_group_variances": list(self.per_group_variances),
            "global_variance": self.global_variance,
            "group_count": self.group_count,
            "group_size": self.group_size,
        }


def nonlinearity_report(x, g: int = 1, h: float | None = None,
                        eps_zero: float = DEFAULT.eps_zero) -> NonlinearityReport:
    v = as_vec(x)
    closed = hessian_measure_lng_closed(v, g, eps_zero)
    fd = hessian_measure_fd(v, g, h, eps_zero)
    return NonlinearityReport(
        h_closed=closed,
        h_fd=fd,
        rel_err=abs(closed - fd) / max(closed, eps_zero),
        per_group_variances=tuple(float(s) for s in group_variances(v, g)),
        global_variance=float(v.var()),
        group_count=g,
        group_size=v.size // g,
    )


@dataclass(frozen=True)
class GroupRatio:
    ratio: float            # H(LN-G) / H(LN)
    h_group: float
    h_layer: float
    inverse_quartic_ok: bool    # sum_i 1/sigma_i^4 >= g / sigma^4
    variance_split_ok: bool     # sigma^2 >= mean_i sigma_i^2
    report: NonlinearityReport

    def to_dict(self) -> dict:
        return {
            "ratio": self.ratio,
            "h_group": self.h_group,
            "h_layer": self.h_layer,
            "inverse_quartic_ok": self.inverse_quartic_ok,
            "variance_split_ok": self.variance_split_ok,
            "report": self.report.to_dict(),
        }


def group_ratio_report(x, g: int, h: float | None = None, eps_zero: float = DEFAULT.eps_zero) -> GroupRatio:
    """Compare grouped LN against plain LN at ``x`` (closed forms, plus an FD check)."""
    v = as_vec(x)
    if v.size <= 2:
        raise UndefinedRatioError(f"LN on dimension {v.size} has zero Hessian measure; the ratio is undefined")
    h_layer = hessian_measure_ln_closed(v, eps_zero)
    h_group = hessian_measure_lng_closed(v, g, eps_zero)
    var_i = group_variances(v, g)
    var = float(v.var())
    lhs, rhs = float(np.sum(1.0 / var_i ** 2)), g / var ** 2
    return GroupRatio(
        ratio=h_group / h_layer,
        h_group=h_group,
        h_layer=h_layer,
        inverse_quartic_ok=bool(lhs >= rhs - 1e-9 * rhs),
        variance_split_ok=bool(var - var_i.mean() >= -1e-12),
        report=nonlinearity_report(v, g, h, eps_zero),
    )


def group_ratios_closed(X, g: int, eps_zero: float = DEFAULT.eps_zero) -> np.ndarray:
    """``H(LN-G) / H(LN)`` for every column of ``X``, closed forms only."""
    X = np.asarray(X, dtype=float)
    d, n = X.shape
    if d <= 2:
        raise UndefinedRatioError(f"LN on dimension {d} has zero Hessian measure; the ratio is undefined")
    if g < 1 or d % g:
        raise ShapeError(f"{g} groups do not divide dimension {d}")
    c = d // g
    if c < 2:
        raise DegenerateInputError(f"group size {c} has zero variance by construction")
    var = X.var(axis=0)
    var_i = X.reshape(g, c, n).var(axis=1)
    if np.any(np.sqrt(var_i) <= eps_zero):
        raise DegenerateInputError("a group has zero variance")
    h_layer = 3.0 * (d - 2) / (d * var ** 2)
    h_group = np.sum(3.0 * (c - 2) / (c * var_i ** 2), axis=0)
    return h_group / h_layer
