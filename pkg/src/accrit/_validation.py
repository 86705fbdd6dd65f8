"""Argument checks shared by the estimator wrappers and the command line."""

from __future__ import annotations

import numpy as np

from .metric import MetricSpace, SampledCurve, make_metric


def check_curve(X, space=None) -> SampledCurve:
    """Accept a ``SampledCurve`` or an array whose first column is the parameter.

    An ``(N, 1 + d)`` array ``[t, x_1 .. x_d]`` becomes a curve in ``space``
    (Euclidean of dimension ``d`` by default).
    """
    if isinstance(X, SampledCurve):
        return X
    arr = np.asarray(X, dtype=float)
    if arr.ndim != 2 or arr.shape[1] < 2:
        raise ValueError(f"expected a SampledCurve or an (N, 1 + d) array, got shape {arr.shape}")
    if space is None:
        space = make_metric("euclidean", dim=arr.shape[1] - 1)
    return SampledCurve(arr[:, 0], arr[:, 1:], check_space(space))


def check_space(space) -> MetricSpace:
    return make_metric(space)


def check_theta(theta) -> float:
    theta = float(theta)
    if not 0.0 < theta < 1.0:
        raise ValueError(f"theta must lie in (0, 1), got {theta}")
    return theta


def check_positive(value, name: str) -> float:
    value = float(value)
    if not value > 0 or not np.isfinite(value):
        raise ValueError(f"{name} must be positive and finite, got {value}")
    return value


def check_tolerance(value, name: str) -> float:
    value = float(value)
    if value < 0 or not np.isfinite(value):
        raise ValueError(f"{name} must be nonnegative, got {value}")
    return value


def check_mode(mode: str) -> str:
    if mode not in ("exact", "greedy"):
        raise ValueError(f"mode must be 'exact' or 'greedy', got {mode!r}")
    return mode
