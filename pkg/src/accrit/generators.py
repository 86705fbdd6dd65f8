"""
Deterministic test curves.

Every generator returns a ``SampledCurve`` whose parameter grid and points are
fully determined by the arguments (random walks by their seed).
"""

from __future__ import annotations

import numpy as np

from .metric import Euclidean, SampledCurve, Snowflake

KINDS = ("identity", "polyline", "cantor", "circle", "snowflaked", "random_walk")


def identity_curve(n: int = 101, a: float = 0.0, b: float = 1.0) -> SampledCurve:
    """``gamma(t) = t`` on ``n`` uniform points of ``[a, b]``."""
    if n < 2:
        raise ValueError("need at least 2 points")
    t = np.linspace(a, b, n)
    return SampledCurve(t, t[:, None], Euclidean(1))


def polyline_curve(vertices, n: int = 101, span: float | None = None) -> SampledCurve:
    """Piecewise-linear curve through ``vertices``, vertex ``k`` at parameter ``k``.

    With ``span`` given the parameter range is rescaled to ``[0, span]``.
    Grid points are placed so that vertices fall on the grid whenever
    ``n - 1`` is a multiple of the number of edges.
    """
    V = np.asarray(vertices, dtype=float)
    if V.ndim == 1:
        V = V[:, None]
    if len(V) < 2:
        raise ValueError("a polyline needs at least 2 vertices")
    if n < 2:
        raise ValueError("need at least 2 points")
    edges = len(V) - 1
    s = np.arange(n) * edges / (n - 1)
    s[-1] = edges
    pts = np.column_stack([np.interp(s, np.arange(len(V)), V[:, k]) for k in range(V.shape[1])])
    t = s if span is None else s * (span / edges)
    return SampledCurve(t, pts, Euclidean(V.shape[1]))


def cantor_values(level: int) -> np.ndarray:
    """Staircase values at the ``3**level + 1`` ternary grid points.

    Each level-``level`` ternary cell either rises by ``2**-level`` (cells
    inside the kept intervals) or stays flat.
    """
    if level < 0:
        raise ValueError("level must be nonnegative")
    rise = np.ones(1, dtype=bool)
    for _ in range(level):
        rise = np.column_stack([rise, np.zeros_like(rise), rise]).ravel()
    return np.concatenate([[0.0], np.cumsum(rise * 0.5 ** level)])


def cantor_curve(level: int, points_per_cell: int = 1) -> SampledCurve:
    """Level-``level`` piecewise-linear devil's staircase on ``[0, 1]``.

    Each of the ``3**level`` ternary cells is sampled by ``points_per_cell``
    uniform steps, so the grid has ``points_per_cell * 3**level + 1`` points
    and every cell endpoint lies on it.
    """
    if points_per_cell < 1:
        raise ValueError("points_per_cell must be >= 1")
    knots = cantor_values(level)
    cells = len(knots) - 1
    M = cells * points_per_cell
    t = np.arange(M + 1) / M
    base = np.repeat(knots[:-1], points_per_cell)
    frac = np.tile(np.arange(points_per_cell) / points_per_cell, cells)
    vals = np.concatenate([base + frac * np.repeat(np.diff(knots), points_per_cell), [1.0]])
    return SampledCurve(t, vals[:, None], Euclidean(1))


def circle_curve(n: int = 101, radius: float = 1.0, arc: float = np.pi) -> SampledCurve:
    """Circular arc of angle ``arc`` in the plane, parametrised by angle."""
    if n < 2:
        raise ValueError("need at least 2 points")
    t = np.linspace(0.0, arc, n)
    return SampledCurve(t, radius * np.column_stack([np.cos(t), np.sin(t)]), Euclidean(2))


def snowflaked(curve: SampledCurve, alpha: float = 0.5) -> SampledCurve:
    """The same samples viewed in the snowflake metric ``rho**alpha``."""
    return SampledCurve(curve.params, curve.points, Snowflake(curve.space, alpha))


def random_walk_curve(n: int = 101, dim: int = 2, seed=0, step: float = 0.05) -> SampledCurve:
    """Gaussian random walk started at the origin."""
    rng = np.random.default_rng(seed)
    steps = rng.normal(scale=step, size=(n - 1, dim))
    pts = np.vstack([np.zeros((1, dim)), np.cumsum(steps, axis=0)])
    return SampledCurve(np.linspace(0.0, 1.0, n), pts, Euclidean(dim))


def generate_curve(kind: str, **kw) -> SampledCurve:
    """Dispatch by name.

    ``snowflaked`` takes ``base`` (a kind name or a curve), ``alpha`` and the
    base generator's keywords.
    """
    kind = kind.replace("-", "_")
    if kind == "identity":
        return identity_curve(**kw)
    if kind == "polyline":
        return polyline_curve(**kw)
    if kind == "cantor":
        return cantor_curve(**kw)
    if kind == "circle":
        return circle_curve(**kw)
    if kind == "random_walk":
        return random_walk_curve(**kw)
    if kind == "snowflaked":
        base = kw.pop("base", "identity")
        alpha = kw.pop("alpha", 0.5)
        if not isinstance(base, SampledCurve):
            base = generate_curve(base, **kw)
        return snowflaked(base, alpha)
    raise ValueError(f"unknown curve kind {kind!r}; expected one of {', '.join(KINDS)}")


__all__ = [
    "KINDS",
    "identity_curve",
    "polyline_curve",
    "cantor_values",
    "cantor_curve",
    "circle_curve",
    "snowflaked",
    "random_walk_curve",
    "generate_curve",
]
