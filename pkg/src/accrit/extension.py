"""
Two-sided McShane envelopes over a finite support.

For a function ``h`` known on a finite set ``X'`` and a constant ``L`` the upper
envelope ``min_k h(x_k) + L rho(x_k, x)`` and the lower envelope
``max_k h(x_k) - L rho(x_k, x)`` are the largest and smallest ``L``-Lipschitz
extensions of ``h``. Any value between them at a new point keeps the function
``L``-Lipschitz.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .metric import Euclidean, MetricSpace, make_metric

VALUE_TOL = 1e-9


class LipschitzError(ValueError):
    """A support/value table that cannot be Lipschitz, or an empty support."""


class EnvelopeViolation(ValueError):
    """A value outside ``[lower, upper]`` at the extension point."""

    def __init__(self, side, value, bound):
        self.side = side
        self.value = value
        self.bound = bound
        word = "above the upper" if side == "upper" else "below the lower"
        super().__init__(f"value {value!r} lies {word} envelope ({bound!r})")


def infer_constant(space: MetricSpace, support, values, tol: float = VALUE_TOL) -> float:
    """Smallest Lipschitz constant of ``values`` on ``support``.

    Coincident support points are skipped when their values agree (within
    ``tol``) and rejected otherwise.
    """
    X = space.as_points(support)
    v = np.asarray(values, dtype=float).ravel()
    if len(X) != len(v):
        raise LipschitzError(f"{len(X)} support points but {len(v)} values")
    if len(X) == 0:
        raise LipschitzError("empty support")
    best = 0.0
    for lo in range(0, len(X), 1024):
        D = space.pairwise(X[lo:lo + 1024], X)
        dv = np.abs(v[lo:lo + 1024, None] - v[None, :])
        zero = D == 0
        if np.any(zero & (dv > tol)):
            i, j = np.argwhere(zero & (dv > tol))[0]
            raise LipschitzError(
                f"support points {lo + i} and {j} coincide but carry values "
                f"{v[lo + i]!r} and {v[j]!r}"
            )
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = np.where(zero, 0.0, dv / np.where(zero, 1.0, D))
        best = max(best, float(ratio.max()))
    return best


@dataclass(eq=False)
class PartialLipschitzFunction:
    """A real function on a finite support with a recorded Lipschitz constant."""

    support: np.ndarray
    values: np.ndarray
    constant: float
    space: MetricSpace

    def __post_init__(self):
        arr = np.asarray(self.support, dtype=float)
        self.support = np.zeros((0, _width(self.space))) if arr.size == 0 else self.space.as_points(arr)
        self.values = np.asarray(self.values, dtype=float).ravel()
        if len(self.support) != len(self.values):
            raise LipschitzError(f"{len(self.support)} support points but {len(self.values)} values")
        if self.constant < 0:
            raise LipschitzError("Lipschitz constant must be nonnegative")
        self.constant = float(self.constant)

    @classmethod
    def from_data(cls, support, values, space=None, constant=None):
        """Build from raw data; the constant defaults to the inferred one."""
        space = space if space is not None else _guess_space(support)
        pf = cls(support, values, 0.0, space)
        if constant is None:
            constant = pf.infer_constant() if len(pf) else 0.0
        pf.constant = float(constant)
        return pf

    @classmethod
    def empty(cls, space):
        return cls(np.zeros((0, _width(space))), np.zeros(0), 0.0, space)

    def __len__(self):
        return len(self.values)

    def infer_constant(self) -> float:
        return infer_constant(self.space, self.support, self.values)

    def is_lipschitz(self, L=None, tol=VALUE_TOL) -> bool:
        L = self.constant if L is None else L
        return bool(self.lipschitz_violation(L) <= tol)

    def lipschitz_violation(self, L):
        """Largest ``|h(x) - h(y)| - L rho(x, y)`` over support pairs (``-inf`` if none)."""
        worst = -np.inf
        for lo in range(0, len(self), 1024):
            D = self.space.pairwise(self.support[lo:lo + 1024], self.support)
            dv = np.abs(self.values[lo:lo + 1024, None] - self.values[None, :])
            worst = max(worst, float((dv - L * D).max()))
        return worst

    def distance_to_support(self, X) -> np.ndarray:
        """``rho(x, X')`` for each query point; ``inf`` for an empty support."""
        X = self.space.as_points(X)
        if len(self) == 0:
            return np.full(len(X), np.inf)
        return self.space.pairwise(self.support, X).min(axis=0)

    def lookup(self, x, tol=0.0):
        """Value stored at a support point within ``tol`` of ``x``, or ``None``."""
        if len(self) == 0:
            return None
        d = self.space.pairwise(self.support, self.space.as_points(x))[:, 0]
        k = int(np.argmin(d))
        return float(self.values[k]) if d[k] <= tol else None

    def with_points(self, X, values, constant) -> "PartialLipschitzFunction":
        """Copy with extra support points appended (no checks)."""
        X = self.space.as_points(X)
        return PartialLipschitzFunction(
            np.vstack([self.support, X]),
            np.concatenate([self.values, np.asarray(values, dtype=float).ravel()]),
            float(constant),
            self.space,
        )

    def to_dict(self, with_metric: bool = False) -> dict:
        pts = self.support.astype(int) if self.space.point_kind == "index" else self.support
        d = {"support": pts.tolist(), "values": self.values.tolist(), "constant": self.constant}
        if with_metric:
            d["metric"] = self.space.to_dict()
        return d

    @classmethod
    def from_dict(cls, d: dict, space: MetricSpace | None = None) -> "PartialLipschitzFunction":
        support = d["support"]
        if support and not isinstance(support[0], (list, tuple)):
            support = [[s] for s in support]
        if space is None:
            space = make_metric(d["metric"]) if "metric" in d else _guess_space(support)
        if not support:
            return cls(np.zeros((0, _width(space))), np.zeros(0), d.get("constant", 0.0), space)
        return cls(support, d["values"], d.get("constant", 0.0), space)

    def __eq__(self, other):
        if not isinstance(other, PartialLipschitzFunction):
            return NotImplemented
        return (
            self.constant == other.constant
            and self.space.to_dict() == other.space.to_dict()
            and np.array_equal(self.support, other.support)
            and np.array_equal(self.values, other.values)
        )


def _width(space):
    if isinstance(space, Euclidean):
        return space.dim
    base = getattr(space, "base", None)
    if base is not None:
        return _width(base)
    return getattr(space, "dim", None) or 1


def _guess_space(support):
    arr = np.asarray(support, dtype=float)
    dim = 1 if arr.ndim < 2 else arr.shape[1]
    return Euclidean(max(dim, 1))


class ExtensionField:
    """The envelopes ``h+_L`` and ``h-_L`` of a partial function for a fixed ``L``.

    ``L`` defaults to the base function's recorded constant. The base constant
    used for the gap bound is the inferred one, computed lazily.
    """

    def __init__(self, base: PartialLipschitzFunction, L: float | None = None):
        L = base.constant if L is None else float(L)
        if L < base.constant - VALUE_TOL:
            raise LipschitzError(f"extension constant {L} is below the base constant {base.constant}")
        self.base = base
        self.L = L
        self._base_constant = None

    @property
    def space(self):
        return self.base.space

    @property
    def base_constant(self) -> float:
        if self._base_constant is None:
            self._base_constant = self.base.infer_constant() if len(self.base) else 0.0
        return self._base_constant

    def _distances(self, X):
        if len(self.base) == 0:
            raise LipschitzError("envelopes of an empty support are undefined")
        X = self.space.as_points(X)
        return self.space.pairwise(self.base.support, X)

    @staticmethod
    def _pin_support(env, D, values):
        # a query sitting on a support point returns the stored value exactly
        hit = D == 0
        if hit.any():
            k, q = np.nonzero(hit)
            env[q] = values[k]
        return env

    def upper(self, X) -> np.ndarray:
        D = self._distances(X)
        env = (self.base.values[:, None] + self.L * D).min(axis=0)
        return self._pin_support(env, D, self.base.values)

    def lower(self, X) -> np.ndarray:
        D = self._distances(X)
        env = (self.base.values[:, None] - self.L * D).max(axis=0)
        return self._pin_support(env, D, self.base.values)

    def envelopes(self, X):
        """``(lower, upper)`` from a single distance evaluation."""
        D = self._distances(X)
        v = self.base.values[:, None]
        lo = self._pin_support((v - self.L * D).max(axis=0), D, self.base.values)
        up = self._pin_support((v + self.L * D).min(axis=0), D, self.base.values)
        return lo, up

    def gap_slack(self, X) -> np.ndarray:
        """``(h+ - h-) - 2 (L - L') rho(x, X')``; nonnegative up to rounding."""
        D = self._distances(X)
        v = self.base.values[:, None]
        lo = self._pin_support((v - self.L * D).max(axis=0), D, self.base.values)
        up = self._pin_support((v + self.L * D).min(axis=0), D, self.base.values)
        return (up - lo) - 2.0 * (self.L - self.base_constant) * D.min(axis=0)


def upper_extension(field: ExtensionField, x) -> float:
    return float(field.upper(x)[0])


def lower_extension(field: ExtensionField, x) -> float:
    return float(field.lower(x)[0])


def gap_slack(field: ExtensionField, x) -> float:
    return float(field.gap_slack(x)[0])


def extend_at_point(field: ExtensionField, x, value: float, tol: float = VALUE_TOL) -> PartialLipschitzFunction:
    """Add ``x`` to the support with ``value``, which must lie between the envelopes.

    The returned function records the field's constant ``L``. When the base
    support is empty any value is admissible.
    """
    x = field.space.as_points(x)
    if len(x) != 1:
        raise ValueError("extend_at_point takes a single point")
    base = field.base
    if len(base):
        lo, up = field.envelopes(x)
        if value > up[0] + tol:
            raise EnvelopeViolation("upper", value, float(up[0]))
        if value < lo[0] - tol:
            raise EnvelopeViolation("lower", value, float(lo[0]))
        if base.lookup(x) is not None:
            return PartialLipschitzFunction(base.support, base.values, field.L, base.space)
    return base.with_points(x, [value], field.L)


__all__ = [
    "VALUE_TOL",
    "LipschitzError",
    "EnvelopeViolation",
    "infer_constant",
    "PartialLipschitzFunction",
    "ExtensionField",
    "upper_extension",
    "lower_extension",
    "gap_slack",
    "extend_at_point",
]
