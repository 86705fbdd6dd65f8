"""
Metric spaces and sampled curves.

Every point set is carried as a 2-D float array of shape ``(n, d)``. Vector
spaces use the coordinates directly; index spaces (``graph``, ``table``) use
``d == 1`` with integral entries naming a vertex or a table row.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import shortest_path
from scipy.spatial.distance import cdist


class MetricError(ValueError):
    """Raised for invalid metric descriptors or points of the wrong kind."""


class MetricSpace:
    """Base class for the built-in distance oracles."""

    kind = "abstract"
    point_kind = "vector"

    def pairwise(self, A, B) -> np.ndarray:
        """Distance matrix between two point sets, shape ``(len(A), len(B))``."""
        raise NotImplementedError

    def distance(self, x, y) -> float:
        x = self.as_points(x)
        y = self.as_points(y)
        if len(x) != 1 or len(y) != 1:
            raise MetricError("distance() takes single points")
        return float(self.pairwise(x, y)[0, 0])

    def as_points(self, P) -> np.ndarray:
        """Coerce ``P`` to a validated ``(n, d)`` float array."""
        arr = np.asarray(P, dtype=float)
        if arr.ndim == 0:
            arr = arr.reshape(1, 1)
        elif arr.ndim == 1:
            arr = arr.reshape(1, -1) if self._row_is_point(arr) else arr.reshape(-1, 1)
        if arr.ndim != 2:
            raise MetricError(f"points must be 1-D or 2-D, got shape {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise MetricError("points must be finite")
        self._check_points(arr)
        return arr

    def _row_is_point(self, arr) -> bool:
        return False

    def _check_points(self, arr):
        pass

    def to_dict(self) -> dict:
        raise NotImplementedError

    def __repr__(self):
        return f"{type(self).__name__}({self.to_dict()!r})"


class Euclidean(MetricSpace):
    kind = "euclidean"

    def __init__(self, dim: int = 1):
        if int(dim) < 1:
            raise MetricError("euclidean dimension must be >= 1")
        self.dim = int(dim)

    def _row_is_point(self, arr):
        # a flat array of length dim > 1 is one point, otherwise a list of scalars
        return self.dim > 1 and arr.shape[0] == self.dim

    def _check_points(self, arr):
        if arr.shape[1] != self.dim:
            raise MetricError(
                f"point-kind mismatch: expected {self.dim}-vectors, got width {arr.shape[1]}"
            )

    def pairwise(self, A, B):
        return cdist(self.as_points(A), self.as_points(B))

    def to_dict(self):
        return {"kind": "euclidean", "dim": self.dim}


class Snowflake(MetricSpace):
    """The snowflaked metric ``rho(x, y) ** alpha`` of a base metric."""

    kind = "snowflake"

    def __init__(self, base: MetricSpace, alpha: float = 0.5):
        if not 0.0 < alpha <= 1.0:
            raise MetricError(f"snowflake exponent must lie in (0, 1], got {alpha}")
        self.base = base
        self.alpha = float(alpha)
        self.point_kind = base.point_kind

    def as_points(self, P):
        return self.base.as_points(P)

    def pairwise(self, A, B):
        return self.base.pairwise(A, B) ** self.alpha

    def to_dict(self):
        return {"kind": "snowflake", "alpha": self.alpha, "base": self.base.to_dict()}


class DiscreteMetric(MetricSpace):
    """Distance 1 between distinct points, 0 otherwise. Points are arbitrary vectors."""

    kind = "discrete"
    point_kind = "abstract"

    def __init__(self, dim: int | None = None):
        self.dim = dim

    def _row_is_point(self, arr):
        return self.dim is not None and self.dim > 1 and arr.shape[0] == self.dim

    def pairwise(self, A, B):
        A = self.as_points(A)
        B = self.as_points(B)
        if A.shape[1] != B.shape[1]:
            raise MetricError("point-kind mismatch: widths differ")
        same = np.all(A[:, None, :] == B[None, :, :], axis=2)
        return np.where(same, 0.0, 1.0)

    def to_dict(self):
        d = {"kind": "discrete"}
        if self.dim is not None:
            d["dim"] = self.dim
        return d


class _IndexMetric(MetricSpace):
    point_kind = "index"
    matrix: np.ndarray

    def _check_points(self, arr):
        if arr.shape[1] != 1:
            raise MetricError("point-kind mismatch: index spaces take scalar indices")
        if np.any(arr != np.round(arr)):
            raise MetricError("point-kind mismatch: indices must be integers")
        n = self.matrix.shape[0]
        if arr.size and (arr.min() < 0 or arr.max() >= n):
            raise MetricError(f"index out of range for a {n}-point space")

    def pairwise(self, A, B):
        ia = self.as_points(A)[:, 0].astype(int)
        ib = self.as_points(B)[:, 0].astype(int)
        return self.matrix[np.ix_(ia, ib)]

    @property
    def n_points(self) -> int:
        return self.matrix.shape[0]


class TableMetric(_IndexMetric):
    kind = "table"

    def __init__(self, matrix, validate: bool = True):
        M = np.array(matrix, dtype=float)
        if M.ndim != 2 or M.shape[0] != M.shape[1]:
            raise MetricError("distance table must be square")
        if validate:
            if np.any(M < 0):
                raise MetricError("distance table has negative entries")
            if np.any(np.diag(M) != 0):
                raise MetricError("distance table must have a zero diagonal")
            bad = np.argwhere(M != M.T)
            if len(bad):
                i, j = bad[0]
                raise MetricError(f"distance table is not symmetric at ({i}, {j})")
        M.setflags(write=False)
        self.matrix = M

    def to_dict(self):
        return {"kind": "table", "matrix": self.matrix.tolist()}


class GraphMetric(_IndexMetric):
    """Shortest-path metric of a connected, positively weighted undirected graph."""

    kind = "graph"

    def __init__(self, n: int, edges):
        self.n = int(n)
        self.edges = tuple((int(u), int(v), float(w)) for u, v, w in edges)
        for u, v, w in self.edges:
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise MetricError(f"edge ({u}, {v}) references a missing vertex")
            if w <= 0:
                raise MetricError("graph edge weights must be positive")
        if self.edges:
            # csr_matrix sums duplicate entries; parallel edges must keep the lightest
            best = {}
            for u, v, w in self.edges:
                key = (min(u, v), max(u, v))
                best[key] = min(w, best.get(key, np.inf))
            (u, v), w = zip(*best.keys()), list(best.values())
            adj = csr_matrix((w, (u, v)), shape=(self.n, self.n))
        else:
            adj = csr_matrix((self.n, self.n))
        M = shortest_path(adj, method="D", directed=False)
        if not np.all(np.isfinite(M)):
            raise MetricError("graph is disconnected; distances would be infinite")
        M.setflags(write=False)
        self.matrix = M

    def to_dict(self):
        return {"kind": "graph", "n": self.n, "edges": [list(e) for e in self.edges]}


def make_metric(descriptor="euclidean", **params) -> MetricSpace:
    """Build a metric space from a descriptor name or a JSON-style dict.

    >>> make_metric("euclidean", dim=2).distance([0, 0], [3, 4])
    5.0
    """
    if isinstance(descriptor, MetricSpace):
        return descriptor
    if isinstance(descriptor, dict):
        params = {**{k: v for k, v in descriptor.items() if k != "kind"}, **params}
        descriptor = descriptor.get("kind")
    if descriptor == "euclidean":
        return Euclidean(params.get("dim", 1))
    if descriptor == "snowflake":
        base = params.get("base", {"kind": "euclidean", "dim": params.get("dim", 1)})
        return Snowflake(make_metric(base), params.get("alpha", 0.5))
    if descriptor == "discrete":
        return DiscreteMetric(params.get("dim"))
    if descriptor == "table":
        return TableMetric(params["matrix"], validate=params.get("validate", True))
    if descriptor == "graph":
        edges = params.get("edges", params.get("weights"))
        n = params.get("n")
        if n is None:
            n = 1 + max(max(u, v) for u, v, _ in edges)
        return GraphMetric(n, edges)
    raise MetricError(f"unknown metric descriptor {descriptor!r}")


def metric_from_dict(d: dict) -> MetricSpace:
    return make_metric(d)


@dataclass
class AxiomReport:
    passed: bool
    worst_symmetry: float
    symmetry_pair: tuple | None
    worst_triangle: float
    triangle_triple: tuple | None
    min_distance: float
    n_points: int
    violations: list = field(default_factory=list)


def check_metric_axioms(space: MetricSpace, sample_points, tol: float = 1e-9) -> AxiomReport:
    """Check symmetry, nonnegativity, identity and the triangle inequality on a sample.

    Slacks are reported so that nonnegative means satisfied: the symmetry slack of a
    pair is ``-|rho(x, y) - rho(y, x)|`` and the triangle slack of a triple is
    ``rho(x, y) + rho(y, z) - rho(x, z)``.
    """
    P = space.as_points(sample_points)
    n = len(P)
    if n < 3:
        raise MetricError("axiom check needs at least 3 sample points")
    D = space.pairwise(P, P)
    violations = []

    asym = -np.abs(D - D.T)
    i, j = np.unravel_index(np.argmin(asym), asym.shape)
    worst_sym = float(asym[i, j])
    sym_pair = (int(min(i, j)), int(max(i, j))) if worst_sym < 0 else None
    if worst_sym < -tol:
        violations.append(f"symmetry: rho({i},{j}) != rho({j},{i})")

    min_d = float(D.min())
    if min_d < -tol:
        violations.append("nonnegativity")
    diag = float(np.abs(np.diag(D)).max())
    if diag > tol:
        violations.append("identity: rho(x, x) != 0")

    worst_tri = np.inf
    triple = None
    # loop over the middle point to keep memory at O(n^2)
    for y in range(n):
        S = D[:, y][:, None] + D[y, :][None, :] - D
        k = np.argmin(S)
        if S.flat[k] < worst_tri:
            x, z = np.unravel_index(k, S.shape)
            worst_tri = float(S.flat[k])
            triple = (int(x), y, int(z))
    if worst_tri < -tol:
        violations.append(f"triangle: rho{triple[0], triple[2]} > rho{triple[0], triple[1]} + rho{triple[1], triple[2]}")

    return AxiomReport(
        passed=not violations,
        worst_symmetry=worst_sym,
        symmetry_pair=sym_pair,
        worst_triangle=worst_tri,
        triangle_triple=triple,
        min_distance=min_d,
        n_points=n,
        violations=violations,
    )


class SampledCurve:
    """A curve given by its values on a strictly increasing parameter grid.

    Parameters
    ----------
    params : array-like, shape (N,)
        Strictly increasing parameters ``a = t_0 < ... < t_N-1 = b``.
    points : array-like
        The curve values at ``params``, one point per row.
    space : MetricSpace
    """

    def __init__(self, params, points, space: MetricSpace | None = None):
        space = space if space is not None else Euclidean(1)
        t = np.asarray(params, dtype=float).ravel()
        P = np.asarray(points, dtype=float)
        if P.ndim == 1:
            P = P.reshape(-1, 1)
        P = space.as_points(P)
        if len(t) < 2:
            raise ValueError("a sampled curve needs at least 2 grid points")
        if len(t) != len(P):
            raise ValueError(f"{len(t)} parameters but {len(P)} points")
        if not np.all(np.isfinite(t)) or np.any(np.diff(t) <= 0):
            raise ValueError("curve parameters must be finite and strictly increasing")
        t.setflags(write=False)
        P.setflags(write=False)
        self.params = t
        self.points = P
        self.space = space
        self._steps = None

    def __len__(self):
        return len(self.params)

    @property
    def a(self) -> float:
        return float(self.params[0])

    @property
    def b(self) -> float:
        return float(self.params[-1])

    @property
    def step_distances(self) -> np.ndarray:
        """``rho(p_{j-1}, p_j)`` for consecutive samples."""
        if self._steps is None:
            P = self.points
            # row-wise distances without forming the full matrix
            d = np.empty(len(P) - 1)
            for lo in range(0, len(P) - 1, 4096):
                hi = min(lo + 4096, len(P) - 1)
                d[lo:hi] = np.diagonal(self.space.pairwise(P[lo:hi], P[lo + 1:hi + 1]))
            self._steps = d
        return self._steps

    @property
    def oscillation(self) -> float:
        return float(self.step_distances.max())

    def lipschitz_constant(self) -> float:
        """Largest ``rho / dt`` over consecutive samples."""
        return float(np.max(self.step_distances / np.diff(self.params)))

    def dist(self, i, j):
        """Distance matrix between grid indices ``i`` and ``j`` (ints or arrays)."""
        i = np.atleast_1d(i)
        j = np.atleast_1d(j)
        return self.space.pairwise(self.points[i], self.points[j])

    def segment(self, i: int, j: int) -> "SampledCurve":
        """Sub-curve on grid indices ``i..j`` inclusive."""
        return SampledCurve(self.params[i:j + 1], self.points[i:j + 1], self.space)

    def restrict(self, indices) -> "SampledCurve":
        idx = np.asarray(indices, dtype=int)
        return SampledCurve(self.params[idx], self.points[idx], self.space)

    def index_of(self, t: float, tol: float = 1e-12) -> int:
        """Grid index of parameter ``t``; raises if ``t`` is not a grid point."""
        k = int(np.searchsorted(self.params, t))
        for c in (k - 1, k):
            if 0 <= c < len(self.params) and abs(self.params[c] - t) <= tol * max(1.0, abs(t)):
                return c
        raise ValueError(f"parameter {t!r} is not on the curve grid")

    def is_injective(self, indices=None, tol: float = 0.0) -> bool:
        """True when all sampled points (restricted to ``indices``) are pairwise farther than ``tol``."""
        idx = np.arange(len(self)) if indices is None else np.asarray(indices, dtype=int)
        P = self.points[idx]
        n = len(P)
        for lo in range(0, n, 1024):
            D = self.space.pairwise(P[lo:lo + 1024], P)
            rows = np.arange(lo, min(lo + 1024, n))
            D[rows - lo, rows] = np.inf
            if np.any(D <= tol):
                return False
        return True

    def to_dict(self) -> dict:
        pts = self.points
        if self.space.point_kind == "index":
            pts = pts.astype(int)
        return {
            "metric": self.space.to_dict(),
            "params": self.params.tolist(),
            "points": pts.tolist(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "SampledCurve":
        space = make_metric(d.get("metric", {"kind": "euclidean"}))
        pts = d["points"]
        if pts and not isinstance(pts[0], (list, tuple)):
            pts = [[p] for p in pts]
        if isinstance(space, Euclidean) and "dim" not in d.get("metric", {}) and pts:
            space = Euclidean(len(pts[0]))
        return cls(d["params"], pts, space)

    def __eq__(self, other):
        if not isinstance(other, SampledCurve):
            return NotImplemented
        return (
            self.space.to_dict() == other.space.to_dict()
            and np.array_equal(self.params, other.params)
            and np.array_equal(self.points, other.points)
        )

    def __repr__(self):
        return f"SampledCurve(N={len(self)}, [{self.a}, {self.b}], {self.space.kind})"


__all__ = [
    "MetricError",
    "MetricSpace",
    "Euclidean",
    "Snowflake",
    "DiscreteMetric",
    "TableMetric",
    "GraphMetric",
    "make_metric",
    "metric_from_dict",
    "AxiomReport",
    "check_metric_axioms",
    "SampledCurve",
]
