"""
Piecewise-injective modification of a sampled curve by longest-loop removal.

A loop is a grid segment ``[c, d]`` lying inside one kept range of the
carrier with ``rho(gamma(c), gamma(d)) <= eq_tol``. Loops are removed longest
first (by parameter length), leftmost on ties; removing one keeps ``c`` and
``d`` and drops the grid points strictly between them.
"""

from __future__ import annotations

import bisect
from dataclasses import dataclass, field

import numpy as np

from .metric import SampledCurve

EQ_TOL = 1e-9


@dataclass
class CarrierSet:
    """A compact subset of the grid: closed index ranges plus the removed holes.

    ``holes`` are kept in removal order; each hole ``(c, d)`` is a pair of grid
    indices whose open interval was removed.
    """

    ranges: list
    holes: list = field(default_factory=list)
    eq_tol: float = EQ_TOL

    def __post_init__(self):
        self.ranges = [(int(lo), int(hi)) for lo, hi in self.ranges]
        self.holes = [(int(c), int(d)) for c, d in self.holes]

    @classmethod
    def full(cls, curve: SampledCurve, eq_tol=EQ_TOL):
        return cls([(0, len(curve) - 1)], [], eq_tol)

    def indices(self) -> np.ndarray:
        if not self.ranges:
            return np.zeros(0, dtype=int)
        return np.concatenate([np.arange(lo, hi + 1) for lo, hi in self.ranges])

    def __contains__(self, i):
        k = bisect.bisect_right([lo for lo, _ in self.ranges], i) - 1
        return k >= 0 and self.ranges[k][0] <= i <= self.ranges[k][1]

    def __len__(self):
        return sum(hi - lo + 1 for lo, hi in self.ranges)

    def restrict(self, lo: int, hi: int) -> np.ndarray:
        """Carrier indices inside the grid window ``[lo, hi]``."""
        idx = self.indices()
        return idx[(idx >= lo) & (idx <= hi)]

    def to_dict(self, curve: SampledCurve) -> dict:
        t = curve.params
        return {
            "ranges": [[float(t[lo]), float(t[hi])] for lo, hi in self.ranges],
            "holes": [[float(t[c]), float(t[d])] for c, d in self.holes],
            "index_ranges": [list(r) for r in self.ranges],
            "index_holes": [list(h) for h in self.holes],
            "eq_tol": self.eq_tol,
        }

    @classmethod
    def from_dict(cls, d: dict, curve: SampledCurve | None = None) -> "CarrierSet":
        if "index_ranges" in d:
            return cls(d["index_ranges"], d.get("index_holes", []), d.get("eq_tol", EQ_TOL))
        if curve is None:
            raise ValueError("parameter-valued carrier needs the curve to locate grid indices")
        ranges = [(curve.index_of(a), curve.index_of(b)) for a, b in d["ranges"]]
        holes = [(curve.index_of(c), curve.index_of(e)) for c, e in d.get("holes", [])]
        return cls(ranges, holes, d.get("eq_tol", EQ_TOL))


def close_pairs(curve: SampledCurve, indices, eq_tol: float, block: int = 1024) -> np.ndarray:
    """All index pairs ``(i, j)``, ``i < j``, of ``indices`` whose images are within ``eq_tol``."""
    idx = np.asarray(indices, dtype=int)
    P = curve.points[idx]
    out = []
    for lo in range(0, len(idx), block):
        D = curve.space.pairwise(P[lo:lo + block], P)
        r, c = np.nonzero(D <= eq_tol)
        keep = c > r + lo
        out.append(np.column_stack([idx[r[keep] + lo], idx[c[keep]]]))
    if not out:
        return np.zeros((0, 2), dtype=int)
    return np.vstack(out)


def piecewise_injective_modification(curve: SampledCurve, eq_tol: float = EQ_TOL, carrier: CarrierSet | None = None) -> CarrierSet:
    """Remove loops longest-first until no loop lies inside a kept range.

    Starting from ``carrier`` (default: the whole grid) the result retains the
    endpoints and every previously kept hole.
    """
    if eq_tol < 0:
        raise ValueError("eq_tol must be nonnegative")
    start = carrier if carrier is not None else CarrierSet.full(curve, eq_tol)
    ranges = sorted(start.ranges)
    holes = list(start.holes)
    pairs = close_pairs(curve, start.indices(), eq_tol)
    if len(pairs):
        t = curve.params
        length = t[pairs[:, 1]] - t[pairs[:, 0]]
        scale = max(1.0, abs(t[-1] - t[0]))
        # lengths equal up to rounding count as ties, broken leftmost
        order = np.lexsort((pairs[:, 0], -np.round(length / scale, 12)))
        starts = [lo for lo, _ in ranges]
        # ranges only shrink, so a pair rejected once stays rejected
        for c, d in pairs[order]:
            k = bisect.bisect_right(starts, c) - 1
            if k < 0:
                continue
            lo, hi = ranges[k]
            if not (lo <= c and d <= hi):
                continue
            ranges[k:k + 1] = [(lo, int(c)), (int(d), hi)]
            starts[k:k + 1] = [lo, int(d)]
            holes.append((int(c), int(d)))
    return CarrierSet(ranges, holes, eq_tol)


@dataclass
class PiecewiseInjectiveReport:
    passed: bool
    compact: bool
    endpoints_retained: bool
    repeated_pairs: list
    connectivity_gaps: list
    connectivity_bound: float
    max_multiplicity: int

    def summary(self) -> str:
        bits = []
        if not self.compact:
            bits.append("carrier ranges are not sorted, disjoint grid ranges")
        if not self.endpoints_retained:
            bits.append("endpoints not retained")
        if self.repeated_pairs:
            bits.append(f"{len(self.repeated_pairs)} repeated-value pairs outside hole endpoints")
        if self.connectivity_gaps:
            bits.append(f"{len(self.connectivity_gaps)} image gaps above {self.connectivity_bound:.3g}")
        return "; ".join(bits) or "piecewise injective"


def verify_piecewise_injective(curve: SampledCurve, carrier: CarrierSet, eq_tol: float | None = None) -> PiecewiseInjectiveReport:
    """Check the three piecewise-injective properties on the sampled carrier.

    (a) the carrier is a finite union of sorted, disjoint closed grid ranges;
    (b) any two carrier points with images within ``eq_tol`` are the two ends of
    a hole, with no carrier point between them; (c) consecutive carrier points
    have image gaps at most ``2 * oscillation``, the sample-resolution stand-in
    for connectedness of every window image.
    """
    eq_tol = carrier.eq_tol if eq_tol is None else eq_tol
    n = len(curve)
    R = carrier.ranges
    compact = bool(R) and all(0 <= lo <= hi < n for lo, hi in R) and all(
        R[k][1] < R[k + 1][0] for k in range(len(R) - 1)
    )
    idx = carrier.indices()
    endpoints = bool(len(idx)) and idx[0] == 0 and idx[-1] == n - 1

    pos = {int(i): p for p, i in enumerate(idx)}
    hole_ends = {(R[k][1], R[k + 1][0]) for k in range(len(R) - 1)}
    repeated = []
    for c, d in close_pairs(curve, idx, eq_tol):
        c, d = int(c), int(d)
        if not (pos[d] == pos[c] + 1 and (c, d) in hole_ends):
            repeated.append((c, d))

    bound = 2.0 * curve.oscillation
    gaps = []
    if len(idx) > 1:
        step = np.diagonal(curve.space.pairwise(curve.points[idx[:-1]], curve.points[idx[1:]]))
        for k in np.nonzero(step > bound + 1e-12)[0]:
            gaps.append((int(idx[k]), int(idx[k + 1]), float(step[k])))

    return PiecewiseInjectiveReport(
        passed=compact and endpoints and not repeated and not gaps,
        compact=compact,
        endpoints_retained=bool(endpoints),
        repeated_pairs=repeated,
        connectivity_gaps=gaps,
        connectivity_bound=bound,
        max_multiplicity=multiplicity(curve, idx, eq_tol),
    )


def multiplicity(curve: SampledCurve, indices, eq_tol: float = EQ_TOL) -> int:
    """Largest number of points among ``indices`` sharing one image (within ``eq_tol``)."""
    idx = np.asarray(indices, dtype=int)
    best = 1 if len(idx) else 0
    for lo in range(0, len(idx), 1024):
        D = curve.space.pairwise(curve.points[idx[lo:lo + 1024]], curve.points[idx])
        best = max(best, int((D <= eq_tol).sum(axis=1).max()))
    return best


__all__ = [
    "EQ_TOL",
    "CarrierSet",
    "close_pairs",
    "piecewise_injective_modification",
    "PiecewiseInjectiveReport",
    "verify_piecewise_injective",
    "multiplicity",
]
