"""
Zig-zag partitions: Lipschitz extensions whose composition with a curve has
large variation.

Starting from the lower envelope at the first point, each step jumps to the
last grid point ``t`` where climbing (or descending) at full slope ``L`` from
the current value still stays inside the envelopes, and takes the value
reached by that slope. Step values therefore differ by exactly
``L * rho`` and the sum telescopes against the triangle inequality.

On a grid the value reached at ``t_{i+1}`` is generally a little inside the
targeted envelope rather than on it; the offset is logged per step. Using the
slope value instead of the envelope value is what keeps every adjacent pair
exactly ``L``-Lipschitz. When a step cannot move at all (the condition already
fails at the next grid point) the scan advances one point, assigns the
targeted envelope value there, and logs the shortfall ``L rho - |dh|`` as
slack.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .extension import ExtensionField, PartialLipschitzFunction
from .metric import SampledCurve
from .modification import EQ_TOL, CarrierSet, piecewise_injective_modification

SUPPORT_TOL = 1e-12


class WitnessError(ValueError):
    """Precondition failure of a witness construction."""


class ResolutionError(WitnessError):
    """The grid is too coarse for the requested construction."""

    def __init__(self, message, ratio=None):
        super().__init__(message)
        self.ratio = ratio


@dataclass
class StepRecord:
    step: int
    start: int
    end: int
    target: str
    value: float
    envelope: float
    offset: float
    slack: float
    stalled: bool
    final: bool
    L: float
    segment: int = 0

    def to_dict(self):
        return dict(self.__dict__)


@dataclass
class Partition:
    indices: np.ndarray
    params: np.ndarray
    carrier: CarrierSet | None = None

    def __len__(self):
        return len(self.indices)


@dataclass(eq=False)
class ZigzagResult:
    partition: Partition
    values: np.ndarray
    extended: PartialLipschitzFunction
    achieved_variation: float
    target: float
    L: float
    slack_log: list = field(default_factory=list)
    segments: list = field(default_factory=list)
    ladder: list = field(default_factory=list)

    @property
    def total_slack(self) -> float:
        return float(sum(r.slack for r in self.slack_log))

    @property
    def n_steps(self) -> int:
        return len(self.slack_log)

    def recompute_variation(self, curve: SampledCurve) -> float:
        """Variation recomputed from the extended function's stored values."""
        vals = []
        for i in self.partition.indices:
            v = self.extended.lookup(_point(curve, i), tol=0.0)
            if v is None:
                raise WitnessError(f"partition point {i} is missing from the extended support")
            vals.append(v)
        return float(np.abs(np.diff(vals)).sum())

    def to_dict(self) -> dict:
        return {
            "partition": self.partition.params.tolist(),
            "indices": self.partition.indices.tolist(),
            "values": self.values.tolist(),
            "L": self.L,
            "target": self.target,
            "achieved_variation": self.achieved_variation,
            "total_slack": self.total_slack,
            "segments": [list(s) for s in self.segments],
            "ladder": list(self.ladder),
            "slack_log": [r.to_dict() for r in self.slack_log],
            "extended": self.extended.to_dict(),
        }

    @classmethod
    def from_dict(cls, d: dict, curve: SampledCurve) -> "ZigzagResult":
        return cls(
            partition=Partition(np.asarray(d["indices"], dtype=int), np.asarray(d["partition"], dtype=float)),
            values=np.asarray(d["values"], dtype=float),
            extended=PartialLipschitzFunction.from_dict(d["extended"], curve.space),
            achieved_variation=d["achieved_variation"],
            target=d["target"],
            L=d["L"],
            slack_log=[StepRecord(**r) for r in d["slack_log"]],
            segments=[tuple(s) for s in d.get("segments", [])],
            ladder=list(d.get("ladder", [])),
        )


def _point(curve, i):
    return curve.points[int(i)][None, :]


def _scan(pf, curve, idx, L, *, allow_stalls=True, segment=0):
    """Run the zig-zag over grid indices ``idx`` (increasing) from ``idx[0]`` to ``idx[-1]``.

    Returns (positions into idx, values, step records). The envelopes are those
    of ``pf`` with constant ``L``; with an empty ``pf`` the first point is
    anchored at value 0 and the envelopes are the cones around it.
    """
    P = curve.points[idx]
    if len(pf) == 0:
        pf = PartialLipschitzFunction(P[:1], [0.0], 0.0, curve.space)
    lo, up = ExtensionField(pf, L).envelopes(P)
    last = len(idx) - 1
    pos, v = 0, float(lo[0])
    positions, values, log = [0], [v], []
    going_up = True
    while pos < last:
        row = curve.space.pairwise(P[pos:pos + 1], P[pos:])[0]
        if going_up:
            ok = v + L * row <= up[pos:]
        else:
            ok = v - L * row >= lo[pos:]
        hits = np.nonzero(ok)[0]
        k = int(hits[-1]) if len(hits) else 0
        stalled = k == 0
        if stalled:
            if not allow_stalls:
                raise ResolutionError(f"zig-zag stalled at grid index {idx[pos]}")
            k = 1
        nxt = pos + k
        rule = v + L * row[k] if going_up else v - L * row[k]
        env = up[nxt] if going_up else lo[nxt]
        if nxt == last:
            new = float(min(max(rule, lo[nxt]), up[nxt]))
        elif stalled:
            new = float(env)
        else:
            new = float(rule)
        log.append(StepRecord(
            step=len(log),
            start=int(idx[pos]),
            end=int(idx[nxt]),
            target="upper" if going_up else "lower",
            value=new,
            envelope=float(env),
            offset=abs(float(env) - new),
            slack=abs(L * float(row[k]) - abs(new - v)),
            stalled=stalled,
            final=nxt == last,
            L=float(L),
            segment=segment,
        ))
        positions.append(nxt)
        values.append(new)
        pos, v = nxt, new
        going_up = not going_up
    return positions, values, log


def _prepare(pf, L):
    """Record the inferred constant on ``pf`` and check ``L`` exceeds it."""
    Lp = pf.infer_constant() if len(pf) else 0.0
    if not L > Lp:
        raise WitnessError(f"L = {L} must exceed the support's Lipschitz constant {Lp}")
    return PartialLipschitzFunction(pf.support, pf.values, Lp, pf.space), Lp


def _check_far(pf, curve, idx):
    if len(pf) == 0:
        return
    d = pf.distance_to_support(curve.points[idx]).min()
    if d <= SUPPORT_TOL:
        raise WitnessError(f"curve comes within {d:.3g} of the support")


def _extend_with(pf, curve, indices, values, L):
    """Append partition points missing from the support."""
    new_i, new_v = [], []
    for i, v in zip(indices, values):
        if pf.lookup(_point(curve, i), tol=0.0) is None:
            new_i.append(int(i))
            new_v.append(v)
    if not new_i:
        return PartialLipschitzFunction(pf.support, pf.values, L, pf.space)
    return pf.with_points(curve.points[new_i], new_v, L)


def _result(curve, pf, idx, positions, values, log, L, target, **extra):
    part = idx[np.asarray(positions, dtype=int)]
    ext = _extend_with(pf, curve, part, values, L)
    vals = np.asarray(values, dtype=float)
    res = ZigzagResult(
        partition=Partition(part, curve.params[part], extra.pop("carrier", None)),
        values=vals,
        extended=ext,
        achieved_variation=float(np.abs(np.diff(vals)).sum()),
        target=float(target),
        L=float(L),
        slack_log=log,
        **extra,
    )
    return res


def zigzag(pf: PartialLipschitzFunction, curve: SampledCurve, L: float, *, check: bool = True, allow_stalls: bool = True) -> ZigzagResult:
    """Zig-zag witness on an injective curve kept away from the support.

    The partition runs from the first to the last grid point, the extended
    function is ``L``-Lipschitz on ``X' + gamma(T)`` and the variation is at
    least ``L * rho(gamma(a), gamma(b)) - total_slack``.
    """
    idx = np.arange(len(curve))
    pf, _ = _prepare(pf, L)
    if check:
        _check_far(pf, curve, idx)
        if not curve.is_injective():
            raise WitnessError("curve is not injective on its grid")
    positions, values, log = _scan(pf, curve, idx, L, allow_stalls=allow_stalls)
    target = L * float(curve.dist(0, len(curve) - 1)[0, 0])
    return _result(curve, pf, idx, positions, values, log, L, target)


def farthest_pair(curve: SampledCurve, idx) -> tuple:
    """First (row-major) pair ``a < b`` of ``idx`` realising the grid diameter."""
    idx = np.asarray(idx, dtype=int)
    best, pair = -1.0, (int(idx[0]), int(idx[0]))
    P = curve.points[idx]
    for lo in range(0, len(idx), 512):
        D = curve.space.pairwise(P[lo:lo + 512], P)
        rows = lo + np.arange(D.shape[0])
        D = np.where(np.arange(len(idx))[None, :] > rows[:, None], D, -1.0)
        k = int(np.argmax(D))
        if D.flat[k] > best:
            r, c = np.unravel_index(k, D.shape)
            best, pair = float(D.flat[k]), (int(idx[lo + r]), int(idx[c]))
    return pair[0], pair[1], max(best, 0.0)


def select_inner_segments(curve: SampledCurve, S, theta: float, carrier=None) -> list:
    """For each gap of the partition ``S`` pick the farthest-apart interior grid pair.

    ``S`` holds grid indices; interior points are those strictly between
    consecutive entries of ``S`` (restricted to ``carrier`` indices when
    given). Each chosen pair must satisfy
    ``rho(gamma(a_i), gamma(b_i)) >= sqrt(theta) * rho(gamma(s_{i-1}), gamma(s_i))``.

    Raises
    ------
    ResolutionError
        When some gap has no admissible pair; ``.ratio`` is the worst best
        ratio over the failing gaps.
    """
    if not 0.0 < theta < 1.0:
        raise ValueError(f"theta must lie in (0, 1), got {theta}")
    S = np.unique(np.asarray(S, dtype=int))
    pool = np.arange(len(curve)) if carrier is None else np.asarray(carrier, dtype=int)
    root = math.sqrt(theta)
    segments, failures = [], []
    for s0, s1 in zip(S[:-1], S[1:]):
        need = float(curve.dist(s0, s1)[0, 0])
        inner = pool[(pool > s0) & (pool < s1)]
        if len(inner) < 2:
            if need > 0:
                failures.append((int(s0), int(s1), 0.0))
            continue
        a_i, b_i, best = farthest_pair(curve, inner)
        if best < root * need - 1e-12:
            failures.append((int(s0), int(s1), best / need))
            continue
        segments.append((a_i, b_i))
    if failures:
        worst = min(f[2] for f in failures)
        raise ResolutionError(
            f"{len(failures)} gap(s) have no interior pair reaching sqrt(theta) = {root:.4f}; "
            f"worst ratio {worst:.4f}",
            ratio=worst,
        )
    return segments


def constant_ladder(L_base: float, L: float, m: int, theta: float) -> list:
    """``m`` uniformly spaced constants strictly inside ``(max(L', sqrt(theta) L), L)``."""
    if m < 1:
        raise ValueError("ladder needs m >= 1")
    low = max(L_base, math.sqrt(theta) * L)
    if not L > low:
        raise ValueError(f"empty ladder interval ({low}, {L})")
    return [low + k * (L - low) / (m + 1) for k in range(1, m + 1)]


def _endpoint_value(pf, curve, i, L, neighbour):
    """Value for an endpoint of the combined partition (any envelope value is admissible)."""
    x = _point(curve, i)
    stored = pf.lookup(x, tol=0.0)
    if stored is not None:
        return stored
    if len(pf) == 0:
        return 0.0 if neighbour is None else neighbour
    lo, up = ExtensionField(pf, L).envelopes(x)
    if neighbour is None:
        return float(lo[0])
    # the farther envelope end adds the most variation
    return float(up[0] if up[0] - neighbour >= neighbour - lo[0] else lo[0])


def _combine(pf, curve, L, parts, target, *, carrier=None, segments=(), ladder=()):
    """Join sub-partitions into ``{a} + T_1 + ... + T_m + {b}``."""
    first, last = 0, len(curve) - 1
    idx, vals, log = [], [], []
    for res in parts:
        idx.extend(res.partition.indices.tolist())
        vals.extend(res.values.tolist())
        log.extend(res.slack_log)
    if not idx or idx[0] != first:
        v = _endpoint_value(pf, curve, first, L, vals[0] if vals else None)
        pf = _extend_with(pf, curve, [first], [v], L)
        idx.insert(0, first)
        vals.insert(0, v)
    if idx[-1] != last:
        v = _endpoint_value(pf, curve, last, L, vals[-1])
        pf = _extend_with(pf, curve, [last], [v], L)
        idx.append(last)
        vals.append(v)
    pf = PartialLipschitzFunction(pf.support, pf.values, L, pf.space)
    positions = np.arange(len(idx))
    return _result(curve, pf, np.asarray(idx), positions, vals, log, L, target,
                   carrier=carrier, segments=list(segments), ladder=list(ladder))


def staged_witness(pf: PartialLipschitzFunction, curve: SampledCurve, L: float, theta: float, *, check: bool = True) -> ZigzagResult:
    """Staged zig-zag for a finite support that may touch an injective curve.

    Grid points lying on the support split ``[a, b]``; in every gap an inner
    segment is zig-zagged with its own constant from a ladder below ``L``, the
    support growing as it goes. The result is ``L``-Lipschitz with variation at
    least ``theta * L * rho(gamma(a), gamma(b)) - total_slack``.
    """
    if not 0.0 < theta < 1.0:
        raise ValueError(f"theta must lie in (0, 1), got {theta}")
    pf, Lp = _prepare(pf, L)
    if check and not curve.is_injective():
        raise WitnessError("curve is not injective on its grid")
    n = len(curve)
    on_support = np.nonzero(pf.distance_to_support(curve.points) == 0)[0]
    S = np.union1d([0, n - 1], on_support)
    segments = select_inner_segments(curve, S, theta)
    target = theta * L * float(curve.dist(0, n - 1)[0, 0])
    ladder = constant_ladder(Lp, L, len(segments), theta) if segments else []
    parts, current = [], pf
    for k, ((a_i, b_i), L_i) in enumerate(zip(segments, ladder)):
        sub = np.arange(a_i, b_i + 1)
        _check_far(current, curve, sub)
        positions, values, log = _scan(current, curve, sub, L_i, segment=k)
        res = _result(curve, current, sub, positions, values, log, L_i, L_i * float(curve.dist(a_i, b_i)[0, 0]))
        parts.append(res)
        current = res.extended
    return _combine(current, curve, L, parts, target, segments=segments, ladder=ladder)


def _carrier_scan(pf, curve, carrier_idx, L, segment=0):
    a, b, diam = farthest_pair(curve, carrier_idx)
    if diam == 0:
        sub = np.asarray([a])
        if len(pf):
            v = float(ExtensionField(pf, L).lower(_point(curve, a))[0])
        else:
            v = 0.0
        return sub, [0], [v], [], 0.0
    sub = carrier_idx[(carrier_idx >= a) & (carrier_idx <= b)]
    positions, values, log = _scan(pf, curve, sub, L, segment=segment)
    return sub, positions, values, log, L * diam


def zigzag_on_carrier(pf: PartialLipschitzFunction, curve: SampledCurve, L: float, carrier: CarrierSet | None = None, *, check: bool = True) -> ZigzagResult:
    """Zig-zag over a piecewise-injective carrier between its diameter endpoints.

    The variation is at least ``L * diam(gamma(A)) - total_slack``. A carrier
    with a single-point image gives a one-point partition and variation 0.
    """
    carrier = carrier if carrier is not None else CarrierSet.full(curve)
    idx = carrier.indices()
    pf, _ = _prepare(pf, L)
    if check:
        _check_far(pf, curve, idx)
    sub, positions, values, log, target = _carrier_scan(pf, curve, idx, L)
    return _result(curve, pf, sub, positions, values, log, L, target, carrier=carrier)


def staged_witness_general(pf: PartialLipschitzFunction, curve: SampledCurve, L: float, theta: float, eq_tol: float = EQ_TOL) -> ZigzagResult:
    """Staged witness for an arbitrary sampled curve via its piecewise-injective modification."""
    if not 0.0 < theta < 1.0:
        raise ValueError(f"theta must lie in (0, 1), got {theta}")
    pf, Lp = _prepare(pf, L)
    n = len(curve)
    carrier = piecewise_injective_modification(curve, eq_tol)
    A = carrier.indices()
    on_support = A[pf.distance_to_support(curve.points[A]) == 0]
    S = np.union1d([0, n - 1], on_support)
    segments = select_inner_segments(curve, S, theta, carrier=A)
    target = theta * L * float(curve.dist(0, n - 1)[0, 0])
    ladder = constant_ladder(Lp, L, len(segments), theta) if segments else []
    parts, current = [], pf
    for k, ((a_i, b_i), L_i) in enumerate(zip(segments, ladder)):
        sub_carrier = A[(A >= a_i) & (A <= b_i)]
        _check_far(current, curve, sub_carrier)
        sub, positions, values, log, seg_target = _carrier_scan(current, curve, sub_carrier, L_i, segment=k)
        res = _result(curve, current, sub, positions, values, log, L_i, seg_target)
        parts.append(res)
        current = res.extended
    return _combine(current, curve, L, parts, target, carrier=carrier, segments=segments, ladder=ladder)


__all__ = [
    "WitnessError",
    "ResolutionError",
    "StepRecord",
    "Partition",
    "ZigzagResult",
    "zigzag",
    "select_inner_segments",
    "constant_ladder",
    "staged_witness",
    "farthest_pair",
    "zigzag_on_carrier",
    "staged_witness_general",
]
