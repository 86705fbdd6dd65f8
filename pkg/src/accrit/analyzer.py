"""
Absolute-continuity analysis of sampled curves.

The modulus ``delta -> max sum rho(gamma(a_i), gamma(b_i))`` over disjoint
grid intervals of total length ``< delta`` is computed on grid cells: splitting
an interval into its cells keeps its length and, by the triangle inequality,
never lowers its gap, so optimal families can always be taken to consist of
cells. Selected cells are merged back into longer intervals whenever merging
loses nothing.

A curve that keeps a gap above ``epsilon`` on families of vanishing length is
turned into a single 2-Lipschitz witness function by running the staged
zig-zag on every interval of those families with constants ``2 - 1/i``; the
resulting certificate can be re-checked from its stored values alone.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .extension import VALUE_TOL, ExtensionField, PartialLipschitzFunction, extend_at_point
from .metric import Euclidean, SampledCurve
from .modification import EQ_TOL
from .zigzag import WitnessError, staged_witness_general

logger = logging.getLogger(__name__)

CERTIFICATE_VERSION = 1
WITNESS_CONSTANT = 2.0


class BudgetExceeded(RuntimeError):
    """Exact modulus computation refused: the DP table would be too large."""


class ViolationNotFound(Exception):
    """No violating family for some requested ``n``.

    This is grid-scale evidence of absolute continuity, not a guarantee.
    ``best_gaps`` maps every requested ``n`` to the best total gap found under
    the length budget ``1/n``; ``failed`` lists the ``n`` that did not exceed
    ``epsilon``.
    """

    def __init__(self, epsilon, best_gaps, failed, cap):
        self.epsilon = epsilon
        self.best_gaps = best_gaps
        self.failed = failed
        self.cap = cap
        n = failed[0]
        super().__init__(
            f"no family with total gap > {epsilon} at budget 1/{n}: best gap {best_gaps[n]:.6g}"
            + (f" (n above the grid cap {cap})" if n > cap else "")
        )


@dataclass
class IntervalFamily:
    """Disjoint grid intervals ``(a_i, b_i)`` given by index pairs."""

    intervals: list
    total_length: float
    total_gap: float
    n: int | None = None
    epsilon: float | None = None

    @classmethod
    def from_intervals(cls, curve: SampledCurve, intervals, n=None):
        iv = sorted((int(i), int(j)) for i, j in intervals)
        if not iv:
            return cls([], 0.0, 0.0, n)
        ia = np.array([i for i, _ in iv])
        ib = np.array([j for _, j in iv])
        length = float(np.sum(curve.params[ib] - curve.params[ia]))
        gap = float(np.sum(np.diagonal(curve.space.pairwise(curve.points[ia], curve.points[ib]))))
        return cls(iv, length, gap, n)

    @classmethod
    def from_cells(cls, curve: SampledCurve, cells, n=None, tol: float = 1e-12):
        """Merge adjacent selected cells when the merged gap equals the summed gaps."""
        cells = sorted(int(j) for j in cells)
        steps = curve.step_distances
        merged = []
        for j in cells:
            if merged:
                lo, hi, g = merged[-1]
                if hi == j:
                    whole = float(curve.dist(lo, j + 1)[0, 0])
                    if whole >= g + steps[j] - tol:
                        merged[-1] = (lo, j + 1, whole)
                        continue
            merged.append((j, j + 1, float(steps[j])))
        return cls.from_intervals(curve, [(lo, hi) for lo, hi, _ in merged], n)

    def is_disjoint(self) -> bool:
        return all(self.intervals[k][1] <= self.intervals[k + 1][0] for k in range(len(self.intervals) - 1))

    def to_dict(self, curve: SampledCurve) -> dict:
        t = curve.params
        return {
            "n": self.n,
            "intervals": [[float(t[i]), float(t[j])] for i, j in self.intervals],
            "total_length": self.total_length,
            "total_gap": self.total_gap,
            "epsilon": self.epsilon,
        }

    @classmethod
    def from_dict(cls, d: dict, curve: SampledCurve) -> "IntervalFamily":
        iv = [(curve.index_of(a), curve.index_of(b)) for a, b in d["intervals"]]
        fam = cls.from_intervals(curve, iv, d.get("n"))
        fam.epsilon = d.get("epsilon")
        return fam


@dataclass
class ModulusEntry:
    delta: float
    best_gap: float
    family: IntervalFamily


@dataclass
class ACReport:
    entries: list
    verdict: str
    mode: str
    budget: dict = field(default_factory=dict)

    @property
    def deltas(self):
        return [e.delta for e in self.entries]

    @property
    def best_gaps(self):
        return [e.best_gap for e in self.entries]

    def to_dict(self, curve: SampledCurve) -> dict:
        return {
            "mode": self.mode,
            "verdict": self.verdict,
            "budget": self.budget,
            "entries": [
                {"delta": e.delta, "best_gap": e.best_gap, "family": e.family.to_dict(curve)}
                for e in self.entries
            ],
        }


def _select_exact(gaps, widths, delta, max_states):
    """0/1 knapsack over cells: maximise summed gap with summed width ``< delta``."""
    cand = np.nonzero(gaps > 0)[0]
    if len(cand) == 0:
        return np.zeros(0, dtype=int), True
    q = widths.min()
    units = widths / q
    exact = bool(np.all(np.abs(units - np.round(units)) <= 1e-6))
    if exact:
        w = np.round(units).astype(int)
    else:
        q = q / 8.0
        w = np.ceil(widths / q - 1e-9).astype(int)
    cap = max(int(math.ceil(delta / q)) - 1, 0)
    w_c, g_c = w[cand], gaps[cand]
    if np.all(w_c == w_c[0]):
        # equal weights: the optimum is simply the largest gaps
        k = min(cap // int(w_c[0]), len(cand))
        order = np.lexsort((cand, -g_c))
        chosen = cand[order[:k]]
    else:
        states = len(cand) * (cap + 1)
        if states > max_states:
            raise BudgetExceeded(f"exact modulus needs {states} DP states (limit {int(max_states)})")
        dp = np.zeros(cap + 1)
        keep = np.zeros((len(cand), cap + 1), dtype=bool)
        for r, (wj, gj) in enumerate(zip(w_c, g_c)):
            if wj > cap:
                continue
            take = dp[:-wj] + gj if wj else dp + gj
            better = take > dp[wj:]
            keep[r, wj:] = better
            dp[wj:] = np.where(better, take, dp[wj:])
        c, picked = cap, []
        for r in range(len(cand) - 1, -1, -1):
            if keep[r, c]:
                picked.append(cand[r])
                c -= w_c[r]
        chosen = np.asarray(sorted(picked), dtype=int)
    return _enforce_budget(chosen, gaps, widths, delta), exact


def _select_greedy(gaps, widths, delta):
    order = np.lexsort((np.arange(len(gaps)), -(gaps / widths)))
    total, chosen = 0.0, []
    for j in order:
        if gaps[j] <= 0:
            break
        if total + widths[j] < delta:
            chosen.append(j)
            total += widths[j]
    return _enforce_budget(np.asarray(sorted(chosen), dtype=int), gaps, widths, delta)


def _enforce_budget(chosen, gaps, widths, delta):
    # unit rounding can leave the true float length at delta; drop the weakest cells
    chosen = list(chosen)
    while chosen and float(np.sum(widths[chosen])) >= delta:
        chosen.remove(min(chosen, key=lambda j: gaps[j]))
    return np.asarray(sorted(chosen), dtype=int)


def ac_modulus(curve: SampledCurve, deltas, mode: str = "exact", epsilon: float | None = None, max_states: float = 2e7) -> ACReport:
    """Best total gap over disjoint grid-interval families of total length ``< delta``.

    ``mode="exact"`` solves the cell knapsack exactly (exact for grids whose
    steps are integer multiples of the smallest step); ``mode="greedy"`` takes
    cells by decreasing gap/length density. The reported best gaps are made
    nondecreasing in ``delta`` (a family admissible for a smaller budget is
    admissible for a larger one).
    """
    if mode not in ("exact", "greedy"):
        raise ValueError(f"unknown mode {mode!r}")
    deltas = [float(d) for d in deltas]
    span = curve.b - curve.a
    for d in deltas:
        if not 0 < d <= span * (1 + 1e-12):
            raise ValueError(f"delta must lie in (0, b - a], got {d}")
    gaps = curve.step_distances
    widths = np.diff(curve.params)
    results, exact_all = {}, True
    for d in sorted(set(deltas)):
        if mode == "exact":
            cells, exact = _select_exact(gaps, widths, d, max_states)
            exact_all &= exact
        else:
            cells = _select_greedy(gaps, widths, d)
        results[d] = IntervalFamily.from_cells(curve, cells)
    best = None
    for d in sorted(results):
        fam = results[d]
        if best is not None and best.total_gap > fam.total_gap:
            results[d] = best
        else:
            best = fam
    entries = [ModulusEntry(d, results[d].total_gap, results[d]) for d in deltas]
    if epsilon is None:
        verdict = "undetermined"
    else:
        verdict = "violation" if all(e.best_gap > epsilon for e in entries) else "ac-consistent"
    budget = {"cells": int(len(gaps)), "deltas": len(deltas), "exact": exact_all if mode == "exact" else False}
    return ACReport(entries, verdict, mode, budget)


def resolution_cap(curve: SampledCurve) -> int:
    """Largest ``n`` whose budget ``1/n`` still spans 3 grid steps."""
    return int(math.floor(1.0 / (3.0 * float(np.min(np.diff(curve.params))))))


def find_violating_families(curve: SampledCurve, epsilon: float, n_values, mode: str = "exact") -> list:
    """Families with total length ``< 1/n`` and total gap ``> epsilon`` for every ``n``.

    Raises
    ------
    ViolationNotFound
        If some ``n`` has no such family at grid scale.
    """
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    n_values = sorted(int(n) for n in n_values)
    cap = resolution_cap(curve)
    span = curve.b - curve.a
    usable = [n for n in n_values if n <= cap]
    deltas = [min(1.0 / n, span) for n in usable]
    report = ac_modulus(curve, deltas, mode=mode) if usable else None
    families, best_gaps, failed = [], {}, []
    for n in n_values:
        if n > cap:
            best_gaps[n] = 0.0
            failed.append(n)
            continue
        entry = report.entries[usable.index(n)]
        fam = IntervalFamily(entry.family.intervals, entry.family.total_length, entry.family.total_gap, n, epsilon)
        best_gaps[n] = fam.total_gap
        if fam.total_length < 1.0 / n and fam.total_gap > epsilon:
            families.append(fam)
        else:
            failed.append(n)
    if failed:
        raise ViolationNotFound(epsilon, best_gaps, failed, cap)
    return families


def witness_ladder(k: int) -> float:
    """Constant for the ``k``-th processed interval: ``1 = L_1 < L_2 < ... < 2``."""
    return WITNESS_CONSTANT - 1.0 / k


@dataclass
class IntervalRecord:
    a: int
    b: int
    L: float
    status: str
    partition: np.ndarray
    values: np.ndarray
    variation: float
    slack: float
    message: str = ""


@dataclass
class FamilyRecord:
    n: int
    intervals: list
    total_length: float
    total_gap: float
    variation_sum: float
    slack: float


@dataclass(eq=False)
class WitnessCertificate:
    epsilon: float
    theta: float
    ladder: list
    witness: PartialLipschitzFunction
    families: list
    log: list = field(default_factory=list)

    def extension_field(self) -> ExtensionField:
        """The witness as a function on the whole space (its upper envelope)."""
        return ExtensionField(self.witness, WITNESS_CONSTANT)

    @property
    def total_slack(self) -> float:
        return max((f.slack for f in self.families), default=0.0)

    def to_dict(self, curve: SampledCurve) -> dict:
        t = curve.params

        def interval(r: IntervalRecord):
            return {
                "a": float(t[r.a]),
                "b": float(t[r.b]),
                "L": r.L,
                "status": r.status,
                "partition": [float(t[i]) for i in r.partition],
                "values": [float(v) for v in r.values],
                "variation": r.variation,
                "slack": r.slack,
            }

        return {
            "version": CERTIFICATE_VERSION,
            "epsilon": self.epsilon,
            "theta": self.theta,
            "ladder": list(self.ladder),
            "witness": self.witness.to_dict(),
            "families": [
                {
                    "n": f.n,
                    "total_length": f.total_length,
                    "total_gap": f.total_gap,
                    "variation_sum": f.variation_sum,
                    "slack": f.slack,
                    "intervals": [interval(r) for r in f.intervals],
                }
                for f in self.families
            ],
            "log": list(self.log),
        }


def _seed_or_fallback(pf, curve, ia, ib, L, seed):
    """Two-point partition ``{a_i, b_i}``: the seed rule, or envelope values when finer work is impossible."""
    x_a, x_b = curve.points[ia][None, :], curve.points[ib][None, :]
    if seed:
        rho = float(curve.dist(ia, ib)[0, 0])
        return PartialLipschitzFunction(np.vstack([x_a, x_b]), [0.0, rho], L, curve.space), [0.0, rho]
    vals = []
    for x in (x_a, x_b):
        stored = pf.lookup(x, tol=0.0)
        if stored is None:
            lo, up = ExtensionField(pf, L).envelopes(x)
            ref = vals[0] if vals else None
            v = float(lo[0]) if ref is None else float(up[0] if up[0] - ref >= ref - lo[0] else lo[0])
            pf = extend_at_point(ExtensionField(pf, L), x, v)
            stored = v
        vals.append(stored)
    return PartialLipschitzFunction(pf.support, pf.values, L, pf.space), vals


def build_global_witness(curve: SampledCurve, families, theta: float = 0.9, *, epsilon: float | None = None, eq_tol: float = EQ_TOL) -> WitnessCertificate:
    """One 2-Lipschitz function whose composed variation is large on every family.

    All intervals of all families are numbered once (sorted by position). The
    first nondegenerate interval seeds the function with ``0`` and
    ``rho(gamma(a_1), gamma(b_1))``; every later one gets a staged zig-zag with
    constant ``2 - 1/i`` on its sub-curve, growing one shared support.
    Intervals whose endpoints have equal images are skipped.
    """
    families = list(families)
    if not families:
        raise ValueError("need at least one interval family")
    if not 0.0 < theta < 1.0:
        raise ValueError(f"theta must lie in (0, 1), got {theta}")
    if epsilon is None:
        found = [f.epsilon for f in families if f.epsilon is not None]
        # without a search threshold the weakest family gap is the best epsilon on offer
        epsilon = max(found) if found else min(f.total_gap for f in families)
    keys = sorted({tuple(iv) for f in families for iv in f.intervals})
    pf = PartialLipschitzFunction.empty(curve.space)
    ladder, records, log = [], {}, []
    for ia, ib in keys:
        rho = float(curve.dist(ia, ib)[0, 0])
        if rho == 0:
            msg = f"interval [{curve.params[ia]}, {curve.params[ib]}] skipped: equal endpoint images"
            logger.info(msg)
            log.append(msg)
            records[(ia, ib)] = IntervalRecord(ia, ib, 0.0, "skipped", np.array([], dtype=int), np.array([]), 0.0, 0.0, msg)
            continue
        L_i = witness_ladder(len(ladder) + 1)
        ladder.append(L_i)
        if len(ladder) == 1:
            pf, vals = _seed_or_fallback(pf, curve, ia, ib, L_i, seed=True)
            part, status, slack, message = np.array([ia, ib]), "seed", 0.0, ""
        else:
            try:
                res = staged_witness_general(pf, curve.segment(ia, ib), L_i, theta, eq_tol)
                pf = res.extended
                part, vals, status, slack, message = res.partition.indices + ia, res.values, "staged", res.total_slack, ""
            except WitnessError as exc:
                # grid too coarse inside this interval; keep an admissible two-point partition
                message = f"interval [{curve.params[ia]}, {curve.params[ib]}] unresolved: {exc}"
                logger.warning(message)
                log.append(message)
                pf, vals = _seed_or_fallback(pf, curve, ia, ib, L_i, seed=False)
                part, status, slack = np.array([ia, ib]), "unresolved", 0.0
        vals = np.asarray(vals, dtype=float)
        records[(ia, ib)] = IntervalRecord(ia, ib, L_i, status, np.asarray(part, dtype=int), vals,
                                           float(np.abs(np.diff(vals)).sum()), float(slack), message)
    fam_records = []
    for f in families:
        recs = [records[tuple(iv)] for iv in sorted(tuple(iv) for iv in f.intervals)]
        fam_records.append(FamilyRecord(
            n=f.n,
            intervals=recs,
            total_length=f.total_length,
            total_gap=f.total_gap,
            variation_sum=float(sum(r.variation for r in recs)),
            slack=float(sum(r.slack for r in recs)),
        ))
    witness = PartialLipschitzFunction(pf.support, pf.values, WITNESS_CONSTANT, curve.space)
    return WitnessCertificate(float(epsilon), float(theta), ladder, witness, fam_records, log)


@dataclass
class Failure:
    kind: str
    message: str
    detail: object = None


@dataclass
class CertificateVerdict:
    passed: bool
    failures: list

    @property
    def kinds(self):
        return sorted({f.kind for f in self.failures})

    def __bool__(self):
        return self.passed


def verify_certificate(curve: SampledCurve, certificate, tol: float = VALUE_TOL) -> CertificateVerdict:
    """Re-check a certificate from its stored numbers only.

    Failure kinds: ``structure``, ``lipschitz`` (witness not 2-Lipschitz),
    ``disjoint``, ``length`` (family length not below ``1/n`` or misreported),
    ``gap``, ``partition`` (points off the interval/grid/support, or a recorded
    variation that does not match the stored values), ``slack`` and
    ``variation`` (family variation not above ``theta * epsilon - slack``).
    """
    cert = certificate.to_dict(curve) if isinstance(certificate, WitnessCertificate) else certificate
    failures = []

    def fail(kind, msg, detail=None):
        failures.append(Failure(kind, msg, detail))

    if cert.get("version") != CERTIFICATE_VERSION:
        fail("structure", f"unsupported certificate version {cert.get('version')!r}")
        return CertificateVerdict(False, failures)
    eps, theta = float(cert["epsilon"]), float(cert["theta"])
    ladder = list(cert["ladder"])
    if not (0 < theta < 1) or eps <= 0:
        fail("structure", "theta must lie in (0, 1) and epsilon be positive")
    if ladder and (ladder[0] != 1.0 or any(b <= a for a, b in zip(ladder, ladder[1:])) or ladder[-1] >= WITNESS_CONSTANT):
        fail("structure", "ladder must start at 1 and increase strictly below 2")

    try:
        witness = PartialLipschitzFunction.from_dict(cert["witness"], curve.space)
    except Exception as exc:  # malformed witness block
        fail("structure", f"witness unreadable: {exc}")
        return CertificateVerdict(False, failures)
    if witness.constant > WITNESS_CONSTANT + tol:
        fail("structure", f"declared witness constant {witness.constant} exceeds 2")
    X, h = witness.support, witness.values
    for lo in range(0, len(X), 1024):
        D = curve.space.pairwise(X[lo:lo + 1024], X)
        excess = np.abs(h[lo:lo + 1024, None] - h[None, :]) - WITNESS_CONSTANT * D
        k = int(np.argmax(excess))
        if excess.flat[k] > tol:
            i, j = np.unravel_index(k, excess.shape)
            fail("lipschitz", f"support pair ({lo + i}, {j}) violates the 2-Lipschitz bound by {excess.flat[k]:.3g}",
                 (int(lo + i), int(j)))
            break

    def value_at(t):
        i = curve.index_of(t)
        if len(X) == 0:
            return None
        d = curve.space.pairwise(X, curve.points[i][None, :])[:, 0]
        k = int(np.argmin(d))
        return float(h[k]) if d[k] <= 1e-12 else None

    for fam in cert["families"]:
        n = int(fam["n"])
        ivs = fam["intervals"]
        ends = []
        try:
            for iv in ivs:
                ends.append((curve.index_of(iv["a"]), curve.index_of(iv["b"])))
        except ValueError as exc:
            fail("partition", f"family n={n}: {exc}")
            continue
        if any(b <= a for a, b in ends) or any(ends[k][1] > ends[k + 1][0] for k in range(len(ends) - 1)):
            fail("disjoint", f"family n={n}: intervals overlap or are not sorted")
        t = curve.params
        length = float(sum(t[b] - t[a] for a, b in ends))
        gap = float(sum(curve.dist(a, b)[0, 0] for a, b in ends))
        if not length < 1.0 / n:
            fail("length", f"family n={n}: total length {length:.6g} is not below 1/{n}", n)
        elif abs(length - float(fam["total_length"])) > tol:
            fail("length", f"family n={n}: recorded length {fam['total_length']} != {length}", n)
        if abs(gap - float(fam["total_gap"])) > tol or gap < eps - tol:
            fail("gap", f"family n={n}: total gap {gap:.6g} (recorded {fam['total_gap']}) vs epsilon {eps}", n)

        var_sum, slack_sum = 0.0, 0.0
        for iv, (ia, ib) in zip(ivs, ends):
            slack_sum += float(iv["slack"])
            part, vals = list(iv["partition"]), list(iv["values"])
            if iv.get("status") == "skipped":
                continue
            where = f"family n={n}, interval [{iv['a']}, {iv['b']}]"
            if len(part) != len(vals) or len(part) < 2:
                fail("partition", f"{where}: partition and values do not match up")
                continue
            if part[0] != iv["a"] or part[-1] != iv["b"] or any(q <= p for p, q in zip(part, part[1:])):
                fail("partition", f"{where}: partition must increase from a to b")
                continue
            try:
                stored = [value_at(p) for p in part]
            except ValueError as exc:
                fail("partition", f"{where}: {exc}")
                continue
            bad = [p for p, s, v in zip(part, stored, vals) if s is None or abs(s - v) > tol]
            if bad:
                fail("partition", f"{where}: values at {bad[:3]} disagree with the witness support", bad)
                continue
            var = float(np.abs(np.diff(stored)).sum())
            if abs(var - float(iv["variation"])) > tol:
                fail("partition", f"{where}: recorded variation {iv['variation']} != recomputed {var}")
            var_sum += var
        if abs(slack_sum - float(fam["slack"])) > tol or slack_sum < 0:
            fail("slack", f"family n={n}: declared slack {fam['slack']} != interval total {slack_sum}")
        if not var_sum > theta * eps - float(fam["slack"]):
            fail("variation", f"family n={n}: variation {var_sum:.6g} not above theta*epsilon - slack "
                              f"= {theta * eps - float(fam['slack']):.6g}", n)
    return CertificateVerdict(not failures, failures)


@dataclass
class ProbeTrial:
    constant: float
    gaps: list
    bounds: list
    injected: bool = False

    @property
    def within_bound(self) -> bool:
        return all(g <= b * (1 + 1e-6) for g, b in zip(self.gaps, self.bounds))


@dataclass
class ProbeReport:
    deltas: list
    trials: list
    curve_lipschitz: float

    def max_gaps(self):
        """Largest composed gap per budget across trials."""
        return [max(t.gaps[k] for t in self.trials) for k in range(len(self.deltas))]

    def flags(self, threshold: float):
        """``(trial, delta)`` pairs whose composed gap exceeds ``threshold``."""
        return [(i, d) for i, t in enumerate(self.trials) for d, g in zip(self.deltas, t.gaps) if g > threshold]


def _random_support(curve, rng, size):
    space = curve.space
    if space.point_kind == "index":
        n = getattr(space, "n_points", None) or getattr(getattr(space, "base", None), "n_points")
        return rng.integers(0, n, size=(size, 1)).astype(float)
    P = curve.points
    lo, hi = P.min(axis=0) - 1.0, P.max(axis=0) + 1.0
    return rng.uniform(lo, hi, size=(size, P.shape[1]))


def random_lipschitz_function(curve, rng, L, size=6) -> PartialLipschitzFunction:
    """Random finite support near the curve with values drawn inside the running envelopes."""
    X = _random_support(curve, rng, size)
    pf = PartialLipschitzFunction(X[:1], [rng.normal()], L, curve.space)
    for x in X[1:]:
        fld = ExtensionField(pf, L)
        lo, up = fld.envelopes(x[None, :])
        pf = extend_at_point(fld, x[None, :], float(rng.uniform(lo[0], up[0])))
    return pf


def composition_probe(curve: SampledCurve, trials: int, seed, *, L_h: float = 1.0, deltas=None,
                      inject=(), support_size: int = 6, mode: str = "exact") -> ProbeReport:
    """Modulus of ``h o gamma`` for random Lipschitz ``h`` (plus any injected functions).

    Each random ``h`` is the upper envelope of a random ``L_h``-Lipschitz table.
    Injected entries are ``ExtensionField`` objects or partial functions and are
    reported first. The per-trial bound is ``L_h * K * delta`` with ``K`` the
    curve's grid Lipschitz constant.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    span = curve.b - curve.a
    if deltas is None:
        deltas = [span / n for n in (1, 2, 5, 10, 20)]
    deltas = [float(d) for d in deltas]
    K = curve.lipschitz_constant()
    rng = np.random.default_rng(seed)
    fields = []
    for f in inject:
        fields.append((f if isinstance(f, ExtensionField) else ExtensionField(f), True))
    for _ in range(trials):
        fields.append((ExtensionField(random_lipschitz_function(curve, rng, L_h, support_size), L_h), False))
    out = []
    for fld, injected in fields:
        values = fld.upper(curve.points)
        composed = SampledCurve(curve.params, values[:, None], Euclidean(1))
        rep = ac_modulus(composed, [min(d, span) for d in deltas], mode=mode)
        out.append(ProbeTrial(fld.L, rep.best_gaps, [fld.L * K * d for d in deltas], injected))
    return ProbeReport(deltas, out, K)


__all__ = [
    "BudgetExceeded",
    "ViolationNotFound",
    "IntervalFamily",
    "ModulusEntry",
    "ACReport",
    "ac_modulus",
    "resolution_cap",
    "find_violating_families",
    "witness_ladder",
    "IntervalRecord",
    "FamilyRecord",
    "WitnessCertificate",
    "build_global_witness",
    "Failure",
    "CertificateVerdict",
    "verify_certificate",
    "ProbeTrial",
    "ProbeReport",
    "random_lipschitz_function",
    "composition_probe",
]
