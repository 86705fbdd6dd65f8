"""Acceptance criteria 1-8, each checked at its stated tolerance and time limit."""

import copy
import json
import time

import numpy as np
import pytest

from accrit.analyzer import (
    ViolationNotFound,
    build_global_witness,
    composition_probe,
    find_violating_families,
    verify_certificate,
)
from accrit.extension import ExtensionField, PartialLipschitzFunction
from accrit.generators import cantor_curve, identity_curve, polyline_curve
from accrit.metric import DiscreteMetric, Euclidean, GraphMetric, Snowflake, TableMetric
from accrit.modification import (
    multiplicity,
    piecewise_injective_modification,
    verify_piecewise_injective,
)
from accrit.zigzag import staged_witness, staged_witness_general, zigzag

from conftest import ACCEPTANCE, INJECTIVE, NONINJECTIVE, far_support
from oracles import floyd_warshall, max_feasible_value, pairwise_lipschitz_excess

TOL = 1e-9


def record(key, ok, detail):
    ACCEPTANCE[key] = (bool(ok), detail)
    print(f"criterion {key}: {'PASS' if ok else 'FAIL'}  {detail}")


def endpoint_gap(curve):
    return float(curve.dist(0, len(curve) - 1)[0, 0])


def far_function(curve, seed, L_support=0.5):
    rng = np.random.default_rng(seed)
    X = far_support(curve, rng, k=2)
    rho = curve.space.distance(X[0], X[1])
    return PartialLipschitzFunction(X, [0.0, rng.uniform(-L_support, L_support) * rho], L_support, curve.space)


# 1 ------------------------------------------------------------------------

def _spaces(rng):
    edges = [(i, i + 1, float(rng.uniform(0.5, 2))) for i in range(39)]
    edges += [(int(a), int(b), float(rng.uniform(0.5, 3))) for a, b in rng.integers(0, 40, size=(30, 2)) if a != b]
    return {
        "euclidean-1": (Euclidean(1), lambda k: rng.uniform(-5, 5, size=(k, 1))),
        "euclidean-3": (Euclidean(3), lambda k: rng.uniform(-5, 5, size=(k, 3))),
        "snowflake": (Snowflake(Euclidean(2), 0.5), lambda k: rng.uniform(-5, 5, size=(k, 2))),
        "discrete": (DiscreteMetric(1), lambda k: rng.integers(0, 12, size=(k, 1)).astype(float)),
        "graph": (GraphMetric(40, edges), lambda k: rng.integers(0, 40, size=(k, 1)).astype(float)),
    }


def test_criterion_1_envelope_suite():
    rng = np.random.default_rng(1)
    t0 = time.perf_counter()
    worst = {"restriction": 0.0, "lipschitz": -np.inf, "gap": np.inf, "monotone": -np.inf}
    for name, (space, draw) in _spaces(rng).items():
        for _ in range(100):
            k = int(rng.integers(1, 11))
            X = np.unique(draw(k), axis=0)
            # values built point by point inside the envelopes keep the table Lipschitz
            pf = PartialLipschitzFunction(X[:1], [rng.normal()], 1.0, space)
            for x in X[1:]:
                lo, up = ExtensionField(pf, 1.0).envelopes(x[None, :])
                pf = pf.with_points(x[None, :], [rng.uniform(lo[0], up[0])], 1.0)
            Lp = pf.infer_constant()
            pf = PartialLipschitzFunction(pf.support, pf.values, Lp, space)
            Q = draw(100)
            Ls = [Lp + 0.25, Lp + 1.0, Lp + 3.0]
            prev = None
            for L in Ls:
                fld = ExtensionField(pf, L)
                lo_s, up_s = fld.envelopes(pf.support)
                worst["restriction"] = max(worst["restriction"], np.abs(up_s - pf.values).max(), np.abs(lo_s - pf.values).max())
                lo, up = fld.envelopes(Q)
                D = space.pairwise(Q, Q)
                for env in (lo, up):
                    worst["lipschitz"] = max(worst["lipschitz"], float((np.abs(env[:, None] - env[None, :]) - L * D).max()))
                worst["gap"] = min(worst["gap"], float(fld.gap_slack(Q).min()))
                if prev is not None:
                    worst["monotone"] = max(worst["monotone"], float((prev[1] - up).max()), float((lo - prev[0]).max()))
                prev = (lo, up)
    elapsed = time.perf_counter() - t0
    ok = (worst["restriction"] == 0.0 and worst["lipschitz"] <= TOL and worst["gap"] >= -TOL
          and worst["monotone"] <= TOL and elapsed < 5.0)
    record(1, ok, f"restriction err {worst['restriction']}, Lipschitz excess {worst['lipschitz']:.2e}, "
                  f"min gap slack {worst['gap']:.2e}, monotone excess {worst['monotone']:.2e}, {elapsed:.2f}s")
    assert ok


# 2 ------------------------------------------------------------------------

def _random_table(rng):
    n = int(rng.integers(3, 7))
    edges = [(i, j, int(rng.integers(1, 5))) for i in range(n) for j in range(i + 1, n) if rng.random() < 0.7]
    edges += [(i, i + 1, int(rng.integers(1, 5))) for i in range(n - 1)]
    return floyd_warshall(n, edges)


def test_criterion_2_oracle_equivalence():
    rng = np.random.default_rng(2)
    t0 = time.perf_counter()
    checked, worst = 0, 0.0
    for _ in range(50):
        D = _random_table(rng)
        n = len(D)
        space = TableMetric(D)
        L = int(rng.integers(1, 4))
        k = int(rng.integers(1, n))
        support = sorted(rng.choice(n, size=k, replace=False).tolist())
        # integer values built greedily inside integer bounds, so every envelope is an integer
        vals = []
        for s in support:
            lo = max([v - L * D[s][q] for q, v in zip(support, vals)], default=-3)
            up = min([v + L * D[s][q] for q, v in zip(support, vals)], default=3)
            vals.append(int(rng.integers(int(lo), int(up) + 1)))
        fld = ExtensionField(PartialLipschitzFunction([[s] for s in support], vals, L, space), L)
        cands = list(range(-60, 61))
        for x in range(n):
            expect = max_feasible_value(D, support, vals, L, x, cands)
            got = float(fld.upper([[x]])[0])
            worst = max(worst, abs(got - expect))
            checked += 1
    elapsed = time.perf_counter() - t0
    ok = worst <= TOL and elapsed < 10.0
    record(2, ok, f"{checked} points over 50 tables, max |upper - oracle| = {worst:.2e}, {elapsed:.2f}s")
    assert ok


# 3 ------------------------------------------------------------------------

def test_criterion_3_zigzag_bound():
    L = 1.5
    rows, ok = [], True
    for seed, (name, curve) in enumerate(INJECTIVE.items()):
        pf = far_function(curve, seed)
        res = zigzag(pf, curve, L)
        rho = endpoint_gap(curve)
        bound_ok = res.achieved_variation >= L * rho - res.total_slack - TOL
        S = res.extended
        excess = pairwise_lipschitz_excess(curve.space.distance, list(S.support), list(S.values), L)
        finest = len(curve) == 1001
        slack_ok = res.total_slack <= 0.05 * L * rho if finest else True
        recomputed = abs(res.recompute_variation(curve) - res.achieved_variation) <= TOL
        ok &= bound_ok and slack_ok and excess <= TOL and recomputed
        rows.append((name, res.achieved_variation / (L * rho), res.total_slack / (L * rho), excess))
    worst = min(r[1] for r in rows)
    finest_slack = max(r[2] for r in rows if r[0].endswith("1001"))
    record(3, ok, f"20 curves; min variation/(L rho) {worst:.4f}, max slack/(L rho) at 1001 pts {finest_slack:.2e}, "
                  f"max Lipschitz excess {max(r[3] for r in rows):.2e}")
    assert ok


# 4 ------------------------------------------------------------------------

def test_criterion_4_staged_bounds():
    L, theta = 1.5, 0.9
    ok, ratios = True, []
    for seed, (name, curve) in enumerate(INJECTIVE.items()):
        pf = far_function(curve, seed)
        rho = endpoint_gap(curve)
        for res in (staged_witness(pf, curve, L, theta), staged_witness_general(pf, curve, L, theta)):
            ok &= res.achieved_variation >= theta * L * rho - res.total_slack - TOL
            ok &= res.extended.lipschitz_violation(L) <= TOL
            ratios.append(res.achieved_variation / (L * rho))
    for seed, (name, curve) in enumerate(NONINJECTIVE.items()):
        rho = endpoint_gap(curve)
        for pf in (PartialLipschitzFunction.empty(curve.space), far_function(curve, 100 + seed)):
            res = staged_witness_general(pf, curve, L, theta)
            ok &= res.achieved_variation >= theta * L * rho - res.total_slack - TOL
            ok &= res.extended.lipschitz_violation(L) <= TOL
            if rho > 0:
                ratios.append(res.achieved_variation / (L * rho))
    record(4, ok, f"25 curves, theta = 0.9; min variation/(L rho) {min(ratios):.4f} (needs >= 0.9 up to slack)")
    assert ok


# 5 ------------------------------------------------------------------------

def test_criterion_5_modification_suite():
    curve = polyline_curve([0, 1, 0, 2], 301)
    carrier = piecewise_injective_modification(curve)
    t = curve.params
    exact = [(t[lo], t[hi]) for lo, hi in carrier.ranges] == [(0.0, 0.0), (2.0, 3.0)]
    ok = exact
    failures = []
    for name, c in {**INJECTIVE, **NONINJECTIVE}.items():
        A = piecewise_injective_modification(c)
        rep = verify_piecewise_injective(c, A)
        again = piecewise_injective_modification(c, carrier=A)
        good = rep.passed and multiplicity(c, A.indices()) <= 2 and again.ranges == A.ranges and again.holes == A.holes
        if not good:
            failures.append(name)
        ok &= good
    record(5, ok, f"0-1-0-2 carrier {carrier.ranges} -> params {[(float(a), float(b)) for a, b in ((t[lo], t[hi]) for lo, hi in carrier.ranges)]}; "
                  f"25 curves verified, failures: {failures or 'none'}")
    assert ok


# 6 ------------------------------------------------------------------------

@pytest.fixture(scope="module")
def cantor_certificate():
    t0 = time.perf_counter()
    curve = cantor_curve(6, points_per_cell=48)
    families = find_violating_families(curve, 0.9, range(1, 6))
    cert = build_global_witness(curve, families, theta=0.9)
    verdict = verify_certificate(curve, cert)
    return curve, families, cert, verdict, time.perf_counter() - t0


def test_criterion_6_cantor_end_to_end(cantor_certificate):
    curve, families, cert, verdict, elapsed = cantor_certificate
    per_n = []
    ok = [f.n for f in cert.families] == [1, 2, 3, 4, 5]
    for f in cert.families:
        ok &= f.total_length < 1.0 / f.n
        ok &= f.variation_sum > 0.81 - f.slack
        ok &= f.slack < 0.05
        per_n.append(f"n={f.n}: len {f.total_length:.4f} var {f.variation_sum:.4f} slack {f.slack:.1e}")
    L_inf = cert.witness.infer_constant()
    ok &= bool(verdict) and L_inf <= 2.0 + TOL and elapsed < 60.0
    record(6, ok, f"{'; '.join(per_n)}; verify {'pass' if verdict else verdict.kinds}; "
                  f"witness constant {L_inf:.4f}; {elapsed:.1f}s")
    assert ok


# 7 ------------------------------------------------------------------------

def test_criterion_7_negative_control():
    curves = {"identity": identity_curve(1001), "3-Lipschitz polyline": polyline_curve([0, 1, 0, 1], 1501, span=1.0)}
    ok, notes = True, []
    for name, curve in curves.items():
        try:
            find_violating_families(curve, 0.5, range(1, 21))
            refused = False
            gaps = {}
        except ViolationNotFound as exc:
            refused = True
            gaps = exc.best_gaps
        K = curve.lipschitz_constant()
        report = composition_probe(curve, 50, seed=7, L_h=1.0)
        within = all(g <= t.constant * K * d * (1 + 1e-6)
                     for t in report.trials for g, d in zip(t.gaps, report.deltas))
        ok &= refused and within and len(report.trials) == 50
        notes.append(f"{name} (K={K:.3g}): refused={refused}, best gap at n=20 {gaps.get(20, float('nan')):.3g}, "
                     f"probe within L_h*K*delta: {within}")
    record(7, ok, "; ".join(notes))
    assert ok


# 8 ------------------------------------------------------------------------

def test_criterion_8_tamper_detection(cantor_certificate):
    curve, _, cert, _, _ = cantor_certificate
    doc = json.loads(json.dumps(cert.to_dict(curve)))
    assert verify_certificate(curve, doc).passed

    perturbed = copy.deepcopy(doc)
    perturbed["witness"]["values"][7] += 0.1

    lengthened = copy.deepcopy(doc)
    fam = next(f for f in lengthened["families"] if f["n"] == 5)
    start = float(curve.params[7000])
    fam["intervals"][-1]["a"] = start
    fam["intervals"][-1]["partition"][0] = start

    dropped = copy.deepcopy(doc)
    iv = next(iv for iv in dropped["families"][0]["intervals"] if len(iv["partition"]) > 2)
    del iv["partition"][1]
    del iv["values"][1]

    expected = {"perturbed value": (perturbed, "lipschitz"), "lengthened interval": (lengthened, "length"),
                "dropped partition point": (dropped, "partition")}
    ok, notes = True, []
    for label, (d, kind) in expected.items():
        v = verify_certificate(curve, d)
        hit = (not v.passed) and kind in v.kinds
        ok &= hit
        notes.append(f"{label} -> {v.kinds}")
    record(8, ok, "; ".join(notes))
    assert ok
