"""
Command line: ``accrit extend | witness | modify | analyze | verify | gen | metric-check``.

Data goes to files (JSON, plus CSV profiles where asked); stdout carries a
one-line summary. Exit status is 0 on success, 1 when the analysis comes out
negative (refusal, failed verification, failed axiom check) and 2 on bad input.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ._validation import check_mode, check_positive, check_theta, check_tolerance
from .analyzer import (
    ViolationNotFound,
    ac_modulus,
    build_global_witness,
    find_violating_families,
    resolution_cap,
    verify_certificate,
)
from .extension import VALUE_TOL, ExtensionField, LipschitzError, PartialLipschitzFunction
from .generators import KINDS, generate_curve
from .metric import MetricError, SampledCurve, check_metric_axioms, make_metric
from .modification import EQ_TOL, piecewise_injective_modification, verify_piecewise_injective
from .zigzag import WitnessError, staged_witness, staged_witness_general, zigzag

EXIT_OK, EXIT_NEGATIVE, EXIT_INPUT = 0, 1, 2

logger = logging.getLogger("accrit")


class InputError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    inputs: dict = field(default_factory=dict)
    out: str | None = None
    eq_tol: float = EQ_TOL
    value_tol: float = VALUE_TOL
    theta: float = 0.9
    L: float | None = None
    seed: int = 0
    mode: str = "exact"

    def __post_init__(self):
        check_tolerance(self.eq_tol, "eq_tol")
        check_tolerance(self.value_tol, "value_tol")
        check_theta(self.theta)
        if self.L is not None:
            check_positive(self.L, "L")
        check_mode(self.mode)


def _json_default(o):
    if isinstance(o, np.integer):
        return int(o)
    if isinstance(o, np.floating):
        return float(o)
    if isinstance(o, np.bool_):
        return bool(o)
    if isinstance(o, np.ndarray):
        return o.tolist()
    raise TypeError(f"cannot serialize {type(o).__name__}")


def read_json(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: malformed JSON ({exc.msg} at line {exc.lineno})") from exc


def write_json(obj, path):
    text = json.dumps(obj, indent=2, default=_json_default)
    if path is None or path == "-":
        sys.stdout.write(text + "\n")
    else:
        Path(path).write_text(text + "\n")


def write_csv(header, rows, path):
    fh = sys.stdout if path in (None, "-") else open(path, "w", newline="")
    try:
        w = csv.writer(fh)
        w.writerow(header)
        w.writerows(rows)
    finally:
        if fh is not sys.stdout:
            fh.close()


def load_curve(path) -> SampledCurve:
    d = read_json(path)
    try:
        return SampledCurve.from_dict(d)
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"{path}: not a curve document ({exc})") from exc


def load_function(path, space=None) -> PartialLipschitzFunction:
    d = read_json(path)
    try:
        return PartialLipschitzFunction.from_dict(d, space)
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"{path}: not a partial-function document ({exc})") from exc


def _point_header(dim):
    return ["x"] if dim == 1 else [f"x{k}" for k in range(dim)]


def cmd_extend(cfg: RunConfig) -> int:
    pf = load_function(cfg.inputs["function"])
    if len(pf) == 0:
        raise InputError("the partial function has an empty support")
    L = cfg.L if cfg.L is not None else pf.infer_constant()
    if L < pf.infer_constant() - cfg.value_tol:
        raise InputError(f"--L {L} is below the table's Lipschitz constant {pf.infer_constant()}")
    fld = ExtensionField(PartialLipschitzFunction(pf.support, pf.values, L, pf.space), L)
    Q = read_json(cfg.inputs["queries"])
    try:
        Q = pf.space.as_points(Q if isinstance(Q[0], list) else [[q] for q in Q])
    except (TypeError, ValueError, IndexError) as exc:
        raise InputError(f"bad query list: {exc}") from exc
    lo, up = fld.envelopes(Q)
    slack = fld.gap_slack(Q)
    rows = [[*q.tolist(), a, b, s] for q, a, b, s in zip(Q, lo, up, slack)]
    write_csv(_point_header(Q.shape[1]) + ["lower", "upper", "gap_slack"], rows, cfg.out)
    print(f"extend: {len(Q)} queries, L={L:g}, min gap slack {slack.min():.3g}", file=sys.stderr if cfg.out in (None, "-") else sys.stdout)
    return EXIT_OK


def cmd_witness(cfg: RunConfig, staging: str, profile: str | None) -> int:
    curve = load_curve(cfg.inputs["curve"])
    fpath = cfg.inputs.get("function")
    pf = load_function(fpath, curve.space) if fpath else PartialLipschitzFunction.empty(curve.space)
    L = cfg.L if cfg.L is not None else 1.5
    if staging == "none":
        res = zigzag(pf, curve, L)
    elif staging == "injective":
        res = staged_witness(pf, curve, L, cfg.theta)
    else:
        res = staged_witness_general(pf, curve, L, cfg.theta, cfg.eq_tol)
    write_json(res.to_dict(), cfg.out)
    if profile:
        cum = np.concatenate([[0.0], np.cumsum(np.abs(np.diff(res.values)))])
        write_csv(["t", "value", "cumulative_variation"], zip(res.partition.params, res.values, cum), profile)
    print(f"witness: variation {res.achieved_variation:.6g} (target {res.target:.6g}), slack {res.total_slack:.3g}")
    return EXIT_OK


def cmd_modify(cfg: RunConfig) -> int:
    curve = load_curve(cfg.inputs["curve"])
    carrier = piecewise_injective_modification(curve, cfg.eq_tol)
    rep = verify_piecewise_injective(curve, carrier)
    write_json(carrier.to_dict(curve), cfg.out)
    print(f"modify: {len(carrier.ranges)} ranges, {len(carrier.holes)} holes; {rep.summary()}")
    return EXIT_OK if rep.passed else EXIT_NEGATIVE


def cmd_analyze(cfg: RunConfig, deltas, epsilon, n_max, certificate, profile) -> int:
    curve = load_curve(cfg.inputs["curve"])
    span = curve.b - curve.a
    deltas = deltas or [span / k for k in (1, 2, 5, 10, 20)]
    report = ac_modulus(curve, deltas, mode=cfg.mode, epsilon=epsilon)
    doc = {"report": report.to_dict(curve)}
    if profile:
        write_csv(["delta", "best_gap"], zip(report.deltas, report.best_gaps), profile)
    status = EXIT_OK
    if epsilon is not None:
        try:
            fams = find_violating_families(curve, epsilon, range(1, n_max + 1), mode=cfg.mode)
        except ViolationNotFound as exc:
            doc["refusal"] = {
                "epsilon": epsilon,
                "best_gaps": {str(k): v for k, v in exc.best_gaps.items()},
                "failed": exc.failed,
                "cap": exc.cap,
            }
            print(f"analyze: refusal ({exc})")
            status = EXIT_NEGATIVE
        else:
            doc["families"] = [f.to_dict(curve) for f in fams]
            cert = build_global_witness(curve, fams, cfg.theta, epsilon=epsilon, eq_tol=cfg.eq_tol)
            verdict = verify_certificate(curve, cert)
            if certificate:
                write_json(cert.to_dict(curve), certificate)
            print(f"analyze: violation for n=1..{n_max}, certificate {'passes' if verdict else 'FAILS'}")
    else:
        print(f"analyze: best gaps {['%.4g' % g for g in report.best_gaps]} (grid cap n <= {resolution_cap(curve)})")
    write_json(doc, cfg.out)
    return status


def cmd_verify(cfg: RunConfig) -> int:
    curve = load_curve(cfg.inputs["curve"])
    cert = read_json(cfg.inputs["certificate"])
    verdict = verify_certificate(curve, cert, tol=cfg.value_tol)
    if cfg.out:
        write_json({"passed": verdict.passed,
                    "failures": [{"kind": f.kind, "message": f.message} for f in verdict.failures]}, cfg.out)
    if verdict:
        print("verify: pass")
        return EXIT_OK
    print(f"verify: FAIL [{', '.join(verdict.kinds)}] {verdict.failures[0].message}")
    return EXIT_NEGATIVE


def cmd_gen(cfg: RunConfig, kind, kw, graph) -> int:
    curve = generate_curve(kind, **kw)
    write_json(curve.to_dict(), cfg.out)
    if graph:
        P = curve.points
        write_csv(["t"] + _point_header(P.shape[1]), ([t, *p] for t, p in zip(curve.params, P.tolist())), graph)
    print(f"gen: {kind} curve with {len(curve)} points")
    return EXIT_OK


def cmd_metric_check(metric, points_path, tol) -> int:
    if Path(metric).exists():
        desc = read_json(metric)
    elif metric.lstrip().startswith("{"):
        try:
            desc = json.loads(metric)
        except json.JSONDecodeError as exc:
            raise InputError(f"bad metric descriptor: {exc}") from exc
    else:
        desc = metric
    space = make_metric(desc)
    pts = read_json(points_path)
    rep = check_metric_axioms(space, pts, tol)
    print(f"metric-check: {'pass' if rep.passed else 'FAIL'} on {rep.n_points} points; "
          f"worst triangle slack {rep.worst_triangle:.3g}" + ("" if rep.passed else f" ({rep.violations[0]})"))
    return EXIT_OK if rep.passed else EXIT_NEGATIVE


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="accrit", description=__doc__.strip().splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, theta=False):
        sp.add_argument("--out", default=None, help="output file (default stdout)")
        sp.add_argument("--eq-tol", type=float, default=EQ_TOL)
        sp.add_argument("--value-tol", type=float, default=VALUE_TOL)
        sp.add_argument("--L", type=float, default=None)
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--mode", choices=["exact", "greedy"], default="exact")
        sp.add_argument("--theta", type=float, default=0.9)

    sp = sub.add_parser("extend", help="envelope values at query points (CSV)")
    sp.add_argument("function")
    sp.add_argument("queries")
    common(sp)

    sp = sub.add_parser("witness", help="zig-zag extension along a curve (JSON)")
    sp.add_argument("curve")
    sp.add_argument("--function", default=None)
    sp.add_argument("--staging", choices=["none", "injective", "general"], default="none")
    sp.add_argument("--profile", default=None, help="CSV variation profile")
    common(sp)

    sp = sub.add_parser("modify", help="piecewise-injective carrier (JSON)")
    sp.add_argument("curve")
    common(sp)

    sp = sub.add_parser("analyze", help="modulus report, family search and certificate")
    sp.add_argument("curve")
    sp.add_argument("--deltas", type=float, nargs="+", default=None)
    sp.add_argument("--epsilon", type=float, default=None)
    sp.add_argument("--n-max", type=int, default=5)
    sp.add_argument("--certificate", default=None)
    sp.add_argument("--profile", default=None, help="CSV of (delta, best gap)")
    common(sp)

    sp = sub.add_parser("verify", help="re-check a certificate; exit 0 iff it passes")
    sp.add_argument("curve")
    sp.add_argument("certificate")
    common(sp)

    sp = sub.add_parser("gen", help="generate a test curve (JSON)")
    sp.add_argument("kind", choices=[k.replace("_", "-") for k in KINDS] + list(KINDS))
    sp.add_argument("--n", type=int, default=None)
    sp.add_argument("--level", type=int, default=None)
    sp.add_argument("--points-per-cell", type=int, default=None)
    sp.add_argument("--vertices", default=None, help="JSON list of vertices")
    sp.add_argument("--radius", type=float, default=None)
    sp.add_argument("--arc", type=float, default=None)
    sp.add_argument("--dim", type=int, default=None)
    sp.add_argument("--base", default=None)
    sp.add_argument("--alpha", type=float, default=None)
    sp.add_argument("--graph", default=None, help="CSV of (t, point)")
    common(sp)

    sp = sub.add_parser("metric-check", help="check metric axioms on sample points")
    sp.add_argument("metric", help="descriptor name, inline JSON or JSON file")
    sp.add_argument("points")
    sp.add_argument("--tol", type=float, default=1e-9)
    return p


def _gen_kwargs(args):
    kw = {}
    for name in ("n", "level", "points_per_cell", "radius", "arc", "dim", "alpha", "base"):
        v = getattr(args, name)
        if v is not None:
            kw[name] = v
    if args.vertices is not None:
        kw["vertices"] = json.loads(args.vertices)
    kind = args.kind.replace("-", "_")
    if kind == "random_walk":
        kw["seed"] = args.seed
    if kind == "cantor" and "level" not in kw:
        raise InputError("cantor needs --level")
    if kind == "polyline" and "vertices" not in kw:
        raise InputError("polyline needs --vertices")
    return kind, kw


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        if args.command == "metric-check":
            return cmd_metric_check(args.metric, args.points, args.tol)
        inputs = {k: getattr(args, k) for k in ("function", "queries", "curve", "certificate") if getattr(args, k, None)}
        cfg = RunConfig(args.command, inputs, args.out, args.eq_tol, args.value_tol, args.theta, args.L, args.seed, args.mode)
        if args.command == "extend":
            return cmd_extend(cfg)
        if args.command == "witness":
            return cmd_witness(cfg, args.staging, args.profile)
        if args.command == "modify":
            return cmd_modify(cfg)
        if args.command == "analyze":
            return cmd_analyze(cfg, args.deltas, args.epsilon, args.n_max, args.certificate, args.profile)
        if args.command == "verify":
            return cmd_verify(cfg)
        if args.command == "gen":
            kind, kw = _gen_kwargs(args)
            return cmd_gen(cfg, kind, kw, args.graph)
    except (InputError, MetricError, LipschitzError, json.JSONDecodeError) as exc:
        print(f"accrit {args.command}: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except WitnessError as exc:
        print(f"accrit {args.command}: {exc}", file=sys.stderr)
        return EXIT_NEGATIVE
    except (ValueError, TypeError, KeyError) as exc:
        print(f"accrit {args.command}: invalid input: {exc}", file=sys.stderr)
        return EXIT_INPUT
    return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
