import numpy as np
import pytest

from accrit.generators import circle_curve, identity_curve, polyline_curve, snowflaked

V_SHAPE = [(0.0, 0.0), (0.5, 0.5), (1.0, 0.0)]


def injective_corpus():
    """Twenty injective curves on grids of 101 to 1001 points, keyed by name."""
    out = {}
    for n in (101, 301, 1001):
        out[f"identity-{n}"] = identity_curve(n)
        out[f"vshape-{n}"] = polyline_curve(V_SHAPE, n, span=1.0)
        out[f"arc-{n}"] = circle_curve(n, radius=1.0, arc=np.pi)
    out["arc-wide-501"] = circle_curve(501, radius=2.0, arc=1.5 * np.pi)
    out["spiral-401"] = polyline_curve([(0, 0), (1, 0), (1, 1), (0.2, 1), (0.2, 0.3), (0.7, 0.3)], 401)
    out["arc-small-201"] = circle_curve(201, radius=0.5, arc=np.pi / 2)
    out["steep-line-601"] = polyline_curve([0.0, 3.0], 601, span=1.0)
    for n in (101, 1001):
        out[f"snow-identity-{n}"] = snowflaked(identity_curve(n), 0.5)
        out[f"snow-vshape-{n}"] = snowflaked(polyline_curve(V_SHAPE, n, span=1.0), 0.5)
        out[f"snow-arc-{n}"] = snowflaked(circle_curve(n), 0.75)
    out["snow-spiral-401"] = snowflaked(out["spiral-401"], 0.6)
    assert len(out) == 20
    return out


def noninjective_corpus():
    return {
        "back-forth-0102": polyline_curve([0, 1, 0, 2], 301),
        "return-010": polyline_curve([0, 1, 0], 201),
        "zigzag-0213": polyline_curve([0, 2, 1, 3], 301),
        "figure-eight": polyline_curve([(0, 0), (1, 1), (1, 0), (0, 1), (0, 0), (-1, 1), (-1, 0), (0, 0.5)], 701),
        "arc-overlap": circle_curve(721, radius=1.0, arc=2.5 * np.pi),
    }


INJECTIVE = injective_corpus()
NONINJECTIVE = noninjective_corpus()


def far_support(curve, rng, k=2):
    """``k`` points at distance at least 1 from the curve, with admissible random values."""
    P = curve.points
    hi = P.max(axis=0)
    out = []
    for j in range(k):
        x = hi + 1.0 + j + rng.uniform(0, 0.5, size=P.shape[1])
        out.append(x)
    return np.array(out)


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


# one line per acceptance criterion, filled in by test_acceptance.py
ACCEPTANCE = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[key]
        terminalreporter.write_line(f"criterion {key}: {'PASS' if ok else 'FAIL'}  {detail}")
