import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from accrit.estimators import ACModulusEstimator, LipschitzExtender, PiecewiseInjectiveModifier, ZigzagWitness
from accrit.generators import cantor_curve, generate_curve, identity_curve


def test_extender_columns():
    est = LipschitzExtender(L=2.0).fit([[0.0], [1.0]], [0.0, 1.0])
    out = est.transform([[0.5]])
    np.testing.assert_array_equal(out, [[0.0, 1.0, 0.0]])
    assert est.predict([[0.5]])[0] == 1.0


def test_extender_default_constant_and_params():
    est = LipschitzExtender().fit([[0.0], [1.0], [3.0]], [0.0, 2.0, 3.0])
    assert est.constant_ == 2.0
    assert est.get_params() == {"L": None, "metric": "euclidean"}
    twin = clone(est).set_params(L=3.0)
    assert twin.L == 3.0 and not hasattr(twin, "field_")


def test_not_fitted():
    with pytest.raises(NotFittedError):
        LipschitzExtender().predict([[0.0]])
    with pytest.raises(NotFittedError):
        ACModulusEstimator().transform(identity_curve(11))


def test_zigzag_witness_modes():
    curve = generate_curve("polyline", vertices=[0, 1, 0, 2], n=301)
    est = ZigzagWitness(L=1.0, theta=0.81, staging="general").fit(curve)
    assert est.variation_ >= 1.62 - est.slack_
    vals = est.predict(curve.points[:5])
    assert vals.shape == (5,)
    inj = ZigzagWitness(L=1.0, theta=0.81, staging="injective").fit(identity_curve(101))
    assert inj.variation_ >= 0.81 - inj.slack_
    with pytest.raises(ValueError):
        ZigzagWitness(staging="sideways").fit(identity_curve(11))


def test_array_curve_input():
    t = np.linspace(0, 1, 21)
    X = np.column_stack([t, t ** 2])
    est = ACModulusEstimator(deltas=(0.5,)).fit(X)
    assert est.best_gaps_[0] <= 2 * 0.5


def test_modifier_transform():
    curve = generate_curve("polyline", vertices=[0, 1, 0, 2], n=301)
    out = PiecewiseInjectiveModifier().fit(curve).transform(curve)
    assert out.params[0] == 0.0 and out.params[1] == 2.0 and len(out) == 102
    with pytest.raises(ValueError):
        PiecewiseInjectiveModifier().fit(curve).transform(identity_curve(11))


def test_modulus_predict():
    est = ACModulusEstimator(deltas=(0.5, 0.3), epsilon=0.9).fit(cantor_curve(3, 24))
    assert est.predict(cantor_curve(3, 24)) is True
    assert est.predict(identity_curve(101)) is False
    with pytest.raises(ValueError):
        ACModulusEstimator(deltas=(0.2,)).fit(identity_curve(11)).predict(identity_curve(11))
