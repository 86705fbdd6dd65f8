"""
Estimator-style wrappers (``fit`` / ``transform`` / ``predict``).

They hold hyperparameters as constructor arguments, expose them through
``get_params``/``set_params`` and keep fitted state in trailing-underscore
attributes, so they compose with scikit-learn utilities such as ``clone``.
Curves are passed either as ``SampledCurve`` objects or as ``(N, 1 + d)``
arrays with the parameter in the first column.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from ._validation import check_curve, check_mode, check_positive, check_space, check_theta, check_tolerance
from .analyzer import ac_modulus
from .extension import ExtensionField, PartialLipschitzFunction
from .modification import EQ_TOL, piecewise_injective_modification
from .zigzag import staged_witness, staged_witness_general, zigzag


class LipschitzExtender(TransformerMixin, BaseEstimator):
    """Envelope extension of a function known on finitely many points.

    ``fit(X, y)`` stores the table; ``transform`` returns the columns
    ``(lower, upper, gap_slack)`` and ``predict`` the upper envelope.

    Parameters
    ----------
    L : float, optional
        Extension constant; defaults to the inferred constant of the table.
    metric : str or dict or MetricSpace
    """

    def __init__(self, L=None, metric="euclidean"):
        self.L = L
        self.metric = metric

    def fit(self, X, y):
        space = check_space(self.metric)
        pf = PartialLipschitzFunction.from_data(np.asarray(X, dtype=float), y, space)
        L = pf.constant if self.L is None else check_positive(self.L, "L")
        self.field_ = ExtensionField(pf, L)
        self.constant_ = L
        return self

    def transform(self, X):
        check_is_fitted(self, "field_")
        lo, up = self.field_.envelopes(X)
        return np.column_stack([lo, up, self.field_.gap_slack(X)])

    def predict(self, X):
        check_is_fitted(self, "field_")
        return self.field_.upper(X)


class ZigzagWitness(BaseEstimator):
    """Large-variation extension of a partial function along a curve.

    ``staging`` picks the construction: ``"none"`` runs the plain zig-zag
    (target ``L * rho(gamma(a), gamma(b))``), ``"injective"`` the staged
    version for injective curves and ``"general"`` the staged version on the
    piecewise-injective carrier (both with target ``theta * L * rho``).
    """

    def __init__(self, L=1.5, theta=0.9, staging="none", eq_tol=EQ_TOL):
        self.L = L
        self.theta = theta
        self.staging = staging
        self.eq_tol = eq_tol

    def fit(self, X, y=None):
        """``y`` is the starting ``PartialLipschitzFunction`` (empty when omitted)."""
        curve = check_curve(X)
        L = check_positive(self.L, "L")
        pf = y if y is not None else PartialLipschitzFunction.empty(curve.space)
        if self.staging == "none":
            res = zigzag(pf, curve, L)
        elif self.staging == "injective":
            res = staged_witness(pf, curve, L, check_theta(self.theta))
        elif self.staging == "general":
            res = staged_witness_general(pf, curve, L, check_theta(self.theta), check_tolerance(self.eq_tol, "eq_tol"))
        else:
            raise ValueError(f"unknown staging {self.staging!r}")
        self.result_ = res
        self.variation_ = res.achieved_variation
        self.slack_ = res.total_slack
        return self

    def predict(self, X):
        """Upper envelope of the extended function at arbitrary points."""
        check_is_fitted(self, "result_")
        return ExtensionField(self.result_.extended, self.result_.L).upper(X)


class PiecewiseInjectiveModifier(TransformerMixin, BaseEstimator):
    """Longest-loop removal; ``transform`` restricts a curve to the fitted carrier."""

    def __init__(self, eq_tol=EQ_TOL):
        self.eq_tol = eq_tol

    def fit(self, X, y=None):
        curve = check_curve(X)
        self.carrier_ = piecewise_injective_modification(curve, check_tolerance(self.eq_tol, "eq_tol"))
        self.n_grid_ = len(curve)
        return self

    def transform(self, X):
        check_is_fitted(self, "carrier_")
        curve = check_curve(X)
        if len(curve) != self.n_grid_:
            raise ValueError(f"curve has {len(curve)} grid points, fitted on {self.n_grid_}")
        return curve.restrict(self.carrier_.indices())


class ACModulusEstimator(BaseEstimator):
    """Absolute-continuity modulus of a curve at fixed length budgets.

    After ``fit`` the attribute ``best_gaps_`` holds the modulus per entry of
    ``deltas``; ``predict`` returns ``True`` for curves whose gap stays above
    ``epsilon`` at every budget (violation at grid scale).
    """

    def __init__(self, deltas=(0.5, 0.2, 0.1), mode="exact", epsilon=None):
        self.deltas = deltas
        self.mode = mode
        self.epsilon = epsilon

    def _report(self, X):
        return ac_modulus(check_curve(X), list(self.deltas), mode=check_mode(self.mode), epsilon=self.epsilon)

    def fit(self, X, y=None):
        self.report_ = self._report(X)
        self.best_gaps_ = np.asarray(self.report_.best_gaps)
        return self

    def transform(self, X):
        check_is_fitted(self, "report_")
        return np.asarray(self._report(X).best_gaps)[None, :]

    def predict(self, X):
        check_is_fitted(self, "report_")
        if self.epsilon is None:
            raise ValueError("predict needs epsilon")
        return bool(np.all(self.transform(X) > self.epsilon))


__all__ = ["LipschitzExtender", "ZigzagWitness", "PiecewiseInjectiveModifier", "ACModulusEstimator"]
