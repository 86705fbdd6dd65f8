"""Lipschitz-composition tests for absolute continuity of curves in metric spaces."""

from .analyzer import (
    ACReport,
    CertificateVerdict,
    IntervalFamily,
    ViolationNotFound,
    WitnessCertificate,
    ac_modulus,
    build_global_witness,
    composition_probe,
    find_violating_families,
    verify_certificate,
)
from .estimators import ACModulusEstimator, LipschitzExtender, PiecewiseInjectiveModifier, ZigzagWitness
from .extension import (
    EnvelopeViolation,
    ExtensionField,
    LipschitzError,
    PartialLipschitzFunction,
    extend_at_point,
    gap_slack,
    infer_constant,
    lower_extension,
    upper_extension,
)
from .generators import cantor_curve, circle_curve, generate_curve, identity_curve, polyline_curve, snowflaked
from .metric import (
    DiscreteMetric,
    Euclidean,
    GraphMetric,
    MetricError,
    MetricSpace,
    SampledCurve,
    Snowflake,
    TableMetric,
    check_metric_axioms,
    make_metric,
)
from .modification import CarrierSet, piecewise_injective_modification, verify_piecewise_injective
from .zigzag import (
    ResolutionError,
    WitnessError,
    ZigzagResult,
    staged_witness,
    staged_witness_general,
    zigzag,
    zigzag_on_carrier,
)

__version__ = "0.1.0"
