"""Probability metrics, law-invariant risk functionals and quantitative
robustness checks, backed by the C++ core."""

from _qrob import (  # noqa: F401
    Distribution,
    EstimatorLawReport,
    GaugeFunction,
    IqrScan,
    LipschitzCertificate,
    MetricValue,
    PairedSampleCheck,
    RiskFunctionalSpec,
    RngStream,
    bl_bracket,
    certificate,
    contaminate,
    d_phi,
    estimator_law,
    evaluate,
    fortet_mourier,
    fortet_mourier_quadrature,
    iqr_scan,
    is_admissible,
    kantorovich,
    kolmogorov,
    levy,
    moment,
    paired_lipschitz_check,
    prokhorov,
    robustness_gap,
    weighted_kolmogorov,
)
