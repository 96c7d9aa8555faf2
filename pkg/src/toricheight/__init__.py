"""Exact toolkit for toric metrized divisors on the projective line.

Heights, chi-arithmetic volumes, roof functions, equilibrium envelopes and
Monge-Ampere measures of torus-invariant metrics, all computed in closed
form on piecewise-linear data, together with a seeded verification harness
for the identities connecting them (the central one being that the height
never exceeds the chi-volume, with gap equal to a Dirichlet energy).
"""

from .arakelov import (
    HeightReport,
    MetricFunction,
    RoofFunction,
    ToricDivisor,
    canonical_metric,
    chi_volume,
    default_grid,
    dsp_split,
    equilibrium,
    fubini_study_metric,
    height,
    height_semipositive,
    is_semipositive,
    ma_measure,
    mollify,
    roof,
    scale_metric,
    section_sup_log_norm,
    verify,
)
from .convex import (
    concave_conjugate,
    contact_set,
    dirichlet_energy,
    second_derivative_measure,
    upper_concave_envelope,
)
from .harness import (
    ConvergenceRow,
    SuiteConfig,
    SuiteReport,
    check_metric,
    convergence_study,
    random_dsp,
    random_semipositive,
    run_suite,
)
from .pwl import (
    AtomicMeasure,
    Interval,
    PwlFunction,
    linear_combination,
    sup_distance,
)

__version__ = "0.1.0"

__all__ = [
    "AtomicMeasure",
    "ConvergenceRow",
    "HeightReport",
    "Interval",
    "MetricFunction",
    "PwlFunction",
    "RoofFunction",
    "SuiteConfig",
    "SuiteReport",
    "ToricDivisor",
    "canonical_metric",
    "check_metric",
    "chi_volume",
    "concave_conjugate",
    "contact_set",
    "convergence_study",
    "default_grid",
    "dirichlet_energy",
    "dsp_split",
    "equilibrium",
    "fubini_study_metric",
    "height",
    "height_semipositive",
    "is_semipositive",
    "linear_combination",
    "ma_measure",
    "mollify",
    "random_dsp",
    "random_semipositive",
    "roof",
    "run_suite",
    "scale_metric",
    "second_derivative_measure",
    "section_sup_log_norm",
    "sup_distance",
    "upper_concave_envelope",
    "verify",
]
