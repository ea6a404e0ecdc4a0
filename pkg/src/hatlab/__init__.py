"""hatlab: a high-precision laboratory for the alternating derivative series
H(t) = sum_n (-1)^n t^n f^(n)(t) / n!.

Derivatives of every catalog function come from truncated power-series (jet)
arithmetic under an explicit precision context; on top of that sit the series
term/partial-sum machinery, convergence diagnostics (radius estimation and
point classification), and a deterministic experiment harness.
"""

from . import catalog, diagnostics, experiments, hatseries, jets
from .catalog import (
    Analytic,
    BumpSeries,
    FlatExp,
    Lacunary,
    Poly,
    RationalOnePlus,
    SeriesTruncation,
    dyadic_check,
    format_spec,
    jet_of,
    jet_with_certificate,
    lacunary_jet,
    parse_spec,
    series_family_jet,
    value_at_zero,
)
from .diagnostics import (
    bound_report,
    classify_point,
    grid_radius_summary,
    necessary_condition_test,
    radius_estimate,
)
from .errors import (
    ExactnessRequired,
    HatLabError,
    InconclusiveWindow,
    JetMismatch,
    NearZeroDivision,
    NumericError,
    OrderCapError,
    PoleError,
    PrecisionTooSmall,
    ScalarParseError,
    SpecParseError,
    TruncationBudgetError,
    UnsupportedCheck,
    UsageError,
)
from .hatseries import (
    HatRun,
    algebra_checks,
    antiderivative_check,
    fkn_recurrence_check,
    fkn_value,
    hat_run,
    hat_terms,
    partial_sum_derivative_residual,
    tail_term,
    taylor_terms_at_zero,
)
from .jets import Jet
from .precision import (
    PrecisionContext,
    Scalar,
    format_real,
    make_context,
    parse_scalar,
    running_sums,
    scalar_from_fraction,
    scalar_from_pi_fraction,
    scalar_from_value,
)

__version__ = "0.1.0"
