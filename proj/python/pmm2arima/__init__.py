"""PMM2 estimation for ARIMA models with skewed innovations."""

import json as _json

from ._core import (
    AdmissibilityError,
    DataError,
    DegeneracyError,
    DomainError,
    LengthError,
    ParameterError,
    Pmm2Error,
    RankError,
    css,
    decide,
    difference,
    fit,
    integrate,
    is_admissible,
    jarque_bera,
    ljung_box,
    ols_ar,
    project_to_admissible,
    re_matrix,
    re_theoretical,
    re_theoretical_alt,
    residuals,
    sample,
    sample_moments,
    select_method,
    simulate,
    theoretical_cumulants,
    validate,
)
from ._core import run_monte_carlo as _run_monte_carlo


def run_monte_carlo(config, threads=0):
    """Run an experiment from a config dict. Returns (csv_text, summary_dict)."""
    csv_text, summary = _run_monte_carlo(_json.dumps(config), threads)
    return csv_text, _json.loads(summary)


__all__ = [name for name in dir() if not name.startswith("_")]
