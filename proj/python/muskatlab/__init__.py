"""Confined and deep-water Muskat interface solvers (C++ core)."""

from ._core import (
    AdmissibilityError,
    CheckRefused,
    ConfigError,
    InputError,
    IntegrationError,
    MuskatError,
    ParameterError,
    ParseError,
    StepSizeUnderflow,
    compare_depths,
    confined_constant,
    derivative,
    grid,
    hilbert,
    initial_state,
    lambda_line,
    lambda_op,
    load_snapshot,
    pv_integral_confined,
    pv_integral_deep,
    read_diagnostics,
    rhs_confined_model,
    rhs_deep_model,
    rhs_deep_model_derivative,
    run,
    semigroup,
    sobolev_seminorm,
    stability_report,
    uniform_nodes,
    validate_config,
)

__all__ = [name for name in dir() if not name.startswith("_")]
