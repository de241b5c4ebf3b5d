"""Conformable fractional derivatives and integrals on time scales."""

from ._tscal import (
    Error,
    Expr,
    MathError,
    ParseError,
    TimeScale,
    UnknownLaw,
    __version__,
    cauchy,
    chain_rule_witness,
    definition_scan,
    delta_derivative_n,
    ftc_check,
    indefinite,
    law_names,
    monotonicity_check,
    naive_chain_gap,
    power_rule,
    run_law_suite,
    sigma_shift,
    single_grain,
    t_alpha,
    t_alpha_at_zero,
    t_alpha_higher,
)

__all__ = [
    "Error",
    "Expr",
    "MathError",
    "ParseError",
    "TimeScale",
    "UnknownLaw",
    "__version__",
    "cauchy",
    "chain_rule_witness",
    "definition_scan",
    "delta_derivative_n",
    "ftc_check",
    "indefinite",
    "law_names",
    "monotonicity_check",
    "naive_chain_gap",
    "power_rule",
    "run_law_suite",
    "sigma_shift",
    "single_grain",
    "t_alpha",
    "t_alpha_at_zero",
    "t_alpha_higher",
]
