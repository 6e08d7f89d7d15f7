"""Risk estimation for subsampled penalized-regression ensembles."""

from ._core import (
    CgcvError,
    EnsembleFit,
    FitResult,
    deterministic_equivalents,
    draw_subsamples,
    fit_elastic_net,
    fit_ensemble,
    fit_lasso,
    fit_ridge,
    gen_gaussian_linear,
    run_sweep,
    solve_v,
    true_risk,
)

__all__ = [
    "CgcvError",
    "EnsembleFit",
    "FitResult",
    "deterministic_equivalents",
    "draw_subsamples",
    "fit_elastic_net",
    "fit_ensemble",
    "fit_lasso",
    "fit_ridge",
    "gen_gaussian_linear",
    "run_sweep",
    "solve_v",
    "true_risk",
]
