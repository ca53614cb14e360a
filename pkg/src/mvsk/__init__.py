"""Pareto-front reconstruction for mean-variance-skewness-kurtosis portfolios.

Library surface: moment-tensor estimation from return tables, the
scalarized quartic objective and its derivatives, convexity
classification of scalarization weights, projected accelerated gradient
solving over the simplex or cube, support-constrained variants, and
weight-grid sweeps with trade-off scoring.
"""

from .convexity import (RegionLabel, certificate_conditions, classify_lambda,
                        min_convexity_weight, region_volume)
from .errors import (DimensionError, DomainError, InsufficientSamples,
                     MvskError, NumericalError, ParseError)
from .moments import (MAX_ASSETS, Bounds, MomentModel, ReturnsMatrix,
                      build_moment_model, centralize, domain_bounds,
                      load_model, load_returns, model_fingerprint,
                      model_from_dict, model_to_dict, prices_to_returns,
                      save_model)
from .objective import (LambdaPoint, ObjectiveValues, ScalarizedObjective,
                        convexity_weight, eval_objectives, eval_scalarized,
                        gradient, hessian)
from .projection import (Domain, project_cube, project_cube_face, project_face,
                         project_simplex)
from .solver import (SUPPORT_EPSILON, SolveResult, SolverOptions,
                     scalarized_reference, solve, support_of)
from .sparse import (SparseOptions, enumerate_candidates, maximal_supports,
                     solve_forbidden_pairs, solve_sparse)
from .sweep import (LambdaGrid, SweepResult, build_grid, non_domination_check,
                    run_sweep, scale_values, superior_set, support_histogram,
                    sweep_to_dict, write_sweep_csv, write_sweep_json,
                    write_trade_off_table)
from .synth import synthetic_returns, write_returns_csv

__version__ = "0.1.0"

__all__ = [
    "Bounds", "Domain", "DimensionError", "DomainError", "InsufficientSamples",
    "LambdaGrid", "LambdaPoint", "MAX_ASSETS", "MomentModel", "MvskError",
    "NumericalError", "ObjectiveValues", "ParseError", "RegionLabel",
    "ReturnsMatrix", "SUPPORT_EPSILON", "ScalarizedObjective", "SolveResult",
    "SolverOptions", "SparseOptions", "SweepResult", "build_grid",
    "build_moment_model", "centralize", "certificate_conditions",
    "classify_lambda", "convexity_weight", "domain_bounds",
    "enumerate_candidates", "eval_objectives", "eval_scalarized", "gradient",
    "hessian", "load_model", "load_returns", "maximal_supports",
    "min_convexity_weight", "model_fingerprint", "model_from_dict",
    "model_to_dict", "non_domination_check", "prices_to_returns",
    "project_cube", "project_cube_face", "project_face", "project_simplex",
    "region_volume", "run_sweep", "save_model", "scale_values",
    "scalarized_reference", "solve", "solve_forbidden_pairs", "solve_sparse",
    "superior_set", "support_histogram", "support_of", "sweep_to_dict",
    "synthetic_returns", "write_returns_csv", "write_sweep_csv",
    "write_sweep_json", "write_trade_off_table",
]
