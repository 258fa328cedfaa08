"""Spectra of the harmonic oscillator perturbed by point interactions."""

__version__ = "0.1.0"

from .eigensolve import (EigenLadder, EigenSolveError, SpectrumResult, count_nonreal, eigenvalues,
                         ladder_match, refine_ladder, solve_ladder, truncation_study)
from .hermite import hermite_eval, hermite_row, hermite_table
from .operator import (PointPotential, TruncatedOperator, TwoPointForm, build_truncated, delta,
                       even_pair, matrix_element, odd_pair, perturbation_matrix)
from .secular import exact_eigenvalue
from .traces import lambda_series, t1, t2, t3, tj_contour

__all__ = [
    "EigenLadder", "EigenSolveError", "PointPotential", "SpectrumResult", "TruncatedOperator",
    "TwoPointForm", "build_truncated", "count_nonreal", "delta", "eigenvalues", "even_pair",
    "exact_eigenvalue", "hermite_eval", "hermite_row", "hermite_table", "ladder_match",
    "lambda_series", "matrix_element", "odd_pair", "perturbation_matrix", "refine_ladder",
    "solve_ladder", "t1", "t2", "t3", "tj_contour", "truncation_study",
]
