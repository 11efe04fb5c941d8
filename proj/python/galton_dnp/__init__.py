"""Landau-Zener cascade simulator: spectral mapping of dilute spin ensembles.

The heavy lifting lives in the compiled extension ``galton_dnp._core``;
this package re-exports its public surface.
"""

from ._core import (
    Checkerboard,
    FitResult,
    GaltonError,
    PopulationField,
    PopulationVector,
    WindowSweepResult,
    accumulate_buildup,
    analytic_full_sweep,
    center_vs_field,
    checkerboard_from_gaps,
    dp_sweep,
    fit_biexponential,
    fit_gaussian,
    fit_relaxation,
    gap_for_eta,
    hamming_index,
    hamming_order,
    hamming_state,
    hyperpolarization,
    locate_lacs,
    map_spectrum,
    path_probability,
    perturbative_checkerboard,
    sample_board_from_dos,
    short_time_rate,
    simulate_window_sweep,
    tunneling_probability,
)

__version__ = "0.1.0"

__all__ = [
    "Checkerboard",
    "FitResult",
    "GaltonError",
    "PopulationField",
    "PopulationVector",
    "WindowSweepResult",
    "accumulate_buildup",
    "analytic_full_sweep",
    "center_vs_field",
    "checkerboard_from_gaps",
    "dp_sweep",
    "fit_biexponential",
    "fit_gaussian",
    "fit_relaxation",
    "gap_for_eta",
    "hamming_index",
    "hamming_order",
    "hamming_state",
    "hyperpolarization",
    "locate_lacs",
    "map_spectrum",
    "path_probability",
    "perturbative_checkerboard",
    "sample_board_from_dos",
    "short_time_rate",
    "simulate_window_sweep",
    "tunneling_probability",
    "__version__",
]
