"""Sample-efficient estimation of positive-semidefinite Toeplitz covariance matrices.

The library estimates a d x d PSD Toeplitz covariance matrix T = Toep(a) from
Gaussian vector samples while reading only a budgeted subset of each sample's
entries.  It provides:

* ``toepcov.core`` -- Toeplitz/Fourier primitives (densify, diagonal averaging,
  Vandermonde synthesis, spectral measurement, PSD square roots);
* ``toepcov.rulers`` -- sparse ruler constructions and coverage coefficients;
* ``toepcov.leverage`` -- Fourier leverage-score bounds and weighted row sampling;
* ``toepcov.sampling`` -- seeded Gaussian batches and entry-level observation
  with exact ESC/VSC/TSC accounting;
* ``toepcov.estimators`` -- ruler averaging, circulant baseline, the Prony
  family, and the sparse-Fourier-transform grid-search estimator;
* ``toepcov.bench`` -- Monte Carlo sweeps, TSC-to-target search, CSV emission;
* ``toepcov.cli`` -- the ``toepcov`` command (``ruler``, ``gen``, ``estimate``,
  ``bench`` subcommands).
"""

from toepcov.core import (
    FrequencyModel,
    ToeplitzVector,
    avg,
    densify,
    dtft_grid_slack,
    dtft_norm_bound,
    fourier_matrix,
    low_rank_stats,
    power_iteration,
    spectral_norm,
    sqrt_factor,
    synthesize,
)
from toepcov.rulers import (
    DistanceIndex,
    Ruler,
    alpha_ruler,
    coverage_coefficient,
    full_ruler,
    is_ruler,
    sqrt_ruler,
)
from toepcov.leverage import (
    LeverageProfile,
    SamplingMatrix,
    draw_sampling_matrix,
    fourier_leverage_bound,
    leverage_scores,
)
from toepcov.sampling import ObservationSet, SampleBatch, draw_samples, observe
from toepcov.estimators import (
    EstimateReport,
    estimate_by_ruler,
    estimate_circulant,
    estimate_prony_conditioned,
    estimate_prony_denoise,
    estimate_prony_exact,
    estimate_sft,
    prony_decompose,
    prony_inexact,
    sft_sampling_patterns,
)

__all__ = [
    "FrequencyModel",
    "ToeplitzVector",
    "avg",
    "densify",
    "dtft_grid_slack",
    "dtft_norm_bound",
    "fourier_matrix",
    "low_rank_stats",
    "power_iteration",
    "spectral_norm",
    "sqrt_factor",
    "synthesize",
    "DistanceIndex",
    "Ruler",
    "alpha_ruler",
    "coverage_coefficient",
    "full_ruler",
    "is_ruler",
    "sqrt_ruler",
    "LeverageProfile",
    "SamplingMatrix",
    "draw_sampling_matrix",
    "fourier_leverage_bound",
    "leverage_scores",
    "ObservationSet",
    "SampleBatch",
    "draw_samples",
    "observe",
    "EstimateReport",
    "estimate_by_ruler",
    "estimate_circulant",
    "estimate_prony_conditioned",
    "estimate_prony_denoise",
    "estimate_prony_exact",
    "estimate_sft",
    "prony_decompose",
    "prony_inexact",
    "sft_sampling_patterns",
]

__version__ = "0.1.0"
