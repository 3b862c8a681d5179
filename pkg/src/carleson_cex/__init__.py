"""Finite-dimensional counterexample to the vector-valued Carleson embedding.

The package builds an analytic function ``phi`` from the unit disk into
``C^N`` out of a band-limited Littlewood-Paley wavelet, computes the dyadic
Carleson intensity of the operator-valued measure ``phi (x) phi dA_1`` and the
embedding form on a lacunary test function, and checks the supporting
estimates numerically.

Hot loops run in a compiled extension when it is available and in numpy
otherwise; :data:`carleson_cex.kernels.BACKEND` names the active one.
"""
from __future__ import annotations

__version__ = "0.1.0"

from .construction import (coeff_a, coeff_a_vector, g_hat_coefficient, omega_vector,
                           phi_spectrum, phi_support_size, test_spectrum_E)
from .disk import (CarlesonSquare, angular_factor, eval_f_poisson, halfplane_lp_pairing,
                   moment_carleson_square, moment_disk, radial_factor)
from .dyadic import DyadicInterval, arcs_of_rank, relative_distance, turn_phase
from .embedding import (EmbeddingResult, beta_sum, embedding_form_paper,
                        embedding_form_spectral, ratio_lower_bound)
from .errors import (CarlesonError, DomainError, ExperimentAborted, NumericError,
                     PreconditionError)
from .kernels import BACKEND
from .measure import (HermitianForm, IntensityResult, carleson_intensity, g_norm_dA1,
                      gram_matrix, largest_eigenvalue)
from .spectrum import SpectrumEntry, VectorSpectrum
from .verify import (CheckReport, GrowthReport, Thresholds, growth_experiment,
                     verify_analysis_lemmas, verify_construction_lemmas)
from .wavelet import (DEFAULT_PROFILE, SMOOTH_PROFILE, Ramp, WaveletProfile, eval_nu,
                      eval_psi_hat)

__all__ = [
    "__version__", "BACKEND",
    "Ramp", "WaveletProfile", "eval_nu", "eval_psi_hat", "DEFAULT_PROFILE", "SMOOTH_PROFILE",
    "DyadicInterval", "arcs_of_rank", "relative_distance", "turn_phase",
    "SpectrumEntry", "VectorSpectrum",
    "coeff_a", "coeff_a_vector", "omega_vector", "g_hat_coefficient", "phi_spectrum",
    "phi_support_size", "test_spectrum_E",
    "CarlesonSquare", "moment_disk", "moment_carleson_square", "radial_factor",
    "angular_factor", "halfplane_lp_pairing", "eval_f_poisson",
    "HermitianForm", "IntensityResult", "gram_matrix", "largest_eigenvalue",
    "carleson_intensity", "g_norm_dA1",
    "EmbeddingResult", "beta_sum", "embedding_form_spectral", "embedding_form_paper",
    "ratio_lower_bound",
    "CheckReport", "GrowthReport", "Thresholds", "verify_construction_lemmas",
    "verify_analysis_lemmas", "growth_experiment",
    "CarlesonError", "DomainError", "PreconditionError", "NumericError", "ExperimentAborted",
]
