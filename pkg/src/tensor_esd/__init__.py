"""
Spectra of sample covariance matrices built from random tensor products.

Columns are products ``x_{i_1} ... x_{i_d}`` over all d-subsets of n i.i.d.
symmetric scalars.  The package samples such matrices, computes their
spectra with a self-contained symmetric eigensolver, and compares them with
the Marchenko-Pastur law and its anisotropic generalization.  Exact moment
formulas and resolvent identities come with independent numerical checks.
"""

__version__ = "0.1.0"

from .errors import (BinomialOverflowError, ConvergenceError, DomainError, InvariantError,
                     NumericError, ResourceError, TensorESDError, ValidationError)
from .tensor_model import (ModelParams, MomentModel, apply_population_sqrt, binomial,
                           build_columns, colex_subsets, rank_subset, sample_matrix,
                           unrank_subset)
from .eigensolve import (EmpiricalSpectrum, covariance, covariance_spectrum,
                         resolvent_trace, shifted_solve, sym_eigenvalues)
from .mp_law import MpLaw, mp_cdf, mp_density, mp_moment, mp_stieltjes
from .general_mp import (DiscreteMeasure, esd_of_population, fixpoint_cdf, solve_ie,
                         stieltjes_inversion)
from .moments import (c_moment, c_moment_bound, exact_norm_variance,
                      exact_norm_variance_ratio, mc_norm_variance, shared_degrees,
                      tensor_moment, variance_report)
from .metrics import Histogram, histogram, ks_distance, spectral_moment
from .identities import IdentityReport, identity_suite
