"""Random matrices and partial sums built from lacunary function systems."""

__version__ = "0.1.0"

from .ensemble import EnsembleSpec, build_matrix, mc_mean_esd, mc_mean_moments
from .fourier import TrigPolynomial
from .oracle import exact_mean_trace, exact_variance_sigma2, kac_sigma2
from .sampling import UnitSample, frac_mul, sample_unit, stream, to_real
from .sequences import LacunarySequence, check_hadamard, condition251_sum, diophantine_counts
from .spectra import catalan, semicircle_cdf
from .sumslab import SumExperiment, erdos_fortet_limit_cdf, run_sums
