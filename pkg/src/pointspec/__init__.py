"""Structure-factor estimation and hyperuniformity diagnostics for
stationary point processes.
"""

__version__ = "0.1.0"

from .core import (Ball, Box, PointPattern, WaveGrid, allowed_wavenumbers_ball,
                   allowed_wavevectors, estimate_intensity,
                   min_allowed_wavevector, min_wavenumber_floor,
                   restrict_to_window)
from .diagnostics import (CoupledSumDraw, HIndexReport, TestReport,
                          coupled_sum_draw, fit_alpha, h_index, imse,
                          multiscale_test, paired_t_test,
                          poisson_si_second_moment, run_multiscale_test,
                          size_lambda, truncation_weights)
from .errors import NumericalError, ResourceError, ValidationError
from .isotropic import (DhtGrid, OgataParams, PcfEstimate, PcfInterpolant,
                        bartlett_isotropic, default_r_max, estimate_pcf_kernel,
                        hankel_dht, hankel_ogata, interpolate_pcf)
from .samplers import (ProcessSampler, exact_curves, load_pattern, pcf_ginibre,
                       pcf_poisson, pcf_thomas, sample_ginibre, sample_poisson,
                       sample_thomas, save_pattern, structure_factor_ginibre,
                       structure_factor_poisson, structure_factor_thomas,
                       thin, thinned_structure_factor)
from .specfun import (bessel_j, bessel_j_zeros, bessel_y, ft_alpha0_ball,
                      ft_indicator_box)
from .spectral import (BinnedProfile, SpectralEstimate, bin_by_wavenumber,
                       load_estimate, multitaper, save_estimate,
                       scattering_intensity, tapered)
from .tapers import IndicatorTaper, SineTaper, indicator_taper, sine_taper, sine_taper_family

__all__ = [
    "Ball", "BinnedProfile", "Box", "CoupledSumDraw", "DhtGrid", "HIndexReport",
    "IndicatorTaper", "NumericalError", "OgataParams", "PcfEstimate",
    "PcfInterpolant", "PointPattern", "ProcessSampler", "ResourceError",
    "SineTaper", "SpectralEstimate", "TestReport", "ValidationError", "WaveGrid",
    "allowed_wavenumbers_ball", "allowed_wavevectors", "bartlett_isotropic",
    "bessel_j", "bessel_j_zeros", "bessel_y", "bin_by_wavenumber",
    "coupled_sum_draw", "default_r_max", "estimate_intensity",
    "estimate_pcf_kernel", "exact_curves", "fit_alpha", "ft_alpha0_ball",
    "ft_indicator_box", "h_index", "hankel_dht", "hankel_ogata", "imse",
    "indicator_taper", "interpolate_pcf", "load_estimate", "load_pattern",
    "min_allowed_wavevector", "min_wavenumber_floor", "multiscale_test",
    "multitaper", "paired_t_test", "pcf_ginibre", "pcf_poisson", "pcf_thomas",
    "poisson_si_second_moment", "restrict_to_window", "run_multiscale_test",
    "sample_ginibre", "sample_poisson", "sample_thomas", "save_estimate",
    "save_pattern", "scattering_intensity", "sine_taper", "sine_taper_family",
    "size_lambda", "structure_factor_ginibre", "structure_factor_poisson",
    "structure_factor_thomas", "tapered", "thin", "thinned_structure_factor",
    "truncation_weights",
]
