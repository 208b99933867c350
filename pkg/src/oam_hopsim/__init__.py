"""OAM mode-hopping simulator with index modulation over UCA line-of-sight links."""

from .bounds import (
    CovarianceSet,
    MutualInfoEstimate,
    SeBounds,
    build_covariances,
    c_lower,
    c_upper_kl,
    c_upper_simplified,
    gaussian_kl,
    index_information_upper,
    kl_mixture_upper,
    monte_carlo_mutual_info,
    se_bounds,
    signal_information,
    signal_term,
)
from .channel import (
    ChannelGains,
    NoiseProfile,
    UcaGeometry,
    bessel_j,
    channel_gain,
    channel_gains,
    flat_gains,
    mode_snrs,
)
from .kernels import DEFAULT_BACKEND
from .modes import (
    HopPattern,
    ModeCombination,
    binomial,
    bits_to_combination,
    generate_hop_pattern,
    mode_alphabet,
    rank,
    unrank,
)
from .optimizer import HopCountSearchResult, f_prime, find_optimal_hops, harmonic
from .phy import ModeSymbols, apply_channel, decompose, select_modes, synthesize

__version__ = "0.1.0"
