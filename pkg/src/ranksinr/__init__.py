"""SINR distributions and outage under rank-aware MIMO interference.

Closed-form densities and outage probabilities for a beamforming or
OSTBC receiver facing any mix of beamforming, spatial-multiplexing,
and OSTBC interferers of unequal power, plus the Monte Carlo oracle
used to validate them.
"""

from ._version import __version__
from .approx import (
    ChainReport,
    ProductDistribution,
    compare_chain,
    exp_approx_pdf,
    product_pdf,
)
from .bf import BfModel, outage_bf, sinr_pdf_bf
from .errors import (
    ConfigError,
    DegenerateRatesError,
    EmptyMixtureError,
    NumericInstabilityError,
    RankSinrError,
    UnsupportedDimensionError,
)
from .mixture import MixtureSpec, build_mixture, cdf_y, pdf_y
from .montecarlo import (
    EmpiricalDistribution,
    dominant_eigvec,
    empirical_outage,
    simulate_bf_sinr,
    simulate_ostbc_sinr,
)
from .ostbc import OstbcModel, outage_ostbc, outage_white_interference, sinr_pdf_ostbc
from .scenario import (
    InterfererSpec,
    OwnMode,
    ScenarioConfig,
    Technique,
    build_rate_set,
    config_from_dict,
    load_config,
)
from .sweeps import SweepKind, SweepSpec, find_crossing, threshold_gain
from .wishart import EigenWeightTable, compute_weights

__all__ = [
    "__version__",
    "BfModel",
    "ChainReport",
    "ConfigError",
    "DegenerateRatesError",
    "EigenWeightTable",
    "EmptyMixtureError",
    "EmpiricalDistribution",
    "InterfererSpec",
    "MixtureSpec",
    "NumericInstabilityError",
    "OstbcModel",
    "OwnMode",
    "ProductDistribution",
    "RankSinrError",
    "ScenarioConfig",
    "SweepKind",
    "SweepSpec",
    "Technique",
    "UnsupportedDimensionError",
    "build_mixture",
    "build_rate_set",
    "cdf_y",
    "compare_chain",
    "compute_weights",
    "config_from_dict",
    "dominant_eigvec",
    "empirical_outage",
    "exp_approx_pdf",
    "find_crossing",
    "load_config",
    "outage_bf",
    "outage_ostbc",
    "outage_white_interference",
    "pdf_y",
    "product_pdf",
    "simulate_bf_sinr",
    "simulate_ostbc_sinr",
    "sinr_pdf_bf",
    "sinr_pdf_ostbc",
    "threshold_gain",
]
