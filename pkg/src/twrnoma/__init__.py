"""Two-way relay NOMA outage-performance laboratory.

Three independent computation paths for the same outage probabilities
(closed forms, numerical quadrature of the underlying integrals, and seeded
Monte Carlo over Rayleigh fading), plus delay-limited throughput, diversity
estimation, and sweep/figure tooling around them.
"""

from .analysis import (
    HypoexpSpec,
    OutageValue,
    diversity_order_estimate,
    hypoexp_pdf,
    outage_xl,
    outage_xl_asymptotic,
    outage_xt,
    outage_xt_asymptotic,
    throughput_delay_limited,
)
from .errors import ConfigError, NumericError, OracleError
from .experiments import (
    CurveRow,
    SweepSpec,
    crossover_snr_db,
    figure_preset,
    oma_outage,
    oracle_agreement,
    run_sweep,
)
from .model import (
    GROUP_ONE,
    GROUP_TWO,
    ChannelSample,
    DerivedConstants,
    PairRoles,
    RandomStream,
    SystemConfig,
    build_derived_constants,
    load_config_file,
    omega_from_distances,
    sample_channel_block,
    sample_channels,
)
from .montecarlo import (
    ErgodicRateEstimate,
    OutageEstimate,
    mc_ergodic_rates,
    mc_outage_xl,
    mc_outage_xt,
    wilson_interval,
)
from .oracle import QuadSpec, integrate_semi_infinite, quad_outage_xl, quad_outage_xt
from .sinr import SinrSet, compute_sinrs

__all__ = [
    "ChannelSample",
    "ConfigError",
    "CurveRow",
    "DerivedConstants",
    "ErgodicRateEstimate",
    "GROUP_ONE",
    "GROUP_TWO",
    "HypoexpSpec",
    "NumericError",
    "OracleError",
    "OutageEstimate",
    "OutageValue",
    "PairRoles",
    "QuadSpec",
    "RandomStream",
    "SinrSet",
    "SweepSpec",
    "SystemConfig",
    "build_derived_constants",
    "compute_sinrs",
    "crossover_snr_db",
    "diversity_order_estimate",
    "figure_preset",
    "hypoexp_pdf",
    "integrate_semi_infinite",
    "load_config_file",
    "mc_ergodic_rates",
    "mc_outage_xl",
    "mc_outage_xt",
    "oma_outage",
    "omega_from_distances",
    "oracle_agreement",
    "outage_xl",
    "outage_xl_asymptotic",
    "outage_xt",
    "outage_xt_asymptotic",
    "quad_outage_xl",
    "quad_outage_xt",
    "run_sweep",
    "sample_channel_block",
    "sample_channels",
    "throughput_delay_limited",
    "wilson_interval",
]
