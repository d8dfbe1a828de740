"""Quantized massive-MIMO uplink rate simulator."""

from .channel import (
    CellModel,
    ChannelRealization,
    LinkSample,
    UserDrop,
    compose_channel,
    drop_users,
    drops_csv,
    sample_fast_fading,
    sample_link,
)
from .experiments import (
    ResultRow,
    ResultTable,
    ScenarioConfig,
    csv_text,
    load_config,
    run_figure,
    run_figure1,
    run_figure2,
    run_figure3,
    sweep,
    write_csv,
)
from .quantizer import (
    INFINITE,
    LLOYD_MAX,
    TABLE_THEN_FORMULA,
    ConvergenceError,
    QuantizerSpec,
    alpha_of_bits,
    design_lloyd_max,
    measure_aqnm_statistics,
    quantize_stream,
    rho_of_bits,
)
from .rates import (
    MonteCarloEstimate,
    RatePoint,
    approx_rate,
    approx_rate_per_user,
    asymptotic_rate_infinite_bits,
    asymptotic_rate_infinite_power,
    energy_efficiency,
    ergodic_rate_mc,
    evaluate_rate_point,
    instantaneous_rate,
    interference_variance,
    power_scaled_limit,
    receiver_power,
)
from .validation import CheckResult, run_validation

__version__ = "0.1.0"
