"""Software modem and channel simulator for screen-brightness covert channels."""

from .analysis import (
    BerModel,
    SweepResult,
    SweepRow,
    conditional_error_probs,
    distance_sweep,
    fit_loglog_slope,
    monte_carlo_ber,
    q_function,
    theoretical_ber,
)
from .bfrs import BfrsFormatError, read_bfrs, write_bfrs
from .channel import (
    ChannelGeometry,
    ChannelParams,
    SamplingRateError,
    geometric_gain,
    mean_received_amplitude,
    normalized_gain,
    transmit,
    warp_frame,
)
from .core import (
    Color,
    ModulationParams,
    SymbolSeries,
    as_bits,
    bits_to_symbols,
    level_table,
    symbol_to_level,
    symbols_to_bits,
)
from .decoder import (
    DecodeReport,
    DegenerateLevelsError,
    FramingError,
    SyncError,
    decode_frames,
    extract_signal,
    synchronize,
)
from .encoder import (
    CarrierTooShortError,
    apply_level_to_frame,
    encode_stream,
    frame_payload,
    frames_needed,
    make_carrier,
)

__version__ = "0.1.0"
