"""Link-level simulator for hard and soft decode-and-forward relaying.

Two scenarios are covered: a two-hop chain whose relay forwards hard
re-encoded bits or one of three soft-encoded variants, and a distributed
turbo code in which the relay contributes the second constituent's parity.
The analysis layer measures conditional pdfs, mutual information and
equivalent two-hop SNRs from the same simulation primitives.
"""

from .analysis import (
    CondPdf,
    EquivalentSnrResult,
    GaussianLlrModel,
    LlrStats,
    SnrMap,
    ber_from_gamma,
    equivalent_snr,
    fit_snr_map,
    histogram_cond_pdf,
    invert_snr_map,
    llr_stats,
    mutual_info_bsc,
    mutual_info_soft,
    total_bep,
)
from .bcjr import BcjrOutput, L_MAX, bcjr_decode, max_star, siso_bcjr_encode
from .channel import LinkConfig, RxFrame, bpsk_modulate, channel_llrs, draw_fading, transmit
from .config import CASE1, CASE2, ConfigError, ExperimentConfig, parse_config, serialize_config
from .dtc import Case2FrameResult, make_interleaver, run_case2_frame, turbo_decode
from .relay import FrameResult, RelayVariant, relay_forward, run_case1_frame
from .runner import BerRecord, measure_snr_map, run_sweep
from .seeds import seed_schedule, substream
from .softenc import SoftBlock, averaging_encode, power_normalize, tanh_map
from .special import erfc, erfcinv, erfcx
from .trellis import CodeSpec, FF_7_5, RSC_1_5_7, Trellis, build_trellis, encode_hard, parse_code_string

__version__ = "0.1.0"
