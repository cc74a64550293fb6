"""Two-hop decode-and-forward chain without a direct link.

Source encodes a frame with the terminated feed-forward code, the relay
BCJR-decodes the first hop and forwards either hard re-encoded bits or one
of the soft-encoded variants (power-normalized per block), and the
destination runs the matching BCJR decoder on the second hop.  The
destination front end always treats the relay symbols as unit BPSK; any
mismatch with the true soft-symbol statistics is part of what the
experiments measure.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .bcjr import bcjr_decode, siso_bcjr_encode
from .channel import LinkConfig, RxFrame, bpsk_modulate, channel_llrs, transmit
from .softenc import SoftBlock, averaging_encode, hard_decisions, power_normalize, tanh_map
from .trellis import Trellis, encode_hard

VARIANT_HARD = "hard"
VARIANT_BCJR_LLR = "bcjr-llr"
VARIANT_BCJR_TANH = "bcjr-tanh"
VARIANT_AVERAGING = "avg"
ALL_VARIANTS = (VARIANT_HARD, VARIANT_BCJR_LLR, VARIANT_BCJR_TANH, VARIANT_AVERAGING)

CRC_OFF = "off"
CRC_GENIE = "genie"


@dataclass(frozen=True)
class RelayVariant:
    """Relay forwarding function plus the optional genie CRC gate."""

    kind: str = VARIANT_HARD
    crc: str = CRC_OFF

    def __post_init__(self):
        if self.kind not in ALL_VARIANTS:
            raise ValueError(f"unknown relay variant {self.kind!r}")
        if self.crc not in (CRC_OFF, CRC_GENIE):
            raise ValueError(f"unknown crc mode {self.crc!r}")
        if self.crc == CRC_GENIE and self.kind != VARIANT_HARD:
            raise ValueError("genie CRC is only meaningful for the hard variant")

    @property
    def scheme_id(self) -> str:
        return self.kind if self.crc == CRC_OFF else f"{self.kind}+crc"


@dataclass
class FrameResult:
    bit_errors: int
    frame_error: bool
    k_data: int
    diagnostics: dict = field(default_factory=dict)


def relay_forward(y_sr: RxFrame, variant: RelayVariant, trellis: Trellis) -> SoftBlock:
    """Decode the first hop and produce the relay's transmit block."""
    llrs = channel_llrs(y_sr)
    decoded = bcjr_decode(trellis, llrs, terminated=True)
    return _transmit_block(decoded.data_app, variant, trellis)


def _transmit_block(data_app: np.ndarray, variant: RelayVariant, trellis: Trellis) -> SoftBlock:
    """Re-encode relay data APPs according to the forwarding variant."""
    if variant.kind == VARIANT_HARD:
        bits = hard_decisions(data_app)
        return SoftBlock(symbols=bpsk_modulate(encode_hard(trellis, bits)), beta=1.0)
    if variant.kind == VARIANT_AVERAGING:
        return power_normalize(averaging_encode(trellis, data_app))
    code_llrs = siso_bcjr_encode(trellis, data_app)
    if variant.kind == VARIANT_BCJR_TANH:
        return power_normalize(tanh_map(code_llrs))
    return power_normalize(code_llrs)


def run_case1_frame(
    trellis: Trellis,
    variant: RelayVariant,
    link_sr: LinkConfig,
    link_rd: LinkConfig,
    data: np.ndarray,
    rng_sr: np.random.Generator,
    rng_rd: np.random.Generator,
    collect_taps: bool = False,
) -> FrameResult:
    """One full source -> relay -> destination frame; counts data-bit errors."""
    code = encode_hard(trellis, data, terminate=True)
    y_sr = transmit(bpsk_modulate(code), link_sr, rng_sr)

    relay_in = channel_llrs(y_sr)
    relay_dec = bcjr_decode(trellis, relay_in, terminated=True)
    block = _transmit_block(relay_dec.data_app, variant, trellis)

    y_rd = transmit(block.symbols, link_rd, rng_rd)
    dest = bcjr_decode(trellis, channel_llrs(y_rd), terminated=False)
    decisions = hard_decisions(dest.data_app)

    errors = int(np.sum(decisions != data))
    diag: dict = {}
    if collect_taps:
        data_signs = bpsk_modulate(data)
        code_unterm = encode_hard(trellis, data, terminate=False)
        # Taps keep the unclipped APPs: moment-based measurements need them.
        diag["relay_data_llr"] = relay_dec.raw_data_app
        diag["relay_data_truth"] = data_signs
        diag["relay_symbols"] = block.symbols
        diag["relay_code_truth"] = bpsk_modulate(code_unterm)
        diag["relay_hard_bits"] = hard_decisions(relay_dec.data_app)
        diag["dest_data_llr"] = dest.raw_data_app
        diag["dest_data_truth"] = data_signs
    return FrameResult(
        bit_errors=errors,
        frame_error=errors > 0,
        k_data=int(data.size),
        diagnostics=diag,
    )
