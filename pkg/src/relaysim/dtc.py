"""Distributed turbo code: RSC source, relayed parity, iterative decoding.

The source broadcasts a terminated RSC frame.  The relay decodes it,
interleaves (hard bits or L-values depending on the variant), re-encodes
with the same RSC code, punctures the systematic stream and forwards only
the parity bits.  The destination runs a two-constituent turbo decoder:
constituent 1 sees the source transmission, constituent 2 sees the
interleaved systematic observations plus the relay parity.  One iteration
means one run of each constituent decoder.

With the genie CRC enabled the relay stays silent whenever its hard
decisions differ from the true data, so the relay parity contributes zero
LLRs for that frame.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .bcjr import bcjr_decode, clip_llrs, siso_bcjr_encode
from .channel import LinkConfig, bpsk_modulate, channel_llrs, transmit
from .relay import RelayVariant, VARIANT_AVERAGING, VARIANT_BCJR_TANH, VARIANT_HARD
from .softenc import averaging_encode, hard_decisions, power_normalize, tanh_map
from .trellis import Trellis, encode_hard


def make_interleaver(k: int, seed: int) -> np.ndarray:
    """Seed-derived uniform random permutation of {0..k-1}."""
    return np.random.default_rng(seed).permutation(k)


def interleave(values: np.ndarray, perm: np.ndarray) -> np.ndarray:
    return np.asarray(values)[perm]


def deinterleave(values: np.ndarray, perm: np.ndarray) -> np.ndarray:
    out = np.empty_like(np.asarray(values))
    out[perm] = values
    return out


@dataclass
class TurboResult:
    """Final decisions plus optional per-iteration taps."""

    decisions: np.ndarray
    per_iter_errors: np.ndarray | None = None
    per_iter_llrs: list[np.ndarray] = field(default_factory=list)


def relay_parity_block(
    data_app: np.ndarray, variant: RelayVariant, trellis: Trellis, perm: np.ndarray
):
    """Interleave, RSC re-encode and puncture to the parity stream.

    Returns the relay transmit symbols (length K) and, for soft variants,
    the pre-normalization parity values for diagnostics.
    """
    if variant.kind == VARIANT_HARD:
        bits = interleave(hard_decisions(data_app), perm)
        parity = encode_hard(trellis, bits)[1::2]
        return bpsk_modulate(parity), bpsk_modulate(parity)
    llrs = interleave(data_app, perm)
    if variant.kind == VARIANT_AVERAGING:
        raw = averaging_encode(trellis, llrs)[1::2]
    else:
        raw = siso_bcjr_encode(trellis, llrs)[1::2]
        if variant.kind == VARIANT_BCJR_TANH:
            raw = tanh_map(raw)
    return power_normalize(raw).symbols, raw


def matched_parity_llrs(rx, mu: float, sigma2: float) -> np.ndarray:
    """Coherent LLRs for soft relay symbols modeled as mu*c + N(0, sigma2).

    Per-block power normalization re-inflates even an all-unreliable block
    to full transmit power, so the symbol amplitudes alone cannot tell the
    destination to ignore a garbage block; the additive-Gaussian model's
    block mean does: as mu -> 0 these LLRs vanish and the second
    constituent decoder ignores the relay.  With mu = 1, sigma2 = 0 this
    reduces exactly to the plain BPSK front end.
    """
    link = rx.link
    matched = np.real(np.conj(rx.h) * rx.samples)
    h2 = float(np.abs(rx.h) ** 2)
    noise = link.power * h2 * sigma2 + link.n0 / 2.0
    return 2.0 * np.sqrt(link.power) * mu * matched / noise


def turbo_decode(
    trellis: Trellis,
    source_llrs: np.ndarray,
    parity2_llrs: np.ndarray,
    perm: np.ndarray,
    iterations: int,
    truth: np.ndarray | None = None,
    collect_llrs: bool = False,
) -> TurboResult:
    """Extrinsic-exchange turbo decoding over the two constituent codes.

    ``source_llrs`` covers the full terminated source frame (systematic and
    parity interleaved per segment); ``parity2_llrs`` has one value per data
    bit (zeros model a silent relay).  Decisions after each iteration come
    from constituent 2's a-posteriori output, deinterleaved.
    """
    if iterations < 1:
        raise ValueError("iterations must be >= 1")
    k = perm.size
    lsd = clip_llrs(source_llrs)
    lsys = lsd[:: trellis.n_out][:k]
    lc2 = np.empty(2 * k)
    lc2[0::2] = interleave(lsys, perm)
    lc2[1::2] = clip_llrs(parity2_llrs)

    apriori1 = np.zeros(k)
    per_iter_llrs: list[np.ndarray] = []
    per_iter_errors = np.empty(iterations, dtype=np.int64) if truth is not None else None
    decisions = np.zeros(k, dtype=np.int8)
    for it in range(iterations):
        out1 = bcjr_decode(trellis, lsd, apriori1, terminated=True)
        apriori2 = clip_llrs(out1.extrinsic)[perm]
        out2 = bcjr_decode(trellis, lc2, apriori2, terminated=False)
        apriori1 = clip_llrs(deinterleave(out2.extrinsic, perm))

        app = deinterleave(out2.data_app, perm)
        decisions = hard_decisions(app)
        if per_iter_errors is not None:
            per_iter_errors[it] = int(np.sum(decisions != truth))
        if collect_llrs:
            per_iter_llrs.append(app)
    return TurboResult(
        decisions=decisions,
        per_iter_errors=per_iter_errors,
        per_iter_llrs=per_iter_llrs,
    )


@dataclass
class Case2FrameResult:
    per_iter_errors: np.ndarray
    k_data: int
    relay_failed: bool
    relay_silent: bool
    diagnostics: dict = field(default_factory=dict)


def run_case2_frame(
    trellis: Trellis,
    variant: RelayVariant,
    link_sr: LinkConfig,
    link_sd: LinkConfig,
    link_rd: LinkConfig,
    data: np.ndarray,
    perm: np.ndarray,
    iterations: int,
    rng_sr: np.random.Generator,
    rng_sd: np.random.Generator,
    rng_rd: np.random.Generator,
    collect_taps: bool = False,
) -> Case2FrameResult:
    """One distributed-turbo frame across the three links."""
    code = encode_hard(trellis, data, terminate=True)
    tx = bpsk_modulate(code)
    y_sr = transmit(tx, link_sr, rng_sr)
    y_sd = transmit(tx, link_sd, rng_sd)

    relay_dec = bcjr_decode(trellis, channel_llrs(y_sr), terminated=True)
    relay_bits = hard_decisions(relay_dec.data_app)
    relay_failed = bool(np.any(relay_bits != data))
    relay_silent = variant.crc == "genie" and relay_failed

    k = data.size
    true_parity = bpsk_modulate(encode_hard(trellis, interleave(data, perm))[1::2])
    if relay_silent:
        parity2_llrs = np.zeros(k)
        raw_parity = np.zeros(k)
    else:
        symbols, raw_parity = relay_parity_block(
            relay_dec.data_app, variant, trellis, perm
        )
        y_rd = transmit(symbols, link_rd, rng_rd)
        if variant.kind == VARIANT_HARD:
            parity2_llrs = channel_llrs(y_rd)
        else:
            # Destination-side model of the soft parity block: first and
            # second moments of the symbols around the would-be-correct
            # parity signs (side information, like the genie CRC).
            mu = float(np.mean(symbols * true_parity))
            sigma2 = max(float(np.mean(symbols**2)) - mu * mu, 0.0)
            parity2_llrs = matched_parity_llrs(y_rd, mu, sigma2)

    result = turbo_decode(
        trellis,
        channel_llrs(y_sd),
        parity2_llrs,
        perm,
        iterations,
        truth=data,
        collect_llrs=collect_taps,
    )

    diag: dict = {}
    if collect_taps:
        # Conditioning truth for the relay stream is the parity the relay
        # would have sent had it decoded correctly.
        diag["per_iter_llrs"] = result.per_iter_llrs
        diag["data_truth"] = bpsk_modulate(data)
        diag["ysd_matched"] = np.real(np.conj(y_sd.h) * y_sd.samples)
        diag["ysd_truth"] = tx
        if relay_silent:
            diag["yrd_matched"] = np.zeros(k)
        else:
            diag["yrd_matched"] = np.real(np.conj(y_rd.h) * y_rd.samples)
        diag["yrd_truth"] = true_parity
        diag["parity2_raw"] = raw_parity
        diag["relay_failed"] = relay_failed
    return Case2FrameResult(
        per_iter_errors=result.per_iter_errors,
        k_data=k,
        relay_failed=relay_failed,
        relay_silent=relay_silent,
        diagnostics=diag,
    )
