"""Averaging soft channel encoder, tanh post-map and power normalization.

The averaging encoder keeps the hard parity-check structure for the signs
(so the sign pattern is always a valid codeword) and assigns each code bit
the arithmetic mean of the |L|-values of the data bits entering its
parity-check equation.  Unlike a product-style soft encoder, one unreliable
bit therefore lowers the output magnitude instead of wiping it out.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .trellis import Trellis, encode_hard


@dataclass
class SoftBlock:
    """Power-normalized relay transmit symbols for one code-word block."""

    symbols: np.ndarray
    beta: float

    @property
    def mean_power(self) -> float:
        return float(np.mean(self.symbols**2))


def hard_decisions(llrs: np.ndarray) -> np.ndarray:
    """LLR signs to bits: L < 0 -> 1, ties resolve to 0."""
    return (np.asarray(llrs) < 0).astype(np.int8)


def averaging_encode(trellis: Trellis, data_llrs: np.ndarray) -> np.ndarray:
    """Soft-encode data L-values: hard parity signs, mean-|L| magnitudes.

    Output length is n*K (unterminated, matching the relay's re-encoding).
    Register positions that still hold the zero initialization are known
    constants and do not enter the magnitude average.
    """
    data_llrs = np.asarray(data_llrs, dtype=np.float64)
    if data_llrs.size == 0:
        raise ValueError("data LLR sequence must be non-empty")
    k_len = data_llrs.size
    bits = hard_decisions(data_llrs)
    code = encode_hard(trellis, bits, terminate=False)
    mags = np.abs(data_llrs)

    n = trellis.n_out
    out = np.empty(k_len * n)
    for j, offsets in enumerate(trellis.involved_offsets):
        acc = np.zeros(k_len)
        cnt = np.zeros(k_len)
        for o in offsets:
            acc[o:] += mags[: k_len - o]
            cnt[o:] += 1.0
        out[j::n] = acc / np.maximum(cnt, 1.0)
    signs = 1.0 - 2.0 * code.astype(np.float64)
    return signs * out


def tanh_map(llrs: np.ndarray) -> np.ndarray:
    """Map L-values to soft symbols tanh(L/2) in (-1, +1)."""
    return np.tanh(np.asarray(llrs, dtype=np.float64) / 2.0)


def power_normalize(symbols: np.ndarray, target_power: float = 1.0) -> SoftBlock:
    """Scale a block so its mean symbol power equals ``target_power``.

    beta = 1/sqrt(mean(symbols^2)); an all-zero block has no defined scale
    and raises.
    """
    symbols = np.asarray(symbols, dtype=np.float64)
    mean_power = float(np.mean(symbols**2))
    if mean_power == 0.0:
        raise ValueError("cannot normalize an all-zero block")
    beta = 1.0 / np.sqrt(mean_power)
    return SoftBlock(symbols=np.sqrt(target_power) * beta * symbols, beta=beta)
