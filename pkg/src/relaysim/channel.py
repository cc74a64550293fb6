"""BPSK mapping, AWGN / quasi-static Rayleigh links and coherent LLRs.

Noise is drawn with per-dimension variance N0/2 on every link: real
Gaussian N(0, N0/2) for non-fading links and circular complex CN(0, N0)
for Rayleigh links.  With the per-link SNR defined as P * sigma_h^2 / N0,
uncoded BPSK then lands exactly on BER = erfc(sqrt(snr))/2 and the coherent
matched-filter LLR 2*sqrt(P)*Re(h* y)/(N0/2) is the exact posterior in both
cases.  Fading is quasi-static: one coefficient per frame, known to the
receiver.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

FADING_NONE = "awgn"
FADING_RAYLEIGH = "rayleigh"


@dataclass(frozen=True)
class LinkConfig:
    """One hop: transmit power, fading model and noise density."""

    power: float
    n0: float
    fading: str = FADING_NONE
    sigma_h2: float = 1.0

    def __post_init__(self):
        if self.power <= 0 or self.n0 <= 0:
            raise ValueError("power and N0 must be positive")
        if self.fading not in (FADING_NONE, FADING_RAYLEIGH):
            raise ValueError(f"unknown fading model {self.fading!r}")
        if self.fading == FADING_RAYLEIGH and self.sigma_h2 <= 0:
            raise ValueError("sigma_h2 must be positive for Rayleigh fading")

    @property
    def snr_db(self) -> float:
        return 10.0 * np.log10(self.power * self.sigma_h2 / self.n0)

    @classmethod
    def from_snr_db(
        cls, snr_db: float, fading: str = FADING_NONE, power: float = 1.0,
        sigma_h2: float = 1.0,
    ) -> "LinkConfig":
        """Fix P = 1 and derive N0 from the requested SNR."""
        n0 = power * sigma_h2 / 10.0 ** (snr_db / 10.0)
        return cls(power=power, n0=n0, fading=fading, sigma_h2=sigma_h2)


@dataclass
class RxFrame:
    """Received samples plus the (receiver-known) channel coefficient."""

    samples: np.ndarray
    h: complex
    link: LinkConfig


def bpsk_modulate(bits: np.ndarray) -> np.ndarray:
    """Map bits to antipodal symbols: 0 -> +1, 1 -> -1."""
    return 1.0 - 2.0 * np.asarray(bits, dtype=np.float64)


def draw_fading(link: LinkConfig, rng: np.random.Generator) -> complex:
    """One quasi-static CN(0, sigma_h^2) coefficient."""
    if link.fading != FADING_RAYLEIGH:
        raise ValueError("draw_fading requires a Rayleigh link")
    scale = np.sqrt(link.sigma_h2 / 2.0)
    return complex(rng.normal(0.0, scale), rng.normal(0.0, scale))


def transmit(symbols: np.ndarray, link: LinkConfig, rng: np.random.Generator) -> RxFrame:
    """y = sqrt(P) * h * x + n with h drawn once per frame."""
    symbols = np.asarray(symbols, dtype=np.float64)
    amp = np.sqrt(link.power)
    if link.fading == FADING_RAYLEIGH:
        h = draw_fading(link, rng)
        scale = np.sqrt(link.n0 / 2.0)
        noise = rng.normal(0.0, scale, symbols.size) + 1j * rng.normal(
            0.0, scale, symbols.size
        )
        samples = amp * h * symbols + noise
    else:
        h = 1.0
        samples = amp * symbols + rng.normal(0.0, np.sqrt(link.n0 / 2.0), symbols.size)
    return RxFrame(samples=samples, h=h, link=link)


def channel_llrs(rx: RxFrame) -> np.ndarray:
    """Coherent LLRs 2*sqrt(P)*Re(h* y)/(N0/2), positive favouring +1."""
    link = rx.link
    if link.n0 <= 0:
        raise ValueError("N0 must be positive")
    matched = np.real(np.conj(rx.h) * rx.samples)
    return 2.0 * np.sqrt(link.power) * matched / (link.n0 / 2.0)
