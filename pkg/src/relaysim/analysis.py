"""Statistical post-processing: conditional pdfs, mutual information and
the equivalent-SNR chain.

Mutual information of soft values is evaluated on binned histogram mass
rather than on fitted Gaussians, because the Gaussian model is badly wrong
for soft-encoded symbols at low SNR; the Gaussian moments are still
reported for the additive-noise model.  The hard-relaying channel is scored
as a BSC.  The equivalent two-hop SNR follows the bit-error-probability
composition, the erfc bridge and the inverse of a fitted cubic that maps a
decoder's input LLR quality to its output LLR quality.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .special import erfc, erfcinv

HIST_BINS = 201
SYMBOL_HIST_RANGE = (-1.5, 1.5)
LLR_HIST_RANGE = (-40.0, 40.0)


@dataclass
class CondPdf:
    """Per-bin probability mass conditioned on the transmitted symbol."""

    bin_edges: np.ndarray
    mass_pos: np.ndarray
    mass_neg: np.ndarray

    @property
    def bin_centers(self) -> np.ndarray:
        return 0.5 * (self.bin_edges[:-1] + self.bin_edges[1:])


@dataclass
class GaussianLlrModel:
    """Additive Gaussian model value = mu * c + n, n ~ N(0, sigma2)."""

    mu: float
    sigma2: float


@dataclass
class LlrStats:
    """Folded first/second moments of L-values plus gamma = mu^2/sigma^2."""

    model: GaussianLlrModel
    gamma: float
    count: int

    @property
    def degenerate(self) -> bool:
        return math.isinf(self.gamma)


@dataclass
class SnrMap:
    """Cubic gamma_in -> gamma_out regression, monotone on its fit range."""

    coeffs: np.ndarray  # (a3, a2, a1, a0)
    fit_range: tuple[float, float]

    def __call__(self, gamma_in):
        return np.polyval(self.coeffs, gamma_in)


@dataclass
class EquivalentSnrResult:
    p_tot: float
    gamma_eq_out: float
    gamma_eq: float


class SnrMapRangeError(ValueError):
    """Requested output quality is outside the map's validated range."""


def _single_hist(values: np.ndarray, bins: int, lo: float, hi: float) -> np.ndarray:
    clamped = np.clip(values, lo, hi)
    counts, _ = np.histogram(clamped, bins=bins, range=(lo, hi))
    return counts.astype(np.float64)


def histogram_cond_pdf(
    values: np.ndarray,
    truth: np.ndarray,
    bins: int = HIST_BINS,
    value_range: tuple[float, float] = SYMBOL_HIST_RANGE,
) -> CondPdf:
    """Normalized per-condition histograms of (value, transmitted-symbol) pairs.

    ``truth`` holds the transmitted antipodal symbols (+1/-1).  Samples
    outside the range are clamped into the boundary bins so each condition's
    mass still sums to one.
    """
    values = np.asarray(values, dtype=np.float64)
    truth = np.asarray(truth)
    if values.shape != truth.shape:
        raise ValueError("values and truth must have matching shapes")
    lo, hi = value_range
    pos = values[truth > 0]
    neg = values[truth < 0]
    if pos.size == 0 or neg.size == 0:
        raise ValueError("each condition needs at least one sample")
    edges = np.linspace(lo, hi, bins + 1)
    return CondPdf(
        bin_edges=edges,
        mass_pos=_single_hist(pos, bins, lo, hi) / pos.size,
        mass_neg=_single_hist(neg, bins, lo, hi) / neg.size,
    )


def mutual_info_soft(pdf: CondPdf) -> float:
    """Binary-input mutual information in bits from binned conditional mass."""
    mix = 0.5 * (pdf.mass_pos + pdf.mass_neg)
    total = 0.0
    for mass in (pdf.mass_pos, pdf.mass_neg):
        nz = mass > 0
        total += 0.5 * np.sum(mass[nz] * np.log2(mass[nz] / mix[nz]))
    return float(max(total, 0.0))


def mutual_info_gaussian(model: GaussianLlrModel, grid_points: int = 20001) -> float:
    """Mutual information of the additive-Gaussian-model channel.

    Scores a soft value stream the way a receiver that believes the
    value = mu*c + N(0, sigma2) model would: when the real distribution is
    far from Gaussian (near-zero spikes), the moment-matched model wipes out
    most of the measured information, which is exactly the effect the
    soft-vs-hard encoder comparison is about.
    """
    if model.sigma2 <= 0:
        return 1.0
    mu = abs(model.mu)
    sigma = math.sqrt(model.sigma2)
    x = np.linspace(mu - 10 * sigma, mu + 10 * sigma, grid_points)
    # Density of the value given c=+1; the c=-1 term mirrors it, so one
    # integral with both densities evaluated on the same grid suffices.
    p_pos = np.exp(-((x - mu) ** 2) / (2 * model.sigma2)) / (sigma * np.sqrt(2 * np.pi))
    p_neg = np.exp(-((x + mu) ** 2) / (2 * model.sigma2)) / (sigma * np.sqrt(2 * np.pi))
    mix = 0.5 * (p_pos + p_neg)
    good = p_pos > 0
    integrand = np.where(good, p_pos * np.log2(np.where(good, p_pos / mix, 1.0)), 0.0)
    return float(min(max(np.trapezoid(integrand, x), 0.0), 1.0))


def mutual_info_bsc(q: float) -> float:
    """1 - H2(q) for a binary symmetric channel with flip probability q."""
    if not 0.0 <= q <= 1.0:
        raise ValueError("flip probability must lie in [0, 1]")
    h2 = 0.0
    for p in (q, 1.0 - q):
        if p > 0.0:
            h2 -= p * math.log2(p)
    return 1.0 - h2


def llr_stats(llrs: np.ndarray, truth: np.ndarray) -> LlrStats:
    """Fold L-values by the true symbols and estimate mu, sigma^2, gamma."""
    llrs = np.asarray(llrs, dtype=np.float64)
    truth = np.asarray(truth, dtype=np.float64)
    if llrs.size == 0:
        raise ValueError("need at least one L-value")
    if llrs.shape != truth.shape:
        raise ValueError("llrs and truth must have matching shapes")
    folded = llrs * truth
    mu = float(np.mean(folded))
    sigma2 = float(np.var(folded, ddof=1)) if folded.size > 1 else 0.0
    gamma = math.inf if sigma2 == 0.0 else mu * mu / sigma2
    return LlrStats(model=GaussianLlrModel(mu=mu, sigma2=sigma2), gamma=gamma,
                    count=int(llrs.size))


def ber_from_gamma(gamma_out: float) -> float:
    """Bit error probability erfc(sqrt(gamma/2))/2 of a Gaussian LLR model."""
    if gamma_out < 0:
        raise ValueError("gamma must be non-negative")
    return 0.5 * erfc(math.sqrt(gamma_out / 2.0))


def total_bep(p_sr: float, p_rd: float) -> float:
    """Two-hop end-to-end bit error probability (one hop wrong, not both)."""
    for p in (p_sr, p_rd):
        if not 0.0 <= p <= 1.0:
            raise ValueError("probabilities must lie in [0, 1]")
    return p_sr * (1.0 - p_rd) + (1.0 - p_sr) * p_rd


def fit_snr_map(
    gamma_in: np.ndarray,
    gamma_out: np.ndarray,
    fit_range: tuple[float, float] | None = None,
) -> SnrMap:
    """Least-squares cubic through measured (gamma_in, gamma_out) pairs.

    Requires at least 8 pairs spanning a non-degenerate range; the fitted
    cubic must be strictly increasing on the fit range.
    """
    gamma_in = np.asarray(gamma_in, dtype=np.float64)
    gamma_out = np.asarray(gamma_out, dtype=np.float64)
    if gamma_in.size != gamma_out.size:
        raise ValueError("gamma_in and gamma_out must have equal length")
    if gamma_in.size < 8:
        raise ValueError("need at least 8 measurement pairs for a stable cubic")
    if np.ptp(gamma_in) <= 0:
        raise ValueError("gamma_in range is degenerate")
    if fit_range is None:
        fit_range = (float(np.min(gamma_in)), float(np.max(gamma_in)))
    with warnings.catch_warnings():
        warnings.simplefilter("error", np.exceptions.RankWarning)
        try:
            coeffs = np.polyfit(gamma_in, gamma_out, 3)
        except np.exceptions.RankWarning as exc:
            raise ValueError("rank-deficient fit: gamma_in range too narrow") from exc
    snr_map = SnrMap(coeffs=coeffs, fit_range=fit_range)
    grid = np.linspace(fit_range[0], fit_range[1], 1024)
    values = snr_map(grid)
    if np.any(np.diff(values) <= 0):
        raise ValueError("fitted cubic is not strictly increasing on the fit range")
    return snr_map


def invert_snr_map(snr_map: SnrMap, gamma_out: float, tol: float = 1e-10) -> float:
    """Bisect the monotone cubic on its fit range."""
    lo, hi = snr_map.fit_range
    flo, fhi = snr_map(lo), snr_map(hi)
    edge = 1e-9 * max(1.0, fhi - flo)
    if flo - edge <= gamma_out < flo:
        return lo
    if fhi < gamma_out <= fhi + edge:
        return hi
    if not flo <= gamma_out <= fhi:
        raise SnrMapRangeError(
            f"gamma_out {gamma_out:.6g} outside mapped range [{flo:.6g}, {fhi:.6g}]"
        )
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if snr_map(mid) < gamma_out:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def equivalent_snr(p_tot: float, snr_map: SnrMap) -> EquivalentSnrResult:
    """Equivalent single-hop SNR whose decoded BER matches the two-hop chain."""
    if not 0.0 < p_tot <= 0.5:
        raise ValueError("p_tot must lie in (0, 0.5] for a meaningful inversion")
    gamma_eq_out = 2.0 * erfcinv(2.0 * p_tot) ** 2
    gamma_eq = invert_snr_map(snr_map, gamma_eq_out)
    return EquivalentSnrResult(p_tot=p_tot, gamma_eq_out=gamma_eq_out, gamma_eq=gamma_eq)


def predicted_total_bep(gamma_sr: float, gamma_rd: float, snr_map: SnrMap) -> float:
    """Analytic two-hop BER from per-link input LLR qualities via the map."""
    p_sr = ber_from_gamma(float(snr_map(gamma_sr)))
    p_rd = ber_from_gamma(float(snr_map(gamma_rd)))
    return total_bep(p_sr, p_rd)
