"""Exact log-domain BCJR engine.

One forward-backward kernel serves two roles: driven by channel LLRs it is
the MAP decoder, driven by data-bit LLRs alone it is the soft channel
encoder producing code-bit a-posteriori L-values.  The log-sum-exp uses the
full ln(1+e^-|a-b|) correction (no max-log approximation) so the measured
LLR distributions are true APPs.

Sign convention: logical 0 <-> +1, logical 1 <-> -1, L > 0 means +1 is more
likely.  All LLRs are clipped to +-L_MAX on the way in and out.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numba import njit

L_MAX = 50.0
_NEG = -1.0e300


def max_star(a: float, b: float) -> float:
    """ln(e^a + e^b) with the full correction term."""
    if a < b:
        a, b = b, a
    return a + math.log1p(math.exp(b - a))


def clip_llrs(llrs: np.ndarray, limit: float = L_MAX) -> np.ndarray:
    return np.clip(np.asarray(llrs, dtype=np.float64), -limit, limit)


@dataclass
class BcjrOutput:
    """A-posteriori L-values of one forward-backward pass.

    ``extrinsic`` is ``data_app - apriori`` minus the systematic channel
    term when the code is systematic, so the additive LLR decomposition
    holds exactly.  ``raw_data_app`` keeps the unclipped values: moment
    measurements (mu^2/sigma^2 transfer curves) need them, because clipping
    collapses the variance once the working point pushes APPs past L_MAX.
    """

    data_app: np.ndarray
    codebit_app: np.ndarray
    extrinsic: np.ndarray
    raw_data_app: np.ndarray


@njit(cache=True, nogil=True)
def _forward_backward(next_state, out_signs, lch, la, n_seg, k_data, terminated):
    S = next_state.shape[0]
    n = out_signs.shape[2]

    gam = np.empty((n_seg, S, 2))
    for k in range(n_seg):
        ak = la[k] if k < k_data else 0.0
        for s in range(S):
            for u in range(2):
                g = 0.5 * (1.0 - 2.0 * u) * ak
                for i in range(n):
                    g += 0.5 * out_signs[s, u, i] * lch[k * n + i]
                gam[k, s, u] = g

    alpha = np.full((n_seg + 1, S), _NEG)
    alpha[0, 0] = 0.0
    for k in range(n_seg):
        for s in range(S):
            a = alpha[k, s]
            if a < -1.0e250:
                continue
            for u in range(2):
                t = next_state[s, u]
                c = a + gam[k, s, u]
                b = alpha[k + 1, t]
                if b < c:
                    b, c = c, b
                alpha[k + 1, t] = b + np.log1p(np.exp(c - b))
        mx = alpha[k + 1, 0]
        for s in range(1, S):
            if alpha[k + 1, s] > mx:
                mx = alpha[k + 1, s]
        for s in range(S):
            alpha[k + 1, s] -= mx

    beta = np.empty((n_seg + 1, S))
    for s in range(S):
        beta[n_seg, s] = _NEG if (terminated and s != 0) else 0.0
    for k in range(n_seg - 1, -1, -1):
        for s in range(S):
            acc = _NEG
            for u in range(2):
                c = beta[k + 1, next_state[s, u]] + gam[k, s, u]
                if acc < c:
                    acc, c = c, acc
                acc = acc + np.log1p(np.exp(c - acc))
            beta[k, s] = acc
        mx = beta[k, 0]
        for s in range(1, S):
            if beta[k, s] > mx:
                mx = beta[k, s]
        for s in range(S):
            beta[k, s] -= mx

    data_llr = np.empty(k_data)
    code_llr = np.empty(n_seg * n)
    for k in range(n_seg):
        num_u = _NEG
        den_u = _NEG
        num_c = np.full(n, _NEG)
        den_c = np.full(n, _NEG)
        for s in range(S):
            a = alpha[k, s]
            if a < -1.0e250:
                continue
            for u in range(2):
                metric = a + gam[k, s, u] + beta[k + 1, next_state[s, u]]
                if u == 0:
                    if num_u < metric:
                        num_u, metric2 = metric, num_u
                    else:
                        metric2 = metric
                    num_u = num_u + np.log1p(np.exp(metric2 - num_u))
                else:
                    if den_u < metric:
                        den_u, metric2 = metric, den_u
                    else:
                        metric2 = metric
                    den_u = den_u + np.log1p(np.exp(metric2 - den_u))
                for i in range(n):
                    if out_signs[s, u, i] > 0.0:
                        if num_c[i] < metric:
                            num_c[i], metric2 = metric, num_c[i]
                        else:
                            metric2 = metric
                        num_c[i] = num_c[i] + np.log1p(np.exp(metric2 - num_c[i]))
                    else:
                        if den_c[i] < metric:
                            den_c[i], metric2 = metric, den_c[i]
                        else:
                            metric2 = metric
                        den_c[i] = den_c[i] + np.log1p(np.exp(metric2 - den_c[i]))
        if k < k_data:
            data_llr[k] = num_u - den_u
        for i in range(n):
            code_llr[k * n + i] = num_c[i] - den_c[i]
    return data_llr, code_llr


def _run_kernel(trellis, lch, la, n_seg, k_data, terminated):
    return _forward_backward(
        trellis.next_state,
        trellis.out_signs,
        np.ascontiguousarray(lch, dtype=np.float64),
        np.ascontiguousarray(la, dtype=np.float64),
        n_seg,
        k_data,
        terminated,
    )


def bcjr_decode(
    trellis,
    channel_llrs: np.ndarray,
    apriori: np.ndarray | None = None,
    terminated: bool = False,
) -> BcjrOutput:
    """Exact log-MAP decode producing data and code-bit APP L-values.

    ``channel_llrs`` covers every transmitted code bit (n per trellis
    segment, including tail segments when ``terminated``); ``apriori`` has
    one L-value per data bit, all-zero meaning equiprobable.  The forward
    recursion starts in state 0; the backward recursion is pinned to state 0
    only for terminated streams.
    """
    lch = clip_llrs(channel_llrs)
    n = trellis.n_out
    if lch.size % n != 0:
        raise ValueError("channel LLR length is not a multiple of the code rate")
    n_seg = lch.size // n
    k_data = n_seg - (trellis.memory if terminated else 0)
    if k_data < 1:
        raise ValueError("stream too short for the termination policy")
    if apriori is None:
        la = np.zeros(k_data)
    else:
        la = clip_llrs(apriori)
        if la.size != k_data:
            raise ValueError(
                f"apriori length {la.size} does not match {k_data} data bits"
            )
    raw_data, raw_code = _run_kernel(trellis, lch, la, n_seg, k_data, terminated)
    data_app = clip_llrs(raw_data)
    extrinsic = data_app - la
    if trellis.systematic:
        extrinsic = extrinsic - lch[: k_data * n : n]
    return BcjrOutput(
        data_app=data_app,
        codebit_app=clip_llrs(raw_code),
        extrinsic=extrinsic,
        raw_data_app=raw_data,
    )


def siso_bcjr_encode(trellis, data_llrs: np.ndarray) -> np.ndarray:
    """Soft channel encoder: code-bit L-values from data-bit L-values alone.

    The transition metric is driven purely by the input bit probabilities;
    no channel observation enters.  The stream is treated as unterminated.
    """
    la = clip_llrs(data_llrs)
    if la.size == 0:
        raise ValueError("data LLR sequence must be non-empty")
    k = la.size
    lch = np.zeros(k * trellis.n_out)
    _, raw_code = _run_kernel(trellis, lch, la, k, k, False)
    return clip_llrs(raw_code)
