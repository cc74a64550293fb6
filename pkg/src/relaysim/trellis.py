"""Convolutional code definitions, trellis construction and hard encoding.

Only rate-1/2, single-input codes are supported: the feed-forward [7,5]
code and the recursive systematic [1, 5/7] code cover everything the
simulator needs.  Octal generator polynomials are read MSB-first, i.e. the
most significant bit taps the newest register input.  For the RSC case the
register recursion is ``a_k = u_k ^ a_{k-1} ^ a_{k-2}`` (feedback 7) and
the parity output is ``a_k ^ a_{k-2}`` (feed-forward 5).  The state integer
packs the register as ``(a_{k-1} ... a_{k-m})`` with the newest bit in the
highest position.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class CodeSpec:
    """Generator description of a k=1 convolutional code.

    ``generators`` are octal-notation integers (e.g. ``0o7``); for a
    systematic code the first entry must be the literal marker ``1`` and the
    ``feedback`` polynomial must be present.
    """

    generators: tuple[int, ...]
    feedback: int | None = None
    memory: int = 0
    systematic: bool = False

    def __post_init__(self):
        if self.memory < 1:
            raise ValueError("code memory must be >= 1")
        if not self.generators:
            raise ValueError("at least one generator polynomial is required")
        limit = 1 << (self.memory + 1)
        for g in self.generators:
            if g == 0:
                raise ValueError("zero generator polynomial")
            if g >= limit:
                raise ValueError(
                    f"generator {oct(g)} has degree > memory {self.memory}"
                )
        if self.systematic:
            if self.feedback is None:
                raise ValueError("systematic code requires a feedback polynomial")
            if self.generators[0] != 1:
                raise ValueError(
                    "systematic code must list the marker generator 1 first"
                )
        if self.feedback is not None:
            if self.feedback == 0 or self.feedback >= limit:
                raise ValueError("feedback polynomial degree > memory or zero")
            if not (self.feedback >> self.memory) & 1:
                raise ValueError("feedback polynomial must tap the current bit")


def parse_code_string(text: str) -> CodeSpec:
    """Parse the config notation ``"ff:7,5"`` / ``"rsc:1,5/7"``."""
    text = text.strip().lower()
    try:
        family, rest = text.split(":", 1)
    except ValueError:
        raise ValueError(f"malformed code string {text!r}") from None
    if family == "ff":
        gens = tuple(int(tok, 8) for tok in rest.split(","))
        memory = max(g.bit_length() for g in gens) - 1
        return CodeSpec(generators=gens, memory=memory)
    if family == "rsc":
        body, fb_tok = rest.split("/", 1)
        gens = tuple(int(tok, 8) for tok in body.split(","))
        feedback = int(fb_tok, 8)
        memory = max(g.bit_length() for g in gens + (feedback,)) - 1
        return CodeSpec(
            generators=gens, feedback=feedback, memory=memory, systematic=True
        )
    raise ValueError(f"unknown code family {family!r}")


def format_code_string(spec: CodeSpec) -> str:
    gens = ",".join(format(g, "o") for g in spec.generators)
    if spec.systematic:
        return f"rsc:{gens}/{format(spec.feedback, 'o')}"
    return f"ff:{gens}"


@dataclass(frozen=True)
class Trellis:
    """State-transition tables shared by the encoder, decoder and soft encoder.

    ``next_state[s, u]`` and ``out_bits[s, u, i]`` describe the transition
    taken from state ``s`` on input bit ``u``; ``out_signs`` holds the BPSK
    image (bit 0 -> +1).  ``term_input[s]`` is the input bit that drives the
    register towards zero (the flush bit for FF codes, the
    feedback-cancelling bit for RSC codes).
    """

    spec: CodeSpec
    num_states: int
    n_out: int
    next_state: np.ndarray
    out_bits: np.ndarray
    out_signs: np.ndarray
    term_input: np.ndarray
    # data-bit window offsets feeding each output's parity-check equation
    involved_offsets: tuple[tuple[int, ...], ...] = field(repr=False)

    @property
    def memory(self) -> int:
        return self.spec.memory

    @property
    def systematic(self) -> bool:
        return self.spec.systematic


def _taps(poly: int, memory: int) -> list[int]:
    """Offsets j (0 = current bit) where the MSB-first polynomial taps."""
    return [j for j in range(memory + 1) if (poly >> (memory - j)) & 1]


def _truncated_feedback_response(feedback: int, memory: int) -> list[int]:
    """Impulse response of 1/feedback truncated to the register window."""
    fb = _taps(feedback, memory)
    h = [0] * (memory + 1)
    for j in range(memory + 1):
        acc = 1 if j == 0 else 0
        for i in fb:
            if i >= 1 and j - i >= 0:
                acc ^= h[j - i]
        h[j] = acc
    return h


def _involved_offsets(spec: CodeSpec) -> tuple[tuple[int, ...], ...]:
    """Which data-bit offsets enter each output's parity-check equation.

    For FF codes these are simply the generator taps.  For RSC parity
    outputs the register bits are expanded into data bits through the
    feedback recursion, truncated at the register window, so the result
    stays local to the current segment.
    """
    out: list[tuple[int, ...]] = []
    if not spec.systematic:
        for g in spec.generators:
            out.append(tuple(_taps(g, spec.memory)))
        return tuple(out)
    h = _truncated_feedback_response(spec.feedback, spec.memory)
    out.append((0,))  # systematic output
    for g in spec.generators[1:]:
        coeffs = [0] * (spec.memory + 1)
        for i in _taps(g, spec.memory):
            for t in range(i, spec.memory + 1):
                coeffs[t] ^= h[t - i]
        out.append(tuple(t for t, c in enumerate(coeffs) if c))
    return tuple(out)


def build_trellis(spec: CodeSpec) -> Trellis:
    """Expand a :class:`CodeSpec` into explicit transition tables."""
    m = spec.memory
    num_states = 1 << m
    n_out = len(spec.generators)
    fb_taps = _taps(spec.feedback, m) if spec.feedback is not None else []

    next_state = np.zeros((num_states, 2), dtype=np.int64)
    out_bits = np.zeros((num_states, 2, n_out), dtype=np.int8)
    term_input = np.zeros(num_states, dtype=np.int8)

    for s in range(num_states):
        reg = [(s >> (m - j)) & 1 for j in range(1, m + 1)]  # a_{k-1}..a_{k-m}
        fb = 0
        for i in fb_taps:
            if i >= 1:
                fb ^= reg[i - 1]
        term_input[s] = fb  # u = fb makes the new register bit zero
        for u in (0, 1):
            a_new = u ^ fb if spec.feedback is not None else u
            window = [a_new] + reg  # a_k, a_{k-1}, ..., a_{k-m}
            for j, g in enumerate(spec.generators):
                if spec.systematic and j == 0:
                    out_bits[s, u, j] = u
                    continue
                bit = 0
                for i in _taps(g, m):
                    bit ^= window[i]
                out_bits[s, u, j] = bit
            next_state[s, u] = (a_new << (m - 1)) | (s >> 1)

    out_signs = 1.0 - 2.0 * out_bits.astype(np.float64)
    return Trellis(
        spec=spec,
        num_states=num_states,
        n_out=n_out,
        next_state=next_state,
        out_bits=out_bits,
        out_signs=out_signs,
        term_input=term_input,
        involved_offsets=_involved_offsets(spec),
    )


def encode_hard(trellis: Trellis, data: np.ndarray, terminate: bool = False) -> np.ndarray:
    """Hard-encode a 0/1 data word; returns n*(K + m*terminate) code bits."""
    data = np.asarray(data)
    if data.size == 0:
        raise ValueError("data word must be non-empty")
    n = trellis.n_out
    m = trellis.memory
    total = data.size + (m if terminate else 0)
    code = np.empty(total * n, dtype=np.int8)
    s = 0
    for k in range(data.size):
        u = int(data[k])
        code[k * n : (k + 1) * n] = trellis.out_bits[s, u]
        s = int(trellis.next_state[s, u])
    if terminate:
        for k in range(data.size, total):
            u = int(trellis.term_input[s])
            code[k * n : (k + 1) * n] = trellis.out_bits[s, u]
            s = int(trellis.next_state[s, u])
        if s != 0:
            raise AssertionError("termination did not reach the zero state")
    return code


FF_7_5 = CodeSpec(generators=(0o7, 0o5), memory=2)
RSC_1_5_7 = CodeSpec(generators=(0o1, 0o5), feedback=0o7, memory=2, systematic=True)
