"""Deterministic substream seeding for frame-parallel simulation.

Every (frame, link) pair gets its own 64-bit seed through two rounds of the
SplitMix64 finalizer (Steele/Lea/Flood mixing constants).  Both rounds are
bijections of the 64-bit state, so for a fixed master seed distinct
(frame, link) pairs can never collide, and frames may be simulated in any
order or on any number of workers with identical results.
"""

from __future__ import annotations

import numpy as np

_MASK = (1 << 64) - 1

LINK_SR = 0
LINK_SD = 1
LINK_RD = 2
STREAM_DATA = 3
STREAM_PERM = 4


def _mix64(z: int) -> int:
    z = (z + 0x9E3779B97F4A7C15) & _MASK
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return z ^ (z >> 31)


def seed_schedule(master_seed: int, frame_index: int, link_id: int) -> int:
    """Collision-free 64-bit substream seed for one (frame, link) pair."""
    if not 0 <= link_id < 16:
        raise ValueError("link_id must fit in 4 bits")
    if frame_index < 0:
        raise ValueError("frame_index must be non-negative")
    pack = ((frame_index << 4) | link_id) & _MASK
    return _mix64(_mix64(master_seed & _MASK) ^ pack)


def substream(master_seed: int, frame_index: int, link_id: int) -> np.random.Generator:
    """Independent, reproducible generator for one (frame, link) pair."""
    return np.random.default_rng(seed_schedule(master_seed, frame_index, link_id))
