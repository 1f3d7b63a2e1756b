"""Counter-based random streams keyed by (master seed, purpose, index).

Every stochastic component draws from its own Philox stream whose 128-bit
key encodes the master seed together with a purpose tag and up to two
indices.  Streams are therefore independent of batch composition, worker
count, and scheduling: sample i always sees the same noise.

Gaussian variates come from ``numpy.random.Generator.standard_normal``
(ziggurat) on top of Philox; the mapping from key to values is fixed by
the pinned numpy version recorded in run manifests.
"""

from __future__ import annotations

import numpy as np

# Purpose tags for the low key word.  40 bits are reserved for the minor
# index (sample / particle), 16 bits for the major index (chain, step block).
TAG_SAMPLE = 1       # exit-event sample trajectories
TAG_FV_PARTICLE = 2  # Fleming-Viot particle trajectories (major = chain)
TAG_FV_BRANCH = 3    # Fleming-Viot branching choices (minor = step index)
TAG_FV_INIT = 4      # Fleming-Viot initial positions (major = chain)
TAG_STARTS = 5       # selection of starting points from an ensemble
TAG_KMC_TIME = 6     # kinetic Monte Carlo residence times
TAG_KMC_STATE = 7    # kinetic Monte Carlo next-state choices

_MASK16 = (1 << 16) - 1
_MASK40 = (1 << 40) - 1
_MASK64 = (1 << 64) - 1


def stream_key(master_seed: int, tag: int, major: int = 0, minor: int = 0) -> int:
    """128-bit Philox key for one logical stream."""
    if not 0 <= minor <= _MASK40:
        raise ValueError(f"minor index out of range: {minor}")
    if not 0 <= major <= _MASK16:
        raise ValueError(f"major index out of range: {major}")
    low = (tag << 56) | (major << 40) | minor
    return ((master_seed & _MASK64) << 64) | low


def make_stream(master_seed: int, tag: int, major: int = 0, minor: int = 0) -> np.random.Generator:
    """Independent generator for (seed, tag, major, minor)."""
    return np.random.Generator(np.random.Philox(key=stream_key(master_seed, tag, major, minor)))
