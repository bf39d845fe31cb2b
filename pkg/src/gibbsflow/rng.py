"""Counter-based random streams for reproducible parallel sampling.

A stream is keyed by (base_seed, stream_index); within a stream, draws
are addressed by a (lane, sub, sample) path placed in the high words of
the Philox counter.  Each path owns 2^64 counter values, so distinct
paths never overlap and results are independent of thread count, chunk
order, or how many draws other paths consume.

Experiments use fixed lane assignments (ensemble A vs B, resampling,
annealing chains), sub for a component within a lane, and sample for the
per-sample or per-chunk index.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = ["RandomSeed", "generator"]


@dataclass(frozen=True)
class RandomSeed:
    """Identifies one reproducible stream: (base_seed, stream_index)."""

    base_seed: int
    stream_index: int = 0

    def __post_init__(self):
        if self.stream_index < 0:
            raise ValueError("stream_index must be >= 0")

    def bumped(self, offset: int) -> "RandomSeed":
        """Stream offset by ``offset``; used for repetition loops."""
        return RandomSeed(self.base_seed, self.stream_index + offset)


def generator(
    seed: RandomSeed, lane: int = 0, sub: int = 0, sample: int = 0
) -> np.random.Generator:
    """Fresh Generator at path (lane, sub, sample) of the stream.

    Identical arguments always reproduce the same draws bit for bit.
    """
    if min(lane, sub, sample) < 0:
        raise ValueError("path components must be >= 0")
    key = np.array(
        [seed.base_seed % 2 ** 64, seed.stream_index % 2 ** 64], dtype=np.uint64
    )
    counter = np.array(
        [0, sample % 2 ** 64, sub % 2 ** 64, lane % 2 ** 64], dtype=np.uint64
    )
    return np.random.Generator(np.random.Philox(key=key, counter=counter))
