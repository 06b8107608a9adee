"""SplitMix64 stream and seed splitting.

Pure integer arithmetic, so identical seeds give identical draws on every
platform and Python version.
"""

from __future__ import annotations

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15


def mix64(z: int) -> int:
    """SplitMix64 finalizer."""
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9 & MASK64
    z = (z ^ (z >> 27)) * 0x94D049BB133111EB & MASK64
    return z ^ (z >> 31)


def trial_seed(master_seed: int, trial: int) -> int:
    """Seed for trial ``trial``: one SplitMix64 output at state master_seed + trial."""
    return mix64((master_seed + trial + 1) * GOLDEN & MASK64)


class SplitMix64:
    def __init__(self, seed: int):
        self.state = seed & MASK64

    def next_u64(self) -> int:
        self.state = (self.state + GOLDEN) & MASK64
        return mix64(self.state)

    def below(self, k: int) -> int:
        """Uniform integer in ``range(k)``; rejection sampling avoids modulo bias."""
        if k <= 0:
            raise ValueError("k must be positive")
        limit = (1 << 64) - ((1 << 64) % k)
        while True:
            x = self.next_u64()
            if x < limit:
                return x % k

    def choice(self, seq):
        return seq[self.below(len(seq))]
