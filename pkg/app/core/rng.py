"""
Reproducible randomness for replicas.

Seeds for replica i are derived from a base seed with the SplitMix64
finalizer::

    z = (base_seed + 0x9E3779B97F4A7C15 * (i + 1)) mod 2**64
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9 mod 2**64
    z = (z ^ (z >> 27)) * 0x94D049BB133111EB mod 2**64
    seed_i = z ^ (z >> 31)

Uniforms are drawn from numpy's PCG64 bit generator in fixed-size blocks.
The block and its cursor travel with the simulation state, so a trajectory
depends only on its seed, never on how the work was scheduled.
"""
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from app.core.config import settings

MASK64 = (1 << 64) - 1
GOLDEN_GAMMA = 0x9E3779B97F4A7C15


def splitmix64(value: int) -> int:
    """SplitMix64 output function applied to a 64-bit integer"""
    z = value & MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def derive_seed(base_seed: int, index: int) -> int:
    """
    Derive the seed of replica ``index`` from ``base_seed``.

    Adding replicas never changes the seeds of existing ones.
    """
    if index < 0:
        raise ValueError(f"replica index must be >= 0, got {index}")
    return splitmix64((base_seed & MASK64) + GOLDEN_GAMMA * (index + 1))


def make_generator(seed: int) -> np.random.Generator:
    """numpy Generator backed by PCG64 for a 64-bit seed"""
    return np.random.Generator(np.random.PCG64(seed & MASK64))


@dataclass
class UniformStream:
    """Block-buffered stream of U[0, 1) variates"""
    seed: int
    block: int = field(default_factory=lambda: settings.UNIFORM_BLOCK)
    generator: Optional[np.random.Generator] = None
    buffer: np.ndarray = field(default_factory=lambda: np.empty(0, dtype=np.float64))
    cursor: int = 0

    def __post_init__(self):
        if self.block < 1:
            raise ValueError(f"uniform block size must be >= 1, got {self.block}")
        if self.generator is None:
            self.generator = make_generator(self.seed)

    def ensure(self) -> None:
        """Refill the block once it is exhausted"""
        if self.cursor >= self.buffer.shape[0]:
            self.buffer = self.generator.random(self.block)
            self.cursor = 0

    def next(self) -> float:
        """Take a single uniform"""
        self.ensure()
        value = float(self.buffer[self.cursor])
        self.cursor += 1
        return value
