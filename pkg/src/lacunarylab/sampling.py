"""Exact dyadic fixed-point samples of [0, 1) and mod-1 multiplication.

A :class:`UnitSample` is ``v / 2**B`` with ``0 <= v < 2**B``.  Multiplying by a
huge integer ``M`` and reducing mod 1 is then the integer operation
``(M * v) mod 2**B``, with no rounding anywhere.

Random streams are numpy ``PCG64`` generators seeded from
``SeedSequence(master_seed, spawn_key=(index,))`` so that the sample drawn for
a given index never depends on how work is split across processes.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

GUARD_BITS = 64
MIN_BITS = 64
_BELOW_ONE = float(np.nextafter(1.0, 0.0))


@dataclass(frozen=True)
class UnitSample:
    precision_bits: int
    mantissa: int

    def __post_init__(self):
        if self.precision_bits < 1:
            raise ValueError("precision must be positive")
        if not 0 <= self.mantissa < (1 << self.precision_bits):
            raise ValueError("mantissa out of range")

    def dumps(self) -> str:
        return f"{self.precision_bits}:{self.mantissa:x}"

    @classmethod
    def loads(cls, text: str) -> "UnitSample":
        bits, hexv = text.strip().split(":")
        return cls(int(bits), int(hexv, 16))


def stream(master_seed: int, index: int) -> np.random.Generator:
    """Independent generator for sample ``index`` under ``master_seed``."""
    ss = np.random.SeedSequence(entropy=int(master_seed), spawn_key=(int(index),))
    return np.random.Generator(np.random.PCG64(ss))


def sample_unit(rng: np.random.Generator, bits: int) -> UnitSample:
    """Draw a uniform mantissa of ``bits`` bits.

    Raw 64-bit words are consumed most-significant first and the surplus low
    bits of the last word are discarded, so a shorter precision drawn from the
    same stream state is a bit-prefix of a longer one.
    """
    if bits < MIN_BITS:
        raise ValueError(f"precision must be at least {MIN_BITS} bits")
    words = -(-bits // 64)
    raw = rng.bit_generator.random_raw(words)
    v = int.from_bytes(np.asarray(raw, dtype=">u8").tobytes(), "big")
    return UnitSample(bits, v >> (64 * words - bits))


def frac_mul(x: UnitSample, M: int) -> UnitSample:
    """Exact ``{M * x}`` at the precision of ``x``."""
    if M < 0:
        raise ValueError("M must be nonnegative")
    B = x.precision_bits
    mask = (1 << B) - 1
    if M and M & (M - 1) == 0:
        k = M.bit_length() - 1
        if k >= B:
            return UnitSample(B, 0)
        return UnitSample(B, (x.mantissa & (mask >> k)) << k)
    return UnitSample(B, (M * x.mantissa) & mask)


def to_real(x: UnitSample) -> float:
    """Correctly rounded float value of ``v / 2**B``, kept strictly below 1."""
    B, v = x.precision_bits, x.mantissa
    # int / int true division is correctly rounded at any size
    r = v / (1 << B)
    # values within 2**-54 of 1 would round up to 1.0 and leave [0, 1)
    return r if r < 1.0 else _BELOW_ONE


def frac_mul_real(x: UnitSample, M: int) -> float:
    """``to_real(frac_mul(x, M))`` without materializing the intermediate sample."""
    return to_real(frac_mul(x, M))


def precision_for(max_multiplier: int) -> int:
    """Bits needed so that 64 significant bits survive multiplication by ``max_multiplier``."""
    return max(MIN_BITS, int(max_multiplier).bit_length() + GUARD_BITS)
