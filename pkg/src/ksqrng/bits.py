"""Binary bit sequences and the simulated unbiased source."""

from __future__ import annotations

import numpy as np

from .errors import ValidationError


class BitStream:
    """Immutable sequence of bits stored one per byte (values 0/1)."""

    __slots__ = ("bits",)

    def __init__(self, bits):
        arr = np.asarray(bits, dtype=np.uint8)
        if arr.ndim != 1:
            raise ValidationError("bit sequence must be one-dimensional")
        if arr.size and arr.max() > 1:
            raise ValidationError("bit sequence contains values other than 0 and 1")
        arr.setflags(write=False)
        self.bits = arr

    def __len__(self):
        return self.bits.size

    def __eq__(self, other):
        return isinstance(other, BitStream) and np.array_equal(self.bits, other.bits)

    def __repr__(self):
        return f"BitStream(length={len(self)})"


def random_bits(seed: int, n_bits: int) -> BitStream:
    """Seeded unbiased bit source (counter-based generator, byte expanded)."""
    if n_bits < 0:
        raise ValidationError("n_bits must be nonnegative")
    gen = np.random.Generator(np.random.Philox(key=seed))
    n_bytes = (n_bits + 7) // 8
    raw = np.frombuffer(gen.bytes(n_bytes), dtype=np.uint8)
    return BitStream(np.unpackbits(raw, bitorder="little")[:n_bits])
