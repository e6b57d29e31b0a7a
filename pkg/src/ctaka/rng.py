"""Seeded, labelled deterministic randomness.

Every party and purpose draws from its own child stream, so adding a draw in
one place never shifts the values seen anywhere else.  The generator is
SHA-256 in counter mode over ``seed || label path || counter``; it is stable
across Python versions and platforms.
"""

from __future__ import annotations

import hashlib


class SeededRng:
    """Deterministic byte stream keyed by a 64-bit seed and a label path."""

    def __init__(self, seed: int, label: str = "root") -> None:
        if not 0 <= seed < 2**64:
            raise ValueError("seed must fit in 64 bits")
        self.seed = seed
        self.label = label
        self._counter = 0
        self._buffer = b""

    def fork(self, label: str) -> "SeededRng":
        return SeededRng(self.seed, f"{self.label}/{label}")

    def _block(self) -> bytes:
        h = hashlib.sha256()
        h.update(self.seed.to_bytes(8, "big"))
        h.update(len(self.label).to_bytes(4, "big"))
        h.update(self.label.encode())
        h.update(self._counter.to_bytes(8, "big"))
        self._counter += 1
        return h.digest()

    def read(self, n: int) -> bytes:
        while len(self._buffer) < n:
            self._buffer += self._block()
        out, self._buffer = self._buffer[:n], self._buffer[n:]
        return out

    def randbelow(self, bound: int) -> int:
        """Uniform integer in [0, bound) by rejection sampling."""
        if bound <= 0:
            raise ValueError("bound must be positive")
        nbits = bound.bit_length()
        nbytes = (nbits + 7) // 8
        excess = nbytes * 8 - nbits
        while True:
            v = int.from_bytes(self.read(nbytes), "big") >> excess
            if v < bound:
                return v

    def randrange(self, lo: int, hi: int) -> int:
        """Uniform integer in [lo, hi)."""
        return lo + self.randbelow(hi - lo)
