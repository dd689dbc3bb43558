"""Platform-stable deterministic randomness.

Everything in the harness that needs randomness (attribute permutations,
model-kind picks, subset sampling, detection sampling) draws from SplitMix64
streams keyed by sha256 of a structured seed path. No module touches
``random`` or platform-dependent hash state, so corpora are byte-identical
across machines, Python versions, and worker counts.
"""

from __future__ import annotations

import hashlib

_MASK64 = (1 << 64) - 1


def derive_seed(*parts) -> int:
    """64-bit seed from a structured key, e.g. derive_seed(run_seed, dataset_id, 7)."""
    key = "\x1f".join(str(p) for p in parts)
    digest = hashlib.sha256(key.encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big")


class SplitMix64:
    """SplitMix64 generator (Steele et al.); stable across platforms by construction."""

    def __init__(self, seed: int):
        self._state = seed & _MASK64

    def next_u64(self) -> int:
        self._state = (self._state + 0x9E3779B97F4A7C15) & _MASK64
        z = self._state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
        return z ^ (z >> 31)

    def below(self, n: int) -> int:
        """Unbiased integer in [0, n) via rejection sampling."""
        if n <= 0:
            raise ValueError("below() requires n > 0")
        limit = _MASK64 - (_MASK64 % n)
        while True:
            v = self.next_u64()
            if v < limit:
                return v % n

    def uniform(self) -> float:
        """Float in [0, 1) with 53 bits of precision."""
        return (self.next_u64() >> 11) / float(1 << 53)

    def shuffle(self, items: list) -> None:
        """In-place Fisher-Yates."""
        for i in range(len(items) - 1, 0, -1):
            j = self.below(i + 1)
            items[i], items[j] = items[j], items[i]

    def permutation(self, items) -> list:
        out = list(items)
        self.shuffle(out)
        return out

    def sample(self, items, k: int) -> list:
        """k distinct items, order-stable in the shuffled stream."""
        if k < 0 or k > len(items):
            raise ValueError(f"sample size {k} out of range for {len(items)} items")
        return self.permutation(items)[:k]

    def choice(self, items):
        if not items:
            raise ValueError("choice() on empty sequence")
        return items[self.below(len(items))]
