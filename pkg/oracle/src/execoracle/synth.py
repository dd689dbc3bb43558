"""Deterministic synthetic data for probes.

Schema columns are uniform floats in [0, 100). Any column a snippet requests
that is not in the schema (typically the prediction target) is materialized
on the fly as a binary value carrying signal from every schema column, so
models trained on the synthetic data genuinely depend on their features.
"""

from __future__ import annotations

import hashlib

N_ROWS = 32
_MASK64 = (1 << 64) - 1


def _seed_of(*parts) -> int:
    key = "\x1f".join(str(p) for p in parts)
    return int.from_bytes(hashlib.sha256(key.encode("utf-8")).digest()[:8], "big")


def _mix(state: int) -> float:
    """One SplitMix64 output as a float in [0, 1)."""
    state = (state + 0x9E3779B97F4A7C15) & _MASK64
    z = state
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    z = z ^ (z >> 31)
    return (z >> 11) / float(1 << 53)


def column_values(name: str, seed: int, perturbed: bool = False) -> list[float]:
    tag = "perturbed" if perturbed else "base"
    return [100.0 * _mix(_seed_of(seed, tag, name, row)) for row in range(N_ROWS)]


def _weight(name: str, seed: int) -> float:
    # every column carries nonzero signal into derived targets
    return 0.5 + _mix(_seed_of(seed, "weight", name))


def derived_values(name: str, schema: list[str], seed: int) -> list[float]:
    """Binary column carrying signal from the schema's *base* value streams.

    Deriving from the base streams (never the perturbed ones) plants real
    feature-target signal while keeping the target fixed across perturbation
    runs, so a column can only influence the output through the code under
    probe. Splitting at the median keeps derived targets two-class.
    """
    cols = sorted(schema)
    base = {c: column_values(c, seed) for c in cols}
    signals = []
    for row in range(N_ROWS):
        total = sum(_weight(c, seed) * base[c][row] for c in cols)
        noise = 10.0 * _mix(_seed_of(seed, "derived-noise", name, row))
        signals.append(total + noise)
    cutoff = sorted(signals)[N_ROWS // 2]
    return [1.0 if s >= cutoff else 0.0 for s in signals]
