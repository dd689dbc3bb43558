#!/usr/bin/env python3
"""Regenerate fixtures/ztest_oracle.json, the arbitrary-precision z-test table.

Requires mpmath (dev dependency). The table is committed; tests never import
mpmath. Expected tail probabilities are computed at 60 decimal digits and
stored as strings so values beyond double range survive the JSON round trip.
"""

import json
import sys
from pathlib import Path

import mpmath as mp

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))
from codebias.seeding import SplitMix64, derive_seed  # noqa: E402

mp.mp.dps = 60

OUT = Path(__file__).resolve().parent.parent / "fixtures" / "ztest_oracle.json"

P0_MENU = [0.5, 0.25, 0.1, 0.05, 0.01, 0.001, 0.0001]


def sf(z):
    return 0.5 * mp.erfc(z / mp.sqrt(2))


def one_sample_cases(rng, count):
    cases = []
    seen = set()
    while len(cases) < count:
        n = 20 + rng.below(4981)
        p0 = P0_MENU[rng.below(len(P0_MENU))]
        z_target = -8.0 + rng.uniform() * 44.0  # aim across [-8, 36]
        se = mp.sqrt(mp.mpf(p0) * (1 - mp.mpf(p0)) / n)
        k = int(round(n * (p0 + z_target * float(se))))
        k = max(0, min(n, k))
        if (k, n, p0) in seen:
            continue
        z = (mp.mpf(k) / n - mp.mpf(p0)) / se
        if abs(z) > 36.5:
            continue
        seen.add((k, n, p0))
        cases.append({
            "kind": "one_sample",
            "k": k, "n": n, "p0": p0,
            "z": mp.nstr(z, 25),
            "p": mp.nstr(sf(z), 25),
        })
    return cases


def two_sample_cases(rng, count):
    cases = []
    seen = set()
    while len(cases) < count:
        n1 = 20 + rng.below(2981)
        n2 = 20 + rng.below(2981)
        p1 = 0.01 + rng.uniform() * 0.98
        p2 = 0.01 + rng.uniform() * 0.98
        k1 = max(0, min(n1, int(round(n1 * p1))))
        k2 = max(0, min(n2, int(round(n2 * p2))))
        pooled = mp.mpf(k1 + k2) / (n1 + n2)
        if pooled == 0 or pooled == 1:
            continue
        se = mp.sqrt(pooled * (1 - pooled) * (mp.mpf(1) / n1 + mp.mpf(1) / n2))
        z = (mp.mpf(k1) / n1 - mp.mpf(k2) / n2) / se
        if abs(z) > 36.5:
            continue
        if (k1, n1, k2, n2) in seen:
            continue
        seen.add((k1, n1, k2, n2))
        cases.append({
            "kind": "two_sample",
            "k1": k1, "n1": n1, "k2": k2, "n2": n2,
            "z": mp.nstr(z, 25),
            "p": mp.nstr(sf(z), 25),
        })
    return cases


def main():
    rng = SplitMix64(derive_seed("ztest-oracle-table", 2026))
    table = one_sample_cases(rng, 50) + two_sample_cases(rng, 50)
    OUT.parent.mkdir(parents=True, exist_ok=True)
    OUT.write_text(json.dumps({"dps": 60, "cases": table}, indent=1) + "\n", encoding="utf-8")
    print(f"wrote {len(table)} cases to {OUT}")


if __name__ == "__main__":
    main()
