"""Deterministic seed derivation.

All randomness in the pipeline flows from one root seed.  Stage seeds are
derived with NumPy's SeedSequence (PCG64 generators downstream); stage names
enter the entropy pool as their CRC-32, so the derivation is stable across
runs, platforms and process counts.
"""

from zlib import crc32

import numpy as np


def derive_seed(root: int, *parts: int | str) -> int:
    """Derive a child seed from a root seed and a stage path.

    ``parts`` may mix stage-name strings and integer indices, e.g.
    ``derive_seed(7, "subtag", subset_id, dim, method_index)``.
    """
    entropy = [int(root) & 0xFFFFFFFF]
    for part in parts:
        if isinstance(part, str):
            entropy.append(crc32(part.encode("ascii")))
        else:
            entropy.append(int(part) & 0xFFFFFFFF)
    return int(np.random.SeedSequence(entropy).generate_state(1)[0])


def rng_for(root: int, *parts: int | str) -> np.random.Generator:
    """PCG64 generator seeded via `derive_seed`."""
    return np.random.default_rng(derive_seed(root, *parts))
