"""Seed derivation: stability, independence, and frozen regression values."""

from zlib import crc32

import numpy as np
import pytest

from seqreduce.seeding import derive_seed, rng_for


def independent_derive(root, *parts):
    # recomputes the documented chain without the package helpers
    entropy = [int(root) & 0xFFFFFFFF]
    for part in parts:
        if isinstance(part, str):
            entropy.append(crc32(part.encode("ascii")))
        else:
            entropy.append(int(part) & 0xFFFFFFFF)
    return int(np.random.SeedSequence(entropy).generate_state(1)[0])


@pytest.mark.parametrize(
    "root,parts",
    [
        (0, ("subtag",)),
        (7, ("subtag", 3, 300, 1)),
        (123, ("test-subsets",)),
        (2**40, ("kmeans", 9)),
        (5, (0, 1, "x")),
    ],
)
def test_matches_independent_chain(root, parts):
    assert derive_seed(root, *parts) == independent_derive(root, *parts)


def test_frozen_values():
    # regression pins: derivation must never drift between releases
    assert derive_seed(0, "subtag") == 3934644893
    assert derive_seed(7, "subtag", 3, 300, 1) == 1569886476
    assert derive_seed(123, "test-subsets") == 2695217620
    assert derive_seed(2**40, "kmeans", 9) == 4252940606


def test_deterministic_across_calls():
    assert derive_seed(9, "stage", 4) == derive_seed(9, "stage", 4)


def test_distinct_stages_distinct_streams():
    seeds = {
        derive_seed(0, stage, i)
        for stage in ("subtag", "kmeans", "smote", "boost")
        for i in range(50)
    }
    assert len(seeds) == 200


def test_argument_order_matters():
    assert derive_seed(0, "a", 1) != derive_seed(0, 1, "a")
    assert derive_seed(1, "a") != derive_seed(0, "a")


def test_rng_for_reproducible():
    a = rng_for(3, "noise", 2).standard_normal(8)
    b = rng_for(3, "noise", 2).standard_normal(8)
    np.testing.assert_array_equal(a, b)
    c = rng_for(3, "noise", 3).standard_normal(8)
    assert not np.array_equal(a, c)
