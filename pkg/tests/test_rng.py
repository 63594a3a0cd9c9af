import hashlib

import numpy as np

from aglnet.rng import derive_seed, make_rng


def test_derive_seed_matches_sha256_prefix():
    text = "7\x1f3\x1fdata"
    expected = int.from_bytes(hashlib.sha256(text.encode()).digest()[:8], "big") >> 1
    assert derive_seed(7, 3, "data") == expected


def test_seeds_fit_in_63_bits_and_differ_by_label():
    seeds = {derive_seed(0, r, label) for r in range(50) for label in ("data", "init")}
    assert len(seeds) == 100
    assert all(0 <= s < 2**63 for s in seeds)


def test_label_order_matters():
    assert derive_seed(1, "a", "b") != derive_seed(1, "b", "a")


def test_make_rng_reproducible():
    a = make_rng(99).standard_normal(5)
    b = make_rng(99).standard_normal(5)
    np.testing.assert_array_equal(a, b)
    assert isinstance(make_rng(1).bit_generator, np.random.Philox)
