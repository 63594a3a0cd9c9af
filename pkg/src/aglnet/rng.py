"""Seed handling.

Every random draw in the package goes through a Philox generator (numpy's
counter-based bit generator), so a stream is fully determined by its integer
seed and reproduces across platforms. Independent streams are obtained by
hashing a base seed together with string/integer labels, never by sharing a
generator between consumers.
"""
from __future__ import annotations

import hashlib

import numpy as np


def derive_seed(base_seed: int, *labels) -> int:
    """Deterministic 63-bit seed from ``base_seed`` and any number of labels.

    The labels are joined with a separator that cannot appear in their
    ``str`` forms, hashed with SHA-256, and the first 8 bytes are kept.
    Adding a new label (e.g. a new method name) never changes the seeds of
    existing label tuples.
    """
    text = "\x1f".join([str(int(base_seed))] + [str(v) for v in labels])
    digest = hashlib.sha256(text.encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big") >> 1


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(int(seed)))
