"""Deterministic seed derivation and RNG plumbing.

Every stochastic entry point takes either an integer seed or a ready
``random.Random``.  Child seeds are derived by hashing a path of labels, so
parallel workers get independent, reproducible streams regardless of
scheduling order.
"""

from __future__ import annotations

import hashlib
import random


def derive_seed(master: int, *path) -> int:
    text = str(master) + "/" + "/".join(str(p) for p in path)
    digest = hashlib.blake2b(text.encode(), digest_size=8).digest()
    return int.from_bytes(digest, "big")


def make_rng(seed_or_rng) -> random.Random:
    if isinstance(seed_or_rng, random.Random):
        return seed_or_rng
    if seed_or_rng is None:
        return random.Random()
    return random.Random(seed_or_rng)
