"""Stable seed derivation.

Per-item seeds are 64-bit digests of (parent_seed, tag, index), so any
worker can compute the seed of any item without coordination and the
result never depends on iteration order, worker count, or Python's
per-process hash randomization.
"""

from __future__ import annotations

import hashlib

import numpy as np


def derive_seed(parent: int, tag: str, index: int = 0) -> int:
    """Stable 64-bit child seed of (parent, tag, index)."""
    h = hashlib.blake2b(digest_size=8)
    h.update(f"{int(parent)}:{tag}:{int(index)}".encode())
    return int.from_bytes(h.digest(), "big")


def rng_for(parent: int, tag: str, index: int = 0) -> np.random.Generator:
    return np.random.default_rng(derive_seed(parent, tag, index))
