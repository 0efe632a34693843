"""Counter-based seed fan-out.

A master seed is expanded into independent stream seeds keyed by a label and
an index path, so that any run, read or graph can be regenerated in isolation
regardless of execution order.
"""
from __future__ import annotations

import hashlib

import numpy as np

MASK64 = (1 << 64) - 1


def split_seed(seed: int, label: str, *index: int) -> int:
    """Derive a 64-bit stream seed from ``(seed, label, *index)``."""
    h = hashlib.blake2b(digest_size=8, person=b"tokq-seed")
    h.update(int(seed & MASK64).to_bytes(8, "little"))
    h.update(label.encode())
    for i in index:
        h.update(b"/")
        h.update(int(i & MASK64).to_bytes(8, "little"))
    return int.from_bytes(h.digest(), "little")


def rng(seed: int, label: str = "", *index: int) -> np.random.Generator:
    if not label and not index:
        return np.random.default_rng(seed)
    return np.random.default_rng(split_seed(seed, label, *index))
