"""Named random sub-streams derived from a single integer seed."""

from __future__ import annotations

import hashlib

import numpy as np

MASK64 = (1 << 64) - 1


def _key(name: str | int) -> int:
    if isinstance(name, int):
        return name & MASK64
    return int.from_bytes(hashlib.sha256(name.encode()).digest()[:8], "little")


def stream(seed: int, *names: str | int) -> np.random.Generator:
    """Independent generator for ``seed`` and a path of stream names.

    Each stage asks for its own named stream, so reordering stages (or running
    them in parallel) never changes what any one stage draws.
    """
    entropy = [int(seed) & MASK64] + [_key(n) for n in names]
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(entropy)))


def derive_seed(seed: int, *names: str | int) -> int:
    """Integer seed for a sub-stage, stable across runs and platforms."""
    return int(stream(seed, *names).integers(0, 2**63 - 1))
