"""Keyed deterministic random streams.

Every stochastic step in the pipeline draws from a generator keyed by a
tuple of labels (seed, purpose, actor name, index, ...) instead of from a
shared sequential RNG.  Results are therefore independent of iteration
order, parallel scheduling, and dataset reordering.
"""

from __future__ import annotations

import hashlib

import numpy as np


def derive_seed(*parts: object) -> int:
    """Derive a 64-bit seed from an arbitrary key tuple.

    Floats are keyed by their repr so 0.1 and 0.10 map to the same stream.
    """
    h = hashlib.sha256()
    for part in parts:
        if isinstance(part, float):
            token = repr(part)
        else:
            token = str(part)
        h.update(token.encode("utf-8"))
        h.update(b"\x1f")
    return int.from_bytes(h.digest()[:8], "big")


def keyed_stream(*parts: object) -> np.random.Generator:
    """Return a fresh generator for the given key tuple."""
    return np.random.Generator(np.random.PCG64(derive_seed(*parts)))
