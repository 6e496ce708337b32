"""Keyed-hash randomness.

All randomness derives from one 64-bit seed. A stream is identified by a
tuple of integer/str fields (e.g. ``("sample", site, u, v, iteration)``);
BLAKE2b keyed with the seed maps the tuple to 64 bits. Streams with
different fields are independent for all practical purposes, and every
value is reproducible without any shared generator state.
"""
import hashlib

import numpy as np

_MASK64 = (1 << 64) - 1


def _digest(seed: int, fields: tuple) -> int:
    key = (int(seed) & _MASK64).to_bytes(8, "little")
    msg = "\x1f".join(str(f) for f in fields).encode()
    h = hashlib.blake2b(msg, digest_size=8, key=key)
    return int.from_bytes(h.digest(), "little")


def derive_seed(seed: int, *fields) -> int:
    """64-bit child seed for the stream named by ``fields``."""
    return _digest(seed, fields)


def keyed_uniform(seed: int, *fields) -> float:
    """Uniform draw in [0, 1) for the stream named by ``fields``."""
    return (_digest(seed, fields) >> 11) * (1.0 / (1 << 53))


def generator(seed: int, *fields) -> np.random.Generator:
    """numpy Generator seeded from the stream named by ``fields``."""
    return np.random.default_rng(derive_seed(seed, *fields))
