"""Stable seed derivation (independent of PYTHONHASHSEED)."""

import hashlib
import os
import random

DEFAULT_SEED = 0


def derive_seed(seed: int, *parts) -> int:
    h = hashlib.sha256(repr((int(seed),) + tuple(str(p) for p in parts)).encode())
    return int.from_bytes(h.digest()[:8], "big")


def rng_for(seed: int, *parts) -> random.Random:
    return random.Random(derive_seed(seed, *parts))


def default_seed() -> int:
    value = os.environ.get("ESG_SEED")
    return int(value) if value not in (None, "") else DEFAULT_SEED
