"""Seeded randomness.

All randomness flows from a Philox counter-mode generator keyed by a 64-bit
seed.  Child streams for trials or sub-tasks are derived deterministically so
results do not depend on scheduling.
"""
from __future__ import annotations

import os

import numpy as np

PRG_NAME = "philox4x64-10"
SEED_ENV = "PRCLAB_SEED"
_MASK64 = (1 << 64) - 1


def make_rng(seed: int | None = None, *path: int) -> np.random.Generator:
    """Generator for `seed`, optionally specialised by an integer path."""
    if seed is None:
        seed = default_seed()
    key = [int(seed) & _MASK64, derive_word(seed, *path) if path else 0]
    return np.random.Generator(np.random.Philox(key=key))


def derive_word(seed: int, *path: int) -> int:
    ss = np.random.SeedSequence(entropy=int(seed) & _MASK64, spawn_key=tuple(int(p) for p in path))
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def child_seed(seed: int, *path: int) -> int:
    """64-bit seed for a sub-stream, e.g. (seed, trial_index)."""
    return derive_word(seed, 0x5EED, *path)


def default_seed() -> int:
    env = os.environ.get(SEED_ENV)
    if env:
        return int(env, 0)
    return int.from_bytes(os.urandom(8), "big")


def fisher_yates(n: int, rng: np.random.Generator) -> np.ndarray:
    perm = list(range(n))
    if n < 2:
        return np.asarray(perm, dtype=np.int64)
    # one vectorised draw; element i is uniform on [0, n-1-i]
    draws = rng.integers(0, np.arange(n, 1, -1)).tolist()
    for i, j in zip(range(n - 1, 0, -1), draws):
        perm[i], perm[j] = perm[j], perm[i]
    return np.asarray(perm, dtype=np.int64)


def invert_perm(p) -> np.ndarray:
    p = np.asarray(p, dtype=np.int64)
    inv = np.empty_like(p)
    inv[p] = np.arange(p.size, dtype=np.int64)
    return inv


def is_permutation(p, n: int | None = None) -> bool:
    p = np.asarray(p)
    if n is not None and p.size != n:
        return False
    return p.ndim == 1 and np.array_equal(np.sort(p), np.arange(p.size))
