"""Seed plumbing.

Sampling uses a counter-based stream: uniform number ``k`` of the stream keyed
by ``seed`` depends only on ``(seed, k)``, so per-edge decisions do not depend
on evaluation order or on how work is split across workers.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

MASK64 = (1 << 64) - 1


def as_seed(seed: int) -> int:
    return int(seed) & MASK64


def uniforms(seed: int, count: int) -> np.ndarray:
    """``count`` uniforms on [0, 1) from the Philox stream keyed by ``seed``."""
    gen = np.random.Generator(np.random.Philox(key=as_seed(seed)))
    return gen.random(count)


def child_seed(seed: int, *path: int) -> int:
    """Deterministic 64-bit seed for the node ``path`` below ``seed``."""
    ss = np.random.SeedSequence(as_seed(seed), spawn_key=tuple(int(p) for p in path))
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def set_seed(seed: int, members: Sequence[int]) -> int:
    """Seed determined by ``seed`` and the (unordered) vertex set ``members``."""
    ss = np.random.SeedSequence([as_seed(seed), len(members), *sorted(int(v) for v in members)])
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def generator(seed: int) -> np.random.Generator:
    return np.random.default_rng(as_seed(seed))
