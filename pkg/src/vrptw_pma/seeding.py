"""Reproducible seed derivation so results do not depend on the worker count."""

from __future__ import annotations

import random

import numpy as np

PHA = 1
PAIRING = 2
CHILDREN = 3
POPULATION = 4
BENCH = 5


def derive_seed(master: int, *keys: int) -> int:
    """64-bit seed for the stream identified by ``keys`` under ``master``."""
    words = np.random.SeedSequence([int(master) & 0xFFFFFFFFFFFFFFFF, *keys]).generate_state(2, np.uint32)
    return (int(words[0]) << 32) | int(words[1])


def derive_rng(master: int, *keys: int) -> random.Random:
    return random.Random(derive_seed(master, *keys))
