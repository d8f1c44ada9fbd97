"""Seed derivation for every random stream in the simulator.

All randomness flows from 64-bit unsigned master seeds. Sub-streams are seeded
by hashing the master seed together with a path of labels (SHA-256, first 8
bytes, big-endian), so any component can be re-seeded in isolation and the
scheme is stable across platforms and Python versions. Streams themselves are
numpy PCG64 generators.
"""

from __future__ import annotations

import hashlib

import numpy as np


def derive_seed(master: int, *labels: object) -> int:
    """Hash (master, label path) down to a 64-bit unsigned sub-seed."""
    h = hashlib.sha256()
    h.update(str(int(master)).encode("ascii"))
    for label in labels:
        h.update(b"/")
        h.update(str(label).encode("utf-8"))
    return int.from_bytes(h.digest()[:8], "big")


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(int(seed)))
