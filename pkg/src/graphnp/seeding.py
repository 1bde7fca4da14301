"""Counter-based seed derivation.

A single master seed fans out into independent child streams keyed by a
path of labels, e.g. ``(run, 3, "gnp")`` or ``(epoch, 2, graph, 17)``.
Children are derived through :class:`numpy.random.SeedSequence`, so adding
more runs or methods never perturbs the streams of existing ones.
"""

from __future__ import annotations

import zlib

import numpy as np


def _encode(part) -> int:
    if isinstance(part, (int, np.integer)):
        return int(part) & 0xFFFFFFFF
    if isinstance(part, str):
        return zlib.crc32(part.encode("utf-8"))
    raise TypeError(f"seed path parts must be int or str, got {type(part).__name__}")


def child_sequence(master_seed: int, *path) -> np.random.SeedSequence:
    """Seed sequence for the child stream identified by ``path``.

    SeedSequence zero-pads its entropy, so a path ending in integer 0 maps
    to the same stream as the path without it; callers keep streams apart
    by a distinguishing leading label, not a trailing counter alone.
    """
    return np.random.SeedSequence([int(master_seed) & 0xFFFFFFFFFFFFFFFF]
                                  + [_encode(p) for p in path])


def rng(master_seed: int, *path) -> np.random.Generator:
    """Independent generator for the child stream identified by ``path``."""
    return np.random.Generator(np.random.PCG64(child_sequence(master_seed, *path)))
