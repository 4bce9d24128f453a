"""Deterministic, portable randomness.

Two facilities, both built on the SplitMix64 mixing function (Steele,
Lea & Flood, "Fast splittable pseudorandom number generators"):

* ``SplitMix64`` -- a tiny sequential stream used for uniform picks in the
  renormalisation loop.  Uniform index = ``next_u64() % k`` by contract,
  so the sequence is reproducible in any language from the seed alone.

* counter-based Gaussians -- a keyed, stateless path: a 64-bit key is
  derived from (seed, counter parts...) and expanded into a standard
  normal via Box-Muller.  Results are independent of evaluation order,
  which makes batched losses schedule- and thread-invariant.
"""

from __future__ import annotations

import numpy as np

_MASK = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15
_STIR = 0xD1B54A32D192ED03
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB

RNG_ALGORITHM = "splitmix64"


def _finalize(z: int) -> int:
    z = ((z ^ (z >> 30)) * _MIX1) & _MASK
    z = ((z ^ (z >> 27)) * _MIX2) & _MASK
    return z ^ (z >> 31)


class SplitMix64:
    """Sequential 64-bit generator with a published algorithm."""

    def __init__(self, seed: int) -> None:
        self._state = seed & _MASK

    def next_u64(self) -> int:
        self._state = (self._state + _GOLDEN) & _MASK
        return _finalize(self._state)

    def next_below(self, k: int) -> int:
        """Uniform pick in 0..k-1 (modulo reduction, by contract)."""
        if k <= 0:
            raise ValueError("k must be positive")
        return self.next_u64() % k


def derive_key(seed: int, *parts: int) -> int:
    """Fold integer counters into the seed; the result keys a stateless
    draw.  Distinct part tuples give (avalanche-)independent keys."""
    k = seed & _MASK
    for p in parts:
        k = _finalize(((k + _GOLDEN) & _MASK) ^ ((p & _MASK) * _STIR & _MASK))
    return k


def _finalize_vec(z: np.ndarray) -> np.ndarray:
    z = z ^ (z >> np.uint64(30))
    z = z * np.uint64(_MIX1)
    z = z ^ (z >> np.uint64(27))
    z = z * np.uint64(_MIX2)
    return z ^ (z >> np.uint64(31))


def standard_normals_from_keys(keys: np.ndarray) -> np.ndarray:
    """One standard normal per key (Box-Muller on two SplitMix64 outputs).

    The scalar and vectorised paths share this implementation, so results
    are bit-identical regardless of batching.
    """
    keys = np.asarray(keys, dtype=np.uint64)
    with np.errstate(over="ignore"):  # uint64 wraparound is the point
        s1 = keys + np.uint64(_GOLDEN)
        x1 = _finalize_vec(s1)
        s2 = s1 + np.uint64(_GOLDEN)
        x2 = _finalize_vec(s2)
    # u1 in (0, 1] so the log is finite; u2 in [0, 1).
    u1 = ((x1 >> np.uint64(11)).astype(np.float64) + 1.0) * 2.0**-53
    u2 = (x2 >> np.uint64(11)).astype(np.float64) * 2.0**-53
    return np.sqrt(-2.0 * np.log(u1)) * np.cos(2.0 * np.pi * u2)


def standard_normal_from_key(key: int) -> float:
    return float(standard_normals_from_keys(np.array([key], dtype=np.uint64))[0])
