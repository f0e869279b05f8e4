"""Portable seeded randomness: SplitMix64 uniforms, Box-Muller Gaussians.

Every randomized routine in the library draws from this generator so that
a documented seed reproduces states and witnesses bit-for-bit, including
across reimplementations in other languages.  Conventions:

* SplitMix64 with increment ``0x9E3779B97F4A7C15`` and the standard
  ``(30, 0xBF58476D1CE4E5B9, 27, 0x94D049BB133111EB, 31)`` finalizer.
* ``uniform()`` maps the top 53 bits of one output word to ``[0, 1)``.
* One complex Gaussian consumes exactly two uniforms ``(u1, u2)`` via
  Box-Muller; a zero ``u1`` is redrawn.  Real and imaginary parts each
  carry variance 1/2 (standard complex normal).
* Matrices fill row by row, left to right.
* Sub-streams derive as ``derive_seed(seed, index)``; derivation is a
  single SplitMix64 step from ``seed XOR mix64(index + 1)``.
"""

from __future__ import annotations

import math

import numpy as np

_MASK = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15


def mix64(z: int) -> int:
    """SplitMix64 finalizer: avalanche one 64-bit word."""
    z &= _MASK
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return z ^ (z >> 31)


def derive_seed(seed: int, index: int) -> int:
    """Deterministic sub-stream seed for (seed, index)."""
    return mix64((seed & _MASK) ^ mix64((index + 1) & _MASK))


class SplitMix64:
    """Minimal SplitMix64 stream with Gaussian helpers."""

    def __init__(self, seed: int):
        self._state = seed & _MASK

    def next_u64(self) -> int:
        self._state = (self._state + _GAMMA) & _MASK
        return mix64(self._state)

    def uniform(self) -> float:
        return (self.next_u64() >> 11) * 2.0**-53

    def normal_pair(self) -> tuple[float, float]:
        u1 = self.uniform()
        while u1 == 0.0:
            u1 = self.uniform()
        u2 = self.uniform()
        r = math.sqrt(-2.0 * math.log(u1))
        return r * math.cos(2.0 * math.pi * u2), r * math.sin(2.0 * math.pi * u2)

    def complex_normal(self) -> complex:
        re, im = self.normal_pair()
        return complex(re, im) / math.sqrt(2.0)

    def complex_matrix(self, rows: int, cols: int) -> np.ndarray:
        """Matrix of independent standard complex Gaussians, filled row-major."""
        out = np.empty((rows, cols), dtype=complex)
        for r in range(rows):
            for c in range(cols):
                out[r, c] = self.complex_normal()
        return out

    def complex_vector(self, n: int) -> np.ndarray:
        return self.complex_matrix(1, n).reshape(n)

    def unit_vector(self, n: int) -> np.ndarray:
        v = self.complex_vector(n)
        return v / np.linalg.norm(v)


def random_isometry(gen: SplitMix64, rows: int, cols: int) -> np.ndarray:
    """Haar-ish random isometry via QR with the R-diagonal phase fixed."""
    q, r = np.linalg.qr(gen.complex_matrix(rows, cols))
    d = r.diagonal().copy()
    d[d == 0] = 1.0
    return q * (d / np.abs(d))


def random_unitary(gen: SplitMix64, dim: int) -> np.ndarray:
    return random_isometry(gen, dim, dim)
