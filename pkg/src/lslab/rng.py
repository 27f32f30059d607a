"""SplitMix64 streams with Box-Muller normals.

The generator is fixed (rather than numpy's default bit generator) so that
seeds reproduce the same coefficient vectors in any language:

    state += 0x9E3779B97F4A7C15
    z = state
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
    z = (z ^ (z >> 27)) * 0x94D049BB133111EB
    out = z ^ (z >> 31)

Uniforms are ``(out >> 11) * 2**-53`` in [0, 1).  Normals pair two
uniforms ``u1, u2`` as ``sqrt(-2 log(1 - u1)) * (cos, sin)(2 pi u2)``.
"""

import math

import numpy as np

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)


class SplitMix64:
    def __init__(self, seed):
        self.state = np.uint64(int(seed) & 0xFFFFFFFFFFFFFFFF)

    def next_u64(self, n):
        """``n`` consecutive outputs as a uint64 array."""
        with np.errstate(over="ignore"):
            steps = np.arange(1, n + 1, dtype=np.uint64)
            z = self.state + steps * _GOLDEN
            self.state = self.state + np.uint64(n) * _GOLDEN
            z = (z ^ (z >> np.uint64(30))) * _M1
            z = (z ^ (z >> np.uint64(27))) * _M2
            return z ^ (z >> np.uint64(31))

    def uniform(self, n):
        return (self.next_u64(n) >> np.uint64(11)).astype(np.float64) * 2.0**-53

    def normal(self, n):
        m = (n + 1) // 2
        u = self.uniform(2 * m)
        u1, u2 = u[0::2], u[1::2]
        rad = np.sqrt(-2.0 * np.log1p(-u1))
        ang = 2.0 * math.pi * u2
        out = np.empty(2 * m)
        out[0::2] = rad * np.cos(ang)
        out[1::2] = rad * np.sin(ang)
        return out[:n]

    def complex_normal(self, n):
        """Standard complex Gaussians: real part then imaginary part per entry."""
        z = self.normal(2 * n)
        return z[0::2] + 1j * z[1::2]
