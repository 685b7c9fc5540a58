"""Seeded, portable pseudo-random generation for scenario synthesis.

Scenario draws must be reproducible from a 64-bit seed independently of
platform, Python version and process/worker layout, so we do not rely on
``random.Random`` or numpy's generators.  Instead this module implements two
small published algorithms with fully pinned integer arithmetic:

* splitmix64 -- used to expand a user seed into generator state and to derive
  independent per-trial seeds in the experiment harness;
* xoshiro256** -- the draw generator behind scenario synthesis.

Uniform doubles are derived from the top 53 bits of each 64-bit output:
``(word >> 11) * 2**-53``, giving values in [0, 1).
"""

from __future__ import annotations

_MASK64 = (1 << 64) - 1


def splitmix64_next(state: int) -> tuple[int, int]:
    """Advance a splitmix64 state once.  Returns (new_state, output)."""
    state = (state + 0x9E3779B97F4A7C15) & _MASK64
    z = state
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return state, z ^ (z >> 31)


def split_seeds(seed: int, count: int) -> list[int]:
    """Derive `count` 64-bit sub-seeds from a master seed via splitmix64."""
    state = seed & _MASK64
    out = []
    for _ in range(count):
        state, word = splitmix64_next(state)
        out.append(word)
    return out


def _rotl(x: int, k: int) -> int:
    return ((x << k) | (x >> (64 - k))) & _MASK64


class Xoshiro256StarStar:
    """xoshiro256** generator, seeded through splitmix64 as its authors advise."""

    def __init__(self, seed: int):
        self._s = split_seeds(seed, 4)

    def next_u64(self) -> int:
        s0, s1, s2, s3 = self._s
        result = (_rotl((s1 * 5) & _MASK64, 7) * 9) & _MASK64
        t = (s1 << 17) & _MASK64
        s2 ^= s0
        s3 ^= s1
        s1 ^= s2
        s0 ^= s3
        s2 ^= t
        s3 = _rotl(s3, 45)
        self._s = [s0, s1, s2, s3]
        return result

    def random(self) -> float:
        """Uniform double in [0, 1)."""
        return (self.next_u64() >> 11) * 2.0**-53

    def uniform(self, lo: float, hi: float) -> float:
        return lo + (hi - lo) * self.random()
