"""Dense linear algebra helpers and seeded random streams.

Matrices are plain 2-D ``float64`` numpy arrays. Randomness comes from
:class:`Rng`, a thin wrapper over numpy's PCG64 bit generator, whose output
stream for a given seed is fixed across platforms.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import ShapeError

DTYPE = np.float64


def as_matrix(values) -> np.ndarray:
    m = np.asarray(values, dtype=DTYPE)
    if m.ndim != 2:
        raise ShapeError(f"expected a 2-D matrix, got shape {m.shape}")
    return m


def matmul(a, b) -> np.ndarray:
    """Matrix product ``a @ b`` with a readable error on mismatched shapes."""
    a = as_matrix(a)
    b = as_matrix(b)
    if a.shape[1] != b.shape[0]:
        raise ShapeError(f"cannot multiply {a.shape[0]}x{a.shape[1]} by {b.shape[0]}x{b.shape[1]}")
    return a @ b


class Rng:
    """Seeded random stream.

    Child streams are derived with :meth:`fork`, which hashes the parent seed
    together with integer keys (epoch, batch index, ...) so that independent
    consumers never share state.
    """

    def __init__(self, seed: int):
        self.seed = int(seed)
        self._gen = np.random.Generator(np.random.PCG64(self.seed))

    def fork(self, *keys: int) -> "Rng":
        seq = np.random.SeedSequence([self.seed & 0xFFFFFFFFFFFFFFFF, *map(int, keys)])
        return Rng(int(seq.generate_state(1, dtype=np.uint64)[0]))

    def uniform(self, n: int, lo: float = 0.0, hi: float = 1.0) -> np.ndarray:
        if not lo < hi:
            raise ValueError(f"uniform needs lo < hi, got lo={lo}, hi={hi}")
        if n < 0:
            raise ValueError(f"n must be non-negative, got {n}")
        out = lo + (hi - lo) * self._gen.random(n)
        # rounding can land exactly on hi for wide intervals
        return np.minimum(out, np.nextafter(hi, lo))

    def random(self, shape) -> np.ndarray:
        """Uniform draws on [0, 1) with the given shape."""
        return self._gen.random(shape)

    def integers(self, lo: int, hi: int, size=None):
        return self._gen.integers(lo, hi, size=size)

    def permutation(self, n: int) -> np.ndarray:
        """Fisher-Yates shuffle of ``range(n)``."""
        idx = np.arange(n)
        for i in range(n - 1, 0, -1):
            j = int(self._gen.integers(0, i + 1))
            idx[i], idx[j] = idx[j], idx[i]
        return idx


def init_weights(rng: Rng, fan_in: int, fan_out: int) -> np.ndarray:
    """Uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) weight matrix of shape (fan_in, fan_out)."""
    if fan_in < 1 or fan_out < 1:
        raise ValueError(f"weight dims must be >= 1, got ({fan_in}, {fan_out})")
    bound = 1.0 / math.sqrt(fan_in)
    return rng.uniform(fan_in * fan_out, -bound, bound).reshape(fan_in, fan_out)
