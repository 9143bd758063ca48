"""Random sampling of mutation strengths and the unbiased variation operators.

Bit strings are numpy ``uint8`` arrays of 0/1 values; their length is fixed
for the lifetime of a run.  All operators are pure functions of their inputs
and the :class:`RandomSource` state, so identical seeds and identical draw
sequences give identical outputs.
"""

from __future__ import annotations

import numpy as np

from . import _kernels as _k


class ParameterError(ValueError):
    """A parameter is outside its documented domain."""


class RandomSource:
    """SplitMix64 counter generator with a 64-bit seed.

    The state is a one-element uint64 array shared with the jitted kernels,
    so Python-level draws and kernel-level draws come from one stream.  A
    RandomSource is single-owner: never share one across concurrent runs.
    """

    __slots__ = ("_state", "seed")

    def __init__(self, seed: int):
        if not 0 <= int(seed) < 2 ** 64:
            raise ParameterError(f"seed must be a 64-bit unsigned integer, got {seed}")
        self.seed = int(seed)
        self._state = np.array([seed], dtype=np.uint64)

    @property
    def state(self) -> int:
        return int(self._state[0])

    def next_u64(self) -> int:
        return int(_k.next_u64(self._state))

    def u01(self) -> float:
        """Uniform float in [0, 1)."""
        return float(_k.u01(self._state))

    def randbelow(self, n: int) -> int:
        """Uniform integer in [0, n)."""
        if n <= 0:
            raise ParameterError(f"randbelow needs n >= 1, got {n}")
        return int(_k.randbelow(self._state, n))

    def spawn(self, offset: int) -> "RandomSource":
        """Independent source for run ``offset`` of a batch (seed + offset)."""
        return RandomSource((self.seed + offset) % 2 ** 64)

    def __repr__(self) -> str:  # pragma: no cover
        return f"RandomSource(seed={self.seed})"


def as_bits(x) -> np.ndarray:
    """Validate and return ``x`` as a uint8 bit array."""
    a = np.asarray(x, dtype=np.uint8)
    if a.ndim != 1:
        raise ParameterError("bit strings are one-dimensional")
    if a.size and a.max() > 1:
        raise ParameterError("bit strings may contain only 0 and 1")
    return a


def random_bitstring(n: int, rng: RandomSource) -> np.ndarray:
    """Uniform random bit string of length n (one u64 draw per position)."""
    if n < 1:
        raise ParameterError(f"n must be positive, got {n}")
    out = np.empty(n, np.uint8)
    _k.random_bits(rng._state, out)
    return out


def _check_np(n: int, p: float) -> None:
    if n < 1:
        raise ParameterError(f"n must be a positive integer, got {n}")
    if not 0.0 < p < 1.0:
        raise ParameterError(f"p must lie in (0, 1), got {p}")


def sample_binomial(n: int, p: float, rng: RandomSource, size: int | None = None):
    """Draw the number of successes in n independent trials of probability p.

    Exact inverse-CDF sampling: a left-to-right walk from 0 while the mean is
    small, a fixed-order walk outward from the mode otherwise (no normal
    approximation at any size).  ``size`` requests a batch of draws as an
    int64 array.
    """
    _check_np(n, p)
    if size is None:
        return int(_k.binomial(rng._state, n, p))
    out = np.empty(size, np.int64)
    _k.binomial_batch(rng._state, n, p, out)
    return out


def sample_binomial_positive(n: int, p: float, rng: RandomSource, size: int | None = None):
    """Draw from Binomial(n, p) conditioned on a strictly positive outcome.

    Inverse-CDF walk over k = 1..n with the probabilities renormalized by
    1/(1-(1-p)^n), accumulated left to right.  Never returns 0.  ``size``
    requests a batch of draws as an int64 array.
    """
    _check_np(n, p)
    if size is None:
        return int(_k.binomial_positive(rng._state, n, p))
    out = np.empty(size, np.int64)
    _k.binomial_positive_batch(rng._state, n, p, out)
    return out


def flip_positions(n: int, ell: int, rng: RandomSource) -> np.ndarray:
    """``ell`` distinct positions from [0, n), uniform, in selection order.

    Partial Fisher-Yates: O(ell) draws and work.
    """
    if ell < 0 or ell > n:
        raise ParameterError(f"need 0 <= ell <= n, got ell={ell}, n={n}")
    idx = np.arange(n)
    rbuf = np.empty(n, np.int64)
    posbuf = np.empty(n, np.int64)
    _k.fy_positions(rng._state, n, ell, idx, rbuf, posbuf)
    return posbuf[:ell].copy()


def mutate_flip(x, ell: int, rng: RandomSource) -> np.ndarray:
    """Flip exactly ``ell`` distinct, uniformly chosen positions of ``x``.

    The input is not modified; the result differs from ``x`` in exactly
    ``ell`` positions.
    """
    a = as_bits(x)
    n = a.shape[0]
    if ell < 0 or ell > n:
        raise ParameterError(f"need 0 <= ell <= n, got ell={ell}, n={n}")
    y = a.copy()
    pos = flip_positions(n, ell, rng)
    y[pos] ^= 1
    return y


def crossover_biased(a, b, c: float, rng: RandomSource) -> np.ndarray:
    """Per-position biased crossover: take b[i] with probability c, else a[i].

    c = 1/2 is uniform crossover.  Consumes one draw per position regardless
    of whether the parents agree there.
    """
    aa = as_bits(a)
    bb = as_bits(b)
    if aa.shape[0] != bb.shape[0]:
        raise ParameterError(
            f"parents must have equal length, got {aa.shape[0]} and {bb.shape[0]}"
        )
    if not 0.0 <= c <= 1.0:
        raise ParameterError(f"crossover bias must lie in [0, 1], got {c}")
    out = np.empty_like(aa)
    _k.crossover_into(rng._state, out, aa, bb, c)
    return out
