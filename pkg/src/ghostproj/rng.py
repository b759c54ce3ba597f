"""Deterministic, platform-independent random bit generation.

Everything stochastic in this package is driven by one counter-based
generator so that runs replay bit-exactly across processes, platforms and
numpy versions:

* word stream: ``word(seed, p) = mix64((seed + GOLDEN * (p + 1)) mod 2**64)``
  where ``mix64`` is the SplitMix64 finalizer and
  ``GOLDEN = 0x9E3779B97F4A7C15`` (2**64 / golden ratio, odd).
* substreams: ``derive_seed(seed, index)`` applies the same mixing to
  ``(seed, index)``, giving independent streams for mask *m*, trial *t*, etc.
* Bernoulli(q) bits: ``word < floor(q * 2**64)``.  Because a float64
  ``q`` in (0, 1) is a dyadic rational, the threshold is exact and the
  occurrence probability of a one is exactly the float value of ``q``.

Only unsigned 64-bit integer arithmetic is involved, so identical seeds
give identical bits everywhere.
"""

import numpy as np

GOLDEN = 0x9E3779B97F4A7C15

_MASK64 = (1 << 64) - 1
_MULT1 = 0xBF58476D1CE4E5B9
_MULT2 = 0x94D049BB133111EB

_U_GOLDEN = np.uint64(GOLDEN)
_U_MULT1 = np.uint64(_MULT1)
_U_MULT2 = np.uint64(_MULT2)
_S30 = np.uint64(30)
_S27 = np.uint64(27)
_S31 = np.uint64(31)
_S11 = np.uint64(11)

# counter arrays (already multiplied by GOLDEN) reused across calls
_COUNTER_CACHE: dict[int, np.ndarray] = {}
_COUNTER_CACHE_MAX = 16


def mix64(z: int) -> int:
    """SplitMix64 finalizer: a fixed bijective scrambler of 64-bit words."""
    z &= _MASK64
    z = ((z ^ (z >> 30)) * _MULT1) & _MASK64
    z = ((z ^ (z >> 27)) * _MULT2) & _MASK64
    return (z ^ (z >> 31)) & _MASK64


def derive_seed(seed: int, index: int) -> int:
    """Seed of substream ``index``: mix64(seed + GOLDEN * (index + 1)).

    Distinct indices give distinct, statistically independent streams for
    the same parent seed.  Negative indices are valid (arithmetic is
    mod 2**64) and are reserved for auxiliary streams so they never
    collide with trial/mask indices, which count up from 0.
    """
    return mix64((seed + GOLDEN * (index + 1)) & _MASK64)


def derive_seeds(seed: int, count: int) -> np.ndarray:
    """Vector of ``derive_seed(seed, i)`` for i = 0..count-1, as uint64."""
    return _mix64_inplace(_counted(seed, count))


def _counted(seed: int, n: int) -> np.ndarray:
    """Fresh uint64 array ``seed + GOLDEN * (1..n)``."""
    counter = _COUNTER_CACHE.get(n)
    if counter is None:
        counter = np.arange(1, n + 1, dtype=np.uint64)
        counter *= _U_GOLDEN
        counter.setflags(write=False)
        if len(_COUNTER_CACHE) >= _COUNTER_CACHE_MAX:
            _COUNTER_CACHE.pop(next(iter(_COUNTER_CACHE)))
        _COUNTER_CACHE[n] = counter
    return np.uint64(seed & _MASK64) + counter


def _mix64_inplace(z: np.ndarray) -> np.ndarray:
    tmp = np.empty_like(z)
    np.right_shift(z, _S30, out=tmp)
    z ^= tmp
    z *= _U_MULT1
    np.right_shift(z, _S27, out=tmp)
    z ^= tmp
    z *= _U_MULT2
    np.right_shift(z, _S31, out=tmp)
    z ^= tmp
    return z


def words(seed: int, n: int) -> np.ndarray:
    """The first ``n`` 64-bit words of the stream with the given seed."""
    return _mix64_inplace(_counted(seed, n))


def word_matrix(seeds: np.ndarray, n: int) -> np.ndarray:
    """Words for several substreams at once: row s holds words(seeds[s], n)."""
    seeds = np.asarray(seeds, dtype=np.uint64)
    counter = _counted(0, n)
    return _mix64_inplace(seeds[:, None] + counter[None, :])


def bernoulli_threshold(q: float) -> int:
    """Exact uint64 comparison threshold for Bernoulli(q) bits."""
    if not 0.0 < q < 1.0:
        raise ValueError(f"q must lie strictly inside (0, 1), got {q}")
    # exact: multiplying a float by 2**64 only shifts the exponent
    return int(q * 2.0**64)


def bernoulli_bits(seed: int, n: int, q: float) -> np.ndarray:
    """``n`` independent Bernoulli(q) bits from the seeded stream (bool)."""
    return words(seed, n) < np.uint64(bernoulli_threshold(q))


def bernoulli_bit_matrix(seeds: np.ndarray, n: int, q: float) -> np.ndarray:
    """One row of ``n`` Bernoulli(q) bits per substream seed (bool matrix)."""
    return word_matrix(seeds, n) < np.uint64(bernoulli_threshold(q))


def uniforms(seed: int, n: int) -> np.ndarray:
    """``n`` float64 values uniform on [0, 1): top 53 bits of each word."""
    return (words(seed, n) >> _S11) * 2.0**-53


def uniform_image(height: int, width: int, seed: int) -> np.ndarray:
    """Seeded uniform [0, 1) matrix, row-major draw order."""
    return uniforms(seed, height * width).reshape(height, width)
