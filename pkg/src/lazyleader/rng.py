"""Counter-based random streams shared by the Python and kernel code paths.

A stream is identified by ``(master_seed, stream_id, family)`` and reduced to
a single 64-bit key.  The ``c``-th word of a stream is

    word(key, c) = mix64(key XOR mix64((c + 1) * GOLDEN))

where ``mix64`` is the SplitMix64 finalizer.  Words are a pure function of
``(key, c)``: kernels can jump to any counter, distinct counters of one key
never collide (both maps are bijections), and streams share no state.

Key derivation::

    k = mix64(master_seed + GOLDEN)
    k = mix64(k XOR (family + 1) * FAMILY_MULT)
    key = mix64(k XOR (stream_id + 1) * GOLDEN)

Draw conventions (every forecaster path uses exactly these):

* uniform in [0, 1):  ``(w >> 11) * 2**-53``
* uniform in (0, 1]:  ``((w >> 11) + 1) * 2**-53``
* uniform in (0, 1):  ``((w >> 12) + 0.5) * 2**-52`` (52 bits keep the half exact)
* fair coins: bit ``i % 64`` of word ``i // 64`` (64 flips per word)
* normals: Box-Muller on word pairs, both the cosine and sine outputs used
"""

from __future__ import annotations

import math

import numpy as np

from ._accel import njit

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15
FAMILY_MULT = 0xD1B54A32D192ED03
_M1 = 0xBF58476D1CE4E5B9
_M2 = 0x94D049BB133111EB
TWO_M53 = 2.0**-53
TWO_M52 = 2.0**-52

FORECASTER = 0
ADVERSARY = 1

_FAMILIES = {"forecaster": FORECASTER, "adversary": ADVERSARY}


def mix64(z: int) -> int:
    z &= MASK64
    z = ((z ^ (z >> 30)) * _M1) & MASK64
    z = ((z ^ (z >> 27)) * _M2) & MASK64
    return z ^ (z >> 31)


def stream_key(master_seed: int, stream_id: int, family: int = FORECASTER) -> int:
    if not 0 <= master_seed <= MASK64:
        raise ValueError(f"master_seed must be a 64-bit unsigned integer, got {master_seed}")
    if stream_id < 0:
        raise ValueError(f"stream_id must be non-negative, got {stream_id}")
    k = mix64(master_seed + GOLDEN)
    k = mix64(k ^ (((family + 1) * FAMILY_MULT) & MASK64))
    return mix64(k ^ (((stream_id + 1) * GOLDEN) & MASK64))


def stream_keys(master_seed: int, count: int, family: int = FORECASTER, start: int = 0) -> np.ndarray:
    """Keys for streams ``start .. start+count-1`` as a uint64 array."""
    return np.array(
        [stream_key(master_seed, s, family) for s in range(start, start + count)],
        dtype=np.uint64,
    )


def counter_mix(c: int) -> int:
    return mix64(((c + 1) * GOLDEN) & MASK64)


# numpy path -----------------------------------------------------------------

_U30 = np.uint64(30)
_U27 = np.uint64(27)
_U31 = np.uint64(31)
_U11 = np.uint64(11)
_U12 = np.uint64(12)
_UM1 = np.uint64(_M1)
_UM2 = np.uint64(_M2)


def mix64_array(z: np.ndarray) -> np.ndarray:
    z = np.asarray(z, dtype=np.uint64)
    with np.errstate(over="ignore"):
        z = (z ^ (z >> _U30)) * _UM1
        z = (z ^ (z >> _U27)) * _UM2
    return z ^ (z >> _U31)


def words_array(keys: np.ndarray, counter: int) -> np.ndarray:
    """Word ``counter`` of every stream in ``keys`` (vectorized over streams)."""
    return mix64_array(keys ^ np.uint64(counter_mix(counter)))


def words_block(keys: np.ndarray, counter: int, count: int) -> np.ndarray:
    """Words ``counter .. counter+count-1`` for every key, shape ``(len(keys), count)``."""
    c = np.arange(counter, counter + count, dtype=np.uint64)
    with np.errstate(over="ignore"):
        cm = mix64_array((c + np.uint64(1)) * np.uint64(GOLDEN))
    return mix64_array(keys[:, None] ^ cm[None, :])


def to_unit(w: np.ndarray) -> np.ndarray:
    return (w >> _U11).astype(np.float64) * TWO_M53


def to_unit_open_right(w: np.ndarray) -> np.ndarray:
    return ((w >> _U11).astype(np.float64) + 1.0) * TWO_M53


def to_unit_open(w: np.ndarray) -> np.ndarray:
    return ((w >> _U12).astype(np.float64) + 0.5) * TWO_M52


def coins_from_words(w: np.ndarray, count: int) -> np.ndarray:
    """Unpack ``count`` fair ±1/2 increments from words, last axis = words."""
    w = np.asarray(w, dtype=np.uint64)
    idx = np.arange(count)
    bits = (w[..., idx // 64] >> (idx % 64).astype(np.uint64)) & np.uint64(1)
    return np.where(bits == 1, 0.5, -0.5)


def laplace_from_words(w: np.ndarray, eta: float) -> np.ndarray:
    """Two-sided exponential with density (eta/2) exp(-eta |z|), by inverse CDF."""
    u = to_unit_open(w)
    lo = u < 0.5
    out = np.empty_like(u)
    out[lo] = np.log(2.0 * u[lo]) / eta
    out[~lo] = -np.log(2.0 - 2.0 * u[~lo]) / eta
    return out


def normals_from_words(w: np.ndarray, count: int) -> np.ndarray:
    """Box-Muller standard normals; last axis holds ``2*ceil(count/2)`` words."""
    w1 = w[..., 0::2]
    w2 = w[..., 1::2]
    r = np.sqrt(-2.0 * np.log(to_unit_open_right(w1)))
    theta = 2.0 * math.pi * to_unit(w2)
    z = np.empty(w.shape[:-1] + (2 * w1.shape[-1],))
    z[..., 0::2] = r * np.cos(theta)
    z[..., 1::2] = r * np.sin(theta)
    return z[..., :count]


def coin_words(N: int) -> int:
    return (N + 63) // 64


def normal_words(d: int) -> int:
    return 2 * ((d + 1) // 2)


# numba path -----------------------------------------------------------------

_NB_GOLDEN = np.uint64(GOLDEN)
_NB_ONE = np.uint64(1)


@njit(inline="always")
def mix64_nb(z):
    z = (z ^ (z >> _U30)) * _UM1
    z = (z ^ (z >> _U27)) * _UM2
    return z ^ (z >> _U31)


@njit(inline="always")
def word_nb(key, counter):
    return mix64_nb(key ^ mix64_nb((np.uint64(counter) + _NB_ONE) * _NB_GOLDEN))


@njit(inline="always")
def unit_nb(w):
    return float(w >> _U11) * TWO_M53


@njit(inline="always")
def unit_open_right_nb(w):
    return (float(w >> _U11) + 1.0) * TWO_M53


@njit(inline="always")
def unit_open_nb(w):
    return (float(w >> _U12) + 0.5) * TWO_M52


@njit(inline="always")
def laplace_nb(w, eta):
    u = unit_open_nb(w)
    if u < 0.5:
        return math.log(2.0 * u) / eta
    return -math.log(2.0 - 2.0 * u) / eta


class RngStream:
    """Sequential view of one counter-based stream.

    Identical ``(master_seed, stream_id, family)`` triples replay identical
    draws; the object only carries the key and a position counter.
    """

    def __init__(self, master_seed: int, stream_id: int = 0, family: str | int = "forecaster"):
        fam = _FAMILIES[family] if isinstance(family, str) else int(family)
        self.master_seed = int(master_seed)
        self.stream_id = int(stream_id)
        self.family = fam
        self.key = stream_key(self.master_seed, self.stream_id, fam)
        self.counter = 0

    def __repr__(self) -> str:
        return (
            f"RngStream(master_seed={self.master_seed}, stream_id={self.stream_id}, "
            f"family={self.family}, counter={self.counter})"
        )

    def words(self, count: int) -> np.ndarray:
        out = words_block(np.array([self.key], dtype=np.uint64), self.counter, count)[0]
        self.counter += count
        return out

    def uniform(self) -> float:
        return float(to_unit(self.words(1))[0])

    def coins(self, count: int) -> np.ndarray:
        return coins_from_words(self.words(coin_words(count)), count)

    def laplace(self, count: int, eta: float) -> np.ndarray:
        return laplace_from_words(self.words(count), eta)

    def normals(self, count: int) -> np.ndarray:
        return normals_from_words(self.words(normal_words(count)), count)

    def fork(self) -> "RngStream":
        """Independent copy at the same position."""
        other = RngStream.__new__(RngStream)
        other.__dict__.update(self.__dict__)
        return other
