"""Keyed counter-based randomness shared by every sampler in the package.

All environment and walk randomness derives from 64-bit keys through the
splitmix64 finalizer.  A vertex key is obtained by folding the child indices
of its path into the environment stream key; per-vertex draws are keyed off
that vertex key with distinct salts.  The same derivation is implemented
three times — here (scalar reference), in the Cython kernels, and vectorized
over numpy uint64 arrays — and must stay bit-identical across all three.
"""

import numpy as np

MASK64 = 0xFFFFFFFFFFFFFFFF
GOLDEN = 0x9E3779B97F4A7C15

# Stream salts keep environment draws, walk draws, per-child value draws and
# pool resampling on provably disjoint key sets.
ENV_STREAM = 0x243F6A8885A308D3
WALK_STREAM = 0x13198A2E03707344
A_DRAW_SALT = 0xA4093822299F31D0
RDE_STREAM = 0x082EFA98EC4E6C89

_INV_2_53 = 2.0 ** -53


def mix64(z: int) -> int:
    """splitmix64 finalizer: a 64-bit permutation with full avalanche."""
    z &= MASK64
    z ^= z >> 30
    z = (z * 0xBF58476D1CE4E5B9) & MASK64
    z ^= z >> 27
    z = (z * 0x94D049BB133111EB) & MASK64
    z ^= z >> 31
    return z


def env_base_key(env_seed: int) -> int:
    """Key of the root vertex for a given environment seed."""
    return mix64((env_seed & MASK64) ^ ENV_STREAM)


def walk_base_key(walk_seed: int) -> int:
    """Base key of the step-randomness stream for a given walk seed."""
    return mix64((walk_seed & MASK64) ^ WALK_STREAM)


def child_key(key: int, index: int) -> int:
    """Key of the ``index``-th child of the vertex with key ``key``."""
    return mix64(key ^ (index + 1))


def vertex_key(env_seed: int, path) -> int:
    """Key of the vertex addressed by ``path`` (child indices from the root)."""
    k = env_base_key(env_seed)
    for idx in path:
        k = mix64(k ^ (idx + 1))
    return k


def a_draw_u64(key: int, index: int) -> int:
    """Raw 64-bit draw deciding the A-value of child ``index`` at a vertex."""
    return mix64(key ^ ((A_DRAW_SALT + index) & MASK64))


def unit(u: int) -> float:
    """Map a 64-bit word to a double in [0, 1) using its top 53 bits."""
    return (u >> 11) * _INV_2_53


def step_unit(walk_key: int, step: int) -> float:
    """Uniform in [0, 1) for walk step ``step`` (counter-based, step >= 1)."""
    return unit(mix64((walk_key + step * GOLDEN) & MASK64))


# -- numpy twins (bit-identical to the scalar versions) ----------------------

_U30 = np.uint64(30)
_U27 = np.uint64(27)
_U31 = np.uint64(31)
_U11 = np.uint64(11)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)


def mix64_np(z: np.ndarray) -> np.ndarray:
    """Vectorized splitmix64 finalizer over a uint64 array."""
    z = z.copy()
    z ^= z >> _U30
    z *= _M1
    z ^= z >> _U27
    z *= _M2
    z ^= z >> _U31
    return z


def child_keys_np(keys: np.ndarray, b: int) -> np.ndarray:
    """Keys of all children of a level of vertices, level-order.

    Output index b*j + i is the i-th child of input vertex j.
    """
    out = np.repeat(keys, b)
    salts = np.tile(np.arange(1, b + 1, dtype=np.uint64), len(keys))
    return mix64_np(out ^ salts)


def a_draw_units_np(keys: np.ndarray, index: int) -> np.ndarray:
    """Uniform [0,1) draws for child ``index``'s A-value at each key."""
    salt = np.uint64((A_DRAW_SALT + index) & MASK64)
    return (mix64_np(keys ^ salt) >> _U11) * _INV_2_53
