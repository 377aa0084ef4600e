"""Multiplicative cascade sums and the distributional fixed-point pool.

The cascade value at depth n is the sum over all depth-n vertices of the
product of A-values along their root path; it is sampled by depth-first
streaming over the keyed environment (memory O(depth), no materialization),
so subtree samples on a shared seed satisfy the exact decomposition

    M_{n+1} = sum_i A(e_i) * M_n^(subtree e_i).

The fixed-point pool (population dynamics) iterates the distributional
recursion

    Z_{j+1} = sum_i A_i (theta + Z_j^(i)) / (1 + Z_j^(i)),   Z_1 = sum_i A_i

with the Z^(i) resampled with replacement from the previous generation and a
fresh A-vector per slot.  With theta = 1 - e^{-2 lam}, generation n has the
law of sum_i A_i beta_{n,lam}(e_i), so the annealed mean of the boundary
function beta is the pool mean divided by b E(A).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Optional, Sequence, Tuple

import numpy as np

from . import _bits, kernels
from .environment import ChildrenModel, EnvSpec
from .errors import (
    BadThetaError,
    DegenerateTailError,
    DepthTooLargeError,
    KTooLargeError,
)

STREAM_LEAF_BUDGET = 2 ** 32
MIN_POOL_SIZE = 1_000


@dataclass(frozen=True)
class CascadeSample:
    """One streamed cascade value at a given depth (for one environment)."""

    depth: int
    value: float


def cascade_sample(spec: EnvSpec, seed: int, depth: int,
                   root: Sequence[int] = ()) -> CascadeSample:
    """Exact product-sum over all depth-``depth`` descendants of ``root``.

    ``root`` defaults to the tree root; passing a child path samples the
    subtree cascade of the same environment, which is what the decomposition
    identity couples.  Raises ``DEPTH_TOO_LARGE`` beyond 2^32 leaves.
    """
    if depth < 0:
        raise DepthTooLargeError(f"depth must be >= 0, got {depth}")
    if spec.b ** depth > STREAM_LEAF_BUDGET:
        raise DepthTooLargeError(
            f"b^depth = {spec.b}^{depth} exceeds {STREAM_LEAF_BUDGET} leaves")
    values = np.asarray(spec.values, dtype=np.float64)
    cdf = np.cumsum(np.asarray(spec.probs, dtype=np.float64))
    cdf[-1] = 1.0
    common = spec.children_model is ChildrenModel.COMMON_CHILD
    key = _bits.vertex_key(seed, tuple(root))
    value = kernels.cascade_stream(spec.b, values, cdf, common, key, depth)
    return CascadeSample(depth=depth, value=float(value))


@dataclass(frozen=True)
class SamplePool:
    """A generation of the fixed-point pool: N samples of Z_{j,theta}."""

    theta: float
    generation: int
    values: np.ndarray

    @property
    def size(self) -> int:
        return len(self.values)

    def mean(self) -> float:
        return float(self.values.mean())


def _pool_rng(seed: int, generation: int) -> np.random.Generator:
    key = _bits.mix64((seed ^ _bits.RDE_STREAM) & _bits.MASK64)
    key = _bits.mix64((key + generation * _bits.GOLDEN) & _bits.MASK64)
    return np.random.Generator(np.random.Philox(key=key))


def _draw_a_matrix(spec: EnvSpec, rng: np.random.Generator,
                   n: int) -> np.ndarray:
    """n fresh A-vectors (n x b), respecting the children dependence model."""
    values = np.asarray(spec.values, dtype=np.float64)
    cdf = np.cumsum(np.asarray(spec.probs, dtype=np.float64))
    cdf[-1] = 1.0
    if spec.children_model is ChildrenModel.COMMON_CHILD:
        u = rng.random(n)
        idx = np.minimum(np.searchsorted(cdf, u, side="right"),
                         len(values) - 1)
        return np.repeat(values[idx, None], spec.b, axis=1)
    u = rng.random((n, spec.b))
    idx = np.minimum(np.searchsorted(cdf, u, side="right"), len(values) - 1)
    return values[idx]


def rde_init(spec: EnvSpec, seed: int, pool_size: int,
             theta: float) -> SamplePool:
    """Generation-1 pool: i.i.d. samples of sum_i A_i."""
    if not 0.0 <= theta <= 1.0:
        raise BadThetaError(f"theta must be in [0, 1], got {theta}")
    if pool_size < MIN_POOL_SIZE:
        raise BadThetaError(
            f"pool_size must be >= {MIN_POOL_SIZE}, got {pool_size}")
    rng = _pool_rng(seed, 0)
    a = _draw_a_matrix(spec, rng, pool_size)
    return SamplePool(theta=float(theta), generation=1,
                      values=a.sum(axis=1))


def rde_iterate(spec: EnvSpec, pool: SamplePool, seed: int) -> SamplePool:
    """Advance the pool one generation; deterministic given ``seed``.

    Each output slot draws a fresh A-vector and b input samples uniformly
    with replacement, then applies the recursion map.
    """
    rng = _pool_rng(seed, pool.generation)
    n = pool.size
    a = _draw_a_matrix(spec, rng, n)
    idx = rng.integers(0, n, size=(n, spec.b))
    z = pool.values[idx]
    out = (a * (pool.theta + z) / (1.0 + z)).sum(axis=1)
    return SamplePool(theta=pool.theta, generation=pool.generation + 1,
                      values=out)


def rde_run(spec: EnvSpec, seed: int, pool_size: int, theta: float,
            generations: int,
            record: Optional[Sequence[int]] = None):
    """Iterate the pool and collect per-generation summary rows.

    Returns (final_pool, rows) where each row is
    (generation, mean, se, q90, q99); ``record`` restricts rows to the given
    generations (always including generation 1 if requested range covers it).
    """
    pool = rde_init(spec, seed, pool_size, theta)
    want = set(record) if record is not None else None
    rows = []

    def push(p: SamplePool):
        if want is None or p.generation in want:
            v = p.values
            rows.append((p.generation, float(v.mean()),
                         float(v.std(ddof=1) / math.sqrt(len(v))),
                         float(np.quantile(v, 0.90)),
                         float(np.quantile(v, 0.99))))

    push(pool)
    for _ in range(generations - 1):
        pool = rde_iterate(spec, pool, seed)
        push(pool)
    return pool, rows


@dataclass(frozen=True)
class MeanBetaEstimate:
    """Annealed mean of the boundary function beta at one (n, lam)."""

    n: int
    lam: float
    theta: float
    value: float
    se: float


def jackknife_se(values: np.ndarray) -> float:
    """Delete-1 jackknife standard error of the sample mean."""
    n = len(values)
    if n < 2:
        return 0.0
    mean = values.mean()
    # leave-one-out means: (n*mean - x_i)/(n-1); closed form of their spread
    loo = (n * mean - values) / (n - 1)
    return float(np.sqrt((n - 1) / n * np.sum((loo - loo.mean()) ** 2)))


def estimate_mean_beta(spec: EnvSpec, n: int, lam: float, pool_size: int,
                       seed: int) -> MeanBetaEstimate:
    """E[beta_{n,lam}(e_i)] estimated through the fixed-point pool.

    Uses the generation-n pool with theta = 1 - e^{-2 lam}; the estimate is
    the pool mean divided by b E(A) (the A-vector is independent of the
    subtree boundary functions).  n = 1 is the boundary itself: exactly 1.
    """
    if lam < 0:
        raise ValueError(f"lambda must be >= 0, got {lam}")
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    theta = 1.0 - math.exp(-2.0 * lam)
    if n == 1:
        return MeanBetaEstimate(n=n, lam=lam, theta=theta, value=1.0, se=0.0)
    pool = rde_init(spec, seed, pool_size, theta)
    for _ in range(n - 1):
        pool = rde_iterate(spec, pool, seed)
    scale = spec.b * spec.mean()
    return MeanBetaEstimate(
        n=n, lam=lam, theta=theta,
        value=pool.mean() / scale,
        se=jackknife_se(pool.values) / scale,
    )


def hill_tail_index(samples: Sequence[float], k: int) -> float:
    """Hill estimator of the power-law tail index over the top-k order stats.

    Returns k / sum_{i<=k} log(x_(i)/x_(k+1)) for the descending order
    statistics x_(1) >= ... ; raises ``K_TOO_LARGE`` unless 1 <= k < len,
    and ``DEGENERATE_TAIL`` when the top of the sample carries no spread.
    """
    x = np.asarray(samples, dtype=np.float64)
    n = len(x)
    if not 1 <= k < n:
        raise KTooLargeError(f"need 1 <= k < {n}, got k={k}")
    if np.any(x <= 0.0):
        raise DegenerateTailError("samples must be positive")
    top = np.partition(x, n - k - 1)[n - k - 1:]
    top.sort()
    ref = top[0]
    mean_log_excess = float(np.mean(np.log(top[1:] / ref)))
    if mean_log_excess <= 0.0:
        raise DegenerateTailError("no spread in the upper order statistics")
    return 1.0 / mean_log_excess


def default_hill_k(n_samples: int) -> int:
    """Bias/variance compromise k = ceil(N^(2/3)), capped below N."""
    return min(max(1, math.ceil(n_samples ** (2.0 / 3.0))), n_samples - 1)
