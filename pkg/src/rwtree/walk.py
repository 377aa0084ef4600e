"""Quenched walk simulation on the lazy environment.

Positions are maintained as a path stack; the environment of every visited
vertex is re-derived from (env_seed, path) keyed hashing with the ancestry
cached along the current path, so memory is O(depth) and revisits are cheap.
Walk randomness is a counter-based stream keyed on walk_seed, disjoint from
the environment stream, so one environment can host any number of
independent walks.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from . import _bits, kernels
from .environment import ChildrenModel, EnvSpec

CHECKPOINTS_PER_DECADE = 8


def default_checkpoints(n_steps: int) -> List[int]:
    """Geometric checkpoint steps ceil(10^(k/8)) <= n_steps, plus n_steps."""
    out = []
    k = 0
    while True:
        n = math.ceil(10.0 ** (k / CHECKPOINTS_PER_DECADE))
        if n > n_steps:
            break
        if not out or n > out[-1]:
            out.append(n)
        k += 1
    if not out or out[-1] != n_steps:
        out.append(n_steps)
    return out


@dataclass(frozen=True)
class WalkStats:
    """Summary of one simulated walk."""

    steps: int
    max_depth_checkpoints: Tuple[Tuple[int, int], ...]
    returns_at_checkpoints: Tuple[Tuple[int, int], ...]
    returns_to_root: int
    final_depth: int
    max_depth: int


class HitOutcome(enum.Enum):
    HIT = "HIT"
    CENSORED = "CENSORED"


@dataclass(frozen=True)
class HittingResult:
    outcome: HitOutcome
    tau: Optional[int]
    cap: int


def _kernel_args(spec: EnvSpec):
    values = np.asarray(spec.values, dtype=np.float64)
    cdf = np.cumsum(np.asarray(spec.probs, dtype=np.float64))
    cdf[-1] = 1.0
    common = spec.children_model is ChildrenModel.COMMON_CHILD
    return spec.b, values, cdf, common


def simulate_walk(spec: EnvSpec, env_seed: int, walk_seed: int, n_steps: int,
                  checkpoints: Optional[Sequence[int]] = None) -> WalkStats:
    """Simulate n_steps nearest-neighbour steps from the root.

    Deterministic given (env_seed, walk_seed).  ``checkpoints`` overrides
    the default geometric grid (must be strictly increasing, <= n_steps).
    """
    if n_steps < 1:
        raise ValueError(f"n_steps must be >= 1, got {n_steps}")
    if checkpoints is None:
        cps = default_checkpoints(n_steps)
    else:
        cps = list(checkpoints)
        if any(b <= a for a, b in zip(cps, cps[1:])) or (
                cps and (cps[0] < 1 or cps[-1] > n_steps)):
            raise ValueError("checkpoints must be strictly increasing within "
                             f"[1, {n_steps}]")
    b, values, cdf, common = _kernel_args(spec)
    max_cp, ret_cp, final_depth, returns, max_depth = kernels.walk_stats(
        b, values, cdf, common,
        _bits.env_base_key(env_seed), _bits.walk_base_key(walk_seed),
        n_steps, np.asarray(cps, dtype=np.int64),
    )
    return WalkStats(
        steps=n_steps,
        max_depth_checkpoints=tuple(zip(cps, map(int, max_cp))),
        returns_at_checkpoints=tuple(zip(cps, map(int, ret_cp))),
        returns_to_root=int(returns),
        final_depth=int(final_depth),
        max_depth=int(max_depth),
    )


def hitting_time(spec: EnvSpec, env_seed: int, walk_seed: int, level: int,
                 cap: int) -> HittingResult:
    """First entrance step into depth ``level``, censored at ``cap`` steps."""
    if level < 1:
        raise ValueError(f"level must be >= 1, got {level}")
    if cap < 1:
        raise ValueError(f"cap must be >= 1, got {cap}")
    b, values, cdf, common = _kernel_args(spec)
    tau = kernels.hitting_time(
        b, values, cdf, common,
        _bits.env_base_key(env_seed), _bits.walk_base_key(walk_seed),
        level, cap,
    )
    if tau < 0:
        return HittingResult(HitOutcome.CENSORED, None, cap)
    return HittingResult(HitOutcome.HIT, int(tau), cap)


def first_return_time(spec: EnvSpec, env_seed: int, walk_seed: int,
                      cap: int) -> HittingResult:
    """First return step to the root, censored at ``cap`` steps."""
    if cap < 1:
        raise ValueError(f"cap must be >= 1, got {cap}")
    b, values, cdf, common = _kernel_args(spec)
    tau = kernels.first_return_time(
        b, values, cdf, common,
        _bits.env_base_key(env_seed), _bits.walk_base_key(walk_seed), cap,
    )
    if tau < 0:
        return HittingResult(HitOutcome.CENSORED, None, cap)
    return HittingResult(HitOutcome.HIT, int(tau), cap)


class PassageOutcome(enum.Enum):
    HIT_LEVEL = 1
    HIT_PARENT = 0
    CENSORED = -1


def passage_from_vertex(spec: EnvSpec, env_seed: int, walk_seed: int,
                        start_path: Sequence[int], level: int,
                        cap: int) -> Tuple[PassageOutcome, int]:
    """Walk from an interior vertex until depth ``level`` or its parent.

    Monte Carlo counterpart of the interior boundary-function identities:
    started at x with 1 <= |x| < level, the walk stops at the first entrance
    into depth ``level`` or the first visit to parent(x), whichever is
    earlier.  Returns the outcome and the number of steps taken.
    """
    start_path = tuple(start_path)
    if not 1 <= len(start_path) < level:
        raise ValueError("need 1 <= |start| < level")
    b, values, cdf, common = _kernel_args(spec)
    outcome, steps = kernels.passage_from_vertex(
        b, values, cdf, common,
        _bits.env_base_key(env_seed), _bits.walk_base_key(walk_seed),
        list(start_path), level, cap,
    )
    return PassageOutcome(outcome), int(steps)
