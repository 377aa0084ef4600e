"""Exact computation on a materialized finite-depth environment.

A depth-n environment is stored in implicit complete-tree (level-order)
indexing: vertex 0 is the root, the children of vertex k are b*k+1 ... b*k+b,
and level l occupies indices [(b^l - 1)/(b - 1), (b^{l+1} - 1)/(b - 1)).
``a[k]`` is the A-value of vertex k (the draw made at its parent), so rows of
transition probabilities and the hitting-time recursions are vectorizable
level by level.

The depth-n boundary functions solve, for 1 <= |x| < n with boundary values
alpha = beta = 1 and gamma = 0 on level n:

    alpha(x) = e^{-lam} * sum_i A(x_i) alpha(x_i) / (1 + sum_i A(x_i) beta(x_i))
    beta(x)  = ((1 - e^{-2 lam}) + sum_i A(x_i) beta(x_i))
               / (1 + sum_i A(x_i) beta(x_i))
    gamma(x) = (1/omega(x, parent) + sum_i A(x_i) gamma(x_i))
               / (1 + sum_i A(x_i) beta0(x_i))

where beta0 is beta at lam = 0 (gamma always contracts against it).  From
the root row these give the hitting-time transform and expectation

    E e^{-lam tau_n} = e^{-lam} sum_i w_i alpha(e_i) / sum_i w_i beta(e_i)
    E tau_n          = (1 + sum_i w_i gamma(e_i)) / sum_i w_i beta0(e_i)

with w_i = omega(e, e_i) = A(e_i) / sum_j A(e_j).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import List, Sequence, Tuple

import numpy as np

from . import _bits
from .environment import ChildrenModel, EnvSpec
from .errors import TreeTooLargeError

NODE_BUDGET = 2 ** 26


def level_offset(b: int, level: int) -> int:
    """First level-order index of the given level."""
    return (b ** level - 1) // (b - 1)


def total_vertices(b: int, depth: int) -> int:
    return (b ** (depth + 1) - 1) // (b - 1)


def _level_a_values(spec: EnvSpec, keys: np.ndarray) -> np.ndarray:
    """A-values of all children of the vertices with the given keys."""
    b = spec.b
    values, cdf = np.asarray(spec.values), np.cumsum(spec.probs)
    cdf[-1] = 1.0
    ck = _bits.child_keys_np(keys, b)
    if spec.children_model is ChildrenModel.COMMON_CHILD:
        parent_u = (_bits.mix64_np(keys ^ np.uint64(_bits.A_DRAW_SALT))
                    >> np.uint64(11)) * 2.0 ** -53
        idx = np.minimum(np.searchsorted(cdf, parent_u, side="right"),
                         len(values) - 1)
        a = np.repeat(values[idx], b)
        return ck, a
    # per-child draws keyed on the parent: child slot i uses salt index i
    u = np.empty(len(ck), dtype=np.float64)
    for i in range(b):
        u[i::b] = _bits.a_draw_units_np(keys, i)
    idx = np.minimum(np.searchsorted(cdf, u, side="right"), len(values) - 1)
    return ck, values[idx]


@dataclass
class QuenchedTree:
    """A materialized depth-n environment in level-order arrays."""

    spec: EnvSpec
    env_seed: int
    depth: int
    a: np.ndarray          # A-value per vertex, index >= 1 (a[0] is nan)

    @property
    def b(self) -> int:
        return self.spec.b

    @property
    def n_vertices(self) -> int:
        return len(self.a)

    def level_slice(self, level: int) -> slice:
        return slice(level_offset(self.b, level),
                     level_offset(self.b, level + 1))

    def index_of(self, path: Sequence[int]) -> int:
        k = 0
        for idx in path:
            if not 0 <= idx < self.b:
                raise IndexError(f"child index {idx} outside [0, {self.b})")
            k = self.b * k + 1 + idx
        if k >= self.n_vertices:
            raise IndexError("path deeper than the materialized tree")
        return k

    def path_of(self, index: int) -> Tuple[int, ...]:
        path = []
        while index > 0:
            index, rem = divmod(index - 1, self.b)
            path.append(rem)
        return tuple(reversed(path))

    def children_sum_a(self) -> np.ndarray:
        """sum_i A(x_i) for every vertex with materialized children."""
        n_internal = level_offset(self.b, self.depth)
        return self.a[1:n_internal * self.b + 1].reshape(n_internal, self.b
                                                         ).sum(axis=1)

    def root_omega(self) -> np.ndarray:
        """omega(e, e_i) for i = 0..b-1."""
        a_root = self.a[1:1 + self.b]
        return a_root / a_root.sum()


def materialize_tree(spec: EnvSpec, env_seed: int, depth: int) -> QuenchedTree:
    """Materialize all A-values of levels 1..depth for an environment seed.

    Bit-identical to :func:`~rwtree.environment.vertex_env` on every path.
    Raises ``TREE_TOO_LARGE`` when b^depth exceeds the 2^26 node budget.
    """
    if depth < 1:
        raise TreeTooLargeError(f"depth must be >= 1, got {depth}")
    if spec.b ** depth > NODE_BUDGET:
        raise TreeTooLargeError(
            f"b^depth = {spec.b}^{depth} exceeds the {NODE_BUDGET} node budget")
    total = total_vertices(spec.b, depth)
    a = np.full(total, np.nan, dtype=np.float64)
    keys = np.array([_bits.env_base_key(env_seed)], dtype=np.uint64)
    for level in range(depth):
        ck, a_level = _level_a_values(spec, keys)
        sl = slice(level_offset(spec.b, level + 1),
                   level_offset(spec.b, level + 2))
        a[sl] = a_level
        keys = ck
    return QuenchedTree(spec=spec, env_seed=env_seed, depth=depth, a=a)


def _extra_level_a(tree: QuenchedTree) -> np.ndarray:
    """A-values of the (depth+1) level, derived on demand for pi."""
    keys = np.array([_bits.env_base_key(tree.env_seed)], dtype=np.uint64)
    for _ in range(tree.depth):
        keys = _bits.child_keys_np(keys, tree.b)
    _, a_next = _level_a_values(tree.spec, keys)
    return a_next


@dataclass
class BoundaryFunctions:
    """alpha/beta/gamma for one boundary depth n and one lam >= 0.

    Arrays are level-order over all vertices (entries of level 0 unused);
    ``beta0`` is beta at lam = 0, the contraction weight of gamma.
    """

    tree: QuenchedTree
    lam: float
    alpha: np.ndarray
    beta: np.ndarray
    beta0: np.ndarray
    gamma: np.ndarray

    def at(self, path: Sequence[int]) -> Tuple[float, float, float]:
        k = self.tree.index_of(path)
        return float(self.alpha[k]), float(self.beta[k]), float(self.gamma[k])


def solve_boundary_functions(tree: QuenchedTree, lam: float
                             ) -> BoundaryFunctions:
    """One bottom-up pass solving the three recursions for all vertices.

    Vectorized level by level (children of a level are contiguous), which is
    the iterative post-order the contract requires: no call recursion, depth
    many passes.
    """
    if lam < 0:
        raise ValueError(f"lambda must be >= 0, got {lam}")
    b, n = tree.b, tree.depth
    total = tree.n_vertices
    alpha = np.zeros(total)
    beta = np.zeros(total)
    beta0 = np.zeros(total)
    gamma = np.zeros(total)
    bd = tree.level_slice(n)
    alpha[bd] = 1.0
    beta[bd] = 1.0
    beta0[bd] = 1.0
    gamma[bd] = 0.0
    e_lam = math.exp(-lam)
    offset = 1.0 - math.exp(-2.0 * lam)
    for level in range(n - 1, 0, -1):
        sl = tree.level_slice(level)
        ch = tree.level_slice(level + 1)
        a_ch = tree.a[ch].reshape(-1, b)
        s_ab = (a_ch * beta[ch].reshape(-1, b)).sum(axis=1)
        s_ab0 = (a_ch * beta0[ch].reshape(-1, b)).sum(axis=1)
        s_aa = (a_ch * alpha[ch].reshape(-1, b)).sum(axis=1)
        s_ag = (a_ch * gamma[ch].reshape(-1, b)).sum(axis=1)
        denom = 1.0 + s_ab
        denom0 = 1.0 + s_ab0
        inv_omega_parent = 1.0 + a_ch.sum(axis=1)
        alpha[sl] = e_lam * s_aa / denom
        beta[sl] = (offset + s_ab) / denom
        beta0[sl] = s_ab0 / denom0
        gamma[sl] = (inv_omega_parent + s_ag) / denom0
    return BoundaryFunctions(tree=tree, lam=lam, alpha=alpha, beta=beta,
                             beta0=beta0, gamma=gamma)


def laplace_tau(tree: QuenchedTree, lam: float) -> float:
    """Quenched Laplace transform E e^{-lam tau_n} of the depth-n hitting time."""
    fns = solve_boundary_functions(tree, lam)
    w = tree.root_omega()
    e1 = slice(1, 1 + tree.b)
    num = float(np.dot(w, fns.alpha[e1]))
    den = float(np.dot(w, fns.beta[e1]))
    return math.exp(-lam) * num / den


def expected_tau(tree: QuenchedTree) -> float:
    """Quenched expectation E tau_n of the depth-n hitting time."""
    fns = solve_boundary_functions(tree, 0.0)
    w = tree.root_omega()
    e1 = slice(1, 1 + tree.b)
    num = 1.0 + float(np.dot(w, fns.gamma[e1]))
    den = float(np.dot(w, fns.beta0[e1]))
    return num / den


def invariant_measure(tree: QuenchedTree, pi_root: float) -> np.ndarray:
    """The invariant measure pi on all materialized vertices.

    Defined edge by edge through pi(x) = [omega(parent, x)/omega(x, parent)]
    * pi(parent), which forces detailed balance on every edge.  The level
    below the materialized boundary is derived on demand (the boundary
    vertices' upward rates need their children's A-values).
    """
    if not pi_root > 0:
        raise ValueError(f"pi_root must be > 0, got {pi_root}")
    b, n = tree.b, tree.depth
    pi = np.empty(tree.n_vertices)
    pi[0] = pi_root
    sum_a = np.concatenate([tree.children_sum_a(),
                            _extra_level_a(tree).reshape(-1, b).sum(axis=1)])
    for level in range(n):
        sl = tree.level_slice(level)
        ch = tree.level_slice(level + 1)
        a_ch = tree.a[ch].reshape(-1, b)
        if level == 0:
            omega_down = a_ch / a_ch.sum(axis=1)[:, None]
        else:
            omega_down = a_ch / (1.0 + sum_a[sl])[:, None]
        omega_up = 1.0 / (1.0 + sum_a[ch])
        pi[ch] = (omega_down.reshape(-1) / omega_up) * np.repeat(pi[sl], b)
    return pi


def pi_envelope_constants(tree: QuenchedTree) -> Tuple[float, float]:
    """(c0, scale): with pi normalized by pi_root * scale, the measure is
    sandwiched between c0 * prod A and prod A along every root path.

    From pi(x) = pi_root * (1/sum_j A(e_j)) * (1 + sum_i A(x_i)) * prod A(z),
    the non-product factor lies in [lo, hi] with lo = (1 + b a_min)/(b a_max)
    and hi = (1 + b a_max)/(b a_min); scale = hi and c0 = lo/hi.
    """
    a_min = min(tree.spec.values)
    a_max = max(tree.spec.values)
    b = tree.b
    lo = (1.0 + b * a_min) / (b * a_max)
    hi = (1.0 + b * a_max) / (b * a_min)
    return lo / hi, hi


def path_products(tree: QuenchedTree) -> np.ndarray:
    """prod of A along the root path, per vertex (1.0 at the root)."""
    out = np.empty(tree.n_vertices)
    out[0] = 1.0
    b = tree.b
    for level in range(tree.depth):
        sl = tree.level_slice(level)
        ch = tree.level_slice(level + 1)
        out[ch] = tree.a[ch] * np.repeat(out[sl], b)
    return out
