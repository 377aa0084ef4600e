"""Environment distributions and lazy per-vertex sampling on the b-ary tree.

A vertex environment is the vector of A-ratios attached to its children:
A(x_i) = omega(x, x_i) / omega(x, parent(x)).  Sampling the A-vector fixes
all transition probabilities of the vertex:

    omega(x, parent) = 1 / (1 + sum_i A_i)
    omega(x, x_i)    = A_i / (1 + sum_i A_i)

and at the root (no parent) omega(e, e_i) = A_i / sum_j A_j.  The root
A-vector is sampled like any other vertex.

Environments are never stored: every vertex re-derives its draw from
(seed, path) through keyed counter-based hashing, so walks over sparse deep
path sets need O(depth) memory and replays are bit-exact.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Sequence, Tuple

import numpy as np

from . import _bits
from .errors import (
    BadBranchingError,
    BadProbabilityError,
    DegenerateAtomsError,
    NonpositiveAtomError,
    ProbSumError,
)

PROB_SUM_TOL = 1e-12

VertexPath = Tuple[int, ...]


class ChildrenModel(enum.Enum):
    """Joint law of the b A-values at one vertex (marginals always the atom law)."""

    IID_CHILDREN = "iid_children"
    COMMON_CHILD = "common_child"

    @classmethod
    def parse(cls, name: "str | ChildrenModel") -> "ChildrenModel":
        if isinstance(name, ChildrenModel):
            return name
        key = str(name).strip().lower()
        for member in cls:
            if key in (member.value, member.name.lower()):
                return member
        raise BadProbabilityError(f"unknown children model {name!r}")


@dataclass(frozen=True)
class EnvSpec:
    """A finite-atom law for the ratio variable A plus the dependence model.

    ``epsilon0`` is the uniform lower bound on every transition probability
    the construction can produce (ellipticity constant); it is strictly
    positive for any valid finite atom law.
    """

    b: int
    values: Tuple[float, ...]
    probs: Tuple[float, ...]
    children_model: ChildrenModel = ChildrenModel.IID_CHILDREN
    exact_critical: bool = False
    epsilon0: float = field(default=0.0, compare=False)
    degenerate: bool = field(default=False, compare=False)

    @property
    def atoms(self) -> Tuple[Tuple[float, float], ...]:
        return tuple(zip(self.values, self.probs))

    @property
    def n_atoms(self) -> int:
        return len(self.values)

    def mean(self) -> float:
        return float(np.dot(self.values, self.probs))

    def to_config_dict(self) -> dict:
        """Key/value form used by the ``[env]`` config section."""
        return {
            "b": str(self.b),
            "atoms": ", ".join(f"{v!r}:{p!r}" for v, p in self.atoms),
            "children_model": self.children_model.value,
        }


def _ellipticity(b: int, values: Sequence[float],
                 model: ChildrenModel) -> float:
    """Smallest transition probability over all reachable configurations."""
    a_min = min(values)
    a_max = max(values)
    if model is ChildrenModel.COMMON_CHILD:
        # all b children share one atom value a; root rows are uniform 1/b
        candidates = [min(1.0, a) / (1.0 + b * a) for a in values]
        candidates.append(1.0 / b)
        return min(candidates)
    # independent children: extremes are one child at a_min, the rest at a_max
    non_root = min(1.0, a_min) / (1.0 + b * a_max)
    root = a_min / (a_min + (b - 1) * a_max)
    return min(non_root, root)


def make_env_spec(b: int,
                  atoms: Sequence[Tuple[float, float]],
                  children_model: "str | ChildrenModel" = ChildrenModel.IID_CHILDREN,
                  *,
                  require_nondegenerate: bool = False,
                  exact_critical: bool = False) -> EnvSpec:
    """Validate and build an :class:`EnvSpec`.

    Raises ``BAD_BRANCHING`` for b < 2, ``NONPOSITIVE_ATOM`` for atom values
    outside (0, inf), ``PROB_SUM`` when probabilities do not sum to one
    within 1e-12, and ``DEGENERATE_ATOMS`` when ``require_nondegenerate`` is
    set but fewer than two distinct values carry positive probability.
    """
    if b < 2:
        raise BadBranchingError(f"branching factor must be >= 2, got {b}")
    if not atoms:
        raise ProbSumError("atom list is empty")
    values = []
    probs = []
    for v, p in atoms:
        v = float(v)
        p = float(p)
        if not np.isfinite(v) or v <= 0.0:
            raise NonpositiveAtomError(f"atom value {v} not in (0, inf)")
        if not np.isfinite(p) or p <= 0.0 or p > 1.0:
            raise BadProbabilityError(f"atom probability {p} not in (0, 1]")
        values.append(v)
        probs.append(p)
    total = sum(probs)
    if abs(total - 1.0) > PROB_SUM_TOL:
        raise ProbSumError(f"probabilities sum to {total!r}")
    model = ChildrenModel.parse(children_model)
    distinct = len({v for v, p in zip(values, probs) if p > 0.0})
    degenerate = distinct < 2
    if require_nondegenerate and degenerate:
        raise DegenerateAtomsError("law of A has a single atom")
    eps0 = _ellipticity(b, values, model)
    return EnvSpec(
        b=b,
        values=tuple(values),
        probs=tuple(probs),
        children_model=model,
        exact_critical=exact_critical,
        epsilon0=eps0,
        degenerate=degenerate,
    )


def make_critical_spec(b: int,
                       atoms: Sequence[Tuple[Fraction, Fraction]],
                       children_model: "str | ChildrenModel" = ChildrenModel.IID_CHILDREN,
                       ) -> EnvSpec:
    """Rescale rational atoms so that E(A) = 1/b holds in exact arithmetic.

    The returned spec carries ``exact_critical=True`` so that regime
    classification does not depend on the float tolerance.
    """
    fr_atoms = [(Fraction(v), Fraction(p)) for v, p in atoms]
    mean = sum(v * p for v, p in fr_atoms)
    if mean <= 0:
        raise NonpositiveAtomError("mean of atoms must be positive")
    scale = Fraction(1, b) / mean
    scaled = [(float(v * scale), float(p)) for v, p in fr_atoms]
    return make_env_spec(b, scaled, children_model, exact_critical=True)


@dataclass(frozen=True)
class VertexEnv:
    """One vertex's sampled children A-vector and its transition row."""

    a_children: Tuple[float, ...]
    omega_parent: float              # 0.0 at the root
    omega_children: Tuple[float, ...]
    is_root: bool


@lru_cache(maxsize=64)
def _atom_tables(spec: EnvSpec):
    """(values, cdf) arrays for inverse-CDF sampling; cached per spec."""
    values = np.asarray(spec.values, dtype=np.float64)
    cdf = np.cumsum(np.asarray(spec.probs, dtype=np.float64))
    cdf[-1] = 1.0
    return values, cdf


def _pick_atom(spec: EnvSpec, u: float) -> float:
    values, cdf = _atom_tables(spec)
    i = 0
    n = len(values)
    while i < n - 1 and u >= cdf[i]:
        i += 1
    return float(values[i])


def children_a_values(spec: EnvSpec, key: int) -> Tuple[float, ...]:
    """A-values of the b children of the vertex with the given key."""
    if spec.children_model is ChildrenModel.COMMON_CHILD:
        a = _pick_atom(spec, _bits.unit(_bits.a_draw_u64(key, 0)))
        return (a,) * spec.b
    return tuple(
        _pick_atom(spec, _bits.unit(_bits.a_draw_u64(key, i)))
        for i in range(spec.b)
    )


def vertex_env(spec: EnvSpec, seed: int, path: Sequence[int]) -> VertexEnv:
    """Deterministically sample the environment of one vertex.

    Identical (seed, path) pairs always produce bit-identical output;
    distinct paths give statistically independent draws.
    """
    path = tuple(path)
    for idx in path:
        if not 0 <= idx < spec.b:
            raise BadBranchingError(f"path index {idx} outside [0, {spec.b})")
    key = _bits.vertex_key(seed, path)
    a = children_a_values(spec, key)
    s = sum(a)
    if path:
        denom = 1.0 + s
        return VertexEnv(
            a_children=a,
            omega_parent=1.0 / denom,
            omega_children=tuple(ai / denom for ai in a),
            is_root=False,
        )
    return VertexEnv(
        a_children=a,
        omega_parent=0.0,
        omega_children=tuple(ai / s for ai in a),
        is_root=True,
    )


def transition_probs(env: VertexEnv, is_root: bool) -> np.ndarray:
    """Probability vector over (parent, child_0, ..., child_{b-1}).

    The parent entry is zero iff ``is_root``.  Recomputed from the A-vector
    so the flag, not the sampled env, decides the root convention.
    """
    a = np.asarray(env.a_children, dtype=np.float64)
    if is_root:
        out = np.concatenate(([0.0], a / a.sum()))
    else:
        denom = 1.0 + a.sum()
        out = np.concatenate(([1.0 / denom], a / denom))
    return out
