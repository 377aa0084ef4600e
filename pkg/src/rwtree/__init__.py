"""Random walk in random environment on b-ary trees.

Toolkit layout:
  environment — atom laws for the ratio variable A; lazy keyed vertex sampling
  exponents   — regime constants (p, q, kappa, nu, ...) and the classifier
  walk        — quenched walk simulation (compiled kernel w/ pure fallback)
  quenched    — exact recursions on materialized finite-depth environments
  cascade     — multiplicative cascade sums, the distributional fixed-point
                pool, annealed boundary-function estimates, tail index
  propcheck   — executable checks of the supporting inequalities
  harness     — scaling experiments and report fitting; CLI in ``cli``
"""

from .environment import (
    ChildrenModel,
    EnvSpec,
    VertexEnv,
    make_critical_spec,
    make_env_spec,
    transition_probs,
    vertex_env,
)
from .exponents import (
    INFINITE,
    ExponentReport,
    Regime,
    classify_regime,
    compute_kappa,
    compute_nu,
    compute_p,
    compute_q,
    compute_r_bounds,
    moment_transform,
    psi_prime_at_one,
    rho,
)
from .kernels import BACKEND

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "ChildrenModel",
    "EnvSpec",
    "ExponentReport",
    "INFINITE",
    "Regime",
    "VertexEnv",
    "classify_regime",
    "compute_kappa",
    "compute_nu",
    "compute_p",
    "compute_q",
    "compute_r_bounds",
    "make_critical_spec",
    "make_env_spec",
    "moment_transform",
    "psi_prime_at_one",
    "rho",
    "transition_probs",
    "vertex_env",
]
