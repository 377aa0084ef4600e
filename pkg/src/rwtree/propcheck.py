"""Executable checks of the supporting inequalities, by exact finite sums.

Every distributional check evaluates both sides of its inequality as exact
sums over a finite atom law (or a product measure of several), so pass/fail
is deterministic; randomized sweeps draw the laws from a seeded generator
and report the extremal LHS/RHS ratio encountered.

The sequence checks iterate the extremal (equality-case) recursions

    upper:  u_{j+1} = lam_n + u_j - c u_j^a
    lower:  u_{j+1} = lam_n + (1 - c lam_n) u_j - c u_j^a

from u_1 = 1 and fit the constant C = u_n / (lam_n^{1/a} + n^{-1/(a-1)});
the suite passes when C stays within a bounded band across n.
"""

from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np

from .errors import (
    DivergedError,
    NotCenteredError,
    TooManyComponentsError,
    ZeroMeanError,
)

PASS_TOL = 1e-12
MAX_COMPONENTS = 6
MAX_PRODUCT_OUTCOMES = 100_000


@dataclass(frozen=True)
class TestDistribution:
    """A finite law for a generic non-negative (or centered) variable."""

    values: Tuple[float, ...]
    probs: Tuple[float, ...]

    def __post_init__(self):
        if abs(sum(self.probs) - 1.0) > 1e-9:
            raise ZeroMeanError(f"probabilities sum to {sum(self.probs)}")

    def mean(self) -> float:
        return float(np.dot(self.values, self.probs))

    def expect(self, f: Callable[[float], float]) -> float:
        return float(sum(p * f(v) for v, p in zip(self.values, self.probs)))


@dataclass(frozen=True)
class CheckResult:
    """Outcome of one inequality evaluation."""

    name: str
    passed: bool
    lhs: float
    rhs: float

    @property
    def ratio(self) -> float:
        return self.lhs / self.rhs if self.rhs != 0 else math.inf


def check_rsd(dist: TestDistribution, a: float, x: float) -> CheckResult:
    """Ratio self-damping: E[(xi/(x+xi))^a]/[E(xi/(x+xi))]^a <= E(xi^a)/(E xi)^a.

    Requires a > 1, x >= 0 and E xi > 0; values must be positive when x = 0.
    """
    if dist.mean() <= 0:
        raise ZeroMeanError("E(xi) must be positive")
    if x == 0 and any(v == 0.0 for v in dist.values):
        raise ZeroMeanError("x = 0 needs a strictly positive law")
    damp = dist.expect(lambda v: (v / (x + v)) ** a)
    damp_mean = dist.expect(lambda v: v / (x + v))
    lhs = damp / damp_mean ** a
    rhs = dist.expect(lambda v: v ** a) / dist.mean() ** a
    return CheckResult("rsd", lhs <= rhs + PASS_TOL, lhs, rhs)


def check_exp_inequality(dist: TestDistribution, lam: float,
                         t: float) -> CheckResult:
    """Exponential damping: the normalized shrunk variable (lam+xi)/(1+xi)
    has the smaller Laplace transform:

    E exp(-t * ((lam+xi)/(1+xi)) / E[(lam+xi)/(1+xi)]) <= E exp(-t xi/E xi).
    """
    if dist.mean() <= 0:
        raise ZeroMeanError("E(xi) must be positive")
    if not 0.0 <= lam <= 1.0:
        raise ZeroMeanError(f"lambda must be in [0, 1], got {lam}")
    shrink_mean = dist.expect(lambda v: (lam + v) / (1.0 + v))
    lhs = dist.expect(
        lambda v: math.exp(-t * ((lam + v) / (1.0 + v)) / shrink_mean))
    mean = dist.mean()
    rhs = dist.expect(lambda v: math.exp(-t * v / mean))
    return CheckResult("exp", lhs <= rhs + PASS_TOL, lhs, rhs)


def _product_expect(dists: Sequence[TestDistribution],
                    f: Callable[[Tuple[float, ...]], float]) -> float:
    outcomes = 1
    for d in dists:
        outcomes *= len(d.values)
    if len(dists) > MAX_COMPONENTS or outcomes > MAX_PRODUCT_OUTCOMES:
        raise TooManyComponentsError(
            f"{len(dists)} components / {outcomes} outcomes exceed the exact"
            " enumeration budget")
    total = 0.0
    for combo in itertools.product(*[
            list(zip(d.values, d.probs)) for d in dists]):
        p = 1.0
        for _, pi in combo:
            p *= pi
        total += p * f(tuple(v for v, _ in combo))
    return total


def check_moment_sum(dists: Sequence[TestDistribution],
                     a: float) -> CheckResult:
    """Sum moment bound for independent non-negative xi_i and a in [1, 2]:

    E[(sum xi_i)^a] <= sum E(xi_i^a) + (k-1) (sum E xi_i)^a.
    """
    lhs = _product_expect(dists, lambda vs: sum(vs) ** a)
    k = len(dists)
    rhs = sum(d.expect(lambda v: v ** a) for d in dists)
    rhs += (k - 1) * sum(d.mean() for d in dists) ** a
    return CheckResult("moment_sum", lhs <= rhs + PASS_TOL, lhs, rhs)


def check_von_bahr_esseen(dists: Sequence[TestDistribution],
                          a: float) -> CheckResult:
    """Centered sum bound for independent mean-zero xi_i and a in [1, 2]:

    E|sum xi_i|^a <= 2 sum E|xi_i|^a.
    """
    for d in dists:
        if abs(d.mean()) > 1e-12:
            raise NotCenteredError(f"component mean {d.mean()} is not 0")
    lhs = _product_expect(dists, lambda vs: abs(sum(vs)) ** a)
    rhs = 2.0 * sum(d.expect(lambda v: abs(v) ** a) for d in dists)
    return CheckResult("von_bahr_esseen", lhs <= rhs + PASS_TOL, lhs, rhs)


class SequenceBranch(enum.Enum):
    UPPER = "UPPER"
    LOWER = "LOWER"


@dataclass(frozen=True)
class SequenceFit:
    """Fitted constant of one extremal-recursion run."""

    n: int
    lambda_n: float
    u_n: float
    constant: float


def sequence_constant(a: float, c_drift: float, lambda_n: float, n: int,
                      branch: SequenceBranch) -> SequenceFit:
    """Iterate the extremal recursion to step n and fit its constant.

    Raises ``DIVERGED`` if the iteration leaves (0, inf).
    """
    if a <= 1.0:
        raise DivergedError(f"a must be > 1, got {a}")
    u = 1.0
    if branch is SequenceBranch.UPPER:
        for _ in range(n - 1):
            u = lambda_n + u - c_drift * u ** a
            if not (0.0 < u < math.inf):
                raise DivergedError(f"u left (0, inf): {u}")
    else:
        damp = 1.0 - c_drift * lambda_n
        for _ in range(n - 1):
            u = lambda_n + damp * u - c_drift * u ** a
            if not (0.0 < u < math.inf):
                raise DivergedError(f"u left (0, inf): {u}")
    scale = lambda_n ** (1.0 / a) + n ** (-1.0 / (a - 1.0))
    return SequenceFit(n=n, lambda_n=lambda_n, u_n=u, constant=u / scale)


@dataclass(frozen=True)
class SequenceCheck:
    """Boundedness verdict of the fitted constants across an n sweep."""

    name: str
    passed: bool
    fits: Tuple[SequenceFit, ...]
    spread: float   # max/min ratio of fitted constants

    @property
    def lhs(self) -> float:
        return self.spread

    @property
    def rhs(self) -> float:
        return 10.0


DEFAULT_N_SWEEP = (100, 1_000, 10_000, 100_000, 1_000_000)


def check_sequence_lemma(a: float, c_drift: float,
                         lambda_rule: Callable[[int], float],
                         branch: SequenceBranch,
                         n_values: Sequence[int] = DEFAULT_N_SWEEP,
                         spread_limit: float = 10.0) -> SequenceCheck:
    """Fit the recursion constant at each n; pass iff max/min < spread_limit.

    ``lambda_rule`` maps n to lambda_n (e.g. 0, 1/n, K/n); the LOWER branch
    hypothesis needs lambda_n <= K/n, which the caller's rule must honor.
    """
    fits = tuple(
        sequence_constant(a, c_drift, lambda_rule(n), n, branch)
        for n in n_values
    )
    consts = [f.constant for f in fits]
    spread = max(consts) / min(consts)
    return SequenceCheck(
        name=f"sequence_{branch.value.lower()}",
        passed=spread < spread_limit,
        fits=fits,
        spread=spread,
    )


# -- randomized sweeps --------------------------------------------------------

def _random_dist(rng: np.random.Generator, *, centered: bool = False,
                 max_atoms: int = 5) -> TestDistribution:
    k = int(rng.integers(2, max_atoms + 1))
    probs = rng.dirichlet(np.ones(k))
    probs = probs / probs.sum()
    if centered:
        vals = rng.uniform(-3.0, 3.0, size=k)
        vals = vals - float(np.dot(vals, probs))
    else:
        vals = np.exp(rng.uniform(-3.0, 2.0, size=k))
    return TestDistribution(tuple(float(v) for v in vals),
                            tuple(float(p) for p in probs))


@dataclass
class SweepReport:
    """Aggregate of one randomized sweep of a check."""

    name: str
    cases: int
    failures: int
    worst_ratio: float
    failing_seeds: List[int] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.failures == 0


def sweep_rsd(seed: int, cases: int = 10_000) -> SweepReport:
    rng = np.random.default_rng(seed)
    worst = 0.0
    failures = 0
    failing: List[int] = []
    for i in range(cases):
        d = _random_dist(rng)
        a = float(rng.uniform(1.0 + 1e-6, 4.0))
        x = float(rng.uniform(0.0, 10.0))
        res = check_rsd(d, a, x)
        worst = max(worst, res.ratio)
        if not res.passed:
            failures += 1
            failing.append(i)
    return SweepReport("rsd", cases, failures, worst, failing)


def sweep_exp_inequality(seed: int, cases: int = 10_000) -> SweepReport:
    rng = np.random.default_rng(seed)
    worst = 0.0
    failures = 0
    failing: List[int] = []
    for i in range(cases):
        d = _random_dist(rng)
        lam = float(rng.uniform(0.0, 1.0))
        t = float(rng.uniform(0.0, 20.0))
        res = check_exp_inequality(d, lam, t)
        worst = max(worst, res.ratio)
        if not res.passed:
            failures += 1
            failing.append(i)
    return SweepReport("exp", cases, failures, worst, failing)


def sweep_moment_sum(seed: int, cases: int = 2_000) -> SweepReport:
    rng = np.random.default_rng(seed)
    worst = 0.0
    failures = 0
    failing: List[int] = []
    for i in range(cases):
        k = int(rng.integers(1, 5))
        dists = [_random_dist(rng, max_atoms=4) for _ in range(k)]
        a = float(rng.uniform(1.0, 2.0))
        res = check_moment_sum(dists, a)
        worst = max(worst, res.ratio)
        if not res.passed:
            failures += 1
            failing.append(i)
    return SweepReport("moment_sum", cases, failures, worst, failing)


def sweep_von_bahr_esseen(seed: int, cases: int = 2_000) -> SweepReport:
    rng = np.random.default_rng(seed)
    worst = 0.0
    failures = 0
    failing: List[int] = []
    for i in range(cases):
        k = int(rng.integers(1, 5))
        dists = [_random_dist(rng, centered=True, max_atoms=4)
                 for _ in range(k)]
        a = float(rng.uniform(1.0, 2.0))
        res = check_von_bahr_esseen(dists, a)
        worst = max(worst, res.ratio)
        if not res.passed:
            failures += 1
            failing.append(i)
    return SweepReport("von_bahr_esseen", cases, failures, worst, failing)


def sequence_suite() -> List[SequenceCheck]:
    """The standard battery of extremal-recursion boundedness checks."""
    checks = []
    for a in (1.5, 2.0):
        checks.append(check_sequence_lemma(
            a, 0.5, lambda n: 0.0, SequenceBranch.UPPER))
        checks.append(check_sequence_lemma(
            a, 0.5, lambda n: 1.0 / n, SequenceBranch.UPPER))
        checks.append(check_sequence_lemma(
            a, 0.5, lambda n: 1.0 / n, SequenceBranch.LOWER))
        checks.append(check_sequence_lemma(
            a, 0.5, lambda n: 5.0 / n, SequenceBranch.LOWER))
    return checks


def run_suite(seed: int = 20_260_401, cases: int = 10_000) -> dict:
    """Run every check family; JSON-ready report with extremal ratios."""
    sweeps = [
        sweep_rsd(seed, cases),
        sweep_exp_inequality(seed + 1, cases),
        sweep_moment_sum(seed + 2, max(cases // 5, 100)),
        sweep_von_bahr_esseen(seed + 3, max(cases // 5, 100)),
    ]
    seqs = sequence_suite()
    all_passed = all(s.passed for s in sweeps) and all(c.passed for c in seqs)
    return {
        "passed": all_passed,
        "seed": seed,
        "sweeps": [
            {
                "name": s.name,
                "cases": s.cases,
                "failures": s.failures,
                "worst_ratio": s.worst_ratio,
                "failing_seeds": s.failing_seeds[:20],
            }
            for s in sweeps
        ],
        "sequence_checks": [
            {
                "name": c.name,
                "passed": c.passed,
                "constant_spread": c.spread,
                "constants": [f.constant for f in c.fits],
            }
            for c in seqs
        ],
    }
