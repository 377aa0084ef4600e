"""Regime exponents and constants of the A-law, with the regime classifier.

Everything is computed from the exact finite-sum moment transform
E(A^t) = sum_i p_i v_i^t, worked in log space throughout:

    psi(t)   = log E(A^t)                 (convex, psi(0) = 0)
    p        = inf over t in [0,1] of E(A^t)
    rho(r)   = inf over t >= 0 of r^{-t} E(A^t)   (Chernoff transform)
    r_lo     = exp E(log A); r_hi = inf { r : rho(r) <= 1/b }
    q        = sup over r in [r_lo, r_hi] of r * rho(r)
    kappa    = inf { t > 1 : E(A^t) = 1/b }   (inf of the empty set = inf)
    nu       = 1 - 1/min(kappa, 2)

The Chernoff infimum is attained where the tilted mean psi'(t) equals log r,
so the curve r(t) = exp(psi'(t)) parametrizes rho and r*rho(r) without inner
optimization; the q supremum runs a dense grid over t plus local refinement.

Regimes: transient when p > 1/b, positive recurrent when p < 1/b, and at
p = 1/b null recurrent subdiffusive when psi'(1) < 0 (the psi'(1) >= 0
critical case is reported as CRITICAL_OTHER and not analysed further).
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .environment import EnvSpec
from .errors import KappaOutOfRangeError, NegativeTError, NonpositiveRError

INFINITE = math.inf

_CRITICAL_TOL = 1e-9
_KAPPA_T_CAP = 512.0
_Q_GRID_POINTS = 10_001


class Regime(enum.Enum):
    TRANSIENT = "TRANSIENT"
    POSITIVE_RECURRENT = "POSITIVE_RECURRENT"
    NULL_RECURRENT_SUBDIFFUSIVE = "NULL_RECURRENT_SUBDIFFUSIVE"
    CRITICAL_OTHER = "CRITICAL_OTHER"


def _logs(spec: EnvSpec):
    v = np.asarray(spec.values, dtype=np.float64)
    p = np.asarray(spec.probs, dtype=np.float64)
    return np.log(p), np.log(v)


def moment_transform(spec: EnvSpec, t: float) -> float:
    """E(A^t) as an exact finite sum; requires t >= 0."""
    if t < 0:
        raise NegativeTError(f"t must be >= 0, got {t}")
    logp, logv = _logs(spec)
    return float(np.exp(_logsumexp(logp + t * logv)))


def _logsumexp(x: np.ndarray) -> float:
    m = np.max(x)
    if m == -np.inf:
        return -np.inf
    return float(m + np.log(np.sum(np.exp(x - m))))


def psi(spec: EnvSpec, t: float) -> float:
    """log E(A^t), stable for arbitrarily large t."""
    if t < 0:
        raise NegativeTError(f"t must be >= 0, got {t}")
    logp, logv = _logs(spec)
    return _logsumexp(logp + t * logv)


def psi_prime(spec: EnvSpec, t: float) -> float:
    """d/dt log E(A^t): the mean of log A under the t-tilted law."""
    logp, logv = _logs(spec)
    x = logp + t * logv
    w = np.exp(x - np.max(x))
    return float(np.dot(w, logv) / np.sum(w))


def psi_prime_at_one(spec: EnvSpec) -> float:
    """psi'(1) = E(A log A) / E(A), the criticality drift."""
    return psi_prime(spec, 1.0)


def compute_p(spec: EnvSpec) -> float:
    """inf over t in [0,1] of E(A^t), exact to ~1e-15.

    psi is convex so psi' is increasing: the infimum sits at an endpoint or
    at the unique root of psi' in (0,1), found by bisection.
    """
    if psi_prime(spec, 0.0) >= 0.0:
        return 1.0
    if psi_prime(spec, 1.0) <= 0.0:
        return moment_transform(spec, 1.0)
    lo, hi = 0.0, 1.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if psi_prime(spec, mid) < 0.0:
            lo = mid
        else:
            hi = mid
        if hi - lo < 1e-15:
            break
    return float(np.exp(psi(spec, 0.5 * (lo + hi))))


def r_lower(spec: EnvSpec) -> float:
    """r_lo with log r_lo = E(log A)."""
    logp, logv = _logs(spec)
    return float(np.exp(np.dot(np.exp(logp), logv)))


def theta_ess_sup(spec: EnvSpec) -> float:
    """Essential supremum of A (largest atom value)."""
    return max(spec.values)


def _prob_at_top(spec: EnvSpec) -> float:
    theta = theta_ess_sup(spec)
    return sum(p for v, p in spec.atoms if v == theta)


def rho(spec: EnvSpec, r: float) -> float:
    """Chernoff transform rho(r) = inf over t >= 0 of r^{-t} E(A^t).

    Equals 1 on (0, r_lo], P(A = theta) at r = theta, 0 beyond theta, and is
    continuous strictly decreasing in between.  The interior infimum solves
    psi'(t) = log r (psi' is increasing), bracketed by doubling and bisected.
    """
    if not (r > 0.0) or not np.isfinite(r):
        raise NonpositiveRError(f"r must be a positive real, got {r}")
    r_lo = r_lower(spec)
    if r <= r_lo:
        return 1.0
    theta = theta_ess_sup(spec)
    if r >= theta * (1.0 - 1e-14):
        if r <= theta * (1.0 + 1e-14):
            return _prob_at_top(spec)
        return 0.0
    log_r = math.log(r)
    t_hi = 1.0
    while psi_prime(spec, t_hi) < log_r:
        t_hi *= 2.0
        if t_hi > 2.0 ** 70:  # psi' -> log(theta) > log r, cannot happen
            break
    lo, hi = 0.0, t_hi
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if psi_prime(spec, mid) < log_r:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 1e-13 * max(1.0, hi):
            break
    t_star = 0.5 * (lo + hi)
    return float(np.exp(psi(spec, t_star) - t_star * log_r))


@dataclass(frozen=True)
class RBounds:
    """The r-interval of the q supremum plus the essential sup of A.

    ``r_hi_capped`` marks laws whose top atom is heavy enough that rho never
    drops to 1/b on (0, theta]; r_hi is then theta by the infimum convention.
    ``t_hi`` is the tilt parameter at r_hi (inf when capped), reused by
    :func:`compute_q`.
    """

    r_lo: float
    r_hi: float
    theta_ess: float
    r_hi_capped: bool
    t_hi: float


def compute_r_bounds(spec: EnvSpec) -> RBounds:
    """r_lo exactly, r_hi by bisection of the monotone Chernoff transform.

    Along the parametric curve r(t) = exp(psi'(t)) the value log rho(r(t)) =
    psi(t) - t psi'(t) is non-increasing, so r_hi solves psi(t) - t psi'(t)
    = -log b for the smallest such t.
    """
    r_lo = r_lower(spec)
    theta = theta_ess_sup(spec)
    log_inv_b = -math.log(spec.b)
    if len(set(spec.values)) == 1:
        return RBounds(r_lo, theta, theta, True, math.inf)
    p_top = _prob_at_top(spec)
    if p_top > 1.0 / spec.b:
        return RBounds(r_lo, theta, theta, True, math.inf)

    def h(t: float) -> float:
        return psi(spec, t) - t * psi_prime(spec, t) - log_inv_b

    t_hi = 1.0
    while h(t_hi) > 0.0:
        t_hi *= 2.0
        if t_hi > 2.0 ** 70:
            # rho(theta) = 1/b exactly: the infimum is theta itself
            return RBounds(r_lo, theta, theta, False, math.inf)
    lo, hi = 0.0, t_hi
    for _ in range(300):
        if np.exp(psi_prime(spec, hi)) - np.exp(psi_prime(spec, lo)) <= 1e-12:
            break
        mid = 0.5 * (lo + hi)
        if h(mid) > 0.0:
            lo = mid
        else:
            hi = mid
    t_bar = 0.5 * (lo + hi)
    r_hi = float(np.exp(psi_prime(spec, t_bar)))
    return RBounds(r_lo, min(r_hi, theta), theta, False, t_bar)


def compute_q(spec: EnvSpec, bounds: Optional[RBounds] = None) -> float:
    """sup over r in [r_lo, r_hi] of r * rho(r), to ~1e-10.

    Parametrized by the tilt t: r(t) = exp(psi'(t)) sweeps [r_lo, r_hi] as t
    runs over [0, t_hi], where r*rho(r) = exp(psi(t) + (1-t) psi'(t)).  A
    dense grid locates the supremum (the map is not known to be unimodal)
    and golden-section refines it; both endpoints enter as candidates.
    """
    if bounds is None:
        bounds = compute_r_bounds(spec)
    if len(set(spec.values)) == 1:
        return bounds.theta_ess
    logp, logv = _logs(spec)

    def phi_vec(ts: np.ndarray) -> np.ndarray:
        x = logp[None, :] + np.outer(ts, logv)
        m = x.max(axis=1)
        w = np.exp(x - m[:, None])
        sw = w.sum(axis=1)
        psi_v = m + np.log(sw)
        dpsi_v = (w @ logv) / sw
        return psi_v + (1.0 - ts) * dpsi_v

    # Along the curve, d/dt log(r * rho(r(t))) = (1 - t) * psi''(t): the
    # supremum sits at t <= 1 or at the right endpoint (covered below), so a
    # grid over [0, min(t_hi, 64)] always brackets it.
    if math.isfinite(bounds.t_hi):
        t_top = min(bounds.t_hi, 64.0)
    else:
        t_top = 64.0
    ts = np.linspace(0.0, t_top, _Q_GRID_POINTS)
    vals = phi_vec(ts)
    k = int(np.argmax(vals))
    lo = ts[max(k - 1, 0)]
    hi = ts[min(k + 1, len(ts) - 1)]

    def phi(t: float) -> float:
        return psi(spec, t) + (1.0 - t) * psi_prime(spec, t)

    # golden-section maximization on the bracket
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    a, bb = lo, hi
    c = bb - invphi * (bb - a)
    d = a + invphi * (bb - a)
    fc, fd = phi(c), phi(d)
    for _ in range(120):
        if fc > fd:
            bb, d, fd = d, c, fc
            c = bb - invphi * (bb - a)
            fc = phi(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (bb - a)
            fd = phi(d)
        if bb - a < 1e-13 * max(1.0, bb):
            break
    best = max(float(np.max(vals)), fc, fd)
    q = float(np.exp(best))
    endpoint_lo = bounds.r_lo  # rho = 1 there
    endpoint_hi = bounds.r_hi * rho(spec, bounds.r_hi)
    return max(q, endpoint_lo, endpoint_hi)


def compute_kappa(spec: EnvSpec) -> float:
    """inf of t > 1 with E(A^t) = 1/b; INFINITE when the set is empty.

    When ess sup(A) <= 1 the transform never meets 1/b beyond its value at
    t = 1, so kappa is infinite.  Otherwise psi is convex with psi(t) -> inf,
    and the first crossing is bisected on the decreasing branch when
    psi(1) > -log b, else on the increasing branch past the minimizer.
    Returns INFINITE as well if no crossing occurs below t = 512.
    """
    target = -math.log(spec.b)
    if theta_ess_sup(spec) <= 1.0:
        return INFINITE

    def g(t: float) -> float:
        return psi(spec, t) - target

    # minimizer of psi on [1, cap]
    if psi_prime(spec, 1.0) >= 0.0:
        t_min = 1.0
    elif psi_prime(spec, _KAPPA_T_CAP) <= 0.0:
        t_min = _KAPPA_T_CAP
    else:
        lo, hi = 1.0, _KAPPA_T_CAP
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            if psi_prime(spec, mid) < 0.0:
                lo = mid
            else:
                hi = mid
            if hi - lo < 1e-13 * hi:
                break
        t_min = 0.5 * (lo + hi)
    if g(t_min) > 0.0:
        return INFINITE
    if g(1.0) > 1e-12:
        lo, hi = 1.0, t_min       # decreasing branch: g(lo) > 0 >= g(hi)
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            if g(mid) > 0.0:
                lo = mid
            else:
                hi = mid
            if hi - lo < 1e-11:
                break
        return 0.5 * (lo + hi)
    # increasing branch: first t past t_min where g crosses zero
    hi = max(t_min, 1.0)
    step = 0.5
    while g(hi) <= 0.0:
        hi += step
        step *= 2.0
        if hi > _KAPPA_T_CAP:
            return INFINITE
    lo = max(t_min, hi - step / 2.0)
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if g(mid) <= 0.0:
            lo = mid
        else:
            hi = mid
        if hi - lo < 1e-11:
            break
    return 0.5 * (lo + hi)


def compute_nu(kappa: float) -> float:
    """nu = 1 - 1/min(kappa, 2): (kappa-1)/kappa on (1,2], 1/2 past 2."""
    if not kappa > 1.0:
        raise KappaOutOfRangeError(f"kappa must be > 1, got {kappa}")
    return 1.0 - 1.0 / min(kappa, 2.0)


@dataclass(frozen=True)
class ExponentReport:
    """All regime exponents and constants of one environment law."""

    p: float
    q: float
    kappa: float                 # math.inf encodes the infinite case
    nu: Optional[float]
    psi1_prime: float
    r_lo: float
    r_hi: float
    theta_ess: float
    regime: Regime
    r_hi_capped: bool = False

    def to_json_dict(self) -> dict:
        out = {
            "p": self.p,
            "q": self.q,
            "kappa": "inf" if math.isinf(self.kappa) else self.kappa,
            "nu": self.nu,
            "psi1_prime": self.psi1_prime,
            "r_lo": self.r_lo,
            "r_hi": self.r_hi,
            "theta_ess": self.theta_ess,
            "regime": self.regime.value,
            "r_hi_capped": self.r_hi_capped,
        }
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), sort_keys=True)


def classify_regime(spec: EnvSpec, tol: float = _CRITICAL_TOL) -> ExponentReport:
    """Classify the walk regime from the A-law and assemble the full report.

    p > 1/b + tol: transient; p < 1/b - tol: positive recurrent; otherwise
    critical, split on the sign of psi'(1).  Specs built by
    :func:`~rwtree.environment.make_critical_spec` are treated as critical
    regardless of float noise in p.
    """
    p = compute_p(spec)
    bounds = compute_r_bounds(spec)
    q = compute_q(spec, bounds)
    kappa = compute_kappa(spec)
    psi1 = psi_prime_at_one(spec)
    inv_b = 1.0 / spec.b
    critical = spec.exact_critical or abs(p - inv_b) <= tol
    if not critical and p > inv_b:
        regime = Regime.TRANSIENT
    elif not critical:
        regime = Regime.POSITIVE_RECURRENT
    elif psi1 < 0.0:
        regime = Regime.NULL_RECURRENT_SUBDIFFUSIVE
    else:
        regime = Regime.CRITICAL_OTHER
    nu = compute_nu(kappa) if kappa > 1.0 else None
    return ExponentReport(
        p=p,
        q=q,
        kappa=kappa,
        nu=nu,
        psi1_prime=psi1,
        r_lo=bounds.r_lo,
        r_hi=bounds.r_hi,
        theta_ess=bounds.theta_ess,
        regime=regime,
        r_hi_capped=bounds.r_hi_capped,
    )
