"""Floating-point evaluation of the q-special functions.

Provides the finite and infinite q-Pochhammer symbols, the theta function

    theta_q(Q) = sum_{d in Z} q^(d(d-1)/2) Q^d,        0 < |q| < 1,

the multiplicative characters e_{q,lam}(Q) = theta_q(Q)/theta_q(lam*Q)
solving f(qQ) = lam f(Q), the additive q-logarithm
qlog(Q) = -Q theta'_q(Q)/theta_q(Q) solving f(qQ) = f(Q) + 1, and geometric
predicates for q-spirals.

theta is evaluated through one of two convergent representations: the
defining bilateral sum (fast once |q| is moderate), or its Poisson-dual
form

    theta_q(Q) = sqrt(2 pi / lam) * sum_k exp((b - 2 pi i k)^2 / (2 lam)),

with lam = -log q and b = log Q + lam/2, whose dual terms decay like
exp(-2 pi^2 k^2 / lam).  The dual form stays accurate as q -> 1, where the
direct sum suffers catastrophic float cancellation for complex Q.  All
ratio-type functions work on log values so that magnitudes of order
exp(1/(1-q)) never materialize.

Sign convention for the q -> 1 limits: with theta as above, the limit laws
hold with plain arguments on the right half of the cut plane,

    (q-1) qlog(Q)        -> log Q        off the spiral (-1) q0^R,
    e_{q, q^mu}(Q)        -> Q^mu        off the spiral (-1) q0^R,

which is the convention used by every confluence call site in this package.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .rings import QonfError

TWO_PI = 2.0 * math.pi
_MODULAR_THRESHOLD = 0.7  # use the Poisson-dual theta sum for -Re log q below this


class PoleProximityError(QonfError):
    """Evaluation point is within tolerance of a pole spiral."""


class DomainError(QonfError):
    """Evaluation point is outside the function's domain."""


@dataclass(frozen=True)
class QValue:
    """Deformation parameter, restricted to the open punctured unit disk."""

    q: complex

    def __post_init__(self):
        if not 0 < abs(self.q) < 1:
            raise DomainError(f"need 0 < |q| < 1, got |q| = {abs(self.q)}")


@dataclass(frozen=True)
class QPath:
    """The path q(t) = q0**t, t in (0, 1], along which q -> 1 limits are taken."""

    q0: complex
    t: float

    def __post_init__(self):
        if not 0 < abs(self.q0) < 1:
            raise DomainError("need 0 < |q0| < 1")
        if not 0 < self.t <= 1:
            raise DomainError("need t in (0, 1]")

    @property
    def q(self) -> complex:
        return self.q0**self.t


def _as_q(q) -> complex:
    if isinstance(q, QValue):
        return q.q
    q = complex(q)
    if not 0 < abs(q) < 1:
        raise DomainError(f"need 0 < |q| < 1, got {q}")
    return q


# ---------------------------------------------------------------- Pochhammer


def qpoch_finite(a: complex, q, d: int) -> complex:
    """Finite q-Pochhammer symbol prod_{r=0}^{d-1} (1 - q^r a); empty product is 1."""
    q = _as_q(q)
    if d < 0:
        raise ValueError("d must be >= 0")
    out = 1.0 + 0j
    p = 1.0 + 0j
    for _ in range(d):
        out *= 1.0 - p * a
        p *= q
    return out


def _qpoch_tail_length(a: complex, q: complex, tol: float) -> int:
    # smallest R with |q^(R+1) a| < tol (1 - |q|); the remaining log-tail is < tol
    if a == 0:
        return 0
    bound = tol * (1.0 - abs(q))
    if abs(a) < bound:
        return 0
    return int(math.ceil((math.log(bound) - math.log(abs(a))) / math.log(abs(q))))


def log_qpoch_infinite(a: complex, q, tol: float = 1e-12) -> complex:
    """log of (a;q)_infinity, summed as Σ log(1 - q^r a) with a geometric tail bound.

    Returns -inf when some factor vanishes to machine precision.  The branch
    is the sum of principal logs of the factors; only differences of returned
    values are exponentiated by callers.
    """
    q = _as_q(q)
    if tol <= 0:
        raise ValueError("tol must be positive")
    if a == 0:
        return 0j
    R = _qpoch_tail_length(a, q, tol)
    total = 0j
    log_q, log_a = cmath.log(q), cmath.log(a)
    chunk = 1 << 21
    for r0 in range(0, R + 1, chunk):
        r = np.arange(r0, min(r0 + chunk, R + 1), dtype=float)
        x = -np.exp(r * log_q + log_a)
        small = np.abs(x) < 1e-4
        vals = np.empty_like(x)
        xs = x[small]
        vals[small] = xs - xs * xs / 2 + xs**3 / 3
        big = 1.0 + x[~small]
        if np.any(big == 0):
            return complex("-inf")
        vals[~small] = np.log(big)
        total += complex(vals.sum())
    return total


def qpoch_infinite(a: complex, q, tol: float = 1e-12) -> complex:
    """(a;q)_infinity as a truncated product, within multiplicative error exp(tol)."""
    lg = log_qpoch_infinite(a, q, tol)
    if lg == complex("-inf"):
        return 0j
    return cmath.exp(lg)


# ---------------------------------------------------------------- theta


def _log_theta_direct(q: complex, Q: complex):
    """Window sum of the defining series; returns (log_value, log_max_term)."""
    lq, lQ = cmath.log(q), cmath.log(Q)
    center = 0.5 - lQ.real / lq.real
    half = max(40.0, math.sqrt(90.0 / abs(lq.real)))
    d = np.arange(math.floor(center - half), math.ceil(center + half) + 1, dtype=float)
    expo = (d * (d - 1) / 2) * lq + d * lQ
    pivot = expo.real.max()
    weights = np.exp(expo - pivot)
    s = complex(weights.sum())
    ds = complex((d * weights).sum())
    return pivot + cmath.log(s), pivot, ds / s if s != 0 else complex("nan")


def _log_theta_modular(q: complex, Q: complex):
    """Poisson-dual sum; returns (log_value, log_scale, ratio for the q-log)."""
    lam = -cmath.log(q)  # Re lam > 0
    b = cmath.log(Q) + lam / 2
    ks = np.arange(-6, 7, dtype=float)
    expo = -(TWO_PI * math.pi) * ks * ks / lam - (TWO_PI * 1j) * ks * b / lam
    pivot = expo.real.max()
    weights = np.exp(expo - pivot)
    s = complex(weights.sum())
    ks_sum = complex((ks * weights).sum())
    log_value = 0.5 * cmath.log(TWO_PI / lam) + b * b / (2 * lam) + pivot + cmath.log(s)
    # -Q theta'/theta = -(b/lam) + (2 pi i/lam) * <k>
    ratio = -(b / lam) + (TWO_PI * 1j / lam) * (ks_sum / s)
    scale = (0.5 * cmath.log(TWO_PI / lam) + b * b / (2 * lam)).real + pivot
    return log_value, scale, ratio


def _theta_parts(q: complex, Q: complex):
    if (-cmath.log(q)).real < _MODULAR_THRESHOLD:
        return _log_theta_modular(q, Q)
    log_value, pivot, mean_d = _log_theta_direct(q, Q)
    return log_value, pivot, -mean_d  # qlog ratio = -<d> in the direct sum


def log_theta(q, Q: complex) -> complex:
    """A complex logarithm of theta_q(Q); exponentials of differences are exact."""
    q = _as_q(q)
    if Q == 0:
        raise DomainError("theta has an essential singularity at Q = 0")
    return _theta_parts(q, Q)[0]


def theta(q, Q: complex, tol: float = 1e-12) -> complex:
    """theta_q(Q) = sum_{d in Z} q^(d(d-1)/2) Q^d."""
    q = _as_q(q)
    if Q == 0:
        raise DomainError("theta has an essential singularity at Q = 0")
    log_value, _, _ = _theta_parts(q, Q)
    if log_value.real > 700:
        raise QonfError("theta magnitude overflows double precision; use log_theta")
    return cmath.exp(log_value)


def theta_residual_scale(q, Q: complex) -> float:
    """|theta| relative to its dominant term: ~1 generically, ~0 at the zeros -q^Z."""
    q = _as_q(q)
    log_value, scale, _ = _theta_parts(q, Q)
    return math.exp(log_value.real - scale)


def jacobi_triple_product_check(q, Q: complex, tol: float = 1e-12) -> float:
    """Relative residual of theta_q(Q) = (q;q)_inf (-Q;q)_inf (-q/Q;q)_inf."""
    q = _as_q(q)
    if Q == 0:
        raise DomainError("Q must be nonzero")
    log_value, scale, _ = _theta_parts(q, Q)
    lhs = cmath.exp(log_value - scale)
    rhs_log = (
        log_qpoch_infinite(q, q, tol)
        + log_qpoch_infinite(-Q, q, tol)
        + log_qpoch_infinite(-q / Q, q, tol)
    )
    rhs = 0j if rhs_log == complex("-inf") else cmath.exp(rhs_log - scale)
    if abs(lhs) < 1e-12 and abs(rhs) < 1e-12:
        return 0.0
    return abs(lhs - rhs) / max(abs(lhs), abs(rhs))


# ---------------------------------------------------------------- characters and q-log


def _near_pole(q: complex, x: complex, tol: float) -> bool:
    """True when x is within relative tol of the zero set -q^Z of theta."""
    if x == 0:
        return True
    k0 = (math.log(abs(x)) / math.log(abs(q)))
    for k in range(math.floor(k0) - 2, math.floor(k0) + 3):
        p = q**k
        if abs(x + p) < tol * abs(p):
            return True
    return False


def q_character(lam: complex, q, Q: complex, pole_tol: float = 1e-8) -> complex:
    """e_{q,lam}(Q) = theta_q(Q)/theta_q(lam Q): solves f(qQ) = lam f(Q)."""
    q = _as_q(q)
    if lam == 0 or Q == 0:
        raise DomainError("lam and Q must be nonzero")
    if _near_pole(q, lam * Q, pole_tol):
        raise PoleProximityError(f"lam*Q = {lam * Q} is within {pole_tol} of the pole spiral")
    return cmath.exp(log_theta(q, Q) - log_theta(q, lam * Q))


def q_log(q, Q: complex, pole_tol: float = 1e-8) -> complex:
    """qlog(Q) = -Q theta'_q(Q)/theta_q(Q): solves f(qQ) = f(Q) + 1."""
    q = _as_q(q)
    if Q == 0:
        raise DomainError("Q must be nonzero")
    if _near_pole(q, Q, pole_tol):
        raise PoleProximityError(f"Q = {Q} is within {pole_tol} of the pole spiral")
    return _theta_parts(q, Q)[2]


# ---------------------------------------------------------------- spirals and branches


def spiral_contains(nu: complex, q0: complex, Q: complex, tol: float = 1e-8) -> bool:
    """Whether Q lies on the continuous spiral nu * q0^R (within angular tol)."""
    if nu == 0 or Q == 0:
        raise DomainError("nu and Q must be nonzero")
    if not 0 < abs(q0) < 1:
        raise DomainError("need 0 < |q0| < 1")
    w = Q / nu
    s = math.log(abs(w)) / math.log(abs(q0))
    residual = cmath.phase(w) - s * cmath.phase(q0)
    residual = (residual + math.pi) % TWO_PI - math.pi
    return abs(residual) < tol


def spiral_log(w: complex, q0: complex) -> complex:
    """Logarithm with branch cut along the spiral (-1) q0^R.

    For q0 on (0, 1) this is the principal logarithm; in general the cut is
    rotated onto the spiral through -1, so that the branch is continuous on
    the complement used by the confluence limit theorems.
    """
    if w == 0:
        raise DomainError("log of zero")
    s = math.log(abs(w)) / math.log(abs(q0))
    cut_angle = math.pi + s * cmath.phase(q0)
    base = cmath.phase(w)
    angle = cut_angle - ((cut_angle - base) % TWO_PI)
    # representative in (cut_angle - 2 pi, cut_angle]
    return complex(math.log(abs(w)), angle)


def char_power(base: complex, exponent: complex, q0: complex) -> complex:
    """base**exponent using the spiral-cut logarithm of :func:`spiral_log`."""
    return cmath.exp(exponent * spiral_log(base, q0))
