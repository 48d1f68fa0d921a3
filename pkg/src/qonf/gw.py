"""Rational curve counts, WDVV, and the J-functions of projective space.

Classical side: the degree-d counts N_d of rational plane curves through
3d - 1 points, the genus-zero potential of the plane they assemble into, and
the reduced associativity (WDVV) identity that pins the recursion.

Deformed side: the q-deformed J-function of P^N with coefficients in the
truncated ring C[eps]/(eps^(N+1)), eps = 1 - P^(-1),

    J(q, Q)  = sum_d Q^d / (q P^(-1); q)_d^(N+1),
    Jmod     = (1 - eps)^L * J,          L the q-logarithm symbol,

its classical counterpart with eps = H (the hyperplane class),

    Jcoh(z, Q) = Q^(H/z) sum_d Q^d / prod_(r=1..d) (H + r z)^(N+1),

their functional equations, and the exact coefficientwise verification that
the scaled pullback Q -> ((1-q)/z)^(N+1) Q of Jmod degenerates at q -> 1 to
Jcoh under the basis identification eps^i -> H^i.  The q-constant matrix
realizing the degeneration is never materialized: only its effect -- the
((1-q)/z)-power rescaling and the substitution
((q-1)/z)^a binom(L, a) -> (1/a!)(log Q / z)^a -- is implemented, since that
is all the comparison needs.

z is tracked by exponent bookkeeping: each stored monomial Q^d eps^i L^m
carries the implied factor z^-(d(N+1)+i), which is homogeneous on both sides.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction

from .confluence import observed_order, richardson_limit
from .qspecial import DomainError, q_log, spiral_contains, spiral_log
from .rings import (
    LimitUndefinedError,
    LogSeries,
    LPoly,
    NilpotentElement,
    RationalFunctionQ,
    nil_binomial_power,
    nil_inv,
    nil_mul,
)

R = RationalFunctionQ


# ---------------------------------------------------------------- curve counts


@dataclass(frozen=True)
class NdTable:
    """Degree-d counts of rational plane curves through 3d - 1 points."""

    values: tuple  # values[d-1] = N_d

    def __getitem__(self, d: int) -> int:
        return self.values[d - 1]

    @property
    def dmax(self) -> int:
        return len(self.values)

    def to_csv(self) -> str:
        lines = ["d,N_d"]
        lines += [f"{d},{self[d]}" for d in range(1, self.dmax + 1)]
        return "\n".join(lines) + "\n"


def nd_recursion(dmax: int) -> NdTable:
    """The quadratic recursion seeded by N_1 = 1:

    N_d = sum_(d1+d2=d) N_d1 N_d2 (C(3d-4, 3d1-2) d1^2 d2^2 - C(3d-4, 3d1-1) d1^3 d2).
    """
    if dmax < 1:
        raise ValueError("dmax must be >= 1")
    values = [Fraction(1)]
    for d in range(2, dmax + 1):
        acc = Fraction(0)
        for d1 in range(1, d):
            d2 = d - d1
            acc += (
                values[d1 - 1]
                * values[d2 - 1]
                * (
                    math.comb(3 * d - 4, 3 * d1 - 2) * d1**2 * d2**2
                    - math.comb(3 * d - 4, 3 * d1 - 1) * d1**3 * d2
                )
            )
        values.append(acc)
    out = []
    for d, v in enumerate(values, start=1):
        if v.denominator != 1 or v <= 0:
            raise ArithmeticError(f"N_{d} = {v} is not a positive integer")
        out.append(int(v))
    return NdTable(tuple(out))


# ---------------------------------------------------------------- potential and WDVV


class PotentialP2:
    """Genus-zero potential of the plane, truncated at curve degree <= order.

    Monomials are keyed (a0, a1, e, a2) for t0^a0 t1^a1 E^e t2^a2, with
    E = exp(t1) tracked as an inert monomial (the Novikov variable is set
    to 1, which loses nothing since E carries the degree).
    """

    def __init__(self, terms: dict):
        self.terms = {k: v for k, v in terms.items() if v != 0}

    def coefficient(self, a0=0, a1=0, e=0, a2=0) -> Fraction:
        return self.terms.get((a0, a1, e, a2), Fraction(0))

    def derivative(self, var: int) -> "PotentialP2":
        out: dict = {}
        for (a0, a1, e, a2), c in self.terms.items():
            if var == 0 and a0:
                key = (a0 - 1, a1, e, a2)
                out[key] = out.get(key, Fraction(0)) + c * a0
            elif var == 1:
                if a1:
                    key = (a0, a1 - 1, e, a2)
                    out[key] = out.get(key, Fraction(0)) + c * a1
                if e:
                    key = (a0, a1, e, a2)
                    out[key] = out.get(key, Fraction(0)) + c * e
            elif var == 2 and a2:
                key = (a0, a1, e, a2 - 1)
                out[key] = out.get(key, Fraction(0)) + c * a2
        return PotentialP2(out)

    def multiply(self, other: "PotentialP2", e_max: int) -> "PotentialP2":
        out: dict = {}
        for (a0, a1, e, a2), c in self.terms.items():
            for (b0, b1, f, b2), d in other.terms.items():
                if e + f > e_max:
                    continue
                key = (a0 + b0, a1 + b1, e + f, a2 + b2)
                out[key] = out.get(key, Fraction(0)) + c * d
        return PotentialP2(out)

    def add(self, other: "PotentialP2") -> "PotentialP2":
        out = dict(self.terms)
        for k, v in other.terms.items():
            out[k] = out.get(k, Fraction(0)) + v
        return PotentialP2(out)

    def subtract(self, other: "PotentialP2") -> "PotentialP2":
        out = dict(self.terms)
        for k, v in other.terms.items():
            out[k] = out.get(k, Fraction(0)) - v
        return PotentialP2(out)

    def truncate_e(self, e_max: int) -> "PotentialP2":
        return PotentialP2({k: v for k, v in self.terms.items() if k[2] <= e_max})

    @property
    def is_zero(self) -> bool:
        return not self.terms

    def min_e_degree(self):
        return min((k[2] for k in self.terms), default=None)


def gw_potential_p2(order: int, nd: NdTable | None = None) -> PotentialP2:
    """(1/2)(t0 t1^2 + t0^2 t2) + sum_(d>=1) N_d E^d t2^(3d-1)/(3d-1)!."""
    if order < 1:
        raise ValueError("order must be >= 1")
    nd = nd or nd_recursion(order)
    terms = {
        (1, 2, 0, 0): Fraction(1, 2),
        (2, 0, 0, 1): Fraction(1, 2),
    }
    for d in range(1, order + 1):
        terms[(0, 0, d, 3 * d - 1)] = Fraction(nd[d], math.factorial(3 * d - 1))
    return PotentialP2(terms)


def wdvv_residual_p2(order: int, nd: NdTable | None = None) -> PotentialP2:
    """F_222 + F_111 F_122 - (F_112)^2, exact, through E^order.

    Identically zero when the counts come from :func:`nd_recursion`;
    perturbing N_d breaks it first at E-degree max(d, 2).
    """
    F = gw_potential_p2(order, nd)
    d1, d2 = F.derivative(1), F.derivative(2)
    f222 = d2.derivative(2).derivative(2)
    f111 = d1.derivative(1).derivative(1)
    f122 = d2.derivative(2).derivative(1)
    f112 = d1.derivative(1).derivative(2)
    residual = f222.add(f111.multiply(f122, order)).subtract(f112.multiply(f112, order))
    return residual.truncate_e(order)


def perturbed_nd(base: NdTable, d: int, value: int) -> NdTable:
    vals = list(base.values)
    vals[d - 1] = value
    return NdTable(tuple(vals))


# ---------------------------------------------------------------- the q-deformed J


def qpoch_exact(d: int) -> RationalFunctionQ:
    """(q;q)_d as an exact rational function."""
    out = R.one()
    for r in range(1, d + 1):
        out = out * R.one_minus_q_pow(r)
    return out


@dataclass(frozen=True)
class JFunctionK:
    """coeffs[d][i]: exact coefficient of Q^d eps^i, eps = 1 - P^(-1)."""

    N: int
    D: int
    coeffs: tuple
    basis: str = "1-Pinv"

    def coefficient(self, d: int, i: int) -> RationalFunctionQ:
        return self.coeffs[d][i]


def jk_series(N: int, D: int) -> JFunctionK:
    """Oracle form: invert prod_(r=1..d) ((1-q^r) + q^r eps) in the truncated ring."""
    if N < 0 or D < 0:
        raise ValueError("need N >= 0 and D >= 0")
    one = R.one()
    rows = [tuple([one] + [R.zero()] * N)]
    prod = NilpotentElement.from_scalar(N, one)
    for d in range(1, D + 1):
        factor = NilpotentElement(
            N,
            [R.one_minus_q_pow(d)]
            + ([R.q_power(d)] if N >= 1 else [])
            + [R.zero()] * max(0, N - 1),
        )
        prod = nil_mul(prod, factor)
        inv = nil_inv(prod) ** (N + 1)
        rows.append(inv.coeffs)
    return JFunctionK(N, D, tuple(rows))


def _compositions(total: int, weighted: int, parts: int):
    """(j_1..j_parts) >= 0 with sum j_l = total and sum l j_l = weighted."""
    if parts == 0:
        if total == 0 and weighted == 0:
            yield ()
        return
    l = parts
    for j in range(0, min(total, weighted // l) + 1):
        for rest in _compositions(total - j, weighted - l * j, parts - 1):
            yield rest + (j,)


def jk_closed_formula(N: int, D: int) -> JFunctionK:
    """Multi-index formula with nested power sums; must equal :func:`jk_series`.

    The eps^i coefficient at Q^d is 1/(q;q)_d^(N+1) times

      sum_k sum_(j: |j|=k, sum l j_l = i) (-1)^k (N+k)!/(N! j_1!...j_N!)
            prod_l e_l(d)^(j_l),

    with e_l(d) the l-th elementary symmetric polynomial of the values
    q^m/(1-q^m) for 1 <= m <= d (the inner sums start at m = 1: the m = 0
    term would divide by 1 - q^0).
    """
    one = R.one()
    # elementary symmetric table e[l][d]
    e = [[one if l == 0 else R.zero() for _ in range(D + 1)] for l in range(N + 1)]
    for d in range(1, D + 1):
        x = R.q_power(d) / R.one_minus_q_pow(d)
        for l in range(min(N, d), 0, -1):
            e[l][d] = e[l][d - 1] + x * e[l - 1][d - 1]
        for l in range(d + 1, N + 1):
            e[l][d] = R.zero()
        e[0][d] = one
    rows = []
    for d in range(D + 1):
        prefac = 1 / qpoch_exact(d) ** (N + 1)
        row = []
        for i in range(N + 1):
            acc = R.zero()
            for k in range(N + 1):
                for js in _compositions(k, i, N):
                    coeff = Fraction(
                        (-1) ** k * math.factorial(N + k), math.factorial(N)
                    )
                    for j in js:
                        coeff /= math.factorial(j)
                    term = R.from_fraction(coeff)
                    for l, j in enumerate(js, start=1):
                        for _ in range(j):
                            term = term * e[l][d]
                    acc = acc + term
            row.append(prefac * acc)
        rows.append(tuple(row))
    return JFunctionK(N, D, tuple(rows))


def jk_modified(N: int, D: int, jk: JFunctionK | None = None) -> LogSeries:
    """(1 - eps)^L * J as a log-series; the eps^i column has L-degree <= i."""
    jk = jk or jk_series(N, D)
    one = R.one()
    prefactor = nil_binomial_power(N, one)
    coeffs = []
    for d in range(D + 1):
        lifted = NilpotentElement(N, [LPoly.const(c, one) for c in jk.coeffs[d]])
        coeffs.append(nil_mul(prefactor, lifted))
    return LogSeries(D, coeffs)


def _sigma_power_sum(series: LogSeries, N: int, q) -> LogSeries:
    """(1 - sigma)^(N+1) applied to a log-series."""
    acc = None
    current = series
    for k in range(N + 2):
        coeff = math.comb(N + 1, k) * (-1) ** k
        term = current.scale(LPoly.const(coeff * R.one(), R.one()))
        acc = term if acc is None else acc + term
        if k <= N:
            current = current.sigma(q)
    return acc


def jk_qde_residual(N: int, D: int, modified: bool = True):
    """Residual of the q-difference equation, exactly zero through Q^D.

    ``modified``: [(1 - sigma)^(N+1) - Q] on the log-series (1-eps)^L J with
    sigma acting by Q^d -> q^d Q^d and L -> L + 1.  Otherwise the eps-twisted
    operator [(1 - (1-eps) sigma)^(N+1) - Q] on the plain series J.
    """
    q = R.q()
    if modified:
        s = jk_modified(N, D)
        return _sigma_power_sum(s, N, q) - s.mul_by_Q()
    jk = jk_series(N, D)
    one = R.one()
    series = LogSeries(
        D,
        tuple(
            NilpotentElement(N, [LPoly.const(c, one) for c in jk.coeffs[d]])
            for d in range(D + 1)
        ),
    )
    eps = NilpotentElement.eps(N, LPoly.const(one, one))
    one_minus_eps = NilpotentElement.from_scalar(N, LPoly.const(one, one)) - eps

    def twisted_sigma(s: LogSeries) -> LogSeries:
        shifted = s.mul_by_q_power(q)
        return LogSeries(D, tuple(nil_mul(one_minus_eps, c) for c in shifted.coeffs))

    acc = None
    current = series
    for k in range(N + 2):
        coeff = math.comb(N + 1, k) * (-1) ** k
        term = current.scale(LPoly.const(coeff * one, one))
        acc = term if acc is None else acc + term
        if k <= N:
            current = twisted_sigma(current)
    return acc - series.mul_by_Q()


# ---------------------------------------------------------------- the classical J


@dataclass(frozen=True)
class JFunctionCoh:
    """coeffs[d][b]: rational coefficient of Q^d H^b in the series part.

    Every stored monomial carries the implied factor z^-(d(N+1)+b); the
    prefactor Q^(H/z) contributes (log Q)^a H^a / (a! z^a).
    """

    N: int
    D: int
    coeffs: tuple
    basis: str = "H"

    def coefficient(self, d: int, b: int) -> Fraction:
        return self.coeffs[d][b]

    def z_exponent(self, d: int, b: int) -> int:
        return -(d * (self.N + 1) + b)

    def modified_coefficient(self, d: int, i: int, m: int) -> Fraction:
        """Coefficient of Q^d H^i (log Q)^m, implied z-exponent -(d(N+1)+i)."""
        if m > i:
            return Fraction(0)
        return self.coeffs[d][i - m] / math.factorial(m)


def jcoh_series(N: int, D: int) -> JFunctionCoh:
    """Expand 1/prod (H + rz)^(N+1) by nilpotency of H (via hhat = H/z)."""
    one = Fraction(1)
    rows = [tuple([one] + [Fraction(0)] * N)]
    prod = NilpotentElement.from_scalar(N, one)
    for d in range(1, D + 1):
        factor = NilpotentElement(
            N, [Fraction(d)] + ([one] if N >= 1 else []) + [Fraction(0)] * max(0, N - 1)
        )
        prod = nil_mul(prod, factor)
        inv = nil_inv(prod) ** (N + 1)
        rows.append(inv.coeffs)
    return JFunctionCoh(N, D, tuple(rows))


def jcoh_ode_residual(N: int, D: int, jcoh: JFunctionCoh | None = None) -> LogSeries:
    """[(zQ d/dQ)^(N+1) - Q] applied to Q^(H/z) * series.

    The operator acts on a monomial Q^d H^i (log Q)^m as
    d * (same) + m * (log-degree drop), raising the implied z-exponent by one;
    after N+1 applications the exponent matches the Q-shifted term, and every
    coefficient of the difference must vanish exactly.
    """
    jcoh = jcoh or jcoh_series(N, D)
    c = [
        [[jcoh.modified_coefficient(d, i, m) for m in range(N + 2)] for i in range(N + 1)]
        for d in range(D + 1)
    ]

    def apply_zqd(slots):
        out = [[[Fraction(0)] * (N + 2) for _ in range(N + 1)] for _ in range(D + 1)]
        for d in range(D + 1):
            for i in range(N + 1):
                for m in range(N + 1):
                    out[d][i][m] = d * slots[d][i][m] + (m + 1) * slots[d][i][m + 1]
        return out

    slots = c
    for _ in range(N + 1):
        slots = apply_zqd(slots)
    one = Fraction(1)
    coeffs = []
    for d in range(D + 1):
        lps = []
        for i in range(N + 1):
            vals = [
                slots[d][i][m] - (c[d - 1][i][m] if d >= 1 else Fraction(0))
                for m in range(N + 2)
            ]
            lps.append(LPoly(vals, one))
        coeffs.append(NilpotentElement(N, lps))
    return LogSeries(D, coeffs)


def jcoh_residual_is_zero(residual: LogSeries) -> bool:
    return residual.is_zero_through(residual.truncation)


# ---------------------------------------------------------------- exact comparison


@dataclass
class ComparisonRow:
    d: int
    i: int
    m: int
    k_scaled: RationalFunctionQ  # (1/m!) (1-q)^(i-m+d(N+1)) c_(d,i-m), exact in q
    limit: Fraction
    coh: Fraction
    z_exponent: int

    @property
    def equal(self) -> bool:
        return self.limit == self.coh


@dataclass
class ComparisonReport:
    """Exact coefficientwise comparison of the degenerated q-side with Jcoh.

    Every monomial Q^d eps^i L^m of the rescaled pullback
    (1-q)^(i+d(N+1)) z^-(i+d(N+1)) with the substitution
    ((q-1)/z)^a binom(L,a) -> (1/a!) (log Q / z)^a has an exact q -> 1 limit,
    which must equal the Q^d H^i (log Q)^m coefficient of Jcoh under
    eps^i -> H^i.
    """

    N: int
    D: int
    rows: list
    failures: list

    @property
    def all_equal(self) -> bool:
        return not self.failures

    def p2_table(self) -> list[dict]:
        """The plane correspondence table: eps-columns against 1, H, H^2."""
        if self.N != 2:
            raise ValueError("the correspondence table is the N = 2 specialization")
        table = [
            {
                "basis": "1-Pinv^i -> H^i (chern)",
                "prefactor": "(1-eps)^qlog(Q) -> Q^(H/z)",
            }
        ]
        for i in range(3):
            column = {"eps_power": i, "entries": []}
            for d in range(self.D + 1):
                row = next(r for r in self.rows if (r.d, r.i, r.m) == (d, i, 0))
                column["entries"].append(
                    {
                        "d": d,
                        "k_side": repr(row.k_scaled),
                        "limit": str(row.limit),
                        "coh_side": str(row.coh),
                        "z_exponent": row.z_exponent,
                        "equal": row.equal,
                    }
                )
            table.append(column)
        return table


def confluence_compare(N: int, D: int) -> ComparisonReport:
    """Exact verification that the q-side degenerates to the classical side."""
    jk = jk_series(N, D)
    jcoh = jcoh_series(N, D)
    rows, failures = [], []
    for d in range(D + 1):
        for i in range(N + 1):
            for m in range(i + 1):
                b = i - m
                scaled = (
                    R.from_fraction(Fraction(1, math.factorial(m)))
                    * (1 - R.q()) ** (b + d * (N + 1))
                    * jk.coeffs[d][b]
                )
                try:
                    lim = scaled.limit_q_to_1()
                except LimitUndefinedError as exc:
                    failures.append((d, i, m, f"limit undefined: {exc}"))
                    continue
                coh = jcoh.modified_coefficient(d, i, m)
                row = ComparisonRow(d, i, m, scaled, lim, coh, -(d * (N + 1) + i))
                rows.append(row)
                if not row.equal:
                    failures.append((d, i, m, f"{lim} != {coh}"))
    return ComparisonReport(N, D, rows, failures)


# ---------------------------------------------------------------- equivariant side


@dataclass(frozen=True)
class EquivariantSpec:
    """Torus weights lambda_0..lambda_N and the speed z, with Lambda_i = q^(-lambda_i/z)."""

    lambdas: tuple
    z: complex = 1.0

    def __post_init__(self):
        n = len(self.lambdas)
        if n < 1:
            raise ValueError("need at least one weight")
        for i in range(n):
            for j in range(n):
                if i == j:
                    continue
                mu = (self.lambdas[i] - self.lambdas[j]) / self.z
                if abs(mu.imag if isinstance(mu, complex) else 0) < 1e-12 and abs(
                    (mu.real if isinstance(mu, complex) else mu) - round(mu.real if isinstance(mu, complex) else mu)
                ) < 1e-9:
                    raise DomainError(
                        f"resonant weights: (lambda_{i} - lambda_{j})/z is an integer"
                    )

    @property
    def N(self) -> int:
        return len(self.lambdas) - 1

    def Lambda(self, i: int, q: complex) -> complex:
        return cmath.exp(-(self.lambdas[i] / self.z) * cmath.log(q))


@dataclass
class EquivariantJEvaluator:
    """One restriction of the equivariant q-deformed J-function.

    value(Q) = Lambda_i^(-qlog(Q)) sum_d Q^d / prod_j (q Lambda_j/Lambda_i; q)_d,
    optionally with the confluence rescaling (1-q)^(d(N+1))/z^(d(N+1)) per term.
    """

    spec: EquivariantSpec
    index: int
    q: complex
    truncation: int

    def _denominators(self, q: complex):
        n = self.spec.N + 1
        Lam = [self.spec.Lambda(j, q) for j in range(n)]
        ratios = [Lam[j] / Lam[self.index] for j in range(n)]
        dens = [1.0 + 0j]
        acc = 1.0 + 0j
        for d in range(1, self.truncation + 1):
            for j in range(n):
                acc *= 1.0 - q**d * ratios[j]
            dens.append(acc)
        return dens

    def series_value(self, Q: complex, q: complex | None = None, rescaled: bool = False) -> complex:
        q = self.q if q is None else q
        dens = self._denominators(q)
        n = self.spec.N + 1
        total = 0j
        for d in range(self.truncation + 1):
            term = Q**d / dens[d]
            if rescaled:
                term *= ((1 - q) / self.spec.z) ** (d * n)
            total += term
        return total

    def eval(self, Q: complex, q: complex | None = None, rescaled: bool = False) -> complex:
        q = self.q if q is None else q
        ell = q_log(q, Q)
        # Lambda_i^(-ell) = exp(+(lambda_i/z) log(q) ell)
        prefactor = cmath.exp((self.spec.lambdas[self.index] / self.spec.z) * cmath.log(q) * ell)
        return prefactor * self.series_value(Q, q, rescaled)

    def __call__(self, Q: complex) -> complex:
        return self.eval(Q)


def jk_equivariant(spec: EquivariantSpec, q: complex, D: int) -> list[EquivariantJEvaluator]:
    return [EquivariantJEvaluator(spec, i, q, D) for i in range(spec.N + 1)]


def equivariant_operator_residual(spec: EquivariantSpec, f, Q: complex, q: complex) -> float:
    """Relative residual of [prod_j (1 - Lambda_j sigma) - Q] f at a point."""
    n = spec.N + 1
    Lam = [spec.Lambda(j, q) for j in range(n)]
    # expand prod_j (1 - Lambda_j x) into powers of x
    poly = [1.0 + 0j]
    for j in range(n):
        new = poly + [0j]
        for k in range(len(poly), 0, -1):
            new[k] -= Lam[j] * poly[k - 1]
        poly = new
    acc = 0j
    scale = 0.0
    arg = complex(Q)
    for k, c in enumerate(poly):
        v = f(arg)
        acc += c * v
        scale = max(scale, abs(c) * abs(v))
        arg *= q
    fQ = f(Q)
    acc -= Q * fQ
    scale = max(scale, abs(Q) * abs(fQ))
    return abs(acc) / max(scale, 1e-300)


def jcoh_equivariant_value(spec: EquivariantSpec, i: int, Q: complex, D: int,
                           q0: complex = 0.5) -> complex:
    """Q^(lambda_i/z) sum_d Q^d prod_(r<=d) prod_j 1/(lambda_i - lambda_j + r z)."""
    lam = spec.lambdas
    z = spec.z
    acc = 0j
    prod = 1.0 + 0j
    for d in range(D + 1):
        if d:
            for j in range(spec.N + 1):
                prod *= lam[i] - lam[j] + d * z
        acc += Q**d / prod
    return cmath.exp((lam[i] / z) * spiral_log(Q, q0)) * acc


@dataclass
class EquivariantComparisonRow:
    index: int
    Q: complex
    limit: complex
    target: complex
    error: float
    observed_order: float


@dataclass
class EquivariantComparisonReport:
    spec: EquivariantSpec
    rows: list

    @property
    def max_error(self) -> float:
        return max(r.error for r in self.rows)

    def orders_near_one(self, slack: float = 0.5) -> bool:
        return all(abs(r.observed_order - 1) < slack for r in self.rows)


def equivariant_confluence_compare(
    spec: EquivariantSpec,
    D: int,
    Q_samples=(0.2, 0.35, 0.1 + 0.2j),
    q0: complex = 0.8,
    t_schedule=tuple(2.0**-j for j in range(5, 13)),
) -> EquivariantComparisonReport:
    """Path limit of the rescaled pullback of each restriction against the
    classical equivariant value, truncated at the same order on both sides."""
    rows = []
    for i in range(spec.N + 1):
        ev = EquivariantJEvaluator(spec, i, q0, D)
        for Q in Q_samples:
            if spiral_contains(-1.0, q0, Q):
                raise DomainError(f"sample {Q} lies on the excluded spiral")
            samples = [ev.eval(Q, q=q0**t, rescaled=True) for t in t_schedule]
            value = richardson_limit(samples)
            target = jcoh_equivariant_value(spec, i, Q, D, q0)
            rows.append(
                EquivariantComparisonRow(
                    i, Q, value, target, abs(value - target), observed_order(samples)
                )
            )
    return EquivariantComparisonReport(spec, rows)


# ---------------------------------------------------------------- quantum rings


def quantum_reduce(power: int, N: int) -> tuple[int, int]:
    """Reduce eps^power by the small quantum relation eps^(N+1) = Q.

    Returns (Q-exponent, eps-exponent) with eps-exponent <= N.
    """
    if power < 0:
        raise ValueError("power must be >= 0")
    return divmod(power, N + 1)


def small_quantum_ring_checks(N: int) -> list[tuple[str, bool]]:
    """Consistency of the reduction with the ring presentations."""
    checks = []
    checks.append(("eps^(N+1) -> Q", quantum_reduce(N + 1, N) == (1, 0)))
    checks.append(("eps^(2N+2) -> Q^2", quantum_reduce(2 * (N + 1), N) == (2, 0)))
    checks.append(("eps^N unchanged", quantum_reduce(N, N) == (0, N)))
    ok = True
    for k in range(N + 1):
        ok = ok and quantum_reduce(N + 1 + k, N) == (1, k)
    checks.append(("eps^(N+1+k) -> Q eps^k for k <= N", ok))
    return checks
