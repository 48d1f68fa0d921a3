"""q-difference systems and scalar q-difference operators.

A system is the functional equation X(qQ) = A(Q) X(Q) for a square matrix A
of rational functions of Q.  The module covers vectorization of scalar
operators, the valuation criterion for regular-singularity at Q = 0, gauge
transforms, normalization to a constant matrix by a degreewise Sylvester
recursion, Frobenius-type fundamental solutions built from the q-characters
and the q-logarithm, Taylor and log-series solutions of scalar operators,
q-hypergeometric series with their solution bases at 0 and infinity, and
Birkhoff connection matrices.

Two coefficient modes coexist: exact (entries rational in a symbolic q,
scalars :class:`~qonf.rings.RationalFunctionQ`) for theorem-grade identities,
and complex floats for special-function evaluation.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np

from .polyq import (
    MatrixSeries,
    Poly,
    RatFunc,
    SingularMatrixError,
    format_bivariate,
    lin_solve,
    mat_add,
    mat_eye,
    mat_inv,
    mat_map,
    mat_mul,
    mat_scale,
    mat_sub,
    mat_zero,
    parse_bivariate,
    ratfunc_matrix_series,
)
from .qspecial import (
    DomainError,
    PoleProximityError,
    log_qpoch_infinite,
    log_theta,
    q_character,
    q_log,
)
from .rings import (
    LogSeries,
    LPoly,
    NilpotentElement,
    QonfError,
    RationalFunctionQ,
    TruncatedQSeries,
    one_like,
    scalar_is_zero,
    zero_like,
)


class DegenerateOperatorError(QonfError):
    """The leading coefficient of a scalar operator vanishes identically."""


class ResonanceError(QonfError):
    """Eigenvalue ratios in q^Z obstruct the Frobenius construction."""

    def __init__(self, message, degree=None):
        super().__init__(message)
        self.degree = degree


class UnsupportedJordanError(QonfError):
    """A(0) is neither diagonalizable-non-resonant nor maximally unipotent."""


# ---------------------------------------------------------------- operators and systems


@dataclass(frozen=True)
class ScalarQOperator:
    """sum_k a_k(Q) sigma^k with rational-function coefficients a_0 .. a_n."""

    coeffs: tuple
    q: object

    def __post_init__(self):
        if not self.coeffs or self.coeffs[-1].is_zero:
            raise DegenerateOperatorError("leading coefficient vanishes identically")

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    @property
    def one(self):
        return self.coeffs[0].one


@dataclass(frozen=True)
class QDifferenceSystem:
    """X(qQ) = A(Q) X(Q) with A square over rational functions of Q."""

    A: tuple
    q: object

    @property
    def n(self) -> int:
        return len(self.A)

    @property
    def is_exact(self) -> bool:
        return isinstance(self.q, RationalFunctionQ)

    def matrix_at(self, Q: complex, q_num: complex | None = None):
        """Complex matrix A(Q), with exact q-entries specialized at q_num."""
        q = q_num if q_num is not None else self.q
        return [[_entry_at(a, Q, q) for a in row] for row in self.A]


def _entry_at(entry: RatFunc, Q: complex, q_num) -> complex:
    def conv(c):
        if isinstance(c, RationalFunctionQ):
            return c.evaluate_complex(q_num)
        return complex(c)

    num = sum(conv(c) * Q**k for k, c in enumerate(entry.num.coeffs))
    den = sum(conv(c) * Q**k for k, c in enumerate(entry.den.coeffs))
    return num / den


def companion_system(op: ScalarQOperator) -> QDifferenceSystem:
    """Vectorize a scalar operator: unknowns (f, sigma f, ..., sigma^(n-1) f)."""
    n = op.order
    if n == 0:
        raise DegenerateOperatorError("order-zero operator has no companion system")
    one = op.one
    zero = RatFunc.const(zero_like(one), one)
    unit = RatFunc.const(one, one)
    rows = []
    for i in range(n - 1):
        rows.append([unit if j == i + 1 else zero for j in range(n)])
    an = op.coeffs[n]
    rows.append([-(op.coeffs[k] / an) for k in range(n)])
    return QDifferenceSystem(tuple(tuple(r) for r in rows), op.q)


def is_regular_singular_at_0(op: ScalarQOperator) -> bool:
    """Valuation criterion: val(a_0) = val(a_n) and val(a_k) >= val(a_n)."""
    vn = op.coeffs[-1].valuation_at_0
    v0 = op.coeffs[0].valuation_at_0
    if v0 is None or v0 != vn:
        return False
    for a in op.coeffs[1:-1]:
        v = a.valuation_at_0
        if v is not None and v < vn:
            return False
    return True


def sigma_ratfunc(f: RatFunc, q) -> RatFunc:
    """Substitute Q -> qQ in a rational function of Q."""
    return f.scale_argument(q)


def gauge_transform(P, sys: QDifferenceSystem) -> QDifferenceSystem:
    """(sigma P) A P^{-1}: solutions transform as X -> P X."""
    sigP = mat_map(P, lambda f: sigma_ratfunc(f, sys.q))
    try:
        Pinv = mat_inv(P)
    except SingularMatrixError as exc:
        raise SingularMatrixError("gauge matrix is singular") from exc
    B = mat_mul(mat_mul(sigP, [list(row) for row in sys.A]), Pinv)
    return QDifferenceSystem(tuple(tuple(r) for r in B), sys.q)


def q_pullback(sys: QDifferenceSystem, c) -> QDifferenceSystem:
    """Pullback along Q -> c Q: the matrix becomes A(Q/c)."""
    inv = one_like(c) / c
    B = mat_map(sys.A, lambda f: f.scale_argument(inv))
    return QDifferenceSystem(tuple(tuple(r) for r in B), sys.q)


# ---------------------------------------------------------------- normalization


def normalize_to_constant(sys: QDifferenceSystem, D: int):
    """Gauge F with F(0) = I and (sigma F) A F^{-1} = A(0) + O(Q^(D+1)).

    Degree m of F solves the Sylvester-type equation
    q^m F_m A0 - A0 F_m = -sum_{k<m} q^k F_k A_{m-k}; a singular solve means a
    resonant exponent and raises :class:`ResonanceError` naming the degree.
    """
    n = sys.n
    one = sys.A[0][0].one
    Aser = ratfunc_matrix_series([list(r) for r in sys.A], D)
    A0 = Aser.terms[0]
    try:
        mat_inv(A0)
    except SingularMatrixError as exc:
        raise DomainError("A(0) is not invertible") from exc
    F = [mat_eye(n, one)]
    qpow = one_like(sys.q)
    for m in range(1, D + 1):
        qpow = qpow * sys.q
        rhs = mat_zero(n, one)
        qk = one_like(sys.q)
        for k in range(m):
            Fk = F[k]
            Am_k = Aser.terms[m - k]
            rhs = mat_sub(rhs, mat_scale(mat_mul(Fk, Am_k), qk * one))
            qk = qk * sys.q
        # vectorized Sylvester solve: q^m X A0 - A0 X = rhs
        big = [[zero_like(one) for _ in range(n * n)] for _ in range(n * n)]
        for i in range(n):
            for j in range(n):
                row = i * n + j
                for k in range(n):
                    big[row][i * n + k] = big[row][i * n + k] + (qpow * one) * A0[k][j]
                    big[row][k * n + j] = big[row][k * n + j] - A0[i][k]
        vec_rhs = [rhs[i][j] for i in range(n) for j in range(n)]
        try:
            sol = lin_solve(big, [vec_rhs])[0]
        except SingularMatrixError as exc:
            raise ResonanceError(f"resonant exponent at degree {m}", degree=m) from exc
        F.append([[sol[i * n + j] for j in range(n)] for i in range(n)])
    return MatrixSeries(F, one), A0


def gauge_residual_series(sys: QDifferenceSystem, F: MatrixSeries, A0) -> MatrixSeries:
    """(sigma F) A - A0 F as a matrix series (zero through the truncation)."""
    D = F.truncation
    Aser = ratfunc_matrix_series([list(r) for r in sys.A], D)
    lhs = F.sigma(sys.q).mul(Aser)
    rhs = MatrixSeries([mat_mul(A0, t) for t in F.terms], F.one)
    return lhs.sub(rhs)


# ---------------------------------------------------------------- fundamental solutions


@dataclass
class FundamentalSolutionAt0:
    """Structured solution X = G(Q) * (character part) * exp(qlog(Q) N).

    ``gauge`` is the series G with G(0) = I; the constant-matrix factor is
    either a diagonalizable part (basis V, eigenvalues lam_i, evaluated with
    the q-characters) or a unipotent part (nilpotent N = log A(0), evaluated
    with the q-logarithm), per the supported Jordan cases.
    """

    sys: QDifferenceSystem
    gauge: MatrixSeries
    kind: str  # "diagonalizable" | "unipotent"
    eigenvalues: list
    basis: object = None  # numpy array for the diagonalizable case
    nilpotent_log: object = None  # matrix for the unipotent case
    _numeric_cache: dict = field(default_factory=dict, repr=False)

    def _numeric_gauge(self, q_num: complex) -> MatrixSeries:
        key = q_num
        if key not in self._numeric_cache:
            def conv(c):
                if isinstance(c, RationalFunctionQ):
                    return c.evaluate_complex(q_num)
                return complex(c)

            self._numeric_cache[key] = self.gauge.map_entries(conv, 1 + 0j)
        return self._numeric_cache[key]

    def eval(self, Q: complex, q_num: complex | None = None):
        """Complex value of the fundamental solution matrix at Q."""
        q = q_num if q_num is not None else self.sys.q
        if isinstance(q, RationalFunctionQ):
            raise DomainError("numeric evaluation of an exact system needs q_num")
        G = self._numeric_gauge(q).evaluate(complex(Q))
        n = self.sys.n
        if self.kind == "diagonalizable":
            V = self.basis
            chars = np.diag([q_character(_to_complex(l, q), q, Q) for l in self.eigenvalues])
            E = V @ chars @ np.linalg.inv(V)
        else:
            Nm = np.array(
                [[_to_complex(x, q) for x in row] for row in self.nilpotent_log], dtype=complex
            )
            ell = q_log(q, Q)
            E = _nilpotent_exp(ell * Nm)
        return np.array(G, dtype=complex) @ E

    def shift_residual(self, Q: complex, q_num: complex | None = None) -> float:
        """max-norm of X(qQ) - A(Q) X(Q), relative to the size of X."""
        q = q_num if q_num is not None else self.sys.q
        X = self.eval(Q, q_num)
        Xq = self.eval(q * Q, q_num)
        A = np.array(self.sys.matrix_at(Q, q_num), dtype=complex)
        return float(np.abs(Xq - A @ X).max() / max(np.abs(X).max(), 1e-300))


def _to_complex(x, q_num):
    if isinstance(x, RationalFunctionQ):
        return x.evaluate_complex(q_num)
    return complex(x)


def _nilpotent_exp(N: np.ndarray) -> np.ndarray:
    n = N.shape[0]
    out = np.eye(n, dtype=complex)
    term = np.eye(n, dtype=complex)
    for k in range(1, n):
        term = term @ N / k
        out = out + term
    return out


def _matrix_log_unipotent(A0, one):
    """log of a unipotent matrix via the terminating Mercator series."""
    n = len(A0)
    U = mat_sub(A0, mat_eye(n, one))
    out = mat_zero(n, one)
    power = mat_eye(n, one)
    for k in range(1, n):
        power = mat_mul(power, U)
        coeff = one_like(one) / (k * one) if not isinstance(one, complex) else one / k
        sign = coeff if k % 2 == 1 else -coeff
        out = mat_add(out, mat_scale(power, sign))
    return out


def _is_unipotent_exact(A0, one) -> bool:
    n = len(A0)
    U = mat_sub(A0, mat_eye(n, one))
    power = U
    for _ in range(n - 1):
        power = mat_mul(power, U)
    return all(scalar_is_zero(x) for row in power for x in row)


def frobenius_solution(sys: QDifferenceSystem, D: int) -> FundamentalSolutionAt0:
    """Fundamental solution at 0 for the supported Jordan structures of A(0).

    Supported: (a) A(0) diagonalizable with non-resonant eigenvalues, and
    (b) A(0) with the single eigenvalue 1 (maximal unipotent).  Anything else
    raises :class:`UnsupportedJordanError`.
    """
    F, A0 = normalize_to_constant(sys, D)
    G = F.inverse()
    one = F.one
    if sys.is_exact:
        if _is_unipotent_exact(A0, one):
            return FundamentalSolutionAt0(
                sys, G, "unipotent", [one_like(one)] * sys.n,
                nilpotent_log=_matrix_log_unipotent(A0, one),
            )
        if sys.n == 1:
            return FundamentalSolutionAt0(
                sys, G, "diagonalizable", [A0[0][0]], basis=np.array([[1.0 + 0j]])
            )
        raise UnsupportedJordanError(
            "exact mode handles the maximal-unipotent case (or rank 1); "
            "use a numeric q for the diagonalizable case"
        )
    A0c = np.array([[complex(x) for x in row] for row in A0], dtype=complex)
    lams, V = np.linalg.eig(A0c)
    scale = max(np.abs(lams).max(), 1.0)
    if np.all(np.abs(lams - 1.0) < 1e-10 * scale):
        return FundamentalSolutionAt0(
            sys, G, "unipotent", [1.0 + 0j] * sys.n,
            nilpotent_log=_matrix_log_unipotent(A0, one),
        )
    _check_nonresonant_eigs(lams, sys.q)
    if np.linalg.cond(V) > 1e8:
        raise UnsupportedJordanError("A(0) is numerically defective")
    return FundamentalSolutionAt0(sys, G, "diagonalizable", list(lams), basis=V)


def _check_nonresonant_eigs(lams, q: complex, tol: float = 1e-10):
    logq = cmath.log(q)
    for i, a in enumerate(lams):
        for j, b in enumerate(lams):
            if i == j:
                continue
            if abs(a) < 1e-300 or abs(b) < 1e-300:
                raise DomainError("A(0) has a numerically zero eigenvalue")
            w = cmath.log(a / b) / logq
            if abs(w.imag) < 1e-8 and abs(w.real - round(w.real)) < tol:
                raise ResonanceError(
                    f"eigenvalue ratio {a / b} lies in q^Z (exponent {round(w.real)})"
                )


# ---------------------------------------------------------------- scalar solutions


def _operator_series(op: ScalarQOperator, D: int):
    return [a.series(D) for a in op.coeffs]


def _indicial_values(op_series, q, d: int):
    """sum_k a_k(0) q^(kd): the coefficient multiplying f_d in the recursion."""
    acc = None
    qd = q**d if d else one_like(q)
    p = one_like(q)
    for k, ak in enumerate(op_series):
        term = ak[0] * p
        acc = term if acc is None else acc + term
        p = p * qd
    return acc


def solve_scalar_series(op: ScalarQOperator, D: int) -> TruncatedQSeries:
    """Unique Taylor solution with f_0 = 1 through order D.

    Raises :class:`ResonanceError` naming the degree if the indicial factor
    vanishes at some 1 <= d <= D.
    """
    ser = _operator_series(op, D)
    one = op.one
    q = op.q
    coeffs = [one]
    for d in range(1, D + 1):
        ind = _indicial_values(ser, q, d)
        if scalar_is_zero(ind):
            raise ResonanceError(f"vanishing indicial factor at degree {d}", degree=d)
        acc = zero_like(one)
        for k, ak in enumerate(ser):
            for i in range(1, d + 1):
                if scalar_is_zero(ak[i]):
                    continue
                acc = acc + ak[i] * (q ** (k * (d - i)) * coeffs[d - i])
        coeffs.append(-acc / ind)
    return TruncatedQSeries(D, [NilpotentElement(0, [c]) for c in coeffs])


def _indicial_is_maximal_unipotent(op_series, one, order) -> bool:
    """Whether the indicial polynomial is c (1 - x)^n, i.e. all roots are 1."""
    iota = [ak[0] for ak in op_series]
    c = iota[0]
    if scalar_is_zero(c):
        return False
    for k, ik in enumerate(iota):
        want = c * (math.comb(order, k) * (-1) ** k)
        if isinstance(one, complex):
            if abs(ik - want) > 1e-10 * max(abs(c), 1.0):
                return False
        elif ik != want:
            return False
    return True


def frobenius_log_solutions(op: ScalarQOperator, D: int) -> list[LogSeries]:
    """The n log-series solutions of a maximal-unipotent scalar operator.

    Solution m is sum_{j<=m} u_j(Q) L^m-ish with L-degree exactly m, leading
    L-coefficient equal to the Taylor solution, and the degree-0 data
    u_j(0) = delta_{jm}.  Mixed indicial roots are not handled here; use
    :func:`frobenius_solution` on the companion system instead.
    """
    n = op.order
    ser = _operator_series(op, D)
    one = op.one
    q = op.q
    if not is_regular_singular_at_0(op):
        raise DomainError("operator is not regular singular at 0")
    if not _indicial_is_maximal_unipotent(ser, one, n):
        raise UnsupportedJordanError("indicial roots are not all equal to 1")

    def S(i, dprime, jprime, j):
        # coefficient from a_{k,i} Q^i sigma^k acting on L^{j'} Q^{d'};
        # note k^(j'-j) kills the k = 0 term unless j' = j
        acc = zero_like(one)
        for k, ak in enumerate(ser):
            c = ak[i]
            if scalar_is_zero(c):
                continue
            weight = math.comb(jprime, j) * k ** (jprime - j)
            if weight == 0:
                continue
            acc = acc + c * weight * (q ** (k * dprime))
        return acc

    solutions = []
    for m in range(n):
        u = [[zero_like(one) for _ in range(D + 1)] for _ in range(m + 1)]
        u[m][0] = one
        for d in range(1, D + 1):
            ind = _indicial_values(ser, q, d)
            for j in range(m, -1, -1):
                acc = zero_like(one)
                for jp in range(j, m + 1):
                    for i in range(0, d + 1):
                        if i == 0 and jp == j:
                            continue  # the unknown term
                        coeff = S(i, d - i, jp, j)
                        if scalar_is_zero(coeff):
                            continue
                        acc = acc + coeff * u[jp][d - i]
                u[j][d] = -acc / ind
        coeffs = []
        for d in range(D + 1):
            lp = LPoly([u[j][d] for j in range(m + 1)], one)
            coeffs.append(NilpotentElement(0, [lp]))
        solutions.append(LogSeries(D, coeffs))
    return solutions


def apply_scalar_operator_logseries(op: ScalarQOperator, s: LogSeries) -> LogSeries:
    """Apply sum a_k(Q) sigma^k to a log-series (sigma: Q^d -> q^d Q^d, L -> L+1)."""
    q = op.q
    out = None
    current = s
    for k, ak in enumerate(op.coeffs):
        if k > 0:
            current = current.sigma(q)
        ser = ak.series(s.truncation)
        term = _logseries_mul_poly(current, ser)
        out = term if out is None else out + term
    return out


def _logseries_mul_poly(s: LogSeries, poly_coeffs) -> LogSeries:
    D = s.truncation
    zero = s.coeffs[0] - s.coeffs[0]
    out = [zero for _ in range(D + 1)]
    for i, c in enumerate(poly_coeffs):
        if scalar_is_zero(c):
            continue
        for d in range(0, D + 1 - i):
            out[d + i] = out[d + i] + s.coeffs[d].map_coeffs(lambda lp: lp * c)
    return LogSeries(D, out)


# ---------------------------------------------------------------- q-hypergeometric


@dataclass(frozen=True)
class QHypergeometricSpec:
    """Parameter lists (a_1..a_r; b_1..b_s) of a q-hypergeometric series."""

    upper: tuple
    lower: tuple

    @property
    def r(self) -> int:
        return len(self.upper)

    @property
    def s(self) -> int:
        return len(self.lower)


def in_discrete_spiral(x: complex, q: complex, tol: float = 1e-9) -> bool:
    """Whether x = q^k for some integer k, within tolerance."""
    if x == 0:
        return False
    k = cmath.log(x) / cmath.log(q)
    if abs(k.imag) > tol * 10:
        # allow phase wraps: compare against the nearest integer exponent
        kr = round(k.real)
        return abs(x - q**kr) < tol * abs(q**kr)
    return abs(k.real - round(k.real)) < tol and abs(x - q ** round(k.real)) < tol * abs(x)


def qhg_coefficients(spec: QHypergeometricSpec, q: complex, D: int) -> list[complex]:
    """Taylor coefficients via the term ratio

    f_{d+1}/f_d = (-q^d)^(1+s-r) prod(1 - a_i q^d) / ((1 - q^(d+1)) prod(1 - b_j q^d)).
    """
    e = 1 + spec.s - spec.r
    for b in spec.lower:
        if in_discrete_spiral(b, q) and abs(b) >= 1 - 1e-12:
            raise PoleProximityError(f"lower parameter {b} lies in q^(Z<=0)")
    out = [1.0 + 0j]
    qd = 1.0 + 0j
    for d in range(D):
        num = 1.0 + 0j
        for a in spec.upper:
            num *= 1.0 - a * qd
        den = 1.0 - q * qd
        for b in spec.lower:
            den *= 1.0 - b * qd
        if den == 0:
            raise PoleProximityError(f"vanishing denominator at degree {d + 1}")
        ratio = (-qd) ** e * num / den if e >= 0 else num / (den * (-qd) ** (-e))
        out.append(out[-1] * ratio)
        qd *= q
    return out


def qhg_series(spec: QHypergeometricSpec, q: complex, D: int) -> TruncatedQSeries:
    coeffs = qhg_coefficients(spec, q, D)
    return TruncatedQSeries(D, [NilpotentElement(0, [c]) for c in coeffs])


def qhg_operator(spec: QHypergeometricSpec, q: complex) -> ScalarQOperator:
    """The q-difference operator annihilating the series (needs r <= s+1):

    Q (-sigma)^(1+s-r) prod(1 - a_i sigma) - (1 - sigma) prod(1 - (b_j/q) sigma).
    """
    e = 1 + spec.s - spec.r
    if e < 0:
        raise DomainError("operator form requires r <= s + 1")
    one = 1.0 + 0j

    def poly_mul(p1, p2):
        out = [0j] * (len(p1) + len(p2) - 1)
        for i, a in enumerate(p1):
            for j, b in enumerate(p2):
                out[i + j] += a * b
        return out

    t1 = [0j] * e + [(-1.0 + 0j) ** e]
    for a in spec.upper:
        t1 = poly_mul(t1, [1.0 + 0j, -a])
    t2 = [1.0 + 0j, -1.0 + 0j]
    for b in spec.lower:
        t2 = poly_mul(t2, [1.0 + 0j, -b / q])
    order = max(len(t1), len(t2)) - 1
    Qvar = Poly.variable(one)
    coeffs = []
    for k in range(order + 1):
        c1 = t1[k] if k < len(t1) else 0j
        c2 = t2[k] if k < len(t2) else 0j
        coeffs.append(RatFunc(Qvar * c1 - Poly.const(c2, one)))
    return ScalarQOperator(tuple(coeffs), q)


@dataclass
class QHGSolution:
    """Numerically evaluable basis solution: theta prefactor times a series.

    The value is theta_q(mu Q)/theta_q(nu Q) * series(argument), where the
    argument is Q itself or c/Q for the basis at infinity.
    """

    spec: QHypergeometricSpec
    q: complex
    truncation: int
    prefactor: tuple | None  # (mu, nu) or None
    reciprocal_coefficient: complex | None  # None => argument is Q
    label: str
    _coeffs: list = None

    def __post_init__(self):
        if self._coeffs is None:
            self._coeffs = qhg_coefficients(self.spec, self.q, self.truncation)

    def series_value(self, w: complex) -> complex:
        if abs(w) > 0.95:
            raise DomainError(f"series argument |{w}| too close to the unit circle")
        acc = 0j
        for c in reversed(self._coeffs):
            acc = acc * w + c
        return acc

    def eval(self, Q: complex) -> complex:
        w = Q if self.reciprocal_coefficient is None else self.reciprocal_coefficient / Q
        val = self.series_value(w)
        if self.prefactor is not None:
            mu, nu = self.prefactor
            val *= cmath.exp(log_theta(self.q, mu * Q) - log_theta(self.q, nu * Q))
        return val

    def __call__(self, Q: complex) -> complex:
        return self.eval(Q)


def qhg_bases(spec: QHypergeometricSpec, q: complex, D: int):
    """Solution bases at 0 and at infinity for the regular-singular case r = s+1.

    Each entry evaluates numerically; the first element of the basis at 0 is
    the plain q-hypergeometric series.
    """
    if spec.r != spec.s + 1:
        raise DomainError("regular-singular bases require r = s + 1")
    if any(x == 0 for x in spec.upper + spec.lower):
        raise DomainError("basis construction requires nonzero parameters")
    for name, params in (("upper", spec.upper), ("lower", spec.lower)):
        for i, x in enumerate(params):
            for y in params[i + 1 :]:
                if in_discrete_spiral(x / y, q):
                    raise ResonanceError(f"{name} parameter ratio {x / y} lies in q^Z")
    for b in spec.lower:
        if in_discrete_spiral(b, q):
            raise ResonanceError(f"lower parameter {b} lies in q^Z")

    basis0 = [QHGSolution(spec, q, D, None, None, "series")]
    for j, bj in enumerate(spec.lower):
        upper = tuple(q * a / bj for a in spec.upper)
        lower = (q * q / bj,) + tuple(q * b / bj for k, b in enumerate(spec.lower) if k != j)
        basis0.append(
            QHGSolution(
                QHypergeometricSpec(upper, lower), q, D,
                (-bj / q, -1.0 + 0j), None, f"theta[{j}]",
            )
        )
    arg = q
    for b in spec.lower:
        arg *= b
    for a in spec.upper:
        arg /= a
    basis_inf = []
    for i, ai in enumerate(spec.upper):
        upper = (ai,) + tuple(ai * q / b for b in spec.lower)
        lower = tuple(ai * q / a for k, a in enumerate(spec.upper) if k != i)
        basis_inf.append(
            QHGSolution(
                QHypergeometricSpec(upper, lower), q, D,
                (-ai, -1.0 + 0j), arg, f"inf[{i}]",
            )
        )
    return basis0, basis_inf


def operator_residual(op: ScalarQOperator, f, Q: complex, q_num: complex | None = None) -> float:
    """Relative residual |sum a_k(Q) f(q^k Q)| at a sample point."""
    q = q_num if q_num is not None else op.q
    acc = 0j
    scale = 0.0
    arg = complex(Q)
    for a in op.coeffs:
        c = _entry_at(a, Q, q)
        v = f(arg)
        acc += c * v
        scale = max(scale, abs(c) * abs(v))
        arg *= q
    return abs(acc) / max(scale, 1e-300)


def casoratian(evaluators, q: complex, Q: complex) -> complex:
    """det [f_j(q^k Q)]: nonzero iff the solutions are independent over q-constants."""
    n = len(evaluators)
    M = np.empty((n, n), dtype=complex)
    arg = complex(Q)
    for k in range(n):
        for j, f in enumerate(evaluators):
            M[k, j] = f(arg)
        arg *= q
    return complex(np.linalg.det(M))


# ---------------------------------------------------------------- rank 1 and Birkhoff


@dataclass
class Rank1ProductSolution:
    """e_{q,lam}(Q) prod (beta_i Q;q)_inf / prod (alpha_i Q;q)_inf.

    Solves f(qQ) = lam prod(1 - alpha_i Q)/prod(1 - beta_i Q) f(Q).
    """

    lam: complex
    alphas: tuple
    betas: tuple
    q: complex
    tol: float = 1e-13

    def log_eval(self, Q: complex) -> complex:
        if Q == 0:
            raise DomainError("Q must be nonzero")
        total = 0j
        if self.lam != 1:
            total += log_theta(self.q, Q) - log_theta(self.q, self.lam * Q)
        for b in self.betas:
            total += log_qpoch_infinite(b * Q, self.q, self.tol)
        for a in self.alphas:
            la = log_qpoch_infinite(a * Q, self.q, self.tol)
            if la == complex("-inf"):
                raise PoleProximityError(f"pole: {a}*Q hits q^(-N)")
            total -= la
        return total

    def eval(self, Q: complex) -> complex:
        return cmath.exp(self.log_eval(Q))

    def __call__(self, Q: complex) -> complex:
        return self.eval(Q)


def rank1_product_solution(lam, alphas, betas, q) -> Rank1ProductSolution:
    if any(a == 0 for a in alphas) or any(b == 0 for b in betas):
        raise DomainError("parameters must be nonzero")
    return Rank1ProductSolution(complex(lam), tuple(alphas), tuple(betas), complex(q))


def birkhoff_matrix(sol0, sol_inf, Q: complex):
    """Connection matrix X_0(Q) X_inf(1/Q)^{-1} of two fundamental solutions.

    ``sol0`` and ``sol_inf`` are callables returning square complex matrices
    (the one at infinity as a function of W = 1/Q).
    """
    X0 = np.asarray(sol0(Q), dtype=complex)
    Xinf = np.asarray(sol_inf(1 / Q), dtype=complex)
    if abs(np.linalg.det(Xinf)) == 0:
        raise SingularMatrixError("solution at infinity is singular at this point")
    return X0 @ np.linalg.inv(Xinf)


def birkhoff_scalar(f0, f_inf, Q: complex) -> complex:
    """Rank-1 connection value f_0(Q) / f_inf(1/Q)."""
    return f0(Q) / f_inf(1 / Q)


# ---------------------------------------------------------------- JSON interchange


def system_to_json(sys: QDifferenceSystem) -> dict:
    entries = []
    for i, row in enumerate(sys.A):
        for j, f in enumerate(row):
            if f.is_zero:
                continue
            if not sys.is_exact:
                raise DomainError("JSON export requires exact entries")
            entries.append({"i": i, "j": j, "entry": format_bivariate(f)})
    q = "q" if sys.is_exact else [sys.q.real, sys.q.imag]
    return {"n": sys.n, "q": q, "entries": entries}


def system_from_json(doc: dict) -> QDifferenceSystem:
    n = int(doc["n"])
    one = RationalFunctionQ.one()
    zero = RatFunc.const(RationalFunctionQ.zero(), one)
    A = [[zero for _ in range(n)] for _ in range(n)]
    for e in doc["entries"]:
        if "entry" in e:
            f = parse_bivariate(e["entry"])
        else:
            num = parse_bivariate(e["num"])
            den = parse_bivariate(e["den"])
            f = num / den
        A[int(e["i"])][int(e["j"])] = f
    qdoc = doc["q"]
    if qdoc == "q":
        return QDifferenceSystem(tuple(tuple(r) for r in A), RationalFunctionQ.q())
    q_num = complex(qdoc[0], qdoc[1]) if isinstance(qdoc, (list, tuple)) else complex(qdoc)
    B = mat_map(
        A, lambda f: f.map_coeffs(lambda c: c.evaluate_complex(q_num), 1 + 0j)
    )
    return QDifferenceSystem(tuple(tuple(r) for r in B), q_num)
