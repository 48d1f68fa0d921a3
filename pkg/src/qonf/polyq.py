"""Generic dense polynomials and rational functions in the equation variable Q.

Coefficients are duck-typed scalars from any of the package's rings
(Fraction, RationalFunctionQ, complex); each container carries a ring unit so
that zeros and ones of the right type can be produced.  Exact scalar types
get eager gcd reduction of rational functions; floating scalars skip
reduction (degrees stay small in every numeric code path).

Also provides the little dense linear algebra used by the solvers: generic
matrix products, Gauss-Jordan inversion, and linear solves over any field of
scalars, plus truncated matrix power series.
"""

from __future__ import annotations

from fractions import Fraction

from .rings import RationalFunctionQ, one_like, scalar_is_zero, zero_like


def _is_exact(one) -> bool:
    return not isinstance(one, (float, complex))


class Poly:
    """Dense polynomial over a duck-typed scalar ring; ascending coefficients."""

    __slots__ = ("coeffs", "one")

    def __init__(self, coeffs, one):
        coeffs = list(coeffs)
        while coeffs and scalar_is_zero(coeffs[-1]):
            coeffs.pop()
        self.coeffs = tuple(coeffs)
        self.one = one

    @classmethod
    def const(cls, c, one=None) -> "Poly":
        return cls([c], one if one is not None else one_like(c))

    @classmethod
    def variable(cls, one) -> "Poly":
        return cls([zero_like(one), one], one)

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1  # -1 for the zero polynomial

    def coeff(self, k: int):
        return self.coeffs[k] if k < len(self.coeffs) else zero_like(self.one)

    @property
    def valuation(self) -> int | None:
        """Order of vanishing at 0; None for the zero polynomial."""
        for k, c in enumerate(self.coeffs):
            if not scalar_is_zero(c):
                return k
        return None

    def _coerce(self, other) -> "Poly":
        if isinstance(other, Poly):
            return other
        return Poly([other * self.one], self.one)

    def __add__(self, other):
        other = self._coerce(other)
        n = max(len(self.coeffs), len(other.coeffs))
        return Poly([self.coeff(k) + other.coeff(k) for k in range(n)], self.one)

    __radd__ = __add__

    def __sub__(self, other):
        other = self._coerce(other)
        n = max(len(self.coeffs), len(other.coeffs))
        return Poly([self.coeff(k) - other.coeff(k) for k in range(n)], self.one)

    def __neg__(self):
        return Poly([-c for c in self.coeffs], self.one)

    def __mul__(self, other):
        if not isinstance(other, Poly):
            return Poly([c * other for c in self.coeffs], self.one)
        if self.is_zero or other.is_zero:
            return Poly([], self.one)
        out = [zero_like(self.one)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if scalar_is_zero(a):
                continue
            for j, b in enumerate(other.coeffs):
                out[i + j] = out[i + j] + a * b
        return Poly(out, self.one)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        out = Poly([self.one], self.one)
        base = self
        while k:
            if k & 1:
                out = out * base
            k >>= 1
            if k:
                base = base * base
        return out

    def __eq__(self, other):
        other = self._coerce(other)
        return len(self.coeffs) == len(other.coeffs) and all(
            a == b for a, b in zip(self.coeffs, other.coeffs)
        )

    def __hash__(self):
        return hash(self.coeffs)

    def divmod(self, other: "Poly"):
        """Polynomial division; scalars must form a field."""
        if other.is_zero:
            raise ZeroDivisionError("division by the zero polynomial")
        rem = list(self.coeffs)
        dq, dr = other.degree, len(rem) - 1
        if dr < dq:
            return Poly([], self.one), self
        quot = [zero_like(self.one)] * (dr - dq + 1)
        lead = other.coeffs[-1]
        for k in range(dr - dq, -1, -1):
            c = rem[k + dq] / lead
            if not scalar_is_zero(c):
                quot[k] = c
                for j, b in enumerate(other.coeffs):
                    rem[k + j] = rem[k + j] - c * b
        return Poly(quot, self.one), Poly(rem[:dq], self.one)

    def gcd(self, other: "Poly") -> "Poly":
        a, b = self, other
        while not b.is_zero:
            a, b = b, a.divmod(b)[1]
        if a.is_zero:
            return a
        return a * (one_like(a.one) / a.coeffs[-1])  # monic

    def derivative(self) -> "Poly":
        return Poly([(k * self.one) * c for k, c in enumerate(self.coeffs)][1:], self.one)

    def scale_argument(self, c) -> "Poly":
        """Substitute X -> c*X."""
        out, p = [], one_like(self.one)
        for k, a in enumerate(self.coeffs):
            out.append(a * p if k else a)
            p = p * c
        return Poly(out, self.one)

    def evaluate(self, x):
        acc = zero_like(self.one)
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def map_coeffs(self, fn, one=None) -> "Poly":
        return Poly([fn(c) for c in self.coeffs], one if one is not None else self.one)

    def __repr__(self):
        if self.is_zero:
            return "Poly(0)"
        return "Poly([%s])" % ", ".join(repr(c) for c in self.coeffs)


class RatFunc:
    """Quotient of two :class:`Poly`; reduced eagerly over exact scalar rings."""

    __slots__ = ("num", "den")

    def __init__(self, num: Poly, den: Poly | None = None, *, _canonical=False):
        if den is None:
            den = Poly([num.one], num.one)
        if den.is_zero:
            raise ZeroDivisionError("zero denominator")
        if not _canonical:
            if num.is_zero:
                den = Poly([num.one], num.one)
            elif _is_exact(num.one):
                g = num.gcd(den)
                if g.degree > 0:
                    num = num.divmod(g)[0]
                    den = den.divmod(g)[0]
                lc = den.coeffs[-1]
                if lc != one_like(lc):
                    inv = one_like(lc) / lc
                    num, den = num * inv, den * inv
        self.num, self.den = num, den

    @classmethod
    def const(cls, c, one=None) -> "RatFunc":
        one = one if one is not None else one_like(c)
        return cls(Poly([c], one), Poly([one], one), _canonical=True)

    @classmethod
    def variable(cls, one) -> "RatFunc":
        return cls(Poly.variable(one), Poly([one], one), _canonical=True)

    @property
    def one(self):
        return self.num.one

    @property
    def is_zero(self) -> bool:
        return self.num.is_zero

    def _coerce(self, other) -> "RatFunc":
        if isinstance(other, RatFunc):
            return other
        if isinstance(other, Poly):
            return RatFunc(other)
        return RatFunc.const(other * self.one, self.one)

    def __add__(self, other):
        other = self._coerce(other)
        return RatFunc(self.num * other.den + other.num * self.den, self.den * other.den)

    __radd__ = __add__

    def __sub__(self, other):
        other = self._coerce(other)
        return RatFunc(self.num * other.den - other.num * self.den, self.den * other.den)

    def __rsub__(self, other):
        return (-self) + other

    def __neg__(self):
        return RatFunc(-self.num, self.den, _canonical=True)

    def __mul__(self, other):
        other = self._coerce(other)
        return RatFunc(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = self._coerce(other)
        if other.num.is_zero:
            raise ZeroDivisionError
        return RatFunc(self.num * other.den, self.den * other.num)

    def __rtruediv__(self, other):
        return self._coerce(other) / self

    def __eq__(self, other):
        other = self._coerce(other)
        return (self.num * other.den) == (other.num * self.den)

    @property
    def valuation_at_0(self) -> int | None:
        """Q-adic valuation; None for the zero function."""
        if self.num.is_zero:
            return None
        return self.num.valuation - self.den.valuation

    def evaluate(self, x):
        d = self.den.evaluate(x)
        if scalar_is_zero(d):
            raise ZeroDivisionError("pole at evaluation point")
        return self.num.evaluate(x) / d

    def at_zero(self):
        return self.evaluate(zero_like(self.one))

    def series(self, D: int) -> list:
        """Taylor coefficients at 0 through order D (needs den(0) != 0)."""
        d0 = self.den.evaluate(zero_like(self.one))
        if scalar_is_zero(d0):
            raise ZeroDivisionError("not analytic at 0")
        inv = one_like(self.one) / d0
        out = []
        for k in range(D + 1):
            acc = self.num.coeff(k)
            for j in range(1, k + 1):
                acc = acc - self.den.coeff(j) * out[k - j]
            out.append(acc * inv)
        return out

    def scale_argument(self, c) -> "RatFunc":
        return RatFunc(self.num.scale_argument(c), self.den.scale_argument(c))

    def map_coeffs(self, fn, one=None) -> "RatFunc":
        return RatFunc(self.num.map_coeffs(fn, one), self.den.map_coeffs(fn, one))

    def __repr__(self):
        return f"RatFunc({self.num!r} / {self.den!r})"


# ---------------------------------------------------------------- matrices


def mat_eye(n: int, one):
    z = zero_like(one)
    return [[one if i == j else z for j in range(n)] for i in range(n)]


def mat_zero(n: int, one):
    z = zero_like(one)
    return [[z for _ in range(n)] for _ in range(n)]


def mat_add(A, B):
    return [[a + b for a, b in zip(ra, rb)] for ra, rb in zip(A, B)]


def mat_sub(A, B):
    return [[a - b for a, b in zip(ra, rb)] for ra, rb in zip(A, B)]


def mat_scale(A, s):
    return [[a * s for a in row] for row in A]


def mat_mul(A, B):
    n, m, p = len(A), len(B), len(B[0])
    out = []
    for i in range(n):
        row = []
        for j in range(p):
            acc = A[i][0] * B[0][j]
            for k in range(1, m):
                acc = acc + A[i][k] * B[k][j]
            row.append(acc)
        out.append(row)
    return out


def mat_map(A, fn):
    return [[fn(a) for a in row] for row in A]


class SingularMatrixError(ZeroDivisionError):
    pass


def _pivot_index(col, start, exact):
    if exact:
        for i in range(start, len(col)):
            if not scalar_is_zero(col[i]):
                return i
        return None
    best, mag = None, 0.0
    for i in range(start, len(col)):
        m = abs(col[i])
        if m > mag:
            best, mag = i, m
    return best if mag > 1e-13 else None


def lin_solve(A, rhs_cols):
    """Solve A X = B by Gauss-Jordan over any field of scalars.

    ``rhs_cols`` is a list of right-hand-side columns; returns the solution
    columns.  Raises :class:`SingularMatrixError` when A is singular.
    """
    n = len(A)
    one = one_like(A[0][0])
    exact = _is_exact(one)
    M = [list(row) + [col[i] for col in rhs_cols] for i, row in enumerate(A)]
    width = n + len(rhs_cols)
    for j in range(n):
        p = _pivot_index([M[i][j] for i in range(n)], j, exact)
        if p is None:
            raise SingularMatrixError(f"singular at column {j}")
        M[j], M[p] = M[p], M[j]
        inv = one / M[j][j]
        M[j] = [x * inv for x in M[j]]
        for i in range(n):
            if i == j:
                continue
            f = M[i][j]
            if scalar_is_zero(f):
                continue
            M[i] = [a - f * b for a, b in zip(M[i], M[j])]
    return [[M[i][n + c] for i in range(n)] for c in range(len(rhs_cols))]


def mat_inv(A):
    n = len(A)
    cols = lin_solve(A, [[one_like(A[0][0]) if i == c else zero_like(A[0][0]) for i in range(n)]
                         for c in range(n)])
    return [[cols[j][i] for j in range(n)] for i in range(n)]


# ---------------------------------------------------------------- matrix series


class MatrixSeries:
    """Truncated power series in Q with square-matrix coefficients."""

    __slots__ = ("truncation", "terms", "one")

    def __init__(self, terms, one):
        self.terms = [mat_map(t, lambda x: x) for t in terms]
        self.truncation = len(terms) - 1
        self.one = one

    @property
    def dim(self) -> int:
        return len(self.terms[0])

    @classmethod
    def identity(cls, n: int, D: int, one) -> "MatrixSeries":
        return cls([mat_eye(n, one)] + [mat_zero(n, one) for _ in range(D)], one)

    def mul(self, other: "MatrixSeries") -> "MatrixSeries":
        D = min(self.truncation, other.truncation)
        out = []
        for m in range(D + 1):
            acc = mat_mul(self.terms[0], other.terms[m])
            for k in range(1, m + 1):
                acc = mat_add(acc, mat_mul(self.terms[k], other.terms[m - k]))
            out.append(acc)
        return MatrixSeries(out, self.one)

    def inverse(self) -> "MatrixSeries":
        g0 = mat_inv(self.terms[0])
        out = [g0]
        for m in range(1, self.truncation + 1):
            acc = mat_mul(self.terms[1], out[m - 1])
            for k in range(2, m + 1):
                acc = mat_add(acc, mat_mul(self.terms[k], out[m - k]))
            out.append(mat_scale(mat_mul(g0, acc), -one_like(self.one)))
        return MatrixSeries(out, self.one)

    def sigma(self, q) -> "MatrixSeries":
        """Entrywise dilation: degree-m term scaled by q^m."""
        out, p = [], one_like(q)
        for m, t in enumerate(self.terms):
            out.append(mat_scale(t, p) if m else t)
            p = p * q
        return MatrixSeries(out, self.one)

    def sub(self, other: "MatrixSeries") -> "MatrixSeries":
        return MatrixSeries([mat_sub(a, b) for a, b in zip(self.terms, other.terms)], self.one)

    def is_zero(self) -> bool:
        return all(all(scalar_is_zero(x) for row in t for x in row) for t in self.terms)

    def map_entries(self, fn, one=None) -> "MatrixSeries":
        return MatrixSeries([mat_map(t, fn) for t in self.terms],
                            one if one is not None else self.one)

    def evaluate(self, x):
        """Horner evaluation; scalars must support arithmetic with x."""
        n = len(self.terms[0])
        acc = [[self.terms[-1][i][j] for j in range(n)] for i in range(n)]
        for m in range(self.truncation - 1, -1, -1):
            acc = mat_add(mat_scale(acc, x), self.terms[m])
        return acc


def ratfunc_matrix_series(A, D: int) -> MatrixSeries:
    """Expand a matrix of rational functions into a truncated matrix series."""
    one = A[0][0].one
    per_entry = [[entry.series(D) for entry in row] for row in A]
    terms = [[[per_entry[i][j][m] for j in range(len(A))] for i in range(len(A))]
             for m in range(D + 1)]
    return MatrixSeries(terms, one)


# ---------------------------------------------------------------- parsing


class _Tokens:
    def __init__(self, text: str):
        self.text = text.replace(" ", "")
        self.pos = 0

    def peek(self):
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def take(self):
        ch = self.peek()
        self.pos += 1
        return ch


def parse_bivariate(text: str) -> RatFunc:
    """Parse an expression in q and Q into a RatFunc over RationalFunctionQ.

    Grammar: rationals, the symbols q and Q, parentheses, and + - * / ^.
    """
    one = RationalFunctionQ.one()
    toks = _Tokens(text)

    def expr():
        node = term()
        while toks.peek() and toks.peek() in "+-":
            op = toks.take()
            rhs = term()
            node = node + rhs if op == "+" else node - rhs
        return node

    def term():
        node = factor()
        while toks.peek() and toks.peek() in "*/":
            op = toks.take()
            rhs = factor()
            node = node * rhs if op == "*" else node / rhs
        return node

    def factor():
        node = base()
        if toks.peek() == "^":
            toks.take()
            sign = 1
            if toks.peek() == "-":
                toks.take()
                sign = -1
            k = integer()
            if sign * k >= 0:
                node = _ratfunc_pow(node, k)
            else:
                node = RatFunc.const(one) / _ratfunc_pow(node, k)
        return node

    def integer():
        digits = ""
        while toks.peek().isdigit():
            digits += toks.take()
        if not digits:
            raise ValueError(f"expected integer at {toks.pos} in {text!r}")
        return int(digits)

    def base():
        ch = toks.peek()
        if ch == "(":
            toks.take()
            node = expr()
            if toks.take() != ")":
                raise ValueError(f"unbalanced parentheses in {text!r}")
            return node
        if ch == "-":
            toks.take()
            return -base()
        if ch == "+":
            toks.take()
            return base()
        if ch == "q":
            toks.take()
            return RatFunc.const(RationalFunctionQ.q(), one)
        if ch == "Q":
            toks.take()
            return RatFunc.variable(one)
        if ch.isdigit() or ch == ".":
            digits = ""
            while toks.peek().isdigit() or toks.peek() == ".":
                digits += toks.take()
            return RatFunc.const(RationalFunctionQ.from_fraction(Fraction(digits)), one)
        raise ValueError(f"unexpected character {ch!r} in {text!r}")

    node = expr()
    if toks.pos != len(toks.text):
        raise ValueError(f"trailing input in {text!r}")
    return node


def _ratfunc_pow(node: RatFunc, k: int) -> RatFunc:
    out = RatFunc.const(node.one)
    for _ in range(k):
        out = out * node
    return out


def format_bivariate(f: RatFunc) -> str:
    """Inverse-ish of :func:`parse_bivariate` for exact-q entries."""

    def poly_str(p: Poly) -> str:
        if p.is_zero:
            return "0"
        parts = []
        for k, c in enumerate(p.coeffs):
            if scalar_is_zero(c):
                continue
            cs = f"({c!r})"
            parts.append(cs if k == 0 else (f"{cs}*Q" if k == 1 else f"{cs}*Q^{k}"))
        return " + ".join(parts)

    if f.den == RatFunc.const(f.one).num:  # denominator 1
        return poly_str(f.num)
    return f"({poly_str(f.num)})/({poly_str(f.den)})"
