"""Exact integer polynomials in one variable and square matrices of them."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np


def _trim(coeffs: Iterable) -> tuple:
    out = list(coeffs)
    while out and out[-1] == 0:
        out.pop()
    return tuple(out)


@dataclass(frozen=True)
class IntPolynomial:
    """Polynomial with integer coefficients, stored in ascending degree.

    The zero polynomial has ``coeffs == ()`` and degree ``-1``.
    """

    coeffs: tuple[int, ...] = ()

    def __post_init__(self):
        for c in self.coeffs:
            if int(c) != c:
                raise ValueError(f"non-integer coefficient {c!r}")
        object.__setattr__(self, "coeffs", _trim(int(c) for c in self.coeffs))

    @classmethod
    def monomial(cls, coeff: int, degree: int) -> "IntPolynomial":
        return cls((0,) * degree + (coeff,))

    @classmethod
    def one(cls) -> "IntPolynomial":
        return cls((1,))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def __getitem__(self, k: int) -> int:
        return self.coeffs[k] if 0 <= k < len(self.coeffs) else 0

    def __iter__(self):
        return iter(self.coeffs)

    def __len__(self):
        return len(self.coeffs)

    def __add__(self, other):
        other = _coerce(other)
        n = max(len(self.coeffs), len(other.coeffs))
        return IntPolynomial(tuple(self[k] + other[k] for k in range(n)))

    __radd__ = __add__

    def __neg__(self):
        return IntPolynomial(tuple(-c for c in self.coeffs))

    def __sub__(self, other):
        return self + (-_coerce(other))

    def __rsub__(self, other):
        return _coerce(other) - self

    def __mul__(self, other):
        other = _coerce(other)
        a, b = self.coeffs, other.coeffs
        if not a or not b:
            return IntPolynomial()
        out = [0] * (len(a) + len(b) - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    if y:
                        out[i + j] += x * y
        return IntPolynomial(tuple(out))

    __rmul__ = __mul__

    def __pow__(self, n: int):
        out = IntPolynomial.one()
        for _ in range(n):
            out = out * self
        return out

    def __call__(self, t):
        acc = 0 * t
        for c in reversed(self.coeffs):
            acc = acc * t + c
        return acc

    def exact_div(self, other: "IntPolynomial") -> "IntPolynomial":
        """Quotient of an exact division in Z[t]; raises if there is a remainder."""
        if other.is_zero():
            raise ZeroDivisionError("division by the zero polynomial")
        rem = list(self.coeffs)
        db = other.degree
        lead = other.coeffs[-1]
        if len(rem) - 1 < db:
            if rem:
                raise ArithmeticError("inexact polynomial division")
            return IntPolynomial()
        quot = [0] * (len(rem) - db)
        for k in range(len(rem) - 1 - db, -1, -1):
            c = rem[k + db]
            if c == 0:
                continue
            q, r = divmod(c, lead)
            if r:
                raise ArithmeticError("inexact polynomial division")
            quot[k] = q
            for j, b in enumerate(other.coeffs):
                rem[k + j] -= q * b
        if any(rem):
            raise ArithmeticError("inexact polynomial division")
        return IntPolynomial(tuple(quot))

    def derivative(self) -> "IntPolynomial":
        return IntPolynomial(tuple(k * c for k, c in enumerate(self.coeffs) if k))

    def series_inverse(self, order: int) -> list[int]:
        """Coefficients 0..order of the formal power series 1/self.

        Requires a unit constant term (+1 or -1) so the inverse stays integral.
        """
        c0 = self[0]
        if c0 not in (1, -1):
            raise ValueError("constant term must be +1 or -1")
        out = [0] * (order + 1)
        for k in range(order + 1):
            acc = 1 if k == 0 else 0
            for j in range(1, min(k, self.degree) + 1):
                acc -= self.coeffs[j] * out[k - j]
            out[k] = acc * c0
        return out

    def squarefree_part(self) -> "IntPolynomial":
        """Primitive polynomial with the same complex roots, each of multiplicity one."""
        if self.degree <= 0:
            return self
        g = _gcd_rational(self.coeffs, self.derivative().coeffs)
        if len(g) <= 1:
            return self
        quot = _divide_rational(self.coeffs, g)
        return IntPolynomial(_primitive(quot))

    def to_text(self, var: str = "t") -> str:
        """Signed ascending terms, e.g. ``1 -5t^2 +8t^4``."""
        terms = []
        for k, c in enumerate(self.coeffs):
            if c == 0:
                continue
            if k == 0:
                body = str(abs(c))
            else:
                mag = "" if abs(c) == 1 else str(abs(c))
                body = mag + var + ("" if k == 1 else f"^{k}")
            sign = "-" if c < 0 else "+"
            if not terms:
                terms.append(body if c > 0 else "-" + body)
            else:
                terms.append(sign + body)
        return " ".join(terms) if terms else "0"

    def __str__(self):
        return self.to_text()


def _coerce(x) -> IntPolynomial:
    if isinstance(x, IntPolynomial):
        return x
    if isinstance(x, int):
        return IntPolynomial((x,))
    return NotImplemented


# rational helpers for gcd / squarefree computation

def _divmod_rational(a: Sequence, b: Sequence) -> tuple[list, list]:
    a = [Fraction(x) for x in a]
    b = [Fraction(x) for x in _trim(b)]
    db = len(b) - 1
    if len(a) - 1 < db:
        return [], list(_trim(a))
    quot = [Fraction(0)] * (len(a) - db)
    for k in range(len(a) - 1 - db, -1, -1):
        q = a[k + db] / b[-1]
        quot[k] = q
        if q:
            for j, y in enumerate(b):
                a[k + j] -= q * y
    return list(_trim(quot)), list(_trim(a[:db]))


def _gcd_rational(a: Sequence, b: Sequence) -> tuple:
    a, b = _trim(Fraction(x) for x in a), _trim(Fraction(x) for x in b)
    while b:
        _, r = _divmod_rational(a, b)
        a, b = b, tuple(r)
    return a


def _divide_rational(a: Sequence, b: Sequence) -> list:
    q, r = _divmod_rational(a, b)
    if r:
        raise ArithmeticError("inexact rational division")
    return q


def _primitive(coeffs: Sequence) -> tuple[int, ...]:
    from math import gcd, lcm

    fr = [Fraction(c) for c in coeffs]
    den = lcm(*(c.denominator for c in fr)) if fr else 1
    ints = [int(c * den) for c in fr]
    g = gcd(*ints) if ints else 1
    ints = [c // g for c in ints]
    if ints and ints[0] < 0:
        ints = [-c for c in ints]
    return tuple(ints)


# polynomial matrices

@dataclass(frozen=True)
class PolyMatrix:
    """Square matrix of :class:`IntPolynomial` entries with labelled rows/columns."""

    labels: tuple[str, ...]
    entries: tuple[tuple[IntPolynomial, ...], ...]

    def __post_init__(self):
        n = len(self.labels)
        if len(self.entries) != n or any(len(row) != n for row in self.entries):
            raise ValueError("PolyMatrix must be square and match its labels")

    @property
    def size(self) -> int:
        return len(self.labels)

    def __getitem__(self, ij: tuple[int, int]) -> IntPolynomial:
        i, j = ij
        return self.entries[i][j]

    def entry(self, row: str, col: str) -> IntPolynomial:
        return self.entries[self.labels.index(row)][self.labels.index(col)]

    def max_degree(self) -> int:
        return max((p.degree for row in self.entries for p in row), default=-1)

    def coefficient_matrices(self) -> list[np.ndarray]:
        """Integer coefficient matrices ``[M_0, M_1, ...]`` with ``self = sum M_k t^k``."""
        d = self.max_degree()
        out = [np.zeros((self.size, self.size), dtype=object) for _ in range(d + 1)]
        for i, row in enumerate(self.entries):
            for j, p in enumerate(row):
                for k, c in enumerate(p.coeffs):
                    out[k][i, j] = c
        return out

    def at(self, t: float) -> np.ndarray:
        return np.array([[float(p(t)) for p in row] for row in self.entries], dtype=float)

    def det(self) -> IntPolynomial:
        return det_bareiss(self.entries)


def det_bareiss(rows: Sequence[Sequence[IntPolynomial]]) -> IntPolynomial:
    """Determinant by fraction-free (Bareiss) elimination over Z[t]."""
    n = len(rows)
    if n == 0:
        return IntPolynomial.one()
    m = [list(r) for r in rows]
    sign = 1
    prev = IntPolynomial.one()
    for k in range(n - 1):
        if m[k][k].is_zero():
            for i in range(k + 1, n):
                if not m[i][k].is_zero():
                    m[k], m[i] = m[i], m[k]
                    sign = -sign
                    break
            else:
                return IntPolynomial()
        pivot = m[k][k]
        for i in range(k + 1, n):
            mik = m[i][k]
            for j in range(k + 1, n):
                num = m[i][j] * pivot - mik * m[k][j]
                m[i][j] = num.exact_div(prev)
            m[i][k] = IntPolynomial()
        prev = pivot
    det = m[n - 1][n - 1]
    return det if sign > 0 else -det


def det_cofactor(rows: Sequence[Sequence[IntPolynomial]]) -> IntPolynomial:
    """Determinant by Laplace expansion along the first row (memoised on column sets).

    Exponential; meant as an independent check on small matrices.
    """
    n = len(rows)
    memo: dict[tuple[int, int], IntPolynomial] = {}

    def minor(r: int, cols: int) -> IntPolynomial:
        if r == n:
            return IntPolynomial.one()
        key = (r, cols)
        if key in memo:
            return memo[key]
        acc = IntPolynomial()
        sign = 1
        for j in range(n):
            if cols >> j & 1:
                entry = rows[r][j]
                if not entry.is_zero():
                    term = entry * minor(r + 1, cols & ~(1 << j))
                    acc = acc + term if sign > 0 else acc - term
                sign = -sign
        memo[key] = acc
        return acc

    return minor(0, (1 << n) - 1)
