"""Exact rational matrices, unipotent coset normal forms, and exponential
sums kept as exact phase multisets.

Everything downstream works over Q with fractions.Fraction, which is already
canonical (reduced, positive denominator), so equality and hashing are
structural for free.  Floating point appears only as a *view* of a PhaseSum,
never as a source of truth.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache

import mpmath


def as_fraction(x) -> Fraction:
    """Coerce ints / Fractions / 'a/b' strings to Fraction."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    raise TypeError(f"not an exact rational: {x!r}")


def frac_mod1(x) -> Fraction:
    """Reduce an exact rational into [0, 1)."""
    x = as_fraction(x)
    return x - (x.numerator // x.denominator)


class ExactMatrix:
    """Immutable n x n matrix of exact rationals."""

    __slots__ = ("n", "rows", "_hash")

    def __init__(self, rows):
        rows = tuple(tuple(as_fraction(e) for e in r) for r in rows)
        n = len(rows)
        if n < 1 or any(len(r) != n for r in rows):
            raise ValueError("square matrix required")
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "_hash", None)

    def __setattr__(self, *a):
        raise AttributeError("ExactMatrix is immutable")

    @staticmethod
    def identity(n: int) -> "ExactMatrix":
        return ExactMatrix([[1 if i == j else 0 for j in range(n)] for i in range(n)])

    @staticmethod
    def diagonal(entries) -> "ExactMatrix":
        entries = list(entries)
        n = len(entries)
        return ExactMatrix(
            [[entries[i] if i == j else 0 for j in range(n)] for i in range(n)]
        )

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def __eq__(self, other):
        return isinstance(other, ExactMatrix) and self.rows == other.rows

    def __hash__(self):
        h = self._hash
        if h is None:
            h = hash(self.rows)
            object.__setattr__(self, "_hash", h)
        return h

    def __repr__(self):
        body = "; ".join(" ".join(str(e) for e in r) for r in self.rows)
        return f"ExactMatrix[{body}]"

    def __mul__(self, other: "ExactMatrix") -> "ExactMatrix":
        if self.n != other.n:
            raise ValueError("dimension mismatch")
        n = self.n
        a, b = self.rows, other.rows
        return ExactMatrix(
            [
                [sum(a[i][k] * b[k][j] for k in range(n)) for j in range(n)]
                for i in range(n)
            ]
        )

    def transpose(self) -> "ExactMatrix":
        n = self.n
        return ExactMatrix([[self.rows[j][i] for j in range(n)] for i in range(n)])

    def scale(self, s) -> "ExactMatrix":
        s = as_fraction(s)
        return ExactMatrix([[s * e for e in r] for r in self.rows])

    def det(self) -> Fraction:
        """Determinant by fraction-exact Gaussian elimination."""
        n = self.n
        m = [list(r) for r in self.rows]
        det = Fraction(1)
        for col in range(n):
            piv = next((r for r in range(col, n) if m[r][col] != 0), None)
            if piv is None:
                return Fraction(0)
            if piv != col:
                m[col], m[piv] = m[piv], m[col]
                det = -det
            det *= m[col][col]
            inv = 1 / m[col][col]
            for r in range(col + 1, n):
                if m[r][col] != 0:
                    f = m[r][col] * inv
                    for c in range(col, n):
                        m[r][c] -= f * m[col][c]
        return det

    def inverse(self) -> "ExactMatrix":
        n = self.n
        m = [list(r) + [Fraction(int(i == j)) for j in range(n)] for i, r in enumerate(self.rows)]
        for col in range(n):
            piv = next((r for r in range(col, n) if m[r][col] != 0), None)
            if piv is None:
                raise ZeroDivisionError("singular matrix")
            m[col], m[piv] = m[piv], m[col]
            inv = 1 / m[col][col]
            m[col] = [e * inv for e in m[col]]
            for r in range(n):
                if r != col and m[r][col] != 0:
                    f = m[r][col]
                    m[r] = [e - f * p for e, p in zip(m[r], m[col])]
        return ExactMatrix([r[n:] for r in m])

    def minor(self, rows, cols) -> Fraction:
        """Determinant of the submatrix on the given row/column index sets."""
        rows, cols = sorted(rows), sorted(cols)
        return ExactMatrix([[self.rows[i][j] for j in cols] for i in rows]).det()

    def is_integral(self) -> bool:
        return all(e.denominator == 1 for r in self.rows for e in r)

    def is_upper_unitriangular(self) -> bool:
        n = self.n
        return all(
            (self.rows[i][j] == (1 if i == j else 0)) for i in range(n) for j in range(i + 1)
        )

    def entries_mod(self, p: int):
        """Integer matrix of entries reduced mod p; requires integrality."""
        if not self.is_integral():
            raise ValueError("matrix is not integral")
        return [[int(e) % p for e in r] for r in self.rows]


# ---------------------------------------------------------------------------
# unipotent coset normal forms
# ---------------------------------------------------------------------------

def _check_unitriangular(x: ExactMatrix):
    if not x.is_upper_unitriangular():
        raise ValueError("not upper unitriangular")


def unipotent_normal_form_left(x: ExactMatrix):
    """Reduce x in U(Q) modulo U(Z) on the left: x = gamma * xhat.

    gamma is integral unipotent and every strictly-upper entry of xhat lies
    in [0, 1).  Reduction runs through superdiagonal offsets d = 1, ..., n-1
    in increasing order; a row operation at offset d only touches offsets
    >= d, so the representative is canonical.
    """
    _check_unitriangular(x)
    n = x.n
    m = [list(r) for r in x.rows]
    for d in range(1, n):
        for i in range(n - d):
            k = i + d
            c = m[i][k].numerator // m[i][k].denominator
            if c:
                for j in range(k, n):
                    m[i][j] -= c * m[k][j]
    xhat = ExactMatrix(m)
    gamma = x * xhat.inverse()
    if not gamma.is_integral():
        raise AssertionError("left normal form produced a non-integral cofactor")
    return gamma, xhat


def u_pattern_full(n: int):
    return frozenset((i, j) for i in range(n) for j in range(i + 1, n))


def unipotent_normal_form_right(y: ExactMatrix, pattern):
    """Reduce y modulo the integral points of the unipotent group supported
    on `pattern` (a transitively closed set of strictly-upper positions),
    acting on the right: y = yhat * gamma.

    y must itself be supported on the pattern.  Free entries of yhat lie in
    [0, 1).
    """
    _check_unitriangular(y)
    n = y.n
    pattern = frozenset(pattern)
    for i in range(n):
        for j in range(i + 1, n):
            if y.rows[i][j] != 0 and (i, j) not in pattern:
                raise ValueError(f"entry {(i, j)} outside the support pattern")
    m = [list(r) for r in y.rows]
    for d in range(1, n):
        for i in range(n - d):
            k = i + d
            if (i, k) not in pattern:
                continue
            c = m[i][k].numerator // m[i][k].denominator
            if c:
                # col_k -= c * col_i; only offsets >= d are touched
                for r in range(i + 1):
                    m[r][k] -= c * m[r][i]
    yhat = ExactMatrix(m)
    gamma = yhat.inverse() * y
    if not gamma.is_integral():
        raise AssertionError("right normal form produced a non-integral cofactor")
    return yhat, gamma


def crt_split(c: int, q: int):
    """Split c = c_q * c' with c_q = (c, q^infinity) and gcd(c', q) = 1."""
    if c < 1 or q < 1:
        raise ValueError("positive integers required")
    cq, rest = 1, c
    while True:
        g = math.gcd(rest, q)
        if g == 1:
            return cq, rest
        while rest % g == 0:
            rest //= g
            cq *= g


# ---------------------------------------------------------------------------
# exact phase sums
# ---------------------------------------------------------------------------

@lru_cache(maxsize=None)
def cyclotomic_coeffs(L: int):
    """Coefficient tuple (ascending degree) of the L-th cyclotomic polynomial,
    computed by exact division of x^L - 1 by the Phi_d for proper divisors d.
    """
    if L == 1:
        return (-1, 1)
    poly = [-1] + [0] * (L - 1) + [1]
    for d in range(1, L):
        if L % d == 0:
            div = cyclotomic_coeffs(d)
            poly = _polydiv_exact(poly, list(div))
    return tuple(poly)


def _polydiv_exact(num, den):
    """Exact division of integer polynomials (ascending coeffs); remainder
    must vanish."""
    num = list(num)
    out = [0] * (len(num) - len(den) + 1)
    for k in range(len(out) - 1, -1, -1):
        c = num[k + len(den) - 1]
        if c % den[-1]:
            raise ArithmeticError("non-exact polynomial division")
        c //= den[-1]
        out[k] = c
        if c:
            for i, d in enumerate(den):
                num[k + i] -= c * d
    if any(num[: len(den) - 1]):
        raise ArithmeticError("nonzero remainder")
    return out


def _reduce_root_powers(coeffs, L: int):
    """Reduce sum_k coeffs[k] * zeta_L^k modulo Phi_L; returns a tuple of
    deg(Phi_L) integers that is zero iff the algebraic number is zero."""
    phi = cyclotomic_coeffs(L)
    deg = len(phi) - 1
    work = list(coeffs) + [0] * max(0, deg - len(coeffs))
    for k in range(len(work) - 1, deg - 1, -1):
        c = work[k]
        if c:
            work[k] = 0
            # zeta^k = -(phi[0..deg-1]/phi[deg]) * zeta^{k-deg}; phi is monic
            for i in range(deg):
                work[k - deg + i] -= c * phi[i]
    return tuple(work[:deg])


class PhaseSum:
    """Finite multiset of rational phases with signed integer multiplicities,
    representing  sum_phi  m_phi * e(phi)  with e(x) = exp(2 pi i x)."""

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        acc = {}
        if terms:
            items = terms.items() if isinstance(terms, dict) else terms
            for ph, mult in items:
                ph = frac_mod1(ph)
                mult = int(mult)
                if mult:
                    acc[ph] = acc.get(ph, 0) + mult
                    if not acc[ph]:
                        del acc[ph]
        self.terms = acc

    @staticmethod
    def zero() -> "PhaseSum":
        return PhaseSum()

    @staticmethod
    def single(phase, mult: int = 1) -> "PhaseSum":
        return PhaseSum([(phase, mult)])

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        return isinstance(other, PhaseSum) and self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __repr__(self):
        body = ", ".join(
            f"{ph}:{m}" for ph, m in sorted(self.terms.items())
        )
        return f"PhaseSum({{{body}}})"

    def merge(self, other: "PhaseSum") -> "PhaseSum":
        out = dict(self.terms)
        for ph, m in other.terms.items():
            out[ph] = out.get(ph, 0) + m
            if not out[ph]:
                del out[ph]
        s = PhaseSum()
        s.terms.update(out)
        return s

    def __add__(self, other):
        return self.merge(other)

    def negate_phases(self) -> "PhaseSum":
        """Complex conjugate: phi -> -phi mod 1."""
        return PhaseSum([(-ph, m) for ph, m in self.terms.items()])

    def shift(self, phase) -> "PhaseSum":
        """Multiply by e(phase)."""
        phase = frac_mod1(phase)
        return PhaseSum([(ph + phase, m) for ph, m in self.terms.items()])

    def product(self, other: "PhaseSum") -> "PhaseSum":
        out = []
        for p1, m1 in self.terms.items():
            for p2, m2 in other.terms.items():
                out.append((p1 + p2, m1 * m2))
        return PhaseSum(out)

    def total_multiplicity(self) -> int:
        return sum(abs(m) for m in self.terms.values())

    def phase_lcm(self) -> int:
        L = 1
        for ph in self.terms:
            L = L * ph.denominator // math.gcd(L, ph.denominator)
        return L

    def root_coeff_vector(self):
        """(L, reduced coefficient tuple in Z[x]/Phi_L): exact canonical form
        of the complex value.  Equal values give equal vectors at equal L."""
        L = self.phase_lcm()
        coeffs = [0] * L
        for ph, m in self.terms.items():
            coeffs[ph.numerator * (L // ph.denominator)] += m
        return L, _reduce_root_powers(coeffs, L)

    def value_equals(self, other: "PhaseSum") -> bool:
        """Exact equality of the complex values (not of the multisets)."""
        diff = self.merge(other.__class__([(ph, -m) for ph, m in other.terms.items()]))
        if not diff.terms:
            return True
        _, vec = diff.root_coeff_vector()
        return not any(vec)

    def is_zero_value(self) -> bool:
        return self.value_equals(PhaseSum())

    def rational_value(self):
        """The exact value as a Fraction if it is rational, else None."""
        if not self.terms:
            return Fraction(0)
        L, vec = self.root_coeff_vector()
        if any(vec[1:]):
            return None
        # constant coefficient lives in Z for any L (Phi_L has integer coeffs)
        return Fraction(vec[0])


def phase_sum_eval(s: PhaseSum, precision: int):
    """Numeric view of a PhaseSum.

    Returns (value, error_bound) with |value - exact| <= error_bound
    = 10^-precision.  Each e(phi) is evaluated with enough guard digits to
    absorb the total multiplicity.
    """
    if precision < 1:
        raise ValueError("precision >= 1 required")
    total = s.total_multiplicity()
    guard = max(1, math.ceil(math.log10(total))) if total else 1
    with mpmath.workdps(precision + guard + 5):
        acc = mpmath.mpc(0)
        for ph, m in sorted(s.terms.items()):
            acc += m * mpmath.e ** (2j * mpmath.pi * mpmath.mpf(ph.numerator) / ph.denominator)
        value = complex(acc)
    return value, 10.0 ** (-precision)


def phase_sum_abs(s: PhaseSum, precision: int = 30) -> float:
    value, _ = phase_sum_eval(s, precision)
    return abs(value)
