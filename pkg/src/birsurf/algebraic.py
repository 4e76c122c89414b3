"""Exact real algebraic numbers for spectral data.

Characteristic polynomials are computed division-free (Berkowitz), factored
into irreducible integer polynomials, and real roots are carried around as
(minimal polynomial, isolating interval) pairs.  Arithmetic in Q(lambda)
reduces modulo the minimal polynomial; every sign query is decided exactly
by shrinking the isolating interval with Sturm counts.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from . import univariate as uv


def charpoly(matrix: Sequence[Sequence]) -> list:
    """Coefficients (ascending) of det(t*I - M) by the Berkowitz algorithm."""
    n = len(matrix)
    if n == 0:
        return [1]
    rows = [[Fraction(v) if not isinstance(v, (int, Fraction)) else v
             for v in row] for row in matrix]
    if any(len(row) != n for row in rows):
        raise ValueError("matrix must be square")

    vect = [1, -rows[0][0]]
    for i in range(1, n):
        r = rows[i][:i]
        c = [rows[k][i] for k in range(i)]
        m = [row[:i] for row in rows[:i]]
        # S[k] = r . m^k . c for k = 0 .. i-1
        s = []
        w = c
        for _ in range(i):
            s.append(sum(a * b for a, b in zip(r, w)))
            w = [sum(m[row][col] * w[col] for col in range(i)) for row in range(i)]
        col = [1, -rows[i][i]] + [-v for v in s]
        new = [0] * (i + 2)
        for j in range(i + 2):
            acc = 0
            for k in range(min(j, len(vect) - 1) + 1):
                if j - k < len(col):
                    acc += col[j - k] * vect[k]
            new[j] = acc
        vect = new
    # vect holds descending coefficients of det(tI - M)
    return uv.trim([c for c in reversed(vect)])


def factor_int_poly(coeffs: Sequence) -> list[tuple[list[int], int]]:
    """Irreducible integer factors with multiplicities (unit dropped)."""
    import sympy

    prim = uv.to_int_poly(coeffs)
    t = sympy.Symbol("t")
    poly = sympy.Poly(list(reversed(prim)), t, domain="QQ")
    _, factors = poly.factor_list()
    out = []
    for fac, mult in factors:
        fc = [int(c) for c in reversed(fac.all_coeffs())]
        fc = uv.to_int_poly(fc)
        out.append((fc, int(mult)))
    # exactness guard: the factorization must multiply back
    check = [1]
    for fc, mult in out:
        for _ in range(mult):
            check = uv.mul(check, fc)
    assert uv.to_int_poly(check) == prim, "factorization mismatch"
    return out


@dataclass(frozen=True)
class RealAlgebraic:
    """A real root of an irreducible integer polynomial.

    ``minpoly`` has ascending integer coefficients with positive leading
    coefficient and content 1; rational numbers use their degree-1 minimal
    polynomial and the interval degenerates to the point.
    """

    minpoly: tuple[int, ...]
    lo: Fraction
    hi: Fraction

    @classmethod
    def from_rational(cls, value) -> "RealAlgebraic":
        value = Fraction(value)
        return cls((-value.numerator, value.denominator), value, value)

    @property
    def degree(self) -> int:
        return len(self.minpoly) - 1

    def is_rational(self) -> bool:
        return self.degree == 1

    def as_fraction(self) -> Fraction:
        if not self.is_rational():
            raise ValueError("not a rational number")
        return Fraction(-self.minpoly[0], self.minpoly[1])

    def interval(self, max_width: Fraction | None = None) -> tuple[Fraction, Fraction]:
        if self.is_rational():
            v = self.as_fraction()
            return v, v
        lo, hi = self.lo, self.hi
        if max_width is not None:
            chain = uv.sturm_chain(list(self.minpoly))
            lo, hi = uv.refine_interval(chain, lo, hi, max_width)
        return lo, hi

    def compare_rational(self, value) -> int:
        """Sign of (self - value), exactly."""
        value = Fraction(value)
        if self.is_rational():
            mine = self.as_fraction()
            return (mine > value) - (mine < value)
        # an irrational root never equals a rational probe, so refining the
        # isolating interval eventually pushes the probe outside
        lo, hi = self.lo, self.hi
        chain = uv.sturm_chain(list(self.minpoly))
        while lo < value < hi:
            lo, hi = uv.refine_interval(chain, lo, hi, (hi - lo) / 2)
        return -1 if hi <= value else 1

    def compare(self, other: "RealAlgebraic") -> int:
        if self.is_rational():
            return -other.compare_rational(self.as_fraction())
        if other.is_rational():
            return self.compare_rational(other.as_fraction())
        if self.minpoly == other.minpoly:
            ilo, ihi = max(self.lo, other.lo), min(self.hi, other.hi)
            if ilo < ihi:
                chain = uv.sturm_chain(list(self.minpoly))
                if uv.count_roots(chain, ilo, ihi) >= 1:
                    # each interval isolates one root; a root common to both
                    # intervals is that root for both, so the values coincide
                    return 0
        chain_a = uv.sturm_chain(list(self.minpoly))
        chain_b = uv.sturm_chain(list(other.minpoly))
        alo, ahi, blo, bhi = self.lo, self.hi, other.lo, other.hi
        while not (ahi <= blo or bhi <= alo):
            alo, ahi = uv.refine_interval(chain_a, alo, ahi, (ahi - alo) / 2)
            blo, bhi = uv.refine_interval(chain_b, blo, bhi, (bhi - blo) / 2)
        return -1 if ahi <= blo else 1

    def to_json(self) -> dict:
        if self.is_rational():
            from .polynomials import rat_str
            return {"rational": rat_str(self.as_fraction())}
        from .polynomials import rat_str
        return {
            "minimal_polynomial": list(self.minpoly),
            "isolating_interval": [rat_str(self.lo), rat_str(self.hi)],
        }

    def __str__(self) -> str:
        if self.is_rational():
            from .polynomials import rat_str
            return rat_str(self.as_fraction())
        return f"root of {list(self.minpoly)} in ({self.lo}, {self.hi}]"


def real_roots(int_coeffs: Sequence) -> list[RealAlgebraic]:
    """All real roots (without multiplicity) as RealAlgebraic values."""
    out: list[RealAlgebraic] = []
    for factor, _mult in factor_int_poly(int_coeffs):
        if len(factor) == 2:
            out.append(RealAlgebraic.from_rational(Fraction(-factor[0], factor[1])))
            continue
        for lo, hi in uv.isolate_real_roots(factor):
            out.append(RealAlgebraic(tuple(factor), lo, hi))
    out.sort(key=_sort_key)
    return out


def _sort_key(r: RealAlgebraic):
    lo, hi = r.interval(Fraction(1, 1024))
    return (lo + hi) / 2


def largest_real_root(int_coeffs: Sequence) -> RealAlgebraic | None:
    roots = real_roots(int_coeffs)
    if not roots:
        return None
    best = roots[0]
    for r in roots[1:]:
        if r.compare(best) > 0:
            best = r
    return best


class NumberField:
    """Q(alpha) for a fixed real root alpha of an irreducible polynomial."""

    def __init__(self, root: RealAlgebraic):
        if root.is_rational():
            raise ValueError("use plain Fractions for rational values")
        self.root = root
        self.minpoly = [Fraction(c) for c in root.minpoly]
        self.degree = len(self.minpoly) - 1
        self._chain = uv.sturm_chain(list(root.minpoly))
        self._lo = root.lo
        self._hi = root.hi

    def element(self, coeffs) -> "NFElement":
        vec = [Fraction(c) for c in coeffs]
        if len(vec) >= self.degree + 1:
            vec = uv.rem(vec, self.minpoly)
        return NFElement(self, uv.trim(vec))

    def generator(self) -> "NFElement":
        return self.element([0, 1])

    def sign(self, coeffs: Sequence) -> int:
        """Exact sign of q(alpha) for a rational-coefficient q."""
        q = uv.rem(uv.trim(list(coeffs)), self.minpoly)
        if not q:
            return 0
        if len(q) == 1:
            return 1 if q[0] > 0 else -1
        # q(alpha) != 0 because deg q < deg minpoly and minpoly is irreducible
        qs = uv.squarefree(q) if uv.degree(q) >= 1 else q
        qchain = uv.sturm_chain(qs)
        lo, hi = self._lo, self._hi
        while uv.count_roots(qchain, lo, hi) != 0:
            lo, hi = uv.refine_interval(self._chain, lo, hi, (hi - lo) / 2)
        self._lo, self._hi = lo, hi
        mid = (lo + hi) / 2
        val = uv.evaluate(q, mid)
        if val == 0:  # midpoint hit a rational root of q; nudge once
            mid = (lo + mid) / 2
            val = uv.evaluate(q, mid)
        return 1 if val > 0 else -1


class NFElement:
    """An element of a NumberField, represented modulo the minimal polynomial."""

    __slots__ = ("field", "coeffs")

    def __init__(self, field: NumberField, coeffs):
        self.field = field
        self.coeffs = uv.trim([Fraction(c) for c in coeffs])

    def _lift(self, other) -> "NFElement":
        if isinstance(other, NFElement):
            if other.field is not self.field:
                raise ValueError("elements of different fields")
            return other
        return self.field.element([Fraction(other)])

    def is_zero(self) -> bool:
        return not self.coeffs

    def is_rational(self) -> bool:
        return len(self.coeffs) <= 1

    def as_fraction(self) -> Fraction:
        if not self.is_rational():
            raise ValueError("not rational")
        return self.coeffs[0] if self.coeffs else Fraction(0)

    def __eq__(self, other):
        try:
            other = self._lift(other)
        except (TypeError, ValueError):
            return NotImplemented
        return self.coeffs == other.coeffs

    def __add__(self, other):
        other = self._lift(other)
        return NFElement(self.field, uv.add(self.coeffs, other.coeffs))

    __radd__ = __add__

    def __neg__(self):
        return NFElement(self.field, uv.neg(self.coeffs))

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        other = self._lift(other)
        prod = uv.mul(self.coeffs, other.coeffs)
        return NFElement(self.field, uv.rem(prod, self.field.minpoly))

    __rmul__ = __mul__

    def inverse(self) -> "NFElement":
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero")
        g, s, _ = uv.xgcd(self.coeffs, self.field.minpoly)
        assert uv.degree(g) == 0, "minimal polynomial must be irreducible"
        return NFElement(self.field, uv.scale(s, 1 / Fraction(g[0])))

    def __truediv__(self, other):
        return self * self._lift(other).inverse()

    def sign(self) -> int:
        return self.field.sign(self.coeffs)

    def __str__(self):
        from .polynomials import rat_str
        if self.is_rational():
            return rat_str(self.as_fraction())
        return " + ".join(f"{rat_str(c)}*L^{i}" if i else rat_str(c)
                          for i, c in enumerate(self.coeffs) if c != 0)

    def __repr__(self):
        return f"<NFElement {self}>"

    def to_json(self):
        from .polynomials import rat_str
        return [rat_str(c) for c in self.coeffs] if self.coeffs else ["0"]
