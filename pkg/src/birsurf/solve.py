"""Rational solutions of small bivariate polynomial systems.

Elimination is by resultants: the resultant of two polynomials lies in the
ideal they generate, so every common zero kills it.  Candidate coordinates
are therefore complete for points with rational coordinates; each candidate
is verified by exact evaluation.  Elimination factors that do not split off
rational roots are reported (they witness possible solutions in extensions
of Q), never silently dropped.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from . import univariate as uv
from .polynomials import (Poly, PolyRing, exact_divide, gcd, gcd_many,
                          make_poly, rat_str)


class InfiniteZeroSetError(Exception):
    """The system's zero set contains a curve (nonconstant overall gcd)."""

    def __init__(self, common: Poly):
        super().__init__(f"common factor {common}")
        self.common = common


@dataclass(frozen=True)
class ResidualFactor:
    """A nonsplit elimination factor, with enough context to chase it."""

    variable: str
    poly: str
    degree: int
    specialized_at: str | None = None
    confirmed: bool = False

    def to_json(self) -> dict:
        return {
            "variable": self.variable,
            "poly": self.poly,
            "degree": self.degree,
            "specialized_at": self.specialized_at,
            "confirmed": self.confirmed,
        }


@dataclass
class SolveResult:
    points: list[tuple[Fraction, Fraction]]
    residual: list[ResidualFactor] = field(default_factory=list)


# -- resultants ---------------------------------------------------------------


def _coeffs_in(p: Poly, name: str) -> list[Poly]:
    """Coefficient list of p viewed as a polynomial in ``name``."""
    ring = p.ring
    i = ring.var_index(name)
    sh = ring._shift[i]
    d = p.degree_in(name)
    buckets: list[dict] = [dict() for _ in range(max(d, 0) + 1)]
    for k, c in p._terms.items():
        e = (k >> sh) & 0xFFFF
        buckets[e][k - (e << sh)] = c
    return [make_poly(ring, b) for b in buckets]


def _bareiss_det(matrix: list[list[Poly]], ring: PolyRing) -> Poly:
    """Fraction-free determinant for a matrix of polynomials."""
    n = len(matrix)
    if n == 0:
        return ring.one()
    m = [row[:] for row in matrix]
    sign = 1
    prev = ring.one()
    for k in range(n - 1):
        if m[k][k].is_zero():
            pivot_row = next((i for i in range(k + 1, n)
                              if not m[i][k].is_zero()), None)
            if pivot_row is None:
                return ring.zero()
            m[k], m[pivot_row] = m[pivot_row], m[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                num = m[i][j] * m[k][k] - m[i][k] * m[k][j]
                q = exact_divide(num, prev)
                assert q is not None, "Bareiss division must be exact"
                m[i][j] = q
            m[i][k] = ring.zero()
        prev = m[k][k]
    return m[n - 1][n - 1] * sign


def resultant(p: Poly, q: Poly, name: str) -> Poly:
    """Resultant of p and q with respect to the variable ``name``."""
    if p.ring != q.ring:
        raise ValueError("polynomial rings differ")
    ring = p.ring
    cp = _coeffs_in(p, name)
    cq = _coeffs_in(q, name)
    m, n = len(cp) - 1, len(cq) - 1
    if m < 0 or n < 0:
        raise ValueError("resultant of the zero polynomial")
    if m == 0:
        return cp[0] ** n
    if n == 0:
        return cq[0] ** m
    size = m + n
    rows: list[list[Poly]] = []
    for i in range(n):
        row = [ring.zero()] * size
        for j, c in enumerate(reversed(cp)):
            row[i + j] = c
        rows.append(row)
    for i in range(m):
        row = [ring.zero()] * size
        for j, c in enumerate(reversed(cq)):
            row[i + j] = c
        rows.append(row)
    return _bareiss_det(rows, ring)


# -- the solver ----------------------------------------------------------------


def _to_dense_univariate(p: Poly, name: str) -> list:
    coeffs = _coeffs_in(p, name)
    out = []
    for c in coeffs:
        if not c.is_constant():
            raise ValueError(f"{p} is not univariate in {name}")
        out.append(c.constant_coefficient())
    return uv.trim(out)


def _combination_pairs(k: int):
    """Deterministic small-coefficient combination pairs for k polynomials."""
    singles = []
    for i in range(k):
        e = [0] * k
        e[i] = 1
        singles.append(tuple(e))
    for i in range(k):
        for j in range(i + 1, k):
            yield singles[i], singles[j]
    patterns = [
        (tuple(1 for _ in range(k)), tuple((i + 1) for i in range(k))),
        (tuple((i + 1) for i in range(k)), tuple((k - i) for i in range(k))),
        (tuple(1 if i % 2 == 0 else 2 for i in range(k)),
         tuple(3 if i % 2 else 1 for i in range(k))),
        (tuple((i * i + 1) for i in range(k)), tuple((2 * i + 1) for i in range(k))),
    ]
    for u, v in patterns:
        yield u, v


def _combine(polys: Sequence[Poly], weights: Sequence[int]) -> Poly:
    acc = polys[0].ring.zero()
    for w, p in zip(weights, polys):
        if w:
            acc = acc + p * w
        # mixing keeps coefficients small and the pair deterministic
    return acc


def _strip_rational_roots(dense: list) -> tuple[list[tuple[Fraction, int]], list]:
    roots = uv.rational_roots(dense)
    rest = dense
    for r, mult in roots:
        linear = [-r.numerator, r.denominator]
        for _ in range(mult):
            q = uv.exact_div(rest, linear)
            assert q is not None
            rest = q
    return roots, rest


def rational_common_zeros(polys: Sequence[Poly], xname: str, yname: str,
                          max_pairs: int = 3) -> SolveResult:
    """All common zeros with both coordinates rational, plus residual report.

    Every p in ``polys`` must use only the two named variables.  Raises
    :class:`InfiniteZeroSetError` when the zero set is not finite over Q-bar
    (detected by a nonconstant overall gcd).
    """
    polys = [p for p in polys if not p.is_zero()]
    if not polys:
        raise ValueError("empty system")
    overall = polys[0] if len(polys) == 1 else gcd_many(polys)
    if not overall.is_constant():
        raise InfiniteZeroSetError(overall)

    residual: list[ResidualFactor] = []
    points: list[tuple[Fraction, Fraction]] = []

    candidates = _candidate_values(polys, xname, yname, max_pairs, residual)
    seen = set()
    for x0 in candidates:
        specials = [_specialize(p, xname, x0, yname) for p in polys]
        specials = [s for s in specials if s]
        if not specials:
            continue
        g = specials[0]
        for s in specials[1:]:
            g = uv.gcd(g, s)
            if len(g) == 1:
                break
        if len(g) == 1:
            continue
        roots, rest = _strip_rational_roots(g)
        for y0, _ in roots:
            if (x0, y0) in seen:
                continue
            if all(p.evaluate(_point_values(p.ring, xname, x0, yname, y0)) == 0
                   for p in polys):
                seen.add((x0, y0))
                points.append((x0, y0))
        if uv.degree(rest) >= 1:
            residual.append(ResidualFactor(
                variable=yname, poly=_dense_str(rest), degree=uv.degree(rest),
                specialized_at=rat_str(x0), confirmed=True))

    # symmetric pass: catches witnesses with rational y but irrational x
    y_candidates = _candidate_values(polys, yname, xname, max_pairs, residual)
    for y0 in y_candidates:
        if any(pt[1] == y0 for pt in points):
            continue
        specials = [_specialize(p, yname, y0, xname) for p in polys]
        specials = [s for s in specials if s]
        if not specials:
            continue
        g = specials[0]
        for s in specials[1:]:
            g = uv.gcd(g, s)
            if len(g) == 1:
                break
        if len(g) == 1:
            continue
        roots, rest = _strip_rational_roots(g)
        # rational roots here were already found by the x pass; only report
        if uv.degree(rest) >= 1:
            residual.append(ResidualFactor(
                variable=xname, poly=_dense_str(rest), degree=uv.degree(rest),
                specialized_at=rat_str(y0), confirmed=True))

    points.sort()
    return SolveResult(points=points, residual=residual)


def _point_values(ring: PolyRing, xname: str, x0, yname: str, y0) -> list:
    values = []
    for name in ring.names:
        if name == xname:
            values.append(x0)
        elif name == yname:
            values.append(y0)
        else:
            values.append(0)
    return values


def _specialize(p: Poly, name: str, value: Fraction, keep: str) -> list:
    return _to_dense_univariate(p.substitute({name: value}), keep)


def _dense_str(dense: list) -> str:
    parts = []
    for i, c in enumerate(dense):
        if c:
            parts.append(f"{rat_str(c)}*t^{i}" if i else rat_str(c))
    return " + ".join(parts) if parts else "0"


def _candidate_values(polys: Sequence[Poly], xname: str, yname: str,
                      max_pairs: int, residual: list) -> list[Fraction]:
    """Rational candidates for the ``xname`` coordinate of common zeros.

    Uses resultants of deterministic pair combinations.  The gcd of several
    elimination polynomials keeps the candidate set (and the residual noise)
    small; three independent pairs are ample in practice.
    """
    elim: list[list] = []
    k = len(polys)
    if k == 1:
        p = polys[0]
        if p.degree_in(yname) <= 0:
            elim.append(_to_dense_univariate(p, xname))
        else:
            # a single bivariate polynomial has a curve of zeros; its rational
            # points are sampled elsewhere, not solved for here
            raise InfiniteZeroSetError(p)
    for u_w, v_w in _combination_pairs(k):
        if len(elim) >= max_pairs:
            break
        u = _combine(polys, u_w)
        v = _combine(polys, v_w)
        if u.is_zero() or v.is_zero():
            continue
        du, dv = u.degree_in(yname), v.degree_in(yname)
        if du <= 0 and dv <= 0:
            continue
        if du <= 0:
            elim.append(_to_dense_univariate(u, xname))
            continue
        if dv <= 0:
            elim.append(_to_dense_univariate(v, xname))
            continue
        if not gcd(u, v).is_constant():
            continue
        res = resultant(u, v, yname)
        if res.is_zero():
            continue
        elim.append(_to_dense_univariate(res, xname))
    if not elim:
        return []
    combined = elim[0]
    for e in elim[1:]:
        combined = uv.gcd(combined, e)
        if len(combined) == 1:
            break
    if len(combined) == 1:
        return []
    roots, rest = _strip_rational_roots(combined)
    if uv.degree(rest) >= 1:
        residual.append(ResidualFactor(
            variable=xname, poly=_dense_str(rest), degree=uv.degree(rest),
            specialized_at=None, confirmed=False))
    return [r for r, _ in roots]
