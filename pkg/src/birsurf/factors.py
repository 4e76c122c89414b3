"""Extraction of low-degree rational factors from homogeneous polynomials.

Only factors that can carry exceptional curves of the maps under study are
split off: linear forms on the projective plane, and forms of bidegree
(1,0), (0,1) or (1,1) on a product of two lines.  Higher-degree irreducible
factors stay whole in the residual.

Candidates come from restricting to a few rational lines: a rational factor
meets every such line in rational points, so pairing up rational roots of
the restrictions and fitting a form through them is exhaustive.  Every
candidate is confirmed by exact division, to maximal multiplicity.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from . import univariate as uv
from .linalg import nullspace
from .polynomials import (HomogPoly, Poly, PolyRing, as_homogeneous,
                          exact_divide, make_poly)


@dataclass(frozen=True)
class Factorization:
    factors: tuple[tuple[HomogPoly, int], ...]
    residual: HomogPoly

    def product(self) -> HomogPoly:
        acc = self.residual
        for f, m in self.factors:
            acc = acc * f ** m
        return as_homogeneous(acc)


def _divide_out(p: Poly, factor: Poly) -> tuple[Poly, int]:
    mult = 0
    while True:
        q = exact_divide(p, factor)
        if q is None:
            return p, mult
        p = q
        mult += 1


def _good_values(p: Poly, name: str, other: str, count: int) -> list[Fraction]:
    """Rational values c with p(name=c) not identically zero, smallest first."""
    out: list[Fraction] = []
    c = 0
    trial = [0]
    k = 1
    while len(trial) < 40:
        trial.extend([k, -k])
        k += 1
    for c in trial:
        restricted = p.substitute({name: Fraction(c)})
        if not restricted.is_zero():
            out.append(Fraction(c))
            if len(out) == count:
                return out
    raise RuntimeError("could not find generic restriction values")


def _univ_roots(p: Poly, name: str) -> list[Fraction]:
    ring = p.ring
    i = ring.var_index(name)
    sh = ring._shift[i]
    dense = [0] * (p.degree_in(name) + 1)
    for k, c in p._terms.items():
        e = (k >> sh) & 0xFFFF
        if k != (e << sh):
            raise ValueError("not univariate")
        dense[e] += c
    return [r for r, _ in uv.rational_roots(uv.trim(dense))]


def rational_linear_factors(p: HomogPoly) -> Factorization:
    """Split all rational linear factors off a trivariate homogeneous form."""
    p = as_homogeneous(p)
    ring = p.ring
    if ring.ngroups != 1 or ring.nvars != 3:
        raise ValueError("expects a trivariate homogeneous polynomial")
    if p.is_zero():
        raise ValueError("zero polynomial")
    xn, yn, zn = ring.names
    x, y, z = (ring.variable(n) for n in ring.names)

    found: list[tuple[HomogPoly, int]] = []
    work: Poly = p

    work, mz = _divide_out(work, z)
    if mz:
        found.append((z, mz))

    # affine candidates ell = x + v*y + w from root pairs on two lines y = c
    if work.degree_in(xn) > 0:
        c1, c2 = _good_values(work.substitute({zn: 1}), yn, xn, 2)
        r1 = _univ_roots(work.substitute({zn: 1, yn: c1}), xn)
        r2 = _univ_roots(work.substitute({zn: 1, yn: c2}), xn)
        seen = set()
        for a in r1:
            for b in r2:
                v = (b - a) / (c1 - c2)
                w = -a - v * c1
                key = (v, w)
                if key in seen:
                    continue
                seen.add(key)
                cand = as_homogeneous((x + v * y + w * z).primitive_normalized())
                work, mult = _divide_out(work, cand)
                if mult:
                    found.append((cand, mult))

    # candidates ell = y + w*z (no x term)
    if work.degree_in(yn) > 0:
        cvals = _good_values(work.substitute({zn: 1}), xn, yn, 1)
        for w in _univ_roots(work.substitute({zn: 1, xn: cvals[0]}), yn):
            cand = as_homogeneous((y - w * z).primitive_normalized())
            work, mult = _divide_out(work, cand)
            if mult:
                found.append((cand, mult))

    found.sort(key=lambda fm: str(fm[0]))
    return Factorization(tuple(found), as_homogeneous(work.monic()))


def _binary_restriction_roots(p: HomogPoly, group: int, c: Fraction
                              ) -> list[tuple[Fraction, Fraction]]:
    """Projective rational roots of p restricted to {u0 = c*u1} in the other group."""
    ring = p.ring
    g0, g1 = ring.groups[group]
    other = 1 - group
    o0, o1 = ring.groups[other]
    restricted = p.substitute({g0: Fraction(c), g1: 1})
    # now a binary form in the other group's variables
    d = p.degree_vector()[other]
    dense = [0] * (d + 1)
    sh0 = ring._shift[ring.var_index(o0)]
    for k, coeff in restricted._terms.items():
        e = (k >> sh0) & 0xFFFF
        dense[e] += coeff
    roots = [(r, Fraction(1)) for r, _ in uv.rational_roots(uv.trim(dense))]
    if uv.trim(dense) and uv.degree(uv.trim(dense)) < d:
        roots.append((Fraction(1), Fraction(0)))  # the point at infinity
    return roots


def p1p1_small_factors(p: HomogPoly) -> Factorization:
    """Split rational factors of bidegree (1,0), (0,1) and (1,1)."""
    p = as_homogeneous(p)
    ring = p.ring
    if ring.ngroups != 2 or ring.nvars != 4:
        raise ValueError("expects a bihomogeneous polynomial on P1xP1")
    if p.is_zero():
        raise ValueError("zero polynomial")
    x0n, x1n = ring.groups[0]
    y0n, y1n = ring.groups[1]
    x0, x1, y0, y1 = (ring.variable(n) for n in ring.names)

    found: list[tuple[HomogPoly, int]] = []
    work: Poly = p

    for v in (x0, x1, y0, y1):
        work, mult = _divide_out(work, v)
        if mult:
            found.append((v, mult))

    # (1,0) factors x0 - a*x1: the x-restriction to a generic y-line vanishes
    aff = work.substitute({x1n: 1, y1n: 1})
    if work.degree_in(x0n) > 0:
        c = _good_values(aff, y0n, x0n, 1)[0]
        for a in _univ_roots(aff.substitute({y0n: c}), x0n):
            cand = as_homogeneous((x0 - a * x1).primitive_normalized())
            work, mult = _divide_out(work, cand)
            if mult:
                found.append((cand, mult))
        aff = work.substitute({x1n: 1, y1n: 1})
    # (0,1) factors y0 - b*y1
    if work.degree_in(y0n) > 0:
        c = _good_values(aff, x0n, y0n, 1)[0]
        for b in _univ_roots(aff.substitute({x0n: c}), y0n):
            cand = as_homogeneous((y0 - b * y1).primitive_normalized())
            work, mult = _divide_out(work, cand)
            if mult:
                found.append((cand, mult))

    # (1,1) factors through one projective root on each of three x-lines
    degy = work.degree_vector()[1] if not work.is_zero() else 0
    if degy > 0 and work.degree_vector()[0] > 0:
        cs = _line_values(work, 0, 3)
        triples = [_binary_restriction_roots(work, 0, c) for c in cs]
        seen = set()
        for pt1 in triples[0]:
            for pt2 in triples[1]:
                for pt3 in triples[2]:
                    cand = _fit_11_form(ring, list(zip(cs, (pt1, pt2, pt3))))
                    if cand is None:
                        continue
                    key = str(cand)
                    if key in seen:
                        continue
                    seen.add(key)
                    work, mult = _divide_out(work, cand)
                    if mult:
                        found.append((cand, mult))

    found.sort(key=lambda fm: str(fm[0]))
    return Factorization(tuple(found), as_homogeneous(work.monic()))


def _line_values(p: HomogPoly, group: int, count: int) -> list[Fraction]:
    ring = p.ring
    g0, g1 = ring.groups[group]
    out = []
    k = 0
    trial = [0]
    j = 1
    while len(trial) < 60:
        trial.extend([j, -j])
        j += 1
    for c in trial:
        if not p.substitute({g0: Fraction(c), g1: 1}).is_zero():
            out.append(Fraction(c))
            if len(out) == count:
                return out
    raise RuntimeError("could not find generic lines")


def _fit_11_form(ring: PolyRing, conditions) -> HomogPoly | None:
    """Fit a*x0*y0 + b*x0*y1 + c*x1*y0 + d*x1*y1 through (x-line, y-point) data."""
    rows = []
    for xc, (py0, py1) in conditions:
        # substitute x0 = xc, x1 = 1 and the projective y-point
        rows.append([xc * py0, xc * py1, py0, py1])
    basis = nullspace(rows)
    if len(basis) != 1:
        return None
    a, b, c, d = basis[0]
    names = ring.names
    terms = {
        (1, 0, 1, 0): a, (1, 0, 0, 1): b, (0, 1, 1, 0): c, (0, 1, 0, 1): d,
    }
    poly = ring.from_terms(terms)
    if poly.is_zero():
        return None
    return as_homogeneous(poly.primitive_normalized())
