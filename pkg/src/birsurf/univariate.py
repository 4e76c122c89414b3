"""Dense univariate polynomials over Q and exact real-root machinery.

A polynomial is a list of int/Fraction coefficients, index = power.  The zero
polynomial is the empty list.  Everything here is exact: root isolation uses
Sturm chains over the rationals, and rational roots are recovered from
isolating intervals by smallest-denominator reconstruction, so no integer
factorization is ever needed.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd as igcd
from typing import Sequence

Coeffs = list  # list of int | Fraction, index = power


def trim(p: Sequence) -> Coeffs:
    p = list(p)
    while p and p[-1] == 0:
        p.pop()
    return p


def degree(p: Sequence) -> int:
    return len(trim(p)) - 1


def add(p: Sequence, q: Sequence) -> Coeffs:
    n = max(len(p), len(q))
    return trim([(p[i] if i < len(p) else 0) + (q[i] if i < len(q) else 0)
                 for i in range(n)])


def neg(p: Sequence) -> Coeffs:
    return [-c for c in p]


def sub(p: Sequence, q: Sequence) -> Coeffs:
    return add(p, neg(q))


def scale(p: Sequence, c) -> Coeffs:
    if c == 0:
        return []
    return [ci * c for ci in p]


def mul(p: Sequence, q: Sequence) -> Coeffs:
    if not p or not q:
        return []
    out = [0] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        if a == 0:
            continue
        for j, b in enumerate(q):
            out[i + j] += a * b
    return trim(out)


def mul_many(polys: Sequence[Sequence]) -> Coeffs:
    acc = [1]
    for p in polys:
        acc = mul(acc, p)
    return acc


def evaluate(p: Sequence, x):
    acc = 0
    for c in reversed(list(p)):
        acc = acc * x + c
    return acc


def derivative(p: Sequence) -> Coeffs:
    return trim([i * c for i, c in enumerate(p)][1:])


def divmod_exact(p: Sequence, q: Sequence) -> tuple[Coeffs, Coeffs]:
    """Euclidean division over Q: p = quot * q + rem with deg rem < deg q."""
    q = trim(q)
    if not q:
        raise ZeroDivisionError("division by zero polynomial")
    r = list(p)
    dq = len(q) - 1
    lc = Fraction(q[-1])
    quot = [0] * max(0, len(r) - dq)
    while len(trim(r)) - 1 >= dq:
        r = trim(r)
        k = len(r) - 1 - dq
        f = Fraction(r[-1]) / lc
        quot[k] = f if f.denominator != 1 else f.numerator
        for i, c in enumerate(q):
            r[k + i] -= f * c
        r[-1] = 0
    return trim(quot), trim(r)


def rem(p: Sequence, q: Sequence) -> Coeffs:
    return divmod_exact(p, q)[1]


def exact_div(p: Sequence, q: Sequence) -> Coeffs | None:
    quot, r = divmod_exact(p, q)
    return quot if not r else None


def content_primitive(p: Sequence) -> tuple[Fraction, Coeffs]:
    """Write p = content * primitive with integer primitive, positive lead."""
    p = trim(p)
    if not p:
        return Fraction(0), []
    denom = 1
    for c in p:
        if isinstance(c, Fraction):
            denom = denom * c.denominator // igcd(denom, c.denominator)
    ints = [int(c * denom) for c in p]
    g = 0
    for c in ints:
        g = igcd(g, abs(c))
    sign = -1 if ints[-1] < 0 else 1
    prim = [c // (g * sign) for c in ints]
    return Fraction(g * sign, denom), prim


def gcd(p: Sequence, q: Sequence) -> Coeffs:
    """Monic gcd via the primitive Euclidean algorithm."""
    p, q = trim(p), trim(q)
    if not p and not q:
        raise ValueError("gcd(0, 0) is undefined")
    _, a = content_primitive(p)
    _, b = content_primitive(q)
    while b:
        _, r = divmod_exact(a, b)
        _, r = content_primitive(r)  # renormalize to keep coefficients small
        a, b = b, r
    if len(a) == 1:
        return [1]
    return monic(a)


def xgcd(p: Sequence, q: Sequence) -> tuple[Coeffs, Coeffs, Coeffs]:
    """Extended Euclid over Q: returns (g, s, t) with s*p + t*q = g, g monic."""
    r0, r1 = trim(p), trim(q)
    s0, s1 = [1], []
    t0, t1 = [], [1]
    while r1:
        quot, r = divmod_exact(r0, r1)
        r0, r1 = r1, r
        s0, s1 = s1, sub(s0, mul(quot, s1))
        t0, t1 = t1, sub(t0, mul(quot, t1))
    if not r0:
        raise ValueError("xgcd(0, 0) is undefined")
    lc = Fraction(r0[-1])
    inv = 1 / lc
    return scale(r0, inv), scale(s0, inv), scale(t0, inv)


def monic(p: Sequence) -> Coeffs:
    p = trim(p)
    if not p:
        return []
    lc = Fraction(p[-1])
    out = []
    for c in p:
        v = Fraction(c) / lc
        out.append(v.numerator if v.denominator == 1 else v)
    return out


def squarefree(p: Sequence) -> Coeffs:
    p = trim(p)
    if len(p) <= 1:
        raise ValueError("squarefree part needs a nonconstant polynomial")
    g = gcd(p, derivative(p))
    if len(g) == 1:
        return monic(p)
    q = exact_div(p, g)
    assert q is not None
    return monic(q)


# -- Sturm chains and real-root isolation --------------------------------------


def _positive_primitive(p: Sequence) -> Coeffs:
    """Scale by a positive rational to primitive integers, keeping the sign."""
    c, prim = content_primitive(p)
    return neg(prim) if c < 0 else prim


def sturm_chain(p: Sequence) -> list[Coeffs]:
    """Sturm chain of a squarefree polynomial, primitive-integer entries.

    Chain members are rescaled by positive constants only; anything else
    would corrupt the sign-variation counts.
    """
    p0 = _positive_primitive(p)
    chain = [p0, _positive_primitive(derivative(p0))]
    while len(chain[-1]) > 1:
        r = rem(chain[-2], chain[-1])
        if not r:
            break
        chain.append(_positive_primitive(neg(r)))
    if not chain[-1]:
        chain.pop()
    return chain


def sign_variations(chain: Sequence[Sequence], x) -> int:
    signs = []
    for p in chain:
        v = evaluate(p, x)
        if v != 0:
            signs.append(1 if v > 0 else -1)
    return sum(1 for a, b in zip(signs, signs[1:]) if a != b)


def root_bound(p: Sequence) -> Fraction:
    """Cauchy bound: all real roots lie in (-B, B)."""
    p = trim(p)
    lead = abs(Fraction(p[-1]))
    b = max((abs(Fraction(c)) / lead for c in p[:-1]), default=Fraction(0))
    return b + 1


def count_roots(chain: Sequence[Sequence], lo, hi) -> int:
    """Number of distinct real roots in the half-open interval (lo, hi]."""
    return sign_variations(chain, lo) - sign_variations(chain, hi)


def isolate_real_roots(p: Sequence) -> list[tuple[Fraction, Fraction]]:
    """Disjoint half-open intervals (lo, hi], one real root of p in each.

    p need not be squarefree; isolation runs on its squarefree part.
    """
    p = trim(p)
    if len(p) <= 1:
        return []
    sf = squarefree(p)
    if len(sf) == 2:  # linear: the root is exact
        r = -Fraction(sf[0]) / Fraction(sf[1])
        return [(r - 1, r)]
    chain = sturm_chain(sf)
    bound = root_bound(sf)
    out: list[tuple[Fraction, Fraction]] = []

    stack = [(-bound, bound)]
    while stack:
        lo, hi = stack.pop()
        n = count_roots(chain, lo, hi)
        if n == 0:
            continue
        if n == 1:
            out.append((lo, hi))
            continue
        mid = (lo + hi) / 2
        stack.append((lo, mid))
        stack.append((mid, hi))
    out.sort()
    return out


def refine_interval(chain: Sequence[Sequence], lo: Fraction, hi: Fraction,
                    max_width: Fraction) -> tuple[Fraction, Fraction]:
    """Shrink an isolating (lo, hi] below max_width by bisection."""
    while hi - lo > max_width:
        mid = (lo + hi) / 2
        if count_roots(chain, lo, mid) == 1:
            hi = mid
        else:
            lo = mid
    return lo, hi


def simplest_in(lo: Fraction, hi: Fraction) -> Fraction:
    """The rational with smallest denominator in the closed interval [lo, hi]."""
    lo, hi = Fraction(lo), Fraction(hi)
    if lo > hi:
        raise ValueError("empty interval")
    if lo == hi:
        return lo
    fl = lo.numerator // lo.denominator
    if Fraction(fl) >= lo:
        return Fraction(fl)
    if Fraction(fl + 1) <= hi:
        return Fraction(fl + 1)
    inner = simplest_in(1 / (hi - fl), 1 / (lo - fl))
    return fl + 1 / inner


def rational_roots(p: Sequence) -> list[tuple[Fraction, int]]:
    """All rational roots with multiplicities, found without factoring ints.

    A root a/b in lowest terms of the primitive integer form has b dividing
    the leading coefficient, so refining each isolating interval below
    1/(2*lead^2) leaves at most one rational with so small a denominator in
    it: the smallest-denominator rational of the interval.
    """
    p = trim(p)
    if len(p) <= 1:
        return []
    roots: list[tuple[Fraction, int]] = []
    # split off t^k
    k = 0
    while p[0] == 0:
        p = p[1:]
        k += 1
    if k:
        roots.append((Fraction(0), k))
    if len(p) <= 1:
        return roots
    _, prim = content_primitive(p)
    sf = squarefree(prim)
    _, sf = content_primitive(sf)
    qmax = abs(sf[-1])
    chain = sturm_chain(sf)
    width = Fraction(1, 2 * qmax * qmax + 1)
    for lo, hi in isolate_real_roots(sf):
        lo, hi = refine_interval(chain, lo, hi, width)
        cand = simplest_in(lo, hi)
        if cand.denominator <= qmax and evaluate(p, cand) == 0:
            m = 0
            rest = p
            linear = [-cand.numerator, cand.denominator]
            while True:
                q = exact_div(rest, linear)
                if q is None:
                    break
                rest = q
                m += 1
            roots.append((cand, m))
    roots.sort(key=lambda t: t[0])
    return roots


# -- assorted exact helpers ----------------------------------------------------


_cyclotomic_cache: dict[int, Coeffs] = {}


def cyclotomic(n: int) -> Coeffs:
    """The n-th cyclotomic polynomial with integer coefficients."""
    if n < 1:
        raise ValueError("n must be positive")
    if n in _cyclotomic_cache:
        return _cyclotomic_cache[n]
    p = [-1] + [0] * (n - 1) + [1]  # t^n - 1
    for d in range(1, n):
        if n % d == 0:
            q = exact_div(p, cyclotomic(d))
            assert q is not None
            p = q
    out = [int(c) for c in p]
    _cyclotomic_cache[n] = out
    return out


def euler_phi(n: int) -> int:
    count = 0
    for k in range(1, n + 1):
        if igcd(k, n) == 1:
            count += 1
    return count


def interpolate(points: Sequence[tuple]) -> Coeffs:
    """Newton interpolation through distinct rational nodes."""
    xs = [Fraction(x) for x, _ in points]
    ys = [Fraction(y) for _, y in points]
    n = len(points)
    if len(set(xs)) != n:
        raise ValueError("interpolation nodes must be distinct")
    coef = list(ys)
    for j in range(1, n):
        for i in range(n - 1, j - 1, -1):
            coef[i] = (coef[i] - coef[i - 1]) / (xs[i] - xs[i - j])
    poly: Coeffs = []
    for i in range(n - 1, -1, -1):
        poly = add(mul(poly, [-xs[i], 1]), [coef[i]])
    return trim(poly)


def from_int_poly(p: Sequence[int]) -> Coeffs:
    return trim(list(p))


def to_int_poly(p: Sequence) -> list[int]:
    """Clear denominators and integer content, keep the sign of the lead."""
    _, prim = content_primitive(p)
    return prim
