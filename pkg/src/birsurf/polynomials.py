"""Sparse exact-arithmetic multivariate polynomials with grouped gradings.

Coefficients are arbitrary-precision rationals.  Values with denominator 1
are stored as plain ints so that the hot multiply loops run in native integer
arithmetic; ``Fraction`` and ``int`` mix transparently everywhere else.

Exponent vectors are packed into a single integer, 16 bits per variable, so
that a monomial product is a single integer addition.  Exponents above 65535
are rejected long before they could alias (term caps bite much earlier).

A ring carries a partition of its variables into grading groups: one group
of three variables for the projective plane, two groups of two for a product
of two projective lines.  ``HomogPoly`` is the subclass whose terms all share
one degree vector (one entry per group); it is the carrier type for map
components, curve equations and Jacobians.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Iterator, Mapping, Sequence

_FIELD_BITS = 16
_FIELD_MASK = (1 << _FIELD_BITS) - 1
_FIELD_LIMIT = _FIELD_MASK


class PolynomialError(Exception):
    """Base class for polynomial-kernel errors."""


class DegreeMismatchError(PolynomialError):
    """Raised when adding homogeneous polynomials of unequal degree vectors."""


class InhomogeneousError(PolynomialError):
    """Raised when a homogeneous polynomial was required."""


class ResourceCapError(PolynomialError):
    """Raised when an operation would exceed the configured term cap."""


def ratio(value) -> int | Fraction:
    """Coerce ``value`` to an exact rational, collapsing integers to int."""
    if type(value) is int:
        return value
    if isinstance(value, Fraction):
        return value.numerator if value.denominator == 1 else value
    if isinstance(value, int):
        return int(value)
    if isinstance(value, str):
        return ratio(Fraction(value))
    raise TypeError(f"not an exact rational: {value!r}")


def rat_str(value) -> str:
    """Deterministic decimal-free rendering, ``p`` or ``p/q``."""
    value = ratio(value)
    if isinstance(value, int):
        return str(value)
    return f"{value.numerator}/{value.denominator}"


class PolyRing:
    """Polynomial ring over Q with variables split into grading groups.

    Ungraded rings (``graded=False``) are used for affine-chart work where
    mixed-degree polynomials are the norm; their elements never upgrade to
    :class:`HomogPoly` and additions are unrestricted.
    """

    __slots__ = ("groups", "names", "graded", "_pos", "_shift", "_group_of")

    def __init__(self, groups: Sequence[Sequence[str]], graded: bool = True):
        self.graded = bool(graded)
        self.groups = tuple(tuple(g) for g in groups)
        names: list[str] = []
        group_of: list[int] = []
        for gi, group in enumerate(self.groups):
            if not group:
                raise ValueError("empty grading group")
            for name in group:
                if name in names:
                    raise ValueError(f"duplicate variable {name!r}")
                names.append(name)
                group_of.append(gi)
        self.names = tuple(names)
        self._pos = {name: i for i, name in enumerate(names)}
        self._shift = tuple(i * _FIELD_BITS for i in range(len(names)))
        self._group_of = tuple(group_of)

    @property
    def nvars(self) -> int:
        return len(self.names)

    @property
    def ngroups(self) -> int:
        return len(self.groups)

    def __eq__(self, other) -> bool:
        return (isinstance(other, PolyRing) and self.groups == other.groups
                and self.graded == other.graded)

    def __hash__(self) -> int:
        return hash((self.groups, self.graded))

    def __repr__(self) -> str:
        inner = "; ".join(", ".join(g) for g in self.groups)
        return f"PolyRing({inner})"

    def var_index(self, name: str) -> int:
        try:
            return self._pos[name]
        except KeyError:
            raise KeyError(f"unknown variable {name!r}") from None

    def pack(self, exponents: Sequence[int]) -> int:
        if len(exponents) != self.nvars:
            raise ValueError("exponent arity mismatch")
        key = 0
        for e, sh in zip(exponents, self._shift):
            if e < 0 or e > _FIELD_LIMIT:
                raise ValueError(f"exponent out of range: {e}")
            key |= e << sh
        return key

    def unpack(self, key: int) -> tuple[int, ...]:
        return tuple((key >> sh) & _FIELD_MASK for sh in self._shift)

    def group_degrees(self, key: int) -> tuple[int, ...]:
        degs = [0] * self.ngroups
        for sh, gi in zip(self._shift, self._group_of):
            degs[gi] += (key >> sh) & _FIELD_MASK
        return tuple(degs)

    # -- constructors ------------------------------------------------------

    def zero(self) -> "Poly":
        return make_poly(self, {})

    def one(self) -> "Poly":
        return make_poly(self, {0: 1})

    def constant(self, value) -> "Poly":
        value = ratio(value)
        return make_poly(self, {0: value} if value != 0 else {})

    def variable(self, name: str) -> "Poly":
        i = self.var_index(name)
        return make_poly(self, {1 << self._shift[i]: 1})

    def variables(self) -> tuple["Poly", ...]:
        return tuple(self.variable(n) for n in self.names)

    def from_terms(self, terms: Mapping[Sequence[int], object]) -> "Poly":
        packed: dict[int, int | Fraction] = {}
        for exps, coeff in terms.items():
            c = ratio(coeff)
            if c == 0:
                continue
            key = self.pack(tuple(exps))
            packed[key] = packed.get(key, 0) + c
        return make_poly(self, {k: v for k, v in packed.items() if v != 0})

    def monomials(self, degvec: Sequence[int]) -> list[tuple[int, ...]]:
        """All exponent tuples with the given degree in each grading group."""
        degvec = tuple(degvec)
        if len(degvec) != self.ngroups:
            raise ValueError("degree vector arity mismatch")
        per_group: list[list[tuple[int, ...]]] = []
        for gi, group in enumerate(self.groups):
            per_group.append(_compositions(degvec[gi], len(group)))
        out: list[tuple[int, ...]] = []

        def rec(gi: int, acc: tuple[int, ...]):
            if gi == len(per_group):
                out.append(acc)
                return
            for part in per_group[gi]:
                rec(gi + 1, acc + part)

        rec(0, ())
        return out


def _compositions(total: int, parts: int) -> list[tuple[int, ...]]:
    if total < 0:
        return []
    if parts == 1:
        return [(total,)]
    out = []
    for head in range(total, -1, -1):
        for tail in _compositions(total - head, parts - 1):
            out.append((head,) + tail)
    return out


class Poly:
    """A polynomial in a :class:`PolyRing`.  Immutable after construction."""

    __slots__ = ("ring", "_terms")

    def __init__(self, ring: PolyRing, packed_terms: Mapping[int, object]):
        cleaned: dict[int, int | Fraction] = {}
        for key, coeff in packed_terms.items():
            c = ratio(coeff)
            if c != 0:
                cleaned[key] = c
        self.ring = ring
        self._terms = cleaned

    @classmethod
    def _raw(cls, ring: PolyRing, terms: dict) -> "Poly":
        obj = object.__new__(cls)
        obj.ring = ring
        obj._terms = terms
        return obj

    # -- inspection --------------------------------------------------------

    def terms(self) -> dict[tuple[int, ...], int | Fraction]:
        unpack = self.ring.unpack
        return {unpack(k): c for k, c in self._terms.items()}

    def num_terms(self) -> int:
        return len(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self) -> bool:
        return bool(self._terms)

    def coefficient(self, exponents: Sequence[int]) -> int | Fraction:
        return self._terms.get(self.ring.pack(exponents), 0)

    def constant_coefficient(self) -> int | Fraction:
        return self._terms.get(0, 0)

    def is_constant(self) -> bool:
        return not self._terms or (len(self._terms) == 1 and 0 in self._terms)

    def used_variables(self) -> tuple[str, ...]:
        mask = 0
        for key in self._terms:
            mask |= key
        names = []
        for name, sh in zip(self.ring.names, self.ring._shift):
            if (mask >> sh) & _FIELD_MASK:
                names.append(name)
        return tuple(names)

    def total_degree(self) -> int:
        if not self._terms:
            return -1
        return max(sum(self.ring.group_degrees(k)) for k in self._terms)

    def degree_in(self, name: str) -> int:
        if not self._terms:
            return -1
        sh = self.ring._shift[self.ring.var_index(name)]
        return max((k >> sh) & _FIELD_MASK for k in self._terms)

    def is_homogeneous(self) -> bool:
        it = iter(self._terms)
        first = next(it, None)
        if first is None:
            return True
        dv = self.ring.group_degrees(first)
        return all(self.ring.group_degrees(k) == dv for k in it)

    def degree_vector(self) -> tuple[int, ...]:
        """Common per-group degree; the zero polynomial reports all -1."""
        if not self._terms:
            return (-1,) * self.ring.ngroups
        it = iter(self._terms)
        dv = self.ring.group_degrees(next(it))
        for k in it:
            if self.ring.group_degrees(k) != dv:
                raise InhomogeneousError(f"not homogeneous: {self}")
        return dv

    def leading_key(self) -> int:
        """Largest monomial in graded lex order (declared variable order)."""
        if not self._terms:
            raise ValueError("zero polynomial has no leading term")
        ring = self.ring
        return max(self._terms,
                   key=lambda k: (sum(ring.group_degrees(k)), ring.unpack(k)))

    def leading_coefficient(self) -> int | Fraction:
        return self._terms[self.leading_key()]

    # -- arithmetic --------------------------------------------------------

    def _coerce(self, other) -> "Poly | None":
        if isinstance(other, Poly):
            if other.ring != self.ring:
                raise ValueError("polynomial rings differ")
            return other
        try:
            c = ratio(other)
        except TypeError:
            return None
        return make_poly(self.ring, {0: c} if c != 0 else {})

    def __eq__(self, other) -> bool:
        if isinstance(other, Poly):
            return self.ring == other.ring and self._terms == other._terms
        try:
            c = ratio(other)
        except TypeError:
            return NotImplemented
        return self._terms == ({0: c} if c != 0 else {})

    def __hash__(self) -> int:
        return hash((self.ring, frozenset(self._terms.items())))

    def __add__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        terms = dict(self._terms)
        for k, c in other._terms.items():
            acc = terms.get(k, 0) + c
            if acc:
                terms[k] = acc
            else:
                terms.pop(k, None)
        return make_poly(self.ring, terms)

    __radd__ = __add__

    def __neg__(self):
        return make_poly(self.ring, {k: -c for k, c in self._terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, Poly):
            try:
                c = ratio(other)
            except TypeError:
                return NotImplemented
            if c == 0:
                return make_poly(self.ring, {})
            return make_poly(self.ring,
                             {k: v * c for k, v in self._terms.items()})
        if other.ring != self.ring:
            raise ValueError("polynomial rings differ")
        a, b = self._terms, other._terms
        if len(a) > len(b):
            a, b = b, a
        out: dict[int, int | Fraction] = {}
        get = out.get
        for ka, ca in a.items():
            for kb, cb in b.items():
                k = ka + kb
                acc = get(k)
                if acc is None:
                    out[k] = ca * cb
                else:
                    acc = acc + ca * cb
                    if acc:
                        out[k] = acc
                    else:
                        del out[k]
        return make_poly(self.ring, out)

    __rmul__ = __mul__

    def __pow__(self, exponent: int):
        if not isinstance(exponent, int) or exponent < 0:
            raise ValueError("exponent must be a nonnegative integer")
        result = self.ring.one()
        base = self
        e = exponent
        while e:
            if e & 1:
                result = result * base
            base_needed = e >> 1
            if base_needed:
                base = base * base
            e = base_needed
        return result

    def __truediv__(self, other):
        c = ratio(other)  # raises TypeError for Poly divisors; use exact_divide
        if c == 0:
            raise ZeroDivisionError("division by zero constant")
        return self * (Fraction(1) / Fraction(c))

    # -- calculus and substitution ------------------------------------------

    def derivative(self, name: str) -> "Poly":
        i = self.ring.var_index(name)
        sh = self.ring._shift[i]
        step = 1 << sh
        out: dict[int, int | Fraction] = {}
        for k, c in self._terms.items():
            e = (k >> sh) & _FIELD_MASK
            if e:
                out[k - step] = c * e
        return make_poly(self.ring, out)

    def evaluate(self, values: Sequence) -> int | Fraction:
        vals = [ratio(v) for v in values]
        if len(vals) != self.ring.nvars:
            raise ValueError("value arity mismatch")
        total: int | Fraction = 0
        shifts = self.ring._shift
        for k, c in self._terms.items():
            term = c
            for v, sh in zip(vals, shifts):
                e = (k >> sh) & _FIELD_MASK
                if e:
                    term = term * v ** e
            total = total + term
        return ratio(total)

    def substitute(self, assignment: Mapping[str, object]) -> "Poly":
        """Substitute constants or ring elements for some of the variables."""
        images: list[Poly] = []
        for name in self.ring.names:
            if name in assignment:
                val = assignment[name]
                if isinstance(val, Poly):
                    if val.ring != self.ring:
                        raise ValueError("substitute values must share the ring")
                    images.append(val)
                else:
                    images.append(make_poly(self.ring, {0: ratio(val)}))
            else:
                images.append(self.ring.variable(name))
        return self.compose(images)

    def compose(self, images: Sequence["Poly"]) -> "Poly":
        """Full substitution x_i -> images[i]; images share one target ring."""
        if len(images) != self.ring.nvars:
            raise ValueError("composition arity mismatch")
        if not images:
            raise ValueError("empty composition")
        target = images[0].ring
        for im in images:
            if im.ring != target:
                raise ValueError("composition images live in different rings")
        if not self._terms:
            return make_poly(target, {})
        shifts = self.ring._shift
        max_exp = [0] * self.ring.nvars
        for k in self._terms:
            for i, sh in enumerate(shifts):
                e = (k >> sh) & _FIELD_MASK
                if e > max_exp[i]:
                    max_exp[i] = e
        one = Poly._raw(target, {0: 1})
        powers: list[list[Poly]] = []
        for i, im in enumerate(images):
            row = [one]
            for _ in range(max_exp[i]):
                row.append(row[-1] * im)
            powers.append(row)
        acc: dict[int, int | Fraction] = {}
        for k, c in self._terms.items():
            term = Poly._raw(target, {0: c})
            for i, sh in enumerate(shifts):
                e = (k >> sh) & _FIELD_MASK
                if e:
                    term = term * powers[i][e]
            for tk, tc in term._terms.items():
                v = acc.get(tk, 0) + tc
                if v:
                    acc[tk] = v
                else:
                    acc.pop(tk, None)
        return make_poly(target, acc)

    # -- normal forms --------------------------------------------------------

    def monic(self) -> "Poly":
        if not self._terms:
            return self
        lc = self.leading_coefficient()
        if lc == 1:
            return self
        inv = Fraction(1) / Fraction(lc)
        return self * inv

    def primitive_normalized(self) -> "Poly":
        """Scale so coefficients are coprime integers with positive leading one."""
        if not self._terms:
            return self
        from math import gcd as igcd
        denom = 1
        for c in self._terms.values():
            if isinstance(c, Fraction):
                denom = denom * c.denominator // igcd(denom, c.denominator)
        nums = [int(c * denom) for c in self._terms.values()]
        g = 0
        for n in nums:
            g = igcd(g, abs(n))
        scale = Fraction(denom, g)
        scaled = self * scale
        if scaled._terms[scaled.leading_key()] < 0:
            scaled = -scaled
        return scaled

    # -- rendering -----------------------------------------------------------

    def sorted_terms(self) -> list[tuple[tuple[int, ...], int | Fraction]]:
        ring = self.ring
        keys = sorted(self._terms,
                      key=lambda k: (sum(ring.group_degrees(k)), ring.unpack(k)),
                      reverse=True)
        return [(ring.unpack(k), self._terms[k]) for k in keys]

    def __str__(self) -> str:
        if not self._terms:
            return "0"
        pieces = []
        for exps, coeff in self.sorted_terms():
            factors = []
            for name, e in zip(self.ring.names, exps):
                if e == 1:
                    factors.append(name)
                elif e > 1:
                    factors.append(f"{name}^{e}")
            mono = "*".join(factors)
            c = ratio(coeff)
            neg = c < 0
            mag = -c if neg else c
            if mono and mag == 1:
                body = mono
            elif mono:
                body = f"{rat_str(mag)}*{mono}"
            else:
                body = rat_str(mag)
            pieces.append(("- " if neg else "+ ") + body)
        text = " ".join(pieces)
        if text.startswith("+ "):
            text = text[2:]
        elif text.startswith("- "):
            text = "-" + text[2:]
        return text

    def __repr__(self) -> str:
        return f"<{type(self).__name__} {self}>"


class HomogPoly(Poly):
    """A polynomial all of whose terms share one per-group degree vector."""

    __slots__ = ("_degvec",)

    def __init__(self, ring: PolyRing, packed_terms: Mapping[int, object]):
        super().__init__(ring, packed_terms)
        self._degvec = Poly.degree_vector(self)

    @classmethod
    def _trusted(cls, ring: PolyRing, terms: dict, degvec: tuple[int, ...]):
        obj = object.__new__(cls)
        obj.ring = ring
        obj._terms = terms
        obj._degvec = degvec if terms else (-1,) * ring.ngroups
        return obj

    def degree_vector(self) -> tuple[int, ...]:
        return self._degvec

    def is_homogeneous(self) -> bool:
        return True

    def __add__(self, other):
        if isinstance(other, HomogPoly) and other._terms and self._terms:
            if other._degvec != self._degvec:
                raise DegreeMismatchError(
                    f"degree {self._degvec} + degree {other._degvec}")
        return super().__add__(other)

    __radd__ = __add__


def make_poly(ring: PolyRing, terms: dict) -> Poly:
    """Wrap a packed term dict, upgrading to HomogPoly when homogeneous."""
    if not ring.graded:
        return Poly._raw(ring, terms)
    if not terms:
        return HomogPoly._trusted(ring, {}, (-1,) * ring.ngroups)
    it = iter(terms)
    dv = ring.group_degrees(next(it))
    for k in it:
        if ring.group_degrees(k) != dv:
            return Poly._raw(ring, terms)
    return HomogPoly._trusted(ring, terms, dv)


def as_homogeneous(p: Poly) -> HomogPoly:
    if isinstance(p, HomogPoly):
        return p
    if p.is_homogeneous():
        return HomogPoly._trusted(p.ring, dict(p._terms), p.degree_vector())
    raise InhomogeneousError(f"not homogeneous: {p}")


# -- division, gcd, squarefree ------------------------------------------------


def exact_divide(num: Poly, den: Poly) -> Poly | None:
    """Exact quotient ``num / den``, or None when it does not divide.

    Multivariate division with respect to graded lex; the remainder is
    accumulated separately and any nonzero remainder means "not divisible".
    """
    if den.is_zero():
        raise ZeroDivisionError("division by the zero polynomial")
    if num.ring != den.ring:
        raise ValueError("polynomial rings differ")
    ring = num.ring
    if num.is_zero():
        return make_poly(ring, {})
    if den.is_constant():
        inv = Fraction(1) / Fraction(den.constant_coefficient())
        return num * inv

    dkey = den.leading_key()
    dexp = ring.unpack(dkey)
    dlc = den._terms[dkey]
    den_rest = [(k, c) for k, c in den._terms.items() if k != dkey]

    grl = lambda k: (sum(ring.group_degrees(k)), ring.unpack(k))
    work = dict(num._terms)
    quot: dict[int, int | Fraction] = {}
    while work:
        k = max(work, key=grl)
        exp = ring.unpack(k)
        if any(e < d for e, d in zip(exp, dexp)):
            return None  # leading monomial not divisible: nonzero remainder
        qk = k - dkey
        qc = ratio(Fraction(work[k]) / Fraction(dlc))
        quot[qk] = qc
        del work[k]
        for rk, rc in den_rest:
            key = qk + rk
            acc = work.get(key, 0) - qc * rc
            if acc:
                work[key] = acc
            else:
                work.pop(key, None)
    return make_poly(ring, quot)


def divides(den: Poly, num: Poly) -> bool:
    return exact_divide(num, den) is not None


def _strip_monomial_content(polys: Sequence[Poly]) -> tuple[list[Poly], int]:
    """Divide out the largest common monomial; returns (stripped, packed key)."""
    ring = polys[0].ring
    mins = [None] * ring.nvars
    for p in polys:
        for k in p._terms:
            for i, sh in enumerate(ring._shift):
                e = (k >> sh) & _FIELD_MASK
                if mins[i] is None or e < mins[i]:
                    mins[i] = e
    key = 0
    for i, sh in enumerate(ring._shift):
        key |= (mins[i] or 0) << sh
    if key == 0:
        return list(polys), 0
    stripped = [make_poly(ring, {k - key: c for k, c in p._terms.items()})
                for p in polys]
    return stripped, key


def _restrict_var_zero(p: Poly, index: int) -> Poly:
    sh = p.ring._shift[index]
    return make_poly(p.ring, {k: c for k, c in p._terms.items()
                              if not (k >> sh) & _FIELD_MASK})


def _coprime_certificate(polys: Sequence[Poly]) -> bool:
    """True means gcd of the (monomial-stripped) polynomials is certainly 1.

    Restricting to a coordinate hyperplane {v = 0} maps a common factor g to
    g|v=0, which is nonzero (no variable divides every input after monomial
    stripping) and non-unit unless g is constant.  A trivial gcd of the
    restrictions therefore certifies coprimality.  False just means "unknown".
    """
    ring = polys[0].ring
    used: set[str] = set()
    for p in polys:
        used.update(p.used_variables())
    if len(used) < 2:
        return False
    for name in sorted(used):
        # restriction drops one used variable, so recursive gcds terminate
        i = ring.var_index(name)
        restricted = [_restrict_var_zero(p, i) for p in polys]
        nonzero = [p for p in restricted if not p.is_zero()]
        if len(nonzero) < 2:
            continue
        g = nonzero[0]
        for q in nonzero[1:]:
            g = gcd(g, q)
            if g.is_constant():
                return True
    return False


def gcd(a: Poly, b: Poly) -> Poly:
    """Greatest common divisor, monic under graded lex.

    Recursive content/primitive-part reduction with a subresultant PRS in the
    chosen main variable.  Exact over Q throughout.
    """
    if a.ring != b.ring:
        raise ValueError("polynomial rings differ")
    ring = a.ring
    if a.is_zero() and b.is_zero():
        raise ValueError("gcd(0, 0) is undefined")
    if a.is_zero():
        return b.monic()
    if b.is_zero():
        return a.monic()
    if a.is_constant() or b.is_constant():
        return ring.one()

    (sa, sb), common_key = _strip_monomial_content([a, b])
    used = set(sa.used_variables()) | set(sb.used_variables())
    if len(used) > 1 and _coprime_certificate([sa, sb]):
        g = make_poly(ring, {common_key: 1})
        return g.monic()

    g = _gcd_impl(sa, sb)
    if common_key:
        g = g * make_poly(ring, {common_key: 1})
    return g.monic()


def gcd_many(polys: Sequence[Poly]) -> Poly:
    nonzero = [p for p in polys if not p.is_zero()]
    if not nonzero:
        raise ValueError("gcd of all-zero family")
    stripped, common_key = _strip_monomial_content(nonzero)
    ring = nonzero[0].ring
    if len(stripped) > 1 and _coprime_certificate(stripped):
        return make_poly(ring, {common_key: 1}).monic()
    g = stripped[0]
    for p in stripped[1:]:
        if g.is_constant():
            break
        g = gcd(g, p)
    if common_key:
        g = g * make_poly(ring, {common_key: 1})
    return g.monic()


def _main_variable(a: Poly, b: Poly) -> int:
    """Pick the used variable with the smallest combined degree."""
    ring = a.ring
    best = None
    best_score = None
    for i, name in enumerate(ring.names):
        da = a.degree_in(name)
        db = b.degree_in(name)
        if da > 0 or db > 0:
            score = max(da, 0) + max(db, 0)
            if best_score is None or score < best_score:
                best, best_score = i, score
    if best is None:
        raise ValueError("no usable main variable")
    return best


def _as_univariate(p: Poly, index: int) -> dict[int, Poly]:
    """View p as a polynomial in variable #index with Poly coefficients."""
    ring = p.ring
    sh = ring._shift[index]
    coeffs: dict[int, dict] = {}
    for k, c in p._terms.items():
        e = (k >> sh) & _FIELD_MASK
        coeffs.setdefault(e, {})[k - (e << sh)] = c
    return {e: make_poly(ring, d) for e, d in coeffs.items()}


def _from_univariate(coeffs: Mapping[int, Poly], ring: PolyRing,
                     index: int) -> Poly:
    sh = ring._shift[index]
    out: dict[int, int | Fraction] = {}
    for e, poly in coeffs.items():
        step = e << sh
        for k, c in poly._terms.items():
            out[k + step] = c
    return make_poly(ring, out)


def _uni_degree(coeffs: Mapping[int, Poly]) -> int:
    return max((e for e, p in coeffs.items() if not p.is_zero()), default=-1)


def _uni_mul_poly(coeffs: dict[int, Poly], q: Poly) -> dict[int, Poly]:
    return {e: p * q for e, p in coeffs.items()}


def _uni_sub(x: dict[int, Poly], y: dict[int, Poly]) -> dict[int, Poly]:
    out = dict(x)
    for e, p in y.items():
        if e in out:
            s = out[e] - p
            if s.is_zero():
                del out[e]
            else:
                out[e] = s
        else:
            out[e] = -p
    return out


def _uni_shift(coeffs: dict[int, Poly], by: int) -> dict[int, Poly]:
    return {e + by: p for e, p in coeffs.items()}


def _pseudo_remainder(u: dict[int, Poly], v: dict[int, Poly]) -> dict[int, Poly]:
    """prem(u, v) in the main variable, coefficients in the other variables."""
    du, dv = _uni_degree(u), _uni_degree(v)
    lv = v[dv]
    r = dict(u)
    while True:
        dr = _uni_degree(r)
        if dr < dv:
            return r
        lead = r[dr]
        r = _uni_sub(_uni_mul_poly(r, lv),
                     _uni_shift(_uni_mul_poly(v, lead), dr - dv))
        r.pop(dr, None)


def _content_and_primitive(coeffs: dict[int, Poly]) -> tuple[Poly, dict[int, Poly]]:
    parts = [p for p in coeffs.values() if not p.is_zero()]
    cont = parts[0]
    for p in parts[1:]:
        if cont.is_constant():
            break
        cont = gcd(cont, p)
    cont = cont.monic()
    if cont.is_constant():
        return cont.ring.one(), coeffs
    prim = {e: exact_divide(p, cont) for e, p in coeffs.items()}
    return cont, prim  # exact by construction


def _gcd_impl(a: Poly, b: Poly) -> Poly:
    ring = a.ring
    used_a, used_b = a.used_variables(), b.used_variables()
    if not used_a or not used_b:
        return ring.one()
    if len(set(used_a) | set(used_b)) == 1:
        return _gcd_single_variable(a, b)

    idx = _main_variable(a, b)
    ua, ub = _as_univariate(a, idx), _as_univariate(b, idx)
    ca, pa = _content_and_primitive(ua)
    cb, pb = _content_and_primitive(ub)
    cont = gcd(ca, cb)

    if _uni_degree(pa) < _uni_degree(pb):
        pa, pb = pb, pa
    u, v = pa, pb
    while True:
        dv = _uni_degree(v)
        r = _pseudo_remainder(u, v)
        if not r or _uni_degree(r) < 0:
            break
        if _uni_degree(r) == 0:
            v = {0: r[0].ring.one()}
            break
        _, r = _content_and_primitive(r)  # primitive PRS: simple and exact
        u, v = v, r
        if _uni_degree(v) == 0:
            break
    if _uni_degree(v) == 0:
        prim_gcd = ring.one()
    else:
        _, v = _content_and_primitive(v)
        prim_gcd = _from_univariate(v, ring, idx)
    return (cont * prim_gcd).monic()


def _gcd_single_variable(a: Poly, b: Poly) -> Poly:
    name = (a.used_variables() or b.used_variables())[0]
    from . import univariate as uv
    ua = _to_dense(a, name)
    ub = _to_dense(b, name)
    g = uv.gcd(ua, ub)
    ring = a.ring
    i = ring.var_index(name)
    sh = ring._shift[i]
    return make_poly(ring, {e << sh: c for e, c in enumerate(g) if c != 0})


def _to_dense(p: Poly, name: str) -> list:
    ring = p.ring
    sh = ring._shift[ring.var_index(name)]
    out = [0] * (p.degree_in(name) + 1)
    for k, c in p._terms.items():
        out[(k >> sh) & _FIELD_MASK] += c
    return out


def squarefree_part(p: Poly) -> Poly:
    """Product of the distinct irreducible factors of ``p``, monic.

    In characteristic zero gcd(p, all partials) is the product of each
    irreducible factor to one less than its multiplicity.
    """
    if p.is_zero():
        raise ValueError("squarefree part of the zero polynomial")
    if p.is_constant():
        return p.ring.one()
    partials = [p.derivative(n) for n in p.used_variables()]
    partials = [d for d in partials if not d.is_zero()]
    rep = gcd_many([p] + partials)
    q = exact_divide(p, rep)
    assert q is not None, "repeated part must divide"
    return q.monic()
