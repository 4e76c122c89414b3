"""Birational self-maps of the projective plane and of P1 x P1.

A map is stored by homogeneous components: three forms of one degree on the
plane, or two pairs of biforms on a product of lines (one pair per output
factor, each pair sharing a bidegree).  Composition is followed by removal
of common factors, which is exactly the mechanism behind degree drops and
the failure of (f^n)* = (f*)^n.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import count
from typing import Callable, Iterable, Sequence

from . import linalg
from .factors import Factorization, p1p1_small_factors, rational_linear_factors
from .lattice import Lattice, PullbackAction, RealAlgebraic, spectral_data
from .polynomials import (HomogPoly, Poly, PolyRing, ResourceCapError,
                          as_homogeneous, exact_divide, gcd, gcd_many,
                          make_poly, ratio, rat_str, squarefree_part)
from .solve import InfiniteZeroSetError, ResidualFactor, rational_common_zeros

DEFAULT_TERM_CAP = 200_000


class MapError(Exception):
    pass


class AmbientMismatchError(MapError):
    pass


class DominanceError(MapError):
    """The components do not define a dominant map (zero Jacobian)."""


class InternalCheckError(MapError):
    """An internal cross-check failed; this signals a bug, not bad input."""


# -- ambient surfaces and charts -------------------------------------------------


class Chart:
    """An affine chart: one variable per grading group set to 1."""

    def __init__(self, ambient: "Ambient", fixed: tuple[int, ...]):
        self.ambient = ambient
        self.fixed = fixed  # index of the fixed variable within each group
        ring = ambient.ring
        affine_names = []
        self._proj_of_affine = []
        for gi, group in enumerate(ring.groups):
            for vi, name in enumerate(group):
                if vi != fixed[gi]:
                    affine_names.append(name)
                    self._proj_of_affine.append(ring.var_index(name))
        self.affine_ring = PolyRing([tuple(affine_names)], graded=False)
        self.id = ",".join(f"{ring.groups[gi][fi]}=1"
                           for gi, fi in enumerate(fixed))

    def __repr__(self):
        return f"Chart({self.id})"

    def to_affine(self, p: Poly) -> Poly:
        ring = self.ambient.ring
        images = []
        pos = {name: self.affine_ring.variable(name)
               for name in self.affine_ring.names}
        for gi, group in enumerate(ring.groups):
            for vi, name in enumerate(group):
                if vi == self.fixed[gi]:
                    images.append(self.affine_ring.one())
                else:
                    images.append(pos[name])
        return p.compose(images)

    def to_projective(self, q: Poly, degvec: Sequence[int] | None = None
                      ) -> HomogPoly:
        """Homogenize an affine polynomial, minimally or to a target degree."""
        ring = self.ambient.ring
        if q.is_zero():
            raise ValueError("cannot homogenize the zero polynomial")
        aff = self.affine_ring
        group_of_affine = []
        for name in aff.names:
            group_of_affine.append(ring._group_of[ring.var_index(name)])
        mins = [0] * ring.ngroups
        terms = q.terms()
        needed = [0] * ring.ngroups
        for exps in terms:
            per_group = [0] * ring.ngroups
            for e, gi in zip(exps, group_of_affine):
                per_group[gi] += e
            for gi in range(ring.ngroups):
                needed[gi] = max(needed[gi], per_group[gi])
        if degvec is None:
            degvec = needed
        else:
            degvec = list(degvec)
            if any(d < n for d, n in zip(degvec, needed)):
                raise ValueError("target degree below the affine degree")
        out = {}
        for exps, coeff in terms.items():
            e_full = [0] * ring.nvars
            per_group = [0] * ring.ngroups
            for e, name, gi in zip(exps, aff.names, group_of_affine):
                e_full[ring.var_index(name)] = e
                per_group[gi] += e
            for gi, group in enumerate(ring.groups):
                filler = ring.var_index(group[self.fixed[gi]])
                e_full[filler] = degvec[gi] - per_group[gi]
            out[tuple(e_full)] = coeff
        return as_homogeneous(ring.from_terms(out))

    def point_to_affine(self, point: "ProjPoint") -> tuple[Fraction, ...] | None:
        ring = self.ambient.ring
        values = []
        offset = 0
        for gi, group in enumerate(ring.groups):
            coords = point.coords[offset:offset + len(group)]
            pivot = coords[self.fixed[gi]]
            if pivot == 0:
                return None
            for vi, v in enumerate(coords):
                if vi != self.fixed[gi]:
                    values.append(Fraction(v) / Fraction(pivot))
            offset += len(group)
        return tuple(values)

    def point_from_affine(self, values: Sequence) -> "ProjPoint":
        ring = self.ambient.ring
        coords = [Fraction(0)] * ring.nvars
        it = iter(values)
        for gi, group in enumerate(ring.groups):
            for vi, name in enumerate(group):
                idx = ring.var_index(name)
                coords[idx] = Fraction(1) if vi == self.fixed[gi] else \
                    Fraction(next(it))
        return ProjPoint(self.ambient, coords)


class Ambient:
    """P2 or P1xP1 together with its coordinate ring and Picard lattice."""

    _P2_NAMES = ("x", "y", "z")
    _P1P1_GROUPS = (("x", "x1"), ("y", "y1"))

    def __init__(self, kind: str, ring: PolyRing):
        self.kind = kind
        self.ring = ring

    @classmethod
    def p2(cls) -> "Ambient":
        return cls("P2", PolyRing([cls._P2_NAMES]))

    @classmethod
    def p1xp1(cls) -> "Ambient":
        return cls("P1xP1", PolyRing(cls._P1P1_GROUPS))

    def __eq__(self, other):
        return isinstance(other, Ambient) and self.kind == other.kind and \
            self.ring == other.ring

    def __hash__(self):
        return hash((self.kind, self.ring))

    def __repr__(self):
        return f"Ambient({self.kind})"

    @property
    def num_components(self) -> int:
        return 3 if self.kind == "P2" else 4

    def scaling_units(self) -> tuple[tuple[int, ...], ...]:
        """Component index groups that share one projective scaling."""
        return ((0, 1, 2),) if self.kind == "P2" else ((0, 1), (2, 3))

    def lattice(self) -> Lattice:
        if self.kind == "P2":
            return Lattice([[1]], [-3], labels=("H",))
        return Lattice([[0, 1], [1, 0]], [-2, -2], labels=("V", "H"))

    def charts(self) -> list[Chart]:
        if self.kind == "P2":
            return [Chart(self, (i,)) for i in (2, 0, 1)]
        return [Chart(self, (i, j)) for i in (1, 0) for j in (1, 0)]

    def standard_chart(self) -> Chart:
        return self.charts()[0]

    def chart_by_id(self, chart_id: str) -> Chart:
        for chart in self.charts():
            if chart.id == chart_id:
                return chart
        raise KeyError(f"unknown chart {chart_id!r}")

    def anticanonical_degvec(self) -> tuple[int, ...]:
        return (3,) if self.kind == "P2" else (2, 2)


class ProjPoint:
    """A point with exact homogeneous coordinates, canonically scaled."""

    __slots__ = ("ambient", "coords")

    def __init__(self, ambient: Ambient, coords: Sequence):
        ring = ambient.ring
        values = [ratio(Fraction(str(v)) if isinstance(v, str) else v)
                  for v in coords]
        if len(values) != ring.nvars:
            raise ValueError("coordinate arity mismatch")
        offset = 0
        canonical: list = []
        for group in ring.groups:
            chunk = values[offset:offset + len(group)]
            pivot = next((v for v in chunk if v != 0), None)
            if pivot is None:
                raise ValueError("a coordinate group is entirely zero")
            canonical.extend(ratio(Fraction(v) / Fraction(pivot))
                             for v in chunk)
            offset += len(group)
        self.ambient = ambient
        self.coords = tuple(canonical)

    def __eq__(self, other):
        return (isinstance(other, ProjPoint) and self.ambient == other.ambient
                and self.coords == other.coords)

    def __hash__(self):
        return hash((self.ambient.kind, self.coords))

    def sort_key(self):
        return tuple(Fraction(v) for v in self.coords)

    def __repr__(self):
        return str(self)

    def __str__(self):
        ring = self.ambient.ring
        offset = 0
        parts = []
        for group in ring.groups:
            chunk = self.coords[offset:offset + len(group)]
            parts.append("[" + " : ".join(rat_str(v) for v in chunk) + "]")
            offset += len(group)
        return parts[0] if len(parts) == 1 else "(" + ", ".join(parts) + ")"

    def affine_label(self) -> str:
        """Affine-style rendering; infinity where the chart denominator dies."""
        ring = self.ambient.ring
        offset = 0
        vals = []
        for group in ring.groups:
            chunk = self.coords[offset:offset + len(group)]
            if len(chunk) == 2:
                vals.append("oo" if chunk[1] == 0
                            else rat_str(Fraction(chunk[0]) / Fraction(chunk[1])))
            else:
                if chunk[2] == 0:
                    return str(self)
                vals.append(rat_str(Fraction(chunk[0]) / Fraction(chunk[2])))
                vals.append(rat_str(Fraction(chunk[1]) / Fraction(chunk[2])))
            offset += len(group)
        return "(" + ", ".join(vals) + ")"

    def on_curve(self, defining: Poly) -> bool:
        return defining.evaluate(self.coords) == 0


# -- the map type ----------------------------------------------------------------


class BirMap:
    """A birational self-map given by homogeneous components."""

    def __init__(self, ambient: Ambient, components: Sequence[Poly],
                 inverse: "BirMap | None" = None, _normalized: bool = False):
        if len(components) != ambient.num_components:
            raise MapError(f"{ambient.kind} maps need "
                           f"{ambient.num_components} components")
        comps = []
        for c in components:
            if c.ring != ambient.ring:
                raise MapError("component lives in the wrong ring")
            if c.is_zero():
                raise MapError("zero component")
            comps.append(as_homogeneous(c))
        for unit in ambient.scaling_units():
            degs = {comps[i].degree_vector() for i in unit}
            if len(degs) != 1:
                raise MapError(f"components {unit} must share a degree vector")
        self.ambient = ambient
        self.components = tuple(comps)
        self.inverse = inverse
        self._normalized = _normalized

    @classmethod
    def identity(cls, ambient: Ambient) -> "BirMap":
        return cls(ambient, ambient.ring.variables(), _normalized=True)

    def with_inverse(self, inverse: "BirMap") -> "BirMap":
        """Attach a declared inverse, verifying f . inverse = identity."""
        composed = compose_maps(self, inverse)
        if not composed.is_identity():
            raise MapError("declared inverse fails to invert the map")
        inv = BirMap(inverse.ambient, inverse.components,
                     _normalized=inverse._normalized)
        return BirMap(self.ambient, self.components, inverse=inv,
                      _normalized=self._normalized)

    def degree_data(self) -> tuple[tuple[int, ...], ...]:
        """One degree vector per scaling unit."""
        return tuple(self.components[unit[0]].degree_vector()
                     for unit in self.ambient.scaling_units())

    def is_identity(self) -> bool:
        f = self.normalized()
        return f.components == tuple(
            as_homogeneous(v) for v in self.ambient.ring.variables())

    def is_linear(self) -> bool:
        return all(sum(dv) == 1 for dv in self.degree_data())

    def normalized(self) -> "BirMap":
        if self._normalized:
            return self
        comps = list(self.components)
        for unit in self.ambient.scaling_units():
            polys = [comps[i] for i in unit]
            g = gcd_many(polys)
            if not g.is_constant():
                polys = [exact_divide(p, g) for p in polys]
            scaled = _joint_primitive(polys)
            for i, p in zip(unit, scaled):
                comps[i] = as_homogeneous(p)
        inv = self.inverse
        return BirMap(self.ambient, comps, inverse=inv, _normalized=True)

    def __eq__(self, other):
        if not isinstance(other, BirMap):
            return NotImplemented
        a, b = self.normalized(), other.normalized()
        return a.ambient == b.ambient and a.components == b.components

    def __repr__(self):
        comps = ", ".join(str(c) for c in self.components)
        return f"BirMap({self.ambient.kind}; {comps})"

    def component_exprs(self) -> list[str]:
        return [str(c) for c in self.components]


def _joint_primitive(polys: Sequence[Poly]) -> list[Poly]:
    """Scale a tuple by one common rational so coefficients are coprime
    integers and the first component's leading coefficient is positive."""
    from math import gcd as igcd
    denom = 1
    for p in polys:
        for c in p._terms.values():
            if isinstance(c, Fraction):
                denom = denom * c.denominator // igcd(denom, c.denominator)
    num_gcd = 0
    for p in polys:
        for c in p._terms.values():
            num_gcd = igcd(num_gcd, abs(int(c * denom)))
    scale = Fraction(denom, num_gcd)
    out = [p * scale for p in polys]
    if out[0].leading_coefficient() < 0:
        out = [-p for p in out]
    return out


def normalize(f: BirMap) -> BirMap:
    return f.normalized()


def compose_maps(f: BirMap, g: BirMap,
                 term_cap: int = DEFAULT_TERM_CAP) -> BirMap:
    """The composite map p -> f(g(p)), with common factors removed."""
    if f.ambient != g.ambient:
        raise AmbientMismatchError("maps live on different surfaces")
    _compose_preflight(f, g, term_cap)
    images = list(g.components)
    comps = [c.compose(images) for c in f.components]
    return BirMap(f.ambient, comps).normalized()


def _compose_preflight(f: BirMap, g: BirMap, term_cap: int):
    gdeg = g.degree_data()
    ring = f.ambient.ring
    for unit, fdeg in zip(f.ambient.scaling_units(), f.degree_data()):
        # variables of grading group gi are replaced by forms of degree
        # gdeg[gi], so the composed degree mixes through the grading rule
        total = [sum(fdeg[gi] * gdeg[gi][target] for gi in range(ring.ngroups))
                 for target in range(ring.ngroups)]
        dim = 1
        for t, group in zip(total, ring.groups):
            dim *= _dim_of_degree(t, len(group))
        if dim * len(unit) > term_cap:
            raise ResourceCapError(
                f"composition would reach degree {tuple(total)} "
                f"(about {dim} monomials per component, cap {term_cap})")


def _dim_of_degree(d: int, nvars: int) -> int:
    from math import comb
    return comb(d + nvars - 1, nvars - 1)


def matrix_on_pic(f: BirMap) -> PullbackAction:
    """The pullback action on the Picard lattice read off the degrees."""
    f = f.normalized()
    lat = f.ambient.lattice()
    if f.ambient.kind == "P2":
        (d,), = f.degree_data()
        return PullbackAction(lat, [[d]])
    (a, b), (c, d) = f.degree_data()
    # column i is the class of the pullback of the i-th fiber class
    return PullbackAction(lat, [[a, c], [b, d]])


@dataclass(frozen=True)
class DegreeRecord:
    n: int
    degrees: tuple[tuple[int, ...], ...]
    norm: int
    stable: bool

    def to_json(self):
        return {"n": self.n, "degrees": [list(d) for d in self.degrees],
                "norm": self.norm, "stable": self.stable}


@dataclass
class DegreeSequenceResult:
    records: list[DegreeRecord]
    truncated: bool = False
    truncated_at: int | None = None

    def all_stable(self) -> bool:
        return all(r.stable for r in self.records)

    def to_json(self):
        return {"records": [r.to_json() for r in self.records],
                "truncated": self.truncated,
                "truncated_at": self.truncated_at}


def _record_for(g: BirMap, n: int, base: PullbackAction) -> DegreeRecord:
    m_n = matrix_on_pic(g).matrix
    expected = base.power(n)
    stable = linalg.mat_eq([list(r) for r in m_n], expected)
    degs = g.degree_data()
    norm = max(max(dv) for dv in degs)
    return DegreeRecord(n, degs, norm, stable)


def degree_sequence(f: BirMap, n_max: int,
                    term_cap: int = DEFAULT_TERM_CAP) -> DegreeSequenceResult:
    """Exact degrees of the normalized iterates f, f^2, ..., f^n_max."""
    if n_max < 1:
        raise ValueError("need at least one iterate")
    f = f.normalized()
    base = matrix_on_pic(f)
    records = [_record_for(f, 1, base)]
    g = f
    for n in range(2, n_max + 1):
        try:
            g = compose_maps(f, g, term_cap)
        except ResourceCapError:
            return DegreeSequenceResult(records, truncated=True,
                                        truncated_at=n)
        records.append(_record_for(g, n, base))
    return DegreeSequenceResult(records)


@dataclass
class DynamicalDegreeEstimate:
    lower: Fraction
    upper: Fraction
    n_used: int
    stable_value: RealAlgebraic | None

    def to_json(self):
        data = {"root_bound_interval": [rat_str(self.lower), rat_str(self.upper)],
                "n_used": self.n_used}
        data["stable_value"] = (self.stable_value.to_json()
                                if self.stable_value else None)
        return data


def dynamical_degree_estimate(records: Sequence[DegreeRecord],
                              action: PullbackAction) -> DynamicalDegreeEstimate:
    """norm(f^N)^(1/N) as a rational interval, plus the exact spectral radius
    of the pullback action whenever every recorded iterate was stable."""
    if not records:
        raise ValueError("no degree records")
    last = records[-1]
    v, n = Fraction(last.norm), last.n
    lo, hi = Fraction(0), max(v, Fraction(1))
    while hi - lo > Fraction(1, 64):
        mid = (lo + hi) / 2
        if mid ** n <= v:
            lo = mid
        else:
            hi = mid
    stable_value = None
    if all(r.stable for r in records):
        from .algebraic import charpoly, largest_real_root
        stable_value = largest_real_root(charpoly(action.matrix))
    return DynamicalDegreeEstimate(lo, hi, n, stable_value)


# -- indeterminacy ----------------------------------------------------------------


@dataclass
class IndeterminacyResult:
    points: list[ProjPoint]
    residual: list[ResidualFactor]

    def is_clean(self) -> bool:
        return not self.residual

    def to_json(self):
        return {"points": [str(p) for p in self.points],
                "affine": [p.affine_label() for p in self.points],
                "residual": [r.to_json() for r in self.residual]}


def _vanishing_sets(f: BirMap) -> list[list[HomogPoly]]:
    """Component families whose simultaneous vanishing is indeterminacy."""
    comps = list(f.components)
    if f.ambient.kind == "P2":
        return [comps]
    return [comps[0:2], comps[2:4]]


def indeterminacy_points(f: BirMap) -> IndeterminacyResult:
    """All rational indeterminacy points, with nonsplit residual factors."""
    f = f.normalized()
    points: list[ProjPoint] = []
    seen = set()
    residual: list[ResidualFactor] = []
    seen_residual = set()
    for family in _vanishing_sets(f):
        for chart in f.ambient.charts():
            affs = [chart.to_affine(c) for c in family]
            if any(a.is_constant() and not a.is_zero() for a in affs):
                continue  # no zeros visible in this chart
            names = chart.affine_ring.names
            try:
                result = rational_common_zeros(affs, names[0], names[1])
            except InfiniteZeroSetError as exc:
                raise MapError(
                    "components share a curve of common zeros; the map is "
                    f"not normalized ({exc})") from exc
            for vals in result.points:
                pt = chart.point_from_affine(vals)
                if pt not in seen:
                    seen.add(pt)
                    points.append(pt)
            for res in result.residual:
                key = (chart.id, res.variable, res.poly, res.specialized_at)
                if key not in seen_residual:
                    seen_residual.add(key)
                    residual.append(res)
    points.sort(key=lambda p: p.sort_key())
    return IndeterminacyResult(points, residual)


def point_is_indeterminate(f: BirMap, p: ProjPoint) -> bool:
    for family in _vanishing_sets(f):
        if all(c.evaluate(p.coords) == 0 for c in family):
            return True
    return False


def apply_map(f: BirMap, p: ProjPoint) -> ProjPoint | None:
    """Evaluate f at p; None when p is a point of indeterminacy."""
    values = [c.evaluate(p.coords) for c in f.components]
    for unit in f.ambient.scaling_units():
        if all(values[i] == 0 for i in unit):
            return None
    return ProjPoint(f.ambient, values)


# -- Jacobians and the exceptional divisor ----------------------------------------


def jacobian_det(f: BirMap) -> HomogPoly:
    """Defining polynomial of the exceptional (critical) divisor."""
    f = f.normalized()
    ring = f.ambient.ring
    if f.ambient.kind == "P2":
        names = ring.names
        m = [[c.derivative(n) for n in names] for c in f.components]
        det = (m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
               - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
               + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]))
        if det.is_zero():
            raise DominanceError("Jacobian vanishes identically")
        (d,), = f.degree_data()
        if det.degree_vector() != (3 * (d - 1),):
            raise InternalCheckError(
                f"Jacobian degree {det.degree_vector()} != {(3 * (d - 1),)}")
        return as_homogeneous(det)

    chart = f.ambient.standard_chart()
    xn, yn = chart.affine_ring.names
    f0, f1 = (chart.to_affine(c) for c in f.components[0:2])
    g0, g1 = (chart.to_affine(c) for c in f.components[2:4])
    wx_f = f1 * f0.derivative(xn) - f0 * f1.derivative(xn)
    wy_f = f1 * f0.derivative(yn) - f0 * f1.derivative(yn)
    wx_g = g1 * g0.derivative(xn) - g0 * g1.derivative(xn)
    wy_g = g1 * g0.derivative(yn) - g0 * g1.derivative(yn)
    num = wx_f * wy_g - wy_f * wx_g
    if num.is_zero():
        raise DominanceError("Jacobian vanishes identically")
    target = _exceptional_class(f)
    minimal = chart.to_projective(num)
    got = minimal.degree_vector()
    pad = [t - g for t, g in zip(target, got)]
    if any(p < 0 for p in pad):
        raise InternalCheckError(
            f"critical determinant bidegree {got} exceeds the class "
            f"K - f*K = {tuple(target)}")
    # boundary lines absorb the missing degree
    x1 = ring.variable(ring.groups[0][1])
    y1 = ring.variable(ring.groups[1][1])
    return as_homogeneous(minimal * x1 ** pad[0] * y1 ** pad[1])


def _exceptional_class(f: BirMap) -> tuple[int, ...]:
    """The class K - f*K in the ambient lattice, as a degree vector."""
    lat = f.ambient.lattice()
    action = matrix_on_pic(f)
    K = list(lat.K)
    fk = linalg.mat_vec([list(r) for r in action.matrix], K)
    return tuple(int(k - v) for k, v in zip(K, fk))


@dataclass
class JacobianDivisor:
    poly: HomogPoly
    factorization: Factorization

    @property
    def factors(self):
        return self.factorization.factors

    @property
    def residual(self):
        return self.factorization.residual

    def squarefree(self) -> HomogPoly:
        return as_homogeneous(squarefree_part(self.poly))

    def to_json(self):
        return {
            "polynomial": str(self.poly),
            "factors": [{"poly": str(p), "multiplicity": m}
                        for p, m in self.factors],
            "residual": str(self.residual),
        }


def jacobian_divisor(f: BirMap) -> JacobianDivisor:
    """The exceptional divisor with its small rational factors split off.

    The degree vector is checked against the class K - f*K computed in the
    Picard lattice; a mismatch is an internal error.
    """
    f = f.normalized()
    jac = jacobian_det(f)
    target = _exceptional_class(f)
    if jac.degree_vector() != target:
        raise InternalCheckError(
            f"exceptional degree {jac.degree_vector()} does not match "
            f"K - f*K = {target}")
    if f.ambient.kind == "P2":
        fac = rational_linear_factors(jac)
    else:
        fac = p1p1_small_factors(jac)
    return JacobianDivisor(jac, fac)


# -- sampling points on curves -----------------------------------------------------


def _rational_parameter_values() -> Iterable[Fraction]:
    yield Fraction(0)
    for k in count(1):
        yield Fraction(k)
        yield Fraction(-k)
        yield Fraction(1, k + 1)
        yield Fraction(-1, k + 1)


@dataclass
class SamplingFailure:
    tried_lines: int
    note: str

    def to_json(self):
        return {"tried_lines": self.tried_lines, "note": self.note}


def sample_curve_points(ambient: Ambient, defining: HomogPoly, want: int,
                        reject: Callable[[ProjPoint], bool] | None = None,
                        max_lines: int = 12) -> list[ProjPoint] | SamplingFailure:
    """Exact rational points on a curve, found by intersecting with lines."""
    reject = reject or (lambda p: False)
    ring = ambient.ring
    found: list[ProjPoint] = []
    seen = set()

    def add(pt: ProjPoint) -> bool:
        if pt in seen or not pt.on_curve(defining):
            return False
        seen.add(pt)
        if reject(pt):
            return False
        found.append(pt)
        return len(found) >= want

    from .factors import _univ_roots

    lines_tried = 0
    params = _rational_parameter_values()
    if ambient.kind == "P2":
        xn, yn, zn = ring.names
        while lines_tried < max_lines:
            t = next(params)
            lines_tried += 1
            restricted = defining.substitute({xn: t, zn: 1})
            if restricted.is_zero():
                # the whole line {x = t z} lies on the curve
                for s in (Fraction(0), Fraction(1), Fraction(-1), Fraction(2),
                          Fraction(-2), Fraction(3), Fraction(-3)):
                    if add(ProjPoint(ambient, [t, s, 1])):
                        return found
            elif not restricted.is_constant():
                for y0 in _univ_roots(restricted, yn):
                    if add(ProjPoint(ambient, [t, y0, 1])):
                        return found
        # the line at infinity, a binary form in x and y
        inf = defining.substitute({zn: 0})
        if inf.is_zero():
            for t in (Fraction(0), Fraction(1), Fraction(-1), Fraction(2)):
                if add(ProjPoint(ambient, [t, 1, 0])):
                    return found
            add(ProjPoint(ambient, [1, 0, 0]))
        else:
            aff = inf.substitute({yn: 1})
            if not aff.is_constant():
                for x0 in _univ_roots(aff, xn):
                    if add(ProjPoint(ambient, [x0, 1, 0])):
                        return found
            if inf.evaluate([1, 0, 0]) == 0:
                add(ProjPoint(ambient, [1, 0, 0]))
        if len(found) >= 2:
            return found
        return SamplingFailure(lines_tried,
                               "curve yielded too few rational points")

    xn, x1n = ring.groups[0]
    yn, y1n = ring.groups[1]
    xlines: list[tuple[Fraction, Fraction]] = [(Fraction(1), Fraction(0))]
    while len(xlines) < max_lines + 1:
        xlines.append((next(params), Fraction(1)))
    for x0, x1 in xlines[:max_lines]:
        lines_tried += 1
        restricted = defining.substitute({xn: x0, x1n: x1})
        if restricted.is_zero():
            for s in (Fraction(0), Fraction(1), Fraction(-1), Fraction(2)):
                if add(ProjPoint(ambient, [x0, x1, s, 1])):
                    return found
            continue
        aff = restricted.substitute({y1n: 1})
        if not aff.is_constant():
            for y0 in _univ_roots(aff, yn):
                if add(ProjPoint(ambient, [x0, x1, y0, 1])):
                    return found
        if restricted.evaluate(_infinity_probe(ring, x0, x1)) == 0:
            if add(ProjPoint(ambient, [x0, x1, 1, 0])):
                return found
    if len(found) >= 2:
        return found
    return SamplingFailure(lines_tried, "curve yielded too few rational points")


def _infinity_probe(ring: PolyRing, x0: Fraction, x1: Fraction) -> list:
    # coordinates for evaluating at ((x0 : x1), (1 : 0))
    return [x0, x1, 1, 0]


# -- images of curves, orbits, stability -------------------------------------------


@dataclass
class NotCollapsed:
    witness: tuple[ProjPoint, ProjPoint, ProjPoint, ProjPoint]
    note: str = "two curve points map to different images"

    def to_json(self):
        p1, q1, p2, q2 = self.witness
        return {"note": self.note,
                "witness": [{"point": str(p1), "image": str(q1)},
                            {"point": str(p2), "image": str(q2)}]}


def exceptional_image(f: BirMap, defining: HomogPoly
                      ) -> ProjPoint | NotCollapsed | SamplingFailure:
    """The single image point of a contracted curve, or evidence against."""
    f = f.normalized()
    samples = sample_curve_points(
        f.ambient, as_homogeneous(defining), want=3,
        reject=lambda p: point_is_indeterminate(f, p))
    if isinstance(samples, SamplingFailure):
        return samples
    if len(samples) < 2:
        return SamplingFailure(12, "fewer than two usable samples")
    images = []
    for p in samples:
        q = apply_map(f, p)
        assert q is not None  # rejected indeterminate samples above
        images.append((p, q))
    base_p, base_q = images[0]
    for p, q in images[1:]:
        if q != base_q:
            return NotCollapsed((base_p, base_q, p, q))
    return base_q


@dataclass
class OrbitResult:
    points: list[ProjPoint]
    halt: str  # "completed" | "indeterminacy"
    index: int | None = None

    def to_json(self):
        return {"points": [str(p) for p in self.points], "halt": self.halt,
                "index": self.index}


def orbit(f: BirMap, p: ProjPoint, n_max: int) -> OrbitResult:
    """Exact forward orbit, halting on indeterminacy."""
    f = f.normalized()
    points = [p]
    for _ in range(n_max):
        cur = points[-1]
        if point_is_indeterminate(f, cur):
            return OrbitResult(points, "indeterminacy", len(points) - 1)
        nxt = apply_map(f, cur)
        assert nxt is not None
        points.append(nxt)
    if point_is_indeterminate(f, points[-1]):
        return OrbitResult(points, "indeterminacy", len(points) - 1)
    return OrbitResult(points, "completed")


@dataclass
class StabilityViolation:
    component: str
    n: int
    point: ProjPoint

    def to_json(self):
        return {"component": self.component, "n": self.n,
                "point": str(self.point), "affine": self.point.affine_label()}


@dataclass
class StabilityReport:
    label: str  # "PASS-up-to-N" | "VIOLATED"
    checked_up_to: int
    violations: list[StabilityViolation]
    inconclusive: list[dict]
    degree_stability_consistent: bool | None
    inverse_report: "StabilityReport | None" = None

    @property
    def passed(self) -> bool:
        return not self.violations

    def to_json(self):
        data = {"label": self.label, "checked_up_to": self.checked_up_to,
                "violations": [v.to_json() for v in self.violations],
                "inconclusive": self.inconclusive,
                "degree_stability_consistent": self.degree_stability_consistent}
        if self.inverse_report is not None:
            data["inverse"] = self.inverse_report.to_json()
        return data


def as_check(f: BirMap, n_max: int, check_degrees: bool = True,
             term_cap: int = DEFAULT_TERM_CAP,
             _check_inverse: bool = True) -> StabilityReport:
    """Orbit test for algebraic stability: no exceptional curve may reach
    a point of indeterminacy within n_max steps.

    A PASS is always "up to n_max": the stability condition quantifies over
    all iterates and has no finite certificate in general.
    """
    f = f.normalized()
    jd = jacobian_divisor(f)
    violations: list[StabilityViolation] = []
    inconclusive: list[dict] = []
    for poly, _mult in jd.factors:
        image = exceptional_image(f, poly)
        if isinstance(image, SamplingFailure):
            inconclusive.append({"component": str(poly),
                                 "reason": "sampling failure",
                                 "detail": image.to_json()})
            continue
        if isinstance(image, NotCollapsed):
            inconclusive.append({"component": str(poly),
                                 "reason": "component is not contracted",
                                 "detail": image.to_json()})
            continue
        result = orbit(f, image, n_max - 1)
        if result.halt == "indeterminacy":
            violations.append(StabilityViolation(
                str(poly), result.index + 1, result.points[result.index]))
    if not jd.residual.is_constant():
        inconclusive.append({
            "component": str(jd.residual),
            "reason": "nonsplit exceptional factor; image not computable "
                      "over Q"})

    consistent = None
    if check_degrees:
        seq = degree_sequence(f, n_max, term_cap)
        first_violation = min((v.n for v in violations), default=None)
        consistent = _stability_consistency(seq, first_violation)

    inverse_report = None
    if f.inverse is not None and _check_inverse:
        inverse_report = as_check(f.inverse, n_max, check_degrees=False,
                                  term_cap=term_cap, _check_inverse=False)

    label = f"PASS-up-to-{n_max}" if not violations else "VIOLATED"
    return StabilityReport(label, n_max, violations, inconclusive,
                           consistent, inverse_report)


def _stability_consistency(seq: DegreeSequenceResult,
                           first_violation: int | None) -> bool:
    if first_violation is None:
        return seq.all_stable()
    for record in seq.records:
        if record.n <= first_violation and not record.stable:
            return False
        if record.n == first_violation + 1 and record.stable:
            return False
    return True


def interpolated_inverse(f: BirMap, degree: int | None = None) -> BirMap | None:
    """Reconstruct the inverse map by linear interpolation, then verify.

    The coefficients of the inverse's components satisfy linear conditions
    "inverse(f(p)) is proportional to p", one pair per sample point.  Only a
    verified inverse is returned.  Works for plane maps; the degree defaults
    to the degree of f itself (quadratic maps have quadratic inverses).
    """
    f = f.normalized()
    if f.ambient.kind != "P2":
        raise MapError("inverse interpolation is implemented for plane maps")
    (d,), = f.degree_data()
    degree = degree if degree is not None else d
    ring = f.ambient.ring
    monos = ring.monomials((degree,))
    nmono = len(monos)

    rows: list[list[Fraction]] = []
    samples = 0
    gen = _sample_grid()
    while samples < 3 * nmono:
        p = ProjPoint(f.ambient, next(gen))
        q = apply_map(f, p)
        if q is None:
            continue
        mv = [_monomial_value(q.coords, e) for e in monos]
        px, py, pz = (Fraction(v) for v in p.coords)
        rows.append([v * py for v in mv] + [-v * px for v in mv] + [0] * nmono)
        rows.append([v * pz for v in mv] + [0] * nmono + [-v * px for v in mv])
        rows.append([0] * nmono + [v * pz for v in mv] + [-v * py for v in mv])
        samples += 1
    basis = linalg.nullspace(rows)
    if len(basis) != 1:
        return None
    vec = basis[0]
    comps = []
    for i in range(3):
        terms = {e: c for e, c in zip(monos, vec[i * nmono:(i + 1) * nmono]) if c}
        if not terms:
            return None
        comps.append(ring.from_terms(terms))
    try:
        candidate = BirMap(f.ambient, comps).normalized()
    except MapError:
        return None
    if not compose_maps(f, candidate).is_identity():
        return None
    return candidate


def _sample_grid():
    k = 1
    while True:
        yield [1, k, k + 1]
        yield [k, 1, 2 * k + 1]
        yield [k + 2, 2 * k - 1, 1]
        yield [-k, k + 3, 2]
        k += 1


def _monomial_value(coords, exps):
    v = Fraction(1)
    for c, e in zip(coords, exps):
        if e:
            v *= Fraction(c) ** e
    return v


def proper_transform(f: BirMap, p: HomogPoly) -> HomogPoly:
    """Pullback of a reduced curve with every exceptional factor removed.

    A unit result means the curve was contracted by the map.
    """
    f = f.normalized()
    p = as_homogeneous(p)
    if p.is_zero() or p.is_constant():
        raise MapError("proper transform needs a nonconstant curve")
    total = p.compose(list(f.components))
    jac = jacobian_det(f)
    while True:
        g = gcd(total, jac)
        if g.is_constant():
            break
        quotient = exact_divide(total, g)
        assert quotient is not None
        total = quotient
    if total.is_constant():
        return f.ambient.ring.one()
    return as_homogeneous(squarefree_part(total).primitive_normalized())
