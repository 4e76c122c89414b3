"""Picard-lattice engine: intersection theory, spectral data, theorem checks.

Everything is exact.  Eigenvalues are carried as algebraic numbers with
isolating intervals; growth classification relies on the fact that an
integer matrix whose spectrum lies in the closed unit disk has only roots of
unity as eigenvalues, detected by trial division with cyclotomic polynomials.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from . import linalg, univariate as uv
from .algebraic import (NFElement, NumberField, RealAlgebraic, charpoly,
                        largest_real_root)
from .polynomials import rat_str


class LatticeError(Exception):
    pass


class PreconditionError(LatticeError):
    """An operation's stated precondition failed; nothing was guessed."""


def _vec(values) -> tuple[Fraction, ...]:
    return tuple(Fraction(v) for v in values)


@dataclass(frozen=True)
class ClassVec:
    """A divisor class with caller-declared bookkeeping flags."""

    values: tuple[Fraction, ...]
    effective: bool | None = None
    label: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "values", _vec(self.values))

    def __iter__(self):
        return iter(self.values)

    def __len__(self):
        return len(self.values)

    def to_json(self):
        return [rat_str(v) for v in self.values]


def as_values(vec) -> tuple[Fraction, ...]:
    if isinstance(vec, ClassVec):
        return vec.values
    return _vec(vec)


class Lattice:
    """An integer lattice of signature (1, rank-1) with a canonical class."""

    def __init__(self, gram: Sequence[Sequence[int]], K: Sequence[int],
                 labels: Sequence[str] | None = None):
        self.gram = tuple(tuple(int(v) for v in row) for row in gram)
        self.K = tuple(int(v) for v in K)
        self.rank = len(self.gram)
        self.labels = tuple(labels) if labels else None
        if any(len(row) != self.rank for row in self.gram):
            raise LatticeError("Gram matrix must be square")
        if len(self.K) != self.rank:
            raise LatticeError("canonical class has wrong length")
        if self.labels and len(self.labels) != self.rank:
            raise LatticeError("labels have wrong length")
        for i in range(self.rank):
            for j in range(self.rank):
                if self.gram[i][j] != self.gram[j][i]:
                    raise LatticeError("Gram matrix must be symmetric")
        pos, neg, zero = self.signature()
        if not (pos == 1 and neg == self.rank - 1 and zero == 0):
            raise LatticeError(
                f"signature ({pos},{neg}) with {zero} null directions; "
                "surface lattices have signature (1, rank-1)")

    def signature(self) -> tuple[int, int, int]:
        """Eigenvalue sign counts (positive, negative, zero), via Sturm."""
        cp = charpoly(self.gram)
        cp_int = uv.to_int_poly(cp)
        zero_roots = 0
        while cp_int and cp_int[0] == 0:
            cp_int = cp_int[1:]
            zero_roots += 1
        if uv.degree(cp_int) < 1:
            return (0, 0, zero_roots)
        return (_count_signed_roots(cp_int, +1),
                _count_signed_roots(cp_int, -1), zero_roots)

    def product(self, a, b) -> Fraction:
        av, bv = as_values(a), as_values(b)
        if len(av) != self.rank or len(bv) != self.rank:
            raise LatticeError("dimension mismatch")
        return Fraction(sum(av[i] * self.gram[i][j] * bv[j]
                            for i in range(self.rank)
                            for j in range(self.rank)))

    def self_intersection(self, a) -> Fraction:
        return self.product(a, a)

    def genus(self, c) -> Fraction:
        cv = as_values(c)
        return self.product(cv, tuple(x + k for x, k in zip(cv, self.K))) / 2 + 1

    def canonical(self) -> tuple[Fraction, ...]:
        return _vec(self.K)

    def __eq__(self, other):
        return (isinstance(other, Lattice) and self.gram == other.gram
                and self.K == other.K)

    def __repr__(self):
        return f"Lattice(rank={self.rank}, K={list(self.K)})"

    def to_json(self):
        data = {"rank": self.rank, "gram": [list(r) for r in self.gram],
                "K": list(self.K)}
        if self.labels:
            data["labels"] = list(self.labels)
        return data


def _count_signed_roots(int_poly: list, sign: int) -> int:
    """Real roots of the given sign, counted with multiplicity."""
    count = 0
    work = list(int_poly)
    while uv.degree(work) >= 1:
        sf = uv.squarefree(work)
        chain = uv.sturm_chain(sf)
        bound = uv.root_bound(sf)
        if sign > 0:
            count += uv.count_roots(chain, Fraction(0), bound)
        else:
            count += uv.count_roots(chain, -bound, Fraction(0))
        q = uv.exact_div(work, sf)
        if q is None:  # work squarefree already
            break
        work = q
    return count


def intersect_and_genus(lattice: Lattice, c, d=None) -> tuple[Fraction, Fraction]:
    """Intersection product (with d, or with c itself) and the genus of c."""
    cv = as_values(c)
    product = lattice.product(cv, as_values(d) if d is not None else cv)
    return product, lattice.genus(cv)


class PullbackAction:
    """An integer matrix acting on a lattice by pullback."""

    def __init__(self, lattice: Lattice, matrix: Sequence[Sequence[int]]):
        self.lattice = lattice
        self.matrix = tuple(tuple(int(v) for v in row) for row in matrix)
        if len(self.matrix) != lattice.rank or \
                any(len(r) != lattice.rank for r in self.matrix):
            raise LatticeError("matrix size does not match the lattice")
        if linalg.det(self.matrix) == 0:
            raise LatticeError("pullback action must be invertible")

    def pushforward_matrix(self) -> list[list[Fraction]]:
        g = [list(r) for r in self.lattice.gram]
        ginv = linalg.invert(g)
        mt = linalg.transpose([list(r) for r in self.matrix])
        return linalg.mat_mul(linalg.mat_mul(ginv, mt), g)

    def apply(self, v) -> tuple[Fraction, ...]:
        return tuple(linalg.mat_vec([list(r) for r in self.matrix], list(as_values(v))))

    def apply_power(self, v, n: int) -> tuple[Fraction, ...]:
        m = linalg.mat_pow([list(r) for r in self.matrix], n)
        return tuple(linalg.mat_vec(m, list(as_values(v))))

    def power(self, n: int) -> list[list[int]]:
        return linalg.mat_pow([list(r) for r in self.matrix], n)

    def __eq__(self, other):
        return (isinstance(other, PullbackAction)
                and self.matrix == other.matrix
                and self.lattice == other.lattice)

    def __repr__(self):
        return f"PullbackAction({[list(r) for r in self.matrix]})"

    def adjoint_holds(self, alpha, beta) -> bool:
        """(M a) . b == a . (M_* b) -- true by construction, checkable."""
        push = self.pushforward_matrix()
        lhs = self.lattice.product(self.apply(alpha), beta)
        rhs = self.lattice.product(alpha, linalg.mat_vec(push, list(as_values(beta))))
        return lhs == rhs


# -- spectral data ---------------------------------------------------------------


@dataclass
class SpectralData:
    lam: RealAlgebraic
    growth: str
    theta_plus: list | None
    theta_minus: list | None
    theta_product_sign: int | None
    field: NumberField | None
    unipotent_power: int | None = None
    nilpotency: int | None = None
    anomaly: str | None = None

    def to_json(self):
        data = {"lambda": self.lam.to_json(), "growth": self.growth}
        if self.theta_plus is not None:
            data["theta_plus"] = [_nf_json(v) for v in self.theta_plus]
        if self.theta_minus is not None:
            data["theta_minus"] = [_nf_json(v) for v in self.theta_minus]
        if self.theta_product_sign is not None:
            data["theta_plus_dot_theta_minus_sign"] = self.theta_product_sign
        if self.unipotent_power is not None:
            data["unipotent_power"] = self.unipotent_power
        if self.nilpotency is not None:
            data["nilpotency_index"] = self.nilpotency
        if self.anomaly:
            data["anomaly"] = self.anomaly
        return data


def _nf_json(v):
    if isinstance(v, NFElement):
        return v.to_json()
    return rat_str(v)


@dataclass
class GrowthClass:
    tag: str  # Bounded | Linear | Quadratic | Exponential | Anomaly
    unipotent_power: int | None = None
    nilpotency: int | None = None
    detail: str | None = None

    def to_json(self):
        data = {"tag": self.tag}
        if self.unipotent_power is not None:
            data["unipotent_power"] = self.unipotent_power
        if self.nilpotency is not None:
            data["nilpotency_index"] = self.nilpotency
        if self.detail:
            data["detail"] = self.detail
        return data


def _cyclotomic_split(cp: list) -> tuple[dict[int, int], list]:
    """Divide out cyclotomic factors; returns ({order: mult}, residual)."""
    rank = uv.degree(cp)
    orders: dict[int, int] = {}
    work = uv.to_int_poly(cp)
    d = 1
    while d <= 2 * rank * rank + 2:
        if uv.euler_phi(d) <= rank:
            phi = uv.cyclotomic(d)
            while True:
                q = uv.exact_div(work, phi)
                if q is None:
                    break
                work = [int(c) for c in q]
                orders[d] = orders.get(d, 0) + 1
        d += 1
        if uv.degree(work) < 1:
            break
    return orders, work


def growth_class(action: PullbackAction) -> GrowthClass:
    """Norm-growth classification of the iterates of an integer action."""
    cp = charpoly(action.matrix)
    lam = largest_real_root(cp)
    if lam is not None and lam.compare_rational(1) > 0:
        return GrowthClass("Exponential")
    orders, residual = _cyclotomic_split(cp)
    if uv.degree(residual) >= 1:
        return GrowthClass(
            "Anomaly",
            detail="spectrum is not made of roots of unity despite no real "
                   "eigenvalue above 1; not a surface pullback action")
    m = 1
    for d in orders:
        m = m * d // _igcd(m, d)
    u = action.power(m)
    n = action.lattice.rank
    nil = linalg.mat_sub(u, linalg.identity(n))
    # M^m is unipotent (all eigenvalues 1), so nil is nilpotent; s is the
    # least exponent with nil^s = 0
    s = 1
    power = nil
    while not linalg.is_zero_matrix(power):
        power = linalg.mat_mul(power, nil)
        s += 1
        if s > n:
            break
    tag = {1: "Bounded", 2: "Linear", 3: "Quadratic"}.get(s)
    if tag is None:
        return GrowthClass("Anomaly", m, s,
                           detail=f"nilpotency index {s} cannot arise for "
                                  "genuine surface pullbacks")
    return GrowthClass(tag, m, s)


def _igcd(a: int, b: int) -> int:
    from math import gcd
    return gcd(a, b)


def _eigenvector_for(matrix: Sequence[Sequence], lam: RealAlgebraic,
                     field: NumberField | None) -> list:
    """Kernel vector of (M - lam I), entries in Q or in Q(lam), first nonzero 1."""
    n = len(matrix)
    if lam.is_rational():
        lv = lam.as_fraction()
        rows = [[Fraction(matrix[i][j]) - (lv if i == j else 0)
                 for j in range(n)] for i in range(n)]
        basis = linalg.nullspace(rows)
        if not basis:
            raise LatticeError("eigenvalue has no rational eigenvector")
        vec = basis[0]
        lead = next(v for v in vec if v != 0)
        return [v / lead for v in vec]
    assert field is not None
    gen = field.generator()
    rows = [[field.element([Fraction(matrix[i][j])]) - (gen if i == j else
                                                        field.element([0]))
             for j in range(n)] for i in range(n)]
    basis = _nf_nullspace(rows, field)
    if not basis:
        raise LatticeError("eigenvalue has no eigenvector in its field")
    vec = basis[0]
    lead = next(v for v in vec if not v.is_zero())
    inv = lead.inverse()
    return [v * inv for v in vec]


def _nf_nullspace(rows, field: NumberField):
    m = [row[:] for row in rows]
    ncols = len(m[0])
    zero = field.element([0])
    one = field.element([1])
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        pivot = next((i for i in range(r, len(m)) if not m[i][c].is_zero()), None)
        if pivot is None:
            continue
        m[r], m[pivot] = m[pivot], m[r]
        inv = m[r][c].inverse()
        m[r] = [v * inv for v in m[r]]
        for i in range(len(m)):
            if i != r and not m[i][c].is_zero():
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for fc in free:
        vec = [zero] * ncols
        vec[fc] = one
        for i, pc in enumerate(pivots):
            vec[pc] = zero - m[i][fc]
        basis.append(vec)
    return basis


def spectral_data(lattice: Lattice, action: PullbackAction) -> SpectralData:
    """Dominant eigenvalue, growth class, and the nef eigenclasses.

    For actions coming from surface maps the dynamical degree is the largest
    real eigenvalue (the pullback preserves the effective cone, so the
    spectral radius is attained on the reals).
    """
    cp = charpoly(action.matrix)
    growth = growth_class(action)
    if growth.tag == "Exponential":
        lam = largest_real_root(cp)
        field = None if lam.is_rational() else NumberField(lam)
        theta_plus = _eigenvector_for(action.matrix, lam, field)
        push = action.pushforward_matrix()
        theta_minus = _eigenvector_for(push, lam, field)
        sign = _product_sign(lattice, theta_plus, theta_minus, field)
        return SpectralData(lam, growth.tag, theta_plus, theta_minus, sign,
                            field)
    if growth.tag == "Anomaly":
        lam = largest_real_root(cp) or RealAlgebraic.from_rational(1)
        return SpectralData(lam, growth.tag, None, None, None, None,
                            anomaly=growth.detail)
    lam = RealAlgebraic.from_rational(1)
    if growth.tag == "Bounded":
        # unique-up-to-scale eigenclasses need unbounded growth
        return SpectralData(lam, growth.tag, None, None, None, None,
                            growth.unipotent_power, growth.nilpotency)
    # Linear or Quadratic: theta+ = theta- = the fiber class, the primitive
    # class spanning the image of (M^m - I)^(s-1)
    m = linalg.mat_pow([list(r) for r in action.matrix], growth.unipotent_power)
    nil = linalg.mat_sub(m, linalg.identity(lattice.rank))
    img = linalg.mat_pow(nil, growth.nilpotency - 1) if growth.nilpotency > 1 \
        else nil
    cols = linalg.transpose(img)
    fiber = None
    for col in cols:
        if any(v != 0 for v in col):
            fiber = linalg.primitive_integer_vector(col)
            break
    theta = [Fraction(v) for v in fiber] if fiber else None
    if theta is not None:
        lead = next(v for v in theta if v != 0)
        theta = [v / lead for v in theta]
    sign = _product_sign(lattice, theta, theta, None) if theta else None
    return SpectralData(lam, growth.tag, theta, theta, sign, None,
                        growth.unipotent_power, growth.nilpotency)


def _product_sign(lattice: Lattice, a, b, field: NumberField | None) -> int:
    if field is None:
        val = lattice.product([Fraction(x) for x in a],
                              [Fraction(x) for x in b])
        return (val > 0) - (val < 0)
    total = field.element([0])
    for i in range(lattice.rank):
        for j in range(lattice.rank):
            g = lattice.gram[i][j]
            if g:
                total = total + a[i] * b[j] * g
    return total.sign() if not total.is_zero() else 0


def _dot_with_field(lattice: Lattice, theta, vec, field: NumberField | None):
    if field is None:
        return lattice.product([Fraction(x) for x in theta], vec)
    values = as_values(vec)
    total = field.element([0])
    for i in range(lattice.rank):
        coeff = sum(Fraction(lattice.gram[i][j]) * values[j]
                    for j in range(lattice.rank))
        if coeff:
            total = total + theta[i] * coeff
    return total


@dataclass
class BignefReport:
    sign_plus: int
    sign_minus: int
    passed: bool
    note: str

    def to_json(self):
        return {"sign_theta_plus": self.sign_plus,
                "sign_theta_minus": self.sign_minus,
                "passed": self.passed, "note": self.note}


def bignef_test(lattice: Lattice, spectral: SpectralData, c) -> BignefReport:
    """Exact signs of theta+- . (C + K); PASS means both are <= 0."""
    if spectral.theta_plus is None or spectral.theta_minus is None:
        raise PreconditionError("no eigenclasses available for this action")
    ck = tuple(x + k for x, k in zip(as_values(c), lattice.K))
    vp = _dot_with_field(lattice, spectral.theta_plus, ck, spectral.field)
    vm = _dot_with_field(lattice, spectral.theta_minus, ck, spectral.field)
    sp = vp.sign() if isinstance(vp, NFElement) else (vp > 0) - (vp < 0)
    sm = vm.sign() if isinstance(vm, NFElement) else (vm > 0) - (vm < 0)
    passed = sp <= 0 and sm <= 0
    note = ("invariant-curve class admissible"
            if passed else "no invariant curve can have this class")
    return BignefReport(sp, sm, passed, note)


# -- negativity, isotropic decompositions, component bounds ---------------------


@dataclass
class NegdefVerdict:
    verdict: str  # NegativeDefinite | KernelDivisor | HodgeContradiction
    kernel_divisor: list[int] | None = None
    scale: str | None = None
    note: str | None = None

    def to_json(self):
        data = {"verdict": self.verdict}
        if self.kernel_divisor is not None:
            data["kernel_divisor"] = self.kernel_divisor
        if self.scale is not None:
            data["theta_multiple"] = self.scale
        if self.note:
            data["note"] = self.note
        return data


def _restricted_gram(lattice: Lattice, components) -> list[list[Fraction]]:
    vecs = [as_values(c) for c in components]
    return [[lattice.product(a, b) for b in vecs] for a in vecs]


def _eigen_sign_counts(sym: Sequence[Sequence]) -> tuple[int, int, int]:
    """(positive, negative, zero) eigenvalue counts of a symmetric matrix."""
    cp = charpoly(sym)
    cp_int = uv.to_int_poly(cp)
    zero = 0
    while cp_int and cp_int[0] == 0:
        cp_int = cp_int[1:]
        zero += 1
    if uv.degree(cp_int) < 1:
        return (0, 0, zero + (1 if not cp_int else 0))
    return (_count_signed_roots(cp_int, +1), _count_signed_roots(cp_int, -1),
            zero)


def negdef_on_support(lattice: Lattice, components, theta) -> NegdefVerdict:
    """Hodge-index checks for a nef class vanishing on a support.

    Requires theta^2 >= 0 and theta . C_i >= 0 (checked); demands
    theta . C_i == 0 for every component.
    """
    tv = as_values(theta)
    t2 = lattice.product(tv, tv)
    if t2 < 0:
        raise PreconditionError("theta has negative self-intersection")
    prods = [lattice.product(tv, c) for c in components]
    if any(p < 0 for p in prods):
        raise PreconditionError("theta is negative against a component")
    if any(p != 0 for p in prods):
        raise PreconditionError("theta does not vanish on every component")
    sym = _restricted_gram(lattice, components)
    pos, neg, zero = _eigen_sign_counts(sym)
    if pos == 0 and zero == 0:
        return NegdefVerdict("NegativeDefinite")
    if t2 == 0 and pos == 0:
        basis = linalg.nullspace(sym)
        if len(basis) != 1:
            return NegdefVerdict(
                "KernelDivisor", None, None,
                note=f"kernel dimension {len(basis)}; support is disconnected, "
                     "use the isotropic decomposition")
        gen = linalg.primitive_integer_vector(basis[0])
        if not all(v > 0 for v in gen):
            return NegdefVerdict("KernelDivisor", gen, None,
                                 note="kernel generator is not positive; "
                                      "inputs are not curve components")
        dclass = [sum(Fraction(gen[i]) * as_values(components[i])[j]
                      for i in range(len(gen))) for j in range(lattice.rank)]
        scale = _proportionality(dclass, tv)
        return NegdefVerdict("KernelDivisor", gen,
                             rat_str(scale) if scale is not None else None)
    return NegdefVerdict(
        "HodgeContradiction", note="theta^2 > 0 with a non-negative direction "
        "on the support; the inputs are not consistent with a surface")


def _proportionality(a, b) -> Fraction | None:
    """t with a == t*b, if it exists and is positive."""
    pairs = [(x, y) for x, y in zip(a, b) if x != 0 or y != 0]
    if not pairs:
        return None
    t = None
    for x, y in pairs:
        if y == 0:
            return None
        ratio = Fraction(x) / Fraction(y)
        if t is None:
            t = ratio
        elif t != ratio:
            return None
    return t


@dataclass
class IsotropicBlock:
    component_indices: list[int]
    kernel_divisor: list[int] | None  # coefficients over the block components

    def to_json(self):
        return {"components": self.component_indices,
                "kernel_divisor": self.kernel_divisor}


@dataclass
class IsotropicDecomposition:
    k: int
    blocks: list[IsotropicBlock]
    divisors: list[list[int]]  # coefficients over all components
    relations: list[list[int]]
    relations_spanned_by_divisors: bool
    fibration: bool
    bound: int
    bound_holds: bool

    def to_json(self):
        return {
            "k": self.k,
            "blocks": [b.to_json() for b in self.blocks],
            "divisors": self.divisors,
            "relations": self.relations,
            "relations_spanned_by_divisors": self.relations_spanned_by_divisors,
            "fibration": self.fibration,
            "component_bound": self.bound,
            "bound_holds": self.bound_holds,
        }


def isotropic_decomposition(lattice: Lattice, components) -> IsotropicDecomposition:
    """Per-connected-component minimal isotropic divisors (when they exist).

    Requires the intersection form to be non-positive on the span of the
    components.  k >= 2 signals an invariant fibration.
    """
    vecs = [as_values(c) for c in components]
    n = len(vecs)
    sym = _restricted_gram(lattice, vecs)
    pos, _, _ = _eigen_sign_counts(sym)
    if pos > 0:
        raise PreconditionError(
            "intersection form is not non-positive on the span")

    adj = [[i != j and sym[i][j] > 0 for j in range(n)] for i in range(n)]
    blocks: list[list[int]] = []
    seen = [False] * n
    for start in range(n):
        if seen[start]:
            continue
        stack, block = [start], []
        seen[start] = True
        while stack:
            v = stack.pop()
            block.append(v)
            for w in range(n):
                if adj[v][w] and not seen[w]:
                    seen[w] = True
                    stack.append(w)
        blocks.append(sorted(block))

    out_blocks: list[IsotropicBlock] = []
    divisors: list[list[int]] = []
    for block in blocks:
        sub = [[sym[i][j] for j in block] for i in block]
        kernel = linalg.nullspace(sub)
        if not kernel:
            out_blocks.append(IsotropicBlock(block, None))
            continue
        if len(kernel) != 1:
            raise LatticeError(
                "connected block with kernel dimension > 1; components are "
                "linearly degenerate")
        gen = linalg.primitive_integer_vector(kernel[0])
        if not all(v > 0 for v in gen):
            raise LatticeError(
                "kernel generator of a connected block is not positive")
        out_blocks.append(IsotropicBlock(block, gen))
        full = [0] * n
        for idx, coeff in zip(block, gen):
            full[idx] = coeff
        divisors.append(full)

    k = len(divisors)
    class_rows = [[vecs[i][r] for i in range(n)] for r in range(lattice.rank)]
    relations = [linalg.primitive_integer_vector(v)
                 for v in linalg.nullspace(class_rows)]
    spanned = _subspace_contained(relations, divisors)
    h11 = lattice.rank
    if k >= 2:
        bound = h11 + k - 2
    else:
        bound = h11 - 1
    return IsotropicDecomposition(
        k=k, blocks=out_blocks, divisors=divisors, relations=relations,
        relations_spanned_by_divisors=spanned, fibration=k >= 2,
        bound=bound, bound_holds=n <= bound)


def _subspace_contained(vectors, spanning) -> bool:
    """True when every vector lies in the rational span of ``spanning``."""
    if not vectors:
        return True
    if not spanning:
        return False
    span_rows = [list(map(Fraction, v)) for v in spanning]
    for v in vectors:
        rows = span_rows + [list(map(Fraction, v))]
        if _rank(rows) != _rank(span_rows):
            return False
    return True


def _rank(rows) -> int:
    if not rows:
        return 0
    m = [list(map(Fraction, r)) for r in rows]
    ncols = len(m[0])
    rank = 0
    for c in range(ncols):
        pivot = next((i for i in range(rank, len(m)) if m[i][c] != 0), None)
        if pivot is None:
            continue
        m[rank], m[pivot] = m[pivot], m[rank]
        inv = 1 / m[rank][c]
        m[rank] = [v * inv for v in m[rank]]
        for i in range(len(m)):
            if i != rank and m[i][c] != 0:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[rank])]
        rank += 1
    return rank


# -- configuration tests and counting bounds ------------------------------------


@dataclass
class ConfigReport:
    connected: bool
    connected_components: int
    irreducible_components: int
    genus_per_component: list[str]
    total_genus: str
    is_tree: bool
    is_cycle: bool
    cycle_length: int | None
    is_ade: bool
    case: str
    bound: int
    bound_holds: bool
    notes: list[str] = field(default_factory=list)

    def to_json(self):
        return {
            "connected": self.connected,
            "connected_components": self.connected_components,
            "irreducible_components": self.irreducible_components,
            "genus_per_component": self.genus_per_component,
            "total_genus": self.total_genus,
            "tree": self.is_tree,
            "cycle": self.is_cycle,
            "cycle_length": self.cycle_length,
            "ade": self.is_ade,
            "case": self.case,
            "bound": self.bound,
            "bound_holds": self.bound_holds,
            "notes": self.notes,
        }


def _connected_blocks(products, n) -> list[list[int]]:
    adj = [[i != j and products[i][j] > 0 for j in range(n)] for i in range(n)]
    seen = [False] * n
    blocks = []
    for s in range(n):
        if seen[s]:
            continue
        stack, block = [s], []
        seen[s] = True
        while stack:
            v = stack.pop()
            block.append(v)
            for w in range(n):
                if adj[v][w] and not seen[w]:
                    seen[w] = True
                    stack.append(w)
        blocks.append(sorted(block))
    return blocks


def _is_tree(products, indices) -> bool:
    """Every split into two connected pieces meets exactly once."""
    if len(indices) == 1:
        return True
    if len(_connected_blocks_sub(products, indices)) != 1:
        return False
    total = sum(products[i][j] for a, i in enumerate(indices)
                for j in indices[a + 1:])
    return total == len(indices) - 1 and all(
        products[i][j] in (0, 1) for a, i in enumerate(indices)
        for j in indices[a + 1:])


def _connected_blocks_sub(products, indices):
    pos = {v: i for i, v in enumerate(indices)}
    sub = [[products[i][j] for j in indices] for i in indices]
    return _connected_blocks(sub, len(indices))


def _is_cycle(products, indices) -> tuple[bool, int | None]:
    n = len(indices)
    if n < 2:
        return False, None
    if len(_connected_blocks_sub(products, indices)) != 1:
        return False, None
    if n == 2:
        i, j = indices
        return (products[i][j] == 2), 2
    for a, i in enumerate(indices):
        row = [products[i][j] for j in indices if j != i]
        if sorted(row, reverse=True)[:2] != [1, 1] or sum(row) != 2:
            return False, None
    return True, n


def component_bounds(lattice: Lattice, components,
                     declared_genus: Sequence | None = None) -> ConfigReport:
    """Counting bounds and configuration tests for a set of curve classes."""
    vecs = [as_values(c) for c in components]
    n = len(vecs)
    products = [[lattice.product(a, b) for b in vecs] for a in vecs]
    genus = [lattice.genus(v) for v in vecs]
    if declared_genus is not None:
        declared = [Fraction(g) for g in declared_genus]
        if declared != genus:
            raise PreconditionError(
                f"declared genus {declared} does not match the classes "
                f"(computed {genus})")
    total_class = [sum(v[j] for v in vecs) for j in range(lattice.rank)]
    total_genus = lattice.genus(total_class)
    blocks = _connected_blocks(products, n)
    block_genus = []
    for block in blocks:
        cls = [sum(vecs[i][j] for i in block) for j in range(lattice.rank)]
        block_genus.append(lattice.genus(cls))
    has_genus1 = any(g == 1 for g in block_genus)
    all_genus0 = all(g == 0 for g in block_genus)
    notes = []
    h11 = lattice.rank
    indices = list(range(n))
    tree = _is_tree(products, indices)
    cycle, cycle_len = _is_cycle(products, indices)
    ade = tree and all(products[i][i] == -2 for i in indices)

    if has_genus1:
        case = "genus-one piece: irreducible components bounded by h11 + 2"
        bound = h11 + 2
        holds = n <= bound
    elif all_genus0:
        pos, _, _ = _eigen_sign_counts(products)
        if pos == 0:
            deco = isotropic_decomposition(lattice, components)
            if deco.k >= 2:
                case = (f"genus-zero pieces spanning {deco.k} fibers: "
                        "irreducible components bounded by h11 + k - 1")
                bound = h11 + deco.k - 1
                holds = n <= bound
            else:
                case = "genus-zero pieces: connected components bounded by h11 + 1"
                bound = h11 + 1
                holds = len(blocks) <= bound
        else:
            case = "genus-zero pieces: connected components bounded by h11 + 1"
            bound = h11 + 1
            holds = len(blocks) <= bound
    else:
        case = "a connected piece has genus above one: no invariant bound applies"
        bound = h11 + 2
        holds = n <= bound
        notes.append("configuration cannot be invariant under an expanding map")

    from .polynomials import rat_str as _rs
    return ConfigReport(
        connected=len(blocks) == 1,
        connected_components=len(blocks),
        irreducible_components=n,
        genus_per_component=[_rs(g) for g in genus],
        total_genus=_rs(total_genus),
        is_tree=tree,
        is_cycle=cycle,
        cycle_length=cycle_len if cycle else None,
        is_ade=ade,
        case=case,
        bound=bound,
        bound_holds=holds,
        notes=notes,
    )


# -- blowup / contraction bookkeeping and the telescoping identity ---------------


def lattice_blowup(lattice: Lattice) -> Lattice:
    """Append an exceptional (-1) direction; K gains the new class."""
    r = lattice.rank
    gram = [list(row) + [0] for row in lattice.gram]
    gram.append([0] * r + [-1])
    K = list(lattice.K) + [1]
    labels = None
    if lattice.labels:
        labels = list(lattice.labels) + [f"E{r}"]
    return Lattice(gram, K, labels)


def lattice_contract(lattice: Lattice, cls) -> Lattice:
    """Contract a (-1) class of genus zero; restrict to its orthogonal part."""
    c = [int(v) for v in as_values(cls)]
    if any(Fraction(v) != int(v) for v in as_values(cls)):
        raise PreconditionError("contract expects an integer class")
    c2 = lattice.product(c, c)
    g = lattice.genus(c)
    if c2 != -1 or g != 0:
        raise PreconditionError(
            f"class has self-intersection {c2} and genus {g}; a contractible "
            "class needs (-1, genus 0)")
    w = [sum(lattice.gram[i][j] * c[j] for j in range(lattice.rank))
         for i in range(lattice.rank)]
    basis = linalg.unimodular_row_kernel(w)
    gram = [[sum(sum(bi[i] * lattice.gram[i][j] * bj[j]
                     for i in range(lattice.rank))
                 for j in range(lattice.rank)) for bj in basis] for bi in basis]
    kc = lattice.product(lattice.K, c)
    target = [k + kc * ci for k, ci in zip(lattice.K, c)]
    rows = [[Fraction(basis[b][i]) for b in range(len(basis))]
            for i in range(lattice.rank)]
    sol = _solve_linear(rows, [Fraction(t) for t in target])
    if sol is None or any(v.denominator != 1 for v in sol):
        raise LatticeError("canonical class does not descend integrally")
    return Lattice(gram, [int(v) for v in sol])


def _solve_linear(rows, target):
    """One solution of rows * x = target over Q, or None."""
    m = [row[:] + [t] for row, t in zip(rows, target)]
    ncols = len(rows[0])
    pivots = []
    r = 0
    for c in range(ncols):
        pivot = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if pivot is None:
            continue
        m[r], m[pivot] = m[pivot], m[r]
        inv = 1 / m[r][c]
        m[r] = [v * inv for v in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
    for i in range(r, len(m)):
        if m[i][-1] != 0:
            return None
    x = [Fraction(0)] * ncols
    for i, c in enumerate(pivots):
        x[c] = m[i][-1]
    return x


def telescoping_check(lattice: Lattice, action: PullbackAction,
                      n_max: int) -> dict:
    """K - M^k K must equal the partial sums of M^j (K - M K), k <= n_max."""
    K = [Fraction(v) for v in lattice.K]
    m = [list(r) for r in action.matrix]
    e1 = [a - b for a, b in zip(K, linalg.mat_vec(m, K))]
    results = {}
    acc = [Fraction(0)] * lattice.rank
    power = linalg.identity(lattice.rank)
    for k in range(1, n_max + 1):
        acc = [a + b for a, b in zip(acc, linalg.mat_vec(power, e1))]
        power = linalg.mat_mul(m, power)
        lhs = [a - b for a, b in zip(K, linalg.mat_vec(power, K))]
        results[k] = lhs == acc
    return results
