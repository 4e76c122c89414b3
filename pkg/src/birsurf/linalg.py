"""Small exact linear algebra helpers over Q and Z."""

from __future__ import annotations

from fractions import Fraction
from math import gcd as igcd
from typing import Sequence

Matrix = list  # list of list of int | Fraction
Vector = list


def identity(n: int) -> Matrix:
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


def mat_mul(a: Sequence[Sequence], b: Sequence[Sequence]) -> Matrix:
    n, mid, m = len(a), len(b), len(b[0])
    return [[sum(a[i][k] * b[k][j] for k in range(mid)) for j in range(m)]
            for i in range(n)]


def mat_vec(a: Sequence[Sequence], v: Sequence) -> Vector:
    return [sum(row[j] * v[j] for j in range(len(v))) for row in a]


def mat_pow(a: Sequence[Sequence], e: int) -> Matrix:
    n = len(a)
    result = identity(n)
    base = [list(r) for r in a]
    while e:
        if e & 1:
            result = mat_mul(result, base)
        e >>= 1
        if e:
            base = mat_mul(base, base)
    return result


def mat_sub(a: Sequence[Sequence], b: Sequence[Sequence]) -> Matrix:
    return [[x - y for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]


def mat_eq(a: Sequence[Sequence], b: Sequence[Sequence]) -> bool:
    return all(all(x == y for x, y in zip(ra, rb)) for ra, rb in zip(a, b))


def is_zero_matrix(a: Sequence[Sequence]) -> bool:
    return all(all(v == 0 for v in row) for row in a)


def transpose(a: Sequence[Sequence]) -> Matrix:
    return [list(col) for col in zip(*a)]


def det(a: Sequence[Sequence]) -> Fraction:
    """Determinant by fraction-free-ish Gaussian elimination over Q."""
    n = len(a)
    m = [[Fraction(v) for v in row] for row in a]
    sign = 1
    out = Fraction(1)
    for k in range(n):
        pivot = next((i for i in range(k, n) if m[i][k] != 0), None)
        if pivot is None:
            return Fraction(0)
        if pivot != k:
            m[k], m[pivot] = m[pivot], m[k]
            sign = -sign
        out *= m[k][k]
        inv = 1 / m[k][k]
        for i in range(k + 1, n):
            if m[i][k] != 0:
                f = m[i][k] * inv
                m[i] = [x - f * y for x, y in zip(m[i], m[k])]
    return out * sign


def invert(a: Sequence[Sequence]) -> Matrix:
    n = len(a)
    m = [[Fraction(v) for v in row] + [Fraction(1 if i == j else 0)
                                       for j in range(n)]
         for i, row in enumerate(a)]
    for k in range(n):
        pivot = next((i for i in range(k, n) if m[i][k] != 0), None)
        if pivot is None:
            raise ValueError("singular matrix")
        m[k], m[pivot] = m[pivot], m[k]
        inv = 1 / m[k][k]
        m[k] = [v * inv for v in m[k]]
        for i in range(n):
            if i != k and m[i][k] != 0:
                f = m[i][k]
                m[i] = [x - f * y for x, y in zip(m[i], m[k])]
    return [row[n:] for row in m]


def nullspace(rows: Sequence[Sequence]) -> list[Vector]:
    """Basis of the rational kernel of a matrix (list of rows)."""
    if not rows:
        return []
    m = [[Fraction(v) for v in row] for row in rows]
    ncols = len(m[0])
    pivots: list[int] = []
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
                m[i] = [x - f * y for x, y in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for fc in free:
        vec = [Fraction(0)] * ncols
        vec[fc] = Fraction(1)
        for i, pc in enumerate(pivots):
            vec[pc] = -m[i][fc]
        basis.append(vec)
    return basis


def primitive_integer_vector(v: Sequence) -> list[int]:
    """Scale a rational vector to coprime integers, first nonzero positive."""
    fr = [Fraction(x) for x in v]
    if all(x == 0 for x in fr):
        raise ValueError("zero vector")
    denom = 1
    for x in fr:
        denom = denom * x.denominator // igcd(denom, x.denominator)
    ints = [int(x * denom) for x in fr]
    g = 0
    for x in ints:
        g = igcd(g, abs(x))
    ints = [x // g for x in ints]
    lead = next(x for x in ints if x != 0)
    if lead < 0:
        ints = [-x for x in ints]
    return ints


def integer_kernel(rows: Sequence[Sequence]) -> list[list[int]]:
    """Primitive integer basis of the kernel (saturated for rank-1 needs)."""
    return [primitive_integer_vector(v) for v in nullspace(rows)]


def unimodular_row_kernel(w: Sequence[int]) -> list[list[int]]:
    """Saturated integer kernel basis of a single nonzero integer row.

    Builds a unimodular U with w * U = (g, 0, ..., 0); the trailing columns
    of U span the kernel over Z.
    """
    n = len(w)
    u = identity(n)
    work = list(w)
    # sweep gcd into position 0 by column operations mirrored on u
    pivot = next((i for i in range(n) if work[i] != 0), None)
    if pivot is None:
        raise ValueError("zero row")
    if pivot != 0:
        work[0], work[pivot] = work[pivot], work[0]
        for r in range(n):
            u[r][0], u[r][pivot] = u[r][pivot], u[r][0]
    for i in range(1, n):
        while work[i] != 0:
            q = work[0] // work[i]
            work[0] -= q * work[i]
            for r in range(n):
                u[r][0] -= q * u[r][i]
            work[0], work[i] = work[i], work[0]
            for r in range(n):
                u[r][0], u[r][i] = u[r][i], u[r][0]
    assert all(x == 0 for x in work[1:])
    return [[u[r][c] for r in range(n)] for c in range(1, n)]
