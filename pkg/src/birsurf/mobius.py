"""Degree-one rational self-maps of the projective line over Q.

A map is a 2x2 rational matrix modulo scale, stored with the first nonzero
entry normalized to 1.  Points of the line are Fractions plus the infinity
sentinel ``OO``.
"""

from __future__ import annotations

from fractions import Fraction


class _Infinity:
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "oo"


OO = _Infinity()


def _as_value(v):
    if v is OO:
        return OO
    return Fraction(v) if not isinstance(v, Fraction) else v


class MobiusMap:
    """u -> (a*u + b) / (c*u + d) with ad - bc != 0, canonically scaled."""

    __slots__ = ("a", "b", "c", "d")

    def __init__(self, a, b, c, d):
        a, b, c, d = (Fraction(v) for v in (a, b, c, d))
        if a * d - b * c == 0:
            raise ValueError("singular matrix does not define a Mobius map")
        for pivot in (a, b, c, d):
            if pivot != 0:
                a, b, c, d = a / pivot, b / pivot, c / pivot, d / pivot
                break
        self.a, self.b, self.c, self.d = a, b, c, d

    @classmethod
    def identity(cls) -> "MobiusMap":
        return cls(1, 0, 0, 1)

    @classmethod
    def scaling(cls, factor) -> "MobiusMap":
        return cls(factor, 0, 0, 1)

    def matrix(self) -> tuple[tuple[Fraction, Fraction], tuple[Fraction, Fraction]]:
        return ((self.a, self.b), (self.c, self.d))

    def determinant(self) -> Fraction:
        return self.a * self.d - self.b * self.c

    def __eq__(self, other) -> bool:
        if not isinstance(other, MobiusMap):
            return NotImplemented
        return (self.a, self.b, self.c, self.d) == (other.a, other.b, other.c, other.d)

    def __hash__(self):
        return hash((self.a, self.b, self.c, self.d))

    def __repr__(self):
        return f"MobiusMap({self.a}, {self.b}, {self.c}, {self.d})"

    def __call__(self, u):
        u = _as_value(u)
        if u is OO:
            if self.c == 0:
                return OO
            return self.a / self.c
        num = self.a * u + self.b
        den = self.c * u + self.d
        if den == 0:
            return OO
        return num / den

    def compose(self, other: "MobiusMap") -> "MobiusMap":
        """self after other: (self . other)(u) = self(other(u))."""
        a = self.a * other.a + self.b * other.c
        b = self.a * other.b + self.b * other.d
        c = self.c * other.a + self.d * other.c
        d = self.c * other.b + self.d * other.d
        return MobiusMap(a, b, c, d)

    def inverse(self) -> "MobiusMap":
        return MobiusMap(self.d, -self.b, -self.c, self.a)

    def is_identity(self) -> bool:
        return self == MobiusMap.identity()


def _to_standard(p, q, r) -> MobiusMap:
    """The map sending (p, q, r) to (0, 1, oo); the three points are distinct."""
    if p is OO:
        return MobiusMap(0, q - r, 1, -r)
    if q is OO:
        return MobiusMap(1, -p, 1, -r)
    if r is OO:
        return MobiusMap(1, -p, 0, q - p)
    return MobiusMap(q - r, -p * (q - r), q - p, -r * (q - p))


def from_three_pairs(pairs) -> MobiusMap:
    """The unique Mobius map with m(u_i) = v_i for three distinct pairs."""
    (u1, v1), (u2, v2), (u3, v3) = ((_as_value(a), _as_value(b)) for a, b in pairs)
    if len({repr(u1), repr(u2), repr(u3)}) != 3 or len({repr(v1), repr(v2), repr(v3)}) != 3:
        raise ValueError("the three source and target points must be distinct")
    src = _to_standard(u1, u2, u3)
    dst = _to_standard(v1, v2, v3)
    return dst.inverse().compose(src)
