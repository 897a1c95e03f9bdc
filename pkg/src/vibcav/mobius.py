"""Real Moebius (homographic) maps as projective 2x2 matrices.

A map v -> (a*v + b)/(c*v + d) is stored by its coefficient matrix
[[a, b], [c, d]].  Two matrices that differ by an overall scale act
identically, so composition and powers renormalize by the largest
coefficient magnitude to keep long iterations in floating range.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

__all__ = [
    "Homography",
    "MapKind",
    "MapClass",
    "identity",
    "inverse",
    "apply",
    "derivative_at",
    "compose",
    "power",
    "classify",
    "schwarzian_at",
]


class MapKind(str, Enum):
    ELLIPTIC = "elliptic"
    PARABOLIC = "parabolic"
    HYPERBOLIC = "hyperbolic"


@dataclass(frozen=True)
class Homography:
    """Coefficient matrix of v -> (a*v + b)/(c*v + d).

    Attributes
    ----------
    a, b, c, d : float
        Matrix entries.  The determinant a*d - b*c must be nonzero.
    """

    a: float
    b: float
    c: float
    d: float

    def __post_init__(self):
        for x in (self.a, self.b, self.c, self.d):
            if not math.isfinite(x):
                raise ValueError("homography coefficients must be finite")
        if self.det == 0.0:
            raise ValueError("homography must be invertible (det != 0)")

    @property
    def det(self) -> float:
        return self.a * self.d - self.b * self.c

    @property
    def trace(self) -> float:
        return self.a + self.d

    def matrix(self):
        return ((self.a, self.b), (self.c, self.d))


@dataclass(frozen=True)
class MapClass:
    """Eigenvalue classification of a homography.

    kind is hyperbolic for a real pair of distinct modulus, parabolic
    for a repeated eigenvalue, elliptic for a complex-conjugate pair.
    lambda1 is the larger-modulus eigenvalue.
    """

    kind: MapKind
    lambda1: complex
    lambda2: complex
    discriminant: float


def identity() -> Homography:
    return Homography(1.0, 0.0, 0.0, 1.0)


def inverse(h: Homography) -> Homography:
    """Projective inverse (adjugate matrix)."""
    return _normalized(h.d, -h.b, -h.c, h.a)


def _normalized(a, b, c, d) -> Homography:
    s = max(abs(a), abs(b), abs(c), abs(d))
    return Homography(a / s, b / s, c / s, d / s)


def apply(h: Homography, v: float) -> float:
    """Evaluate the map at v on the extended real line.

    The pole v = -d/c maps to a signed infinity (the sign follows the
    IEEE signed zero of the denominator, i.e. the one-sided limit from
    the side the rounded input falls on); v = +-inf maps to a/c, or to
    a signed infinity when c = 0.
    """
    if math.isinf(v):
        if h.c != 0.0:
            return h.a / h.c
        return v * (h.a / h.d)
    num = h.a * v + h.b
    den = h.c * v + h.d
    if den == 0.0:
        return math.copysign(math.inf, num) * math.copysign(1.0, den)
    return num / den


def derivative_at(h: Homography, v: float) -> float:
    """First derivative det/(c*v + d)^2; positive whenever det > 0."""
    if math.isinf(v):
        if h.c == 0.0:
            return h.det / (h.d * h.d)
        return 0.0
    den = h.c * v + h.d
    if den == 0.0:
        raise ValueError("derivative undefined at pole")
    return h.det / (den * den)


def compose(h1: Homography, h2: Homography) -> Homography:
    """Matrix product: apply(compose(h1, h2), v) = apply(h1, apply(h2, v))."""
    a = h1.a * h2.a + h1.b * h2.c
    b = h1.a * h2.b + h1.b * h2.d
    c = h1.c * h2.a + h1.d * h2.c
    d = h1.c * h2.b + h1.d * h2.d
    return _normalized(a, b, c, d)


def _power_squaring(h: Homography, n: int) -> Homography:
    out = identity()
    base = h
    while n:
        if n & 1:
            out = compose(out, base)
        base = compose(base, base)
        n >>= 1
    return out


def power(h: Homography, n: int) -> Homography:
    """n-fold composition, n >= 0, via eigendecomposition.

    Diagonalizable maps use the two-eigenvalue resolvent form
    H^n = (l1^n (H - l2 I) - l2^n (H - l1 I)) / (l1 - l2); a repeated
    eigenvalue (within the degeneracy tolerance of classify) uses the
    Jordan form l^n (I + n N).  Repeated squaring is the fallback if
    either path loses finiteness.  The result is renormalized.
    """
    if n < 0:
        raise ValueError("power requires n >= 0")
    if n == 0:
        return identity()
    if n == 1:
        return _normalized(h.a, h.b, h.c, h.d)
    cls = classify(h)
    try:
        if cls.kind is MapKind.PARABOLIC:
            lam = cls.lambda1.real
            # H = lam (I + N) with N nilpotent: H^n = lam^n (I + n N)
            na = 1.0 + n * (h.a / lam - 1.0)
            nb = n * (h.b / lam)
            nc = n * (h.c / lam)
            nd = 1.0 + n * (h.d / lam - 1.0)
            out = _normalized(na, nb, nc, nd)
        else:
            l1, l2 = cls.lambda1, cls.lambda2
            # scale eigenvalue powers jointly to avoid overflow
            m = max(abs(l1), abs(l2))
            p1 = (l1 / m) ** n
            p2 = (l2 / m) ** n
            den = l1 - l2
            a = (p1 * (h.a - l2) - p2 * (h.a - l1)) / den
            b = (p1 - p2) * h.b / den
            c = (p1 - p2) * h.c / den
            d = (p1 * (h.d - l2) - p2 * (h.d - l1)) / den
            out = _normalized(a.real, b.real, c.real, d.real)
    except (ValueError, ZeroDivisionError, OverflowError):
        return _power_squaring(h, n)
    if not all(map(math.isfinite, (out.a, out.b, out.c, out.d))):
        return _power_squaring(h, n)
    return out


def classify(h: Homography) -> MapClass:
    """Eigenvalue kind from the discriminant trace^2 - 4 det.

    The parabolic band is |discriminant| <= 1e-12 (trace^2 + |det|),
    since the discriminant is a difference of like-sized terms.
    """
    tr = h.trace
    det = h.det
    disc = tr * tr - 4.0 * det
    eps = 1e-12 * (tr * tr + abs(det))
    if abs(disc) <= eps:
        lam = tr / 2.0
        return MapClass(MapKind.PARABOLIC, complex(lam), complex(lam), disc)
    if disc > 0.0:
        s = math.sqrt(disc)
        l1 = (tr + s) / 2.0
        l2 = (tr - s) / 2.0
        if abs(l1) < abs(l2):
            l1, l2 = l2, l1
        return MapClass(MapKind.HYPERBOLIC, complex(l1), complex(l2), disc)
    s = math.sqrt(-disc)
    l1 = complex(tr / 2.0, s / 2.0)
    return MapClass(MapKind.ELLIPTIC, l1, l1.conjugate(), disc)


def _schwarzian_fd(g, v: float, h: float) -> float:
    gm2, gm1, g0, gp1, gp2 = (g(v - 2 * h), g(v - h), g(v), g(v + h), g(v + 2 * h))
    d1 = (gp1 - gm1) / (2.0 * h)
    scale = max(abs(gp1), abs(gm1), abs(g0), 1.0)
    if abs(d1) < 1e-12 * scale / h:
        raise ValueError("Schwarzian undefined (derivative vanishes)")
    d2 = (gp1 - 2.0 * g0 + gm1) / (h * h)
    d3 = (gp2 - 2.0 * gp1 + 2.0 * gm1 - gm2) / (2.0 * h ** 3)
    return d3 / d1 - 1.5 * (d2 / d1) ** 2


def schwarzian_at(g, v: float, step: float = 1e-3) -> float:
    """Numeric Schwarzian derivative g'''/g' - (3/2)(g''/g')^2.

    Central differences at steps h and h/2 combined by one Richardson
    step; h = step * (1 + |v|) so the stencil scales with the point.
    g is any callable defined near v.  Moebius maps give 0 up to
    truncation error.
    """
    h = step * (1.0 + abs(v))
    s1 = _schwarzian_fd(g, v, h)
    s2 = _schwarzian_fd(g, v, h / 2.0)
    return (4.0 * s2 - s1) / 3.0
