"""Hyperbolic plane kernel.

Isometries are PSL(2,R) matrices acting on the upper half-plane by
z -> (az+b)/(cz+d).  Interior points live in the upper half-plane; points at
infinity are stored as angles on the unit circle of the disk model, the two
being related by the Cayley transform w = (z - i)/(z + i).  Under that
convention the real point x corresponds to the angle theta with
x = -cot(theta/2), and infinity corresponds to theta = 0.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import AmbiguousClass, BadArc, NotHyperbolic

TWO_PI = 2.0 * math.pi
DET_TOL = 1e-12
PARABOLIC_TOL = 1e-9
_EPS4 = 4.0 * np.finfo(float).eps

_CAYLEY = np.array([[1.0, -1.0j], [1.0, 1.0j]])
_CAYLEY_INV = np.linalg.inv(_CAYLEY)


def _wrap(theta):
    t = math.fmod(theta, TWO_PI)
    if t < 0:
        t += TWO_PI
    # fmod of a tiny negative number can round up to exactly 2*pi
    return 0.0 if t >= TWO_PI else t


def _canonical(a, b, c, d):
    det = a * d - b * c
    # rescaling by a determinant that is 1 up to roundoff only spreads the
    # cancellation error of ad - bc over every entry
    if abs(det - 1.0) > _EPS4 * (abs(a * d) + abs(b * c)):
        if not det > 0:
            raise ValueError(f"matrix has non-positive determinant {det!r}")
        s = math.sqrt(det)
        a, b, c, d = a / s, b / s, c / s, d / s
    for x in (a, b, c, d):
        if abs(x) > DET_TOL:
            if x < 0:
                a, b, c, d = -a, -b, -c, -d
            break
    return a, b, c, d


@dataclass(frozen=True)
class Isometry:
    """Orientation-preserving isometry of H^2, stored as a canonical PSL(2,R) matrix."""

    a: float
    b: float
    c: float
    d: float

    def __post_init__(self):
        a, b, c, d = _canonical(float(self.a), float(self.b), float(self.c), float(self.d))
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "d", d)

    @classmethod
    def identity(cls):
        return cls(1.0, 0.0, 0.0, 1.0)

    @classmethod
    def from_matrix(cls, m):
        m = np.asarray(m, dtype=float)
        return cls(m[0, 0], m[0, 1], m[1, 0], m[1, 1])

    @property
    def matrix(self):
        return np.array([[self.a, self.b], [self.c, self.d]])

    @property
    def trace(self):
        return self.a + self.d

    @property
    def det(self):
        return self.a * self.d - self.b * self.c

    def inverse(self):
        return Isometry(self.d, -self.b, -self.c, self.a)

    def __matmul__(self, other):
        return compose(self, other)

    def __call__(self, p):
        return apply(self, p)

    def disk_matrix(self):
        """The same map conjugated into the Poincare disk (an SU(1,1) matrix)."""
        return _CAYLEY @ self.matrix @ _CAYLEY_INV

    def is_identity(self, tol=1e-9):
        return (abs(self.a - 1) <= tol and abs(self.d - 1) <= tol
                and abs(self.b) <= tol and abs(self.c) <= tol)

    def to_json(self):
        return [repr(self.a), repr(self.b), repr(self.c), repr(self.d)]

    @classmethod
    def from_json(cls, entries):
        return cls(*(float(x) for x in entries))


@dataclass(frozen=True)
class HPoint:
    x: float
    y: float

    def __post_init__(self):
        if not self.y > 0:
            raise ValueError(f"upper half-plane point needs y > 0, got {self.y!r}")

    @property
    def z(self):
        return complex(self.x, self.y)

    @classmethod
    def from_complex(cls, z):
        return cls(z.real, z.imag)


@dataclass(frozen=True)
class BoundaryPoint:
    theta: float

    def __post_init__(self):
        object.__setattr__(self, "theta", _wrap(float(self.theta)))

    @classmethod
    def from_real(cls, x):
        if math.isinf(x):
            return cls(0.0)
        w = complex(x, -1.0) / complex(x, 1.0)
        return cls(math.atan2(w.imag, w.real))

    def to_real(self):
        """Position on the real line of the half-plane model (inf for theta = 0)."""
        half = self.theta / 2.0
        s = math.sin(half)
        if s == 0.0:
            return math.inf
        return -math.cos(half) / s

    @property
    def w(self):
        return complex(math.cos(self.theta), math.sin(self.theta))


@dataclass(frozen=True)
class Frame2:
    base: HPoint
    direction: float

    def __post_init__(self):
        object.__setattr__(self, "direction", _wrap(float(self.direction)))


@dataclass(frozen=True)
class Arc:
    """Counterclockwise arc of the circle at infinity, from ``start`` spanning ``length``.

    Arcs that nearly fill the circle can carry their complement exactly as
    offsets ``gap`` = (lo, hi) around a ``pivot`` angle, since the float
    length then no longer resolves it.
    """

    start: float
    length: float
    pivot: float | None = None
    gap: tuple | None = None

    def __post_init__(self):
        object.__setattr__(self, "start", _wrap(float(self.start)))
        if self.gap is not None:
            lo, hi = self.gap
            if not hi > lo:
                raise BadArc(f"empty complement {self.gap!r}")
            object.__setattr__(self, "length", min(float(self.length), _BELOW_TWO_PI))
        if not 0.0 < self.length < TWO_PI:
            raise BadArc(f"arc length must lie in (0, 2pi), got {self.length!r}")

    @property
    def end(self):
        return _wrap(self.start + self.length)

    def contains(self, theta):
        return _wrap(theta - self.start) < self.length

    def contains_arc(self, other, tol=0.0):
        if self.gap is not None and other.gap is not None and self.pivot == other.pivot:
            # other inside self  <=>  complement of self inside complement of other
            return other.gap[0] <= self.gap[0] + tol and self.gap[1] <= other.gap[1] + tol
        offset = _wrap(other.start - self.start)
        return offset <= self.length + tol and offset + other.length <= self.length + tol

    @property
    def complement_length(self):
        if self.gap is not None:
            return self.gap[1] - self.gap[0]
        return TWO_PI - self.length


_BELOW_TWO_PI = math.nextafter(TWO_PI, 0.0)


class IsometryClass(enum.Enum):
    ELLIPTIC = "elliptic"
    PARABOLIC = "parabolic"
    HYPERBOLIC = "hyperbolic"


def compose(g, h):
    return Isometry(
        g.a * h.a + g.b * h.c,
        g.a * h.b + g.b * h.d,
        g.c * h.a + g.d * h.c,
        g.c * h.b + g.d * h.d,
    )


def diag(t):
    """Translation by hyperbolic distance t along the imaginary axis (towards infinity)."""
    e = math.exp(t / 2.0)
    return Isometry(e, 0.0, 0.0, 1.0 / e)


def rotation(theta):
    """Rotation by angle theta about i."""
    c, s = math.cos(theta / 2.0), math.sin(theta / 2.0)
    return Isometry(c, s, -s, c)


def classify(g, strict=False, tol=PARABOLIC_TOL):
    tr = abs(g.trace)
    if tr > 2.0 + tol:
        return IsometryClass.HYPERBOLIC
    if tr < 2.0 - tol:
        return IsometryClass.ELLIPTIC
    if g.is_identity():
        return IsometryClass.ELLIPTIC
    if strict:
        raise AmbiguousClass(f"|trace| = {tr!r} is within {tol} of 2")
    return IsometryClass.PARABOLIC


def _require_hyperbolic(g):
    if classify(g) is not IsometryClass.HYPERBOLIC:
        raise NotHyperbolic(f"|trace| = {abs(g.trace)!r} is not > 2")


def translation_length(g):
    _require_hyperbolic(g)
    return 2.0 * math.acosh(abs(g.trace) / 2.0)


def dist(z, w):
    # 2 asinh form keeps precision for nearby points
    chord = math.hypot(z.x - w.x, z.y - w.y)
    return 2.0 * math.asinh(chord / (2.0 * math.sqrt(z.y * w.y)))


def apply(g, p):
    if isinstance(p, HPoint):
        z = p.z
        return HPoint.from_complex((g.a * z + g.b) / (g.c * z + g.d))
    if isinstance(p, BoundaryPoint):
        return BoundaryPoint(apply_boundary(g, p.theta))
    if isinstance(p, Frame2):
        z = p.base.z
        den = g.c * z + g.d
        # derivative 1/den^2 rotates tangent vectors by -2 arg(den)
        turn = -2.0 * math.atan2(den.imag, den.real)
        return Frame2(HPoint.from_complex((g.a * z + g.b) / den), p.direction + turn)
    raise TypeError(f"cannot apply an isometry to {type(p).__name__}")


def apply_boundary(g, theta):
    G = g.disk_matrix()
    w = complex(math.cos(theta), math.sin(theta))
    v = (G[0, 0] * w + G[0, 1]) / (G[1, 0] * w + G[1, 1])
    return _wrap(math.atan2(v.imag, v.real))


def boundary_derivative(g, theta):
    """|d/dtheta| of the boundary action; equals 1/|G10 w + G11|^2 in the disk."""
    G = g.disk_matrix()
    w = complex(math.cos(theta), math.sin(theta))
    return 1.0 / abs(G[1, 0] * w + G[1, 1]) ** 2


def fixed_points(g):
    """Return (attracting, repelling) boundary fixed points of a hyperbolic isometry."""
    _require_hyperbolic(g)
    G = g.disk_matrix()
    roots = np.roots([G[1, 0], G[1, 1] - G[0, 0], -G[0, 1]])
    pts = [BoundaryPoint(math.atan2(r.imag, r.real)) for r in roots]
    d0 = boundary_derivative(g, pts[0].theta)
    if d0 < 1.0:
        return pts[0], pts[1]
    return pts[1], pts[0]


def image_arc(g, arc):
    s = apply_boundary(g, arc.start)
    e = apply_boundary(g, arc.start + arc.length)
    return Arc(s, _wrap(e - s))


def _pivot_offset(M, theta):
    """Signed angle of M(theta) from 0, computed without forming the angle itself."""
    half = theta / 2.0
    vx, vy = -math.cos(half), math.sin(half)
    p = M.a * vx + M.b * vy
    q = M.c * vx + M.d * vy
    return -2.0 * math.atan2(q, p) if p >= 0 else -2.0 * math.atan2(-q, -p)


def ns_iterate(h, U, k):
    """Images h(U), ..., h^k(U) of an arc around the repelling fixed point of h.

    Powers are taken through the diagonal form of h and the complements are
    measured around the attracting fixed point, so they stay accurate long
    after they drop below float resolution of the angle itself.
    """
    attracting, repelling = fixed_points(h)
    if not U.contains(repelling.theta) or U.contains(attracting.theta):
        raise BadArc("arc must contain the repelling and avoid the attracting fixed point")
    ell = translation_length(h)
    N = sending(repelling.to_real(), attracting.to_real())
    Ni = N.inverse()
    T = rotation(-attracting.theta)
    out = []
    for j in range(1, k + 1):
        M = compose(T, compose(N, compose(diag(j * ell), Ni)))
        hi = _pivot_offset(M, U.start)
        lo = _pivot_offset(M, U.start + U.length)
        if hi < lo:
            hi += TWO_PI
        start = _wrap(attracting.theta + hi)
        out.append(Arc(start, TWO_PI - (hi - lo), pivot=attracting.theta, gap=(lo, hi)))
    return out


def sending(r, a):
    """An isometry mapping 0 to r and infinity to a (half-plane boundary reals, inf allowed)."""
    if math.isinf(a):
        return Isometry(1.0, r, 0.0, 1.0)
    if math.isinf(r):
        return Isometry(a, -1.0, 1.0, 0.0)
    if a > r:
        return Isometry(a, r, 1.0, 1.0)
    return Isometry(-a, r, -1.0, 1.0)


def point_to_i(p):
    """The affine isometry z -> (z - x)/y taking p to i."""
    s = math.sqrt(p.y)
    return Isometry(1.0 / s, -p.x / s, 0.0, s)


# --- batched helpers over (N, 2, 2) arrays -------------------------------------------


def stack(isos):
    return np.array([g.matrix for g in isos], dtype=float).reshape(-1, 2, 2)


def batch_canonical(M):
    """Renormalise determinants and fix the sign convention on an (N, 2, 2) array."""
    M = np.asarray(M, dtype=float)
    ad = M[:, 0, 0] * M[:, 1, 1]
    bc = M[:, 0, 1] * M[:, 1, 0]
    det = ad - bc
    off = np.abs(det - 1.0) > _EPS4 * (np.abs(ad) + np.abs(bc))
    scale = np.sqrt(np.where(off, det, 1.0))
    M = M / scale[:, None, None]
    flat = M.reshape(-1, 4)
    big = np.abs(flat) > DET_TOL
    first = np.argmax(big, axis=1)
    lead = flat[np.arange(len(flat)), first]
    sign = np.where(lead < 0, -1.0, 1.0)
    return M * sign[:, None, None]


def batch_translation_length(M):
    tr = np.abs(M[:, 0, 0] + M[:, 1, 1])
    return 2.0 * np.arccosh(np.maximum(tr, 2.0) / 2.0)


def batch_displacement(M, base=None):
    """dist(base, g base) for each matrix g in M."""
    if base is not None:
        T = point_to_i(base).matrix
        M = T @ M @ np.linalg.inv(T)
    f2 = np.einsum("nij,nij->n", M, M)
    return 2.0 * np.arcsinh(np.sqrt(np.maximum(f2 - 2.0, 0.0)) / 2.0)


def to_isometries(M):
    return [Isometry(m[0, 0], m[0, 1], m[1, 0], m[1, 1]) for m in M]
