"""Hyperbolic pairs of pants, Fenchel-Nielsen gluing along trees, and
injectivity-radius estimates for random trees of pants.

A pair of pants with boundary lengths (l1, l2, l3) is realised by generators
A, B with |tr A| = 2cosh(l1/2), |tr B| = 2cosh(l2/2), |tr AB| = 2cosh(l3/2);
the three cuffs are A, B and C = (AB)^-1.  Cuffs are oriented so that the
pants lies on their left, and each cuff carries a seam point (the foot of the
common perpendicular to the next cuff), which is where the twist parameter is
measured from.
"""

from __future__ import annotations

import csv
import io
import json
import math
from collections import deque
from dataclasses import dataclass, field, replace
from fractions import Fraction

import mpmath as mp
import numpy as np

from . import cayley
from .errors import NumericFailure
from .hyp2 import (
    TWO_PI,
    Frame2,
    HPoint,
    Isometry,
    apply,
    batch_displacement,
    batch_translation_length,
    diag,
    fixed_points,
    point_to_i,
    sending,
)

# rotation by pi about i; reverses the imaginary axis
_FLIP = Isometry(0.0, -1.0, 1.0, 0.0)


@dataclass(frozen=True)
class PantsLengths:
    l1: float
    l2: float
    l3: float

    def __post_init__(self):
        for v in (self.l1, self.l2, self.l3):
            if not (v > 0 and math.isfinite(v)):
                raise ValueError(f"pants boundary lengths must be positive, got {self.as_tuple()}")

    def as_tuple(self):
        return (self.l1, self.l2, self.l3)


@dataclass(frozen=True)
class PantsGroup:
    A: Isometry
    B: Isometry
    lengths: PantsLengths
    C_: Isometry | None = field(default=None, repr=False, compare=False)

    @property
    def C(self):
        # the product (AB)^-1 cancels badly for long cuffs, so keep the precise one when known
        return self.C_ if self.C_ is not None else (self.A @ self.B).inverse()

    @property
    def cuffs(self):
        return (self.A, self.B, self.C)


def _dps(l):
    # entries reach exp(max l / 2) and traces cancel against their squares
    return 30 + int(max(l.as_tuple()))


def _mp_generators(l):
    lam = mp.exp(mp.mpf(l.l1) / 2)
    x2 = 2 * mp.cosh(mp.mpf(l.l2) / 2)
    x3 = 2 * mp.cosh(mp.mpf(l.l3) / 2)
    # A = diag(lam, 1/lam); solve tr B = x2, tr AB = -x3 for the diagonal of B
    a = -(x3 + x2 / lam) / (lam - 1 / lam)
    d = x2 - a
    s = mp.sqrt(1 - a * d)
    A = mp.matrix([[lam, 0], [0, 1 / lam]])
    B = mp.matrix([[a, s], [-s, d]])
    C = (A * B) ** -1
    return A, B, C


def _iso(M):
    return Isometry(float(M[0, 0]), float(M[0, 1]), float(M[1, 0]), float(M[1, 1]))


def pants_group(l):
    """Pants group realising boundary lengths ``l`` (a PantsLengths or 3-tuple)."""
    if not isinstance(l, PantsLengths):
        l = PantsLengths(*l)
    with mp.workdps(_dps(l)):
        A, B, C = _mp_generators(l)
        P = PantsGroup(_iso(A), _iso(B), l, _iso(C))
    for g, target in zip(P.cuffs, l.as_tuple()):
        got = 2.0 * math.acosh(abs(g.trace) / 2.0)
        if abs(got - target) > 1e-8 * max(1.0, target):
            raise NumericFailure(f"hexagon solve residual {abs(got - target):.3e}")
    return P


# --- geometry of a single pants ---------------------------------------------------


def _mobius_real(g, x):
    if math.isinf(x):
        return math.inf if g.c == 0 else g.a / g.c
    den = g.c * x + g.d
    if den == 0:
        return math.inf
    return (g.a * x + g.b) / den


def _axis(g):
    att, rep = fixed_points(g)
    return rep.to_real(), att.to_real(), rep.theta, att.theta


def _foot(X, Y):
    """Foot on the axis of X of the common perpendicular to the axis of Y."""
    rep, att, _, _ = _axis(X)
    T = sending(rep, att)
    Ti = T.inverse()
    yr, ya, _, _ = _axis(Y)
    p, q = _mobius_real(Ti, yr), _mobius_real(Ti, ya)
    if not p * q > 0:
        raise NumericFailure("cuff axes are not disjoint")
    return apply(T, HPoint(0.0, math.sqrt(p * q)))


def _left_arc_contains(att, rep, theta):
    # the left side of the axis rep -> att is the ccw arc from att to rep
    return (theta - att) % TWO_PI < (rep - att) % TWO_PI


def _to_klein(z):
    w = (z - 1j) / (z + 1j)
    return 2.0 * w / (1.0 + abs(w) ** 2)


def _from_klein(k):
    r2 = abs(k) ** 2
    w = k / (1.0 + math.sqrt(max(0.0, 1.0 - r2)))
    return 1j * (1.0 + w) / (1.0 - w)


def _mp_axis(M):
    """(repelling, attracting) fixed points of a hyperbolic matrix on the real line (mp.inf allowed)."""
    a, b, c, d = M[0, 0], M[0, 1], M[1, 0], M[1, 1]
    if c == 0:
        pts = [mp.inf, b / (d - a)]
    else:
        disc = mp.sqrt((a + d) ** 2 - 4)
        pts = [(a - d + disc) / (2 * c), (a - d - disc) / (2 * c)]

    def contracting(x):
        if x == mp.inf:
            return abs(d / a) < 1
        return abs(c * x + d) > 1

    return (pts[1], pts[0]) if contracting(pts[0]) else (pts[0], pts[1])


def _mp_angle(x):
    return mp.mpf(0) if x == mp.inf else mp.pi + 2 * mp.atan(x)


def _mp_left_arc_contains(att, rep, x):
    t, a, r = _mp_angle(x), _mp_angle(att), _mp_angle(rep)
    return (t - a) % (2 * mp.pi) < (r - a) % (2 * mp.pi)


def _mp_sending(r, a):
    if a == mp.inf:
        return mp.matrix([[1, r], [0, 1]])
    if r == mp.inf:
        return mp.matrix([[a, -1], [1, 0]])
    if a > r:
        return mp.matrix([[a, r], [1, 1]]) / mp.sqrt(a - r)
    return mp.matrix([[-a, r], [-1, 1]]) / mp.sqrt(r - a)


def _mp_moebius(M, x):
    if x == mp.inf:
        return mp.inf if M[1, 0] == 0 else M[0, 0] / M[1, 0]
    den = M[1, 0] * x + M[1, 1]
    return mp.inf if den == 0 else (M[0, 0] * x + M[0, 1]) / den


def _mp_foot(X_axis, Y_axis):
    """(T, foot, scale): T sends 0, inf to the X axis ends, foot = T(i sqrt(pq)), scale = (pq)^(1/4)."""
    T = _mp_sending(*X_axis)
    Ti = T ** -1
    p, q = (_mp_moebius(Ti, x) for x in Y_axis)
    if not p * q > 0:
        raise NumericFailure("cuff axes are not disjoint")
    y = mp.sqrt(p * q)
    z = mp.mpc(0, y)
    foot = (T[0, 0] * z + T[0, 1]) / (T[1, 0] * z + T[1, 1])
    return T, foot, mp.sqrt(y)


@dataclass(frozen=True)
class PantsChart:
    """Cuffs, seams and the right-angled hexagon of one pants, in its own coordinates."""

    group: PantsGroup
    cuffs: tuple            # oriented cuff elements, pants on the left
    lengths: tuple
    normalizers: tuple      # N_c: i -> seam_c, imaginary axis (upwards) -> cuff axis
    seams: tuple
    hexagon: tuple          # six vertices in the half-plane, cyclically ordered

    @classmethod
    def of(cls, P):
        """Chart of ``P``, computed at raised precision and rounded at the end."""
        l = P.lengths
        with mp.workdps(_dps(l)):
            raw = _mp_generators(l)
            axes = [_mp_axis(g) for g in raw]
            oriented = []
            for c, g in enumerate(raw):
                rep, att = axes[c]
                if _mp_left_arc_contains(att, rep, axes[(c + 1) % 3][0]):
                    oriented.append((g, axes[c]))
                else:
                    oriented.append((g ** -1, (att, rep)))
            seams, norms = [], []
            for c in range(3):
                T, foot, scale = _mp_foot(oriented[c][1], oriented[(c + 1) % 3][1])
                norms.append(_iso(T * mp.matrix([[scale, 0], [0, 1 / scale]])))
                seams.append(HPoint(float(foot.real), float(foot.imag)))
            verts = []
            for c in range(3):
                X, Y, Z = (oriented[(c + k) % 3][1] for k in range(3))
                verts.append(_mp_foot(X, Z)[1])
                verts.append(_mp_foot(X, Y)[1])
            verts = [HPoint(float(v.real), float(v.imag)) for v in verts]
            cuffs = tuple(_iso(g) for g, _ in oriented)
        ks = [_to_klein(v.z) for v in verts]
        cen = sum(ks) / len(ks)
        order = sorted(range(6), key=lambda i: math.atan2((ks[i] - cen).imag, (ks[i] - cen).real))
        hexagon = tuple(verts[i] for i in order)
        return cls(P, cuffs, l.as_tuple(), tuple(norms), tuple(seams), hexagon)

    def klein_polygon(self):
        return [_to_klein(v.z) for v in self.hexagon]

    def in_hexagon(self, z):
        k = _to_klein(z)
        poly = self.klein_polygon()
        sign = 0
        for i in range(6):
            a, b = poly[i], poly[(i + 1) % 6]
            cross = (b - a).real * (k - a).imag - (b - a).imag * (k - a).real
            s = 1 if cross > 0 else -1
            if sign == 0:
                sign = s
            elif s != sign:
                return False
        return True

    def hexagon_center(self):
        poly = self.klein_polygon()
        return HPoint.from_complex(_from_klein(sum(poly) / 6.0))

    def bounding_box(self):
        """Half-plane box (x0, x1, y0, y1) containing the hexagon, sides included."""
        xs = [v.x for v in self.hexagon]
        ys = [v.y for v in self.hexagon]
        y1 = max(ys)
        for i in range(6):
            p, q = self.hexagon[i], self.hexagon[(i + 1) % 6]
            if abs(p.x - q.x) < 1e-15:
                continue
            # circle through p, q centred on the real axis
            cx = ((q.x ** 2 + q.y ** 2) - (p.x ** 2 + p.y ** 2)) / (2.0 * (q.x - p.x))
            rad = math.hypot(p.x - cx, p.y)
            if min(p.x, q.x) <= cx <= max(p.x, q.x):
                y1 = max(y1, rad)
        return min(xs), max(xs), min(ys), y1

    def reflect_across_seam(self, z):
        """Mirror image of z across the common perpendicular of cuffs 0 and 1."""
        a, b = self.hexagon_seam_endpoints()
        T = sending(a, b)
        w = apply(T.inverse(), HPoint.from_complex(z))
        return apply(T, HPoint(-w.x, w.y)).z

    def hexagon_seam_endpoints(self):
        p = _foot(self.cuffs[0], self.cuffs[1])
        q = _foot(self.cuffs[1], self.cuffs[0])
        # geodesic through p and q: circle centred on the real axis (or vertical line)
        if abs(p.x - q.x) < 1e-14:
            return p.x, math.inf
        cx = ((q.x ** 2 + q.y ** 2) - (p.x ** 2 + p.y ** 2)) / (2.0 * (q.x - p.x))
        rad = math.hypot(p.x - cx, p.y)
        return cx - rad, cx + rad


# --- trees of pants -----------------------------------------------------------------


@dataclass(frozen=True)
class Edge:
    """Cuff ``cu`` of pants ``u`` glued to cuff ``cv`` of pants ``v``; v is None for a free cuff."""

    u: int
    cu: int
    v: int | None = None
    cv: int | None = None

    @property
    def free(self):
        return self.v is None


@dataclass(frozen=True)
class TreeSpec:
    """A finite tree of pants: every pants has three cuff slots, each on exactly one edge."""

    n_vertices: int
    edges: tuple
    center: int = 0
    radius: int | None = None

    def __post_init__(self):
        seen = {}
        for k, e in enumerate(self.edges):
            ends = [(e.u, e.cu)] + ([] if e.free else [(e.v, e.cv)])
            for slot in ends:
                if slot in seen:
                    raise ValueError(f"cuff slot {slot} used twice")
                seen[slot] = k
        for v in range(self.n_vertices):
            for c in range(3):
                if (v, c) not in seen:
                    raise ValueError(f"cuff slot {(v, c)} is not on any edge")
        internal = [e for e in self.edges if not e.free]
        if len(internal) != self.n_vertices - 1:
            raise ValueError("internal edges do not form a tree")
        if len(self.bfs_order()) != self.n_vertices:
            raise ValueError("tree is disconnected")

    @classmethod
    def regular(cls, R):
        """3-valent tree truncated at distance R from the center; outer cuffs are free."""
        if R < 0:
            raise ValueError("radius must be >= 0")
        edges = []
        depth = [0]
        queue = deque([0])
        while queue:
            v = queue.popleft()
            slots = (0, 1, 2) if v == 0 else (1, 2)
            for c in slots:
                if depth[v] < R:
                    w = len(depth)
                    depth.append(depth[v] + 1)
                    edges.append(Edge(v, c, w, 0))
                    queue.append(w)
                else:
                    edges.append(Edge(v, c))
        return cls(len(depth), tuple(edges), 0, R)

    @classmethod
    def path(cls, n, center=None):
        """n pants in a row: cuff 1 of pants i meets cuff 0 of pants i+1, cuff 2 is free."""
        edges = [Edge(0, 0)]
        for i in range(n):
            edges.append(Edge(i, 1, i + 1, 0) if i + 1 < n else Edge(i, 1))
            edges.append(Edge(i, 2))
        return cls(n, tuple(edges), n // 2 if center is None else center, None)

    def slot_edges(self):
        out = {}
        for k, e in enumerate(self.edges):
            out[(e.u, e.cu)] = k
            if not e.free:
                out[(e.v, e.cv)] = k
        return out

    def bfs_order(self):
        """(vertex, parent, edge index) triples from the center outwards."""
        adj = {v: [] for v in range(self.n_vertices)}
        for k, e in enumerate(self.edges):
            if not e.free:
                adj[e.u].append((e.v, k))
                adj[e.v].append((e.u, k))
        order = [(self.center, None, None)]
        seen = {self.center}
        queue = deque([self.center])
        while queue:
            v = queue.popleft()
            for w, k in adj[v]:
                if w not in seen:
                    seen.add(w)
                    order.append((w, v, k))
                    queue.append(w)
        return order

    def depth(self):
        d = {}
        for v, parent, _ in self.bfs_order():
            d[v] = 0 if parent is None else d[parent] + 1
        return d

    @property
    def rank(self):
        # sphere with V + 2 holes: Euler characteristic -V
        return self.n_vertices + 1

    def to_json(self):
        return {
            "n_vertices": self.n_vertices,
            "center": self.center,
            "radius": self.radius,
            "edges": [[e.u, e.cu, e.v, e.cv] for e in self.edges],
        }

    @classmethod
    def from_json(cls, obj):
        edges = tuple(Edge(*e) for e in obj["edges"])
        return cls(obj["n_vertices"], edges, obj.get("center", 0), obj.get("radius"))


@dataclass(frozen=True)
class FNAssignment:
    """Per-edge Fenchel-Nielsen (length, twist); twist is a fraction of the length in [0, 1)."""

    lengths: tuple
    twists: tuple

    def __post_init__(self):
        if len(self.lengths) != len(self.twists):
            raise ValueError("lengths and twists differ in size")
        for l in self.lengths:
            if not l > 0:
                raise ValueError(f"edge length must be positive, got {l!r}")
        for t in self.twists:
            if not 0.0 <= t < 1.0:
                raise ValueError(f"twist must lie in [0, 1), got {t!r}")

    def __len__(self):
        return len(self.lengths)

    def __getitem__(self, k):
        return self.lengths[k], self.twists[k]

    @classmethod
    def constant(cls, n, length, twist=0.0):
        return cls((float(length),) * n, (float(twist),) * n)


# --- length laws ----------------------------------------------------------------------


@dataclass(frozen=True)
class PointMass:
    l: float

    def __post_init__(self):
        if not self.l > 0:
            raise ValueError("point mass must sit in (0, inf)")

    def sample(self, rng, n):
        return np.full(n, float(self.l))


@dataclass(frozen=True)
class Uniform:
    a: float
    b: float

    def __post_init__(self):
        if not 0 < self.a < self.b:
            raise ValueError("need 0 < a < b")

    def sample(self, rng, n):
        return rng.uniform(self.a, self.b, n)


@dataclass(frozen=True)
class LogNormal:
    m: float
    s: float

    def __post_init__(self):
        if not self.s > 0:
            raise ValueError("need s > 0")

    def sample(self, rng, n):
        return rng.lognormal(self.m, self.s, n)


@dataclass(frozen=True)
class TruncatedExp:
    rate: float
    cap: float

    def __post_init__(self):
        if not (self.rate > 0 and self.cap > 0):
            raise ValueError("need rate > 0 and cap > 0")

    def sample(self, rng, n):
        # inverse CDF of Exp(rate) conditioned on (0, cap]
        u = rng.random(n)
        mass = -math.expm1(-self.rate * self.cap)
        x = -np.log1p(-u * mass) / self.rate
        return np.maximum(x, np.finfo(float).tiny)


def parse_law(text):
    """Parse 'point:5', 'uniform:4,5', 'lognormal:0,1' or 'texp:1,10'."""
    kind, _, args = text.partition(":")
    vals = [float(x) for x in args.split(",") if x.strip()]
    kind = kind.strip().lower()
    table = {"point": PointMass, "pointmass": PointMass, "uniform": Uniform,
             "lognormal": LogNormal, "texp": TruncatedExp, "truncatedexp": TruncatedExp}
    if kind not in table:
        raise ValueError(f"unknown length law {kind!r}")
    return table[kind](*vals)


def law_to_json(law):
    return {"kind": type(law).__name__, **law.__dict__}


def sample_fn(tree, law, seed):
    """I.i.d. per-edge lengths from ``law`` and uniform twists, deterministic per seed.

    Lengths and twists come from independent child streams drawn in edge order,
    so a tree whose edge list extends another's reuses its draws.
    """
    n = len(tree.edges)
    s_len, s_tw = np.random.SeedSequence(seed).spawn(2)
    lengths = law.sample(np.random.default_rng(s_len), n)
    twists = np.random.default_rng(s_tw).random(n)
    return FNAssignment(tuple(float(x) for x in lengths), tuple(float(x) for x in twists))


# --- gluing -------------------------------------------------------------------------


def gluing_map(frame_v, frame_w, length, twist):
    """Isometry placing a pants so that its cuff frame ``frame_w`` meets ``frame_v`` backwards.

    Both frames are cuff normalisers (i -> seam, upward imaginary axis -> oriented
    cuff).  The result M satisfies M X_w M^-1 = X_v^-1 and puts the new pants on
    the far side of the cuff, displaced by ``twist * length`` along it.
    """
    return frame_v @ diag((twist % 1.0) * length) @ _FLIP @ frame_w.inverse()


def _psl_close(g, h, tol):
    m, n = g.matrix, h.matrix
    # a conjugate M X M^-1 carries roundoff of order eps |M|^2, so allow for the entry scale
    scale = max(1.0, np.abs(m).max(), np.abs(n).max())
    return min(np.max(np.abs(m - n)), np.max(np.abs(m + n))) <= max(tol, 1e-12 * scale * scale)


# Far pants have placement matrices with large entries, and products of far
# generators cancel heavily.  Placements are therefore composed exactly from
# the (well conditioned) float charts and only rounded at the very end.


def _exact(g):
    return tuple(Fraction(x) for x in (g.a, g.b, g.c, g.d))


def _xmul(m, n):
    a, b, c, d = m
    e, f, g, h = n
    return (a * e + b * g, a * f + b * h, c * e + d * g, c * f + d * h)


def _xadj(m):
    a, b, c, d = m
    return (d, -b, -c, a)


def _xconj(P, X):
    return _xmul(_xmul(P, X), _xadj(P))


def _round(m):
    a, b, c, d = m
    det = a * d - b * c
    s = math.sqrt(float(det))
    return Isometry(float(a) / s, float(b) / s, float(c) / s, float(d) / s)


@dataclass(frozen=True)
class SurfaceGroupApprox:
    generators: tuple
    base_frame: Frame2
    tree: TreeSpec
    fn: FNAssignment
    placements: tuple = field(repr=False)
    charts: tuple = field(repr=False)
    exact_placements: tuple = field(default=None, repr=False, compare=False)
    exact_generators: tuple = field(default=None, repr=False, compare=False)

    def cuff(self, v, c):
        """Oriented cuff element of pants v, cuff c, in global coordinates."""
        X = _exact(self.charts[v].cuffs[c])
        if self.exact_placements is None:
            P = self.placements[v]
            return P @ self.charts[v].cuffs[c] @ P.inverse()
        return _round(_xconj(self.exact_placements[v], X))

    def cuff_frame(self, v, c):
        return self.placements[v] @ self.charts[v].normalizers[c]

    def with_frame(self, frame):
        return replace(self, base_frame=frame)

    @property
    def rank(self):
        return len(self.generators)

    def to_json(self):
        return {
            "tree": self.tree.to_json(),
            "fn": [[l, t] for l, t in zip(self.fn.lengths, self.fn.twists)],
            "generators": [g.to_json() for g in self.generators],
            "base_frame": {"x": self.base_frame.base.x, "y": self.base_frame.base.y,
                           "direction": self.base_frame.direction},
        }


def build_group(tree, fn, frame=None):
    """Glue the pants of ``tree`` with Fenchel-Nielsen data ``fn`` and return a free basis.

    The center pants contributes its two standard generators; every other pants
    contributes the cuff following its gluing cuff, conjugated into place.
    """
    if len(fn) != len(tree.edges):
        raise ValueError(f"assignment covers {len(fn)} edges, tree has {len(tree.edges)}")
    slots = tree.slot_edges()
    charts = {}
    for v in range(tree.n_vertices):
        ls = tuple(fn.lengths[slots[(v, c)]] for c in range(3))
        charts[v] = PantsChart.of(pants_group(ls))
    placements = {}
    xgens = []
    for v, parent, k in tree.bfs_order():
        chart = charts[v]
        if parent is None:
            placements[v] = _exact(Isometry.identity())
            xgens.extend([_exact(chart.group.A), _exact(chart.group.B)])
            continue
        e = tree.edges[k]
        cv, cw = (e.cu, e.cv) if e.u == parent else (e.cv, e.cu)
        length, twist = fn[k]
        # local gluing map in the parent's chart, then placed exactly
        local = gluing_map(charts[parent].normalizers[cv], chart.normalizers[cw], length, twist)
        back = local @ chart.cuffs[cw] @ local.inverse()
        if not _psl_close(back, charts[parent].cuffs[cv].inverse(), 1e-8):
            raise NumericFailure(f"axis matching failed on edge {k}")
        M = _xmul(placements[parent], _exact(local))
        placements[v] = M
        xgens.append(_xconj(M, _exact(chart.cuffs[(cw + 1) % 3])))
    gens = [_round(m) for m in xgens]
    if len(gens) != tree.rank:
        raise NumericFailure("generator count disagrees with the Euler characteristic")
    if frame is None:
        frame = Frame2(charts[tree.center].hexagon_center(), 0.0)
    return SurfaceGroupApprox(
        tuple(gens), frame, tree, fn,
        tuple(_round(placements[v]) for v in range(tree.n_vertices)),
        tuple(charts[v] for v in range(tree.n_vertices)),
        tuple(placements[v] for v in range(tree.n_vertices)),
        tuple(xgens),
    )


def hnn_letter(g, slot_v, slot_w, length=None, twist=0.0):
    """Stable letter gluing free cuff ``slot_w`` onto free cuff ``slot_v`` of the same surface.

    Returns t with t X_w t^-1 = X_v^-1, so adjoining t closes the two
    boundary curves into one.  Slots are (pants, cuff) pairs.
    """
    (v, cv), (w, cw) = slot_v, slot_w
    lv, lw = g.charts[v].lengths[cv], g.charts[w].lengths[cw]
    if abs(lv - lw) > 1e-9 * max(1.0, lv):
        raise ValueError(f"cuffs have different lengths {lv} and {lw}")
    length = lv if length is None else length
    local = gluing_map(Isometry.identity(), Isometry.identity(), length, twist)
    Pv = _xmul(g.exact_placements[v], _exact(g.charts[v].normalizers[cv]))
    Pw = _xmul(g.exact_placements[w], _exact(g.charts[w].normalizers[cw]))
    return _xmul(_xmul(Pv, _exact(local)), _xadj(Pw))


def close_up(g, pairs):
    """Adjoin stable letters for each ((v, cv), (w, cw[, twist])) pair; returns a new surface."""
    xgens = list(g.exact_generators)
    for pair in pairs:
        slot_v, slot_w = pair[0], pair[1]
        twist = pair[2] if len(pair) > 2 else 0.0
        xgens.append(hnn_letter(g, slot_v, slot_w, twist=twist))
    return replace(g, generators=tuple(_round(m) for m in xgens), exact_generators=tuple(xgens))


def genus_two(lengths=(2.0, 2.0, 2.0), twists=(0.0, 0.0, 0.0)):
    """Closed genus-2 surface from two pants glued along all three cuffs.

    Generated by the first cuff of one pants, the second cuff of the other and
    the two stable letters; the remaining pants generator is a consequence.
    """
    tree = TreeSpec(2, (Edge(0, 0, 1, 0), Edge(0, 1), Edge(0, 2), Edge(1, 1), Edge(1, 2)), 0, None)
    l1, l2, l3 = lengths
    fn = FNAssignment((l1, l2, l3, l2, l3), (twists[0] % 1.0, 0.0, 0.0, 0.0, 0.0))
    g = build_group(tree, fn)
    closed = close_up(g, [((0, 1), (1, 1), twists[1]), ((0, 2), (1, 2), twists[2])])
    A0, _, g2, t1, t2 = closed.exact_generators
    xgens = (A0, g2, t1, t2)
    return replace(closed, generators=tuple(_round(m) for m in xgens), exact_generators=xgens)


# --- base frames --------------------------------------------------------------------


def _hexagon_draw(chart, rng):
    x0, x1, y0, y1 = chart.bounding_box()
    while True:
        x = rng.uniform(x0, x1)
        # uniform in 1/y gives the hyperbolic area element dx dy / y^2
        y = 1.0 / rng.uniform(1.0 / y1, 1.0 / y0)
        z = complex(x, y)
        if chart.in_hexagon(z):
            return z


def sample_base_frame(p, seed):
    """Frame uniform for hyperbolic area on the pants (two mirror hexagons) and in direction."""
    chart = p if isinstance(p, PantsChart) else PantsChart.of(p)
    rng = np.random.default_rng(seed)
    z = _hexagon_draw(chart, rng)
    if rng.random() < 0.5:
        z = chart.reflect_across_seam(z)
    return Frame2(HPoint.from_complex(z), rng.uniform(0.0, TWO_PI))


def pants_area_estimate(p, n, seed):
    """Monte Carlo area of the pants: twice the hexagon's share of its bounding box."""
    chart = p if isinstance(p, PantsChart) else PantsChart.of(p)
    x0, x1, y0, y1 = chart.bounding_box()
    rng = np.random.default_rng(seed)
    xs = rng.uniform(x0, x1, n)
    ys = 1.0 / rng.uniform(1.0 / y1, 1.0 / y0, n)
    hits = sum(chart.in_hexagon(complex(x, y)) for x, y in zip(xs, ys))
    box_area = (x1 - x0) * (1.0 / y0 - 1.0 / y1)
    return 2.0 * box_area * hits / n


def sample_surface(tree, law, seed):
    """Sample Fenchel-Nielsen data and a base frame on the center pants, then glue."""
    s_fn, s_frame = np.random.SeedSequence(seed).spawn(2)
    fn = sample_fn(tree, law, int(s_fn.generate_state(1)[0]))
    g = build_group(tree, fn)
    frame = sample_base_frame(g.charts[tree.center], int(s_frame.generate_state(1)[0]))
    return g.with_frame(frame)


# --- injectivity bounds ---------------------------------------------------------------


def star_bound(l, R):
    """min{(l-1)/2, R sinh(1/sinh l)}, floored at 0."""
    return max(0.0, min((l - 1.0) / 2.0, R * math.sinh(1.0 / math.sinh(l))))


def star_bound_collar(l, R):
    """Same as star_bound with the collar radius arcsinh(1/sinh l) in place of sinh(1/sinh l)."""
    return max(0.0, min((l - 1.0) / 2.0, R * math.asinh(1.0 / math.sinh(l))))


@dataclass(frozen=True)
class SegmentBounds:
    sinh_bound: float
    half_bound: float
    collar_bound: float

    def __iter__(self):
        return iter((self.sinh_bound, self.half_bound))


def pants_segment_bounds(l):
    if not l > 0:
        raise ValueError("length must be positive")
    x = 1.0 / math.sinh(l)
    return SegmentBounds(math.sinh(x), max(0.0, (l - 1.0) / 2.0), math.asinh(x))


# --- word searches ------------------------------------------------------------------


@dataclass(frozen=True)
class SearchResult:
    value: float
    word: tuple
    n_words: int
    n_classes: int


# float scores are only trusted to pick a shortlist; the shortlist is then
# re-evaluated exactly from the exact generators
REFINE_SLACK = 1e-3
REFINE_MAX = 256


def _exact_generators(g):
    if isinstance(g, SurfaceGroupApprox) and g.exact_generators is not None:
        return g.exact_generators
    gens = g.generators if isinstance(g, SurfaceGroupApprox) else g
    return tuple(_exact(h) for h in gens)


def _base_of(g):
    return g.base_frame.base if isinstance(g, SurfaceGroupApprox) else HPoint(0.0, 1.0)


def _centered(xgens, base):
    # conjugate so the base point sits at i; keeps word products well scaled
    T = _exact(point_to_i(base))
    out = tuple(_xconj(T, m) for m in xgens)
    return out, [_round(m) for m in out]


def _word_exact(xgens, word):
    m = (Fraction(1), Fraction(0), Fraction(0), Fraction(1))
    for x in word:
        j, inv = divmod(int(x), 2)
        m = _xmul(m, _xadj(xgens[j]) if inv else xgens[j])
    return m


def _exact_translation_length(m):
    a, b, c, d = m
    t2 = float((a + d) ** 2 / (a * d - b * c))
    return 2.0 * math.acosh(math.sqrt(max(t2, 4.0)) / 2.0)


def _exact_displacement(m):
    a, b, c, d = m
    f2 = float((a * a + b * b + c * c + d * d) / (a * d - b * c))
    return 2.0 * math.asinh(math.sqrt(max(f2 - 2.0, 0.0)) / 2.0)


def _displacement_keep(cap):
    if cap is None:
        return None

    def keep(level):
        return batch_displacement(level.mats) <= cap

    return keep


class _Shortlist:
    def __init__(self):
        self.best = math.inf
        self.items = []

    def offer(self, scores, words):
        i = int(np.argmin(scores))
        self.best = min(self.best, float(scores[i]))
        near = np.nonzero(scores <= self.best + REFINE_SLACK)[0]
        if len(near) > REFINE_MAX:
            near = near[np.argsort(scores[near], kind="stable")[:REFINE_MAX]]
        self.items.extend((float(scores[k]), tuple(int(x) for x in words[k])) for k in near)

    def resolve(self, exact_value):
        items = sorted(x for x in self.items if x[0] <= self.best + REFINE_SLACK)[:REFINE_MAX]
        best, word = math.inf, ()
        for _, w in items:
            v = exact_value(w)
            if v < best:
                best, word = v, w
        return best, word


def systole_search(g, W, budget=cayley.DEFAULT_WORD_BUDGET, max_displacement=None):
    """Shortest translation length over reduced words of length <= W.

    Only cyclically reduced words are scored; every conjugacy class met has
    such a representative no longer than the word itself.  With
    ``max_displacement`` set, words whose prefix moves the base point further
    than the cap are not extended, which turns the exhaustive search into a
    bounded one.
    """
    if W < 1:
        raise ValueError("W must be >= 1")
    xgens, centered = _centered(_exact_generators(g), _base_of(g))
    shortlist = _Shortlist()
    n_words = 0
    traces = set()
    for level in cayley.levels(centered, W, budget, _displacement_keep(max_displacement)):
        n_words += len(level.words)
        tr = np.abs(level.mats[:, 0, 0] + level.mats[:, 1, 1])
        ok = (tr > 2.0 + 1e-9) & (level.words[:, 0] != (level.words[:, -1] ^ 1))
        if not ok.any():
            continue
        traces.update(np.round(tr[ok], 9).tolist())
        tl = batch_translation_length(level.mats)
        tl[~ok] = np.inf
        shortlist.offer(tl, level.words)
    value, word = shortlist.resolve(lambda w: _exact_translation_length(_word_exact(xgens, w)))
    return SearchResult(value, word, n_words, len(traces))


def systole_oracle(g, W, budget=cayley.DEFAULT_WORD_BUDGET, max_displacement=None):
    return systole_search(g, W, budget, max_displacement).value


def inj_radius_search(g, frame, W, budget=cayley.DEFAULT_WORD_BUDGET, max_displacement=None):
    if W < 1:
        raise ValueError("W must be >= 1")
    base = frame.base if isinstance(frame, Frame2) else frame
    xgens, centered = _centered(_exact_generators(g), base)
    shortlist = _Shortlist()
    n_words = 0
    for level in cayley.levels(centered, W, budget, _displacement_keep(max_displacement)):
        n_words += len(level.words)
        shortlist.offer(batch_displacement(level.mats), level.words)
    value, word = shortlist.resolve(lambda w: _exact_displacement(_word_exact(xgens, w)))
    return SearchResult(value / 2.0, word, n_words, 0)


def inj_radius_at(g, frame, W, budget=cayley.DEFAULT_WORD_BUDGET, max_displacement=None):
    """Half the shortest displacement of the base point over words of length <= W."""
    return inj_radius_search(g, frame, W, budget, max_displacement).value


def is_free_up_to(P, W=8, tol=1e-6):
    """No nontrivial reduced word of length <= W lands within ``tol`` of the identity."""
    gens = P.cuffs[:2] if isinstance(P, PantsGroup) else P
    for level in cayley.levels(gens, W, budget=10 ** 8):
        M = level.mats
        for sgn in (1.0, -1.0):
            near = (np.abs(sgn * M[:, 0, 0] - 1) <= tol) & (np.abs(sgn * M[:, 1, 1] - 1) <= tol) \
                & (np.abs(M[:, 0, 1]) <= tol) & (np.abs(M[:, 1, 0]) <= tol)
            if near.any():
                return False
    return True


# --- export -------------------------------------------------------------------------


def surface_to_json(g, **kw):
    return json.dumps(g.to_json(), **kw)


SYSTOLE_CSV_FIELDS = ("seed", "l", "R", "W", "star_bound", "oracle_systole")


def systole_rows_to_csv(rows):
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=SYSTOLE_CSV_FIELDS, extrasaction="ignore")
    w.writeheader()
    for row in rows:
        w.writerow(row)
    return buf.getvalue()
