import json
import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import hyperbolics, isometries, points, random_isometry
from irslab.errors import AmbiguousClass, BadArc, NotHyperbolic
from irslab.hyp2 import (
    Arc, BoundaryPoint, Frame2, HPoint, Isometry, IsometryClass, apply, apply_boundary,
    boundary_derivative, classify, compose, diag, dist, fixed_points, ns_iterate, rotation,
    sending, translation_length,
)


def close(g, h, tol=1e-9):
    return max(abs(x - y) for x, y in zip(g.matrix.ravel(), h.matrix.ravel())) <= tol


def test_compose_identity_and_inverse():
    g = Isometry(2.0, 1.0, 3.0, 2.0)
    assert close(compose(Isometry.identity(), g), g)
    assert compose(g, g.inverse()).is_identity()
    e = math.e
    sq = compose(Isometry(e, 0, 0, 1 / e), Isometry(e, 0, 0, 1 / e))
    assert close(sq, Isometry(e * e, 0, 0, e ** -2))


def test_canonical_sign_and_det():
    g = Isometry(-2.0, -1.0, -3.0, -2.0)
    assert g.a > 0
    h = Isometry(0.0, -1.0, 1.0, 0.0)
    assert h.b == 1.0 and h.c == -1.0
    s = Isometry(4.0, 0.0, 0.0, 1.0)  # det 4, rescaled
    assert s.det == pytest.approx(1.0, abs=1e-15)


def test_det_stays_normalized_over_long_products():
    rng = np.random.default_rng(3)
    g = Isometry.identity()
    for _ in range(10_000):
        g = compose(g, random_isometry(rng, 0.05))
        assert abs(g.det - 1.0) <= 1e-12 * max(1.0, abs(g.a * g.d))
    assert abs(g.det - 1.0) <= 1e-12


def test_classify_examples():
    assert classify(Isometry(2.0, 0.0, 0.0, 0.5)) is IsometryClass.HYPERBOLIC
    assert classify(rotation(math.pi / 3)) is IsometryClass.ELLIPTIC
    assert classify(Isometry(1.0, 1.0, 0.0, 1.0)) is IsometryClass.PARABOLIC
    with pytest.raises(AmbiguousClass):
        classify(Isometry(1.0, 1.0, 0.0, 1.0), strict=True)


def test_translation_length_examples():
    assert translation_length(diag(0.7)) == pytest.approx(0.7, abs=1e-12)
    assert translation_length(Isometry(math.e, 0, 0, 1 / math.e)) == pytest.approx(2.0, abs=1e-12)
    with pytest.raises(NotHyperbolic):
        translation_length(rotation(1.0))


@settings(max_examples=200, deadline=None)
@given(isometries(), st.floats(0.05, 5.0))
def test_translation_length_is_conjugation_invariant(h, t):
    g = compose(h, compose(diag(t), h.inverse()))
    assert translation_length(g) == pytest.approx(t, abs=1e-9)


def test_translation_length_matches_min_displacement_oracle():
    rng = np.random.default_rng(11)
    for _ in range(20):
        t = rng.uniform(0.2, 3.0)
        h = random_isometry(rng, 1.0)
        g = compose(h, compose(diag(t), h.inverse()))
        # walk along the axis of g: points h(e^s i)
        disp = min(dist(p, apply(g, p)) for p in (apply(h, HPoint(0.0, math.exp(s))) for s in np.linspace(-2, 2, 9)))
        off = dist(apply(h, HPoint(0.5, 1.0)), apply(g, apply(h, HPoint(0.5, 1.0))))
        assert disp == pytest.approx(t, abs=1e-9)
        assert off >= t - 1e-12


def test_dist_examples_and_mp_oracle():
    assert dist(HPoint(0, 1), HPoint(0, 1)) == 0.0
    assert dist(HPoint(0, 1), HPoint(0, math.e)) == pytest.approx(1.0, abs=1e-15)
    rng = np.random.default_rng(5)
    for _ in range(100):
        z = HPoint(rng.normal(), rng.uniform(0.1, 3))
        w = HPoint(rng.normal(), rng.uniform(0.1, 3))
        mp.mp.dps = 40
        ref = mp.acosh(1 + ((mp.mpf(z.x) - w.x) ** 2 + (mp.mpf(z.y) - w.y) ** 2) / (2 * mp.mpf(z.y) * w.y))
        assert dist(z, w) == pytest.approx(float(ref), rel=1e-13, abs=1e-15)


def test_triangle_inequality_random_triples():
    rng = np.random.default_rng(7)
    for _ in range(1000):
        a, b, c = (HPoint(rng.normal(), rng.uniform(0.05, 4)) for _ in range(3))
        assert dist(a, c) <= dist(a, b) + dist(b, c) + 1e-12


@settings(max_examples=200, deadline=None)
@given(isometries(), points(), points())
def test_isometries_preserve_distance(g, z, w):
    assert dist(apply(g, z), apply(g, w)) == pytest.approx(dist(z, w), abs=1e-9)


def test_frame_action_rotates_direction():
    f = Frame2(HPoint(0, 1), 0.0)
    assert apply(rotation(0.8), f).direction == pytest.approx(0.8, abs=1e-12)
    assert apply(diag(1.0), f).direction == pytest.approx(0.0, abs=1e-12)


def test_boundary_conversions_roundtrip():
    for x in [-5.0, -1.0, 0.0, 0.3, 7.0]:
        assert BoundaryPoint.from_real(x).to_real() == pytest.approx(x, abs=1e-12)
    assert BoundaryPoint.from_real(math.inf).theta == 0.0
    assert math.isinf(BoundaryPoint(0.0).to_real())


def test_fixed_points_of_diagonal():
    att, rep = fixed_points(Isometry(math.e, 0, 0, 1 / math.e))
    assert math.isinf(att.to_real())
    assert rep.to_real() == pytest.approx(0.0, abs=1e-12)


@settings(max_examples=100, deadline=None)
@given(hyperbolics())
def test_fixed_points_are_fixed_with_correct_derivatives(pair):
    g, _ = pair
    att, rep = fixed_points(g)
    for p in (att, rep):
        moved = apply_boundary(g, p.theta)
        assert abs(math.remainder(moved - p.theta, 2 * math.pi)) <= 1e-8
    # numeric differentiation of the boundary action
    h = 1e-6
    for p, bigger in ((att, False), (rep, True)):
        d = abs(math.remainder(apply_boundary(g, p.theta + h) - apply_boundary(g, p.theta - h), 2 * math.pi)) / (2 * h)
        assert d == pytest.approx(boundary_derivative(g, p.theta), rel=1e-4)
        assert (d > 1) is bigger


def test_sending_maps_zero_and_infinity():
    for r, a in [(0.5, 2.0), (3.0, -1.0), (math.inf, 1.0), (2.0, math.inf)]:
        g = sending(r, a)
        assert BoundaryPoint(apply_boundary(g, BoundaryPoint.from_real(0.0).theta)).to_real() == pytest.approx(r, abs=1e-9) \
            or math.isinf(r)
        img = BoundaryPoint(apply_boundary(g, 0.0)).to_real()
        assert (math.isinf(a) and math.isinf(img)) or img == pytest.approx(a, abs=1e-9)


def test_ns_iterate_basic():
    h = Isometry(math.e, 0, 0, 1 / math.e)
    _, rep = fixed_points(h)
    U = Arc(rep.theta - 0.05, 0.1)
    assert ns_iterate(h, U, 0) == []
    arcs = ns_iterate(h, U, 20)
    lengths = [a.length for a in arcs]
    assert all(b > a for a, b in zip(lengths, lengths[1:]))
    for a, b in zip(arcs, arcs[1:]):
        assert b.contains_arc(a)


def test_ns_iterate_rejects_bad_arcs():
    h = diag(1.0)
    att, rep = fixed_points(h)
    with pytest.raises(BadArc):
        ns_iterate(h, Arc(att.theta - 0.1, 0.2), 3)
    with pytest.raises(BadArc):
        Arc(0.0, 0.0)
    with pytest.raises(NotHyperbolic):
        ns_iterate(rotation(0.3), Arc(0.0, 1.0), 2)


def test_ns_complement_matches_closed_form_mobius_image():
    # h = diag(l): repeller 0 (theta pi), attractor inf (theta 0); h^k multiplies reals by e^{kl}
    ell = 0.8
    h = diag(ell)
    U = Arc(BoundaryPoint.from_real(-0.2).theta, BoundaryPoint.from_real(0.3).theta - BoundaryPoint.from_real(-0.2).theta)
    for k, arc in enumerate(ns_iterate(h, U, 10), start=1):
        s = BoundaryPoint.from_real(-0.2 * math.exp(k * ell)).theta
        e = BoundaryPoint.from_real(0.3 * math.exp(k * ell)).theta
        assert arc.start == pytest.approx(s, abs=1e-9)
        assert arc.end == pytest.approx(e, abs=1e-9)


def test_isometry_json_roundtrip():
    g = Isometry(1.25, 0.5, -0.75, 0.5)
    back = Isometry.from_json(json.loads(json.dumps(g.to_json())))
    assert back == g
    assert all(isinstance(x, str) for x in g.to_json())


def test_ns_complement_resolved_far_below_float_resolution():
    h = Isometry(math.e, 0, 0, 1 / math.e)
    a, b = -0.2, 0.3
    start = BoundaryPoint.from_real(a).theta
    U = Arc(start, BoundaryPoint.from_real(b).theta - start)
    arcs = ns_iterate(h, U, 20)
    for k, arc in enumerate(arcs, start=1):
        E = math.exp(2.0 * k)
        expect = 2 * math.atan(1 / (b * E)) + 2 * math.atan(1 / (-a * E))
        assert arc.complement_length == pytest.approx(expect, rel=1e-9)
    assert arcs[-1].complement_length < 1e-16
    for x, y in zip(arcs, arcs[1:]):
        assert y.contains_arc(x) and not x.contains_arc(y)
