import itertools
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from irslab.errors import OutOfWindow, TrivialElement, WindowTooShort
from irslab.symdyn import (
    Bernoulli, FreeWord, GeodesicWindow, Markov, PeriodicOrbit, SubshiftFamily, WindowWord, admits,
    axis_of, cyclic_reduction, embed_string, factor_set, find_periodic, is_axis, periodic_factors_ok,
    same_class, sample_window, sample_windows, shift, shortest_period, thue_morse, thue_morse_family,
    window_graph,
)

fam = SubshiftFamily.of


# --- factors and admissibility ----------------------------------------------------------


def test_factor_set_examples():
    assert factor_set(fam(["010"]), 2) == {"01", "10"}
    assert factor_set(fam(["00"]), 2) == {"00"}
    assert factor_set(fam(["010"]), 4) == set()


def test_admits_examples():
    f = fam(["010"])
    assert admits("01", f)
    assert not admits("11", f)


@settings(max_examples=100, deadline=None)
@given(st.lists(st.text("012", min_size=1, max_size=12), min_size=1, max_size=4), st.integers(1, 6))
def test_every_factor_is_admitted(samples, L):
    f = SubshiftFamily(3, tuple(samples))
    assert all(admits(w, f) for w in factor_set(f, L))


def test_family_validation():
    with pytest.raises(ValueError):
        SubshiftFamily(2, ("012",))
    with pytest.raises(ValueError):
        SubshiftFamily(2, ("",))


# --- periodic points ------------------------------------------------------------------


def brute_shortest_period(f, L, Pmax):
    """Shortest p such that some word of length p has every factor of its repetition admitted."""
    letters = "".join(sorted({c for s in f.samples for c in s}))
    for p in range(1, Pmax + 1):
        found = [w for w in map("".join, itertools.product(letters, repeat=p)) if periodic_factors_ok(w, f, L)]
        if found:
            return p, min(found)
    return None, None


def test_find_periodic_examples():
    assert find_periodic(fam(["010"]), 2, 4) == "01"
    assert find_periodic(fam(["01"]), 2, 8) is None


def test_find_periodic_matches_brute_force():
    rng = random.Random(12)
    for _ in range(150):
        samples = ["".join(rng.choice("01") for _ in range(rng.randint(3, 14))) for _ in range(rng.randint(1, 3))]
        f = fam(samples)
        L = rng.randint(2, 4)
        p, w = brute_shortest_period(f, L, 8)
        got = find_periodic(f, L, 8)
        if p is None:
            assert got is None
        else:
            assert got is not None and len(got) == p
            assert periodic_factors_ok(got, f, L)
            # least rotation among minimal-period candidates
            assert got == w


def test_thue_morse_window_graph_has_short_cycle():
    # the length-8 factors of the finite Thue-Morse prefixes close up into a period-8 loop
    f = thue_morse_family()
    assert shortest_period(f, 8) == 8
    w = find_periodic(f, 8, 16)
    assert w == "00101101"
    assert periodic_factors_ok(w, f, 8)


def test_thue_morse_itself_is_cube_free():
    t = thue_morse(256)
    for n in range(1, 20):
        for i in range(len(t) - 3 * n):
            assert not (t[i:i + n] == t[i + n:i + 2 * n] == t[i + 2 * n:i + 3 * n])


def test_window_graph_edges_are_blocks():
    f = fam(["00110"])
    g = window_graph(f, 3)
    edges = {u + v[-1] for u, vs in g.items() for v in vs}
    assert edges == factor_set(f, 3)


# --- measures and windows -------------------------------------------------------------


def test_periodic_orbit_phase_uniform():
    seen = {"010101": 0, "101010": 0}
    for s in range(10_000):
        seen[sample_window(PeriodicOrbit("01"), 6, s).letters] += 1
    assert set(seen) == {"010101", "101010"}
    assert abs(seen["010101"] / 10_000 - 0.5) <= 0.02


def test_bernoulli_frequency_and_determinism():
    w = sample_window(Bernoulli(("1/2", "1/2")), 100_000, 3)
    assert abs(w.letters.count("1") / 100_000 - 0.5) <= 0.01
    assert w == sample_window(Bernoulli(("1/2", "1/2")), 100_000, 3)
    assert w.offset == 50_000


def test_markov_stationary_and_frequencies():
    m = Markov(((0.9, 0.1), (0.3, 0.7)))
    assert m.pi == pytest.approx((0.75, 0.25))
    X = sample_windows(m, 200, 2000, 5)
    assert abs(X.mean() - 0.25) < 0.01
    # empirical transition frequency 0 -> 1
    a, b = X[:, :-1].ravel(), X[:, 1:].ravel()
    assert abs(b[a == 0].mean() - 0.1) < 0.01
    with pytest.raises(ValueError):
        Markov(((0.5, 0.6), (0.5, 0.5)))
    with pytest.raises(ValueError):
        Markov(((0.9, 0.1), (0.3, 0.7)), pi=(0.5, 0.5))


def test_measure_validation():
    with pytest.raises(ValueError):
        Bernoulli(("1/2", "1/3"))


def test_window_shift():
    w = WindowWord.centered("0123456")
    assert shift(w, 0) == w
    assert shift(shift(w, 3), -3) == w
    assert shift(w, 2).at(0) == w.at(-2)
    with pytest.raises(OutOfWindow):
        shift(w, 4)


# --- free group -----------------------------------------------------------------------


letters = st.integers(-3, 3).filter(bool)


@settings(max_examples=300, deadline=None)
@given(st.lists(letters, max_size=12), st.lists(letters, max_size=12))
def test_free_reduction(u, v):
    U, V = FreeWord.reduce(u), FreeWord.reduce(v)
    assert (U * V) * V.inverse() == U
    assert (U * U.inverse()) == FreeWord()


def test_free_reduction_random_pairs():
    rng = random.Random(4)
    for _ in range(10_000):
        u = FreeWord.reduce([rng.choice([-2, -1, 1, 2]) for _ in range(rng.randint(0, 10))])
        v = FreeWord.reduce([rng.choice([-2, -1, 1, 2]) for _ in range(rng.randint(0, 10))])
        assert (u * v) * v.inverse() == u


def test_parse_and_cyclic_reduction():
    g = FreeWord.parse("f1 f0 f1^-1")
    assert g.letters == (2, 1, -2)
    u, c = cyclic_reduction(g)
    assert u == FreeWord((2,)) and c == FreeWord((1,))
    assert u * c * u.inverse() == g
    with pytest.raises(ValueError):
        FreeWord((1, -1))


def test_embed_string_examples():
    g = embed_string("11")
    assert g.point(1) == FreeWord((2,))
    assert g.point(2) == FreeWord((2, 2))
    assert embed_string("12").point(2) == FreeWord((2, 3))
    w = WindowWord.centered("0120110")
    gam = embed_string(w)
    for i in range(gam.lo, gam.hi + 1):
        assert len(gam.point(i)) == abs(i)


def test_geodesic_shift_is_inverse_and_matches_definition():
    gam = embed_string(WindowWord.centered("0101100111"))
    assert shift(shift(gam, 2), -2).points() == gam.points()
    s = shift(gam, 2)
    for i in range(s.lo, s.hi + 1):
        assert s.point(i) == gam.point(i - 2)
    with pytest.raises(OutOfWindow):
        shift(gam, 20)


@settings(max_examples=100, deadline=None)
@given(st.text("01", min_size=6, max_size=20), st.integers(-2, 2))
def test_embedding_is_shift_equivariant(text, k):
    w = WindowWord.centered(text)
    assert same_class(shift(embed_string(w), k), embed_string(shift(w, k)))


def test_axis_examples():
    gam, p = axis_of(FreeWord.gen(0))
    assert p == 1 and set(gam.steps) == {1}
    g = FreeWord.parse("f1 f0 f1^-1")
    gam, p = axis_of(g)
    assert p == 1 and gam.anchor == FreeWord((2,))
    assert is_axis(gam, g)
    ab = FreeWord.parse("f0 f1")
    assert is_axis(axis_of(ab)[0], ab)
    with pytest.raises(TrivialElement):
        axis_of(FreeWord())


def test_embedded_periodic_string_is_an_axis():
    gam = embed_string(WindowWord.centered("12" * 10))
    assert is_axis(gam, FreeWord.parse("f1 f2"))
    # the conjugate f2 f1 has the translate f1^-1 gamma as its axis, not gamma itself
    assert not is_axis(gam, FreeWord.parse("f2 f1"))
    pts = gam.points()
    g = FreeWord.parse("f1 f2")
    assert all(g * pts[i] == pts[i + 2] for i in range(gam.lo, gam.hi - 1))


def test_axis_of_random_elements():
    rng = random.Random(9)
    done = 0
    while done < 1000:
        g = FreeWord.reduce([rng.choice([-3, -2, -1, 1, 2, 3]) for _ in range(rng.randint(1, 10))])
        if not g:
            continue
        gam, _ = axis_of(g)
        assert is_axis(gam, g)
        # powers translate the same axis further
        gam2, _ = axis_of(g, reps=2 * len(g) + 2)
        assert is_axis(gam2, g ** 2)
        done += 1


def test_thue_morse_window_is_not_an_axis():
    gam = embed_string(WindowWord.centered(thue_morse(64)))
    for n in range(1, 7):
        for w in itertools.product([-2, -1, 1, 2], repeat=n):
            g = FreeWord.reduce(w)
            if len(g) == n:
                assert not is_axis(gam, g)


def test_axis_window_too_short():
    with pytest.raises(WindowTooShort):
        is_axis(GeodesicWindow((1, 1), 0), FreeWord.parse("f0 f0"))
