import math
import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from irslab import glue
from irslab.glue import (
    CYCLE, SEGMENT, BlockGeometry, Component, CoverHypothesis, GluingWindow, blocks_per_chunk, chunks,
    cover_consistent, decode_chunks, find_cover, infer_period,
)
from irslab.hyp2 import translation_length
from irslab.symdyn import Bernoulli, Markov, PeriodicOrbit, WindowWord, thue_morse

UNIT = BlockGeometry(1, 1, 1)
HALF = Bernoulli(("1/2", "1/2"))


def test_nu_prime_weight_examples():
    g = BlockGeometry(1, 3, 1)
    assert glue.nu_prime_weight(g, HALF) == Fraction(3, 4)
    assert glue.nu_prime_weight(g, PeriodicOrbit("011")) == Fraction(6, 7)
    assert glue.nu_prime_weight(BlockGeometry(2, 2, 1), Bernoulli(("0.3", "0.7"))) == Fraction(7, 10)
    m = Markov(((0.9, 0.1), (0.3, 0.7)))
    assert float(glue.nu_prime_weight(g, m)) == pytest.approx(0.75 / (0.75 + 0.75), abs=1e-12)


def test_sample_nu_prime_deterministic():
    g = BlockGeometry(1, 3, 1)
    assert glue.sample_nu_prime(g, HALF, 11, 4) == glue.sample_nu_prime(g, HALF, 11, 4)
    assert np.array_equal(glue.sample_nu_prime_batch(g, HALF, 5, 100, 2), glue.sample_nu_prime_batch(g, HALF, 5, 100, 2))


@pytest.mark.parametrize("N", [1_000, 10_000, 100_000])
def test_sample_nu_prime_converges_at_root_n(N):
    g = BlockGeometry(1, 3, 1)
    X = glue.sample_nu_prime_batch(g, HALF, 5, N, N)
    sd = math.sqrt(0.75 * 0.25 / N)
    assert abs(X[:, 2].mean() - 0.75) <= 4 * sd


def test_single_window_sampler_agrees_with_weight():
    g = BlockGeometry(1, 3, 1)
    hits = sum(glue.sample_nu_prime(g, HALF, 3, s).at(0) for s in range(3000))
    assert abs(hits / 3000 - 0.75) <= 4 * math.sqrt(0.75 * 0.25 / 3000)


def test_unit_volumes_leave_marginal_alone():
    m = Bernoulli(("0.3", "0.7"))
    X = glue.sample_nu_prime_batch(UNIT, m, 3, 20_000, 1)
    assert abs(X[:, 1].mean() - 0.7) <= 0.02


def test_gluing_window_is_binary():
    with pytest.raises(ValueError):
        GluingWindow(WindowWord.centered("012"), UNIT)


def test_chunks_examples():
    assert chunks("000111") == [(0, 3), (1, 3)]
    assert chunks("0") == [(0, 1)]
    assert chunks("010") == [(0, 1), (1, 1), (0, 1)]


@given(st.text("01", min_size=1, max_size=40))
def test_chunks_roundtrip(w):
    runs = chunks(w)
    assert decode_chunks(runs) == w
    assert all(a[0] != b[0] for a, b in zip(runs, runs[1:]))


def test_blocks_per_chunk_examples():
    g = BlockGeometry(Fraction(3, 2), 5, 1)
    for k in range(1, 6):
        assert blocks_per_chunk(g, k * g.vol0, 2, 0) == k
        assert blocks_per_chunk(g, k * g.vol0, 1, 0) == 2 * k
    assert blocks_per_chunk(g, "0.5", 2, 1) == Fraction(1, 10)
    h = CoverHypothesis(CYCLE, [Component(0, "0.5", 2), Component(1, 5, 2)])
    assert infer_period(h, g) is None


def test_infer_period_cycle_and_segment():
    g = UNIT
    h = glue.hypothesis_from_runs(CYCLE, [(0, 2), (1, 1)], g)
    assert infer_period(h, g) == "001"
    seg = glue.hypothesis_from_runs(SEGMENT, [(0, 1), (1, 2), (0, 1)], g)
    assert [c.boundary_count for c in seg.components] == [1, 2, 1]
    assert infer_period(seg, g) == "011011"


def test_hypothesis_validation():
    with pytest.raises(ValueError):
        CoverHypothesis(CYCLE, [Component(0, 1, 2), Component(0, 1, 2)])
    with pytest.raises(ValueError):
        CoverHypothesis(SEGMENT, [Component(0, 1, 2), Component(1, 1, 1)])
    with pytest.raises(ValueError):
        CoverHypothesis(CYCLE, [Component(0, 1, 1)])


def test_infer_period_roundtrip():
    rng = random.Random(2)
    geom = BlockGeometry("1.5", "2.25", "0.5")
    for _ in range(200):
        m = rng.choice([1, 2, 4, 6])
        runs = [(i % 2, rng.randint(1, 6)) for i in range(m)]
        h = glue.hypothesis_from_runs(CYCLE, runs, geom)
        w = infer_period(h, geom)
        back = glue.hypothesis_from_runs(CYCLE, chunks(w), geom)
        assert glue.component_counts(back, geom) == glue.component_counts(h, geom)


def test_periodic_patterns_are_consistent_with_their_own_cover():
    rng = random.Random(5)
    geom = BlockGeometry(2, 7, 3)
    for p in range(1, 9):
        for _ in range(20):
            w = "".join(rng.choice("01") for _ in range(p))
            alpha = (w * 8)[: 4 * p + rng.randint(0, p)]
            assert cover_consistent(alpha, glue.hypothesis_from_word(w, geom), geom)


def test_constant_pattern_and_period_three():
    assert cover_consistent("0" * 30, glue.hypothesis_from_runs(CYCLE, [(0, 1)], UNIT), UNIT)
    h = glue.hypothesis_from_word("001", UNIT)
    assert cover_consistent("001001001", h, UNIT)
    res = find_cover("001" * 20, UNIT)
    assert res.word == "001"


def test_thue_morse_has_no_cover():
    res = find_cover(thue_morse(64), UNIT, 8, 16)
    assert res.hypothesis is None and res.word is None
    assert res.budget()["maxComponents"] == 8


def test_find_cover_agrees_with_brute_force():
    rng = random.Random(8)
    cases = [thue_morse(24), "0110", "001" * 5, "0" * 7]
    cases += ["".join(rng.choice("01") for _ in range(rng.randint(4, 16))) for _ in range(25)]
    for alpha in cases:
        hits = glue.brute_force_cover(alpha, UNIT, 4, 4)
        res = find_cover(alpha, UNIT, 4, 4)
        assert (res.hypothesis is not None) == bool(hits), alpha
        if res.hypothesis is not None:
            assert cover_consistent(alpha, res.hypothesis, UNIT)


def test_period_of():
    assert glue.period_of("010101") == 2
    assert glue.period_of("0110") == 4


# --- chains ---------------------------------------------------------------------------


def test_single_block_internal_length():
    ch = glue.realize_chain("0", 1.3, 2.0, 2.5)
    assert translation_length(ch.internal_curve(0)) == pytest.approx(1.3, abs=1e-9)
    assert ch.group.rank == 3


def test_chain_internal_lengths():
    ch = glue.realize_chain("0110100", 1.0, 2.0, 2.0)
    assert glue.internal_lengths_ok(ch)
    closed = glue.close_chain(ch)
    assert closed.group.rank == ch.group.rank + 1
    assert glue.internal_lengths_ok(closed)


def test_chain_validation():
    with pytest.raises(ValueError):
        glue.realize_chain("012")
    with pytest.raises(ValueError):
        glue.realize_chain("01", L0=0.0)


def test_random_twist_chains_are_seeded():
    a = glue.realize_chain("0101", twists="random", seed=3)
    b = glue.realize_chain("0101", twists="random", seed=3)
    assert a.group.generators == b.group.generators
    assert glue.internal_lengths_ok(a)
