import itertools
import json
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from sympy import legendre_symbol
from sympy.ntheory import factorint

from irslab import arith
from irslab.arith import (
    DiagonalForm, PadicPlace, QuadElem, Verdict, disc, eps_invariant, hilbert_oracle, hilbert_symbol,
    is_square, legendre, similarity_obstruction, signature_check,
)
from irslab.errors import BadEmbedding, EvenPrime, LengthMismatch, ZeroArgument

PRIMES = (3, 5, 7, 11, 13)
P7 = PadicPlace(7, 3, 2)


def grid(p):
    base = [s * k for k in range(1, 11) for s in (1, -1)]
    return [a * p ** e for a in base for e in range(3)]


# --- number theory helpers ----------------------------------------------------------------


def test_legendre_examples_and_sympy():
    assert legendre(1, 7) == 1
    assert legendre(5, 7) == -1
    assert legendre(14, 7) == 0
    for p in PRIMES:
        for u in range(1, 3 * p):
            if u % p:
                assert legendre(u, p) == legendre_symbol(u, p)
    with pytest.raises(EvenPrime):
        legendre(3, 2)


def test_squarefree_part_against_factorisation():
    for n in list(range(1, 400)) + [-12, -7, 10 ** 6 + 3]:
        expect = math.copysign(1, n) * math.prod(q for q, e in factorint(abs(n)).items() if e % 2)
        assert arith.squarefree_part(n) == expect


def test_quad_elem_parse_and_arithmetic():
    x = QuadElem.parse("-3√2")
    assert (x.a, x.b, x.d) == (0, -3, 2)
    assert QuadElem.parse("1+2sqrt2") == QuadElem(1, 2, 2)
    assert QuadElem.parse("1 - 3*sqrt(2)") == QuadElem(1, -3, 2)
    assert QuadElem.parse("-3/2") == QuadElem(Fraction(-3, 2))
    y = QuadElem(1, 1, 2)
    assert y * y.inverse() == QuadElem(1, 0, 2)
    assert y.norm() == -1
    assert (y * y.conj()).b == 0
    with pytest.raises(ValueError):
        QuadElem(1, 1, 8)


@settings(max_examples=200)
@given(st.fractions(max_denominator=20), st.fractions(max_denominator=20))
def test_square_detection_on_squares(s, t):
    x = QuadElem(s, t, 2)
    assert is_square(x * x)
    # 3 is not a square in Q(sqrt 2): its norm 9 is, but (3 +- 3)/2 gives 3 or 0
    assert not is_square(QuadElem(3, 0, 2) * x * x) or x.is_zero()


def test_places_over_q_sqrt2():
    a, b = PadicPlace.split(2, 7)
    assert (a.root, b.root) == (3, 4)
    assert pow(P7.sqrt_d(), 2, 7 ** arith.PADIC_PRECISION) == 2
    with pytest.raises(BadEmbedding):
        PadicPlace.split(2, 5)      # inert
    with pytest.raises(BadEmbedding):
        PadicPlace(7, 0, 7)         # ramified
    with pytest.raises(EvenPrime):
        PadicPlace(2)


def test_residue_of_minus_three_root_two():
    assert arith.padic_split(QuadElem(0, -3, 2), P7) == (0, 5)
    assert arith.padic_split(QuadElem(0, -3, 2), PadicPlace(7, 4, 2)) == (0, 2)
    assert arith.padic_split(Fraction(49, 3), PadicPlace.rational(7)) == (2, 5)


# --- Hilbert symbols ------------------------------------------------------------------------


def naive_solvable(a, b, p, k):
    """Primitive solution of z^2 = a x^2 + b y^2 modulo p^k, scanning every (x, y)."""
    M = p ** k
    squares = np.zeros(M, dtype=bool)
    squares[np.arange(M) ** 2 % M] = True
    y = np.arange(M)
    for x in range(M):
        vals = (a * x * x + b * y * y) % M
        ok = squares[vals] if x % p else squares[vals] & (y % p != 0)
        if ok.any():
            return True
    return False


@pytest.mark.parametrize("p", [3, 5])
def test_oracle_matches_naive_search(p):
    for a, b in itertools.product([1, -1, 2, -2, p, -p, 2 * p], repeat=2):
        k = 2 * max(arith._vp(abs(a), p)[0], arith._vp(abs(b), p)[0]) + 3
        assert hilbert_oracle(a, b, p) == (1 if naive_solvable(a, b, p, k) else -1)


def test_hilbert_examples():
    for u, v in itertools.product(range(1, 7), repeat=2):
        assert hilbert_symbol(u, v, 7) == 1 == hilbert_oracle(u, v, 7)
    assert hilbert_symbol(7, 5, 7) == -1 == hilbert_oracle(7, 5, 7)
    assert hilbert_symbol(7, QuadElem(0, -3, 2), P7) == -1
    assert hilbert_oracle(1, 1, 11) == 1
    with pytest.raises(ZeroArgument):
        hilbert_symbol(0, 3, 7)
    with pytest.raises(EvenPrime):
        hilbert_symbol(3, 5, 2)


@pytest.mark.parametrize("p", PRIMES)
def test_symbol_identities_on_grid(p):
    g = grid(p)
    h = {(a, b): hilbert_symbol(a, b, p) for a in g for b in g}
    for a in g:
        assert h[(a, -a)] == 1
        for b in g:
            assert h[(a, b)] == h[(b, a)]
    small = [x for x in g if abs(x) <= 10 * p]
    for a in small:
        for b1 in small:
            for b2 in small:
                assert hilbert_symbol(a, b1 * b2, p) == h[(a, b1)] * h[(a, b2)]


def test_rational_arguments():
    assert hilbert_symbol(Fraction(7, 4), 5, 7) == hilbert_symbol(7, 5, 7)
    assert hilbert_oracle(Fraction(1, 7), 5, 7) == hilbert_oracle(7, 5, 7)


def test_lambda_lambda_is_lambda_minus_one():
    # standard identity (l, l) = (l, -1); -1 for odd valuation when p = 3 mod 4
    for p in PRIMES:
        for lam in grid(p):
            assert hilbert_symbol(lam, lam, p) == hilbert_symbol(lam, -1, p)
    assert hilbert_symbol(7, 7, 7) == -1


# --- forms ----------------------------------------------------------------------------------


Q = DiagonalForm.parse("1,1,1,1,-3√2", 2)
Q2 = DiagonalForm.parse("7,1,1,1,-3√2", 2)


def test_eps_of_example_forms():
    assert eps_invariant(Q2, P7) == -1
    assert eps_invariant(Q, P7) == 1
    for perm in itertools.permutations(range(5)):
        assert eps_invariant(DiagonalForm(tuple(Q2.coeffs[i] for i in perm), 2), P7) == -1


def test_eps_matches_oracle_built_pairwise():
    # evaluate each pair through residues and the brute-force conic oracle
    out = 1
    for x, y in itertools.combinations(Q2.coeffs, 2):
        vx, ux = arith.padic_split(x, P7)
        vy, uy = arith.padic_split(y, P7)
        out *= hilbert_oracle(7 ** vx * ux, 7 ** vy * uy, 7)
    assert out == eps_invariant(Q2, P7)


def test_odd_length_obstruction_by_eps():
    rep = similarity_obstruction(Q, Q2, P7)
    assert rep.verdict is Verdict.OBSTRUCTED_BY_EPS
    assert rep.eps_target == -1
    assert [e for _, e in rep.eps_table] == [1, 1, 1, 1]
    assert [lam for lam, _ in rep.eps_table] == [1, 7, 3, 21]
    json.dumps(rep.to_json())


def test_even_length_obstruction_by_disc():
    q = DiagonalForm.parse("1,1,1,-3√2", 2)
    q2 = DiagonalForm.parse("7,1,1,-3√2", 2)
    rep = similarity_obstruction(q, q2, P7)
    assert rep.verdict is Verdict.OBSTRUCTED_BY_DISC
    assert rep.disc_ratio == QuadElem(7, 0, 2)


def test_self_comparison_and_length_mismatch():
    assert similarity_obstruction(Q, Q, P7).verdict is Verdict.NO_OBSTRUCTION_FOUND
    q = DiagonalForm.parse("1,1,1,-3√2", 2)
    assert similarity_obstruction(q, q, P7).verdict is Verdict.NO_OBSTRUCTION_FOUND
    with pytest.raises(LengthMismatch):
        similarity_obstruction(Q, q, P7)


@pytest.mark.parametrize("mu", [Fraction(2), Fraction(3, 5), Fraction(-7)])
def test_verdicts_survive_square_scaling(mu):
    sq = QuadElem(mu * mu, 0, 2)
    assert similarity_obstruction(Q.scaled(sq), Q2, P7).verdict is Verdict.OBSTRUCTED_BY_EPS
    q = DiagonalForm.parse("1,1,1,-3√2", 2)
    q2 = DiagonalForm.parse("7,1,1,-3√2", 2)
    assert similarity_obstruction(q.scaled(sq), q2, P7).verdict is Verdict.OBSTRUCTED_BY_DISC


def test_disc_classes():
    assert disc(DiagonalForm.parse("1,1,-1")) == QuadElem(-1)
    q = DiagonalForm.parse("1,1,1,-3√2", 2)
    lam = QuadElem(5, 1, 2)
    assert arith.same_square_class(disc(q.scaled(lam)), disc(q))
    assert not arith.same_square_class(disc(q), disc(DiagonalForm.parse("7,1,1,-3√2", 2)))


def test_signature_check():
    assert signature_check(Q)
    assert signature_check(Q).profiles == ((1, 1, 1, 1, -1), (1, 1, 1, 1, 1))
    assert not signature_check(DiagonalForm.parse("1,-1,1"))
    assert not signature_check(DiagonalForm.parse("1,1,2+√2", 2))
