"""Hilbert symbols at odd primes, diagonal quadratic forms over Q(sqrt d), and
the local invariants used to show two forms are not similar.

Elements of Q(sqrt d) reach Q_p through a chosen square root of d modulo p,
lifted by Hensel's lemma; only primes that split in Q(sqrt d) are supported.
"""

from __future__ import annotations

import enum
import math
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .errors import BadEmbedding, EvenPrime, LengthMismatch, ZeroArgument

PADIC_PRECISION = 24


def is_prime(n):
    if n < 2:
        return False
    return all(n % k for k in range(2, math.isqrt(n) + 1))


def squarefree_part(n):
    """Signed square-free part of a nonzero integer."""
    if n == 0:
        raise ZeroArgument("0 has no square class")
    sign = -1 if n < 0 else 1
    n = abs(n)
    out = 1
    k = 2
    while k * k <= n:
        while n % (k * k) == 0:
            n //= k * k
        if n % k == 0:
            out *= k
            n //= k
        k += 1
    return sign * out * n


def is_rational_square(x):
    x = Fraction(x)
    if x < 0:
        return False
    return math.isqrt(x.numerator) ** 2 == x.numerator and math.isqrt(x.denominator) ** 2 == x.denominator


def rational_sqrt(x):
    x = Fraction(x)
    return Fraction(math.isqrt(x.numerator), math.isqrt(x.denominator))


@dataclass(frozen=True)
class QuadElem:
    """a + b sqrt(d) with a, b rational and d a positive square-free integer (d = 1 means Q)."""

    a: Fraction
    b: Fraction = Fraction(0)
    d: int = 1

    def __post_init__(self):
        object.__setattr__(self, "a", Fraction(self.a))
        object.__setattr__(self, "b", Fraction(self.b))
        if self.d < 1 or squarefree_part(self.d) != self.d:
            raise ValueError(f"d must be a positive square-free integer, got {self.d}")
        if self.d == 1 and self.b:
            object.__setattr__(self, "a", self.a + self.b)
            object.__setattr__(self, "b", Fraction(0))

    @classmethod
    def parse(cls, text, d=1):
        """'7', '-3/2', '-3√2', '1+2sqrt2', '1 - 3*sqrt(2)'; the radicand must match d when given."""
        s = text.replace(" ", "").replace("*", "")
        s = re.sub(r"sqrt\(?(\d+)\)?", r"√\1", s)
        if "√" not in s:
            return cls(Fraction(s), 0, d)
        m = re.fullmatch(r"([+-]?[\d/]+(?=[+-]))?([+-]?[\d/]*)√(\d+)", s)
        if not m:
            raise ValueError(f"cannot parse {text!r} as a + b√d")
        a = Fraction(m.group(1)) if m.group(1) else Fraction(0)
        bs = m.group(2)
        b = Fraction(bs + "1") if bs in ("", "+", "-") else Fraction(bs)
        rad = int(m.group(3))
        if d != 1 and rad != d:
            raise ValueError(f"radicand {rad} does not match the field d={d}")
        return cls(a, b, rad)

    def _lift(self, other):
        if not isinstance(other, QuadElem):
            other = QuadElem(other, 0, self.d)
        if self.d != other.d and self.b and other.b:
            raise ValueError("elements of different fields")
        return other, max(self.d, other.d)

    def __add__(self, other):
        o, d = self._lift(other)
        return QuadElem(self.a + o.a, self.b + o.b, d)

    def __neg__(self):
        return QuadElem(-self.a, -self.b, self.d)

    def __sub__(self, other):
        return self + (-self._lift(other)[0])

    def __mul__(self, other):
        o, d = self._lift(other)
        return QuadElem(self.a * o.a + d * self.b * o.b, self.a * o.b + self.b * o.a, d)

    __rmul__ = __mul__

    def conj(self):
        return QuadElem(self.a, -self.b, self.d)

    def norm(self):
        return self.a * self.a - self.d * self.b * self.b

    def inverse(self):
        n = self.norm()
        if n == 0:
            raise ZeroArgument("0 has no inverse")
        c = self.conj()
        return QuadElem(c.a / n, c.b / n, self.d)

    def __truediv__(self, other):
        o, _ = self._lift(other)
        return self * o.inverse()

    def is_zero(self):
        return self.a == 0 and self.b == 0

    def real_embeddings(self):
        r = math.sqrt(self.d)
        return float(self.a + self.b * Fraction(r)), float(self.a - self.b * Fraction(r))

    def __str__(self):
        if not self.b:
            return str(self.a)
        b = "" if self.b == 1 else "-" if self.b == -1 else str(self.b)
        if not self.a:
            return f"{b}√{self.d}"
        sign = "+" if self.b > 0 else ""
        return f"{self.a}{sign}{b}√{self.d}"


def is_square(x):
    """Exact test for x being a square in Q(sqrt d)."""
    if x.is_zero():
        return True
    if not x.b:
        return is_rational_square(x.a) or (x.d > 1 and is_rational_square(x.a / x.d))
    # (s + t sqrt d)^2 = x forces N(x) = n^2 and s^2 = (a +- n) / 2
    n2 = x.norm()
    if not is_rational_square(n2):
        return False
    n = rational_sqrt(n2)
    return any(is_rational_square((x.a + e * n) / 2) and (x.a + e * n) != 0 for e in (1, -1))


# --- primes and places ----------------------------------------------------------------


def legendre(u, p):
    """Euler's criterion: +1, -1, or 0 when p divides u."""
    if p == 2 or not is_prime(p):
        raise EvenPrime(f"{p} is not an odd prime") if p == 2 else ValueError(f"{p} is not prime")
    u = Fraction(u)
    if u.denominator % p == 0:
        raise ValueError("u is not p-integral")
    n = (u.numerator * pow(u.denominator, -1, p)) % p
    if n == 0:
        return 0
    return 1 if pow(n, (p - 1) // 2, p) == 1 else -1


def nonsquare_unit(p):
    return next(u for u in range(2, p) if legendre(u, p) == -1)


def _hensel_sqrt(d, r, p, k):
    """Root of x^2 = d modulo p^k lifted from x = r modulo p."""
    mod = p
    x = r % p
    for _ in range(k.bit_length() + 1):
        mod = min(mod * mod, p ** k)
        x = (x - (x * x - d) * pow(2 * x, -1, mod)) % mod
    return x % p ** k


@dataclass(frozen=True)
class PadicPlace:
    p: int
    root: int = 0
    d: int = 1

    def __post_init__(self):
        if self.p == 2:
            raise EvenPrime("p = 2 is not supported")
        if not is_prime(self.p):
            raise ValueError(f"{self.p} is not prime")
        if self.d > 1:
            if self.d % self.p == 0:
                raise BadEmbedding(f"p = {self.p} ramifies in Q(sqrt {self.d})")
            if legendre(self.d, self.p) != 1:
                raise BadEmbedding(f"p = {self.p} is inert in Q(sqrt {self.d})")
            if not 0 < self.root < self.p or (self.root ** 2 - self.d) % self.p:
                raise ValueError(f"{self.root} is not a square root of {self.d} mod {self.p}")

    @classmethod
    def rational(cls, p):
        return cls(p, 0, 1)

    @classmethod
    def split(cls, d, p):
        """Both embeddings of Q(sqrt d) into Q_p, smaller root first."""
        if d == 1:
            return [cls(p, 0, 1)]
        if d % p == 0 or legendre(d, p) != 1:
            raise BadEmbedding(f"p = {p} does not split in Q(sqrt {d})")
        roots = sorted(r for r in range(1, p) if (r * r - d) % p == 0)
        return [cls(p, r, d) for r in roots]

    def sqrt_d(self, k=PADIC_PRECISION):
        return _hensel_sqrt(self.d, self.root, self.p, k)


def _vp(n, p):
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v, n


def padic_split(x, place, prec=PADIC_PRECISION):
    """(valuation, unit residue mod p) of x in Q_p under the place."""
    p = place.p
    if isinstance(x, QuadElem) and x.b:
        if place.d != x.d:
            raise BadEmbedding(f"place embeds Q(sqrt {place.d}), element lives in Q(sqrt {x.d})")
        M = p ** prec
        den = x.a.denominator * x.b.denominator
        num = (x.a.numerator * x.b.denominator + x.b.numerator * x.a.denominator * place.sqrt_d(prec)) % M
        if num == 0:
            raise BadEmbedding(f"{x} vanishes to precision p^{prec}")
        vn, un = _vp(num, p)
        vd, ud = _vp(den, p)
        return vn - vd, (un * pow(ud, -1, p)) % p
    q = Fraction(x.a if isinstance(x, QuadElem) else x)
    if q == 0:
        raise ZeroArgument("0 has no valuation")
    vn, un = _vp(abs(q.numerator), p)
    vd, ud = _vp(q.denominator, p)
    sign = -1 if q < 0 else 1
    return vn - vd, (sign * un * pow(ud, -1, p)) % p


def _is_zero(x):
    return x.is_zero() if isinstance(x, QuadElem) else Fraction(x) == 0


def _place(place):
    return place if isinstance(place, PadicPlace) else PadicPlace.rational(int(place))


def hilbert_symbol(a, b, place):
    """(a, b) at an odd prime: (-1)^(ab(p-1)/2) leg(u)^beta leg(v)^alpha with a = p^alpha u, b = p^beta v."""
    place = _place(place)
    if _is_zero(a) or _is_zero(b):
        raise ZeroArgument("Hilbert symbol of 0")
    p = place.p
    al, u = padic_split(a, place)
    be, v = padic_split(b, place)
    s = -1 if (al * be * (p - 1) // 2) % 2 else 1
    if be % 2:
        s *= legendre(u, p)
    if al % 2:
        s *= legendre(v, p)
    return s


@lru_cache(maxsize=None)
def _square_table(p, k):
    M = p ** k
    z = np.arange(M, dtype=np.int64)
    table = np.zeros(M, dtype=bool)
    table[(z * z) % M] = True
    return table


def _strip(x, p):
    """Integer in the same square class as x with p-valuation 0 or 1."""
    x = Fraction(x)
    n = x.numerator * x.denominator
    while n % (p * p) == 0:
        n //= p * p
    return n


@lru_cache(maxsize=None)
def _conic_solvable(a, b, p):
    va, vb = _vp(abs(a), p)[0], _vp(abs(b), p)[0]
    k = 2 * max(va, vb) + 3
    M = p ** k
    sq = _square_table(p, k)
    t = np.arange(M, dtype=np.int64)
    # primitive solutions: x a unit (scale x = 1), or p | x and y a unit (scale y = 1)
    if sq[(a + b * ((t * t) % M)) % M].any():
        return True
    xs = (p * t[: M // p]) % M
    return bool(sq[(a * ((xs * xs) % M) + b) % M].any())


def hilbert_oracle(a, b, p):
    """Decide z^2 = a x^2 + b y^2 over Q_p by searching primitive solutions modulo a prime power."""
    p = _place(p).p
    if Fraction(a) == 0 or Fraction(b) == 0:
        raise ZeroArgument("Hilbert symbol of 0")
    return 1 if _conic_solvable(_strip(a, p), _strip(b, p), p) else -1


# --- forms ----------------------------------------------------------------------------


@dataclass(frozen=True)
class DiagonalForm:
    coeffs: tuple
    d: int = 1

    def __post_init__(self):
        cs = tuple(c if isinstance(c, QuadElem) else QuadElem(c, 0, self.d) for c in self.coeffs)
        if not cs:
            raise ValueError("empty form")
        for c in cs:
            if c.is_zero():
                raise ValueError("coefficients must be nonzero")
            if c.b and c.d != self.d:
                raise ValueError(f"coefficient {c} is not in Q(sqrt {self.d})")
        object.__setattr__(self, "coeffs", tuple(QuadElem(c.a, c.b, self.d) for c in cs))

    @classmethod
    def parse(cls, text, d=1):
        return cls(tuple(QuadElem.parse(t, d) for t in text.split(",")), d)

    def __len__(self):
        return len(self.coeffs)

    def scaled(self, lam):
        return DiagonalForm(tuple(c * lam for c in self.coeffs), self.d)

    def __str__(self):
        return "(" + ", ".join(str(c) for c in self.coeffs) + ")"


def eps_invariant(q, place):
    """Product of (a_i, a_j) over i < j."""
    place = _place(place)
    out = 1
    cs = q.coeffs
    for i in range(len(cs)):
        for j in range(i + 1, len(cs)):
            out *= hilbert_symbol(cs[i], cs[j], place)
    return out


def disc_product(q):
    out = QuadElem(1, 0, q.d)
    for c in q.coeffs:
        out = out * c
    return out


def square_class_rep(x):
    """Representative of x modulo squares: rational part square-free, irrational part content-reduced."""
    if not x.b:
        return QuadElem(squarefree_part(x.a.numerator * x.a.denominator), 0, x.d)
    # strip the largest rational square dividing both coordinates
    den = x.a.denominator * x.b.denominator
    A, B = x.a * den * den, x.b * den * den
    g = math.gcd(A.numerator, B.numerator)
    s = 1
    k = 2
    while k * k <= g:
        while g % (k * k) == 0:
            g //= k * k
            s *= k
        k += 1
    return QuadElem(A / (s * s), B / (s * s), x.d)


def disc(q):
    return square_class_rep(disc_product(q))


def same_square_class(x, y):
    return is_square(x / y)


class Verdict(enum.Enum):
    OBSTRUCTED_BY_DISC = "ObstructedByDisc"
    OBSTRUCTED_BY_EPS = "ObstructedByEps"
    NO_OBSTRUCTION_FOUND = "NoObstructionFound"


@dataclass(frozen=True)
class SimilarityReport:
    verdict: Verdict
    eps_target: int | None = None
    eps_table: tuple = ()
    disc_ratio: QuadElem | None = None

    def to_json(self):
        return {
            "verdict": self.verdict.value,
            "epsTarget": self.eps_target,
            "epsTable": [{"lambda": lam, "eps": e} for lam, e in self.eps_table],
            "discRatio": None if self.disc_ratio is None else str(self.disc_ratio),
        }


def square_class_reps(p):
    u = nonsquare_unit(p)
    return (1, p, u, p * u)


def similarity_obstruction(q, q2, place):
    """Look for a local reason why q2 is not isometric to lam * q for any scalar lam.

    Even length: the discriminant class is scale invariant, compare it.
    Odd length: compare eps(lam q) with eps(q2) over the four square classes of Q_p.
    NO_OBSTRUCTION_FOUND is not a proof of similarity.
    """
    if len(q) != len(q2):
        raise LengthMismatch(f"forms have lengths {len(q)} and {len(q2)}")
    place = _place(place)
    if len(q) % 2 == 0:
        ratio = disc_product(q) / disc_product(q2)
        if not is_square(ratio):
            return SimilarityReport(Verdict.OBSTRUCTED_BY_DISC, disc_ratio=square_class_rep(ratio))
        return SimilarityReport(Verdict.NO_OBSTRUCTION_FOUND, disc_ratio=square_class_rep(ratio))
    target = eps_invariant(q2, place)
    table = tuple((lam, eps_invariant(q.scaled(lam), place)) for lam in square_class_reps(place.p))
    if all(e != target for _, e in table):
        return SimilarityReport(Verdict.OBSTRUCTED_BY_EPS, target, table)
    return SimilarityReport(Verdict.NO_OBSTRUCTION_FOUND, target, table)


@dataclass(frozen=True)
class SignatureReport:
    ok: bool
    profiles: tuple   # per real embedding, the tuple of coefficient signs

    def __bool__(self):
        return self.ok


def signature_check(q):
    """Signature (1, n) under sqrt d -> +sqrt d and definite under sqrt d -> -sqrt d (or the reverse)."""
    plus = tuple(1 if c.real_embeddings()[0] > 0 else -1 for c in q.coeffs)
    minus = tuple(1 if c.real_embeddings()[1] > 0 else -1 for c in q.coeffs)
    if q.d == 1:
        return SignatureReport(False, (plus,))

    def lorentzian(s):
        return s.count(-1) == 1

    def definite(s):
        return s.count(-1) == 0

    ok = (lorentzian(plus) and definite(minus)) or (lorentzian(minus) and definite(plus))
    return SignatureReport(ok, (plus, minus))
