"""Free-group words, bi-infinite geodesics in the Cayley tree, and axes.

Letters are nonzero integers: +(j+1) is the generator f_j and -(j+1) its
inverse, so sample-word digit j steps along f_j.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..errors import OutOfWindow, TrivialElement, WindowTooShort
from .measures import WindowWord
from .subshift import letter_value


def _reduce(seq):
    out = []
    for x in seq:
        if x == 0:
            raise ValueError("0 is not a letter")
        if out and out[-1] == -x:
            out.pop()
        else:
            out.append(x)
    return tuple(out)


@dataclass(frozen=True)
class FreeWord:
    letters: tuple = ()

    def __post_init__(self):
        letters = tuple(int(x) for x in self.letters)
        for a, b in zip(letters, letters[1:]):
            if a == -b:
                raise ValueError(f"word {letters} is not reduced")
        if 0 in letters:
            raise ValueError("0 is not a letter")
        object.__setattr__(self, "letters", letters)

    @classmethod
    def reduce(cls, seq):
        return cls(_reduce(seq))

    @classmethod
    def gen(cls, j, power=1):
        x = j + 1 if power > 0 else -(j + 1)
        return cls((x,) * abs(power))

    @classmethod
    def parse(cls, text):
        """'f1 f2^-1 f1' or signed integers '2 -3 2' (letter k is f_{k-1})."""
        seq = []
        for tok in text.replace(",", " ").split():
            if tok.lstrip("-").isdigit():
                seq.append(int(tok))
                continue
            base, _, exp = tok.partition("^")
            j = int(base.lstrip("fF"))
            e = int(exp) if exp else 1
            seq.extend([(j + 1) if e > 0 else -(j + 1)] * abs(e))
        return cls.reduce(seq)

    def __mul__(self, other):
        return FreeWord.reduce(self.letters + other.letters)

    def inverse(self):
        return FreeWord(tuple(-x for x in reversed(self.letters)))

    def __pow__(self, k):
        base = self if k >= 0 else self.inverse()
        out = FreeWord()
        for _ in range(abs(k)):
            out = out * base
        return out

    def __len__(self):
        return len(self.letters)

    def __bool__(self):
        return bool(self.letters)

    def __str__(self):
        if not self.letters:
            return "1"
        return " ".join(f"f{abs(x) - 1}" + ("^-1" if x < 0 else "") for x in self.letters)


def cyclic_reduction(g):
    """(conjugator u, cyclically reduced core c) with g = u c u^-1."""
    w = g.letters
    i, j = 0, len(w) - 1
    while i < j and w[i] == -w[j]:
        i += 1
        j -= 1
    return FreeWord(w[:i]), FreeWord(w[i:j + 1])


@dataclass(frozen=True)
class GeodesicWindow:
    """Finite piece of a bi-infinite geodesic: gamma(lo + n + 1) = gamma(lo + n) * steps[n]."""

    steps: tuple
    lo: int
    anchor: FreeWord = FreeWord()

    def __post_init__(self):
        steps = tuple(int(x) for x in self.steps)
        for a, b in zip(steps, steps[1:]):
            if a == -b:
                raise ValueError("steps backtrack; not a geodesic")
        if not self.lo <= 0 <= self.lo + len(steps):
            raise ValueError("position 0 must lie in the window")
        object.__setattr__(self, "steps", steps)

    @property
    def hi(self):
        return self.lo + len(self.steps)

    def step(self, i):
        return self.steps[i - self.lo]

    def points(self):
        """{i: gamma(i)} for every position in the window."""
        out = {0: self.anchor}
        cur = self.anchor
        for i in range(0, self.hi):
            cur = cur * FreeWord((self.step(i),))
            out[i + 1] = cur
        cur = self.anchor
        for i in range(-1, self.lo - 1, -1):
            cur = cur * FreeWord((-self.step(i),))
            out[i] = cur
        return out

    def point(self, i):
        if not self.lo <= i <= self.hi:
            raise OutOfWindow(f"position {i} is outside the window")
        return self.points()[i]


def shift_geodesic(gamma, k):
    """S^k with S(gamma)(i) = gamma(i - 1); the anchor becomes gamma(-k)."""
    if not gamma.lo <= -k <= gamma.hi:
        raise OutOfWindow(f"shift by {k} leaves the window")
    return GeodesicWindow(gamma.steps, gamma.lo + k, gamma.point(-k))


def same_class(g1, g2):
    """Agreement of step sequences on the common window (equality up to left translation)."""
    lo, hi = max(g1.lo, g2.lo), min(g1.hi, g2.hi)
    return all(g1.step(i) == g2.step(i) for i in range(lo, hi))


def embed_string(e):
    """Geodesic from the identity whose i-th step is the generator named by e_i."""
    if not isinstance(e, WindowWord):
        e = WindowWord(str(e), 0)
    steps = tuple(letter_value(c) + 1 for c in e.letters)
    return GeodesicWindow(steps, e.lo, FreeWord())


def axis_of(g, reps=None):
    """Axis of a nontrivial g as a window of ``reps`` core periods each side, plus the period.

    The default window is long enough for is_axis to test g itself.
    """
    if not isinstance(g, FreeWord):
        g = FreeWord.reduce(g)
    if not g:
        raise TrivialElement("the identity has no axis")
    u, c = cyclic_reduction(g)
    p = len(c)
    if reps is None:
        reps = len(g) // p + 2
    steps = c.letters * (2 * reps)
    return GeodesicWindow(steps, -reps * p, u), p


def is_axis(gamma, g):
    """Whether g translates gamma along itself: g gamma(i) = gamma(i + k) for some k != 0."""
    if not isinstance(g, FreeWord):
        g = FreeWord.reduce(g)
    n = len(gamma.steps)
    if n <= 2 * len(g):
        raise WindowTooShort(f"window of {n} steps cannot test an element of length {len(g)}")
    if not g:
        return False
    pts = gamma.points()
    for k in range(-len(g), len(g) + 1):
        if k == 0:
            continue
        idx = [i for i in pts if i + k in pts]
        if idx and all(g * pts[i] == pts[i + k] for i in idx):
            return True
    return False
