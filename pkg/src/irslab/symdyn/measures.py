"""Shift-invariant measures on sequence space and finite windows onto their samples."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from ..errors import OutOfWindow
from .subshift import DIGITS, letter_value


def as_fraction(x):
    """Exact rational from an int, Fraction or decimal string; floats read by their repr."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        return Fraction(repr(x))
    return Fraction(x)


@dataclass(frozen=True)
class WindowWord:
    """Finite window onto a bi-infinite sequence; position 0 sits at ``offset``."""

    letters: str
    offset: int

    def __post_init__(self):
        if not self.letters:
            raise ValueError("window must be nonempty")
        if not 0 <= self.offset < len(self.letters):
            raise ValueError(f"offset {self.offset} outside window of length {len(self.letters)}")

    @classmethod
    def centered(cls, letters):
        return cls(letters, len(letters) // 2)

    def __len__(self):
        return len(self.letters)

    def at(self, i):
        j = self.offset + i
        if not 0 <= j < len(self.letters):
            raise OutOfWindow(f"position {i} is outside the window")
        return letter_value(self.letters[j])

    @property
    def lo(self):
        return -self.offset

    @property
    def hi(self):
        return len(self.letters) - self.offset

    def to_json(self):
        return {"letters": self.letters, "offset": self.offset}


def shift_window(w, k):
    """The shift applied k times, new(i) = old(i - k); moves position 0 by k."""
    offset = w.offset - k
    if not 0 <= offset < len(w.letters):
        raise OutOfWindow(f"shift by {k} moves position 0 out of a window of length {len(w)}")
    return WindowWord(w.letters, offset)


@dataclass(frozen=True)
class Bernoulli:
    p: tuple

    def __post_init__(self):
        p = tuple(as_fraction(x) for x in self.p)
        if len(p) < 2 or any(x < 0 for x in p) or sum(p) != 1:
            raise ValueError("Bernoulli weights must be a probability vector")
        object.__setattr__(self, "p", p)

    def marginal(self):
        return self.p


@dataclass(frozen=True)
class Markov:
    P: tuple
    pi: tuple = None

    def __post_init__(self):
        P = np.asarray(self.P, dtype=float)
        if P.ndim != 2 or P.shape[0] != P.shape[1] or P.shape[0] < 2:
            raise ValueError("transition matrix must be square")
        if np.any(P < 0) or np.any(np.abs(P.sum(axis=1) - 1.0) > 1e-12):
            raise ValueError("rows of P must sum to 1")
        if self.pi is None:
            vals, vecs = np.linalg.eig(P.T)
            v = np.real(vecs[:, np.argmin(np.abs(vals - 1.0))])
            pi = v / v.sum()
        else:
            pi = np.asarray(self.pi, dtype=float)
        if np.any(np.abs(pi @ P - pi) > 1e-9) or abs(pi.sum() - 1.0) > 1e-9:
            raise ValueError("pi is not stationary for P")
        object.__setattr__(self, "P", tuple(map(tuple, P.tolist())))
        object.__setattr__(self, "pi", tuple(pi.tolist()))

    def marginal(self):
        return tuple(as_fraction(x) for x in self.pi)


@dataclass(frozen=True)
class PeriodicOrbit:
    word: str

    def __post_init__(self):
        if not self.word:
            raise ValueError("periodic word must be nonempty")

    def marginal(self):
        size = max(2, 1 + max(letter_value(c) for c in self.word))
        n = len(self.word)
        return tuple(Fraction(sum(letter_value(c) == a for c in self.word), n) for a in range(size))


ShiftMeasure = (Bernoulli, Markov, PeriodicOrbit)


def _draw(m, length, rng, n=None):
    shape = (length,) if n is None else (n, length)
    if isinstance(m, Bernoulli):
        p = np.array([float(x) for x in m.p])
        return rng.choice(len(p), size=shape, p=p)
    if isinstance(m, Markov):
        P = np.array(m.P)
        cum = np.cumsum(P, axis=1)
        rows = 1 if n is None else n
        out = np.empty((rows, length), dtype=np.int64)
        out[:, 0] = rng.choice(len(P), size=rows, p=np.array(m.pi))
        u = rng.random((rows, length))
        for i in range(1, length):
            c = cum[out[:, i - 1]]
            out[:, i] = np.minimum((u[:, i:i + 1] > c).sum(axis=1), len(P) - 1)
        return out[0] if n is None else out
    if isinstance(m, PeriodicOrbit):
        word = np.array([letter_value(c) for c in m.word])
        phase = rng.integers(len(word), size=1 if n is None else n)
        idx = (phase[:, None] + np.arange(length)[None, :]) % len(word)
        out = word[idx]
        return out[0] if n is None else out
    raise TypeError(f"not a shift measure: {m!r}")


def _letters(row):
    return "".join(DIGITS[int(x)] for x in row)


def sample_window(m, length, seed):
    """Window of a sample from ``m`` with position 0 at length // 2."""
    if length < 1:
        raise ValueError("length must be >= 1")
    rng = np.random.default_rng(seed)
    return WindowWord.centered(_letters(_draw(m, length, rng)))


def sample_windows(m, length, n, seed):
    """(n, length) integer array of independent windows; one generator for the batch."""
    rng = np.random.default_rng(seed)
    return _draw(m, length, rng, n)
