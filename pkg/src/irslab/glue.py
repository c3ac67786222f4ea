"""Gluing blocks along a binary sequence: volume-biased measures, chunk counts,
the covering obstruction for aperiodic patterns, and a chain-of-pants model.

Two block types N_0 and N_1 each have two boundary copies of a hypersurface S.
A pattern alpha in {0,1}^Z glues copies end to end.  If the glued manifold
covered a finite-volume quotient, the quotient would be a circle or a segment
of components, and the number of blocks in each maximal run ("chunk") would be
forced by volumes; a periodic word for alpha can then be read off.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import pantsurf
from .errors import UnsupportedMeasure
from .hyp2 import translation_length
from .symdyn.measures import (
    Bernoulli,
    Markov,
    PeriodicOrbit,
    WindowWord,
    as_fraction,
    sample_window,
    sample_windows,
)

CYCLE = "cycle"
SEGMENT = "segment"


@dataclass(frozen=True)
class BlockGeometry:
    vol0: Fraction
    vol1: Fraction
    vol_sigma: Fraction

    def __post_init__(self):
        for name in ("vol0", "vol1", "vol_sigma"):
            v = as_fraction(getattr(self, name))
            if v <= 0:
                raise ValueError(f"{name} must be positive")
            object.__setattr__(self, name, v)

    @classmethod
    def parse(cls, text):
        """'v0,v1,vs' with decimal or rational entries."""
        parts = [p.strip() for p in text.split(",")]
        if len(parts) != 3:
            raise ValueError("expected three volumes v0,v1,vs")
        return cls(*parts)

    def vol(self, label):
        return self.vol1 if label else self.vol0

    def to_json(self):
        return [str(self.vol0), str(self.vol1), str(self.vol_sigma)]


@dataclass(frozen=True)
class GluingWindow:
    alpha: WindowWord
    geometry: BlockGeometry

    def __post_init__(self):
        if set(self.alpha.letters) - {"0", "1"}:
            raise ValueError("gluing patterns are binary")


def _letters(alpha):
    if isinstance(alpha, GluingWindow):
        alpha = alpha.alpha
    return alpha.letters if isinstance(alpha, WindowWord) else str(alpha)


# --- volume-biased measure ------------------------------------------------------------


def nu_prime_weight(g, m):
    """P(alpha_0 = 1) once the measure is reweighted by the volume of the block at 0."""
    geom = g.geometry if isinstance(g, GluingWindow) else g
    if not isinstance(m, (Bernoulli, Markov, PeriodicOrbit)):
        raise UnsupportedMeasure(f"no closed-form marginal for {type(m).__name__}")
    marg = m.marginal()
    if len(marg) != 2:
        raise UnsupportedMeasure("gluing patterns need a binary measure")
    p0, p1 = marg
    w1 = p1 * geom.vol1
    return w1 / (p0 * geom.vol0 + w1)


def sample_nu_prime(g, m, length, seed):
    """Window drawn from the volume-reweighted measure by exact rejection sampling."""
    geom = g.geometry if isinstance(g, GluingWindow) else g
    top = max(geom.vol0, geom.vol1)
    ss = np.random.SeedSequence(seed)
    accept_rng = np.random.default_rng(ss.spawn(1)[0])
    tries = itertools.count()
    while True:
        w = sample_window(m, length, np.random.SeedSequence([seed, next(tries)]))
        a0 = w.at(0)
        if accept_rng.random() * top < geom.vol(a0):
            return w


def sample_nu_prime_batch(g, m, length, n, seed):
    """(n, length) array of independent reweighted windows; position 0 at length // 2."""
    geom = g.geometry if isinstance(g, GluingWindow) else g
    ratio = np.array([float(geom.vol0 / max(geom.vol0, geom.vol1)),
                      float(geom.vol1 / max(geom.vol0, geom.vol1))])
    rng = np.random.default_rng(seed)
    out = []
    have = 0
    while have < n:
        want = int(1.2 * (n - have) / ratio.min()) + 16
        rows = sample_windows(m, length, want, rng)
        keep = rng.random(want) < ratio[rows[:, length // 2]]
        out.append(rows[keep])
        have += int(keep.sum())
    return np.concatenate(out)[:n]


# --- chunks and covers ----------------------------------------------------------------


def chunks(alpha):
    """Run-length encoding [(label, run length), ...]."""
    s = _letters(alpha)
    return [(int(ch), len(list(grp))) for ch, grp in itertools.groupby(s)]


def decode_chunks(runs):
    return "".join(str(label) * n for label, n in runs)


def blocks_per_chunk(geom, vol_c, boundary_count, label, vol_boundary=None):
    """Number of blocks in a chunk covering a component C: 2 vol(S) vol(C) / (vol(N_label) vol(dC)).

    ``vol_boundary`` defaults to boundary_count * vol(S), i.e. each boundary
    piece of C is one copy of S.
    """
    if boundary_count not in (1, 2):
        raise ValueError("a component has one or two boundary pieces")
    vol_c = as_fraction(vol_c)
    if vol_c <= 0:
        raise ValueError("component volume must be positive")
    vb = boundary_count * geom.vol_sigma if vol_boundary is None else as_fraction(vol_boundary)
    return 2 * geom.vol_sigma * vol_c / (geom.vol(label) * vb)


@dataclass(frozen=True)
class Component:
    label: int
    vol_c: Fraction
    boundary_count: int

    def __post_init__(self):
        if self.label not in (0, 1):
            raise ValueError("labels are 0 or 1")
        object.__setattr__(self, "vol_c", as_fraction(self.vol_c))
        if self.vol_c <= 0:
            raise ValueError("component volume must be positive")
        if self.boundary_count not in (1, 2):
            raise ValueError("boundary count is 1 or 2")


@dataclass(frozen=True)
class CoverHypothesis:
    arrangement: str
    components: tuple

    def __post_init__(self):
        comps = tuple(c if isinstance(c, Component) else Component(*c) for c in self.components)
        object.__setattr__(self, "components", comps)
        n = len(comps)
        if self.arrangement == CYCLE:
            if n == 0:
                raise ValueError("a cycle needs a component")
            if any(c.boundary_count != 2 for c in comps):
                raise ValueError("cycle components have two boundary pieces")
            pairs = zip(comps, comps[1:] + comps[:1]) if n > 1 else []
        elif self.arrangement == SEGMENT:
            if n < 2:
                raise ValueError("a segment needs at least two components")
            ends = (comps[0].boundary_count, comps[-1].boundary_count)
            if ends != (1, 1) or any(c.boundary_count != 2 for c in comps[1:-1]):
                raise ValueError("segment ends have one boundary piece, interior components two")
            pairs = zip(comps, comps[1:])
        else:
            raise ValueError(f"unknown arrangement {self.arrangement!r}")
        for a, b in pairs:
            if a.label == b.label:
                raise ValueError("labels must alternate")

    def to_json(self):
        return {"arrangement": self.arrangement,
                "components": [[c.label, str(c.vol_c), c.boundary_count] for c in self.components]}


def component_counts(h, geom):
    return [blocks_per_chunk(geom, c.vol_c, c.boundary_count, c.label) for c in h.components]


def infer_period(h, geom):
    """Cyclic word forced by the hypothesis, or None when some block count is not a positive integer."""
    counts = component_counts(h, geom)
    if any(n.denominator != 1 or n <= 0 for n in counts):
        return None
    runs = [(c.label, int(n)) for c, n in zip(h.components, counts)]
    if h.arrangement == SEGMENT:
        # there and back, each endpoint run once
        runs = runs + runs[-2:0:-1]
    return decode_chunks(runs)


def contains_periodic(word, alpha):
    """Whether the window alpha is a factor of word^infinity."""
    s = _letters(alpha)
    reps = word * (len(s) // len(word) + 2)
    return s in reps


def cover_consistent(alpha, h, geom):
    word = infer_period(h, geom)
    return word is not None and contains_periodic(word, alpha)


def component_volume(geom, label, count, boundary_count):
    """Volume of C making blocks_per_chunk equal to ``count``."""
    return Fraction(count) * geom.vol(label) * boundary_count * geom.vol_sigma / (2 * geom.vol_sigma)


def hypothesis_from_runs(arrangement, runs, geom):
    n = len(runs)
    comps = []
    for i, (label, count) in enumerate(runs):
        bc = 1 if arrangement == SEGMENT and i in (0, n - 1) else 2
        comps.append(Component(label, component_volume(geom, label, count, bc), bc))
    return CoverHypothesis(arrangement, tuple(comps))


def hypothesis_from_word(word, geom):
    """Cycle hypothesis induced by a periodic word, rotated to start at a run boundary."""
    if len(set(word)) == 1:
        return hypothesis_from_runs(CYCLE, [(int(word[0]), len(word))], geom)
    k = next(i for i in range(len(word)) if word[i] != word[i - 1])
    return hypothesis_from_runs(CYCLE, chunks(word[k:] + word[:k]), geom)


@dataclass(frozen=True)
class CoverSearchResult:
    hypothesis: CoverHypothesis | None
    word: str | None
    n_hypotheses: int
    max_components: int
    max_count: int

    def budget(self):
        return {"maxComponents": self.max_components, "maxCount": self.max_count,
                "hypothesesInSpace": self.n_hypotheses}


def _hypothesis_space_size(K, C):
    # cycles: one component or an even number; segments: 2..K components; two start labels
    total = 0
    for m in range(1, K + 1):
        if m == 1 or m % 2 == 0:
            total += 2 * C ** m if m > 1 else 2 * C
        if m >= 2:
            total += 2 * C ** m
    return total


def _cyclic_run_patterns(m, arrangement):
    """Index pattern of the periodic run sequence: positions in the component list."""
    if arrangement == CYCLE:
        return list(range(m))
    return list(range(m)) + list(range(m - 2, 0, -1))


def _solve_runs(runs, pattern, m, labels, C):
    """Component counts compatible with alpha's runs when aligned to the periodic run pattern.

    ``runs`` are alpha's runs; the first and last may be truncated by the window.
    Returns one assignment of counts (dict index -> count) or None.
    """
    P = len(pattern)
    n = len(runs)
    for phase in range(P):
        need = {}
        ok = True
        for r, (label, length) in enumerate(runs):
            idx = pattern[(phase + r) % P]
            if labels[idx] != label:
                ok = False
                break
            truncated = r == 0 or r == n - 1
            if truncated:
                lo = need.get(idx, (0, C))[0]
                need[idx] = (max(lo, length), need.get(idx, (0, C))[1])
            else:
                lo, hi = need.get(idx, (0, C))
                if not lo <= length <= hi:
                    ok = False
                    break
                need[idx] = (length, length)
            lo, hi = need[idx]
            if lo > hi or lo > C:
                ok = False
                break
        if not ok:
            continue
        counts = {i: max(1, need.get(i, (1, C))[0]) for i in range(m)}
        return counts
    return None


def find_cover(alpha, geom, max_components=8, max_count=16):
    """Exhaustive search over cycle and segment hypotheses with <= K components and counts <= C.

    Runs of alpha strictly inside the window pin the count of the component
    they are aligned with; the two end runs only give lower bounds.  Among
    consistent hypotheses the one with fewest components wins, cycles before
    segments, then the lexicographically least word.
    """
    runs = chunks(alpha)
    K, C = max_components, max_count
    best = None
    if len(runs) == 1:
        # a constant window sits inside a one-component cycle of any count
        h = hypothesis_from_runs(CYCLE, [(runs[0][0], 1)], geom)
        return CoverSearchResult(h, infer_period(h, geom), _hypothesis_space_size(K, C), K, C)
    for m in range(1, K + 1):
        for arrangement in (CYCLE, SEGMENT):
            if arrangement == CYCLE and m > 1 and m % 2:
                continue
            if arrangement == SEGMENT and m < 2:
                continue
            for first in (0, 1):
                labels = [(first + i) % 2 for i in range(m)]
                pattern = _cyclic_run_patterns(m, arrangement)
                counts = _solve_runs(runs, pattern, m, labels, C)
                if counts is None:
                    continue
                h = hypothesis_from_runs(arrangement, [(labels[i], counts[i]) for i in range(m)], geom)
                word = infer_period(h, geom)
                if word is None or not contains_periodic(word, alpha):
                    continue
                key = (m, arrangement != CYCLE, word)
                if best is None or key < best[0]:
                    best = (key, h, word)
        if best is not None:
            break
    space = _hypothesis_space_size(K, C)
    if best is None:
        return CoverSearchResult(None, None, space, K, C)
    return CoverSearchResult(best[1], best[2], space, K, C)


def brute_force_cover(alpha, geom, max_components, max_count):
    """Plain enumeration of every hypothesis in the grid; slow, for cross-checking find_cover."""
    hits = []
    for m in range(1, max_components + 1):
        for arrangement in (CYCLE, SEGMENT):
            if arrangement == CYCLE and m > 1 and m % 2:
                continue
            if arrangement == SEGMENT and m < 2:
                continue
            for first in (0, 1):
                labels = [(first + i) % 2 for i in range(m)]
                for counts in itertools.product(range(1, max_count + 1), repeat=m):
                    h = hypothesis_from_runs(arrangement, list(zip(labels, counts)), geom)
                    if cover_consistent(alpha, h, geom):
                        hits.append(h)
    return hits


# --- chain realization ----------------------------------------------------------------


@dataclass(frozen=True)
class ChainRealization:
    group: pantsurf.SurfaceGroupApprox
    alpha: str
    block_lengths: tuple
    sigma: float

    def internal_curve(self, i):
        """Internal curve of block i (the cuff shared by its two pants)."""
        return self.group.cuff(2 * i, 1)


def chain_tree(n_pants, center=None):
    return pantsurf.TreeSpec.path(n_pants, center)


def chain_fn(alpha, L0, L1, sigma, twists=None):
    """Edge data for a path of pants: block a is (sigma, L_a, sigma) then (L_a, sigma, sigma).

    Pants j has cuff 0 on the left, cuff 1 on the right and cuff 2 free.
    """
    s = _letters(alpha)
    n = 2 * len(s)
    lengths, tw = [sigma], [0.0]
    for j in range(n):
        a = int(s[j // 2])
        right = (L1 if a else L0) if j % 2 == 0 else sigma
        lengths.extend([right, sigma])
        tw.extend([0.0, 0.0])
    if twists is not None:
        tw = [float(t) % 1.0 for t in twists]
    return pantsurf.FNAssignment(tuple(float(x) for x in lengths), tuple(tw))


def realize_chain(alpha, L0=1.0, L1=2.0, sigma=4.0, seed=None, center_block=None, twists=None):
    """Chain of two-pants blocks glued left to right along alpha, zero twists unless given.

    ``seed`` only matters when ``twists == 'random'``.
    """
    s = _letters(alpha)
    if not s or set(s) - {"0", "1"}:
        raise ValueError("alpha must be a nonempty binary word")
    for v in (L0, L1, sigma):
        if not v > 0:
            raise ValueError("lengths must be positive")
    n_pants = 2 * len(s)
    center = 2 * (len(s) // 2 if center_block is None else center_block)
    tree = chain_tree(n_pants, center)
    if isinstance(twists, str) and twists == "random":
        twists = np.random.default_rng(seed).random(len(tree.edges)).tolist()
    fn = chain_fn(s, L0, L1, sigma, twists)
    g = pantsurf.build_group(tree, fn)
    return ChainRealization(g, s, (float(L0), float(L1)), float(sigma))


def close_chain(chain, twist=0.0):
    """Glue the right end of the chain back onto its left end (a periodic closing)."""
    g = chain.group
    last = g.tree.n_vertices - 1
    closed = pantsurf.close_up(g, [((last, 1), (0, 0), twist)])
    return ChainRealization(closed, chain.alpha, chain.block_lengths, chain.sigma)


def internal_lengths_ok(chain, tol=1e-9):
    out = []
    for i, a in enumerate(chain.alpha):
        want = chain.block_lengths[int(a)]
        out.append(abs(translation_length(chain.internal_curve(i)) - want) <= tol * max(1.0, want))
    return all(out)


def period_of(word):
    """Smallest p with word = u^(len/p)."""
    n = len(word)
    for p in range(1, n + 1):
        if n % p == 0 and word[:p] * (n // p) == word:
            return p
    return n
