"""Subshifts cut out by families of sample words, and bounded periodic-point search.

Words are plain strings whose characters are base-36 digits, so letters 0-9
then a-z.  The window-L approximation of a family is the shift of finite type
whose allowed L-blocks are the length-L factors of the samples; it contains
the subshift of the family, so "no periodic point" verdicts transfer to it.
"""

from __future__ import annotations

from dataclasses import dataclass

DIGITS = "0123456789abcdefghijklmnopqrstuvwxyz"


def letter_value(ch):
    v = DIGITS.find(ch.lower())
    if v < 0:
        raise ValueError(f"not a base-36 letter: {ch!r}")
    return v


@dataclass(frozen=True)
class SubshiftFamily:
    alphabet_size: int
    samples: tuple

    def __post_init__(self):
        if not 2 <= self.alphabet_size <= len(DIGITS):
            raise ValueError(f"alphabet size must be in [2, {len(DIGITS)}]")
        samples = tuple(str(w) for w in self.samples)
        for w in samples:
            if not w:
                raise ValueError("samples must be nonempty")
            if any(letter_value(c) >= self.alphabet_size for c in w):
                raise ValueError(f"sample {w!r} uses letters outside the alphabet")
        object.__setattr__(self, "samples", samples)

    @classmethod
    def of(cls, samples, alphabet_size=None):
        samples = tuple(samples)
        if alphabet_size is None:
            alphabet_size = max(2, 1 + max(letter_value(c) for w in samples for c in w))
        return cls(alphabet_size, samples)

    def to_json(self):
        return list(self.samples)


def factor_set(fam, L):
    if L < 1:
        raise ValueError("L must be >= 1")
    return {w[i:i + L] for w in fam.samples for i in range(len(w) - L + 1)}


def admits(w, fam):
    return any(w in s for s in fam.samples)


def window_graph(fam, L):
    """Successor map on (L-1)-blocks whose edges are the admissible L-blocks."""
    succ = {}
    for block in sorted(factor_set(fam, L)):
        succ.setdefault(block[:-1], []).append(block[1:])
        succ.setdefault(block[1:], [])
    return succ


def _shortest_cycle(succ):
    best = None
    for start in succ:
        # BFS back to start
        dist = {start: 0}
        frontier = [start]
        depth = 0
        found = None
        while frontier and found is None:
            depth += 1
            if best is not None and depth >= best:
                break
            nxt = []
            for u in frontier:
                for v in succ[u]:
                    if v == start:
                        found = depth
                        break
                    if v not in dist:
                        dist[v] = depth
                        nxt.append(v)
                if found is not None:
                    break
            frontier = nxt
        if found is not None and (best is None or found < best):
            best = found
    return best


def _min_closed_walk(succ, start, p):
    """Lexicographically least letter sequence of a length-p closed walk at ``start``."""
    pred = {u: [] for u in succ}
    for u, vs in succ.items():
        for v in vs:
            pred[v].append(u)
    # back[k] = nodes with a walk of exactly k steps ending at start
    back = [{start}]
    for _ in range(p):
        back.append({u for v in back[-1] for u in pred[v]})
    if start not in back[p]:
        return None
    out = []
    node = start
    for remaining in range(p - 1, -1, -1):
        node = min(v for v in succ[node] if v in back[remaining])
        out.append(node[-1])
    return "".join(out)


def shortest_period(fam, L):
    """Length of the shortest cycle of the window-L graph, None if it is acyclic."""
    if L < 2:
        raise ValueError("L must be >= 2")
    return _shortest_cycle(window_graph(fam, L))


def find_periodic(fam, L, Pmax):
    """Shortest periodic word of period <= Pmax allowed by the window-L approximation.

    Returns the lexicographically least rotation of a shortest cycle, or None.
    None only says no periodic point of period <= Pmax survives at window L.
    """
    if L < 2:
        raise ValueError("L must be >= 2")
    if Pmax < 1:
        raise ValueError("Pmax must be >= 1")
    succ = window_graph(fam, L)
    p = _shortest_cycle(succ)
    if p is None or p > Pmax:
        return None
    words = (_min_closed_walk(succ, s, p) for s in succ)
    return min(w for w in words if w is not None)


def periodic_factors_ok(word, fam, L):
    """Every factor of length <= L of word^infinity is admitted by the family."""
    reps = word * (L // len(word) + 2)
    return all(admits(reps[i:i + n], fam) for n in range(1, L + 1) for i in range(len(word)))


def thue_morse(n):
    return "".join(str(bin(i).count("1") & 1) for i in range(n))


def thue_morse_family(lengths=(8, 16, 32, 64)):
    return SubshiftFamily(2, tuple(thue_morse(n) for n in lengths))
