"""Level-by-level enumeration of reduced words in a finitely generated matrix group.

Letters are encoded as integers: ``2*j`` is generator ``j`` and ``2*j + 1`` its
inverse, so the inverse of a letter ``x`` is ``x ^ 1``.  Matrices are kept in
batched (N, 2, 2) numpy arrays and multiplied as they are; signs are left
alone since only |trace| and norms are read off.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import BudgetExceeded
from .hyp2 import stack

DEFAULT_WORD_BUDGET = 2_000_000


def letter_matrices(gens):
    """(2r, 2, 2) array holding each generator followed by its inverse."""
    G = stack(gens)
    inv = np.empty_like(G)
    inv[:, 0, 0] = G[:, 1, 1]
    inv[:, 1, 1] = G[:, 0, 0]
    inv[:, 0, 1] = -G[:, 0, 1]
    inv[:, 1, 0] = -G[:, 1, 0]
    out = np.empty((2 * len(G), 2, 2))
    out[0::2] = G
    out[1::2] = inv
    return out


@dataclass
class Level:
    length: int
    words: np.ndarray      # (N, length) letters
    mats: np.ndarray       # (N, 2, 2) products, left to right


def reduced_word_count(n_gens, W):
    """Number of nontrivial reduced words of length <= W on n_gens free generators."""
    k = 2 * n_gens
    return sum(k * (k - 1) ** (n - 1) for n in range(1, W + 1)) if k else 0


def levels(gens, W, budget=DEFAULT_WORD_BUDGET, keep=None):
    """Yield reduced words of length 1..W level by level.

    ``keep(level)`` may return a boolean mask restricting which words are
    extended to the next level; all generated words are still yielded.  The
    running total of generated words is checked against ``budget`` before each
    level is materialised.
    """
    L = letter_matrices(gens)
    n_letters = len(L)
    if n_letters == 0 or W < 1:
        return
    words = np.arange(n_letters, dtype=np.int32)[:, None]
    mats = L.copy()
    total = n_letters
    if total > budget:
        raise BudgetExceeded(f"{total} words exceed budget {budget}", total, budget)
    level = Level(1, words, mats)
    for n in range(1, W + 1):
        yield level
        if n == W:
            break
        mask = keep(level) if keep is not None else None
        if mask is not None:
            words, mats = level.words[mask], level.mats[mask]
        else:
            words, mats = level.words, level.mats
        if len(words) == 0:
            break
        total += len(words) * (n_letters - 1)
        if total > budget:
            raise BudgetExceeded(f"{total} words exceed budget {budget}", total, budget)
        last = words[:, -1]
        # every letter except the inverse of the last one
        nxt = np.arange(n_letters, dtype=np.int32)[None, :].repeat(len(words), axis=0)
        ok = nxt != (last[:, None] ^ 1)
        parent = np.nonzero(ok)[0]
        letters = nxt[ok]
        # no determinant renormalisation: for large entries the computed
        # determinant is noisier than the trace it would rescale
        new_mats = mats[parent] @ L[letters]
        new_words = np.concatenate([words[parent], letters[:, None]], axis=1)
        level = Level(n + 1, new_words, new_mats)


def word_to_string(word, names=None):
    out = []
    for x in word:
        j, inv = divmod(int(x), 2)
        name = names[j] if names else f"g{j}"
        out.append(name + ("^-1" if inv else ""))
    return " ".join(out)
