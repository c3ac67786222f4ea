"""Finite windows onto discrete subgroups of PSL(2,R) and distances between them.

A window is the set of group elements of operator norm at most R reachable by
words of length at most W.  Two windows of the same radius are compared with a
Hausdorff distance in the max-entry metric (modulo sign), softened near the
norm sphere so elements drifting across it do not cause jumps.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import cayley, glue
from .errors import BudgetExceeded, RadiusMismatch
from .hyp2 import HPoint, Isometry, point_to_i, stack

DEDUP_TOL = 1e-9
SOFT_BAND = 1e-6
DEFAULT_BALL_BUDGET = 5_000_000


def operator_norm(M):
    """Largest singular value of each det-1 matrix in an (N, 2, 2) array."""
    M = np.asarray(M, dtype=float).reshape(-1, 2, 2)
    f2 = np.einsum("nij,nij->n", M, M)
    # s + 1/s = sqrt(f2 + 2) and s - 1/s = sqrt(f2 - 2); no overflow for large entries
    return (np.sqrt(f2 + 2.0) + np.sqrt(np.maximum(f2 - 2.0, 0.0))) / 2.0


def _sign_fix(M):
    flat = M.reshape(-1, 4)
    lead = flat[np.arange(len(flat)), np.argmax(np.abs(flat) > DEDUP_TOL, axis=1)]
    return M * np.where(lead < 0, -1.0, 1.0)[:, None, None]


def _dedup_sorted(M):
    """Canonical sign, drop elements within DEDUP_TOL (modulo sign) of an earlier one, sort."""
    M = _sign_fix(M)
    flat = M.reshape(-1, 4)
    key = np.abs(flat[:, 0])
    order = np.argsort(key, kind="stable")
    key, flat = key[order], flat[order]
    drop = np.zeros(len(flat), dtype=bool)
    hi = np.searchsorted(key, key + DEDUP_TOL, side="right")
    for i in range(len(flat)):
        if drop[i] or hi[i] <= i + 1:
            continue
        other = flat[i + 1:hi[i]]
        d = np.minimum(np.abs(other - flat[i]).max(axis=1), np.abs(other + flat[i]).max(axis=1))
        drop[i + 1:hi[i]] |= d <= DEDUP_TOL
    flat = flat[~drop]
    flat = flat[np.lexsort(np.round(flat / DEDUP_TOL).T[::-1])]
    return flat.reshape(-1, 2, 2)


@dataclass(frozen=True)
class BallSet:
    mats: np.ndarray      # (N, 2, 2), canonical sign, sorted
    radius: float
    depth: int

    def __len__(self):
        return len(self.mats)

    @property
    def elements(self):
        return [Isometry(*m.ravel()) for m in self.mats]

    def norms(self):
        return operator_norm(self.mats)

    def issubset(self, other, tol=DEDUP_TOL):
        if len(self) == 0:
            return True
        return bool(np.all(_pair_dist(self.mats, other.mats).min(axis=1) <= tol))


def ball_set(gens, R, W, prune_norm=None, budget=DEFAULT_BALL_BUDGET):
    """Distinct elements of norm <= R given by words of length <= W in ``gens``.

    With ``prune_norm`` only words of norm <= prune_norm are extended, which
    keeps high-rank groups tractable at the cost of missing elements whose
    every spelling passes through a larger prefix.
    """
    if not R > 0:
        raise ValueError("R must be positive")
    if W < 1:
        raise ValueError("W must be >= 1")
    keep = None if prune_norm is None else (lambda level: operator_norm(level.mats) <= prune_norm)
    found = [np.eye(2)[None]]
    for level in cayley.levels(list(gens), W, budget=budget, keep=keep):
        found.append(level.mats[operator_norm(level.mats) <= R])
    return BallSet(_dedup_sorted(np.concatenate(found)), float(R), int(W))


def _pair_dist(X, Y):
    """Max-entry distance modulo sign between every row of X and every row of Y."""
    x = X.reshape(-1, 1, 4)
    y = Y.reshape(1, -1, 4)
    return np.minimum(np.abs(x - y).max(axis=2), np.abs(x + y).max(axis=2))


def _directed(S1, S2, chunk=2048):
    if len(S1) == 0:
        return 0.0
    # phi is 1-Lipschitz for the max-entry metric since |norm(x) - norm(y)| <= 2 maxdist(x, y)
    rho = S1.radius * (1.0 - SOFT_BAND)
    phi = np.maximum(0.0, (rho - S1.norms()) / 2.0)
    if len(S2) == 0:
        return float(phi.max())
    out = 0.0
    for i in range(0, len(S1), chunk):
        d = _pair_dist(S1.mats[i:i + chunk], S2.mats).min(axis=1)
        out = max(out, float(np.minimum(d, phi[i:i + chunk]).max()))
    return out


def proxy_distance(S1, S2):
    """Softened symmetric Hausdorff distance between two windows of equal radius."""
    if abs(S1.radius - S2.radius) > 1e-12 * max(1.0, S1.radius):
        raise RadiusMismatch(f"radii {S1.radius} and {S2.radius} differ")
    return max(_directed(S1, S2), _directed(S2, S1))


def conjugate(gens, g):
    """g x g^-1 for each generator x."""
    gi = g.inverse()
    return [g @ x @ gi for x in gens]


def centered(gens, base):
    """Conjugate so that ``base`` moves to i."""
    return conjugate(gens, point_to_i(base))


# --- limit-set density ----------------------------------------------------------------


def _angles(M):
    """Disk-model angle of each g(i), seen from the center."""
    a, b, c, d = M[:, 0, 0], M[:, 0, 1], M[:, 1, 0], M[:, 1, 1]
    z = (a * 1j + b) / (c * 1j + d)
    return np.mod(np.angle((z - 1j) / (z + 1j)), 2 * np.pi)


def _max_gap(theta):
    t = np.sort(np.asarray(theta))
    if len(t) == 0:
        return 2 * np.pi
    gaps = np.diff(np.concatenate([t, [t[0] + 2 * np.pi]]))
    return float(gaps.max())


def orbit_directions(gens, base, W, budget=cayley.DEFAULT_WORD_BUDGET * 8, chunk=1 << 18):
    """Boundary angles from ``base`` towards every g(base), g a nontrivial word of length <= W.

    Orbit points that coincide with the base (elliptic or trivial words) carry
    no direction and are skipped.
    """
    if W < 1:
        raise ValueError("W must be >= 1")
    gens = centered(list(gens), base if isinstance(base, HPoint) else HPoint(*base))
    n_letters = 2 * len(gens)
    total = cayley.reduced_word_count(len(gens), W)
    if total > budget:
        raise BudgetExceeded(f"{total} words exceed budget {budget}", total, budget)
    L = cayley.letter_matrices(gens)
    out = []

    def add(M):
        f2 = np.einsum("nij,nij->n", M, M)
        M = M[f2 > 2.0 + 1e-9]
        out.append(_angles(M))

    last = None
    for level in cayley.levels(gens, W - 1, budget=budget) if W > 1 else []:
        add(level.mats)
        last = level
    if last is None:
        add(L)
    else:
        # the final level is only needed for its angles, so build it in slices
        words, mats = last.words, last.mats
        for x in range(n_letters):
            ok = words[:, -1] != (x ^ 1)
            sub = mats[ok]
            for i in range(0, len(sub), chunk):
                add(sub[i:i + chunk] @ L[x])
    return np.concatenate(out) if out else np.empty(0)


def direction_density(gens, base, W, budget=cayley.DEFAULT_WORD_BUDGET * 8):
    """Largest angular gap (radians) between orbit directions of words of length <= W."""
    return _max_gap(orbit_directions(gens, base, W, budget))


def density_curve(gens, base, Ws, budget=cayley.DEFAULT_WORD_BUDGET * 8):
    return [(W, direction_density(gens, base, W, budget)) for W in Ws]


# --- lattice-limit experiment ---------------------------------------------------------


@dataclass(frozen=True)
class LatticeLimitPoint:
    k: int
    distance: float
    n_closed: int
    n_open: int


def _chain_ball(chain, R, W, prune_norm, budget):
    return ball_set(chain.group.generators, R, W, prune_norm=prune_norm, budget=budget)


def closed_chain(word, k, L0=1.0, L1=2.0, sigma=2.0, phase=0):
    """Chain of k copies of ``word`` glued into a cycle, centered on block ``phase``."""
    alpha = word * k
    chain = glue.realize_chain(alpha, L0, L1, sigma, center_block=(len(word) * (k // 2) + phase))
    return glue.close_chain(chain)


def open_chain(word, reps, L0=1.0, L1=2.0, sigma=2.0, phase=0):
    """Long open chain of ``word`` repeated, centered on block ``phase`` of the middle period."""
    return glue.realize_chain(word * reps, L0, L1, sigma, center_block=(len(word) * (reps // 2) + phase))


def lattice_limit_experiment(word="0", ks=(1, 2, 4, 8, 16), R=5.0, W=6, L0=1.0, L1=2.0, sigma=2.0,
                             reps=None, phase=0, prune_norm=None, budget=DEFAULT_BALL_BUDGET):
    """Distance between the window of each period-k closing and that of a long open chain.

    Both groups are built with the same block sitting at the base pants, so
    near the base their generators coincide and only the closing letter and the
    far ends differ.
    """
    prune = R * R if prune_norm is None else prune_norm
    reps = reps if reps is not None else 2 * max(ks) + 4
    far = _chain_ball(open_chain(word, reps, L0, L1, sigma, phase), R, W, prune, budget)
    out = []
    for k in ks:
        near = _chain_ball(closed_chain(word, k, L0, L1, sigma, phase), R, W, prune, budget)
        out.append(LatticeLimitPoint(int(k), proxy_distance(near, far), len(near), len(far)))
    return out


def curve_nonincreasing(curve, noise=1e-6):
    d = [p.distance for p in curve]
    return all(b <= a + noise for a, b in zip(d, d[1:]))


def curve_to_csv(rows, header):
    lines = [",".join(header)]
    lines += [",".join(repr(x) if isinstance(x, float) else str(x) for x in r) for r in rows]
    return "\n".join(lines) + "\n"


def group_from_json(obj):
    """Generators from a {"generators": [[a, b, c, d], ...]} document."""
    gens = obj["generators"] if isinstance(obj, dict) else obj
    return [Isometry.from_json(g) for g in gens]


def stack_elements(S):
    return stack(S.elements)
