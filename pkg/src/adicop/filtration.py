"""Dyadic filtration machinery.

An orbit tree of depth n lists the 2**n translates of a point by D_n,
leaf at position mask g holding the translate by g; the dyadic hierarchy
splits on the top mask bit, so the two children are the contiguous halves
of the leaf array.  The Kantorovich iteration of a leaf semimetric is the
cheapest hierarchy-preserving matching, computed by recursive child-swap
minimization; for the discrete metric on a finite alphabet it becomes the
orbit Hamming distance dist_m under the tree automorphism group.
"""

from __future__ import annotations

import math
from functools import lru_cache

import numpy as np

from .coding import CodedPoint, diag
from .entropy import Semimetric, greedy_cover_bits, _max_uncovered


# ---------------------------------------------------------------------------
# orbit trees

class OrbitTree:
    """Complete binary tree of depth n whose leaves are the D_n-translates
    of a point (or arbitrary objects); children split on the top mask bit."""

    def __init__(self, depth: int, leaves):
        leaves = list(leaves)
        if len(leaves) != 1 << depth:
            raise ValueError("leaf count must be 2**depth")
        self.depth = depth
        self.leaves = leaves

    @classmethod
    def of_point(cls, x: CodedPoint, n: int) -> "OrbitTree":
        return cls(n, [diag(g, x) for g in range(1 << n)])


def kantorovich(rho: Semimetric, c1: OrbitTree, c2: OrbitTree) -> float:
    """K_n[rho]: recursive child-swap minimization.

    Equals the min over all tree automorphisms of the average leaf distance
    because automorphisms factor into independent swaps per node (validated
    against the brute-force minimum for n <= 3).
    """
    if c1.depth != c2.depth:
        raise ValueError("depth mismatch")

    def rec(a, b):
        if len(a) == 1:
            return rho.dist(a[0], b[0])
        h = len(a) // 2
        straight = rec(a[:h], b[:h]) + rec(a[h:], b[h:])
        crossed = rec(a[:h], b[h:]) + rec(a[h:], b[:h])
        return 0.5 * min(straight, crossed)

    return rec(c1.leaves, c2.leaves)


def tree_automorphisms(n: int) -> list[np.ndarray]:
    """All leaf permutations induced by automorphisms of the depth-n binary
    tree; |T_n| = 2**(2**n - 1).  Exhaustive, n <= 3."""
    if n > 3:
        raise ValueError("exhaustive automorphism enumeration limited to n <= 3")
    if n == 0:
        return [np.zeros(1, dtype=np.int64)]
    subs = tree_automorphisms(n - 1)
    h = 1 << (n - 1)
    out = []
    for p0 in subs:
        for p1 in subs:
            for swap in (0, 1):
                # leaf g goes to child (top bit XOR swap), permuted inside
                left = p0 + (h if swap else 0)
                right = p1 + (0 if swap else h)
                out.append(np.concatenate([left, right]))
    return out


def kantorovich_bruteforce(rho: Semimetric, c1: OrbitTree, c2: OrbitTree) -> float:
    """Direct minimum over all tree automorphisms (oracle for the recursion)."""
    n = c1.depth
    best = math.inf
    leaves2 = c2.leaves
    for perm in tree_automorphisms(n):
        total = sum(rho.dist(x, leaves2[perm[j]])
                    for j, x in enumerate(c1.leaves))
        best = min(best, total / (1 << n))
    return best


class DiscreteMetric(Semimetric):
    def dist(self, x, y) -> float:
        return float(x != y)


def dist_m(w1, w2) -> float:
    """Orbit Hamming distance: fraction of mismatched leaves under the best
    tree automorphism.  Arguments are equal-length leaf symbol sequences."""
    w1, w2 = list(w1), list(w2)
    if len(w1) != len(w2):
        raise ValueError("leaf counts differ")
    m = len(w1).bit_length() - 1
    return kantorovich(DiscreteMetric(), OrbitTree(m, w1), OrbitTree(m, w2))


# ---------------------------------------------------------------------------
# vectorized Kantorovich for symbol trees

def kantorovich_pairs(sym1: np.ndarray, sym2: np.ndarray) -> np.ndarray:
    """dist_m between corresponding rows of two (P, 2**m) symbol arrays."""
    P, L = sym1.shape
    D = (sym1[:, :, None] != sym2[:, None, :]).astype(np.float32)
    while D.shape[1] > 1:
        a, b = D[:, 0::2, :], D[:, 1::2, :]
        straight = a[:, :, 0::2] + b[:, :, 1::2]
        crossed = a[:, :, 1::2] + b[:, :, 0::2]
        D = 0.5 * np.minimum(straight, crossed)
    return D[:, 0, 0].astype(np.float64)


def pairwise_dist_matrix(sym: np.ndarray) -> np.ndarray:
    """Full dist_m matrix between the rows of one (S, 2**m) symbol array."""
    S = sym.shape[0]
    iu, ju = np.triu_indices(S, k=1)
    vals = kantorovich_pairs(sym[iu], sym[ju])
    D = np.zeros((S, S))
    D[iu, ju] = vals
    D[ju, iu] = vals
    return D


# ---------------------------------------------------------------------------
# orbits of the automorphism group on labeled trees

ORBIT_ENUM_LIMIT = 1 << 20


def _canon_and_size(leaves: tuple) -> tuple:
    @lru_cache(maxsize=None)
    def rec(t: tuple):
        if len(t) == 1:
            return t, 1
        h = len(t) // 2
        c0, s0 = rec(t[:h])
        c1, s1 = rec(t[h:])
        if c0 == c1:
            return c0 + c1, s0 * s1
        if c0 < c1:
            return c0 + c1, 2 * s0 * s1
        return c1 + c0, 2 * s0 * s1
    return rec(tuple(leaves))


def orbit_canonical(leaves) -> tuple:
    return _canon_and_size(tuple(leaves))[0]


def orbit_size(leaves) -> int:
    return _canon_and_size(tuple(leaves))[1]


def _iter_configs(m: int, q: int, free_positions=None):
    L = 1 << m
    if free_positions is None:
        free_positions = list(range(L))
    base = [0] * L
    for code in range(q ** len(free_positions)):
        c = code
        for pos in free_positions:
            base[pos] = c % q
            c //= q
        yield tuple(base)


def max_orbit_size(m: int, q: int) -> int:
    """Exact maximal orbit cardinality of the tree automorphism group acting
    on Q^{D_m}; exhaustive enumeration."""
    if q ** (1 << m) > ORBIT_ENUM_LIMIT:
        raise ValueError("instance too large for exhaustive orbit enumeration")
    return max(orbit_size(cfg) for cfg in _iter_configs(m, q))


def invariant_configs(m: int, q: int, r: int) -> list[tuple]:
    """All configurations on D_m invariant under the subgroup generated by
    g_0, ..., g_{r-1}: values constant on its cosets."""
    if r > m:
        raise ValueError("r exceeds m")
    L = 1 << m
    step = 1 << r
    reps = list(range(0, L, step))
    out = []
    for base in _iter_configs(m - r, q):
        cfg = [0] * L
        for i, g in enumerate(reps):
            for h in range(step):
                cfg[g + h] = base[i]
        out.append(tuple(cfg))
    return out


EXACT_ENTROPY_LIMIT = 1 << 12


def lemma17_entropy_exact(m: int, r: int, q: int, eps: float) -> float:
    """Exact epsilon-entropy of (Q^{D_m}, dist_m, uniform on the invariant
    configurations).

    Valid when eps/2 is below the minimal positive dist_m value 2**-m:
    balls then cover exactly one automorphism-orbit each, orbits partition
    the space, and the optimal cover takes the largest orbits first.
    """
    if q ** (1 << (m - r)) > EXACT_ENTROPY_LIMIT:
        raise ValueError("instance too large for the exact covering oracle")
    if eps / 2 >= 2.0 ** -m:
        raise ValueError("exact oracle needs eps/2 below the distance quantum")
    classes = {}
    for cfg in invariant_configs(m, q, r):
        key = orbit_canonical(cfg)
        classes[key] = classes.get(key, 0) + 1
    sizes = sorted(classes.values(), reverse=True)
    total = sum(sizes)
    allow = _max_uncovered(eps, total)
    covered = 0
    balls = 0
    for s in sizes:
        if total - covered <= allow:
            break
        covered += s
        balls += 1
    return math.log2(max(balls, 1))


def lemma17_entropy(m: int, r: int, q: int, eps: float,
                    n_samples: int = 256, seed: int = 0) -> float:
    """Entropy of the invariant-configuration space: exact covering when the
    instance is small and eps is below the distance quantum, Monte Carlo
    block estimate otherwise."""
    if r == m:
        return math.log2(q) if eps / 2 < 1.0 else 0.0
    if (q ** (1 << (m - r)) <= EXACT_ENTROPY_LIMIT and eps / 2 < 2.0 ** -m):
        return lemma17_entropy_exact(m, r, q, eps)
    return lemma17_entropy_estimate(m, r, q, eps, n_samples, seed)


def sample_invariant_configs(m: int, r: int, q: int, n: int, rng) -> np.ndarray:
    """Uniform draws from the invariant configurations, as symbol rows."""
    base = rng.integers(0, q, size=(n, 1 << (m - r)))
    return np.repeat(base, 1 << r, axis=1)


def _split_entropy_bits(sym: np.ndarray, split_flags, eps: float,
                        terminal_depth: int = 3) -> float:
    """Block-additive covering estimate on symbol trees.

    split_flags[j] tells whether the level splitting on generator bit j is
    informative: at uninformative levels the two halves are identical and
    the iteration passes through them exactly; informative levels are
    treated as independent blocks and their estimates added (growth-class
    surrogate).  Depth <= terminal_depth instances use the exact pairwise
    Kantorovich values with greedy covering.
    """
    m = sym.shape[1].bit_length() - 1
    if m <= terminal_depth:
        return greedy_cover_bits(pairwise_dist_matrix(sym), eps)
    h = 1 << (m - 1)
    first, second = sym[:, :h], sym[:, h:]
    if not split_flags[m - 1]:
        if not np.array_equal(first, second):
            raise ValueError("level flagged as degenerate but halves differ")
        return _split_entropy_bits(first, split_flags, eps, terminal_depth)
    return (_split_entropy_bits(first, split_flags, eps, terminal_depth)
            + _split_entropy_bits(second, split_flags, eps, terminal_depth))


def lemma17_entropy_estimate(m: int, r: int, q: int, eps: float,
                             n_samples: int = 256, seed: int = 0) -> float:
    """Monte Carlo covering estimate for larger invariant-configuration
    instances; invariance makes the bottom r levels degenerate."""
    rng = np.random.default_rng(seed)
    sym = sample_invariant_configs(m, r, q, n_samples, rng)
    flags = [j >= r for j in range(m)]
    return _split_entropy_bits(sym, flags, eps)


# ---------------------------------------------------------------------------
# filtration scaling (representatives, reduction, curve)

def phi_representative(w: np.ndarray, n: int) -> np.ndarray:
    """The unique orbit member with vanishing first n digits: since the
    group flips digits and translates w jointly, the class of (w, alpha) is
    represented by (w translated by the digit mask, 0), i.e. by w itself
    when drawn with alpha = 0.  Input is the configuration row; output its
    restriction to D_n."""
    return w[: 1 << n]


def reduce_symbols(w_rows: np.ndarray, n: int, k: int) -> np.ndarray:
    """Leaf symbols of the reduced tree: position indexed by the span of
    g_k..g_{n-1}, symbol = the restriction of w to the corresponding coset
    of D_k, packed to an integer."""
    rows = w_rows[:, : 1 << n]
    S = rows.shape[0]
    blocks = rows.reshape(S, 1 << (n - k), 1 << k).astype(np.int64)
    return blocks @ (1 << np.arange(1 << k, dtype=np.int64))


class CutRhoKOnCoded(Semimetric):
    """rho_k on coded points (configurations on D_N with digits)."""

    def __init__(self, k: int):
        self.k = k

    def dist(self, x: CodedPoint, y: CodedPoint) -> float:
        mkk = 1 << self.k
        same = (np.array_equal(x.w[:mkk], y.w[:mkk])
                and x.alpha[:self.k] == y.alpha[:self.k])
        return 0.0 if same else 1.0


def kantorovich_rho_k_orbit(w1: np.ndarray, w2: np.ndarray, n: int, k: int) -> float:
    """Generic K_n[rho_k] between the orbit trees of two representatives
    (full depth-n trees of coded points)."""
    x = CodedPoint(w1[: 1 << n], (0,) * n)
    y = CodedPoint(w2[: 1 << n], (0,) * n)
    rho = CutRhoKOnCoded(k)
    return kantorovich(rho, OrbitTree.of_point(x, n), OrbitTree.of_point(y, n))


def kantorovich_rho_k_reduced(w1: np.ndarray, w2: np.ndarray, n: int, k: int) -> float:
    """K_n[rho_k] through the reduction: orbit Hamming distance between the
    depth-(n-k) trees over the alphabet of D_k-restrictions."""
    s1 = reduce_symbols(w1[None, :], n, k)[0]
    s2 = reduce_symbols(w2[None, :], n, k)[0]
    return dist_m(s1, s2)


def filtration_scaling(sigma, k: int, levels, eps: float = 0.25,
                       n_samples: int = 256, seed: int = 0):
    """Entropy curve of K_n[rho_k] across the representatives of the
    filtration elements, under m^sigma.

    Levels with sigma_j = 0 make the two halves of the reduced tree equal
    and pass through the iteration exactly; levels with sigma_j = 1 are
    split block-additively.
    """
    from .entropy import EntropyCurve
    from .dyadic import sigma_extend
    from .measures import MSigmaSampler

    levels = list(levels)
    n_max = max(levels)
    if min(levels) <= k:
        raise ValueError("levels must exceed the cut level k")
    sig = sigma_extend(sigma, n_max)
    rng = np.random.default_rng(seed)
    w = MSigmaSampler(sig, n_max).draw_w(n_samples, rng)
    curve = EntropyCurve()
    for n in levels:
        sym = reduce_symbols(w, n, k)
        flags = [bool(sig[k + j]) for j in range(n - k)]
        bits = _split_entropy_bits(sym, flags, eps)
        curve.add(n, eps, bits, n_samples, seed)
    return curve


# ---------------------------------------------------------------------------
# pointwise Lipschitz bound (proof form of the 3-factor inequality)

def all_pairs_average(rho: Semimetric, c1: OrbitTree, c2: OrbitTree) -> float:
    n = 1 << c1.depth
    return sum(rho.dist(x, y) for x in c1.leaves for y in c2.leaves) / (n * n)


def lipschitz_bound_check(rho1: Semimetric, rho2: Semimetric,
                          rho_dom: Semimetric, c1: OrbitTree,
                          c2: OrbitTree) -> bool:
    """K_n[rho_2] <= K_n[rho_1] + 3 * (all-pairs average of the dominating
    semimetric); exact inequality, no tolerance."""
    k1 = kantorovich(rho1, c1, c2)
    k2 = kantorovich(rho2, c1, c2)
    bound = all_pairs_average(rho_dom, c1, c2)
    return k2 <= k1 + 3 * bound + 1e-12
