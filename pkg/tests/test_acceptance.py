"""Acceptance suite: eight end-to-end criteria, one pass/fail line each.

Each test prints its verdict so `pytest -v -s tests/test_acceptance.py`
reads as a checklist.  Tolerances and sample sizes are fixed here and are
the contract of the repository; do not weaken them to make a failing
criterion pass.
"""

import math

import numpy as np
import pytest

from adicop import coding, filtration, graph, measures
from adicop.coding import CodedPoint
from adicop.entropy import (Semimetric, asymp_compare, scaling_curve_d,
                            scaling_curve_z, sigma_target_d, sigma_target_z)
from adicop.measures import (AtomicBase, BernoulliBase, CylinderTable,
                             MSigmaSampler, OdometerLevels, OmegaSigmaSampler,
                             PeriodicTypeSampler, ProductSampler, ToeplitzBase,
                             classify_periodic_type, make_aperiodic,
                             project_theta)


def report(n, label, ok):
    print(f"criterion {n} ({label}): {'pass' if ok else 'FAIL'}")
    assert ok


# ---------------------------------------------------------------------------

def test_criterion_1_structural_oracle():
    ok = True
    # counting identities, exhaustive through depth 4
    for n in range(5):
        ok &= graph.vertex_count(n, exhaustive=(n <= 4)) == 1 << (1 << n)
        v = graph.Vertex(n, np.zeros(1 << n, dtype=np.uint8))
        ok &= graph.paths_into(v, exhaustive=(n <= 4)) == 1 << n

    # coding round trip on every depth-3 path
    for x in graph.iter_paths(3):
        ok &= coding.psi_inv(coding.psi(x)) == x

    # group equivariance, exhaustive at depth 4: both sides act on the top
    # label by an index permutation, so checking the permutations against
    # all 2^16 labels at once is the full check
    idx = np.arange(16)
    labels = ((np.arange(1 << 16)[:, None] >> idx[None, :]) & 1).astype(np.uint8)
    for a in range(16):
        for g in range(16):
            ok &= np.array_equal(labels[:, idx ^ (a ^ g)],
                                 labels[:, (idx ^ g) ^ a])
            ok &= graph.alpha_digits(a ^ g, 4) == tuple(
                x ^ t for x, t in zip(graph.alpha_digits(a, 4),
                                      graph.alpha_digits(g, 4)))
    # plus the object-level diagram, exhaustive at depth 2
    for x in graph.iter_paths(2):
        for g in range(4):
            ok &= coding.psi(graph.kappa(g, x)) == coding.diag(g, coding.psi(x))

    # adic/shift diagram on 10^4 random points, zero failures
    rng = np.random.default_rng(0)
    L, N = 6, 8
    failures = 0
    for _ in range(10000):
        w = rng.integers(0, 2, 1 << N).astype(np.uint8)
        a = int(rng.integers(L, (1 << N) - 1 - L))
        p = CodedPoint(w, graph.alpha_digits(a, N))
        win = coding.lambda_window(p, L)
        win_next = coding.lambda_window(coding.adic_on_coded(p), L)
        if not np.array_equal(win.shift().bits, win_next.bits[:2 * L]):
            failures += 1
    ok &= failures == 0

    # adic order = reverse-lexicographic order over a full 2^10 tail class
    top = graph.Vertex(10, np.zeros(1 << 10, dtype=np.uint8))
    for v in range((1 << 10) - 1):
        x = graph.PathPrefix(top, graph.alpha_digits(v, 10))
        ok &= graph.reverse_lex_key(graph.adic_successor(x)) == v + 1

    report(1, "structural oracle", ok)


def test_criterion_2_kantorovich_bruteforce():
    rng = np.random.default_rng(1)

    class Table(Semimetric):
        def __init__(self, T):
            self.T = T

        def dist(self, x, y):
            return float(self.T[x, y])

    worst = 0.0
    for _ in range(200):
        T = rng.random((8, 8))
        rho = Table(T)
        t1 = filtration.OrbitTree(3, list(range(8)))
        t2 = filtration.OrbitTree(3, list(range(8)))
        dp = filtration.kantorovich(rho, t1, t2)
        bf = filtration.kantorovich_bruteforce(rho, t1, t2)
        worst = max(worst, abs(dp - bf))
    report(2, "kantorovich DP vs brute force", worst < 1e-12)


def test_criterion_3_orbit_anchors():
    ok = filtration.max_orbit_size(2, 2) == 4
    sizes = {m: filtration.max_orbit_size(m, 2) for m in (1, 2, 3, 4)}
    for m in (1, 2, 3):
        ok &= sizes[m + 1] <= 2 * sizes[m] ** 2
    h = {(m, r): filtration.lemma17_entropy_exact(m, r, 2, 0.1)
         for m in (2, 3) for r in (0, 1)}
    for r in (0, 1):
        ok &= 0.5 <= h[3, r] - h[2, r] <= 1.5
    for m in (2, 3):
        ok &= 0.5 <= h[m, 0] - h[m, 1] <= 1.5
    report(3, "orbit-size and entropy anchors", ok)


def test_criterion_4_group_action_growth():
    levels = range(3, 9)
    ok = True
    for sigma, target in [
            ((1,) * 8, [2 ** n for n in levels]),
            ((1, 0, 1, 0, 1, 0, 1, 0), [2 ** math.ceil(n / 2) for n in levels])]:
        curve = scaling_curve_d(MSigmaSampler(sigma, 8), levels,
                                eps_grid=(0.25,), n_samples=2000, seed=2)
        ok &= asymp_compare(curve.bits(0.25), target)["pass"]
    flat = scaling_curve_d(MSigmaSampler((0,) * 8, 8), levels,
                           eps_grid=(0.25,), n_samples=2000, seed=2)
    ok &= max(flat.bits(0.25)) <= 2.0
    report(4, "group-equipment entropy growth", ok)


def test_criterion_5_filtration_growth():
    levels = range(4, 10)
    ok = True
    for sigma in [(1,) * 9, (1, 0, 1, 0, 1, 0, 1, 0, 1)]:
        curve = filtration.filtration_scaling(sigma, 1, levels,
                                              eps=0.25, n_samples=256, seed=3)
        ok &= asymp_compare(curve.bits(),
                            sigma_target_d(sigma, levels))["pass"]
    # reduction equals the generic recursion exactly up to n = 6
    rng = np.random.default_rng(4)
    for n, k in [(4, 1), (5, 1), (6, 1), (5, 2), (6, 2)]:
        for _ in range(3):
            w1 = rng.integers(0, 2, 1 << n).astype(np.uint8)
            w2 = rng.integers(0, 2, 1 << n).astype(np.uint8)
            ok &= (filtration.kantorovich_rho_k_orbit(w1, w2, n, k)
                   == filtration.kantorovich_rho_k_reduced(w1, w2, n, k))
    report(5, "filtration entropy growth", ok)


def test_criterion_6_z_action_growth():
    scales = [4, 8, 16, 32, 64, 128, 256]
    ok = True
    for sigma in [(1,) * 8, (1, 0, 1, 0, 1, 0, 1, 0)]:
        sampler = OmegaSigmaSampler(sigma, 8, 8)
        curve = scaling_curve_z(sampler, scales, eps_grid=(0.25,),
                                n_samples=2000, seed=5)
        ok &= asymp_compare(curve.bits(0.25),
                            sigma_target_z(sigma, scales))["pass"]
    flat = scaling_curve_z(OmegaSigmaSampler((0,) * 8, 8, 8), scales,
                           eps_grid=(0.25,), n_samples=2000, seed=5)
    ok &= max(flat.bits(0.25)) <= 2.0
    report(6, "z-action entropy growth at dyadic times", ok)


# ---------------------------------------------------------------------------

def _samplers_for_relations():
    base8 = AtomicBase([0, 0, 0, 1, 0, 1, 1, 1], [0, 4])
    toep = ToeplitzBase()
    return {
        "product": ProductSampler(BernoulliBase(), 8),
        "periodic-2": PeriodicTypeSampler(2, base8, 8),
        "aperiodic": make_aperiodic(toep, OdometerLevels(toep.R),
                                    [0, 0, 0, 0]),
    }


def _relations_hold(sampler, rng, n=100000, L=6, tol=0.03):
    k = 2
    # stationarity under the 2^k-shift of the conditioned projection
    t0, _ = project_theta(sampler, k, 0, L, n, rng)
    t0s, _ = project_theta(sampler, k, 0, L, n, rng, shift=1 << k)
    if t0.tv(t0s) > tol:
        return False
    # one shift advances the fiber index by one
    t1s, _ = project_theta(sampler, k, 1, L, n, rng, shift=1)
    t2, _ = project_theta(sampler, k, 2, L, n, rng)
    if t1s.tv(t2) > tol:
        return False
    # half-half splitting into the two finer fibers
    ta, _ = project_theta(sampler, k + 1, 0, L, n, rng)
    tb, _ = project_theta(sampler, k + 1, 1 << k, L, n, rng)
    if t0.tv(CylinderTable.mixture([ta, tb], [0.5, 0.5])) > tol:
        return False
    # theta recursion: theta_k = mixture of theta_{k+1} and its 2^k-shift
    tbs, _ = project_theta(sampler, k + 1, 0, L, n, rng, shift=1 << k)
    return t0.tv(CylinderTable.mixture([ta, tbs], [0.5, 0.5])) <= tol


def test_criterion_7_measure_relations_and_classifier():
    rng = np.random.default_rng(6)
    ok = all(_relations_hold(s, rng) for s in _samplers_for_relations().values())

    for seed in range(5):
        s = _samplers_for_relations()
        r = np.random.default_rng(100 + seed)
        ok &= classify_periodic_type(
            s["product"], 4, 6, 100000, 0.03, r)["verdict"] == 0
        ok &= classify_periodic_type(
            s["periodic-2"], 4, 6, 100000, 0.03, r)["verdict"] == 2
        ok &= classify_periodic_type(
            s["aperiodic"], 4, 6, 100000, 0.03, r)["verdict"] == "aperiodic-up-to-4"
    report(7, "measure relations and classifier verdicts", ok)


def test_criterion_8_deterministic_inequalities():
    rng = np.random.default_rng(7)
    ok = True

    # paired-average vs all-pairs-average inequality on 10^4 random tuples
    for _ in range(10000):
        N = int(rng.integers(2, 8))
        xs = rng.random((N, 3))
        ys = rng.random((N, 3))
        D = np.abs(xs[:, None, :] - ys[None, :, :]).sum(axis=2)
        if np.trace(D) / N > 3 * D.mean() + 1e-12:
            ok = False
            break

    # pointwise Lipschitz bound on 10^3 random instances
    class L1(Semimetric):
        def __init__(self, scale):
            self.scale = scale

        def dist(self, x, y):
            return self.scale * float(np.abs(x - y).sum())

    class SumL1(Semimetric):
        def __init__(self, a, b):
            self.a, self.b = a, b

        def dist(self, x, y):
            return self.a.dist(x, y) + self.b.dist(x, y)

    for _ in range(1000):
        depth = int(rng.integers(1, 4))
        t1 = filtration.OrbitTree(depth, [rng.random(3)
                                          for _ in range(1 << depth)])
        t2 = filtration.OrbitTree(depth, [rng.random(3)
                                          for _ in range(1 << depth)])
        r1, r2 = L1(rng.uniform(0.2, 2)), L1(rng.uniform(0.2, 2))
        ok &= filtration.lipschitz_bound_check(r1, r2, SumL1(r1, r2), t1, t2)

    # semimetric axioms and homogeneity of the iteration on random triples
    rho = L1(1.0)
    for _ in range(100):
        a, b, c = (filtration.OrbitTree(3, [rng.random(3) for _ in range(8)])
                   for _ in range(3))
        kab = filtration.kantorovich(rho, a, b)
        ok &= abs(kab - filtration.kantorovich(rho, b, a)) < 1e-12
        ok &= kab <= (filtration.kantorovich(rho, a, c)
                      + filtration.kantorovich(rho, c, b) + 1e-12)
        ok &= abs(filtration.kantorovich(L1(2.0), a, b) - 2 * kab) < 1e-12

    report(8, "deterministic inequalities", ok)
