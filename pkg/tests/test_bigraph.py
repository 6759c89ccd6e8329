import itertools
import math

import numpy as np
import pytest

from aramid.bigraph import (
    BipartiteRegularGraph,
    GammaTargetError,
    anneal_circulant_bipartite,
    check_degree_sum,
    check_expansion_lemma,
    check_mixing_lemma,
    circulant_bipartite,
    gamma,
    ramanujan_bound,
    random_regular_bipartite,
)


@pytest.fixture(scope="module")
def k33():
    return circulant_bipartite(3, [0, 1, 2])


@pytest.fixture(scope="module")
def cycle8():
    """The 8-cycle as a bipartite 2-regular graph on 4 + 4 vertices."""
    return circulant_bipartite(4, [0, 1])


def test_k33_forced_by_regularity():
    # Any simple 3-regular bipartite graph on 3+3 vertices is K33.
    g = random_regular_bipartite(3, 3, seed=9)
    x = g.biadjacency()
    assert np.array_equal(x, np.ones((3, 3), dtype=np.int64))


def test_determinism_same_seed():
    g1 = random_regular_bipartite(20, 4, seed=42)
    g2 = random_regular_bipartite(20, 4, seed=42)
    assert np.array_equal(g1.matchings, g2.matchings)


def test_degrees_and_edge_count():
    g = random_regular_bipartite(15, 5, seed=1)
    x = g.biadjacency()
    assert np.all(x.sum(axis=1) == 5) and np.all(x.sum(axis=0) == 5)
    assert g.num_edges == 75
    assert g.is_simple()


def test_edge_indexing_round_trip():
    g = random_regular_bipartite(12, 4, seed=2)
    for e in range(g.num_edges):
        u, v = g.edge_endpoints(e)
        assert e == u * g.delta + (e % g.delta)
        slot = g.cross_index[e]
        assert g.right_edges[v, slot] == e
    # every edge appears exactly once on the right side
    assert sorted(g.right_edges.reshape(-1).tolist()) == list(range(g.num_edges))


def test_gamma_k33_zero(k33):
    # X^T X = 3J has eigenvalues (9, 0, 0); dense eigensolver oracle.
    prof = gamma(k33)
    assert prof.gamma == pytest.approx(0.0, abs=1e-9)
    assert prof.lambda2 == pytest.approx(0.0, abs=1e-9)


def test_gamma_complete_bipartite_any_n():
    for n in (2, 5, 9):
        g = circulant_bipartite(n, range(n))
        assert gamma(g).gamma == pytest.approx(0.0, abs=1e-9)


def test_gamma_cycle8(cycle8):
    # cycle spectrum 2cos(2 pi k / 8): second largest = sqrt(2).
    prof = gamma(cycle8)
    assert prof.gamma == pytest.approx(math.sqrt(2) / 2, rel=1e-9)


def test_gamma_matches_dense_oracle_random():
    g = random_regular_bipartite(30, 6, seed=3)
    x = g.biadjacency().astype(float)
    ev = np.linalg.eigvalsh(x.T @ x)
    prof = gamma(g)
    assert prof.lambda2 == pytest.approx(float(ev[-2]), rel=1e-9)


def test_power_iteration_agrees_with_dense():
    from aramid.bigraph import _deflated_power_iteration

    g = random_regular_bipartite(40, 5, seed=4)
    x = g.biadjacency().astype(float)
    m = x.T @ x
    lam_dense = float(np.linalg.eigvalsh(m)[-2])
    lam_pi = _deflated_power_iteration(m, 25.0, 40, 1e-10, 50000)
    assert lam_pi == pytest.approx(lam_dense, rel=1e-6)


def test_random_graph_gamma_concentration():
    # random regular graphs land at or below the Ramanujan ratio at this density
    g = random_regular_bipartite(100, 36, seed=5)
    prof = gamma(g)
    assert prof.gamma < 0.35
    assert prof.gamma <= ramanujan_bound(36) + 0.02


def test_gamma_target_unreachable_reports_best():
    with pytest.raises(GammaTargetError) as exc:
        random_regular_bipartite(30, 4, seed=6, gamma_target=0.01, max_resamples=5)
    assert 0 < exc.value.best < 1


def test_annealed_circulant_hits_low_gamma():
    g = anneal_circulant_bipartite(100, 36, seed=7, gamma_target=0.22, iters=30000)
    assert gamma(g).gamma <= 0.22
    assert g.is_simple()


def test_mixing_lemma_all_ones(cycle8):
    ones = np.ones(4)
    lhs, b1, b2 = check_mixing_lemma(cycle8, ones, ones)
    assert lhs == pytest.approx(1.0)
    assert b1 == pytest.approx(1.0)
    assert b2 == pytest.approx(1.0)


def test_mixing_lemma_all_zeros(cycle8):
    zeros = np.zeros(4)
    lhs, b1, b2 = check_mixing_lemma(cycle8, zeros, zeros)
    assert lhs == 0.0 and b1 == 0.0 and b2 == 0.0


def test_mixing_lemma_exhaustive_cycle8(cycle8):
    # all chi in {0, 1/2, 1}^8, 3^8 cases
    vals = (0.0, 0.5, 1.0)
    for left in itertools.product(vals, repeat=4):
        for right in itertools.product(vals, repeat=4):
            check_mixing_lemma(cycle8, left, right)


def test_mixing_lemma_exhaustive_k33(k33):
    vals = (0.0, 0.5, 1.0)
    for left in itertools.product(vals, repeat=3):
        for right in itertools.product(vals, repeat=3):
            check_mixing_lemma(k33, left, right)


def test_mixing_lemma_rejects_out_of_range(cycle8):
    with pytest.raises(ValueError):
        check_mixing_lemma(cycle8, [2, 0, 0, 0], np.zeros(4))


def test_degree_sum_full_sets(k33):
    s, bound = check_degree_sum(k33, range(3), range(3))
    assert s == 2 * 3 * 3
    assert bound == pytest.approx(s)


def test_degree_sum_empty_right(k33):
    s, bound = check_degree_sum(k33, range(3), [])
    assert s == 0
    assert bound == pytest.approx(0.0)


def test_degree_sum_exhaustive():
    for g, n in ((circulant_bipartite(3, [0, 1, 2]), 3), (circulant_bipartite(4, [0, 1]), 4)):
        for smask in range(1 << n):
            for tmask in range(1 << n):
                if smask == 0 and tmask == 0:
                    continue
                left = [i for i in range(n) if smask >> i & 1]
                right = [i for i in range(n) if tmask >> i & 1]
                check_degree_sum(g, left, right)


def test_expansion_lemma_exhaustive_cycle8(cycle8):
    vals = (0.0, 0.5, 1.0)
    conforming = 0
    for left in itertools.product(vals, repeat=4):
        for right in itertools.product(vals, repeat=4):
            out = check_expansion_lemma(cycle8, left, right, delta_threshold=1.0)
            if out is not None:
                conforming += 1
    assert conforming > 0


def test_expansion_lemma_all_ones(cycle8):
    ones = np.ones(4)
    out = check_expansion_lemma(cycle8, ones, ones, delta_threshold=2.0)
    assert out is not None
    sqrt_ratio, bound = out
    assert sqrt_ratio == pytest.approx(1.0)
    assert bound <= 1.0 + 1e-12


def test_expansion_lemma_skips_zero_right(cycle8):
    assert check_expansion_lemma(cycle8, np.ones(4), np.zeros(4), 1.0) is None


def test_expansion_lemma_requires_positive_gamma(k33):
    with pytest.raises(ValueError):
        check_expansion_lemma(k33, np.ones(3), np.ones(3), 1.0)


def test_serialization_round_trip():
    g = random_regular_bipartite(10, 3, seed=8)
    obj = g.to_json()
    g2 = BipartiteRegularGraph.from_json(obj)
    assert np.array_equal(g.matchings, g2.matchings)
    assert g2.seed == 8


def test_rejects_disconnected():
    # two disjoint 4-cycles: matchings both map {0,1} to {0,1} and {2,3} to {2,3}
    m = np.array([[0, 1, 2, 3], [1, 0, 3, 2]])
    with pytest.raises(ValueError):
        BipartiteRegularGraph(m)


def test_rejects_non_permutation():
    with pytest.raises(ValueError):
        BipartiteRegularGraph(np.array([[0, 0, 1, 2]]))
