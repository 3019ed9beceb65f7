import math
from collections import Counter

import numpy as np
import pytest

from growgraph.errors import InvalidInputError
from growgraph.exact_dist_service import exact_dist_service
from growgraph.growth_service import growth_service
from growgraph.kernel_service import kernel_service
from growgraph.measure_service import measure_service
from growgraph.schemas import ConstructionSpec, KernelPoint
from growgraph.stats_service import stats_service


def P(s, t):
    return KernelPoint(s=s, t=t)


def test_eval_W_examples():
    assert kernel_service.eval_W(P(0.3, 0.1), P(0.8, 0.9)) == 0.8
    assert kernel_service.eval_W(P(0.3, 0.9), P(0.8, 0.1)) == 0.3
    assert kernel_service.eval_W(P(0.3, 0.5), P(0.8, 0.5)) == 0.0


def test_eval_W_is_symmetric(rng):
    for s1, t1, s2, t2 in rng.random((200, 4)):
        a, b = P(s1, t1), P(s2, t2)
        assert kernel_service.eval_W(a, b) == kernel_service.eval_W(b, a)


def test_kernel_row_agrees_with_eval_W(rng):
    s, t = rng.random(6), rng.random(6)
    for i in range(6):
        row = kernel_service.kernel_row(s, t, i)
        for j in range(6):
            assert row[j] == kernel_service.eval_W(P(s[i], t[i]), P(s[j], t[j]))


def test_eval_W_nu_examples(rng):
    uniform = measure_service.uniform()
    for s1, t1, s2, t2 in rng.random((50, 4)):
        a, b = P(s1, t1), P(s2, t2)
        assert kernel_service.eval_W_nu(uniform, a, b) == kernel_service.eval_W(a, b)
        assert kernel_service.eval_W_nu(measure_service.point_mass(0.35), a, b) == 0.35
    assert kernel_service.eval_W_nu(measure_service.two_point(0.3), P(0.5, 0.2), P(0.8, 0.7)) == 1.0


def test_threshold_kernel_examples():
    for p in (0.1, 0.5, 0.9):
        assert kernel_service.eval_threshold_kernel(p, 1.0, 1.0) == 1
    assert kernel_service.eval_threshold_kernel(0.5, 0.2, 0.2) == 0
    assert kernel_service.eval_threshold_kernel(0.5, 0.9, 0.1) == 1
    assert kernel_service.eval_threshold_kernel(0.5, 0.5, 0.5) == 1


def test_threshold_kernel_is_the_quadrilateral(rng):
    """Away from its boundary the kernel is 1 exactly above the two edges through (1-p, 1-p)."""
    for p in (0.2, 0.5, 0.7):
        q = 1.0 - p
        for x, y in rng.random((500, 2)):
            lo, hi = min(x, y), max(x, y)
            if hi <= q:
                inside = False
            else:
                # segment from (0, 1) to (q, q), and its mirror image
                inside = hi - q > (q - lo) * p / q if lo <= q else True
            if abs(hi - q - (q - lo) * p / q) < 1e-9:
                continue
            assert kernel_service.eval_threshold_kernel(p, x, y) == int(inside)


def test_threshold_kernel_degenerate_p():
    assert kernel_service.eval_threshold_kernel(0.0, 0.9, 0.9) == 0
    assert kernel_service.eval_threshold_kernel(1.0, 0.1, 0.2) == 1
    with pytest.raises(InvalidInputError):
        kernel_service.eval_threshold_kernel(0.5, 1.2, 0.1)


def test_threshold_embedding_is_measure_preserving(rng):
    p, size = 0.3, 50_000
    points = [kernel_service.threshold_embedding(p, x) for x in rng.random(size)]
    ones = np.mean([pt.s == 1.0 for pt in points])
    assert abs(ones - p) < 4 * math.sqrt(p * (1 - p) / size)
    t = np.array([pt.t for pt in points])
    assert abs(t.mean() - 0.5) < 4 / math.sqrt(12 * size)


def test_sample_Gnw_trivial_cases(rng):
    assert kernel_service.sample_Gnw(1, measure_service.uniform(), rng).edge_count() == 0
    assert kernel_service.sample_Gnw(6, measure_service.point_mass(1.0), rng).edge_count() == 15
    assert kernel_service.sample_Gnw_nu(6, measure_service.point_mass(1.0), rng).edge_count() == 15
    assert kernel_service.sample_Gnw(6, measure_service.point_mass(0.0), rng).edge_count() == 0


def test_sample_Gnw_point_mass_is_gnp(rng):
    p, reps = 0.4, 20_000
    cells = Counter()
    for _ in range(reps):
        g = kernel_service.sample_Gnw(4, measure_service.point_mass(p), rng)
        cells[(g.has_edge(1, 2), g.has_edge(3, 4))] += 1
    expected = {(a, b): (p if a else 1 - p) * (p if b else 1 - p) for a in (False, True) for b in (False, True)}
    assert stats_service.chi_square_pvalue(cells, expected) > 1e-3


def test_sample_Gnw_nu_matches_edge_density(rng):
    nu = measure_service.two_point(0.3)
    reps = 5_000
    edges = [kernel_service.sample_Gnw_nu(5, nu, rng).edge_count() / 10 for _ in range(reps)]
    mean, stderr = stats_service.mc_mean_ci(edges)
    # P(edge) = E[theta of the later endpoint] = p
    assert abs(mean - 0.3) < 4 * stderr


def test_threshold_kernel_is_W_of_the_embedding(rng):
    for p in (0.25, 0.6):
        for x, y in rng.random((300, 2)):
            a, b = kernel_service.threshold_embedding(p, x), kernel_service.threshold_embedding(p, y)
            if a.t != b.t:
                assert kernel_service.eval_threshold_kernel(p, x, y) == kernel_service.eval_W(a, b)


def test_sample_Gnw_nu_has_the_unlabeled_law(rng):
    nu = measure_service.two_point(0.3)
    oracle = exact_dist_service.unlabeled_distribution(4, ConstructionSpec(construction="c2", nu=nu))
    counts = stats_service.class_counts(kernel_service.sample_Gnw_nu(4, nu, rng) for _ in range(20_000))
    assert set(counts) <= set(oracle)
    assert stats_service.chi_square_pvalue(counts, oracle) > 1e-3


def test_kernel_graph_differs_from_grown_graph_as_labelled_graphs():
    # the last grown vertex joins all or none of its predecessors; in G(n, W) it need not
    nu = measure_service.two_point(0.5)
    rng = np.random.default_rng(404)
    kernel_degrees = {kernel_service.sample_Gnw(4, nu, rng).degree(4) for _ in range(2000)}
    grown_degrees = {growth_service.grow_construction2(4, nu, rng)[0].degree(4) for _ in range(2000)}
    assert kernel_degrees & {1, 2}
    assert grown_degrees <= {0, 3}


def test_sample_Gnw_large_n_is_symmetric_and_loopless():
    g = kernel_service.sample_Gnw(300, measure_service.uniform(), np.random.default_rng(8))
    assert all(not (row >> i) & 1 for i, row in enumerate(g.rows))
    assert all(g.has_edge(u, v) and g.has_edge(v, u) for u, v in g.edges())
    # uniform nu: expected edge density 1/2
    assert abs(g.edge_count() / (300 * 299 / 2) - 0.5) < 0.1


def test_sample_Gnw_reads_one_uniform_per_pair_in_order():
    n = 6
    g = kernel_service.sample_Gnw(n, measure_service.uniform(), np.random.default_rng(12))
    rng = np.random.default_rng(12)
    xi, eta = rng.random(n), rng.random(n)
    for i in range(1, n + 1):
        for j in range(i + 1, n + 1):
            w = kernel_service.eval_W(P(xi[i - 1], eta[i - 1]), P(xi[j - 1], eta[j - 1]))
            assert g.has_edge(i, j) == (rng.random() < w)
