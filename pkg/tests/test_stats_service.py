import itertools
import math
from collections import Counter

import numpy as np
import pytest
from scipy.stats import kstest

from growgraph.errors import CostGuardError, InvalidInputError
from growgraph.exact_dist_service import exact_dist_service
from growgraph.graph_service import LabeledGraph
from growgraph.kernel_service import kernel_service
from growgraph.measure_service import measure_service
from growgraph.schemas import ConstructionSpec
from growgraph.stats_service import stats_service


def test_tv_distance_examples():
    p = {"a": 0.6, "b": 0.4}
    assert stats_service.tv_distance(p, p) == 0.0
    assert stats_service.tv_distance({"a": 1.0}, {"b": 1.0}) == 1.0
    assert stats_service.tv_distance(p, {"a": 0.5, "b": 0.5}) == pytest.approx(0.1)


def test_tv_distance_is_a_metric(rng):
    for _ in range(100):
        p, q, r = (dict(enumerate(rng.dirichlet(np.ones(6)))) for _ in range(3))
        assert stats_service.tv_distance(p, q) == stats_service.tv_distance(q, p)
        assert stats_service.tv_distance(p, r) <= stats_service.tv_distance(p, q) + stats_service.tv_distance(q, r) + 1e-15


def test_ks_distance_point_mass():
    assert stats_service.ks_distance([0.3] * 50, measure_service.point_mass(0.3)) == 0.0
    assert stats_service.ks_distance([0.2] * 50, measure_service.point_mass(0.3)) == 1.0


def test_ks_distance_uniform_matches_scipy(rng):
    samples = rng.random(10_000)
    ks = stats_service.ks_distance(samples, measure_service.uniform())
    assert ks == pytest.approx(kstest(samples, "uniform").statistic, abs=1e-12)
    assert ks <= 0.03


def test_ks_distance_two_point_masses():
    samples = [0.0] * 70 + [1.0] * 30
    assert stats_service.ks_distance(samples, measure_service.two_point(0.3)) == pytest.approx(0.0, abs=1e-12)
    samples = [0.0] * 60 + [1.0] * 40
    assert stats_service.ks_distance(samples, measure_service.two_point(0.3)) == pytest.approx(0.1)


def test_ks_distance_empty():
    with pytest.raises(InvalidInputError):
        stats_service.ks_distance([], measure_service.uniform())


def test_mc_mean_ci_examples():
    assert stats_service.mc_mean_ci([0.25] * 10) == (0.25, 0.0)
    mean, stderr = stats_service.mc_mean_ci([0, 1] * 50)
    assert mean == 0.5
    assert stderr == pytest.approx(math.sqrt(25 / 99) / 10)
    assert stderr == pytest.approx(0.0503, abs=1e-4)
    with pytest.raises(InvalidInputError):
        stats_service.mc_mean_ci([1.0])


def test_class_histogram_examples():
    complete = LabeledGraph.from_edges(5, itertools.combinations(range(1, 6), 2))
    assert stats_service.class_histogram([complete] * 20) == {"1" * 10: 1.0}
    with pytest.raises(InvalidInputError):
        stats_service.class_histogram([])
    with pytest.raises(InvalidInputError):
        stats_service.class_histogram([complete, LabeledGraph.from_edges(4, [])])
    with pytest.raises(CostGuardError):
        stats_service.class_histogram([LabeledGraph.from_edges(9, [])])


def test_class_histogram_of_gnp_matches_oracle(rng):
    nu = measure_service.point_mass(0.5)
    samples = [kernel_service.sample_Gnw(4, nu, rng) for _ in range(20_000)]
    counts = stats_service.class_counts(samples)
    oracle = exact_dist_service.unlabeled_distribution(4, ConstructionSpec(construction="c2", nu=nu))
    assert len(counts) == 11
    assert stats_service.chi_square_pvalue(counts, oracle) > 1e-3
    assert stats_service.tv_distance(stats_service.normalize(counts), oracle) < 0.03


def test_labeled_histogram():
    g = LabeledGraph.from_edges(3, [(1, 2)])
    h = LabeledGraph.from_edges(3, [(2, 3)])
    assert stats_service.labeled_histogram([g, g, h, h]) == {0b001: 0.5, 0b100: 0.5}


def test_merge_histograms_and_normalize():
    merged = stats_service.merge_histograms([Counter(a=2, b=1), Counter(b=1), {"c": 4}])
    assert merged == Counter(a=2, b=2, c=4)
    assert stats_service.normalize(merged) == {"a": 0.25, "b": 0.25, "c": 0.5}
    with pytest.raises(InvalidInputError):
        stats_service.normalize({})


def test_chi_square_pvalue():
    assert stats_service.chi_square_pvalue({"a": 50, "b": 50}, {"a": 0.5, "b": 0.5}) == pytest.approx(1.0)
    assert stats_service.chi_square_pvalue({"a": 100, "b": 0}, {"a": 0.5, "b": 0.5}) < 1e-10
    # impossible outcome observed
    assert stats_service.chi_square_pvalue({"a": 99, "z": 1}, {"a": 1.0}) == 0.0
