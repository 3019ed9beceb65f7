import math
from collections import Counter

import pytest

from growgraph.degree_law_service import degree_law_service
from growgraph.errors import InvalidInputError, OracleCapError
from growgraph.exact_dist_service import exact_dist_service
from growgraph.graph_service import LabeledGraph, graph_service
from growgraph.growth_service import make_stream
from growgraph.kernel_service import kernel_service
from growgraph.measure_service import measure_service
from growgraph.schemas import ConstructionSpec
from growgraph.stats_service import stats_service


def c2(nu):
    return ConstructionSpec(construction="c2", nu=nu)


def test_labeled_prob_c2_point_mass():
    p = 0.3
    nu = measure_service.point_mass(p)
    for g in graph_service.enumerate_all_graphs(4):
        e = g.edge_count()
        assert exact_dist_service.labeled_prob_c2(g, nu) == pytest.approx(p ** e * (1 - p) ** (6 - e), rel=1e-12)


def test_labeled_prob_c2_uniform_n2():
    for g in graph_service.enumerate_all_graphs(2):
        assert exact_dist_service.labeled_prob_c2(g, measure_service.uniform()) == 0.5


def test_labeled_oracles_normalised(builtin_nu):
    for n in range(1, 6):
        total = math.fsum(exact_dist_service.labeled_distribution(n, c2(builtin_nu)).values())
        assert abs(total - 1.0) <= 1e-10


def test_labeled_prob_c1_matches_c2(builtin_nu):
    laws = degree_law_service.mixed_binomial_provider(builtin_nu)
    for g in graph_service.enumerate_all_graphs(4):
        assert abs(exact_dist_service.labeled_prob_c1(g, laws)
                   - exact_dist_service.labeled_prob_c2(g, builtin_nu)) <= 1e-12


def test_labeled_prob_c1_degenerate_and_uniform_laws():
    zero = degree_law_service.family_provider("binomial", 0.0)
    for g in graph_service.enumerate_all_graphs(4):
        assert exact_dist_service.labeled_prob_c1(g, zero) == (1.0 if g.edge_count() == 0 else 0.0)
    uniform = degree_law_service.family_provider("uniform")
    empty = LabeledGraph.from_edges(3, [])
    assert exact_dist_service.labeled_prob_c1(empty, uniform) == pytest.approx(1 / 6)


def test_unlabeled_distribution_examples():
    assert exact_dist_service.unlabeled_distribution(1, c2(measure_service.uniform())) == {"": 1.0}
    two = exact_dist_service.unlabeled_distribution(2, c2(measure_service.uniform()))
    assert two == {"0": 0.5, "1": 0.5}


def test_unlabeled_distribution_half_point_mass():
    dist = exact_dist_service.unlabeled_distribution(4, c2(measure_service.point_mass(0.5)))
    sizes = Counter(graph_service.canonical_form(g) for g in graph_service.enumerate_all_graphs(4))
    assert len(dist) == 11
    assert all(dist[form] == pytest.approx(size / 64) for form, size in sizes.items())


def test_unlabeled_distribution_two_point_is_threshold_graphs():
    dist = exact_dist_service.unlabeled_distribution(4, c2(measure_service.two_point(0.3)))
    # threshold graphs on 4 vertices: one per 0/1 choice of vertices 2, 3, 4
    assert len(dist) == 8
    assert math.fsum(dist.values()) == pytest.approx(1.0, abs=1e-10)


def test_gnw_and_polya_oracles():
    uniform = measure_service.uniform()
    base = exact_dist_service.unlabeled_distribution(4, c2(uniform))
    assert exact_dist_service.unlabeled_distribution(4, ConstructionSpec(construction="gnw", nu=uniform)) == base
    assert exact_dist_service.unlabeled_distribution(4, ConstructionSpec(construction="polya")) == base
    c1 = exact_dist_service.unlabeled_distribution(4, ConstructionSpec(construction="c1", nu=uniform))
    assert c1.keys() == base.keys()
    assert all(abs(c1[k] - base[k]) <= 1e-12 for k in base)


def test_relabelled_distribution_aggregates_to_unlabeled():
    nu = measure_service.uniform()
    relabelled = exact_dist_service.relabelled_distribution(4, c2(nu))
    assert math.fsum(relabelled.values()) == pytest.approx(1.0, abs=1e-12)
    classes = Counter()
    for code, p in relabelled.items():
        classes[graph_service.canonical_form(LabeledGraph.from_code(4, code))] += p
    base = exact_dist_service.unlabeled_distribution(4, c2(nu))
    assert all(classes[k] == pytest.approx(base[k], abs=1e-12) for k in base)


def test_no_labelled_oracle_for_kernel_graph():
    with pytest.raises(InvalidInputError):
        exact_dist_service.labeled_distribution(3, ConstructionSpec(construction="gnw", nu=measure_service.uniform()))


def test_oracle_cap():
    with pytest.raises(OracleCapError):
        exact_dist_service.unlabeled_distribution(7, c2(measure_service.uniform()))


def test_json_records():
    dist = exact_dist_service.unlabeled_distribution(3, c2(measure_service.point_mass(1.0)))
    assert exact_dist_service.to_json_records(dist) == [{"canonical": "7", "probability": 1.0}]


def test_kernel_graph_labelled_law_is_the_relabelled_law():
    nu = measure_service.uniform()
    expected = exact_dist_service.relabelled_distribution(3, c2(nu))
    rng = make_stream(33)
    counts = Counter(kernel_service.sample_Gnw(3, nu, rng).adjacency_code() for _ in range(20_000))
    assert stats_service.chi_square_pvalue(counts, expected) > 1e-3
    assert stats_service.tv_distance(stats_service.labeled_histogram(
        kernel_service.sample_Gnw(3, nu, rng) for _ in range(20_000)), expected) < 0.03


@pytest.mark.parametrize("kind", ["c1", "c2"])
def test_labeled_law_marginalises_to_the_smaller_law(builtin_nu, kind):
    model = ConstructionSpec(construction=kind, nu=builtin_nu)
    marginal = Counter()
    for code, p in exact_dist_service.labeled_distribution(4, model).items():
        marginal[LabeledGraph.from_code(4, code).restrict(3).adjacency_code()] += p
    for code, p in exact_dist_service.labeled_distribution(3, model).items():
        assert marginal[code] == pytest.approx(p, abs=1e-12)
