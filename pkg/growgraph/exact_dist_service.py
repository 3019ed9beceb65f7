"""
Exact distribution oracles for small n: labelled probabilities of grown
graphs under both constructions, and their laws aggregated by isomorphism
class.
"""
import itertools
import logging
import math
from collections import defaultdict
from typing import Any, Callable, Dict, List

from .config import config
from .errors import InvalidInputError, OracleCapError
from .graph_service import LabeledGraph, graph_service
from .growth_service import growth_service
from .measure_service import measure_service
from .schemas import BoundaryMeasure, ConstructionSpec, LawProvider

logger = logging.getLogger(__name__)


class ExactDistService:
    def __init__(self):
        self.cap = config.max_oracle_vertices

    def _guard(self, n: int) -> None:
        if not 1 <= n <= self.cap:
            raise OracleCapError(f"exact oracles need 1 <= n <= {self.cap}, got n={n}")

    # ----------------- Labelled probabilities -----------------
    def labeled_prob_c2(self, g: LabeledGraph, nu: BoundaryMeasure) -> float:
        """prod over k of the integral of theta^d_k (1-theta)^(k-1-d_k) d nu."""
        self._guard(g.n)
        prob = 1.0
        for k in range(2, g.n + 1):
            d = g.indegree_of(k)
            prob *= measure_service.beta_integral(nu, d, k - 1 - d)
        return prob

    def labeled_prob_c1(self, g: LabeledGraph, laws: LawProvider) -> float:
        """prod over k of P(D_k = d_k) / C(k-1, d_k)."""
        self._guard(g.n)
        prob = 1.0
        for k in range(2, g.n + 1):
            d = g.indegree_of(k)
            law = laws(k)
            mass = law.pmf[d] if d < law.n else 0.0
            prob *= mass / math.comb(k - 1, d)
        return prob

    def _labeled_prob(self, model: ConstructionSpec) -> Callable[[LabeledGraph], float]:
        if model.construction == "c1":
            laws = model.laws if model.laws is not None else growth_service.laws_for(model.nu)
            return lambda g: self.labeled_prob_c1(g, laws)
        if model.construction == "c2":
            return lambda g: self.labeled_prob_c2(g, model.nu)
        if model.construction == "polya":
            uniform = measure_service.uniform()
            return lambda g: self.labeled_prob_c2(g, uniform)
        raise InvalidInputError("no labelled oracle for the kernel graph; use relabelled_distribution")

    # ----------------- Distributions -----------------
    def labeled_distribution(self, n: int, model: ConstructionSpec) -> Dict[int, float]:
        """Adjacency code -> probability for every labelled graph on [n]."""
        self._guard(n)
        prob = self._labeled_prob(model)
        return {g.adjacency_code(): prob(g) for g in graph_service.enumerate_all_graphs(n)}

    def relabelled_distribution(self, n: int, model: ConstructionSpec) -> Dict[int, float]:
        """Labelled law of G_n composed with a uniform random relabelling."""
        self._guard(n)
        base = self.labeled_distribution(n, model)
        perms = list(itertools.permutations(range(1, n + 1)))
        terms: Dict[int, List[float]] = defaultdict(list)
        for code, p in base.items():
            if p == 0.0:
                continue
            g = LabeledGraph.from_code(n, code)
            for perm in perms:
                terms[graph_service.relabel(g, perm).adjacency_code()].append(p / len(perms))
        return {code: math.fsum(values) for code, values in terms.items()}

    def unlabeled_distribution(self, n: int, model: ConstructionSpec) -> Dict[str, float]:
        """Canonical form -> probability."""
        self._guard(n)
        if model.construction == "gnw":
            model = ConstructionSpec(construction="c2", nu=model.nu)
        prob = self._labeled_prob(model)
        terms: Dict[str, List[float]] = defaultdict(list)
        for g in graph_service.enumerate_all_graphs(n):
            p = prob(g)
            if p > 0.0:
                terms[graph_service.canonical_form(g)].append(p)
        dist = {form: math.fsum(values) for form, values in terms.items()}
        total = math.fsum(dist.values())
        if abs(total - 1.0) > 1e-10:
            logger.warning(f"⚠️ Oracle for {model.construction} at n={n} sums to {total!r}")
        return dict(sorted(dist.items()))

    def to_json_records(self, dist: Dict[str, float]) -> List[Dict[str, Any]]:
        return [{"canonical": graph_service.canonical_hex(form), "probability": p}
                for form, p in sorted(dist.items())]


# Global instance
exact_dist_service = ExactDistService()
