"""
Homomorphism-density service: exact homomorphism counts n(F,G) and
densities t(F,G), increasing homomorphisms of relabelled patterns, the exact
expected increasing-homomorphism count of a grown graph, and the limit t_F.
"""
import logging
import math
from typing import List, Sequence, Tuple

from .config import config
from .degree_law_service import degree_law_service, falling
from .errors import CostGuardError, InvalidInputError
from .graph_service import LabeledGraph, PatternGraph, Permutation
from .measure_service import measure_service
from .schemas import BoundaryMeasure, LawProvider

logger = logging.getLogger(__name__)


def _bits(mask: int):
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def _search_plan(m: int, edges: Sequence[Tuple[int, int]]) -> Tuple[List[int], List[Tuple[int, ...]]]:
    """Vertex order that places neighbours of placed vertices first, and for
    each position the earlier positions it must be adjacent to."""
    adjacent = {v: set() for v in range(1, m + 1)}
    for u, v in edges:
        adjacent[u].add(v)
        adjacent[v].add(u)
    order: List[int] = []
    remaining = set(adjacent)
    while remaining:
        nxt = max(sorted(remaining), key=lambda v: (len(adjacent[v] & set(order)), len(adjacent[v])))
        order.append(nxt)
        remaining.remove(nxt)
    position = {v: i for i, v in enumerate(order)}
    back = [tuple(sorted(position[u] for u in adjacent[v] if position[u] < i)) for i, v in enumerate(order)]
    return order, back


def _neumaier_prefix(values: Sequence[float]) -> List[float]:
    """Exclusive prefix sums with compensated accumulation: out[k] = sum(values[:k])."""
    out = []
    total, carry = 0.0, 0.0
    for v in values:
        out.append(total + carry)
        t = total + v
        if abs(total) >= abs(v):
            carry += (total - t) + v
        else:
            carry += (v - t) + total
        total = t
    return out


class HomDensityService:
    def __init__(self):
        self.small_pattern_cap = config.max_hom_vertices_small_pattern
        self.large_pattern_cap = config.max_hom_vertices_large_pattern
        self.expected_cap = config.max_expected_hom_vertices

    def _guard(self, F: PatternGraph, G: LabeledGraph) -> None:
        cap = self.small_pattern_cap if F.m <= 3 else self.large_pattern_cap
        if G.n > cap:
            raise CostGuardError(
                f"homomorphism counting for a pattern on {F.m} vertices needs n <= {cap}, got n={G.n}"
            )

    def _count(self, F: PatternGraph, G: LabeledGraph, injective: bool) -> int:
        self._guard(F, G)
        _, back = _search_plan(F.m, F.edges)
        rows = G.rows
        full = (1 << G.n) - 1
        last = F.m - 1
        image = [0] * F.m

        def extend(pos: int, used: int) -> int:
            mask = full & ~used
            for q in back[pos]:
                mask &= rows[image[q]]
            if pos == last:
                return mask.bit_count()
            total = 0
            for v in _bits(mask):
                image[pos] = v
                total += extend(pos + 1, used | (1 << v) if injective else 0)
            return total

        return extend(0, 0)

    # ----------------- Operations -----------------
    def hom_count(self, F: PatternGraph, G: LabeledGraph) -> int:
        """Number of maps V(F) -> V(G) sending edges to edges."""
        return self._count(F, G, injective=False)

    def injective_hom_count(self, F: PatternGraph, G: LabeledGraph) -> int:
        return self._count(F, G, injective=True)

    def noninjective_hom_count(self, F: PatternGraph, G: LabeledGraph) -> int:
        return self.hom_count(F, G) - self.injective_hom_count(F, G)

    def density(self, F: PatternGraph, G: LabeledGraph) -> float:
        return self.hom_count(F, G) / G.n ** F.m

    def increasing_hom_count(self, F: PatternGraph, sigma: Permutation, G: LabeledGraph) -> int:
        """Homomorphisms F_sigma -> G with phi(1) < phi(2) < ... < phi(m)."""
        self._guard(F, G)
        edges = F.relabeled_edges(sigma)
        earlier = [tuple(u - 1 for u, v in edges if v == j) for j in range(1, F.m + 1)]
        rows = G.rows
        full = (1 << G.n) - 1
        last = F.m - 1
        image = [0] * F.m

        def extend(j: int, floor: int) -> int:
            mask = full & ~((1 << floor) - 1)
            for i in earlier[j]:
                mask &= rows[image[i]]
            if j == last:
                return mask.bit_count()
            total = 0
            for v in _bits(mask):
                image[j] = v
                total += extend(j + 1, v + 1)
            return total

        return extend(0, 0)

    def expected_increasing_homs(self, F: PatternGraph, sigma: Permutation,
                                 laws: LawProvider, n: int) -> float:
        """E n_>=(F_sigma, G_n) for sequential growth with the given per-step laws.

        Sum over phi(1) < ... < phi(m) of prod_j E fall(D_phi(j), d_j) / fall(phi(j)-1, d_j),
        evaluated position by position with prefix sums.
        """
        if n < 1:
            raise InvalidInputError(f"n must be >= 1, got {n}")
        if n > self.expected_cap:
            raise CostGuardError(f"expected_increasing_homs needs n <= {self.expected_cap}, got n={n}")
        d = F.indegree_sequence(sigma)
        if F.m > n:
            return 0.0
        needed = sorted(set(d))
        ratio = {}
        for k in range(1, n + 1):
            law = laws(k) if k >= 2 and any(dd > 0 for dd in needed) else None
            for dd in needed:
                if dd == 0:
                    ratio[k, dd] = 1.0
                elif dd > k - 1:
                    ratio[k, dd] = 0.0
                else:
                    ratio[k, dd] = degree_law_service.falling_factorial_moment(law, dd) / falling(k - 1, dd)
        layer = [ratio[k, d[0]] for k in range(1, n + 1)]
        for j in range(1, F.m):
            prefix = _neumaier_prefix(layer)
            layer = [ratio[k, d[j]] * prefix[k - 1] for k in range(1, n + 1)]
        result = math.fsum(layer)
        logger.debug(f"E n_>=({F.name}, sigma={sigma}) at n={n}: {result}")
        return result

    def limit_density(self, F: PatternGraph, nu: BoundaryMeasure) -> float:
        """t_F = (1/m!) sum over sigma of prod_j M_{d_j(sigma)}."""
        moments = {}
        terms = []
        for sigma, d in F.indegree_sequences().items():
            product = 1.0
            for dj in d:
                if dj not in moments:
                    moments[dj] = measure_service.moment(nu, dj)
                product *= moments[dj]
            terms.append(product)
        return math.fsum(terms) / math.factorial(F.m)


# Global instance
hom_density_service = HomDensityService()
