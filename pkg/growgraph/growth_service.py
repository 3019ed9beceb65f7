"""
Growth service: the sequential attachment sampler, the latent-parameter
sampler and the urn sampler for the uniform example.

RandomStream consumption order (stable across releases):
  grow_construction1  per step k = 2..n: one uniform for D_k, then one
                      bounded integer per chosen neighbour (partial shuffle)
  grow_construction2  theta_1..theta_n (none for point masses), then per
                      step k = 2..n: k-1 uniforms, one per earlier vertex
  grow_polya          per k = 2..n: k-1 bounded integers, i = 1..k-1
"""
import logging
from typing import Dict, List, Set, Tuple

import numpy as np

from .degree_law_service import degree_law_service
from .errors import InvalidInputError
from .graph_service import AdjacencyBuilder, LabeledGraph
from .kernel_service import kernel_service
from .measure_service import measure_service
from .schemas import BoundaryMeasure, ConstructionSpec, LawProvider

logger = logging.getLogger(__name__)


def make_stream(seed: int, tag: int = 0, index: int = 0) -> np.random.Generator:
    """Independent stream for chunk/replicate `index` of model `tag` under `seed`."""
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(tag, index)))


class GrowthService:
    def __init__(self):
        self._providers: Dict[BoundaryMeasure, LawProvider] = {}

    def laws_for(self, nu: BoundaryMeasure) -> LawProvider:
        if nu not in self._providers:
            self._providers[nu] = degree_law_service.mixed_binomial_provider(nu)
        return self._providers[nu]

    def sample_uniform_subset(self, k: int, m: int, rng: np.random.Generator) -> Set[int]:
        """Uniform k-subset of {1,...,m} by the first k steps of a Fisher-Yates shuffle."""
        if not 0 <= k <= m:
            raise InvalidInputError(f"cannot choose {k} elements out of {m}")
        if k == 0:
            return set()
        picks = rng.integers(np.arange(k), m)
        pool = list(range(1, m + 1))
        for i, j in enumerate(picks):
            pool[i], pool[j] = pool[j], pool[i]
        return set(pool[:k])

    def grow_construction1(self, n: int, laws: LawProvider, rng: np.random.Generator) -> LabeledGraph:
        if n < 1:
            raise InvalidInputError(f"n must be >= 1, got {n}")
        rows = [0] * n
        for k in range(2, n + 1):
            law = laws(k)
            if law.n > k:
                raise InvalidInputError(f"law for step {k} has support {{0..{law.n - 1}}}, beyond {{0..{k - 1}}}")
            d = degree_law_service.sample_degree(law, rng)
            for i in self.sample_uniform_subset(d, k - 1, rng):
                rows[k - 1] |= 1 << (i - 1)
                rows[i - 1] |= 1 << (k - 1)
        return LabeledGraph(n, rows)

    def grow_construction2(self, n: int, nu: BoundaryMeasure,
                           rng: np.random.Generator) -> Tuple[LabeledGraph, Tuple[float, ...]]:
        """Edge {i, k}, i < k, present independently with probability theta_k."""
        if n < 1:
            raise InvalidInputError(f"n must be >= 1, got {n}")
        theta = np.asarray(measure_service.sample_theta(nu, rng, size=n), dtype=float)
        builder = AdjacencyBuilder(n)
        earlier = np.zeros(n, dtype=bool)
        for k in range(2, n + 1):
            earlier[:k - 1] = rng.random(k - 1) < theta[k - 1]
            builder.join(k - 1, earlier)
        return builder.build(), tuple(float(t) for t in theta)

    def grow_polya(self, n: int, rng: np.random.Generator, debug: bool = False) -> LabeledGraph:
        """Urn construction with phantom vertex 0 (joined to all) and -1 (joined to none).

        For vertex k and i = 1..k-1, j is uniform on {-1, 0, ..., i-1} and {i, k}
        copies the indicator of {j, k}. A draw r in [0, i+1) maps to j = r - 1.
        """
        if n < 1:
            raise InvalidInputError(f"n must be >= 1, got {n}")
        rows = [0] * n
        for k in range(2, n + 1):
            draws = rng.integers(0, np.arange(2, k + 1))
            # indicator[j + 1] is the edge indicator {j, k} for j = -1, 0, 1, ...
            indicator: List[int] = [0, 1]
            for i, r in enumerate(draws, start=1):
                bit = indicator[r]
                indicator.append(bit)
                if bit:
                    rows[k - 1] |= 1 << (i - 1)
                    rows[i - 1] |= 1 << (k - 1)
            if debug:
                red = sum(indicator)
                logger.debug(f"[POLYA] vertex {k}: urn red={red} black={len(indicator) - red}")
        return LabeledGraph(n, rows)

    def grow(self, model: ConstructionSpec, n: int, rng: np.random.Generator) -> LabeledGraph:
        if model.construction == "c1":
            laws = model.laws if model.laws is not None else self.laws_for(model.nu)
            return self.grow_construction1(n, laws, rng)
        if model.construction == "c2":
            return self.grow_construction2(n, model.nu, rng)[0]
        if model.construction == "polya":
            return self.grow_polya(n, rng)
        return kernel_service.sample_Gnw(n, model.nu, rng)


# Global instance
growth_service = GrowthService()
