"""
Kernel service: the limit kernel W on ([0,1]^2, nu x Lebesgue), its pullback
W_nu on ([0,1]^2, Lebesgue^2), the threshold-graph kernel on [0,1], and the
W-random graph sampler.
"""
import logging
from typing import Tuple

import numpy as np

from .errors import InvalidInputError
from .graph_service import AdjacencyBuilder, LabeledGraph
from .measure_service import measure_service
from .schemas import BoundaryMeasure, KernelPoint

logger = logging.getLogger(__name__)


class KernelService:
    def eval_W(self, p1: KernelPoint, p2: KernelPoint) -> float:
        """s of the point with the larger t; 0 on ties."""
        if p1.t < p2.t:
            return p2.s
        if p1.t > p2.t:
            return p1.s
        return 0.0

    def eval_W_nu(self, nu: BoundaryMeasure, p1: KernelPoint, p2: KernelPoint) -> float:
        q1 = KernelPoint(s=measure_service.inverse_cdf(nu, p1.s), t=p1.t)
        q2 = KernelPoint(s=measure_service.inverse_cdf(nu, p2.s), t=p2.t)
        return self.eval_W(q1, q2)

    def kernel_row(self, s: np.ndarray, t: np.ndarray, i: int) -> np.ndarray:
        """W(X_i, X_j) for every j (0-based)."""
        s = np.asarray(s, dtype=float)
        t = np.asarray(t, dtype=float)
        return np.where(t > t[i], s, np.where(t < t[i], s[i], 0.0))

    # ----------------- Threshold kernel -----------------
    def threshold_embedding(self, p: float, x: float) -> KernelPoint:
        """Measure-preserving map [0,1] -> {0,1} x [0,1] onto (twopoint(p) x Lebesgue)."""
        if not (0.0 < p < 1.0 and 0.0 <= x <= 1.0):
            raise InvalidInputError(f"threshold embedding needs 0 < p < 1 and x in [0,1], got p={p}, x={x}")
        if x <= 1.0 - p:
            return KernelPoint(s=0.0, t=min(1.0, max(0.0, 1.0 - x / (1.0 - p))))
        return KernelPoint(s=1.0, t=min(1.0, max(0.0, (x - 1.0 + p) / p)))

    def eval_threshold_kernel(self, p: float, x: float, y: float) -> int:
        """Indicator of the closed quadrilateral with vertices (0,1), (1-p,1-p), (1,0), (1,1)."""
        if not all(0.0 <= v <= 1.0 for v in (p, x, y)):
            raise InvalidInputError(f"threshold kernel arguments must lie in [0,1], got p={p}, x={x}, y={y}")
        if p == 0.0:
            return 0
        if p == 1.0:
            return 1
        a = self.threshold_embedding(p, x)
        b = self.threshold_embedding(p, y)
        if a.t != b.t:
            return int(self.eval_W(a, b))
        # Equal t-coordinates: boundary of the quadrilateral, or the diagonal.
        return int(max(a.s, b.s) == 1.0 or a.t == 0.0)

    # ----------------- Sampling -----------------
    def _sample_from_points(self, s: np.ndarray, t: np.ndarray, rng: np.random.Generator) -> LabeledGraph:
        n = len(s)
        builder = AdjacencyBuilder(n)
        later = np.zeros(n, dtype=bool)
        for i in range(n - 1):
            later[:] = False
            later[i + 1:] = rng.random(n - 1 - i) < self.kernel_row(s, t, i)[i + 1:]
            builder.join(i, later)
        return builder.build()

    def sample_points(self, n: int, nu: BoundaryMeasure, rng: np.random.Generator) -> Tuple[np.ndarray, np.ndarray]:
        xi = np.asarray(measure_service.sample_theta(nu, rng, size=n), dtype=float)
        eta = rng.random(n)
        return xi, eta

    def sample_Gnw(self, n: int, nu: BoundaryMeasure, rng: np.random.Generator) -> LabeledGraph:
        """G(n, W): latent points (xi_i, eta_i), then one uniform per pair in lexicographic order."""
        if n < 1:
            raise InvalidInputError(f"n must be >= 1, got {n}")
        xi, eta = self.sample_points(n, nu, rng)
        return self._sample_from_points(xi, eta, rng)

    def sample_Gnw_nu(self, n: int, nu: BoundaryMeasure, rng: np.random.Generator) -> LabeledGraph:
        """G(n, W_nu) on Lebesgue^2: uniform s-coordinates pushed through psi."""
        if n < 1:
            raise InvalidInputError(f"n must be >= 1, got {n}")
        s = rng.random(n)
        eta = rng.random(n)
        return self._sample_from_points(measure_service.inverse_cdf_array(nu, s), eta, rng)


# Global instance
kernel_service = KernelService()
