"""
Degree-law service: the indegree laws nu_n on {0,...,n-1} of sequential
growth, the mixed binomial laws induced by a latent measure, and sampling.
"""
import logging
import math
from functools import lru_cache
from pathlib import Path
from typing import Dict, Tuple, Union

import numpy as np
from pydantic import ValidationError
from scipy.stats import binom

from .config import config
from .errors import InvalidInputError
from .measure_service import _midpoint_values, measure_service
from .schemas import BoundaryMeasure, DegreeLaw, LawProvider, MeasureFamily

logger = logging.getLogger(__name__)


@lru_cache(maxsize=4096)
def _cumulative(pmf: Tuple[float, ...]) -> np.ndarray:
    cdf = np.cumsum(pmf)
    cdf[-1] = 1.0
    return cdf


def falling(x: int, d: int) -> int:
    """x (x-1) ... (x-d+1)"""
    return math.perm(x, d) if x >= 0 else 0


class DegreeLawService:
    def __init__(self):
        self.max_materialized = config.max_materialized_law
        self.bernoulli_cap = config.bernoulli_trial_cap

    def _law(self, n: int, pmf) -> DegreeLaw:
        try:
            return DegreeLaw(n=n, pmf=tuple(float(p) for p in pmf))
        except ValidationError as e:
            raise InvalidInputError(f"Invalid degree law for n={n}: {e.errors()[0]['msg']}") from e

    # ----------------- Laws -----------------
    def mixed_binomial(self, nu: BoundaryMeasure, n: int) -> DegreeLaw:
        """P(D = k) = C(n-1, k) * integral of theta^k (1-theta)^(n-1-k) d nu."""
        if n < 1:
            raise InvalidInputError(f"mixed_binomial needs n >= 1, got {n}")
        if n > self.max_materialized:
            raise InvalidInputError(
                f"n={n} exceeds the materialisation cap {self.max_materialized}; use two-stage sampling"
            )
        k = np.arange(n)
        if nu.family == MeasureFamily.UNIFORM:
            pmf = np.full(n, 1.0 / n)
        elif nu.family == MeasureFamily.POINT:
            pmf = binom.pmf(k, n - 1, nu.p)
        elif nu.family == MeasureFamily.TWO_POINT:
            pmf = np.zeros(n)
            pmf[0] += 1.0 - nu.p
            pmf[n - 1] += nu.p
        else:
            thetas = _midpoint_values(nu.grid, measure_service.panels)
            pmf = np.zeros(n)
            for start in range(0, len(thetas), 256):
                block = thetas[start:start + 256]
                pmf += binom.pmf(k[:, None], n - 1, block[None, :]).sum(axis=1)
            pmf /= len(thetas)
        if nu.family in (MeasureFamily.POINT, MeasureFamily.TABLE):
            # binomial rows sum to one; only roundoff is removed
            pmf = pmf / math.fsum(pmf)
        return self._law(n, pmf)

    def binomial_law(self, n: int, p: float) -> DegreeLaw:
        pmf = binom.pmf(np.arange(n), n - 1, p)
        return self._law(n, pmf / math.fsum(pmf))

    def threshold_law(self, n: int, p: float) -> DegreeLaw:
        pmf = [0.0] * n
        pmf[0] += 1.0 - p
        pmf[n - 1] += p
        return self._law(n, pmf)

    def uniform_law(self, n: int) -> DegreeLaw:
        return self._law(n, [1.0 / n] * n)

    def mixed_binomial_provider(self, nu: BoundaryMeasure) -> LawProvider:
        return lru_cache(maxsize=None)(lambda k: self.mixed_binomial(nu, k))

    def family_provider(self, name: str, p: float = 0.5) -> LawProvider:
        builders = {
            "binomial": lambda k: self.binomial_law(k, p),
            "threshold": lambda k: self.threshold_law(k, p),
            "uniform": self.uniform_law,
        }
        if name not in builders:
            raise InvalidInputError(f"Unknown law family '{name}' (expected one of {sorted(builders)})")
        return lru_cache(maxsize=None)(builders[name])

    def load_laws(self, path: Union[str, Path]) -> LawProvider:
        """Read one or more blocks of: a line 'n', then n lines 'k p_k'.

        The returned provider yields the block of size k at step k and fails
        for steps the file does not cover.
        """
        path = Path(path)
        try:
            tokens = [line.split() for line in path.read_text(encoding="utf-8").splitlines()]
        except OSError as e:
            raise InvalidInputError(f"Cannot read law file {path}: {e}") from e
        rows = [t for t in tokens if t and not t[0].startswith("#")]
        laws: Dict[int, DegreeLaw] = {}
        i = 0
        while i < len(rows):
            try:
                n = int(rows[i][0])
                block = rows[i + 1:i + 1 + n]
                if len(rows[i]) != 1 or len(block) != n:
                    raise ValueError("truncated block")
                pmf = [0.0] * n
                seen = set()
                for k_tok, p_tok in block:
                    k = int(k_tok)
                    if not 0 <= k < n:
                        raise ValueError(f"k={k} outside 0..{n - 1}")
                    if k in seen:
                        raise ValueError(f"k={k} given twice")
                    seen.add(k)
                    pmf[k] = float(p_tok)
            except (ValueError, IndexError) as e:
                raise InvalidInputError(f"{path}: malformed law block at row {i + 1}: {e}") from e
            if n in laws:
                raise InvalidInputError(f"{path}: duplicate law for n={n}")
            laws[n] = self._law(n, pmf)
            i += 1 + n
        if not laws:
            raise InvalidInputError(f"{path}: no laws found")
        logger.info(f"Loaded {len(laws)} degree law(s) from {path}")

        def provider(k: int) -> DegreeLaw:
            if k == 1:
                return laws.get(1) or self.uniform_law(1)
            if k not in laws:
                raise InvalidInputError(f"{path} has no degree law for step {k}")
            return laws[k]

        return provider

    # ----------------- Sampling -----------------
    def sample_degree(self, law: DegreeLaw, rng: np.random.Generator) -> int:
        """Inverse transform on the cumulative sums; one uniform per draw."""
        return int(np.searchsorted(_cumulative(law.pmf), rng.random(), side="right"))

    def sample_binomial(self, trials: int, theta: float, rng: np.random.Generator) -> int:
        """Bi(trials, theta): per-trial Bernoulli count up to the trial cap, CDF inversion above."""
        if trials == 0 or theta <= 0.0:
            return 0
        if theta >= 1.0:
            return trials
        if trials <= self.bernoulli_cap:
            return int(np.count_nonzero(rng.random(trials) < theta))
        # ppf(0) is -1
        return max(0, int(binom.ppf(rng.random(), trials, theta)))

    def sample_degree_with_theta(self, nu: BoundaryMeasure, n: int,
                                 rng: np.random.Generator) -> Tuple[int, float]:
        """Two-stage draw of D_n: theta ~ nu, then Bi(n-1, theta). Never materialises the law."""
        theta = float(measure_service.sample_theta(nu, rng))
        return self.sample_binomial(n - 1, theta, rng), theta

    # ----------------- Moments -----------------
    def falling_factorial_moment(self, law: DegreeLaw, d: int) -> float:
        """E[D (D-1) ... (D-d+1)]"""
        if d < 0:
            raise InvalidInputError(f"falling factorial order must be >= 0, got {d}")
        if d == 0:
            return 1.0
        return math.fsum(p * falling(k, d) for k, p in enumerate(law.pmf) if k >= d and p > 0.0)

    def mean(self, law: DegreeLaw) -> float:
        return self.falling_factorial_moment(law, 1)


# Global instance
degree_law_service = DegreeLawService()
