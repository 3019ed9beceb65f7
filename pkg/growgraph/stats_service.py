"""
Statistics service: distances between distributions, Monte Carlo summaries
and isomorphism-class histograms.
"""
import logging
import math
from collections import Counter
from typing import Dict, Hashable, Iterable, Mapping, Sequence, Tuple

import numpy as np
from scipy.stats import chisquare

from .errors import InvalidInputError
from .graph_service import LabeledGraph, graph_service
from .measure_service import measure_service
from .schemas import BoundaryMeasure

logger = logging.getLogger(__name__)


class StatsService:
    def tv_distance(self, p: Mapping[Hashable, float], q: Mapping[Hashable, float]) -> float:
        keys = set(p) | set(q)
        return 0.5 * math.fsum(abs(p.get(k, 0.0) - q.get(k, 0.0)) for k in keys)

    def ks_distance(self, samples: Sequence[float], nu: BoundaryMeasure) -> float:
        """sup |F_emp - F_nu|, checked at every sample point and atom, from both sides."""
        x = np.sort(np.asarray(samples, dtype=float))
        if x.size == 0:
            raise InvalidInputError("ks_distance needs at least one sample")
        points = np.unique(np.concatenate([x, measure_service.atoms(nu)]))
        size = x.size
        emp_right = np.searchsorted(x, points, side="right") / size
        emp_left = np.searchsorted(x, points, side="left") / size
        gap_right = np.abs(emp_right - measure_service.cdf(nu, points))
        gap_left = np.abs(emp_left - measure_service.cdf(nu, points, left=True))
        return float(max(gap_right.max(), gap_left.max()))

    def mc_mean_ci(self, values: Sequence[float]) -> Tuple[float, float]:
        """Sample mean and standard error."""
        arr = np.asarray(values, dtype=float)
        if arr.size < 2:
            raise InvalidInputError(f"mc_mean_ci needs at least 2 values, got {arr.size}")
        return float(arr.mean()), float(arr.std(ddof=1) / math.sqrt(arr.size))

    def class_counts(self, samples: Iterable[LabeledGraph]) -> Counter:
        counts: Counter = Counter()
        n = None
        for g in samples:
            if n is None:
                n = g.n
            elif g.n != n:
                raise InvalidInputError(f"histogram samples must share n, got {n} and {g.n}")
            counts[graph_service.canonical_form(g)] += 1
        return counts

    def class_histogram(self, samples: Iterable[LabeledGraph]) -> Dict[str, float]:
        return self.normalize(self.class_counts(samples))

    def labeled_histogram(self, samples: Iterable[LabeledGraph]) -> Dict[int, float]:
        return self.normalize(Counter(g.adjacency_code() for g in samples))

    def merge_histograms(self, partials: Iterable[Mapping[Hashable, int]]) -> Counter:
        """Sum partial count maps in the order given."""
        merged: Counter = Counter()
        for part in partials:
            merged.update(part)
        return merged

    def normalize(self, counts: Mapping[Hashable, int]) -> Dict[Hashable, float]:
        total = sum(counts.values())
        if total == 0:
            raise InvalidInputError("cannot build a histogram from an empty sample stream")
        return {key: counts[key] / total for key in sorted(counts)}

    def chi_square_pvalue(self, observed: Mapping[Hashable, int], expected: Mapping[Hashable, float],
                          min_expected: float = 5.0) -> float:
        """Pearson chi-square p-value; cells with expected count below min_expected are pooled."""
        total = sum(observed.values())
        keys = sorted(set(observed) | set(expected), key=str)
        obs = np.array([observed.get(k, 0) for k in keys], dtype=float)
        exp = np.array([expected.get(k, 0.0) for k in keys], dtype=float) * total
        if exp.sum() <= 0:
            raise InvalidInputError("expected distribution has no mass")
        small = exp < min_expected
        if small.any():
            obs = np.append(obs[~small], obs[small].sum())
            exp = np.append(exp[~small], exp[small].sum())
            if exp[-1] == 0.0:
                if obs[-1] > 0:
                    return 0.0
                obs, exp = obs[:-1], exp[:-1]
        if len(obs) < 2:
            return 1.0
        exp *= obs.sum() / exp.sum()
        return float(chisquare(obs, exp).pvalue)


# Global instance
stats_service = StatsService()
