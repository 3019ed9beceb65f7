"""
Measure service: the latent measure nu on [0,1], its moments, beta-type
integrals, inverse CDF and CDF, and sampling.
"""
import logging
import math
from functools import lru_cache
from pathlib import Path
from typing import Optional, Tuple, Union

import numpy as np
from pydantic import ValidationError

from .config import config
from .errors import InvalidInputError
from .schemas import BoundaryMeasure, MeasureFamily

logger = logging.getLogger(__name__)

Knots = Tuple[Tuple[float, float], ...]


@lru_cache(maxsize=64)
def _knot_arrays(knots: Knots) -> Tuple[np.ndarray, np.ndarray]:
    u = np.array([k[0] for k in knots], dtype=float)
    psi = np.array([k[1] for k in knots], dtype=float)
    return u, psi


@lru_cache(maxsize=64)
def _midpoint_values(knots: Knots, panels: int) -> np.ndarray:
    """psi at the midpoints of a uniform u-grid, for quadrature."""
    mids = (np.arange(panels) + 0.5) / panels
    return _interpolate(knots, mids)


def _interpolate(knots: Knots, u: np.ndarray) -> np.ndarray:
    us, psis = _knot_arrays(knots)
    u = np.asarray(u, dtype=float)
    # Index of the first knot strictly right of u: at a duplicated u the
    # later knot is used, which makes psi right-continuous at jumps.
    right = np.clip(np.searchsorted(us, u, side="right"), 1, len(us) - 1)
    left = right - 1
    width = us[right] - us[left]
    with np.errstate(invalid="ignore", divide="ignore"):
        frac = np.where(width > 0, (u - us[left]) / np.where(width > 0, width, 1.0), 1.0)
    frac = np.clip(frac, 0.0, 1.0)
    out = psis[left] + frac * (psis[right] - psis[left])
    return np.where(u >= us[-1], psis[-1], out)


class MeasureService:
    def __init__(self):
        self.panels = config.table_quadrature_panels

    # ----------------- Construction -----------------
    def point_mass(self, p: float) -> BoundaryMeasure:
        return self._build(family=MeasureFamily.POINT, p=p)

    def two_point(self, p: float) -> BoundaryMeasure:
        return self._build(family=MeasureFamily.TWO_POINT, p=p)

    def uniform(self) -> BoundaryMeasure:
        return BoundaryMeasure(family=MeasureFamily.UNIFORM)

    def table(self, grid) -> BoundaryMeasure:
        return self._build(family=MeasureFamily.TABLE, grid=tuple((float(u), float(v)) for u, v in grid))

    def _build(self, **fields) -> BoundaryMeasure:
        try:
            return BoundaryMeasure(**fields)
        except ValidationError as e:
            raise InvalidInputError(f"Invalid measure {fields}: {e.errors()[0]['msg']}") from e

    def parse(self, text: str) -> BoundaryMeasure:
        """Parse 'point:P', 'twopoint:P', 'uniform' or 'table:FILE'."""
        name, _, arg = text.strip().partition(":")
        name = name.lower()
        if name == "uniform" and not arg:
            return self.uniform()
        if name in ("point", "twopoint"):
            try:
                p = float(arg)
            except ValueError as e:
                raise InvalidInputError(f"Measure '{text}' needs a numeric parameter") from e
            return self.point_mass(p) if name == "point" else self.two_point(p)
        if name == "table" and arg:
            return self.load_table(arg)
        raise InvalidInputError(f"Unknown measure '{text}' (expected point:P, twopoint:P, uniform or table:FILE)")

    def load_table(self, path: Union[str, Path]) -> BoundaryMeasure:
        """Read an inverse-CDF table: one 'u psi' pair per line."""
        path = Path(path)
        try:
            lines = path.read_text(encoding="utf-8").splitlines()
        except OSError as e:
            raise InvalidInputError(f"Cannot read measure table {path}: {e}") from e
        grid = []
        for lineno, line in enumerate(lines, 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            if len(parts) != 2:
                raise InvalidInputError(f"{path}:{lineno}: expected 'u psi', got '{line}'")
            try:
                grid.append((float(parts[0]), float(parts[1])))
            except ValueError as e:
                raise InvalidInputError(f"{path}:{lineno}: non-numeric entry '{line}'") from e
        measure = self.table(grid)
        logger.debug(f"Loaded measure table {path} with {len(grid)} knots")
        return measure

    def knots(self, nu: BoundaryMeasure) -> Knots:
        """psi knots for any family; built-in families have exact piecewise-linear inverses."""
        if nu.family == MeasureFamily.TABLE:
            return nu.grid
        if nu.family == MeasureFamily.POINT:
            return ((0.0, nu.p), (1.0, nu.p))
        if nu.family == MeasureFamily.TWO_POINT:
            q = 1.0 - nu.p
            if nu.p == 0.0:
                return ((0.0, 0.0), (1.0, 0.0))
            if nu.p == 1.0:
                return ((0.0, 1.0), (1.0, 1.0))
            return ((0.0, 0.0), (q, 0.0), (q, 1.0), (1.0, 1.0))
        return ((0.0, 0.0), (1.0, 1.0))

    # ----------------- Operations -----------------
    def sample_theta(self, nu: BoundaryMeasure, rng: np.random.Generator,
                     size: Optional[int] = None) -> Union[float, np.ndarray]:
        """Draw from nu. Point masses consume no randomness; other families one uniform per draw."""
        if nu.family == MeasureFamily.POINT:
            return nu.p if size is None else np.full(size, nu.p)
        u = rng.random(size)
        if nu.family == MeasureFamily.UNIFORM:
            return u
        if nu.family == MeasureFamily.TWO_POINT:
            draw = self.inverse_cdf_array(nu, u)
            return float(draw) if size is None else draw
        draw = _interpolate(nu.grid, u)
        return float(draw) if size is None else draw

    def moment(self, nu: BoundaryMeasure, d: int) -> float:
        if d < 0:
            raise InvalidInputError(f"moment order must be >= 0, got {d}")
        if d == 0:
            return 1.0
        if nu.family == MeasureFamily.POINT:
            return nu.p ** d
        if nu.family == MeasureFamily.TWO_POINT:
            return nu.p
        if nu.family == MeasureFamily.UNIFORM:
            return 1.0 / (d + 1)
        values = _midpoint_values(nu.grid, self.panels)
        return math.fsum(values ** d) / self.panels

    def beta_integral(self, nu: BoundaryMeasure, a: int, b: int) -> float:
        """Integral of theta^a (1-theta)^b d nu(theta), with 0^0 = 1."""
        if a < 0 or b < 0:
            raise InvalidInputError(f"beta_integral exponents must be >= 0, got ({a}, {b})")
        if nu.family == MeasureFamily.POINT:
            return nu.p ** a * (1.0 - nu.p) ** b
        if nu.family == MeasureFamily.TWO_POINT:
            return nu.p * (b == 0) + (1.0 - nu.p) * (a == 0)
        if nu.family == MeasureFamily.UNIFORM:
            # a! b! / (a+b+1)!; exact integer arithmetic, correctly rounded division
            return 1 / ((a + b + 1) * math.comb(a + b, a))
        values = _midpoint_values(nu.grid, self.panels)
        return math.fsum(values ** a * (1.0 - values) ** b) / self.panels

    def inverse_cdf(self, nu: BoundaryMeasure, u: float) -> float:
        if not 0.0 <= u <= 1.0:
            raise InvalidInputError(f"inverse_cdf argument must lie in [0,1], got {u}")
        return float(self.inverse_cdf_array(nu, np.asarray(u)))

    def inverse_cdf_array(self, nu: BoundaryMeasure, u) -> np.ndarray:
        u = np.asarray(u, dtype=float)
        if nu.family == MeasureFamily.UNIFORM:
            return u.copy()
        if nu.family == MeasureFamily.POINT:
            return np.full_like(u, nu.p)
        if nu.family == MeasureFamily.TWO_POINT:
            if nu.p == 0.0:
                return np.zeros_like(u)
            return np.where(u >= 1.0 - nu.p, 1.0, 0.0)
        return _interpolate(nu.grid, u)

    def cdf(self, nu: BoundaryMeasure, x, left: bool = False) -> np.ndarray:
        """F(x) = Leb{u: psi(u) <= x}, or its left limit Leb{u: psi(u) < x}."""
        us, psis = _knot_arrays(self.knots(nu))
        x = np.asarray(x, dtype=float)
        last = len(us) - 1
        if left:
            hi = np.searchsorted(psis, x, side="left")
            lo = hi - 1
            at_start, at_end = hi <= 0, hi > last
        else:
            lo = np.searchsorted(psis, x, side="right") - 1
            hi = lo + 1
            at_start, at_end = lo < 0, lo >= last
        lo_c = np.clip(lo, 0, last)
        hi_c = np.clip(hi, 0, last)
        rise = psis[hi_c] - psis[lo_c]
        with np.errstate(invalid="ignore", divide="ignore"):
            frac = np.where(rise > 0, (x - psis[lo_c]) / np.where(rise > 0, rise, 1.0), 0.0)
        inner = us[lo_c] + np.clip(frac, 0.0, 1.0) * (us[hi_c] - us[lo_c])
        return np.where(at_start, 0.0, np.where(at_end, 1.0, inner))

    def atoms(self, nu: BoundaryMeasure) -> np.ndarray:
        """Points carrying positive nu-mass (flat stretches of psi)."""
        us, psis = _knot_arrays(self.knots(nu))
        flat = (np.diff(psis) == 0) & (np.diff(us) > 0)
        return np.unique(psis[:-1][flat])


# Global instance
measure_service = MeasureService()
