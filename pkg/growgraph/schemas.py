"""
Pydantic schemas for growgraph
"""
import math
from enum import Enum
from typing import Any, Callable, Dict, List, Literal, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

# Tolerance for pmf normalisation and monotonicity checks on parsed tables
PMF_TOLERANCE = 1e-12


class MeasureFamily(str, Enum):
    POINT = "point"
    TWO_POINT = "twopoint"
    UNIFORM = "uniform"
    TABLE = "table"


class BoundaryMeasure(BaseModel):
    """A probability measure on [0,1].

    point:    Dirac mass at p
    twopoint: p at 1 and 1-p at 0
    uniform:  Lebesgue measure
    table:    given by knots (u, psi(u)) of its right-continuous inverse CDF;
              a jump of psi is encoded as two knots with the same u
    """

    model_config = ConfigDict(frozen=True)

    family: MeasureFamily
    p: Optional[float] = None
    grid: Optional[Tuple[Tuple[float, float], ...]] = None

    @model_validator(mode="after")
    def _check_parameters(self) -> "BoundaryMeasure":
        if self.family in (MeasureFamily.POINT, MeasureFamily.TWO_POINT):
            if self.p is None or not 0.0 <= self.p <= 1.0:
                raise ValueError(f"{self.family.value} measure needs p in [0,1], got {self.p}")
            if self.grid is not None:
                raise ValueError("grid is only valid for table measures")
        elif self.family == MeasureFamily.UNIFORM:
            if self.p is not None or self.grid is not None:
                raise ValueError("uniform measure takes no parameters")
        else:
            if self.grid is None or len(self.grid) < 2:
                raise ValueError("table measure needs at least two knots")
            us = [u for u, _ in self.grid]
            psis = [v for _, v in self.grid]
            if not all(math.isfinite(x) for x in us + psis):
                raise ValueError("table knots must be finite")
            if us[0] != 0.0 or us[-1] != 1.0:
                raise ValueError("table knots must start at u=0 and end at u=1")
            if any(b < a for a, b in zip(us, us[1:])):
                raise ValueError("table u values must be nondecreasing")
            if any(b < a for a, b in zip(psis, psis[1:])):
                raise ValueError("table psi values must be nondecreasing")
            if any(not 0.0 <= v <= 1.0 for v in psis):
                raise ValueError("table psi values must lie in [0,1]")
        return self

    def label(self) -> str:
        if self.family in (MeasureFamily.POINT, MeasureFamily.TWO_POINT):
            return f"{self.family.value}:{self.p}"
        if self.family == MeasureFamily.TABLE:
            return f"table[{len(self.grid)}]"
        return self.family.value


class DegreeLaw(BaseModel):
    """Law of the indegree of the vertex added at step n, on {0,...,n-1}."""

    model_config = ConfigDict(frozen=True)

    n: int = Field(ge=1)
    pmf: Tuple[float, ...]

    @model_validator(mode="after")
    def _check_pmf(self) -> "DegreeLaw":
        if len(self.pmf) != self.n:
            raise ValueError(f"pmf must have n={self.n} entries, got {len(self.pmf)}")
        if not all(math.isfinite(p) for p in self.pmf):
            raise ValueError("pmf entries must be finite")
        if any(p < 0.0 for p in self.pmf):
            raise ValueError("pmf entries must be nonnegative")
        total = math.fsum(self.pmf)
        if abs(total - 1.0) > PMF_TOLERANCE:
            raise ValueError(f"pmf must sum to 1, got {total!r}")
        return self


# Step k -> law of D_k on {0,...,k-1}
LawProvider = Callable[[int], DegreeLaw]


class KernelPoint(BaseModel):
    model_config = ConfigDict(frozen=True)

    s: float = Field(ge=0.0, le=1.0)  # nu-coordinate
    t: float = Field(ge=0.0, le=1.0)  # ordering coordinate


class ConstructionSpec(BaseModel):
    """Which random graph model to grow or to evaluate exactly."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    construction: Literal["c1", "c2", "polya", "gnw"]
    nu: Optional[BoundaryMeasure] = None
    laws: Optional[Any] = None  # LawProvider, only for c1

    @model_validator(mode="after")
    def _check_inputs(self) -> "ConstructionSpec":
        if self.construction in ("c2", "gnw") and self.nu is None:
            raise ValueError(f"{self.construction} needs a measure nu")
        if self.construction == "c1" and self.nu is None and self.laws is None:
            raise ValueError("c1 needs either per-step laws or a measure nu")
        if self.laws is not None and not callable(self.laws):
            raise ValueError("laws must be a callable step -> DegreeLaw")
        return self


# ----------------- CLI requests -----------------
class ExperimentRequest(BaseModel):
    command: str
    seed: int = Field(default=0, ge=0, lt=2**64)
    workers: int = Field(default=1, ge=1)

    def header(self) -> Dict[str, Any]:
        """Effective parameters; worker count is excluded as it never changes output."""
        return self.model_dump(exclude={"workers"}, mode="json")


class GrowRequest(ExperimentRequest):
    command: Literal["grow"] = "grow"
    model: Literal["c1", "c2", "polya"] = "c2"
    nu: str = "uniform"
    laws: Optional[str] = None
    n: int = Field(ge=1)
    out: Optional[str] = None


class ConvergeRequest(ExperimentRequest):
    command: Literal["converge"] = "converge"
    model: Literal["c1", "c2"] = "c2"
    nu: str = "uniform"
    laws: Optional[str] = None
    pattern: str = "k2"
    n_grid: List[int] = Field(default_factory=lambda: [32, 64, 128, 256])
    reps: int = Field(default=200, ge=2)

    @field_validator("n_grid")
    @classmethod
    def _check_grid(cls, v: List[int]) -> List[int]:
        if not v or any(n < 1 for n in v):
            raise ValueError("n-grid must be a nonempty list of positive integers")
        return v


class EquivalenceRequest(ExperimentRequest):
    command: Literal["equivalence"] = "equivalence"
    nu: str = "uniform"
    n: int = Field(default=4, ge=1)
    samples: int = Field(default=100_000, ge=1)
    format: Literal["json", "csv"] = "json"


class DegreeRequest(ExperimentRequest):
    command: Literal["degree"] = "degree"
    nu: str = "uniform"
    n: int = Field(default=1000, ge=2)
    reps: int = Field(default=10_000, ge=1)
    scale: Literal["n", "n-1"] = "n"


# ----------------- Reports -----------------
class ConvergenceRow(BaseModel):
    n: int
    mean_density: float
    stderr: float
    analytic: float
    gap: float


class EquivalenceReport(BaseModel):
    n: int
    nu: str
    samples: int
    threshold: float
    oracle: List[Dict[str, Any]]
    histograms: Dict[str, List[Dict[str, Any]]]
    tv: Dict[str, float]
    passed: bool
