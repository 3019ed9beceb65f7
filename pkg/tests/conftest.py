import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).resolve().parent.parent))

from growgraph.measure_service import measure_service  # noqa: E402


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture(params=["point:0.5", "twopoint:0.3", "uniform"])
def builtin_nu(request):
    return measure_service.parse(request.param)


@pytest.fixture
def table_file(tmp_path):
    """Inverse-CDF table of a measure with an atom at 0.2 and a uniform part on [0.5, 1]."""
    path = tmp_path / "nu.table"
    path.write_text("# u psi\n0 0.2\n0.4 0.2\n0.4 0.5\n1 1\n", encoding="utf-8")
    return path
