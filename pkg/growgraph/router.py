"""
Experiment router for growgraph: turns validated requests into library
calls and formatted output.
"""
import logging
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from functools import lru_cache
from typing import Any, Callable, Iterable, List, Optional, TextIO, Tuple

from .config import config
from .degree_law_service import degree_law_service
from .errors import InvalidInputError, OracleCapError
from .exact_dist_service import exact_dist_service
from .graph_service import graph_service
from .growth_service import growth_service, make_stream
from .hom_density_service import hom_density_service
from .measure_service import measure_service
from .report_service import report_service
from .schemas import (
    BoundaryMeasure,
    ConstructionSpec,
    ConvergeRequest,
    ConvergenceRow,
    DegreeRequest,
    EquivalenceReport,
    EquivalenceRequest,
    ExperimentRequest,
    GrowRequest,
    MeasureFamily,
)
from .stats_service import stats_service

logger = logging.getLogger(__name__)

# Stream tags of the sampled models in `equivalence`
EQUIVALENCE_TAGS = {"gnw": 1, "c1": 2, "c2": 3, "polya": 4}


@lru_cache(maxsize=8)
def _laws_from_file(path: str):
    return degree_law_service.load_laws(path)


def _model(kind: str, nu: Optional[BoundaryMeasure], laws_path: Optional[str]) -> ConstructionSpec:
    laws = _laws_from_file(laws_path) if laws_path else None
    return ConstructionSpec(construction=kind, nu=nu, laws=laws)


# Workers below are module-level so process pools can pickle them.
def _converge_replicate(task: Tuple[str, Optional[BoundaryMeasure], Optional[str], str, int, int, int, int]) -> float:
    kind, nu, laws_path, pattern, n, seed, tag, rep = task
    g = growth_service.grow(_model(kind, nu, laws_path), n, make_stream(seed, tag, rep))
    return hom_density_service.density(graph_service.pattern(pattern), g)


def _equivalence_chunk(task: Tuple[str, BoundaryMeasure, int, int, int, int]) -> Counter:
    kind, nu, n, size, seed, chunk = task
    rng = make_stream(seed, EQUIVALENCE_TAGS[kind], chunk)
    model = _model(kind, nu, None)
    return stats_service.class_counts(growth_service.grow(model, n, rng) for _ in range(size))


def _degree_replicate(task: Tuple[BoundaryMeasure, int, int, int]) -> Tuple[int, float]:
    nu, n, seed, rep = task
    return degree_law_service.sample_degree_with_theta(nu, n, make_stream(seed, 0, rep))


class ExperimentRouter:
    def _map(self, fn: Callable, tasks: Iterable[Any], workers: int) -> List[Any]:
        """Order-preserving map; results never depend on the worker count."""
        tasks = list(tasks)
        if workers <= 1 or len(tasks) <= 1:
            return [fn(t) for t in tasks]
        chunksize = max(1, len(tasks) // (4 * workers))
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(fn, tasks, chunksize=chunksize))

    def process_request(self, request: ExperimentRequest, stream: TextIO) -> int:
        handlers = {
            "grow": self.cmd_grow,
            "converge": self.cmd_converge,
            "equivalence": self.cmd_equivalence,
            "degree": self.cmd_degree,
        }
        handler = handlers.get(request.command)
        if handler is None:
            raise InvalidInputError(f"Unknown command '{request.command}'")
        logger.info(f"Running {request.command} with seed={request.seed}, workers={request.workers}")
        handler(request, stream)
        return 0

    # ----------------- grow -----------------
    def cmd_grow(self, request: GrowRequest, stream: TextIO) -> None:
        if request.laws and request.model != "c1":
            raise InvalidInputError("--laws is only valid with --model c1")
        nu = measure_service.parse(request.nu) if request.model != "polya" else None
        model = _model(request.model, nu, request.laws)
        g = growth_service.grow(model, request.n, make_stream(request.seed))
        if request.out:
            report_service.save_graph(g, request.out)
        rows = [("n", g.n), ("edges", g.edge_count())]
        rows += [(f"indegree_{k}", d) for k, d in enumerate(g.indegrees(), start=1)]
        report_service.emit(request.header(), report_service.csv_table(("key", "value"), rows), stream)

    # ----------------- converge -----------------
    def cmd_converge(self, request: ConvergeRequest, stream: TextIO) -> None:
        if request.laws and request.model != "c1":
            raise InvalidInputError("--laws is only valid with --model c1")
        nu = measure_service.parse(request.nu)
        pattern = graph_service.pattern(request.pattern)
        analytic = hom_density_service.limit_density(pattern, nu)
        rows = []
        for tag, n in enumerate(request.n_grid):
            tasks = [(request.model, nu, request.laws, request.pattern, n, request.seed, tag, rep)
                     for rep in range(request.reps)]
            densities = self._map(_converge_replicate, tasks, request.workers)
            mean, stderr = stats_service.mc_mean_ci(densities)
            row = ConvergenceRow(n=n, mean_density=mean, stderr=stderr, analytic=analytic, gap=abs(mean - analytic))
            logger.info(f"n={n}: mean t({pattern.name}, G_n)={mean:.6f} ± {stderr:.6f}, limit {analytic:.6f}")
            rows.append(row)
        table = report_service.csv_table(
            ("n", "mean_density", "stderr", "analytic", "gap"),
            ((r.n, r.mean_density, r.stderr, r.analytic, r.gap) for r in rows),
        )
        report_service.emit(request.header(), table, stream)

    # ----------------- equivalence -----------------
    def cmd_equivalence(self, request: EquivalenceRequest, stream: TextIO) -> None:
        if request.n > config.max_oracle_vertices:
            raise OracleCapError(f"equivalence needs n <= {config.max_oracle_vertices}, got n={request.n}")
        nu = measure_service.parse(request.nu)
        oracle = exact_dist_service.unlabeled_distribution(request.n, ConstructionSpec(construction="c2", nu=nu))
        kinds = ["gnw", "c1", "c2"]
        if nu.family == MeasureFamily.UNIFORM:
            kinds.append("polya")
        chunk = config.mc_chunk_size
        sizes = [min(chunk, request.samples - start) for start in range(0, request.samples, chunk)]

        histograms = {}
        for kind in kinds:
            tasks = [(kind, nu, request.n, size, request.seed, c) for c, size in enumerate(sizes)]
            counts = stats_service.merge_histograms(self._map(_equivalence_chunk, tasks, request.workers))
            histograms[kind] = stats_service.normalize(counts)

        tv = {f"oracle~{kind}": stats_service.tv_distance(oracle, histograms[kind]) for kind in kinds}
        for i, a in enumerate(kinds):
            for b in kinds[i + 1:]:
                tv[f"{a}~{b}"] = stats_service.tv_distance(histograms[a], histograms[b])
        threshold = config.equivalence_threshold
        passed = all(tv[f"oracle~{kind}"] <= threshold for kind in kinds)
        if passed:
            logger.info(f"✅ All samplers within TV {threshold} of the exact law at n={request.n}")
        else:
            logger.warning(f"⚠️ Equivalence check failed: {tv}")

        report = EquivalenceReport(
            n=request.n,
            nu=request.nu,
            samples=request.samples,
            threshold=threshold,
            oracle=exact_dist_service.to_json_records(oracle),
            histograms={kind: exact_dist_service.to_json_records(h) for kind, h in histograms.items()},
            tv=tv,
            passed=passed,
        )
        if request.format == "csv":
            body = report_service.csv_table(("key", "value"), report_service.flatten(report.model_dump()))
        else:
            body = report_service.json_document(report.model_dump())
        report_service.emit(request.header(), body, stream)

    # ----------------- degree -----------------
    def cmd_degree(self, request: DegreeRequest, stream: TextIO) -> None:
        nu = measure_service.parse(request.nu)
        tasks = [(nu, request.n, request.seed, rep) for rep in range(request.reps)]
        draws = self._map(_degree_replicate, tasks, request.workers)
        scale = request.n if request.scale == "n" else request.n - 1
        scaled = [d / scale for d, _ in draws]
        ks = stats_service.ks_distance(scaled, nu)
        logger.info(f"KS distance of D_n/{request.scale} to {nu.label()}: {ks:.5f}")
        rows = [(rep, value, theta) for rep, (value, (_, theta)) in enumerate(zip(scaled, draws))]
        rows.append(("ks", ks, ""))
        table = report_service.csv_table(("rep", "scaled_degree", "theta"), rows)
        report_service.emit(request.header(), table, stream)


# Global instance
router = ExperimentRouter()
