"""
Report service for growgraph: header lines, CSV tables, JSON reports and
graph files, written to a text stream or to disk.
"""
import csv
import io
import json
import logging
from pathlib import Path
from typing import Any, Dict, Iterable, List, Sequence, TextIO, Tuple, Union

from .graph_service import LabeledGraph, graph_service

logger = logging.getLogger(__name__)


def _plain(value: Any) -> Any:
    """Floats with repr precision, independent of locale."""
    if isinstance(value, float):
        return repr(value)
    return value


class ReportService:
    def header(self, params: Dict[str, Any]) -> str:
        """Machine-readable first line recording every effective parameter."""
        return "# " + json.dumps(params, sort_keys=True, separators=(",", ":")) + "\n"

    def csv_table(self, columns: Sequence[str], rows: Iterable[Sequence[Any]]) -> str:
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_plain(v) for v in row])
        return buffer.getvalue()

    def json_document(self, payload: Dict[str, Any]) -> str:
        return json.dumps(payload, indent=2, sort_keys=True) + "\n"

    def flatten(self, payload: Dict[str, Any], prefix: str = "") -> List[Tuple[str, Any]]:
        """Nested report as sorted (key, value) rows with '/'-joined keys.

        Class histograms (lists of canonical/probability records) become one
        row per class, keyed by the canonical code.
        """
        rows: List[Tuple[str, Any]] = []
        for key, value in sorted(payload.items()):
            name = f"{prefix}{key}"
            if isinstance(value, dict):
                rows += self.flatten(value, f"{name}/")
            elif isinstance(value, list):
                rows += [(f"{name}/{record['canonical']}", record["probability"]) for record in value]
            else:
                rows.append((name, value))
        return rows

    def emit(self, params: Dict[str, Any], body: str, stream: TextIO) -> None:
        """Header line followed by the command output."""
        stream.write(self.header(params) + body)
        stream.flush()

    def save_graph(self, g: LabeledGraph, out: Union[str, Path]) -> Path:
        path = Path(out)
        path.parent.mkdir(parents=True, exist_ok=True)
        graph_service.write_graph(g, path)
        logger.info(f"✅ Graph with n={g.n}, {g.edge_count()} edges written to {path}")
        return path


# Global instance
report_service = ReportService()
