"""
Graph service: labelled simple graphs with vertex order, pattern graphs
for homomorphism counting, canonical forms and exhaustive enumeration.

Vertices are 1..n at the interface. Internally row i (0-based) is a Python
int whose bit j is set iff {i+1, j+1} is an edge.
"""
import itertools
import logging
import math
from functools import lru_cache
from pathlib import Path
from typing import Dict, Iterable, Iterator, List, Sequence, Tuple, Union

import numpy as np

from .config import config
from .errors import CostGuardError, InvalidInputError

logger = logging.getLogger(__name__)

Edge = Tuple[int, int]
Permutation = Tuple[int, ...]


class LabeledGraph:
    __slots__ = ("n", "rows")

    def __init__(self, n: int, rows: Sequence[int]):
        if n < 1 or len(rows) != n:
            raise InvalidInputError(f"graph needs n >= 1 rows, got n={n}, {len(rows)} rows")
        self.n = n
        self.rows = tuple(rows)

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[Edge]) -> "LabeledGraph":
        rows = [0] * n
        for u, v in edges:
            if not (1 <= u <= n and 1 <= v <= n) or u == v:
                raise InvalidInputError(f"invalid edge ({u}, {v}) for n={n}")
            rows[u - 1] |= 1 << (v - 1)
            rows[v - 1] |= 1 << (u - 1)
        return cls(n, rows)

    @classmethod
    def from_matrix(cls, adjacency: np.ndarray) -> "LabeledGraph":
        """Build from a boolean matrix; only the strict upper triangle is read."""
        n = adjacency.shape[0]
        upper = np.triu(np.asarray(adjacency, dtype=bool), 1)
        sym = upper | upper.T
        packed = np.packbits(sym, axis=1, bitorder="little")
        return cls(n, [int.from_bytes(row.tobytes(), "little") for row in packed])

    @classmethod
    def from_code(cls, n: int, code: int) -> "LabeledGraph":
        """Inverse of adjacency_code."""
        pairs = pair_list(n)
        last = len(pairs) - 1
        return cls.from_edges(n, (pairs[pos] for pos in range(len(pairs)) if code >> (last - pos) & 1))

    def has_edge(self, u: int, v: int) -> bool:
        return bool(self.rows[u - 1] >> (v - 1) & 1)

    def edges(self) -> List[Edge]:
        return [(i + 1, j + 1) for i in range(self.n) for j in range(i + 1, self.n) if self.rows[i] >> j & 1]

    def edge_count(self) -> int:
        return sum(row.bit_count() for row in self.rows) // 2

    def degree(self, k: int) -> int:
        return self.rows[k - 1].bit_count()

    def indegree_of(self, k: int) -> int:
        """Number of neighbours of k with smaller label."""
        return (self.rows[k - 1] & ((1 << (k - 1)) - 1)).bit_count()

    def outdegree_of(self, k: int) -> int:
        return (self.rows[k - 1] >> k).bit_count()

    def indegrees(self) -> List[int]:
        return [self.indegree_of(k) for k in range(1, self.n + 1)]

    def restrict(self, k: int) -> "LabeledGraph":
        """Induced subgraph on vertices 1..k."""
        if not 1 <= k <= self.n:
            raise InvalidInputError(f"cannot restrict a graph on {self.n} vertices to {k}")
        mask = (1 << k) - 1
        return LabeledGraph(k, [row & mask for row in self.rows[:k]])

    def adjacency_code(self) -> int:
        """Upper-triangle bits in order (1,2),(1,3),...,(n-1,n), first pair most significant."""
        code = 0
        for i in range(self.n):
            row = self.rows[i]
            for j in range(i + 1, self.n):
                code = (code << 1) | (row >> j & 1)
        return code

    def adjacency_matrix(self) -> np.ndarray:
        out = np.zeros((self.n, self.n), dtype=bool)
        for i, j in self.edges():
            out[i - 1, j - 1] = out[j - 1, i - 1] = True
        return out

    def __eq__(self, other) -> bool:
        return isinstance(other, LabeledGraph) and self.n == other.n and self.rows == other.rows

    def __hash__(self) -> int:
        return hash((self.n, self.rows))

    def __repr__(self) -> str:
        return f"LabeledGraph(n={self.n}, edges={self.edges()})"


class AdjacencyBuilder:
    """Packed bit matrix filled one vertex at a time; n*n/8 bytes of scratch."""

    def __init__(self, n: int):
        if n < 1:
            raise InvalidInputError(f"graph needs n >= 1, got n={n}")
        self.n = n
        self._bits = np.zeros((n, (n + 7) // 8), dtype=np.uint8)

    def join(self, v: int, neighbours: np.ndarray) -> None:
        """Add {v, u} for every u set in the length-n boolean row (0-based indices)."""
        self._bits[v] |= np.packbits(neighbours, bitorder="little")
        self._bits[np.flatnonzero(neighbours), v >> 3] |= np.uint8(1 << (v & 7))

    def build(self) -> LabeledGraph:
        return LabeledGraph(self.n, [int.from_bytes(row.tobytes(), "little") for row in self._bits])


class PatternGraph:
    """A small graph F with its per-permutation indegree sequences precomputed."""

    __slots__ = ("name", "m", "edges", "_perms", "_sequences")

    def __init__(self, m: int, edges: Iterable[Edge], name: str = ""):
        if not 1 <= m <= config.max_pattern_vertices:
            raise InvalidInputError(f"pattern graphs need 1 <= m <= {config.max_pattern_vertices}, got {m}")
        normalized = set()
        for u, v in edges:
            if not (1 <= u <= m and 1 <= v <= m) or u == v:
                raise InvalidInputError(f"invalid pattern edge ({u}, {v}) for m={m}")
            normalized.add((min(u, v), max(u, v)))
        self.name = name or f"pattern{m}"
        self.m = m
        self.edges = tuple(sorted(normalized))
        self._perms = tuple(tuple(p) for p in itertools.permutations(range(1, m + 1)))
        self._sequences = {sigma: self._compute_indegrees(sigma) for sigma in self._perms}

    def _compute_indegrees(self, sigma: Permutation) -> Tuple[int, ...]:
        d = [0] * self.m
        for u, v in self.edges:
            a, b = sigma[u - 1], sigma[v - 1]
            d[max(a, b) - 1] += 1
        return tuple(d)

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    def permutations(self) -> Tuple[Permutation, ...]:
        return self._perms

    def indegree_sequences(self) -> Dict[Permutation, Tuple[int, ...]]:
        return dict(self._sequences)

    def indegree_sequence(self, sigma: Permutation) -> Tuple[int, ...]:
        try:
            return self._sequences[tuple(sigma)]
        except KeyError:
            raise InvalidInputError(f"{tuple(sigma)} is not a permutation of 1..{self.m}") from None

    def relabeled_edges(self, sigma: Permutation) -> Tuple[Edge, ...]:
        """Edges of F_sigma, i.e. F relabelled by i -> sigma(i)."""
        return tuple(sorted((min(sigma[u - 1], sigma[v - 1]), max(sigma[u - 1], sigma[v - 1]))
                            for u, v in self.edges))

    def __repr__(self) -> str:
        return f"PatternGraph({self.name!r}, m={self.m}, edges={list(self.edges)})"


BUILTIN_PATTERNS: Dict[str, Tuple[int, Tuple[Edge, ...]]] = {
    "k2": (2, ((1, 2),)),
    "p3": (3, ((1, 2), (2, 3))),
    "k3": (3, ((1, 2), (1, 3), (2, 3))),
    "c4": (4, ((1, 2), (2, 3), (3, 4), (1, 4))),
    "k4": (4, ((1, 2), (1, 3), (1, 4), (2, 3), (2, 4), (3, 4))),
}


@lru_cache(maxsize=None)
def pair_list(n: int) -> Tuple[Edge, ...]:
    return tuple((i, j) for i in range(1, n + 1) for j in range(i + 1, n + 1))


@lru_cache(maxsize=None)
def _permutation_pair_maps(n: int) -> Tuple[np.ndarray, np.ndarray]:
    """For every permutation pi, the source position of each target pair, plus bit weights.

    Row r, column pos holds the index of pair (pi(a), pi(b)) where (a, b) is
    the pair at position pos.
    """
    pairs = pair_list(n)
    index = {pair: pos for pos, pair in enumerate(pairs)}
    rows = []
    for perm in itertools.permutations(range(1, n + 1)):
        rows.append([index[(min(perm[a - 1], perm[b - 1]), max(perm[a - 1], perm[b - 1]))] for a, b in pairs])
    maps = np.array(rows, dtype=np.int64).reshape(math.factorial(n), len(pairs))
    weights = (1 << np.arange(len(pairs) - 1, -1, -1, dtype=np.int64)) if pairs else np.zeros(0, dtype=np.int64)
    return maps, weights


@lru_cache(maxsize=1 << 16)
def _canonical_code(n: int, code: int) -> int:
    if n < 2:
        return 0
    maps, weights = _permutation_pair_maps(n)
    width = len(weights)
    bits = (code >> np.arange(width - 1, -1, -1, dtype=np.int64)) & 1
    return int((bits[maps] @ weights).min())


class GraphService:
    def __init__(self):
        self.max_canonical = config.max_canonical_vertices
        self.max_enumeration = config.max_enumeration_vertices

    # ----------------- Patterns -----------------
    def pattern(self, source: Union[str, Path]) -> PatternGraph:
        """Built-in pattern name or path to a pattern file."""
        key = str(source).strip().lower()
        if key in BUILTIN_PATTERNS:
            m, edges = BUILTIN_PATTERNS[key]
            return PatternGraph(m, edges, name=key)
        path = Path(source)
        if not path.is_file():
            raise InvalidInputError(f"Unknown pattern '{source}' (built-ins: {', '.join(BUILTIN_PATTERNS)})")
        g = self.read_graph(path)
        return PatternGraph(g.n, g.edges(), name=path.stem)

    def indegree_sequence(self, F: PatternGraph, sigma: Permutation) -> Tuple[int, ...]:
        return F.indegree_sequence(sigma)

    # ----------------- Canonical forms -----------------
    def canonical_code(self, g: LabeledGraph) -> int:
        """Minimal adjacency code over all relabellings."""
        if g.n > self.max_canonical:
            raise CostGuardError(f"canonical form needs n <= {self.max_canonical}, got n={g.n}")
        return _canonical_code(g.n, g.adjacency_code())

    def canonical_form(self, g: LabeledGraph) -> str:
        width = g.n * (g.n - 1) // 2
        code = self.canonical_code(g)
        return format(code, f"0{width}b") if width else ""

    def canonical_hex(self, form: str) -> str:
        """Hex rendering of a canonical bit string (empty string -> '0')."""
        return format(int(form, 2), "x") if form else "0"

    # ----------------- Relabelling -----------------
    def relabel(self, g: LabeledGraph, perm: Sequence[int]) -> LabeledGraph:
        """Graph with edge {perm(i), perm(j)} for every edge {i, j} of g (perm is 1-based)."""
        if sorted(perm) != list(range(1, g.n + 1)):
            raise InvalidInputError(f"{tuple(perm)} is not a permutation of 1..{g.n}")
        return LabeledGraph.from_edges(g.n, ((perm[u - 1], perm[v - 1]) for u, v in g.edges()))

    def random_relabel(self, g: LabeledGraph, rng: np.random.Generator) -> LabeledGraph:
        return self.relabel(g, [int(x) + 1 for x in rng.permutation(g.n)])

    # ----------------- Enumeration -----------------
    def enumerate_all_graphs(self, n: int) -> Iterator[LabeledGraph]:
        if not 1 <= n <= self.max_enumeration:
            raise CostGuardError(f"graph enumeration needs 1 <= n <= {self.max_enumeration}, got n={n}")
        for code in range(1 << (n * (n - 1) // 2)):
            yield LabeledGraph.from_code(n, code)

    # ----------------- Files -----------------
    def read_graph(self, path: Union[str, Path]) -> LabeledGraph:
        """Edge-list file: header 'n m', then m lines 'u v' with 1 <= u < v <= n."""
        path = Path(path)
        try:
            lines = [line.split() for line in path.read_text(encoding="utf-8").splitlines()]
        except OSError as e:
            raise InvalidInputError(f"Cannot read graph file {path}: {e}") from e
        lines = [t for t in lines if t and not t[0].startswith("#")]
        try:
            n, m = (int(x) for x in lines[0])
            edges = [(int(u), int(v)) for u, v in lines[1:]]
        except (ValueError, IndexError) as e:
            raise InvalidInputError(f"{path}: malformed edge list: {e}") from e
        if len(edges) != m:
            raise InvalidInputError(f"{path}: header announces {m} edges, found {len(edges)}")
        if any(not 1 <= u < v <= n for u, v in edges):
            raise InvalidInputError(f"{path}: edges must satisfy 1 <= u < v <= {n}")
        if len(set(edges)) != m:
            raise InvalidInputError(f"{path}: duplicate edges")
        return LabeledGraph.from_edges(n, edges)

    def format_graph(self, g: LabeledGraph) -> str:
        edges = g.edges()
        return "".join([f"{g.n} {len(edges)}\n"] + [f"{u} {v}\n" for u, v in edges])

    def write_graph(self, g: LabeledGraph, path: Union[str, Path]) -> Path:
        path = Path(path)
        path.write_text(self.format_graph(g), encoding="utf-8")
        logger.debug(f"Wrote graph with n={g.n}, {g.edge_count()} edges to {path}")
        return path


# Global instance
graph_service = GraphService()
